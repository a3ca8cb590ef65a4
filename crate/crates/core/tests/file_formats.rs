use policy_mcdm::aggregation::aggregate;
use policy_mcdm::io::{self, fixtures};
use policy_mcdm::model::AlternativeId;

#[test]
fn informed_assessment_shape_and_cell() {
    let t = fixtures::informed_assessment();
    assert_eq!((t.m(), t.n()), (21, 9));
    let i = t.alternative_index(AlternativeId(14)).unwrap();
    let j = t.criterion_index("Q2").unwrap();
    assert_eq!(t.score(i, j), 4.2);
    let ids: Vec<u32> = t.alternatives().iter().map(|a| a.id.0).collect();
    assert_eq!(ids, (0..=20).collect::<Vec<_>>());
}

#[test]
fn fixture_digest_matches_file_on_disk() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let digest = io::file_sha256(format!("{dir}/data/informed_assessment.csv")).unwrap();
    assert_eq!(digest, fixtures::INFORMED_ASSESSMENT_SHA256);
    let pinned = std::fs::read_to_string(format!("{dir}/data/informed_assessment.csv.sha256")).unwrap();
    assert_eq!(pinned.split_whitespace().next(), Some(digest.as_str()));
}

#[test]
fn loads_from_disk_with_sidecar() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let t = io::load_acs_csv(format!("{dir}/data/informed_assessment.csv")).unwrap();
    assert_eq!(t.rows(), fixtures::informed_assessment().rows());
}

#[test]
fn empty_data_section_fails() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path().join("t.csv");
    std::fs::write(&p, "id,name,Q1,Q2,Q3,Q4,Q5,Q6,Q7,Q8,Q9\n").unwrap();
    std::fs::write(io::sidecar_path(&p), fixtures::INFORMED_ASSESSMENT_CRITERIA_TOML).unwrap();
    let err = io::load_acs_csv(&p).unwrap_err().to_string();
    assert!(err.contains("no data rows"), "{err}");
}

#[test]
fn acs_save_then_load_is_identity() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path().join("ia.csv");
    let t = fixtures::informed_assessment();
    io::save_acs_csv(&p, &t).unwrap();
    let back = io::load_acs_csv(&p).unwrap();
    assert_eq!(back.rows(), t.rows());
    assert_eq!(back.criteria(), t.criteria());
    assert_eq!(back.alternatives(), t.alternatives());
    assert_eq!(std::fs::read_to_string(&p).unwrap(), fixtures::INFORMED_ASSESSMENT_CSV);
}

#[test]
fn etable_fixture_round_trip_is_byte_identical() {
    let e = fixtures::informed_assessment_etable();
    assert_eq!(e.m(), 21);
    let text = io::format_etable(&e);
    assert_eq!(text, fixtures::INFORMED_ASSESSMENT_ETABLE_CSV);
    assert_eq!(text.lines().count(), 22);
}

#[test]
fn atable_first_and_last_rows() {
    let a = aggregate(&fixtures::informed_assessment_etable());
    let text = io::format_atable(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "id,name,borda,simple_median,averaged_rank_median");
    assert!(lines[1].starts_with("7,Safe Streets programs,158.20,20.00,"), "{}", lines[1]);
    assert!(lines[21].starts_with("0,Residential hot water heating with heat pumps,"));
    let back = io::parse_atable(&text, "a").unwrap();
    assert_eq!(io::format_atable(&back), text);
}

#[test]
fn catalogs_match_the_seed_lists() {
    let p = fixtures::policy_catalog();
    assert_eq!(p.alternatives.len(), 23);
    assert_eq!(p.alternative(AlternativeId(22)).unwrap().name, "Gasoline-powered leaf blower ban");
    let c = fixtures::criteria_catalog();
    assert_eq!(c.criteria.len(), 11);
    assert!(c.criterion("Q1").unwrap().prompt_text.starts_with("Health, safety, and hygiene"));
    assert!(c.criterion("adaptation").unwrap().prompt_text.starts_with("Adaptation in the context of climate change"));
}

#[test]
fn catalog_files_merge_and_reject_repeats() {
    let d = tempfile::tempdir().unwrap();
    let a = d.path().join("a.toml");
    std::fs::write(&a, fixtures::POLICIES_TOML).unwrap();
    let b = d.path().join("b.toml");
    std::fs::write(&b, fixtures::CRITERIA_TOML).unwrap();
    let merged = io::load_catalogs(&[&a, &b]).unwrap();
    assert_eq!((merged.alternatives.len(), merged.criteria.len()), (23, 11));
    assert!(matches!(io::load_catalogs(&[&a, &a]), Err(io::IoError::Duplicate { .. })));
}

#[test]
fn saved_etable_and_atable_reload() {
    let d = tempfile::tempdir().unwrap();
    let e = fixtures::informed_assessment_etable();
    io::save_etable(d.path().join("e.csv"), &e).unwrap();
    assert_eq!(io::load_etable(d.path().join("e.csv")).unwrap(), e);
    let a = aggregate(&e);
    io::save_atable(d.path().join("a.csv"), &a).unwrap();
    let back = io::load_atable(d.path().join("a.csv")).unwrap();
    assert_eq!(back.order(), a.order());
}

#[test]
fn published_atable_fixture() {
    let a = fixtures::informed_assessment_atable();
    assert_eq!(a.rows.len(), 21);
    assert_eq!(a.rows[0].id.0, 7);
    assert_eq!(a.rows[0].borda, 158.21);
    assert_eq!(a.rows[20].id.0, 0);
    let ours = policy_mcdm::aggregation::aggregate(&fixtures::informed_assessment_etable());
    for p in &a.rows {
        let row = ours.row(p.id).unwrap();
        assert_eq!(row.simple_median, p.simple_median, "policy {}", p.id);
        assert!((row.borda - p.borda).abs() <= 0.05 + 1e-9, "policy {}", p.id);
    }
    assert_eq!(ours.order(), a.order());
}
