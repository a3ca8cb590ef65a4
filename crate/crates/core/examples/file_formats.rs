// Write and read back every file format: ACS table with criteria sidecar,
// E and A tables, rankings and a run manifest.

use policy_mcdm::aggregation::aggregate;
use policy_mcdm::io::{
    fixtures, load_acs_csv, load_atable, load_etable, load_ranking, save_acs_csv, save_atable, save_etable, FileDigest,
    ManifestStep, RunManifest,
};
use policy_mcdm::model::WeightVector;
use policy_mcdm::rules::{run_all_rules, RuleParams};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let d = dir.path();
    let table = fixtures::informed_assessment();

    save_acs_csv(d.join("table.csv"), &table)?;
    let back = load_acs_csv(d.join("table.csv"))?;
    println!("table.csv: {} x {}, identical scores: {}", back.m(), back.n(), back.rows() == table.rows());
    println!("sidecar:\n{}", std::fs::read_to_string(d.join("table.criteria.toml"))?.lines().take(6).collect::<Vec<_>>().join("\n"));

    let eval = run_all_rules(&table, &WeightVector::equal(table.n()), &RuleParams::default())?;
    save_etable(d.join("etable.csv"), &eval.etable)?;
    let a = aggregate(&load_etable(d.join("etable.csv"))?);
    save_atable(d.join("atable.csv"), &a)?;
    println!("atable.csv first row: {}", std::fs::read_to_string(d.join("atable.csv"))?.lines().nth(1).unwrap_or(""));

    let by_topsis = load_ranking(d.join("etable.csv"), Some("topsis"))?;
    let by_borda = load_ranking(d.join("atable.csv"), None)?;
    println!("topsis leader {}, borda leader {}", by_topsis[0], by_borda[0]);
    println!("A table reloads to the same order: {}", load_atable(d.join("atable.csv"))?.order() == a.order());

    let mut manifest = RunManifest::default();
    manifest.record(ManifestStep {
        command: "aggregate".into(),
        args: vec!["--etable".into(), "etable.csv".into(), "--out".into(), "atable.csv".into()],
        settings: Default::default(),
        inputs: vec![FileDigest::of(d, &d.join("etable.csv"))?],
        outputs: vec![FileDigest::of(d, &d.join("atable.csv"))?],
    });
    print!("{}", manifest.to_toml());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
