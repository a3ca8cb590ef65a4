//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test --test acceptance`.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use policy_mcdm::aggregation::{aggregate, compare_rankings};
use policy_mcdm::io::{fixtures, load_etable, RunManifest};
use policy_mcdm::model::{AlternativeId, WeightVector};
use policy_mcdm::rules::{maximax, maximin, median_rule, minimax_regret, topsis_with, RuleResult, TopsisNormalization};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

/// Borda sums may differ from the printed values by input rounding. The
/// bound is inclusive; `FLOAT_SLACK` absorbs the binary error of 95.6 - 95.65.
const BORDA_TOLERANCE: f64 = 0.05;
const FLOAT_SLACK: f64 = 1e-9;
const MIN_TOPSIS_TAU: f64 = 0.85;
const RULES_BUDGET: Duration = Duration::from_secs(1);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture_exact_rules() -> Outcome {
    let start = Instant::now();
    let table = fixtures::informed_assessment();
    let results: Vec<RuleResult> = vec![
        maximin(&table).map_err(|e| e.to_string())?,
        maximax(&table).map_err(|e| e.to_string())?,
        minimax_regret(&table).map_err(|e| e.to_string())?,
        median_rule(&table).map_err(|e| e.to_string())?,
    ];
    let elapsed = start.elapsed();
    let published = fixtures::informed_assessment_etable();
    for r in &results {
        let want = &published.column(r.rule.name()).ok_or("published column missing")?.ranks;
        ensure(r.ranks.as_slice() == want.as_slice(), || format!("{} ranks {:?} != {:?}", r.rule.name(), r.ranks.as_slice(), want))?;
    }
    let ties = results[0].ranks.as_slice().iter().filter(|&&r| r == 4.5).count();
    ensure(ties == 8, || format!("maximin has {ties} alternatives at rank 4.5"))?;
    ensure(results[0].ranks == results[2].ranks, || "maximin and minimax-regret differ".into())?;
    ensure(elapsed < RULES_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("21 rows x 4 rules exact, eight-way 4.5 tie, {elapsed:?}"))
}

fn replay_in(dir: &Path, manifest: &str) -> Result<String, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_policy-mcdm")).current_dir(dir).args(["replay", "--manifest", manifest]).output().map_err(|e| e.to_string())?;
    let out = String::from_utf8_lossy(&o.stdout).into_owned();
    ensure(o.status.success() && !out.contains("DIFFERS"), || format!("replay failed: {out}{}", String::from_utf8_lossy(&o.stderr)))?;
    Ok(out)
}

fn topsis_ordering() -> Outcome {
    let manifest = RunManifest::parse(fixtures::INFORMED_ASSESSMENT_MANIFEST_TOML, "manifest").map_err(|e| e.to_string())?;
    let step = manifest.steps.iter().find(|s| s.command == "rank").ok_or("manifest has no rank step")?;
    let params = step.settings.rule_params.ok_or("rank step does not pin rule parameters")?;
    ensure(params.topsis_normalization == TopsisNormalization::Vector, || format!("pinned {:?}", params.topsis_normalization))?;
    let weights = WeightVector::new(step.settings.weights.clone().ok_or("rank step does not pin weights")?).map_err(|e| e.to_string())?;
    ensure(weights.is_uniform(), || "pinned weights are not equal".into())?;

    let table = fixtures::informed_assessment();
    let r = topsis_with(&table, &weights, &params).map_err(|e| e.to_string())?;
    let full: Vec<AlternativeId> = r.ranks.preference_order().iter().map(|&i| table.alternatives()[i].id).collect();
    let reference = fixtures::ids(&fixtures::INFORMED_TOPSIS_COMMON_ORDER);
    let restricted: Vec<AlternativeId> = full.iter().copied().filter(|id| reference.contains(id)).collect();
    ensure(restricted[..4] == fixtures::ids(&[5, 7, 2, 6])[..], || format!("top-4 {:?}", &restricted[..4]))?;
    let c = compare_rankings(&restricted, &reference).map_err(|e| e.to_string())?;
    ensure(c.kendall_tau >= MIN_TOPSIS_TAU, || format!("tau {:.4}", c.kendall_tau))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for f in ["informed_assessment.csv", "informed_assessment.criteria.toml", "informed_assessment.manifest.toml"] {
        std::fs::copy(data(f), dir.path().join(f)).map_err(|e| e.to_string())?;
    }
    replay_in(dir.path(), "informed_assessment.manifest.toml")?;
    Ok(format!("top-4 5 7 2 6 over the {} compared policies, tau-b {:.4}, pinned vector normalization replays", reference.len(), c.kendall_tau))
}

fn aggregation() -> Outcome {
    let ours = aggregate(&fixtures::informed_assessment_etable());
    let published = fixtures::informed_assessment_atable();
    let mut worst: f64 = 0.0;
    for p in &published.rows {
        let row = ours.row(p.id).ok_or_else(|| format!("policy {} missing", p.id))?;
        let d = (row.borda - p.borda).abs();
        worst = worst.max(d);
        ensure(d <= BORDA_TOLERANCE + FLOAT_SLACK, || format!("policy {}: borda {:.2} vs {:.2}", p.id, row.borda, p.borda))?;
        ensure(row.simple_median == p.simple_median, || format!("policy {}: median {} vs {}", p.id, row.simple_median, p.simple_median))?;
    }
    ensure(ours.order() == published.order(), || format!("order {:?}", ours.order()))?;
    ensure(ours.rows.len() == published.rows.len(), || "row count differs".into())?;
    Ok(format!("{} policies, max borda deviation {worst:.3}, medians exact, 7 first and 0 last", ours.rows.len()))
}

fn parser() -> Outcome {
    use policy_mcdm::scoring::parse_rating;
    let six = parse_rating(fixtures::LEAF_BLOWER_ADAPTATION_REPLY, 1.0, 10.0).value();
    let half = parse_rating(fixtures::LEAF_BLOWER_MITIGATION_REPLY, 1.0, 10.0).value();
    ensure(six == Some(6.0) && half == Some(4.5), || format!("recorded replies gave {six:?} and {half:?}"))?;
    let cases = common::grammar::cases();
    let failures: Vec<String> = cases.iter().filter_map(|c| common::grammar::check(c).err()).collect();
    ensure(cases.len() >= 50, || format!("only {} grammar cases", cases.len()))?;
    ensure(failures.is_empty(), || failures.join("; "))?;
    let refused = cases.iter().filter(|c| matches!(c.want, common::grammar::Want::OutOfScale(_))).count();
    Ok(format!("recorded replies 6.0 and 4.5, {} grammar cases, {refused} out-of-scale replies refused, 0 clamps", cases.len()))
}

fn run_suite<S: Strategy>(name: &str, cases: u32, strategy: S, test: impl Fn(S::Value) -> common::Check) -> Result<String, String> {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))?;
    Ok(format!("{name} x{cases}"))
}

fn property_suites() -> Outcome {
    use common::*;
    let done = [
        run_suite("dominance 5x4", 1000, table(5..=5, 4..=4), |t| dominance(&t))?,
        run_suite("column scaling", 256, (grid_in(2..=8, 1..=5), prop::collection::vec(1u8..=20, 5)), |(s, f)| scaling(&s, &f))?,
        run_suite("hurwicz endpoints", 256, table(1..=10, 1..=6), |t| hurwicz_endpoints(&t))?,
        run_suite("promethee zero sum", 256, (table(2..=12, 1..=6), prop::collection::vec(0.1f64..10.0, 6)), |(t, w)| promethee_zero_sum(&t, &w))?,
        run_suite("rank sums", 256, prop::collection::vec((0u8..12).prop_map(|k| k as f64 / 4.0), 1..40), |v| rank_sums(&v))?,
        run_suite("rule rank sums", 256, table(1..=12, 1..=6), |t| table_rank_sums(&t))?,
        run_suite("regret vs maximin", 256, grid_in(1..=8, 1..=5), regret_equals_maximin)?,
        run_suite("acs round trip", 256, table(1..=10, 1..=6), |t| acs_round_trip(&t))?,
        run_suite("rank table round trip", 256, table(1..=10, 1..=6), |t| rank_tables_round_trip(&t))?,
        run_suite("manifest round trip", 256, (prop::collection::vec("[a-z0-9./-]{1,12}", 0..6), 0.0f64..=1.0), |(a, x)| manifest_round_trip(a, x))?,
        run_suite("catalog round trip", 64, (1usize..6, 1usize..5), |(m, n)| catalog_round_trip(m, n))?,
        run_suite("scoring replay", 64, (ratings(1..=5, 1..=4), 1usize..=6), |(r, c)| scoring_replay(&r, c))?,
    ];
    Ok(done.join(", "))
}

fn data(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn cli(dir: &Path, args: &[&str]) -> Result<String, String> {
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--manifest", "pipeline.toml"]);
    let o = Command::new(env!("CARGO_BIN_EXE_policy-mcdm")).current_dir(dir).args(&full).output().map_err(|e| e.to_string())?;
    ensure(o.status.success(), || format!("{}: {}", args.join(" "), String::from_utf8_lossy(&o.stderr)))?;
    Ok(String::from_utf8_lossy(&o.stdout).into_owned())
}

fn end_to_end() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    for f in ["policies.toml", "criteria.toml", "gpt_mock_script.toml", "informed_assessment.etable.csv"] {
        std::fs::copy(data(f), d.join(f)).map_err(|e| e.to_string())?;
    }
    let ids = fixtures::GPT_TOPSIS_ORDER.map(|i| i.to_string()).join(",");
    let out = cli(d, &["score", "--catalog", "policies.toml", "criteria.toml", "--provider", "mock:gpt_mock_script.toml", "--policies", &ids, "--out", "gpt.csv"])?;
    ensure(out.contains("scored 13 x 11 cells"), || out.clone())?;
    for sel in ["all", "qol", "ma"] {
        let etable = format!("gpt.{sel}.etable.csv");
        cli(d, &["rank", "--table", "gpt.csv", "--criteria", sel, "--out", &etable])?;
        cli(d, &["aggregate", "--etable", &etable, "--out", &format!("gpt.{sel}.atable.csv")])?;
    }
    cli(d, &["compare", "--ranking-a", "gpt.all.etable.csv", "--by-a", "topsis", "--ranking-b", "informed_assessment.etable.csv", "--by-b", "topsis", "--out", "compare.json"])?;

    let e = load_etable(d.join("gpt.all.etable.csv")).map_err(|e| e.to_string())?;
    let col = e.column("topsis").ok_or("no topsis column")?;
    let mut order: Vec<(f64, u32)> = col.ranks.iter().zip(e.alternatives()).map(|(r, a)| (*r, a.id.0)).collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let order: Vec<u32> = order.into_iter().map(|(_, id)| id).collect();
    ensure(order == fixtures::GPT_TOPSIS_ORDER, || format!("mock topsis order {order:?}"))?;

    let moved = tempfile::tempdir().map_err(|e| e.to_string())?;
    for entry in std::fs::read_dir(d).map_err(|e| e.to_string())? {
        let entry = entry.map_err(|e| e.to_string())?;
        std::fs::copy(entry.path(), moved.path().join(entry.file_name())).map_err(|e| e.to_string())?;
    }
    let report = replay_in(moved.path(), "pipeline.toml")?;
    let identical = report.matches("identical").count();
    let steps = RunManifest::load(d.join("pipeline.toml")).map_err(|e| e.to_string())?.steps.len();
    Ok(format!("score, rank x3, aggregate x3, compare: {steps} steps, {identical} outputs replayed identical"))
}

fn main() {
    let criteria: [Criterion; 6] = [
        ("fixture-exact rules", fixture_exact_rules),
        ("topsis ordering", topsis_ordering),
        ("aggregation", aggregation),
        ("parser", parser),
        ("property suites", property_suites),
        ("end-to-end pipeline", end_to_end),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  {name:<20} {detail} [{:.2?}]", start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<20} {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
