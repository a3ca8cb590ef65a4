//! Strategies and property bodies shared by the property and acceptance
//! targets.
#![allow(dead_code)]

pub mod grammar;

use policy_mcdm::aggregation::aggregate;
use policy_mcdm::io::{
    format_acs_csv, format_atable, format_criteria_toml, format_etable, parse_acs_csv, parse_atable, parse_catalog,
    parse_criteria_toml, parse_etable, parse_ranking, Catalog, FileDigest, ManifestStep, RunManifest, StepSettings,
};
use policy_mcdm::model::{rank_with_ties, AcsTable, Alternative, Criterion, Provenance, WeightVector};
use policy_mcdm::rules::{
    hurwicz, maximax, maximin, minimax_regret, promethee2, run_all_rules, saw, topsis, RuleId, RuleParams,
};
use policy_mcdm::scoring::{
    score_table, PromptTemplate, RetryPolicy, ScoreOptions, ScriptedProvider, TranscriptArchive,
};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type Check = Result<(), TestCaseError>;

pub fn criteria(n: usize, max: f64) -> Vec<Criterion> {
    (0..n).map(|j| Criterion::new(format!("C{j}"), format!("Criterion {j}"), 0.0, max)).collect()
}

pub fn alternatives(m: usize) -> Vec<Alternative> {
    (0..m).map(|i| Alternative::new(i as u32, format!("Policy {i}"))).collect()
}

pub fn build(scores: Vec<Vec<f64>>, max: f64) -> AcsTable {
    let (m, n) = (scores.len(), scores[0].len());
    AcsTable::new(alternatives(m), criteria(n, max), scores, Provenance::File).unwrap()
}

/// Half-point scores in [0.5, 5].
pub fn grid(m: usize, n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec((1u8..=10).prop_map(|k| k as f64 / 2.0), n), m)
}

pub fn grid_in(m: std::ops::RangeInclusive<usize>, n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (m, n).prop_flat_map(|(m, n)| grid(m, n))
}

pub fn table(m: std::ops::RangeInclusive<usize>, n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = AcsTable> {
    grid_in(m, n).prop_map(|s| build(s, 5.0))
}

fn dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y) && a.iter().zip(b).any(|(x, y)| x > y)
}

pub fn dominance(t: &AcsTable) -> Check {
    let eval = run_all_rules(t, &WeightVector::equal(t.n()), &RuleParams::default()).unwrap();
    for a in 0..t.m() {
        for b in 0..t.m() {
            if dominates(t.row(a), t.row(b)) {
                for col in eval.etable.columns() {
                    prop_assert!(col.ranks[a] >= col.ranks[b], "{} ranks {} below dominated {}", col.label, a, b);
                }
            }
        }
    }
    Ok(())
}

pub fn rank_sums(values: &[f64]) -> Check {
    let m = values.len() as f64;
    for higher in [true, false] {
        let r = rank_with_ties(values, higher).unwrap();
        let sum: f64 = r.as_slice().iter().sum();
        prop_assert!((sum - m * (m + 1.0) / 2.0).abs() < 1e-9, "{sum}");
    }
    Ok(())
}

pub fn table_rank_sums(t: &AcsTable) -> Check {
    let eval = run_all_rules(t, &WeightVector::equal(t.n()), &RuleParams::default()).unwrap();
    let m = t.m() as f64;
    for col in eval.etable.columns() {
        let sum: f64 = col.ranks.iter().sum();
        prop_assert!((sum - m * (m + 1.0) / 2.0).abs() < 1e-9, "{}: {sum}", col.label);
    }
    let total: f64 = aggregate(&eval.etable).rows.iter().map(|r| r.borda).sum();
    prop_assert!((total - 9.0 * m * (m + 1.0) / 2.0).abs() < 1e-6);
    Ok(())
}

pub fn scaling(scores: &[Vec<f64>], factors: &[u8]) -> Check {
    let base = build(scores.to_vec(), 100.0);
    let scaled: Vec<Vec<f64>> =
        scores.iter().map(|row| row.iter().zip(factors).map(|(s, f)| s * *f as f64).collect()).collect();
    let scaled = build(scaled, 100.0);
    let w = WeightVector::equal(base.n());
    prop_assert_eq!(topsis(&base, &w).unwrap().ranks, topsis(&scaled, &w).unwrap().ranks);
    prop_assert_eq!(saw(&base, &w).unwrap().ranks, saw(&scaled, &w).unwrap().ranks);
    Ok(())
}

pub fn hurwicz_endpoints(t: &AcsTable) -> Check {
    prop_assert_eq!(hurwicz(t, 0.0).unwrap().raw_values, maximin(t).unwrap().raw_values);
    prop_assert_eq!(hurwicz(t, 1.0).unwrap().raw_values, maximax(t).unwrap().raw_values);
    Ok(())
}

pub fn promethee_zero_sum(t: &AcsTable, w: &[f64]) -> Check {
    let w = WeightVector::new(w[..t.n()].to_vec()).unwrap();
    let r = promethee2(t, &w).unwrap();
    let sum: f64 = r.raw_values.iter().sum();
    prop_assert!(sum.abs() < 1e-9, "{sum}");
    Ok(())
}

pub fn regret_equals_maximin(mut scores: Vec<Vec<f64>>) -> Check {
    let m = scores.len();
    for j in 0..scores[0].len() {
        scores[j % m][j] = 5.0;
    }
    let t = build(scores, 5.0);
    prop_assert_eq!(minimax_regret(&t).unwrap().ranks, maximin(&t).unwrap().ranks);
    Ok(())
}

pub fn acs_round_trip(t: &AcsTable) -> Check {
    let crit = parse_criteria_toml(&format_criteria_toml(t.criteria()), "c").unwrap();
    prop_assert_eq!(&crit, t.criteria());
    let text = format_acs_csv(t);
    let back = parse_acs_csv(&text, &crit, "t").unwrap();
    prop_assert_eq!(back.rows(), t.rows());
    prop_assert_eq!(back.alternatives(), t.alternatives());
    prop_assert_eq!(format_acs_csv(&back), text);
    Ok(())
}

pub fn rank_tables_round_trip(t: &AcsTable) -> Check {
    let eval = run_all_rules(t, &WeightVector::equal(t.n()), &RuleParams::default()).unwrap();
    let etext = format_etable(&eval.etable);
    prop_assert_eq!(&parse_etable(&etext, "e").unwrap(), &eval.etable);
    let atext = format_atable(&aggregate(&eval.etable));
    prop_assert_eq!(format_atable(&parse_atable(&atext, "a").unwrap()), atext);
    let order: Vec<String> = aggregate(&eval.etable).order().iter().map(|i| i.to_string()).collect();
    prop_assert_eq!(parse_ranking(&order.join(", "), None, "r").unwrap(), aggregate(&eval.etable).order());
    Ok(())
}

pub fn manifest_round_trip(args: Vec<String>, alpha: f64) -> Check {
    let params = RuleParams { hurwicz_alpha: alpha, ..RuleParams::default() };
    let manifest = RunManifest {
        tool_version: "0.1.0".into(),
        steps: vec![ManifestStep {
            command: "rank".into(),
            args,
            settings: StepSettings {
                rule_params: Some(params),
                rules: Some(RuleId::ALL.iter().map(|r| r.code()).collect()),
                ..Default::default()
            },
            inputs: vec![FileDigest { path: "t.csv".into(), sha256: Some("00".repeat(32)) }],
            outputs: vec![FileDigest { path: "e.csv".into(), sha256: None }],
        }],
    };
    prop_assert_eq!(RunManifest::parse(&manifest.to_toml(), "m").unwrap(), manifest);
    Ok(())
}

pub fn promptable(m: usize, n: usize) -> (Vec<Alternative>, Vec<Criterion>) {
    let alts = (0..m)
        .map(|i| Alternative::new(i as u32, format!("Policy {i}")).with_description(format!("Description {i}.")))
        .collect();
    let crits = (0..n)
        .map(|j| {
            Criterion::new(format!("C{j}"), format!("criterion {j}"), 1.0, 10.0).with_prompt_text(format!("Text for criterion {j}."))
        })
        .collect();
    (alts, crits)
}

/// Catalog text for [`promptable`] inputs.
pub fn catalog_round_trip(m: usize, n: usize) -> Check {
    let (alts, crits) = promptable(m, n);
    let mut text = String::new();
    for a in &alts {
        text.push_str(&format!("[[alternative]]\nid = {}\nname = {:?}\ndescription = {:?}\n\n", a.id, a.name, a.description));
    }
    for c in &crits {
        text.push_str(&format!(
            "[[criterion]]\nid = {:?}\nname = {:?}\nscale_min = 1.0\nscale_max = 10.0\nprompt_text = {:?}\n\n",
            c.id, c.name, c.prompt_text
        ));
    }
    let cat: Catalog = parse_catalog(&text, "c").unwrap();
    prop_assert_eq!(cat.alternatives, alts);
    prop_assert_eq!(cat.criteria, crits);
    Ok(())
}

pub fn ratings(m: std::ops::RangeInclusive<usize>, n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Vec<u8>>> {
    (m, n).prop_flat_map(|(m, n)| prop::collection::vec(prop::collection::vec(1u8..=10, n), m))
}

fn scripted(ratings: &[Vec<u8>]) -> ScriptedProvider {
    let mut p = ScriptedProvider::new("prop-mock");
    for (i, row) in ratings.iter().enumerate() {
        for (j, r) in row.iter().enumerate() {
            p = p.with_replies(i as u32, &format!("C{j}"), &[&format!("Reasoning.\nRating: {r}/10")]);
        }
    }
    p
}

/// Two runs give byte-identical tables; a third run against the first
/// run's archive makes no calls and gives the same bytes again.
pub fn scoring_replay(ratings: &[Vec<u8>], concurrency: usize) -> Check {
    let (m, n) = (ratings.len(), ratings[0].len());
    let (alts, crits) = promptable(m, n);
    let template = PromptTemplate::canonical();
    let mut options = ScoreOptions { concurrency, ..Default::default() };
    options.cell.retry = RetryPolicy::immediate(3);
    let bytes = |run: &policy_mcdm::scoring::ScoreRun| format_acs_csv(&run.table().unwrap().unwrap());

    let mut archive = TranscriptArchive::in_memory();
    let first = score_table(&scripted(ratings), &template, &alts, &crits, &options, &mut archive).unwrap();
    let expected: Vec<Vec<Option<f64>>> = ratings.iter().map(|r| r.iter().map(|&v| Some(v as f64)).collect()).collect();
    prop_assert_eq!(&first.scores, &expected);
    prop_assert_eq!(archive.len(), m * n);

    let single = ScoreOptions { concurrency: 1, ..options.clone() };
    let second = score_table(&scripted(ratings), &template, &alts, &crits, &single, &mut TranscriptArchive::in_memory()).unwrap();
    prop_assert_eq!(bytes(&first), bytes(&second));

    let silent = ScriptedProvider::new("prop-mock");
    let replay = score_table(&silent, &template, &alts, &crits, &options, &mut archive).unwrap();
    prop_assert_eq!(silent.calls(), 0);
    prop_assert_eq!(replay.cache_hits, m * n);
    prop_assert_eq!(bytes(&first), bytes(&replay));
    for (i, a) in alts.iter().enumerate() {
        prop_assert_eq!(replay.transcript(i, 0).alternative_id, a.id);
    }
    Ok(())
}

pub fn rendered_rating(k: u32, style: usize) -> Check {
    let v = k as f64 / 2.0;
    let reply = match style {
        0 => format!("Some reasoning first.\n\nRating: {v}/10"),
        1 => format!("I would give it {v} out of 10."),
        2 => format!("Final rating: {v}"),
        _ => format!("Weighing all of this, I would rate it a {v}."),
    };
    prop_assert_eq!(policy_mcdm::scoring::parse_rating(&reply, 1.0, 10.0).value(), Some(v));
    Ok(())
}
