//! Bundled seed data: the informed assessment table and its rule ranks,
//! the policy and criterion catalogs, a scripted scoring run and two
//! recorded model replies.

use super::{parse_acs_csv, parse_atable, parse_catalog, parse_criteria_toml, parse_etable, Catalog};
use crate::aggregation::AggregationResult;
use crate::model::{AcsTable, AlternativeId, Provenance};
use crate::rules::EvaluationTable;
use crate::scoring::{PromptTemplate, ScriptedProvider};

pub const INFORMED_ASSESSMENT_CSV: &str = include_str!("../../data/informed_assessment.csv");
pub const INFORMED_ASSESSMENT_CRITERIA_TOML: &str = include_str!("../../data/informed_assessment.criteria.toml");
/// sha256 of [`INFORMED_ASSESSMENT_CSV`].
pub const INFORMED_ASSESSMENT_SHA256: &str = "0ddf1347ec2ee8d0cfde8dc3fda19e9525f2b01cf66b00d1e7cf57fb45e2612e";
/// Published per-rule ranks of the informed assessment table.
pub const INFORMED_ASSESSMENT_ETABLE_CSV: &str = include_str!("../../data/informed_assessment.etable.csv");
/// Published aggregates of [`INFORMED_ASSESSMENT_ETABLE_CSV`], as printed.
pub const INFORMED_ASSESSMENT_ATABLE_CSV: &str = include_str!("../../data/informed_assessment.atable.csv");
/// Manifest that ranks and aggregates the informed assessment table with
/// the default rule parameters, TOPSIS normalization included.
pub const INFORMED_ASSESSMENT_MANIFEST_TOML: &str = include_str!("../../data/informed_assessment.manifest.toml");
pub const POLICIES_TOML: &str = include_str!("../../data/policies.toml");
pub const CRITERIA_TOML: &str = include_str!("../../data/criteria.toml");
pub const GPT_MOCK_SCRIPT_TOML: &str = include_str!("../../data/gpt_mock_script.toml");
pub const LEAF_BLOWER_ADAPTATION_QUERY: &str = include_str!("../../data/transcripts/leaf_blower_adaptation_query.txt");
pub const LEAF_BLOWER_ADAPTATION_REPLY: &str = include_str!("../../data/transcripts/leaf_blower_adaptation.txt");
pub const LEAF_BLOWER_MITIGATION_REPLY: &str = include_str!("../../data/transcripts/leaf_blower_mitigation.txt");

/// Policies scored by the scripted run, in the order GPT-4's TOPSIS
/// ranking put them.
pub const GPT_TOPSIS_ORDER: [u32; 13] = [5, 7, 2, 6, 4, 17, 13, 9, 20, 21, 22, 3, 14];
/// Informed assessment TOPSIS order over the policies the two exercises share.
pub const INFORMED_TOPSIS_COMMON_ORDER: [u32; 11] = [5, 7, 2, 6, 3, 14, 9, 17, 4, 20, 13];
pub const QOL_CRITERIA: [&str; 9] = ["Q1", "Q2", "Q3", "Q4", "Q5", "Q6", "Q7", "Q8", "Q9"];
pub const CLIMATE_CRITERIA: [&str; 2] = ["mitigation", "adaptation"];

pub const INFORMED_ASSESSMENT: &str = "informed_assessment";

/// 21 policies x Q1..Q9 on a 0 to 5 scale.
pub fn informed_assessment() -> AcsTable {
    let criteria = parse_criteria_toml(INFORMED_ASSESSMENT_CRITERIA_TOML, "informed_assessment.criteria.toml")
        .expect("bundled criteria parse");
    let t = parse_acs_csv(INFORMED_ASSESSMENT_CSV, &criteria, "informed_assessment.csv").expect("bundled table parses");
    AcsTable::new(t.alternatives().to_vec(), t.criteria().to_vec(), t.rows().to_vec(), Provenance::InformedAssessment)
        .expect("bundled table is valid")
}

pub fn informed_assessment_etable() -> EvaluationTable {
    parse_etable(INFORMED_ASSESSMENT_ETABLE_CSV, "informed_assessment.etable.csv").expect("bundled E table parses")
}

pub fn informed_assessment_atable() -> AggregationResult {
    parse_atable(INFORMED_ASSESSMENT_ATABLE_CSV, "informed_assessment.atable.csv").expect("bundled A table parses")
}

/// The 23-policy catalog.
pub fn policy_catalog() -> Catalog {
    parse_catalog(POLICIES_TOML, "policies.toml").expect("bundled policies parse")
}

/// The two climate criteria and Q1..Q9 on a 1 to 10 scale.
pub fn criteria_catalog() -> Catalog {
    parse_catalog(CRITERIA_TOML, "criteria.toml").expect("bundled criteria parse")
}

/// Policies and criteria in one catalog.
pub fn seed_catalog() -> Catalog {
    let mut c = policy_catalog();
    c.criteria = criteria_catalog().criteria;
    c
}

pub fn gpt_mock_provider() -> ScriptedProvider {
    ScriptedProvider::from_toml(GPT_MOCK_SCRIPT_TOML).expect("bundled script parses")
}

pub fn canonical_template() -> PromptTemplate {
    PromptTemplate::canonical()
}

/// Named bundled tables, as accepted by the service.
pub fn table_by_name(name: &str) -> Option<AcsTable> {
    (name == INFORMED_ASSESSMENT).then(informed_assessment)
}

pub fn ids(raw: &[u32]) -> Vec<AlternativeId> {
    raw.iter().map(|&i| AlternativeId(i)).collect()
}
