//! One-call ranking of a table: criterion subset, weights, rules, E table
//! and A table. The CLI and the service both go through here.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggregation::{aggregate, AggregationResult};
use crate::model::{subset_columns, AcsTable, ModelError, WeightVector};
use crate::rules::{run_rules, Evaluation, RuleError, RuleId, RuleParams};

pub const QOL: [&str; 9] = ["Q1", "Q2", "Q3", "Q4", "Q5", "Q6", "Q7", "Q8", "Q9"];
pub const CLIMATE: [&str; 2] = ["mitigation", "adaptation"];

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("no weight given for criterion `{0}`")]
    MissingWeight(String),
    #[error("weight for unknown criterion `{0}`")]
    UnknownWeight(String),
    #[error("{found} weights given for {expected} criteria")]
    WeightCount { expected: usize, found: usize },
}

/// Which columns to rank on.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriteriaSelection {
    #[default]
    All,
    /// Q1..Q9.
    Qol,
    /// Mitigation and adaptation.
    Ma,
    List(Vec<String>),
}

impl CriteriaSelection {
    pub fn resolve(&self, table: &AcsTable) -> Vec<String> {
        match self {
            CriteriaSelection::All => table.criteria().iter().map(|c| c.id.clone()).collect(),
            CriteriaSelection::Qol => QOL.iter().map(|s| s.to_string()).collect(),
            CriteriaSelection::Ma => CLIMATE.iter().map(|s| s.to_string()).collect(),
            CriteriaSelection::List(ids) => ids.clone(),
        }
    }
}

impl FromStr for CriteriaSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "" => Err("empty criterion selection".into()),
            "all" => Ok(Self::All),
            "qol" => Ok(Self::Qol),
            "ma" => Ok(Self::Ma),
            list => Ok(Self::List(list.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect())),
        }
    }
}

impl fmt::Display for CriteriaSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriteriaSelection::All => f.write_str("all"),
            CriteriaSelection::Qol => f.write_str("qol"),
            CriteriaSelection::Ma => f.write_str("ma"),
            CriteriaSelection::List(ids) => f.write_str(&ids.join(",")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSpec {
    #[default]
    Equal,
    /// Weight per criterion id; ids outside the selection are ignored.
    ById(BTreeMap<String, f64>),
    /// One weight per selected criterion, in selection order.
    Vector(Vec<f64>),
}

impl WeightSpec {
    pub fn resolve(&self, criteria: &[String]) -> Result<WeightVector, AnalysisError> {
        match self {
            WeightSpec::Equal => Ok(WeightVector::equal(criteria.len())),
            WeightSpec::Vector(v) => {
                if v.len() != criteria.len() {
                    return Err(AnalysisError::WeightCount { expected: criteria.len(), found: v.len() });
                }
                Ok(WeightVector::new(v.clone())?)
            }
            WeightSpec::ById(map) => {
                let w = criteria
                    .iter()
                    .map(|c| map.get(c).copied().ok_or_else(|| AnalysisError::MissingWeight(c.clone())))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(WeightVector::new(w)?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRequest {
    pub criteria: CriteriaSelection,
    pub weights: WeightSpec,
    pub rules: Vec<RuleId>,
    pub params: RuleParams,
}

impl Default for RankingRequest {
    fn default() -> Self {
        Self {
            criteria: CriteriaSelection::All,
            weights: WeightSpec::Equal,
            rules: RuleId::ALL.to_vec(),
            params: RuleParams::default(),
        }
    }
}

/// E table, A table and the exact inputs that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rankings {
    pub criteria: Vec<String>,
    pub weights: Vec<f64>,
    pub params: RuleParams,
    pub evaluation: Evaluation,
    pub aggregate: AggregationResult,
}

pub fn rank_table(table: &AcsTable, request: &RankingRequest) -> Result<Rankings, AnalysisError> {
    let criteria = request.criteria.resolve(table);
    let sub = subset_columns(table, &criteria)?;
    let criteria: Vec<String> = sub.criteria().iter().map(|c| c.id.clone()).collect();
    if let WeightSpec::ById(map) = &request.weights {
        if let Some(unknown) = map.keys().find(|k| table.criterion_index(k).is_none()) {
            return Err(AnalysisError::UnknownWeight(unknown.clone()));
        }
    }
    let weights = request.weights.resolve(&criteria)?;
    let evaluation = run_rules(&sub, &weights, &request.params, &request.rules)?;
    let aggregate = aggregate(&evaluation.etable);
    Ok(Rankings { criteria, weights: weights.as_slice().to_vec(), params: request.params, evaluation, aggregate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::fixtures;

    #[test]
    fn selections_parse() {
        assert_eq!("qol".parse::<CriteriaSelection>().unwrap(), CriteriaSelection::Qol);
        assert_eq!("Q1, Q3".parse::<CriteriaSelection>().unwrap(), CriteriaSelection::List(vec!["Q1".into(), "Q3".into()]));
        assert!("".parse::<CriteriaSelection>().is_err());
    }

    #[test]
    fn single_criterion_ranks_by_its_column() {
        let t = fixtures::informed_assessment();
        let req = RankingRequest { criteria: "Q1".parse().unwrap(), rules: vec![RuleId::Maximin], ..Default::default() };
        let r = rank_table(&t, &req).unwrap();
        let expected = crate::model::rank_with_ties(&t.column(0), true).unwrap();
        assert_eq!(r.evaluation.etable.columns()[0].ranks, expected.into_vec());
    }

    #[test]
    fn weights_by_id_follow_selection() {
        let t = fixtures::informed_assessment();
        let map: BTreeMap<String, f64> = QOL.iter().map(|q| (q.to_string(), 2.0)).collect();
        let req = RankingRequest { criteria: CriteriaSelection::List(vec!["Q2".into(), "Q1".into()]), weights: WeightSpec::ById(map), ..Default::default() };
        let r = rank_table(&t, &req).unwrap();
        assert_eq!(r.criteria, ["Q1", "Q2"]);
        assert_eq!(r.weights, [2.0, 2.0]);
        let missing = RankingRequest { criteria: CriteriaSelection::Ma, ..Default::default() };
        assert!(matches!(rank_table(&t, &missing), Err(AnalysisError::Model(ModelError::UnknownCriterion(_)))));
    }
}
