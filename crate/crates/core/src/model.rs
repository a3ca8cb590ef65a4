//! Domain vocabulary: criteria, alternatives, the ACS performance table,
//! weights and tie-aware rankings.
//!
//! Every type here is immutable after construction. Mutation happens by
//! building a new value (see [`AcsTable::with_score`]).

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance under which two values count as tied when ranking.
///
/// Rule outputs are sums of rounded products, so mathematically equal
/// values can differ in the last few ulps depending on summation order.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("cannot rank an empty list of values")]
    EmptyInput,
    #[error("value at index {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("unknown criterion id `{0}`")]
    UnknownCriterion(String),
    #[error("unknown alternative id {0}")]
    UnknownAlternative(AlternativeId),
    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),
    #[error("invalid table: {0}")]
    InvalidTable(ValidationReport),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("criterion `{id}`: scale_min {min} must be below scale_max {max}")]
    InvalidScale { id: String, min: f64, max: f64 },
}

/// Whether larger or smaller scores are preferred on a criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    #[default]
    Benefit,
    Cost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub id: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    /// Text substituted verbatim into LLM queries.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub prompt_text: String,
    #[serde(default)]
    pub direction: Direction,
    pub scale_min: f64,
    pub scale_max: f64,
}

impl Criterion {
    pub fn new(id: impl Into<String>, name: impl Into<String>, scale_min: f64, scale_max: f64) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
            description: String::new(),
            prompt_text: String::new(),
            direction: Direction::Benefit,
            scale_min,
            scale_max,
        }
    }

    pub fn with_prompt_text(mut self, text: impl Into<String>) -> Self {
        self.prompt_text = text.into();
        self
    }

    pub fn with_description(mut self, text: impl Into<String>) -> Self {
        self.description = text.into();
        self
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn in_scale(&self, value: f64) -> bool {
        value >= self.scale_min && value <= self.scale_max
    }

    /// Maps a score onto a benefit orientation by mirroring cost scores
    /// inside the criterion's scale.
    pub fn oriented(&self, value: f64) -> f64 {
        match self.direction {
            Direction::Benefit => value,
            Direction::Cost => self.scale_min + self.scale_max - value,
        }
    }
}

/// Key of an alternative. Matches the integer policy ids of the catalogs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlternativeId(pub u32);

impl fmt::Display for AlternativeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl std::str::FromStr for AlternativeId {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim().parse().map(AlternativeId)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alternative {
    pub id: AlternativeId,
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
}

impl Alternative {
    pub fn new(id: u32, name: impl Into<String>) -> Self {
        Self { id: AlternativeId(id), name: name.into(), description: String::new() }
    }

    pub fn with_description(mut self, text: impl Into<String>) -> Self {
        self.description = text.into();
        self
    }
}

/// Where a cell's score came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    InformedAssessment,
    Llm,
    File,
    ManualEdit,
}

/// One structural problem found by [`validate_table`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NoAlternatives,
    NoCriteria,
    DuplicateAlternative { id: AlternativeId },
    DuplicateCriterion { id: String },
    EmptyCriterionId { column: usize },
    InvalidScale { column: usize, criterion: String, min: f64, max: f64 },
    RaggedRow { row: usize, expected: usize, found: usize },
    ProvenanceShape { row: usize },
    NonFinite { row: usize, column: usize, alternative: AlternativeId, criterion: String },
    OutOfScale {
        row: usize,
        column: usize,
        alternative: AlternativeId,
        criterion: String,
        value: f64,
        min: f64,
        max: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoAlternatives => write!(f, "table has no alternatives"),
            Violation::NoCriteria => write!(f, "table has no criteria"),
            Violation::DuplicateAlternative { id } => write!(f, "duplicate alternative id {id}"),
            Violation::DuplicateCriterion { id } => write!(f, "duplicate criterion id `{id}`"),
            Violation::EmptyCriterionId { column } => write!(f, "criterion at column {column} has an empty id"),
            Violation::InvalidScale { criterion, min, max, .. } => {
                write!(f, "criterion `{criterion}` has scale [{min}, {max}]")
            }
            Violation::RaggedRow { row, expected, found } => {
                write!(f, "row {row} has {found} scores, expected {expected}")
            }
            Violation::ProvenanceShape { row } => write!(f, "row {row} provenance does not match its scores"),
            Violation::NonFinite { row, column, alternative, criterion } => write!(
                f,
                "cell ({row}, {column}) [alternative {alternative}, criterion {criterion}] is not finite"
            ),
            Violation::OutOfScale { row, column, alternative, criterion, value, min, max } => write!(
                f,
                "cell ({row}, {column}) [alternative {alternative}, criterion {criterion}] = {value} outside [{min}, {max}]"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Alternatives x criteria x scores.
///
/// Tables built with [`AcsTable::new`] satisfy every structural invariant
/// (rectangular, finite, in scale, unique ids, non-empty). A table built with
/// [`AcsTable::unchecked`] may not; run [`validate_table`] on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcsTable {
    alternatives: Vec<Alternative>,
    criteria: Vec<Criterion>,
    scores: Vec<Vec<f64>>,
    provenance: Vec<Vec<Provenance>>,
}

impl AcsTable {
    pub fn new(
        alternatives: Vec<Alternative>,
        criteria: Vec<Criterion>,
        scores: Vec<Vec<f64>>,
        provenance: Provenance,
    ) -> Result<Self, ModelError> {
        let prov = scores.iter().map(|row| vec![provenance; row.len()]).collect();
        Self::with_provenance(alternatives, criteria, scores, prov)
    }

    pub fn with_provenance(
        alternatives: Vec<Alternative>,
        criteria: Vec<Criterion>,
        scores: Vec<Vec<f64>>,
        provenance: Vec<Vec<Provenance>>,
    ) -> Result<Self, ModelError> {
        let table = Self { alternatives, criteria, scores, provenance };
        let report = validate_table(&table);
        if report.is_empty() {
            Ok(table)
        } else {
            Err(ModelError::InvalidTable(report))
        }
    }

    /// Builds a table without checking invariants.
    pub fn unchecked(
        alternatives: Vec<Alternative>,
        criteria: Vec<Criterion>,
        scores: Vec<Vec<f64>>,
        provenance: Provenance,
    ) -> Self {
        let provenance = scores.iter().map(|row| vec![provenance; row.len()]).collect();
        Self { alternatives, criteria, scores, provenance }
    }

    pub fn alternatives(&self) -> &[Alternative] {
        &self.alternatives
    }

    pub fn criteria(&self) -> &[Criterion] {
        &self.criteria
    }

    /// Number of alternatives (rows).
    pub fn m(&self) -> usize {
        self.alternatives.len()
    }

    /// Number of criteria (columns).
    pub fn n(&self) -> usize {
        self.criteria.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.scores
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.scores[i]
    }

    pub fn score(&self, i: usize, j: usize) -> f64 {
        self.scores[i][j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.scores.iter().map(|row| row[j]).collect()
    }

    pub fn provenance(&self, i: usize, j: usize) -> Provenance {
        self.provenance[i][j]
    }

    pub fn provenance_grid(&self) -> &[Vec<Provenance>] {
        &self.provenance
    }

    pub fn alternative_index(&self, id: AlternativeId) -> Option<usize> {
        self.alternatives.iter().position(|a| a.id == id)
    }

    pub fn criterion_index(&self, id: &str) -> Option<usize> {
        self.criteria.iter().position(|c| c.id == id)
    }

    /// Scores with cost columns mirrored so that larger is always better.
    pub fn oriented_rows(&self) -> Vec<Vec<f64>> {
        self.scores
            .iter()
            .map(|row| row.iter().zip(&self.criteria).map(|(&s, c)| c.oriented(s)).collect())
            .collect()
    }

    /// Returns a copy with one cell replaced, checking the criterion's scale.
    pub fn with_score(
        &self,
        alternative: AlternativeId,
        criterion: &str,
        value: f64,
        provenance: Provenance,
    ) -> Result<Self, ModelError> {
        let i = self.alternative_index(alternative).ok_or(ModelError::UnknownAlternative(alternative))?;
        let j = self
            .criterion_index(criterion)
            .ok_or_else(|| ModelError::UnknownCriterion(criterion.to_string()))?;
        let mut next = self.clone();
        next.scores[i][j] = value;
        next.provenance[i][j] = provenance;
        let report = validate_table(&next);
        if report.is_empty() {
            Ok(next)
        } else {
            Err(ModelError::InvalidTable(report))
        }
    }

    /// Overwrites a cell without validation.
    pub fn set_score_unchecked(&mut self, i: usize, j: usize, value: f64) {
        self.scores[i][j] = value;
    }
}

/// Checks every structural invariant of `table` and lists the violations.
pub fn validate_table(table: &AcsTable) -> ValidationReport {
    let mut violations = Vec::new();
    if table.alternatives.is_empty() {
        violations.push(Violation::NoAlternatives);
    }
    if table.criteria.is_empty() {
        violations.push(Violation::NoCriteria);
    }

    let mut seen = HashSet::new();
    for a in &table.alternatives {
        if !seen.insert(a.id) {
            violations.push(Violation::DuplicateAlternative { id: a.id });
        }
    }
    let mut seen = HashSet::new();
    for (column, c) in table.criteria.iter().enumerate() {
        if c.id.is_empty() {
            violations.push(Violation::EmptyCriterionId { column });
        } else if !seen.insert(c.id.as_str()) {
            violations.push(Violation::DuplicateCriterion { id: c.id.clone() });
        }
        if c.scale_min.partial_cmp(&c.scale_max) != Some(std::cmp::Ordering::Less) {
            violations.push(Violation::InvalidScale {
                column,
                criterion: c.id.clone(),
                min: c.scale_min,
                max: c.scale_max,
            });
        }
    }

    let n = table.criteria.len();
    if table.scores.len() != table.alternatives.len() {
        violations.push(Violation::RaggedRow {
            row: table.scores.len().min(table.alternatives.len()),
            expected: table.alternatives.len(),
            found: table.scores.len(),
        });
    }
    for (row, (scores, alt)) in table.scores.iter().zip(&table.alternatives).enumerate() {
        if scores.len() != n {
            violations.push(Violation::RaggedRow { row, expected: n, found: scores.len() });
            continue;
        }
        if table.provenance.get(row).map(Vec::len) != Some(n) {
            violations.push(Violation::ProvenanceShape { row });
        }
        for (column, (&value, c)) in scores.iter().zip(&table.criteria).enumerate() {
            if !value.is_finite() {
                violations.push(Violation::NonFinite {
                    row,
                    column,
                    alternative: alt.id,
                    criterion: c.id.clone(),
                });
            } else if !c.in_scale(value) {
                violations.push(Violation::OutOfScale {
                    row,
                    column,
                    alternative: alt.id,
                    criterion: c.id.clone(),
                    value,
                    min: c.scale_min,
                    max: c.scale_max,
                });
            }
        }
    }
    ValidationReport { violations }
}

/// Restricts `table` to the named criteria, keeping the table's own column
/// order. Repeated ids are kept once.
pub fn subset_columns<S: AsRef<str>>(table: &AcsTable, criterion_ids: &[S]) -> Result<AcsTable, ModelError> {
    let mut wanted = HashSet::new();
    for id in criterion_ids {
        let id = id.as_ref();
        if table.criterion_index(id).is_none() {
            return Err(ModelError::UnknownCriterion(id.to_string()));
        }
        wanted.insert(id);
    }
    let keep: Vec<usize> = (0..table.n()).filter(|&j| wanted.contains(table.criteria[j].id.as_str())).collect();
    let pick = |row: &Vec<f64>| keep.iter().map(|&j| row[j]).collect::<Vec<_>>();
    let out = AcsTable {
        alternatives: table.alternatives.clone(),
        criteria: keep.iter().map(|&j| table.criteria[j].clone()).collect(),
        scores: table.scores.iter().map(pick).collect(),
        provenance: table.provenance.iter().map(|row| keep.iter().map(|&j| row[j]).collect()).collect(),
    };
    let report = validate_table(&out);
    if report.is_empty() {
        Ok(out)
    } else {
        Err(ModelError::InvalidTable(report))
    }
}

/// Non-negative criterion weights. Consumers normalize before use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector {
    weights: Vec<f64>,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self, ModelError> {
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !w.is_finite() || **w < 0.0) {
            return Err(ModelError::InvalidWeights(format!("weight {i} is {w}; weights must be finite and >= 0")));
        }
        if !weights.iter().any(|&w| w > 0.0) {
            return Err(ModelError::InvalidWeights("at least one weight must be positive".into()));
        }
        Ok(Self { weights })
    }

    pub fn equal(n: usize) -> Self {
        Self { weights: vec![1.0; n.max(1)] }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn normalized(&self) -> Vec<f64> {
        let total: f64 = self.weights.iter().sum();
        self.weights.iter().map(|w| w / total).collect()
    }

    pub fn is_uniform(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] == w[1])
    }
}

/// Average-tie ranks, one per alternative. Larger rank means more preferred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RankVector {
    ranks: Vec<f64>,
}

impl RankVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.ranks
    }

    /// Indices ordered most preferred first; ties keep index order.
    pub fn preference_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.ranks.len()).collect();
        idx.sort_by(|&a, &b| self.ranks[b].total_cmp(&self.ranks[a]).then(a.cmp(&b)));
        idx
    }
}

pub(crate) fn values_tie(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// Ranks `values` with average ties. With `higher_is_better` the largest
/// value receives rank `m`; otherwise the smallest does.
pub fn rank_with_ties(values: &[f64], higher_is_better: bool) -> Result<RankVector, ModelError> {
    if values.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(ModelError::NonFinite { index, value });
    }
    // Ascending by preference: position 0 gets rank 1.
    let mut order: Vec<usize> = (0..values.len()).collect();
    if higher_is_better {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    } else {
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    }
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values_tie(values[order[end - 1]], values[order[end]]) {
            end += 1;
        }
        // Positions start..end hold ranks start+1..=end; their mean is exact.
        let rank = ((start + 1 + end) as f64) / 2.0;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        start = end;
    }
    Ok(RankVector { ranks })
}
