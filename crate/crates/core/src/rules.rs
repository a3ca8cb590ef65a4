//! The nine decision rules and the evaluation (E) table they produce.
//!
//! Rules D1-D4 and D7 treat criteria as states of the world and work on the
//! raw (benefit-oriented) scores. D5, D6, D8 and D9 normalize first. Every
//! rule returns its raw per-alternative values, the orientation of those
//! values, the average-tie ranks, and the parameters that produced them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{rank_with_ties, validate_table, AcsTable, AlternativeId, Direction, ModelError, RankVector, ValidationReport, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleId {
    Maximin,
    Maximax,
    MinimaxRegret,
    Median,
    Lengths,
    Saw,
    Hurwicz,
    Promethee,
    Topsis,
}

impl RuleId {
    /// Canonical column order of the E table.
    pub const ALL: [RuleId; 9] = [
        RuleId::Maximin,
        RuleId::Maximax,
        RuleId::MinimaxRegret,
        RuleId::Median,
        RuleId::Lengths,
        RuleId::Saw,
        RuleId::Hurwicz,
        RuleId::Promethee,
        RuleId::Topsis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::Maximin => "maximin",
            RuleId::Maximax => "maximax",
            RuleId::MinimaxRegret => "minimax_regret",
            RuleId::Median => "median",
            RuleId::Lengths => "lengths",
            RuleId::Saw => "saw",
            RuleId::Hurwicz => "hurwicz",
            RuleId::Promethee => "promethee",
            RuleId::Topsis => "topsis",
        }
    }

    /// Short code `D1`..`D9`.
    pub fn code(self) -> String {
        let k = RuleId::ALL.iter().position(|&r| r == self).unwrap_or(0) + 1;
        format!("D{k}")
    }

    pub fn parse_list(spec: &str) -> Result<Vec<RuleId>, RuleError> {
        let spec = spec.trim();
        if spec.eq_ignore_ascii_case("all") {
            return Ok(RuleId::ALL.to_vec());
        }
        let mut rules: Vec<RuleId> = Vec::new();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let rule = part.parse()?;
            if !rules.contains(&rule) {
                rules.push(rule);
            }
        }
        if rules.is_empty() {
            return Err(RuleError::UnknownRule(spec.to_string()));
        }
        rules.sort();
        Ok(rules)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase().replace('-', "_");
        RuleId::ALL
            .iter()
            .copied()
            .find(|r| r.name() == lower || r.code().eq_ignore_ascii_case(&lower))
            .or(match lower.as_str() {
                "regret" => Some(RuleId::MinimaxRegret),
                "promethee2" | "promethee_ii" => Some(RuleId::Promethee),
                _ => None,
            })
            .ok_or_else(|| RuleError::UnknownRule(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RuleError {
    #[error("invalid table: {0}")]
    InvalidTable(ValidationReport),
    #[error("weight vector has {found} entries, table has {expected} criteria")]
    WeightLength { expected: usize, found: usize },
    #[error("degenerate column `{criterion}`: {reason}")]
    DegenerateColumn { criterion: String, reason: String },
    #[error("hurwicz alpha {0} is outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("net flow needs at least 2 alternatives, table has {0}")]
    TooFewAlternatives(usize),
    #[error("invalid preference function: {0}")]
    InvalidPreference(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error(transparent)]
    Rank(#[from] ModelError),
    #[error("{rule}: {source}")]
    InRule { rule: RuleId, source: Box<RuleError> },
    #[error("evaluation table: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SawNormalization {
    /// Benefit: value / column max. Cost: column min / value.
    #[default]
    DivideByMax,
    /// (value - min) / (max - min); constant columns scale to 1.
    MinMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopsisNormalization {
    /// value / sqrt(sum of squares of the column).
    #[default]
    Vector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthsNormalization {
    /// Each score divided by its criterion's scale_max before taking the
    /// Euclidean row norm.
    #[default]
    ScaleMax,
}

/// PROMETHEE preference function applied to a score difference `d`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PreferenceFunction {
    /// 1 when d > 0, else 0.
    #[default]
    Usual,
    /// 0 up to `indifference`, 1 from `preference`, linear in between.
    Linear { indifference: f64, preference: f64 },
}

impl PreferenceFunction {
    pub fn validate(&self) -> Result<(), RuleError> {
        match *self {
            PreferenceFunction::Usual => Ok(()),
            PreferenceFunction::Linear { indifference, preference } => {
                if indifference >= 0.0 && preference > indifference && preference.is_finite() {
                    Ok(())
                } else {
                    Err(RuleError::InvalidPreference(format!(
                        "linear thresholds need 0 <= q < p, got q={indifference}, p={preference}"
                    )))
                }
            }
        }
    }

    pub fn eval(&self, d: f64) -> f64 {
        match *self {
            PreferenceFunction::Usual => {
                if d > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            PreferenceFunction::Linear { indifference, preference } => {
                if d <= indifference {
                    0.0
                } else if d >= preference {
                    1.0
                } else {
                    (d - indifference) / (preference - indifference)
                }
            }
        }
    }
}

impl FromStr for PreferenceFunction {
    type Err = RuleError;

    /// `usual` or `linear:<q>:<p>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("usual") {
            return Ok(PreferenceFunction::Usual);
        }
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() == 3 && parts[0].eq_ignore_ascii_case("linear") {
            let q = parts[1].parse::<f64>().map_err(|e| RuleError::InvalidPreference(e.to_string()))?;
            let p = parts[2].parse::<f64>().map_err(|e| RuleError::InvalidPreference(e.to_string()))?;
            let f = PreferenceFunction::Linear { indifference: q, preference: p };
            f.validate()?;
            return Ok(f);
        }
        Err(RuleError::InvalidPreference(format!("expected `usual` or `linear:q:p`, got `{s}`")))
    }
}

/// Parameters for the rules that need them. The default is the pinned
/// configuration recorded in run manifests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleParams {
    pub hurwicz_alpha: f64,
    pub saw_normalization: SawNormalization,
    pub promethee_preference: PreferenceFunction,
    pub topsis_normalization: TopsisNormalization,
    pub lengths_normalization: LengthsNormalization,
    /// Closeness assigned when an alternative's two separations are both 0.
    pub topsis_degenerate_closeness: f64,
}

impl Default for RuleParams {
    fn default() -> Self {
        Self {
            hurwicz_alpha: 0.5,
            saw_normalization: SawNormalization::DivideByMax,
            promethee_preference: PreferenceFunction::Usual,
            topsis_normalization: TopsisNormalization::Vector,
            lengths_normalization: LengthsNormalization::ScaleMax,
            topsis_degenerate_closeness: 0.5,
        }
    }
}

/// Parameters a rule actually used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum AppliedParams {
    None,
    Lengths { normalization: LengthsNormalization },
    Saw { normalization: SawNormalization, weights: Vec<f64> },
    Hurwicz { alpha: f64 },
    Promethee { preference: PreferenceFunction, weights: Vec<f64>, single_alternative: bool },
    Topsis { normalization: TopsisNormalization, weights: Vec<f64>, degenerate_closeness: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleResult {
    pub rule: RuleId,
    pub raw_values: Vec<f64>,
    /// Orientation of `raw_values`; ranks always put the preferred end high.
    pub higher_is_better: bool,
    pub ranks: RankVector,
    pub params: AppliedParams,
}

impl RuleResult {
    fn build(rule: RuleId, raw_values: Vec<f64>, higher_is_better: bool, params: AppliedParams) -> Result<Self, RuleError> {
        let ranks = rank_with_ties(&raw_values, higher_is_better)?;
        Ok(Self { rule, raw_values, higher_is_better, ranks, params })
    }
}

fn check_table(table: &AcsTable) -> Result<(), RuleError> {
    let report = validate_table(table);
    if report.is_empty() {
        Ok(())
    } else {
        Err(RuleError::InvalidTable(report))
    }
}

fn check_weights(table: &AcsTable, weights: &WeightVector) -> Result<Vec<f64>, RuleError> {
    if weights.len() != table.n() {
        return Err(RuleError::WeightLength { expected: table.n(), found: weights.len() });
    }
    Ok(weights.normalized())
}

fn row_min(row: &[f64]) -> f64 {
    row.iter().copied().fold(f64::INFINITY, f64::min)
}

fn row_max(row: &[f64]) -> f64 {
    row.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// D1: worst score per alternative; higher is better.
pub fn maximin(table: &AcsTable) -> Result<RuleResult, RuleError> {
    check_table(table)?;
    let raw = table.oriented_rows().iter().map(|r| row_min(r)).collect();
    RuleResult::build(RuleId::Maximin, raw, true, AppliedParams::None)
}

/// D2: best score per alternative; higher is better.
pub fn maximax(table: &AcsTable) -> Result<RuleResult, RuleError> {
    check_table(table)?;
    let raw = table.oriented_rows().iter().map(|r| row_max(r)).collect();
    RuleResult::build(RuleId::Maximax, raw, true, AppliedParams::None)
}

/// D3: largest shortfall from each column's best score; lower is better.
pub fn minimax_regret(table: &AcsTable) -> Result<RuleResult, RuleError> {
    check_table(table)?;
    let rows = table.oriented_rows();
    let best: Vec<f64> = (0..table.n()).map(|j| rows.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let raw = rows
        .iter()
        .map(|r| r.iter().zip(&best).map(|(s, b)| b - s).fold(0.0, f64::max))
        .collect();
    RuleResult::build(RuleId::MinimaxRegret, raw, false, AppliedParams::None)
}

pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    }
}

/// D4: row median (mean of the middle two for an even count); higher is better.
pub fn median_rule(table: &AcsTable) -> Result<RuleResult, RuleError> {
    check_table(table)?;
    let raw = table.oriented_rows().iter().map(|r| median(r)).collect();
    RuleResult::build(RuleId::Median, raw, true, AppliedParams::None)
}

/// D5: Euclidean norm of the row after dividing each score by its
/// criterion's `scale_max`; higher is better.
pub fn lengths_rule(table: &AcsTable) -> Result<RuleResult, RuleError> {
    check_table(table)?;
    for c in table.criteria() {
        if c.scale_max <= 0.0 {
            return Err(RuleError::DegenerateColumn {
                criterion: c.id.clone(),
                reason: format!("scale_max {} must be positive to scale lengths", c.scale_max),
            });
        }
    }
    let raw = table
        .oriented_rows()
        .iter()
        .map(|r| r.iter().zip(table.criteria()).map(|(s, c)| (s / c.scale_max).powi(2)).sum::<f64>().sqrt())
        .collect();
    RuleResult::build(
        RuleId::Lengths,
        raw,
        true,
        AppliedParams::Lengths { normalization: LengthsNormalization::ScaleMax },
    )
}

fn saw_scaled(table: &AcsTable, normalization: SawNormalization) -> Result<Vec<Vec<f64>>, RuleError> {
    let mut scaled = vec![vec![0.0; table.n()]; table.m()];
    for (j, c) in table.criteria().iter().enumerate() {
        let col = table.column(j);
        let (lo, hi) = (row_min(&col), row_max(&col));
        for (i, &s) in col.iter().enumerate() {
            scaled[i][j] = match (normalization, c.direction) {
                (SawNormalization::DivideByMax, Direction::Benefit) => {
                    if hi <= 0.0 {
                        return Err(RuleError::DegenerateColumn {
                            criterion: c.id.clone(),
                            reason: format!("column max is {hi}; divide-by-max needs a positive max"),
                        });
                    }
                    s / hi
                }
                (SawNormalization::DivideByMax, Direction::Cost) => {
                    if lo <= 0.0 {
                        return Err(RuleError::DegenerateColumn {
                            criterion: c.id.clone(),
                            reason: format!("cost column min is {lo}; min/value needs positive scores"),
                        });
                    }
                    lo / s
                }
                (SawNormalization::MinMax, dir) => {
                    if hi == lo {
                        1.0
                    } else if dir == Direction::Benefit {
                        (s - lo) / (hi - lo)
                    } else {
                        (hi - s) / (hi - lo)
                    }
                }
            };
        }
    }
    Ok(scaled)
}

/// D6: weighted sum of scaled scores; higher is better.
pub fn saw(table: &AcsTable, weights: &WeightVector) -> Result<RuleResult, RuleError> {
    saw_with(table, weights, SawNormalization::default())
}

pub fn saw_with(table: &AcsTable, weights: &WeightVector, normalization: SawNormalization) -> Result<RuleResult, RuleError> {
    check_table(table)?;
    let w = check_weights(table, weights)?;
    let scaled = saw_scaled(table, normalization)?;
    let raw = scaled.iter().map(|r| r.iter().zip(&w).map(|(s, w)| s * w).sum()).collect();
    RuleResult::build(RuleId::Saw, raw, true, AppliedParams::Saw { normalization, weights: w })
}

/// D7: `alpha * best + (1 - alpha) * worst`; higher is better.
pub fn hurwicz(table: &AcsTable, alpha: f64) -> Result<RuleResult, RuleError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(RuleError::AlphaOutOfRange(alpha));
    }
    check_table(table)?;
    let raw = table
        .oriented_rows()
        .iter()
        .map(|r| {
            let (lo, hi) = (row_min(r), row_max(r));
            // Exact endpoints so alpha 0/1 reproduce maximin/maximax.
            if alpha == 0.0 {
                lo
            } else if alpha == 1.0 {
                hi
            } else {
                alpha * hi + (1.0 - alpha) * lo
            }
        })
        .collect();
    RuleResult::build(RuleId::Hurwicz, raw, true, AppliedParams::Hurwicz { alpha })
}

/// D8: PROMETHEE II net outranking flow; higher is better.
pub fn promethee2(table: &AcsTable, weights: &WeightVector) -> Result<RuleResult, RuleError> {
    promethee2_with(table, weights, PreferenceFunction::default())
}

pub fn promethee2_with(
    table: &AcsTable,
    weights: &WeightVector,
    preference: PreferenceFunction,
) -> Result<RuleResult, RuleError> {
    check_table(table)?;
    preference.validate()?;
    let w = check_weights(table, weights)?;
    let m = table.m();
    if m < 2 {
        return Err(RuleError::TooFewAlternatives(m));
    }
    let rows = table.oriented_rows();
    let pi = |a: usize, b: usize| -> f64 {
        rows[a].iter().zip(&rows[b]).zip(&w).map(|((sa, sb), w)| w * preference.eval(sa - sb)).sum()
    };
    let mut flows = vec![0.0; m];
    for a in 0..m {
        for b in (a + 1)..m {
            let d = pi(a, b) - pi(b, a);
            flows[a] += d;
            flows[b] -= d;
        }
    }
    let scale = 1.0 / (m as f64 - 1.0);
    let raw = flows.into_iter().map(|f| f * scale).collect();
    RuleResult::build(
        RuleId::Promethee,
        raw,
        true,
        AppliedParams::Promethee { preference, weights: w, single_alternative: false },
    )
}

/// D9: relative closeness to the ideal point after vector normalization;
/// higher is better.
pub fn topsis(table: &AcsTable, weights: &WeightVector) -> Result<RuleResult, RuleError> {
    topsis_with(table, weights, &RuleParams::default())
}

pub fn topsis_with(table: &AcsTable, weights: &WeightVector, params: &RuleParams) -> Result<RuleResult, RuleError> {
    check_table(table)?;
    let w = check_weights(table, weights)?;
    let (m, n) = (table.m(), table.n());
    let mut v = vec![vec![0.0; n]; m];
    let mut ideal = vec![0.0; n];
    let mut anti = vec![0.0; n];
    for (j, c) in table.criteria().iter().enumerate() {
        let col = table.column(j);
        let norm = col.iter().map(|s| s * s).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(RuleError::DegenerateColumn {
                criterion: c.id.clone(),
                reason: "all scores are zero; vector normalization is undefined".into(),
            });
        }
        for i in 0..m {
            v[i][j] = w[j] * col[i] / norm;
        }
        let (lo, hi) = (v.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min), v.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max));
        (ideal[j], anti[j]) = match c.direction {
            Direction::Benefit => (hi, lo),
            Direction::Cost => (lo, hi),
        };
    }
    let dist = |row: &[f64], target: &[f64]| row.iter().zip(target).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let raw = v
        .iter()
        .map(|row| {
            let (plus, minus) = (dist(row, &ideal), dist(row, &anti));
            if plus + minus == 0.0 {
                params.topsis_degenerate_closeness
            } else {
                minus / (plus + minus)
            }
        })
        .collect();
    RuleResult::build(
        RuleId::Topsis,
        raw,
        true,
        AppliedParams::Topsis {
            normalization: params.topsis_normalization,
            weights: w,
            degenerate_closeness: params.topsis_degenerate_closeness,
        },
    )
}

/// Runs a single rule with the given weights and parameters.
pub fn run_rule(rule: RuleId, table: &AcsTable, weights: &WeightVector, params: &RuleParams) -> Result<RuleResult, RuleError> {
    let result = match rule {
        RuleId::Maximin => maximin(table),
        RuleId::Maximax => maximax(table),
        RuleId::MinimaxRegret => minimax_regret(table),
        RuleId::Median => median_rule(table),
        RuleId::Lengths => lengths_rule(table),
        RuleId::Saw => saw_with(table, weights, params.saw_normalization),
        RuleId::Hurwicz => hurwicz(table, params.hurwicz_alpha),
        RuleId::Promethee if table.m() == 1 => single_alternative_flow(table, weights, params),
        RuleId::Promethee => promethee2_with(table, weights, params.promethee_preference),
        RuleId::Topsis => topsis_with(table, weights, params),
    };
    result.map_err(|e| RuleError::InRule { rule, source: Box::new(e) })
}

// A lone alternative has no pairwise comparisons; its flow is 0 and its rank 1.
fn single_alternative_flow(table: &AcsTable, weights: &WeightVector, params: &RuleParams) -> Result<RuleResult, RuleError> {
    check_table(table)?;
    let w = check_weights(table, weights)?;
    RuleResult::build(
        RuleId::Promethee,
        vec![0.0],
        true,
        AppliedParams::Promethee { preference: params.promethee_preference, weights: w, single_alternative: true },
    )
}

/// Row label of the E and A tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternativeRef {
    pub id: AlternativeId,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankColumn {
    pub label: String,
    pub ranks: Vec<f64>,
}

/// Per-rule rank columns keyed by alternative (the E table).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationTable {
    alternatives: Vec<AlternativeRef>,
    columns: Vec<RankColumn>,
}

impl EvaluationTable {
    pub fn new(alternatives: Vec<AlternativeRef>, columns: Vec<RankColumn>) -> Result<Self, RuleError> {
        if alternatives.is_empty() {
            return Err(RuleError::Shape("no alternatives".into()));
        }
        if columns.is_empty() {
            return Err(RuleError::Shape("no rank columns".into()));
        }
        let mut ids: Vec<_> = alternatives.iter().map(|a| a.id).collect();
        ids.sort();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(RuleError::Shape(format!("duplicate alternative id {}", w[0])));
        }
        for c in &columns {
            if c.ranks.len() != alternatives.len() {
                return Err(RuleError::Shape(format!(
                    "column `{}` has {} entries for {} alternatives",
                    c.label,
                    c.ranks.len(),
                    alternatives.len()
                )));
            }
            if let Some(v) = c.ranks.iter().find(|v| !v.is_finite()) {
                return Err(RuleError::Shape(format!("column `{}` holds non-finite value {v}", c.label)));
            }
        }
        Ok(Self { alternatives, columns })
    }

    pub fn from_results(table: &AcsTable, results: &[RuleResult]) -> Result<Self, RuleError> {
        let alternatives = table.alternatives().iter().map(|a| AlternativeRef { id: a.id, name: a.name.clone() }).collect();
        let columns = results
            .iter()
            .map(|r| RankColumn { label: r.rule.name().to_string(), ranks: r.ranks.as_slice().to_vec() })
            .collect();
        Self::new(alternatives, columns)
    }

    pub fn alternatives(&self) -> &[AlternativeRef] {
        &self.alternatives
    }

    pub fn columns(&self) -> &[RankColumn] {
        &self.columns
    }

    pub fn column(&self, label: &str) -> Option<&RankColumn> {
        self.columns.iter().find(|c| c.label == label)
    }

    pub fn m(&self) -> usize {
        self.alternatives.len()
    }

    /// All rank entries of alternative `i`, in column order.
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c.ranks[i]).collect()
    }

    /// Appends the columns of `other`, which must list the same alternatives
    /// in the same order.
    pub fn concat(&self, other: &EvaluationTable) -> Result<Self, RuleError> {
        if self.alternatives != other.alternatives {
            return Err(RuleError::Shape("tables list different alternatives".into()));
        }
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        Self::new(self.alternatives.clone(), columns)
    }
}

/// Rule results plus the E table assembled from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub results: Vec<RuleResult>,
    pub etable: EvaluationTable,
}

/// Runs `rules` in canonical order and assembles the E table.
pub fn run_rules(table: &AcsTable, weights: &WeightVector, params: &RuleParams, rules: &[RuleId]) -> Result<Evaluation, RuleError> {
    let mut ordered = rules.to_vec();
    ordered.sort();
    ordered.dedup();
    let results = ordered
        .iter()
        .map(|&rule| run_rule(rule, table, weights, params))
        .collect::<Result<Vec<_>, _>>()?;
    let etable = EvaluationTable::from_results(table, &results)?;
    Ok(Evaluation { results, etable })
}

pub fn run_all_rules(table: &AcsTable, weights: &WeightVector, params: &RuleParams) -> Result<Evaluation, RuleError> {
    run_rules(table, weights, params, &RuleId::ALL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Alternative, Criterion, Provenance};

    fn table(rows: &[&[f64]], max: f64) -> AcsTable {
        let n = rows[0].len();
        AcsTable::new(
            (0..rows.len() as u32).map(|i| Alternative::new(i, format!("a{i}"))).collect(),
            (0..n).map(|j| Criterion::new(format!("c{j}"), format!("c{j}"), 0.0, max)).collect(),
            rows.iter().map(|r| r.to_vec()).collect(),
            Provenance::ManualEdit,
        )
        .unwrap()
    }

    #[test]
    fn maximin_of_constant_row() {
        let r = maximin(&table(&[&[3.0, 3.0, 3.0]], 5.0)).unwrap();
        assert_eq!(r.raw_values, vec![3.0]);
    }

    #[test]
    fn single_alternative_maximax_rank_is_one() {
        let r = maximax(&table(&[&[1.0, 4.0]], 5.0)).unwrap();
        assert_eq!(r.ranks.as_slice(), &[1.0]);
    }

    #[test]
    fn regret_by_hand() {
        // Column maxima (3, 4): regrets [[2,0],[0,1]] -> max regrets [2, 1].
        let r = minimax_regret(&table(&[&[1.0, 4.0], &[3.0, 3.0]], 5.0)).unwrap();
        assert_eq!(r.raw_values, vec![2.0, 1.0]);
        assert!(!r.higher_is_better);
        assert!(r.ranks.as_slice()[1] > r.ranks.as_slice()[0]);
    }

    #[test]
    fn regret_of_single_row_is_zero() {
        let r = minimax_regret(&table(&[&[1.0, 4.0, 2.0]], 5.0)).unwrap();
        assert_eq!(r.raw_values, vec![0.0]);
        assert_eq!(r.ranks.as_slice(), &[1.0]);
    }

    #[test]
    fn median_even_count_averages_middle_pair() {
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
        let r = median_rule(&table(&[&[2.0, 2.0, 2.0]], 5.0)).unwrap();
        assert_eq!(r.raw_values, vec![2.0]);
    }

    #[test]
    fn lengths_endpoints() {
        let r = lengths_rule(&table(&[&[0.0, 0.0, 0.0], &[5.0, 5.0, 5.0]], 5.0)).unwrap();
        assert_eq!(r.raw_values[0], 0.0);
        assert!((r.raw_values[1] - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn saw_divide_by_max() {
        let t = table(&[&[1.0, 2.0], &[2.0, 4.0]], 5.0);
        let r = saw(&t, &WeightVector::equal(2)).unwrap();
        assert_eq!(r.raw_values, vec![0.5, 1.0]);
    }

    #[test]
    fn saw_zero_column_is_degenerate() {
        let t = table(&[&[0.0, 2.0], &[0.0, 4.0]], 5.0);
        match saw(&t, &WeightVector::equal(2)) {
            Err(RuleError::DegenerateColumn { criterion, .. }) => assert_eq!(criterion, "c0"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn saw_min_max_variant() {
        let t = table(&[&[1.0, 2.0], &[3.0, 2.0]], 5.0);
        let r = saw_with(&t, &WeightVector::equal(2), SawNormalization::MinMax).unwrap();
        assert_eq!(r.raw_values, vec![0.5, 1.0]);
    }

    #[test]
    fn hurwicz_rejects_alpha_outside_unit_interval() {
        let t = table(&[&[1.0]], 5.0);
        assert_eq!(hurwicz(&t, 1.5).unwrap_err(), RuleError::AlphaOutOfRange(1.5));
        assert!(hurwicz(&t, -0.1).is_err());
    }

    #[test]
    fn promethee_two_alternatives() {
        let t = table(&[&[1.0, 1.0], &[2.0, 2.0]], 5.0);
        let r = promethee2(&t, &WeightVector::equal(2)).unwrap();
        assert_eq!(r.raw_values, vec![-1.0, 1.0]);
        let t = table(&[&[1.0, 2.0], &[2.0, 1.0]], 5.0);
        let r = promethee2(&t, &WeightVector::equal(2)).unwrap();
        assert_eq!(r.raw_values, vec![0.0, 0.0]);
    }

    #[test]
    fn promethee_needs_two_alternatives() {
        let t = table(&[&[1.0, 1.0]], 5.0);
        assert_eq!(promethee2(&t, &WeightVector::equal(2)).unwrap_err(), RuleError::TooFewAlternatives(1));
    }

    #[test]
    fn promethee_linear_preference() {
        let f: PreferenceFunction = "linear:0.5:2".parse().unwrap();
        assert_eq!(f.eval(0.4), 0.0);
        assert_eq!(f.eval(1.25), 0.5);
        assert_eq!(f.eval(3.0), 1.0);
        assert!("linear:2:1".parse::<PreferenceFunction>().is_err());
    }

    #[test]
    fn topsis_two_points() {
        let t = table(&[&[1.0], &[2.0]], 5.0);
        let r = topsis(&t, &WeightVector::equal(1)).unwrap();
        assert_eq!(r.raw_values, vec![0.0, 1.0]);
    }

    #[test]
    fn topsis_zero_column_is_degenerate() {
        let t = table(&[&[0.0, 1.0], &[0.0, 2.0]], 5.0);
        assert!(matches!(topsis(&t, &WeightVector::equal(2)), Err(RuleError::DegenerateColumn { .. })));
    }

    #[test]
    fn topsis_identical_rows_tie() {
        let t = table(&[&[1.0, 3.0], &[1.0, 3.0], &[2.0, 1.0]], 5.0);
        let r = topsis(&t, &WeightVector::equal(2)).unwrap();
        assert_eq!(r.raw_values[0], r.raw_values[1]);
    }

    #[test]
    fn cost_criteria_flip_preference() {
        let crit = vec![Criterion::new("cost", "cost", 1.0, 10.0).with_direction(Direction::Cost)];
        let t = AcsTable::new(
            vec![Alternative::new(0, "cheap"), Alternative::new(1, "dear")],
            crit,
            vec![vec![2.0], vec![8.0]],
            Provenance::ManualEdit,
        )
        .unwrap();
        let w = WeightVector::equal(1);
        for result in run_all_rules(&t, &w, &RuleParams::default()).unwrap().results {
            assert_eq!(result.ranks.as_slice(), &[2.0, 1.0], "{}", result.rule);
        }
    }

    #[test]
    fn weight_length_mismatch() {
        let t = table(&[&[1.0, 2.0]], 5.0);
        assert_eq!(
            saw(&t, &WeightVector::equal(3)).unwrap_err(),
            RuleError::WeightLength { expected: 2, found: 3 }
        );
    }

    #[test]
    fn run_all_rules_annotates_errors() {
        let t = table(&[&[0.0, 1.0], &[0.0, 2.0]], 5.0);
        match run_all_rules(&t, &WeightVector::equal(2), &RuleParams::default()) {
            Err(RuleError::InRule { rule, .. }) => assert_eq!(rule, RuleId::Saw),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_alternative_ranks_one_everywhere() {
        let t = table(&[&[1.0, 2.0, 3.0]], 5.0);
        let e = run_all_rules(&t, &WeightVector::equal(3), &RuleParams::default()).unwrap();
        assert_eq!(e.results.len(), 9);
        for r in &e.results {
            assert_eq!(r.ranks.as_slice(), &[1.0], "{}", r.rule);
        }
    }

    #[test]
    fn rule_names_parse() {
        assert_eq!("D9".parse::<RuleId>().unwrap(), RuleId::Topsis);
        assert_eq!("minimax-regret".parse::<RuleId>().unwrap(), RuleId::MinimaxRegret);
        assert_eq!(RuleId::parse_list("topsis,maximin").unwrap(), vec![RuleId::Maximin, RuleId::Topsis]);
        assert_eq!(RuleId::parse_list("all").unwrap().len(), 9);
        assert!("electre".parse::<RuleId>().is_err());
    }
}
