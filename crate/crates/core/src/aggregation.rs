//! Robust aggregation of an E table into overall scores (the A table) and
//! agreement statistics between two rankings.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{rank_with_ties, AlternativeId};
use crate::rules::{median, EvaluationTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AggregationError {
    #[error("ranking {which} lists alternative {id} more than once")]
    DuplicateId { which: char, id: AlternativeId },
    #[error("the two rankings share no alternatives")]
    EmptyIntersection,
}

/// Row sums of the rank columns.
pub fn borda(etable: &EvaluationTable) -> Vec<f64> {
    (0..etable.m()).map(|i| etable.row(i).iter().sum()).collect()
}

/// Per-row median of the rank entries.
pub fn median_of_ranks(etable: &EvaluationTable) -> Vec<f64> {
    (0..etable.m()).map(|i| median(&etable.row(i))).collect()
}

/// Re-ranks every column with average ties, takes the per-row median of the
/// re-ranked values, and ranks those medians back onto `1..=m`.
pub fn averaged_rank_median(etable: &EvaluationTable) -> Vec<f64> {
    let reranked: Vec<Vec<f64>> = etable
        .columns()
        .iter()
        .map(|c| rank_with_ties(&c.ranks, true).expect("E table columns are finite and non-empty").into_vec())
        .collect();
    let medians: Vec<f64> = (0..etable.m())
        .map(|i| median(&reranked.iter().map(|c| c[i]).collect::<Vec<_>>()))
        .collect();
    rank_with_ties(&medians, true).expect("medians of finite ranks are finite").into_vec()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregateMeasure {
    #[default]
    Borda,
    SimpleMedian,
    AveragedRankMedian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub id: AlternativeId,
    pub name: String,
    pub borda: f64,
    pub simple_median: f64,
    pub averaged_rank_median: f64,
}

impl AggregateRow {
    pub fn measure(&self, measure: AggregateMeasure) -> f64 {
        match measure {
            AggregateMeasure::Borda => self.borda,
            AggregateMeasure::SimpleMedian => self.simple_median,
            AggregateMeasure::AveragedRankMedian => self.averaged_rank_median,
        }
    }
}

/// The A table: rows sorted descending by `primary`, ties by ascending id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregationResult {
    pub primary: AggregateMeasure,
    pub rows: Vec<AggregateRow>,
}

impl AggregationResult {
    pub fn order(&self) -> Vec<AlternativeId> {
        self.rows.iter().map(|r| r.id).collect()
    }

    pub fn row(&self, id: AlternativeId) -> Option<&AggregateRow> {
        self.rows.iter().find(|r| r.id == id)
    }
}

pub fn aggregate(etable: &EvaluationTable) -> AggregationResult {
    aggregate_by(etable, AggregateMeasure::Borda)
}

pub fn aggregate_by(etable: &EvaluationTable, primary: AggregateMeasure) -> AggregationResult {
    let (b, med, arm) = (borda(etable), median_of_ranks(etable), averaged_rank_median(etable));
    let mut rows: Vec<AggregateRow> = etable
        .alternatives()
        .iter()
        .enumerate()
        .map(|(i, a)| AggregateRow {
            id: a.id,
            name: a.name.clone(),
            borda: b[i],
            simple_median: med[i],
            averaged_rank_median: arm[i],
        })
        .collect();
    sort_rows(&mut rows, primary);
    AggregationResult { primary, rows }
}

pub(crate) fn sort_rows(rows: &mut [AggregateRow], primary: AggregateMeasure) {
    rows.sort_by(|x, y| y.measure(primary).total_cmp(&x.measure(primary)).then(x.id.cmp(&y.id)));
}

/// Agreement at one cut-off of the two restricted orderings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopKOverlap {
    pub k: usize,
    pub shared: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankDelta {
    pub id: AlternativeId,
    /// 1-based position in the first restricted ordering.
    pub position_a: usize,
    pub position_b: usize,
    /// `position_b - position_a`: positive when the second ranking places
    /// the alternative lower.
    pub delta: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankComparison {
    /// Shared alternatives in the first ranking's order.
    pub common_ids: Vec<AlternativeId>,
    pub restricted_a: Vec<AlternativeId>,
    pub restricted_b: Vec<AlternativeId>,
    pub kendall_tau: f64,
    pub spearman_rho: f64,
    pub top_k_overlap: Vec<TopKOverlap>,
    pub rank_deltas: Vec<RankDelta>,
}

fn check_unique(list: &[AlternativeId], which: char) -> Result<(), AggregationError> {
    let mut seen = HashSet::new();
    for &id in list {
        if !seen.insert(id) {
            return Err(AggregationError::DuplicateId { which, id });
        }
    }
    Ok(())
}

/// Compares two orderings (most preferred first) over their common ids.
pub fn compare_rankings(a: &[AlternativeId], b: &[AlternativeId]) -> Result<RankComparison, AggregationError> {
    check_unique(a, 'a')?;
    check_unique(b, 'b')?;
    let in_b: HashSet<_> = b.iter().copied().collect();
    let restricted_a: Vec<_> = a.iter().copied().filter(|id| in_b.contains(id)).collect();
    if restricted_a.is_empty() {
        return Err(AggregationError::EmptyIntersection);
    }
    let in_a: HashSet<_> = restricted_a.iter().copied().collect();
    let restricted_b: Vec<_> = b.iter().copied().filter(|id| in_a.contains(id)).collect();

    let pos_b: HashMap<_, _> = restricted_b.iter().enumerate().map(|(k, &id)| (id, k)).collect();
    // Scores oriented so the first listed is largest, as ranks are.
    let n = restricted_a.len();
    let score_a: Vec<f64> = (0..n).map(|k| (n - k) as f64).collect();
    let score_b: Vec<f64> = restricted_a.iter().map(|id| (n - pos_b[id]) as f64).collect();

    let top_k_overlap = (1..=n)
        .map(|k| {
            let top: HashSet<_> = restricted_a[..k].iter().collect();
            let shared = restricted_b[..k].iter().filter(|id| top.contains(id)).count();
            TopKOverlap { k, shared, fraction: shared as f64 / k as f64 }
        })
        .collect();
    let rank_deltas = restricted_a
        .iter()
        .enumerate()
        .map(|(k, &id)| RankDelta {
            id,
            position_a: k + 1,
            position_b: pos_b[&id] + 1,
            delta: pos_b[&id] as i64 - k as i64,
        })
        .collect();

    Ok(RankComparison {
        common_ids: restricted_a.clone(),
        kendall_tau: kendall_tau_b(&score_a, &score_b),
        spearman_rho: spearman_rho(&score_a, &score_b),
        restricted_a,
        restricted_b,
        top_k_overlap,
        rank_deltas,
    })
}

/// Kendall's tau-b between two paired score vectors. Returns 1 when there
/// are no comparable pairs on either side.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "paired vectors must have equal length");
    let (mut concordant, mut discordant, mut ties_x, mut ties_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            let dx = (x[i] - x[j]).signum() as i64 * ((x[i] != x[j]) as i64);
            let dy = (y[i] - y[j]).signum() as i64 * ((y[i] != y[j]) as i64);
            match (dx, dy) {
                (0, 0) => {}
                (0, _) => ties_x += 1,
                (_, 0) => ties_y += 1,
                _ if dx == dy => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let n1 = (concordant + discordant + ties_y) as f64;
    let n2 = (concordant + discordant + ties_x) as f64;
    if n1 == 0.0 || n2 == 0.0 {
        return 1.0;
    }
    (concordant - discordant) as f64 / (n1 * n2).sqrt()
}

/// Spearman's rho: Pearson correlation of the average-tie ranks. Returns 1
/// when either side is constant.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "paired vectors must have equal length");
    if x.is_empty() {
        return 1.0;
    }
    let rx = rank_with_ties(x, true).expect("finite scores").into_vec();
    let ry = rank_with_ties(y, true).expect("finite scores").into_vec();
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return 1.0;
    }
    cov / (vx * vy).sqrt()
}
