//! The combined level distribution, its cluster signature, and the spacing
//! lab comparing entropy-energy ratios of fixed-sum spacing multisets
//! against the Wigner surmise.

use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{level_score, EntropyMode};
use crate::piece::Decomposition;

/// Cluster signature of the reference four-note pieces.
pub const DEFAULT_SIGNATURE: [usize; 3] = [2, 3, 1];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CombinedDistribution {
    pub values: Vec<f64>,
}

pub fn combined_distribution(dec: &Decomposition) -> CombinedDistribution {
    let mut values = Vec::with_capacity(dec.t.len() + dec.w.len() + 1);
    values.extend_from_slice(&dec.t);
    values.extend_from_slice(&dec.w);
    values.push(dec.d);
    CombinedDistribution { values }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterPartition {
    pub clusters: Vec<Vec<f64>>,
    pub signature: Vec<usize>,
    pub wcss: f64,
}

/// Two costs closer than this (relative) count as a tie.
const TIE_EPS: f64 = 1e-9;

fn tied(a: f64, b: f64) -> bool {
    a.is_finite() && b.is_finite() && (a - b).abs() <= TIE_EPS * (1.0 + a.abs().max(b.abs()))
}

/// `cost[i][j]` = sum of squared deviations of `sorted[i..j]`.
fn segment_costs(sorted: &[f64]) -> Vec<Vec<f64>> {
    let n = sorted.len();
    let mut cost = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..n {
        // Welford
        let (mut mean, mut m2) = (0.0, 0.0);
        for j in i..n {
            let count = (j - i + 1) as f64;
            let delta = sorted[j] - mean;
            mean += delta / count;
            m2 += delta * (sorted[j] - mean);
            cost[i][j + 1] = m2.max(0.0);
        }
    }
    cost
}

/// Exact minimum-WCSS partition of the sorted values into `k` contiguous
/// clusters. Among optimal partitions the one with the leftmost split
/// points wins.
pub fn cluster_1d(values: &[f64], k: usize) -> Result<ClusterPartition> {
    let n = values.len();
    if k == 0 || k > n {
        return Err(Error::TooFewValues { n, k });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let cost = segment_costs(&sorted);

    // best[m][i] = optimal cost of splitting sorted[i..] into m clusters.
    let mut best = vec![vec![f64::INFINITY; n + 1]; k + 1];
    best[0][n] = 0.0;
    for m in 1..=k {
        for i in (0..n).rev() {
            // each remaining cluster needs at least one value
            if n - i < m {
                continue;
            }
            best[m][i] = (i + 1..=n - (m - 1))
                .map(|j| cost[i][j] + best[m - 1][j])
                .fold(f64::INFINITY, f64::min);
        }
    }

    let mut clusters = Vec::with_capacity(k);
    let mut start = 0;
    for m in (1..=k).rev() {
        let target = best[m][start];
        let end = (start + 1..=n - (m - 1))
            .find(|&j| tied(cost[start][j] + best[m - 1][j], target))
            .expect("optimum is attained by some split");
        clusters.push(sorted[start..end].to_vec());
        start = end;
    }
    let wcss = best[k][0];
    let signature = clusters.iter().map(Vec::len).collect();
    Ok(ClusterPartition { clusters, signature, wcss })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionCheck {
    pub passed: bool,
    pub expected: Vec<usize>,
    pub partition: ClusterPartition,
}

/// Clusters `t ∪ w ∪ {d}` into `expected_signature.len()` groups and
/// compares the left-to-right sizes with the expected signature.
pub fn distribution_check(dec: &Decomposition, expected_signature: &[usize]) -> Result<DistributionCheck> {
    let combined = combined_distribution(dec);
    let partition = cluster_1d(&combined.values, expected_signature.len())?;
    Ok(DistributionCheck {
        passed: partition.signature == expected_signature,
        expected: expected_signature.to_vec(),
        partition,
    })
}

/// Dyson ensemble index for the Wigner surmise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Beta(u8);

impl Beta {
    pub const ORTHOGONAL: Beta = Beta(1);
    pub const UNITARY: Beta = Beta(2);
    pub const SYMPLECTIC: Beta = Beta(4);

    pub fn get(self) -> u8 {
        self.0
    }
}

impl Default for Beta {
    fn default() -> Self {
        Beta::UNITARY
    }
}

impl TryFrom<u8> for Beta {
    type Error = Error;

    fn try_from(b: u8) -> Result<Self> {
        match b {
            1 | 2 | 4 => Ok(Beta(b)),
            other => Err(Error::UnsupportedBeta(other)),
        }
    }
}

impl From<Beta> for u8 {
    fn from(b: Beta) -> u8 {
        b.0
    }
}

/// Wigner surmise for unit mean spacing.
pub fn wigner_surmise_pdf(s: f64, beta: Beta) -> Result<f64> {
    if s < 0.0 || s.is_nan() {
        return Err(Error::NegativeSpacing(s));
    }
    let s2 = s * s;
    Ok(match beta.0 {
        1 => PI / 2.0 * s * (-PI * s2 / 4.0).exp(),
        2 => 32.0 / (PI * PI) * s2 * (-4.0 * s2 / PI).exp(),
        4 => 262_144.0 / (729.0 * PI.powi(3)) * s2 * s2 * (-64.0 * s2 / (9.0 * PI)).exp(),
        _ => unreachable!("Beta is validated on construction"),
    })
}

/// Entropy-energy ratio `R` of a spacing multiset.
pub fn r_ratio(spacings: &[f64]) -> f64 {
    level_score(spacings, EntropyMode::CoifmanWickerhauser).ratio
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedMultiset {
    pub values: Vec<f64>,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub value: f64,
    pub count: usize,
    /// Expected count under the surmise for `count` spacings with the same
    /// mean, discretised on the grid.
    pub surmise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpacingLabReport {
    pub count: usize,
    pub target_sum: f64,
    pub step: f64,
    pub max_value: f64,
    pub beta: Beta,
    pub ranked: Vec<RankedMultiset>,
    /// Histogram of the best multiset over the whole grid.
    pub histogram: Vec<HistogramBin>,
}

impl SpacingLabReport {
    pub fn argmax(&self) -> Option<&RankedMultiset> {
        self.ranked.first()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpacingLabConfig {
    pub count: usize,
    pub target_sum: f64,
    pub step: f64,
    /// Largest spacing allowed on the grid.
    pub max_value: f64,
    pub beta: Beta,
}

impl SpacingLabConfig {
    /// Grid `5, 10, ..., 40` with the given count and sum.
    pub fn new(count: usize, target_sum: f64) -> Self {
        Self { count, target_sum, step: 5.0, max_value: 40.0, beta: Beta::default() }
    }
}

/// Returns `x / step` when it is a whole number of steps.
pub(crate) fn grid_units(x: f64, step: f64, what: &str) -> Result<i64> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidConfig(format!("step must be positive (got {step})")));
    }
    let units = (x / step).round();
    if (units * step - x).abs() > 1e-9 * step.max(x.abs()) {
        return Err(Error::InvalidConfig(format!("{what} {x} is not a multiple of step {step}")));
    }
    Ok(units as i64)
}

/// Non-decreasing sequences of `parts` integers in `1..=max` summing to `total`.
fn bounded_partitions(total: i64, parts: usize, max: i64) -> Vec<Vec<i64>> {
    fn rec(remaining: i64, parts: usize, lo: i64, max: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if parts == 0 {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let parts_i = parts as i64;
        // smallest value must leave room for the rest, each >= v
        let hi = max.min(remaining / parts_i);
        for v in lo..=hi {
            if remaining - v > max * (parts_i - 1) {
                continue;
            }
            cur.push(v);
            rec(remaining - v, parts - 1, v, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 && total > 0 {
        rec(total, parts, 1, max, &mut Vec::with_capacity(parts), &mut out);
    }
    out
}

pub(crate) fn cmp_lex(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// Enumerates every multiset of `count` grid spacings summing to
/// `target_sum` and ranks them by `R`, highest first. Infeasible settings
/// give an empty ranking.
pub fn spacing_lab(config: &SpacingLabConfig) -> Result<SpacingLabReport> {
    if config.count == 0 {
        return Err(Error::InvalidConfig("spacing count must be at least 1".into()));
    }
    let total = grid_units(config.target_sum, config.step, "target sum")?;
    let max = grid_units(config.max_value, config.step, "maximum spacing")?;
    if total <= 0 || max <= 0 {
        return Err(Error::InvalidConfig("target sum and maximum spacing must be positive".into()));
    }

    let mut ranked: Vec<RankedMultiset> = bounded_partitions(total, config.count, max)
        .into_iter()
        .map(|units| {
            let values: Vec<f64> = units.iter().map(|&u| u as f64 * config.step).collect();
            RankedMultiset { r: r_ratio(&values), values }
        })
        .collect();
    ranked.sort_by(|a, b| b.r.total_cmp(&a.r).then_with(|| cmp_lex(&a.values, &b.values)));

    let histogram = match ranked.first() {
        Some(best) => histogram_with_surmise(&best.values, config)?,
        None => Vec::new(),
    };

    Ok(SpacingLabReport {
        count: config.count,
        target_sum: config.target_sum,
        step: config.step,
        max_value: config.max_value,
        beta: config.beta,
        ranked,
        histogram,
    })
}

fn histogram_with_surmise(values: &[f64], config: &SpacingLabConfig) -> Result<Vec<HistogramBin>> {
    let max = grid_units(config.max_value, config.step, "maximum spacing")?;
    let mean = config.target_sum / config.count as f64;
    let grid: Vec<f64> = (1..=max).map(|u| u as f64 * config.step).collect();
    let weights = grid
        .iter()
        .map(|&v| wigner_surmise_pdf(v / mean, config.beta))
        .collect::<Result<Vec<_>>>()?;
    let norm: f64 = weights.iter().sum();
    Ok(grid
        .iter()
        .zip(&weights)
        .map(|(&value, &w)| HistogramBin {
            value,
            count: values.iter().filter(|&&v| v == value).count(),
            surmise: if norm > 0.0 { config.count as f64 * w / norm } else { 0.0 },
        })
        .collect())
}

/// Whether a multiset leans toward small values: not all equal, and at
/// least as many entries below the mean as above it.
pub fn is_low_skewed(values: &[f64]) -> bool {
    if values.is_empty() {
        return false;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let below = values.iter().filter(|&&v| v < mean).count();
    let above = values.iter().filter(|&&v| v > mean).count();
    above > 0 && below >= above
}
