//! Exhaustive search over transition patterns.
//!
//! Two engines: the permutation experiment, which scores every distinct
//! reordering of a piece's transitions, and the energy sweep, which scores
//! every grid pattern with a fixed `Σ|delta|`. Candidates are evaluated
//! independently (optionally on a rayon pool) and then ordered by a total,
//! deterministic key, so reports do not depend on the thread count.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::distribution::{cmp_lex, distribution_check, grid_units, DEFAULT_SIGNATURE};
use crate::error::{Error, Result};
use crate::measure::{level_score, m_value, AestheticScore, MeasureConfig};
use crate::piece::{decompose, shift_to_min_one, Piece, TransitionPattern};

/// `Σ |delta|` of a transition pattern.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EnergyLevel(pub f64);

pub fn energy_level(t: &TransitionPattern) -> EnergyLevel {
    EnergyLevel(t.deltas().iter().map(|d| d.abs()).sum())
}

/// How candidate evaluation is scheduled. Results are identical for every
/// setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    /// Global rayon pool.
    #[default]
    Auto,
    /// Dedicated pool with this many threads.
    Threads(usize),
}

fn eval_all<T, U, F>(items: &[T], f: F, parallelism: Parallelism) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        match parallelism {
            Parallelism::Sequential => items.iter().map(f).collect(),
            Parallelism::Auto => items.par_iter().map(f).collect(),
            Parallelism::Threads(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
                Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
                Err(_) => items.iter().map(f).collect(),
            },
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = parallelism;
        items.iter().map(f).collect()
    }
}

/// Distinct permutations of the deltas, in lexicographic order.
pub fn arrangements(t: &TransitionPattern) -> Vec<TransitionPattern> {
    let mut current = t.deltas().to_vec();
    current.sort_by(f64::total_cmp);
    let mut out = vec![TransitionPattern(current.clone())];
    while next_permutation(&mut current) {
        out.push(TransitionPattern(current.clone()));
    }
    out
}

fn next_permutation(v: &mut [f64]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1].total_cmp(&v[i]) == Ordering::Less) else {
        return false;
    };
    let pivot = i - 1;
    let j = (i..v.len()).rev().find(|&j| v[pivot].total_cmp(&v[j]) == Ordering::Less).unwrap();
    v.swap(pivot, j);
    v[i..].reverse();
    true
}

/// Cumulative frequencies starting from `start`. Fails at the first
/// non-positive value.
pub fn realize(pattern: &TransitionPattern, start: f64) -> Result<Vec<f64>> {
    if !(start > 0.0) {
        return Err(Error::RealizationOutOfRange { index: 0, value: start });
    }
    let mut out = Vec::with_capacity(pattern.len() + 1);
    out.push(start);
    let mut f = start;
    for (i, d) in pattern.deltas().iter().enumerate() {
        f += d;
        if !(f > 0.0) {
            return Err(Error::RealizationOutOfRange { index: i + 1, value: f });
        }
        out.push(f);
    }
    Ok(out)
}

/// Why a candidate did not pass.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rejection {
    NonPositiveFrequency { index: usize, value: f64 },
    Signature { found: Vec<usize> },
    Unscorable { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateReport {
    pub pattern: TransitionPattern,
    pub piece: Option<Piece>,
    pub score: Option<AestheticScore>,
    pub passed_filter: bool,
    pub rejection: Option<Rejection>,
    /// 1-based rank among passing candidates.
    pub rank: Option<usize>,
    /// 1-based rank among passing arrangements of the same delta multiset.
    pub class_rank: Option<usize>,
}

impl CandidateReport {
    pub fn m(&self) -> Option<f64> {
        self.score.as_ref().map(|s| s.m)
    }
}

fn evaluate(pattern: &TransitionPattern, start: f64, signature: &[usize], measure: MeasureConfig) -> CandidateReport {
    let mut report = CandidateReport {
        pattern: pattern.clone(),
        piece: None,
        score: None,
        passed_filter: false,
        rejection: None,
        rank: None,
        class_rank: None,
    };
    let frequencies = match realize(pattern, start) {
        Ok(f) => f,
        Err(Error::RealizationOutOfRange { index, value }) => {
            report.rejection = Some(Rejection::NonPositiveFrequency { index, value });
            return report;
        }
        Err(e) => {
            report.rejection = Some(Rejection::Unscorable { message: e.to_string() });
            return report;
        }
    };
    let label = pattern.to_string();
    let scored = Piece::new(label, frequencies).and_then(|piece| {
        let score = m_value(&piece, measure)?;
        let check = distribution_check(&decompose(&piece, measure.grouping), signature)?;
        Ok((piece, score, check))
    });
    match scored {
        Ok((piece, score, check)) => {
            report.piece = Some(piece);
            report.score = Some(score);
            report.passed_filter = check.passed;
            if !check.passed {
                report.rejection = Some(Rejection::Signature { found: check.partition.signature });
            }
        }
        Err(e) => report.rejection = Some(Rejection::Unscorable { message: e.to_string() }),
    }
    report
}

/// Assigns `rank` (by `key`, descending, ties lexicographic by pattern) and
/// `class_rank`, then orders passing candidates by rank followed by failing
/// ones in pattern order.
fn rank_candidates(candidates: &mut [CandidateReport], key: impl Fn(&CandidateReport) -> f64) {
    let by_key = |a: &CandidateReport, b: &CandidateReport| {
        key(b).total_cmp(&key(a)).then_with(|| cmp_lex(a.pattern.deltas(), b.pattern.deltas()))
    };
    candidates.sort_by(|a, b| match (a.passed_filter, b.passed_filter) {
        (true, true) => by_key(a, b),
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => cmp_lex(a.pattern.deltas(), b.pattern.deltas()),
    });

    let mut class_counts: Vec<(Vec<f64>, usize)> = Vec::new();
    for (i, c) in candidates.iter_mut().filter(|c| c.passed_filter).enumerate() {
        c.rank = Some(i + 1);
        let mut class = c.pattern.deltas().to_vec();
        class.sort_by(f64::total_cmp);
        let slot = match class_counts.iter().position(|(k, _)| *k == class) {
            Some(p) => p,
            None => {
                class_counts.push((class, 0));
                class_counts.len() - 1
            }
        };
        class_counts[slot].1 += 1;
        c.class_rank = Some(class_counts[slot].1);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationConfig {
    pub signature: Vec<usize>,
    pub measure: MeasureConfig,
}

impl Default for PermutationConfig {
    fn default() -> Self {
        Self { signature: DEFAULT_SIGNATURE.to_vec(), measure: MeasureConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationReport {
    pub label: String,
    pub original: TransitionPattern,
    pub original_l1_ratio: f64,
    pub original_passes: bool,
    /// Highest L1 ratio among passing arrangements.
    pub max_passing_l1_ratio: Option<f64>,
    /// No passing arrangement has a higher L1 ratio than the original.
    pub original_is_argmax: bool,
    /// max - min of the L2 ratio over all scored arrangements.
    pub l2_ratio_spread: f64,
    /// Ranked by L1 ratio among passing arrangements.
    pub candidates: Vec<CandidateReport>,
}

/// Scores every distinct arrangement of the piece's transitions, realized
/// from the piece's first note, and checks whether the original ordering
/// has the highest L1 ratio among arrangements passing the cluster filter.
pub fn permutation_experiment(piece: &Piece, config: &PermutationConfig) -> Result<PermutationReport> {
    let original = piece.transitions();
    let original_l1_ratio = level_score(&shift_to_min_one(piece.frequencies())?, config.measure.entropy).ratio;
    let patterns = arrangements(&original);
    let mut candidates: Vec<CandidateReport> = patterns
        .iter()
        .map(|p| {
            let mut c = evaluate(p, piece.first(), &config.signature, config.measure);
            if let Some(ref mut p) = c.piece {
                *p = p.clone().relabel(format!("{} {}", piece.label(), c.pattern));
            }
            c
        })
        .collect();
    let l1 = |c: &CandidateReport| c.score.as_ref().map_or(f64::NEG_INFINITY, |s| s.l1.ratio);
    rank_candidates(&mut candidates, l1);

    let max_passing_l1_ratio = candidates.iter().filter(|c| c.passed_filter).map(l1).reduce(f64::max);
    let original_passes = candidates.iter().any(|c| c.passed_filter && c.pattern == original);
    let original_is_argmax =
        max_passing_l1_ratio.is_none_or(|max| original_l1_ratio >= max - 1e-12 * max.abs().max(1.0));

    let l2: Vec<f64> = candidates.iter().filter_map(|c| c.score.as_ref().map(|s| s.l2.ratio)).collect();
    let l2_ratio_spread = l2.iter().copied().reduce(f64::max).unwrap_or(0.0) - l2.iter().copied().reduce(f64::min).unwrap_or(0.0);

    Ok(PermutationReport {
        label: piece.label().to_owned(),
        original,
        original_l1_ratio,
        original_passes,
        max_passing_l1_ratio,
        original_is_argmax,
        l2_ratio_spread,
        candidates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    /// Number of transitions.
    pub length: usize,
    pub step: f64,
    pub max_magnitude: f64,
    pub start_frequency: f64,
    pub target_level: EnergyLevel,
    pub signature: Vec<usize>,
    pub measure: MeasureConfig,
}

impl SearchConfig {
    pub fn at_level(level: f64) -> Self {
        Self { target_level: EnergyLevel(level), ..Self::default() }
    }
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            length: 3,
            step: 5.0,
            max_magnitude: 40.0,
            start_frequency: 120.0,
            target_level: EnergyLevel(25.0),
            signature: DEFAULT_SIGNATURE.to_vec(),
            measure: MeasureConfig::default(),
        }
    }
}

/// Compositions of `total` into `parts` integers in `1..=max`.
fn compositions(total: i64, parts: usize, max: i64) -> Vec<Vec<i64>> {
    fn rec(remaining: i64, parts: usize, max: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if parts == 0 {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let rest = parts as i64 - 1;
        for v in 1..=max.min(remaining - rest) {
            if remaining - v > max * rest {
                continue;
            }
            cur.push(v);
            rec(remaining - v, parts - 1, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, max, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// Every pattern of nonzero grid deltas with the configured length,
/// magnitude bound and `Σ|delta|`, in lexicographic order.
pub fn enumerate_patterns(config: &SearchConfig) -> Result<Vec<TransitionPattern>> {
    if config.length == 0 {
        return Err(Error::InvalidConfig("pattern length must be at least 1".into()));
    }
    let max = grid_units(config.max_magnitude, config.step, "max magnitude")?;
    let total = grid_units(config.target_level.0, config.step, "target level")?;
    if max <= 0 || total < 0 {
        return Err(Error::InvalidConfig("max magnitude must be positive and the target level non-negative".into()));
    }

    let mut signed: Vec<Vec<i64>> = Vec::new();
    for magnitudes in compositions(total, config.length, max) {
        for mask in 0u64..(1 << config.length) {
            signed.push(
                magnitudes
                    .iter()
                    .enumerate()
                    .map(|(i, &m)| if mask >> i & 1 == 1 { -m } else { m })
                    .collect(),
            );
        }
    }
    signed.sort();
    Ok(signed
        .into_iter()
        .map(|units| TransitionPattern(units.into_iter().map(|u| u as f64 * config.step).collect()))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub config: SearchConfig,
    pub enumerated: usize,
    pub passing: usize,
    /// Passing candidates by rank, then the rest in pattern order.
    pub candidates: Vec<CandidateReport>,
}

impl SweepReport {
    pub fn find(&self, deltas: &[f64]) -> Option<&CandidateReport> {
        self.candidates.iter().find(|c| c.pattern.deltas() == deltas)
    }

    /// Passing candidates ranked strictly above the given pattern.
    pub fn outranking(&self, deltas: &[f64]) -> Vec<&CandidateReport> {
        match self.find(deltas).and_then(|c| c.rank) {
            Some(rank) => self.candidates.iter().filter(|c| c.rank.is_some_and(|r| r < rank)).collect(),
            None => self.candidates.iter().filter(|c| c.passed_filter).collect(),
        }
    }
}

/// Scores every pattern at the configured energy level and ranks the ones
/// passing the cluster filter by `M`.
pub fn energy_sweep(config: &SearchConfig, parallelism: Parallelism) -> Result<SweepReport> {
    if config.length < 2 {
        return Err(Error::InvalidConfig("sweeps need at least 2 transitions to score".into()));
    }
    let patterns = enumerate_patterns(config)?;
    let mut candidates = eval_all(
        &patterns,
        |p| evaluate(p, config.start_frequency, &config.signature, config.measure),
        parallelism,
    );
    rank_candidates(&mut candidates, |c| c.m().unwrap_or(f64::NEG_INFINITY));
    Ok(SweepReport {
        config: config.clone(),
        enumerated: patterns.len(),
        passing: candidates.iter().filter(|c| c.passed_filter).count(),
        candidates,
    })
}
