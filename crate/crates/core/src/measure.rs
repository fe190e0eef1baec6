//! Entropy, energy and the multilevel aesthetic measure `M`.
//!
//! For a level `v` the entropy is the unnormalised Coifman-Wickerhauser form
//! `Σ v² ln v²` and the energy is `Σ v²`. `M` sums `entropy / energy` over
//! the three scored levels (`l1`, `t`, `w`) and multiplies by
//! [`SCALE_FACTOR`]. With the natural logarithm and a scale of 1/10 the
//! measure reproduces the published values for the five reference pieces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::piece::{decompose, Decomposition, Grouping, Piece};

/// Global scale applied to the sum of per-level ratios.
pub const SCALE_FACTOR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyMode {
    /// `Σ v² ln v²`, calibrated.
    #[default]
    CoifmanWickerhauser,
    /// `-Σ p ln p` with `p = v² / Σ v²`. Not calibrated against any reference.
    ShannonNormalized,
}

/// Scoring options shared by everything that computes `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MeasureConfig {
    pub entropy: EntropyMode,
    pub grouping: Grouping,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelScore {
    pub entropy: f64,
    pub energy: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AestheticScore {
    pub l1: LevelScore,
    pub l2: LevelScore,
    pub l3: LevelScore,
    pub m: f64,
}

impl AestheticScore {
    pub fn levels(&self) -> [(&'static str, &LevelScore); 3] {
        [("L1", &self.l1), ("L2", &self.l2), ("L3", &self.l3)]
    }
}

// 0·ln 0 is taken as its limit, 0.
fn x_ln_x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

pub fn entropy(values: &[f64], mode: EntropyMode) -> f64 {
    match mode {
        EntropyMode::CoifmanWickerhauser => values.iter().map(|v| x_ln_x(v * v)).sum(),
        EntropyMode::ShannonNormalized => {
            let total = energy(values);
            if total == 0.0 {
                return 0.0;
            }
            -values.iter().map(|v| x_ln_x(v * v / total)).sum::<f64>()
        }
    }
}

pub fn energy(values: &[f64]) -> f64 {
    values.iter().map(|v| v * v).sum()
}

/// Entropy, energy and their ratio for one level. An all-zero level has
/// ratio 0.
pub fn level_score(values: &[f64], mode: EntropyMode) -> LevelScore {
    let entropy = entropy(values, mode);
    let energy = energy(values);
    let ratio = if energy == 0.0 { 0.0 } else { entropy / energy };
    LevelScore { entropy, energy, ratio }
}

pub fn score_decomposition(label: &str, dec: &Decomposition, mode: EntropyMode) -> Result<AestheticScore> {
    for (level, values) in [("L1", &dec.l1), ("L2", &dec.t), ("L3", &dec.w)] {
        if values.is_empty() {
            return Err(Error::EmptyScoringLevel { label: label.to_owned(), level });
        }
    }
    let l1 = level_score(&dec.l1, mode);
    let l2 = level_score(&dec.t, mode);
    let l3 = level_score(&dec.w, mode);
    let m = SCALE_FACTOR * (l1.ratio + l2.ratio + l3.ratio);
    Ok(AestheticScore { l1, l2, l3, m })
}

/// Scores a piece. Pieces with fewer than 3 notes have no `w` level and are
/// rejected.
pub fn m_value(piece: &Piece, config: MeasureConfig) -> Result<AestheticScore> {
    if piece.len() < 3 {
        return Err(Error::EmptyScoringLevel { label: piece.label().to_owned(), level: "L3" });
    }
    score_decomposition(piece.label(), &decompose(piece, config.grouping), config.entropy)
}
