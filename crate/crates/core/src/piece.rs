//! Pieces and their multilevel decomposition.
//!
//! A piece is an ordered list of note frequencies. From it we derive
//!
//! * `l1` - the frequencies shifted so that the lowest note sits at 1,
//! * `t`  - the transition pattern (first differences),
//! * `w`  - differences taken inside each direction group of `t`,
//! * `d`  - the sum of rising transitions minus the sum of falling ones.
//!
//! The measure scores `l1`, `t` and `w`; the cluster check looks at the
//! combined multiset `t ∪ w ∪ {d}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Piece {
    label: String,
    frequencies: Vec<f64>,
}

impl Piece {
    pub fn new(label: impl Into<String>, frequencies: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if frequencies.len() < 2 {
            return Err(Error::TooFewNotes { label, len: frequencies.len(), min: 2 });
        }
        if let Some((index, &value)) =
            frequencies.iter().enumerate().find(|(_, f)| !(f.is_finite() && **f > 0.0))
        {
            return Err(Error::NonPositiveFrequency { label, index, value });
        }
        Ok(Self { label, frequencies })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.frequencies[0]
    }

    pub fn transitions(&self) -> TransitionPattern {
        transitions(self)
    }

    /// Same notes under a different label.
    pub fn relabel(self, label: impl Into<String>) -> Self {
        Self { label: label.into(), ..self }
    }
}

/// Signed frequency differences between successive notes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TransitionPattern(pub Vec<f64>);

impl TransitionPattern {
    pub fn deltas(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<f64>> for TransitionPattern {
    fn from(deltas: Vec<f64>) -> Self {
        Self(deltas)
    }
}

impl std::fmt::Display for TransitionPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

/// Sign-based regrouping of a transition pattern, temporal order kept.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DirectionGroups {
    pub positive: Vec<f64>,
    pub negative: Vec<f64>,
    pub zeros: Vec<f64>,
}

/// How transitions are collected into direction groups before differencing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grouping {
    /// Maximal runs of consecutive same-sign transitions. A zero transition
    /// is its own run and breaks the surrounding one.
    #[default]
    SignRuns,
    /// All rising transitions form one group and all falling ones another,
    /// regardless of where they occur. Zeros are appended at the end.
    GlobalSign,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub l1: Vec<f64>,
    pub t: Vec<f64>,
    pub w: Vec<f64>,
    pub d: f64,
}

pub fn transitions(piece: &Piece) -> TransitionPattern {
    TransitionPattern(piece.frequencies.windows(2).map(|w| w[1] - w[0]).collect())
}

pub fn shift_to_min_one(values: &[f64]) -> Result<Vec<f64>> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if values.is_empty() {
        return Err(Error::EmptyLevel);
    }
    Ok(values.iter().map(|v| v - min + 1.0).collect())
}

pub fn direction_split(t: &TransitionPattern) -> DirectionGroups {
    let mut groups = DirectionGroups::default();
    for &d in t.deltas() {
        if d > 0.0 {
            groups.positive.push(d);
        } else if d < 0.0 {
            groups.negative.push(d);
        } else {
            groups.zeros.push(d);
        }
    }
    groups
}

/// Maximal runs of same-sign transitions in temporal order. Zeros form
/// singleton runs.
pub fn direction_runs(t: &TransitionPattern) -> Vec<Vec<f64>> {
    let mut runs: Vec<Vec<f64>> = Vec::new();
    for &d in t.deltas() {
        match runs.last_mut() {
            Some(run) if d != 0.0 && sign(run[0]) == sign(d) => run.push(d),
            _ => runs.push(vec![d]),
        }
    }
    runs
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

fn push_group_diffs(group: &[f64], out: &mut Vec<f64>) {
    match group {
        [] => {}
        [single] => out.push(*single),
        _ => out.extend(group.windows(2).map(|p| p[0] - p[1])),
    }
}

pub fn within_direction_diffs(t: &TransitionPattern, grouping: Grouping) -> Vec<f64> {
    let mut out = Vec::with_capacity(t.len());
    match grouping {
        Grouping::SignRuns => {
            for run in direction_runs(t) {
                push_group_diffs(&run, &mut out);
            }
        }
        Grouping::GlobalSign => {
            let groups = direction_split(t);
            push_group_diffs(&groups.positive, &mut out);
            push_group_diffs(&groups.negative, &mut out);
            out.extend_from_slice(&groups.zeros);
        }
    }
    out
}

pub fn direction_sum_diff(t: &TransitionPattern) -> f64 {
    let groups = direction_split(t);
    groups.positive.iter().sum::<f64>() - groups.negative.iter().sum::<f64>()
}

pub fn decompose(piece: &Piece, grouping: Grouping) -> Decomposition {
    let t = transitions(piece);
    Decomposition {
        l1: shift_to_min_one(piece.frequencies()).expect("pieces are never empty"),
        w: within_direction_diffs(&t, grouping),
        d: direction_sum_diff(&t),
        t: t.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn piece(f: &[f64]) -> Piece {
        Piece::new("test", f.to_vec()).unwrap()
    }

    fn tp(d: &[f64]) -> TransitionPattern {
        TransitionPattern(d.to_vec())
    }

    #[test]
    fn transitions_examples() {
        assert_eq!(transitions(&piece(&[120., 160., 170., 145.])).0, vec![40., 10., -25.]);
        assert_eq!(transitions(&piece(&[120., 120.])).0, vec![0.]);
        assert_eq!(transitions(&piece(&[120., 125., 130., 95.])).0, vec![5., 5., -35.]);
    }

    #[test]
    fn piece_validation() {
        assert!(matches!(Piece::new("a", vec![120.]), Err(Error::TooFewNotes { len: 1, .. })));
        assert!(matches!(Piece::new("a", vec![]), Err(Error::TooFewNotes { len: 0, .. })));
        assert!(matches!(
            Piece::new("a", vec![120., 0.]),
            Err(Error::NonPositiveFrequency { index: 1, .. })
        ));
        assert!(Piece::new("a", vec![120., f64::NAN]).is_err());
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift_to_min_one(&[120., 160., 170., 145.]).unwrap(), vec![1., 41., 51., 26.]);
        assert_eq!(shift_to_min_one(&[1., 2., 3.]).unwrap(), vec![1., 2., 3.]);
        assert_eq!(shift_to_min_one(&[120., 125., 120., 105.]).unwrap(), vec![16., 21., 16., 1.]);
        assert_eq!(shift_to_min_one(&[]), Err(Error::EmptyLevel));
    }

    #[test]
    fn split_examples() {
        let g = direction_split(&tp(&[40., 10., -25.]));
        assert_eq!((g.positive, g.negative, g.zeros), (vec![40., 10.], vec![-25.], vec![]));
        let g = direction_split(&tp(&[-5., -20.]));
        assert_eq!((g.positive, g.negative, g.zeros), (vec![], vec![-5., -20.], vec![]));
        let g = direction_split(&tp(&[0., 10.]));
        assert_eq!((g.positive, g.negative, g.zeros), (vec![10.], vec![], vec![0.]));
    }

    #[test]
    fn within_direction_examples() {
        for grouping in [Grouping::SignRuns, Grouping::GlobalSign] {
            assert_eq!(within_direction_diffs(&tp(&[40., 10., -25.]), grouping), vec![30., -25.]);
            assert_eq!(within_direction_diffs(&tp(&[35., -5., -20.]), grouping), vec![35., 15.]);
            assert_eq!(within_direction_diffs(&tp(&[5., 5., -35.]), grouping), vec![0., -35.]);
        }
    }

    #[test]
    fn groupings_differ_on_interleaved_signs() {
        let t = tp(&[5., -35., 5.]);
        assert_eq!(within_direction_diffs(&t, Grouping::SignRuns), vec![5., -35., 5.]);
        assert_eq!(within_direction_diffs(&t, Grouping::GlobalSign), vec![0., -35.]);
    }

    #[test]
    fn long_groups_and_zeros() {
        let t = tp(&[10., 4., 1., 0., -3., -9.]);
        assert_eq!(within_direction_diffs(&t, Grouping::SignRuns), vec![6., 3., 0., 6.]);
        assert_eq!(within_direction_diffs(&t, Grouping::GlobalSign), vec![6., 3., 6., 0.]);
        // a zero splits a run
        assert_eq!(within_direction_diffs(&tp(&[5., 0., 5.]), Grouping::SignRuns), vec![5., 0., 5.]);
    }

    #[test]
    fn direction_sum_examples() {
        assert_eq!(direction_sum_diff(&tp(&[40., 10., -25.])), 75.);
        assert_eq!(direction_sum_diff(&tp(&[15., 5., -5.])), 25.);
        assert_eq!(direction_sum_diff(&tp(&[10., 20.])), 30.);
    }

    #[test]
    fn decompose_examples() {
        let dec = decompose(&piece(&[120., 160., 170., 145.]), Grouping::default());
        assert_eq!(dec.l1, vec![1., 41., 51., 26.]);
        assert_eq!(dec.t, vec![40., 10., -25.]);
        assert_eq!(dec.w, vec![30., -25.]);
        assert_eq!(dec.d, 75.);

        let dec = decompose(&piece(&[120., 135., 140., 135.]), Grouping::default());
        assert_eq!(dec.l1, vec![1., 16., 21., 16.]);
        assert_eq!(dec.t, vec![15., 5., -5.]);
        assert_eq!(dec.w, vec![10., -5.]);
        assert_eq!(dec.d, 25.);

        let dec = decompose(&piece(&[100., 100., 100.]), Grouping::default());
        assert_eq!(dec.l1, vec![1., 1., 1.]);
        assert_eq!(dec.t, vec![0., 0.]);
        assert_eq!(dec.w, vec![0., 0.]);
        assert_eq!(dec.d, 0.);
    }
}
