use melodic_measure::io::{normalize_register, parse_piece_files, serialize_piece_files, PieceFile, PieceFormat, RegisterPolicy};
use melodic_measure::{
    decompose, direction_runs, direction_split, direction_sum_diff, distribution_check, energy, energy_level,
    enumerate_patterns, entropy, level_score, r_ratio, realize, shift_to_min_one, transitions, within_direction_diffs,
    EntropyMode, Grouping, Piece, SearchConfig, TransitionPattern, DEFAULT_SIGNATURE,
};
use proptest::prelude::*;

const CW: EntropyMode = EntropyMode::CoifmanWickerhauser;

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn frequencies() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((20i32..=400).prop_map(f64::from), 2..=8)
}

fn nonzero_list() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-500.0f64..500.0, 1..=12).prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn transitions_invert_by_cumulative_sum(f in frequencies()) {
        let piece = Piece::new("p", f.clone()).unwrap();
        let t = transitions(&piece);
        prop_assert_eq!(t.len(), f.len() - 1);
        prop_assert_eq!(realize(&t, f[0]).unwrap(), f);
    }

    #[test]
    fn realize_then_transitions_is_identity(t in prop::collection::vec((-8i32..=8).prop_map(|u| u as f64 * 5.0), 1..=6)) {
        let f = realize(&TransitionPattern(t.clone()), 500.0).unwrap();
        let piece = Piece::new("p", f).unwrap();
        prop_assert_eq!(transitions(&piece).0, t);
    }

    #[test]
    fn shift_is_idempotent_and_translation_invariant(v in prop::collection::vec(-1000i32..1000, 1..10), c in -500i32..500) {
        let v: Vec<f64> = v.into_iter().map(f64::from).collect();
        let shifted = shift_to_min_one(&v).unwrap();
        prop_assert_eq!(shifted.iter().copied().fold(f64::INFINITY, f64::min), 1.0);
        prop_assert_eq!(shift_to_min_one(&shifted).unwrap(), shifted.clone());
        let moved: Vec<f64> = v.iter().map(|x| x + c as f64).collect();
        prop_assert_eq!(shift_to_min_one(&moved).unwrap(), shifted);
    }

    #[test]
    fn split_is_a_regrouping(t in prop::collection::vec((-6i32..=6).prop_map(f64::from), 0..10)) {
        let tp = TransitionPattern(t.clone());
        let g = direction_split(&tp);
        let joined: Vec<f64> = g.positive.iter().chain(&g.negative).chain(&g.zeros).copied().collect();
        prop_assert_eq!(sorted(joined), sorted(t.clone()));
        let runs: Vec<f64> = direction_runs(&tp).into_iter().flatten().collect();
        prop_assert_eq!(runs, t);
    }

    #[test]
    fn w_length_formula(t in prop::collection::vec((-6i32..=6).prop_map(f64::from), 0..10)) {
        let tp = TransitionPattern(t.clone());
        let runs = direction_runs(&tp);
        let expected: usize = runs.iter().map(|r| if r.len() == 1 { 1 } else { r.len() - 1 }).sum();
        prop_assert_eq!(within_direction_diffs(&tp, Grouping::SignRuns).len(), expected);

        let g = direction_split(&tp);
        let size = |k: usize| if k <= 1 { k } else { k - 1 };
        let expected = size(g.positive.len()) + size(g.negative.len()) + g.zeros.len();
        prop_assert_eq!(within_direction_diffs(&tp, Grouping::GlobalSign).len(), expected);
    }

    #[test]
    fn d_is_permutation_invariant_and_nonnegative(t in prop::collection::vec((-8i32..=8).prop_map(f64::from), 1..7), seed in any::<u64>()) {
        let mut shuffled = t.clone();
        // Fisher-Yates driven by the seed
        let mut s = seed;
        for i in (1..shuffled.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        let d = direction_sum_diff(&TransitionPattern(t.clone()));
        prop_assert!(d >= 0.0);
        prop_assert_eq!(d, direction_sum_diff(&TransitionPattern(shuffled)));
        prop_assert_eq!(d, t.iter().map(|x| x.abs()).sum::<f64>());
    }

    #[test]
    fn swapping_within_a_run_flips_the_difference(a in 1i32..40, b in 1i32..40, sign in prop::bool::ANY) {
        prop_assume!(a != b);
        let s = if sign { 1.0 } else { -1.0 };
        let (a, b) = (s * a as f64, s * b as f64);
        let tail = -s * 7.0;
        for grouping in [Grouping::SignRuns, Grouping::GlobalSign] {
            let w1 = within_direction_diffs(&TransitionPattern(vec![a, b, tail]), grouping);
            let w2 = within_direction_diffs(&TransitionPattern(vec![b, a, tail]), grouping);
            // global grouping emits the rising group first
            let i = if grouping == Grouping::GlobalSign && !sign { 1 } else { 0 };
            prop_assert_eq!(w1[i], -w2[i]);
            prop_assert_eq!(w1[1 - i], w2[1 - i]);
        }
    }

    #[test]
    fn entropy_and_energy_are_permutation_invariant(v in nonzero_list()) {
        let mut rev = v.clone();
        rev.reverse();
        let mut rotated = v.clone();
        rotated.rotate_left(v.len() / 2);
        for other in [rev, rotated] {
            prop_assert!(rel_close(entropy(&v, CW), entropy(&other, CW), 1e-12));
            prop_assert!(rel_close(energy(&v), energy(&other), 1e-12));
        }
    }

    #[test]
    fn ratio_scaling_identity(v in nonzero_list()) {
        let base = level_score(&v, CW);
        for c in [0.5, 2.0, 10.0] {
            let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
            let s = level_score(&scaled, CW);
            prop_assert!(rel_close(s.ratio, 2.0 * f64::ln(c) + base.ratio, 1e-9));
            prop_assert!(rel_close(s.energy, c * c * base.energy, 1e-12));
            prop_assert!(rel_close(r_ratio(&scaled), 2.0 * f64::ln(c) + r_ratio(&v), 1e-9));
        }
    }

    #[test]
    fn ratio_equals_log_energy_plus_neg_shannon(v in nonzero_list()) {
        let s = level_score(&v, CW);
        let p_ln_p: f64 = v.iter().map(|x| x * x / s.energy).filter(|p| *p > 0.0).map(|p| p * p.ln()).sum();
        prop_assert!(rel_close(s.ratio, s.energy.ln() + p_ln_p, 1e-9));
    }

    #[test]
    fn zero_entries_are_neutral(v in nonzero_list(), zeros in 1usize..5) {
        let mut padded = v.clone();
        padded.extend(std::iter::repeat_n(0.0, zeros));
        prop_assert_eq!(entropy(&padded, CW), entropy(&v, CW));
        prop_assert_eq!(energy(&padded), energy(&v));
    }

    #[test]
    fn shannon_mode_is_bounded(v in nonzero_list()) {
        let h = entropy(&v, EntropyMode::ShannonNormalized);
        prop_assert!(h >= -1e-12 && h <= (v.len() as f64).ln() + 1e-12);
    }

    #[test]
    fn distribution_check_is_translation_invariant(f in prop::collection::vec((20i32..=300).prop_map(f64::from), 4..=4), c in 0i32..500) {
        let piece = Piece::new("p", f.clone()).unwrap();
        let moved = Piece::new("q", f.iter().map(|x| x + c as f64).collect()).unwrap();
        for grouping in [Grouping::SignRuns, Grouping::GlobalSign] {
            let a = distribution_check(&decompose(&piece, grouping), &DEFAULT_SIGNATURE).unwrap();
            let b = distribution_check(&decompose(&moved, grouping), &DEFAULT_SIGNATURE).unwrap();
            prop_assert_eq!(a.passed, b.passed);
            prop_assert_eq!(a.partition.signature, b.partition.signature);
        }
    }

    #[test]
    fn enumerated_patterns_hit_the_level(level in 1i32..=24, length in 1usize..=4) {
        let cfg = SearchConfig { length, ..SearchConfig::at_level(level as f64 * 5.0) };
        for p in enumerate_patterns(&cfg).unwrap() {
            prop_assert_eq!(energy_level(&p).0, level as f64 * 5.0);
            prop_assert!(p.deltas().iter().all(|d| *d != 0.0 && d.abs() <= 40.0));
        }
    }

    #[test]
    fn register_normalization_scales_transitions_by_octaves(f in prop::collection::vec(1.0f64..5000.0, 2..6)) {
        let piece = Piece::new("p", f).unwrap();
        let (norm, k) = normalize_register(&piece, &RegisterPolicy::default()).unwrap();
        let factor = 2f64.powi(k);
        for (a, b) in transitions(&piece).0.iter().zip(transitions(&norm).0) {
            prop_assert!(rel_close(a * factor, b, 1e-12));
        }
        let gm = (norm.frequencies().iter().map(|x| x.ln()).sum::<f64>() / norm.len() as f64).exp();
        prop_assert!((100.0 - 1e-9..=300.0 + 1e-9).contains(&gm));
    }

    #[test]
    fn piece_files_round_trip(
        label in "[A-Za-z][A-Za-z0-9_ ]{0,10}[A-Za-z0-9]",
        freqs in prop::collection::vec(1.0f64..2000.0, 2..8),
        notes in prop::collection::vec(0i64..=127, 2..8),
        use_midi in prop::bool::ANY,
    ) {
        let file = if use_midi {
            PieceFile { label, frequencies: None, midi_notes: Some(notes) }
        } else {
            PieceFile { label, frequencies: Some(freqs), midi_notes: None }
        };
        for format in [PieceFormat::Structured, PieceFormat::Delimited] {
            let text = serialize_piece_files(std::slice::from_ref(&file), format).unwrap();
            let parsed = parse_piece_files(text.as_bytes(), format, use_midi).unwrap();
            prop_assert_eq!(&parsed, &vec![file.clone()]);
            prop_assert_eq!(serialize_piece_files(&parsed, format).unwrap(), text);
        }
    }
}
