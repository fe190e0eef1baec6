//! Scores short melodies with a multilevel entropy-energy measure, checks
//! the three-cluster shape of their level distribution, and searches
//! transition-pattern space exhaustively.
//!
//! ```
//! use melodic_measure::{m_value, MeasureConfig, Piece};
//!
//! let piece = Piece::new("P1", vec![120.0, 160.0, 170.0, 145.0]).unwrap();
//! let score = m_value(&piece, MeasureConfig::default()).unwrap();
//! assert!((score.m - 2.118).abs() < 0.002);
//! ```

pub mod distribution;
pub mod error;
pub mod experiments;
pub mod io;
pub mod measure;
pub mod piece;
pub mod search;

pub use distribution::{
    cluster_1d, combined_distribution, distribution_check, r_ratio, spacing_lab, wigner_surmise_pdf, Beta,
    ClusterPartition, CombinedDistribution, DistributionCheck, SpacingLabConfig, SpacingLabReport,
    DEFAULT_SIGNATURE,
};
pub use error::{Error, Result};
pub use measure::{energy, entropy, level_score, m_value, AestheticScore, EntropyMode, LevelScore, MeasureConfig, SCALE_FACTOR};
pub use piece::{
    decompose, direction_runs, direction_split, direction_sum_diff, shift_to_min_one, transitions, within_direction_diffs,
    Decomposition, DirectionGroups, Grouping, Piece, TransitionPattern,
};
pub use search::{
    arrangements, energy_level, energy_sweep, enumerate_patterns, permutation_experiment, realize, CandidateReport,
    EnergyLevel, Parallelism, PermutationConfig, PermutationReport, SearchConfig, SweepReport,
};
