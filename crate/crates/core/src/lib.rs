//! Exact equilibrium computation for finite-action mean-field games with a
//! mixture of rational and herding players.
//!
//! A fraction `alpha` of the population best-responds to the aggregate
//! measure; the remaining `1 - alpha` follows the majority action. The
//! crate enumerates the resulting equilibria exactly for affine utilities,
//! computes efficiency ratios, predicts outcomes by iterated elimination,
//! designs influence measures and cross-checks everything with an
//! independent oracle.

pub mod alpharne;
pub mod classical;
pub mod cli;
pub mod error;
pub mod game;
pub mod influence;
mod linalg;
pub mod measures;
pub mod metrics;
pub mod oracle;
pub mod predict;
pub mod report;

pub use classical::{
    classical_equilibria, social_optimum, EquilibriumFamily, EquilibriumPoint, EquilibriumSet,
    HerdingAnnotation, SocialOptimum,
};
pub use alpharne::{
    alpha_rne_set, herding_choice_set, is_alpha_rne, rational_measure, rne_decomposition, HerdingPolicy,
    RneDecomposition, Verdict,
};
pub use error::{Error, Result};
pub use game::{builtin, parse_game, serialize_game, AffineUtility, BuiltinParams, GameSpec};
pub use metrics::{
    braess_comparison, metrics_report, per_type_utilities, poa_pos, social_utility, sweep,
    theorem2_check, BraessComparison, GridRange, MetricsReport, SweepRow,
};
pub use influence::{design_influence, lower_level_equilibrium, well_posed, InfluenceSolution, Objective};
pub use oracle::{grid_scan, independent_enumeration, random_affine_game, verify_set, OracleReport};
pub use predict::{is_dominated, iterated_prediction, PredictionResult};
pub use measures::{argmax_set, herding_choice, make_measure, support, Measure, Tolerance};
