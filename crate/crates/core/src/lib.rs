//! Smooth numbers, exponential sums over them, and their moments.
//!
//! The crate is organised bottom-up:
//!
//! * [`smooth`] enumerates the `y`-smooth integers up to `x` and counts them.
//! * [`exponents`] holds the exponent system (`κ`, `β`, `γ`, `η`, `ξ`, `ζ`)
//!   in exact rational arithmetic or in floating point.
//! * [`expsum`] evaluates `S(θ) = Σ e(θn)` pointwise and on uniform grids,
//!   together with the pointwise bound skeletons.
//! * [`moments`] computes `I_ρ = ∫|S|^ρ` exactly for even `ρ` and by
//!   quadrature otherwise.
//! * [`arcs`] classifies points of the circle into Dirichlet arcs and splits
//!   a moment into per-arc contributions.
//! * [`bounds`] evaluates the explicit mean-value bounds and their validity
//!   predicates.
//!
//! Numerical code is generic over a [`Real`] scalar (`f32` or `f64`); the
//! exponent algebra is generic over an [`Exponent`] scalar, which is usually
//! [`Rational`] so that identities hold exactly. Concrete aliases for the
//! common instantiations live at the crate root.

pub mod arcs;
pub mod bounds;
pub mod error;
pub mod exponents;
pub mod expsum;
pub mod moments;
mod ntt;
pub mod scalar;
pub mod smooth;
mod sum;

pub use arcs::{
    arc_decompose, balance_threshold_exponent, classify_grid_node, classify_theta,
    classify_grid, farey_fractions, optimal_q, ArcContribution, ArcDecomposition, ArcLabel, SplitRule,
};
pub use bounds::{
    compare, cor_energy_bound, corollary_consistency_check, harper_mvt_bound, sunit_bound,
    thm1_bound, thm2_bound, trivial_bound, BoundId, BoundInputs, BoundReport, IdentityCheck,
};
pub use error::{Error, Result};
pub use exponents::{exponent_params, parse_rational, ExponentParams};
pub use expsum::{
    eval_s, eval_s_grid, skeleton_baker, skeleton_ft, skeleton_harper, ExpSumValue, LemmaId,
    SkeletonReport,
};
pub use moments::{
    energy, even_moment_exact, moment_quadrature, moment_refined, representation_counts,
    MomentMethod, MomentResult, RepCounts,
};
pub use scalar::{Exponent, Real};
pub use smooth::{psi, saddle_alpha, sieve_smooth, y_from_k, SmoothSet};

/// Arbitrary-precision rational used for exact exponent algebra.
pub type Rational = num_rational::BigRational;

/// Exponent system in exact rational arithmetic.
pub type ExactParams = ExponentParams<Rational>;
/// Exponent system in double precision.
pub type Params64 = ExponentParams<f64>;

pub type ExpSum64 = ExpSumValue<f64>;
pub type ExpSum32 = ExpSumValue<f32>;
pub type Skeleton64 = SkeletonReport<f64>;
pub type Moment64 = MomentResult<f64>;
pub type Moment32 = MomentResult<f32>;
pub type Decomposition64 = ArcDecomposition<f64>;
