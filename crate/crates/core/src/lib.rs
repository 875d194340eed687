//! Exact and Monte Carlo evaluation of `f(N; μ, ν) = E det(X_N − μ) det(X_N − ν)`
//! for Hermitian Wigner matrices `X_N`, together with its sine-kernel limits.
//!
//! The correlation depends on the entry law only through `b = E q⁴`.
//! It is available from a five-function recursion ([`full_system`]), a
//! condensed single-sequence recursion ([`condensed`]), the exponential
//! generating function ([`egf_f`]) and a contour quadrature
//! ([`contour_coefficient`]).

pub mod asymptotics;
pub mod domain;
pub mod error;
pub mod hermite;
pub mod montecarlo;
pub mod recursion;
pub mod series;

pub use asymptotics::{
    contour_coefficient, convergence_study, eta_prelimit, normalized_ratio,
    scaled_centered_correlation, sine_kernel_limit, sine_kernel_limit_eta,
    sine_kernel_limit_eta_real, ContourPlan, ContourResult, ConvergenceRow, RatioKind,
};
pub use domain::{
    scale_to_spectral, semicircle_density, validate_fourth_moment, EntryLaw, MomentProfile,
    Precision, Real, ScaledWindow, SpectralArgs, XiRule,
};
pub use error::{Error, Result};
pub use hermite::{
    bound_ratio, bound_ratio_sequence, centered_correlation, g_recursion, g_via_hermite,
    MeanDetSequence,
};
pub use montecarlo::{mc_correlation, mc_mean_det, EstimatorResult, WignerSampler};
pub use recursion::{
    condensed, damped_condensed, full_system, scaled_correlation, CondensedState, FullSystemState,
};
pub use series::{egf_f, egf_f_exact, f_values, ode_residual, TruncatedSeries};
