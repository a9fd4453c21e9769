//! Closed-form second-Hankel-determinant bounds for m-fold symmetric
//! bi-univalent function classes defined through a Ruscheweyh-type operator,
//! together with the machinery needed to verify them independently.
//!
//! The crate is organised around five concerns:
//!
//! * [`model`] — validated class parameters `(m, λ, γ, β)` with exact
//!   rational storage for `λ` and `β`.
//! * [`series`] — truncated power-series utilities for m-fold symmetric
//!   functions: operator weights, series reversion, Hankel determinants and
//!   the Fekete–Szegö functional.
//! * [`bound`] — the piecewise closed-form bound on
//!   `|a_{m+1} a_{3m+1} − a_{2m+1}²|`, its branch threshold τ, the boundary
//!   polynomial `K(ρ)` and the specialised corollary formulas.
//! * [`oracle`] — independent checks: brute-force maximisation of the
//!   surrogate surface, Carathéodory-representation Monte Carlo sampling and
//!   coefficient-lemma identity checks.
//! * [`figures`] — CSV figure-data emission for the F-coefficient curves.
//!
//! Exact rational arithmetic is used for every polynomial quantity; square
//! roots (τ, ρ₂ and the corollary thresholds) are the only floating-point
//! steps and carry a 1e-14 relative error budget.

pub mod bound;
pub mod figures;
pub mod model;
pub mod oracle;
pub mod series;

mod error;

pub use bound::{
    corollary_bound, f_coeffs, f_surface, k_extremes, k_of_rho, k_prime, omega_set, rho_two, tau,
    theorem_bound, BoundResult, Branch, Corollary, CorollaryBound, FCoeffs, KExtremes, OmegaSet,
};
pub use error::Error;
pub use figures::{figure_csv, FigureKind};
pub use model::{parse_rational, validate_params, Family, Params};
pub use oracle::{
    brute_force_max, coefficients_from_sample, hankel_functional, lemma_identity_check,
    monte_carlo_verify, reconstruct_pq, sign_invariant_check, CaratheodorySample, LemmaReport,
    PQDifferences, SearchResult, SignCheck, SignReport, VerifyReport,
};
pub use series::{
    apply_ruscheweyh, fekete_szego, hankel_determinant, invert_series, operator_lhs_coeffs,
    ruscheweyh_weight, CoefficientTriple, MFoldSeries, Scalar,
};

/// Convenience alias for the exact rational type used throughout.
pub type Rational = num_rational::BigRational;

/// Convenience alias for double-precision complex values.
pub type Complex = num_complex::Complex64;
