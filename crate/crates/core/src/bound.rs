//! The closed-form bound on `|a_{m+1} a_{3m+1} − a_{2m+1}²|` and everything
//! it is assembled from: the ω-products, the branch threshold τ, the
//! F-coefficients of the surrogate surface, the boundary polynomial `K(ρ)`
//! with its derivative and interior critical point ρ₂, and the specialised
//! corollary formulas.
//!
//! Every polynomial quantity is evaluated in exact rational arithmetic and
//! rounded to `f64` once at the end. Square roots — τ, ρ₂ and the corollary
//! thresholds — are the only floating-point steps; each carries a 1e-14
//! relative error budget. Branch selection never goes through a square
//! root: `β ≤ τ` is decided exactly by comparing `2ω₁(1−β) − ω₂` against
//! the radicand, so the selected branch is deterministic even when β sits
//! on top of the threshold.
//!
//! `K(ρ)` is evaluated along two independent routes — the combination
//! `F₁ + 2(F₂+F₃) + 4F₄` and the expanded quartic `(Aρ⁴ + Bρ² + C)`
//! with rational coefficients — and [`k_of_rho`] asserts their agreement
//! on every call. A disagreement beyond 1e-12 relative indicates a
//! transcription bug and panics rather than returning silently wrong data.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::model::{rat, Family, Params};

/// Relative agreement demanded of the two `K(ρ)` evaluation routes.
const K_TWO_PATH_TOL: f64 = 1e-12;

/// ρ₂ values this close above 2 are still reported; keeps the interior
/// critical point visible when β equals the threshold only up to floating
/// rounding.
const RHO_TWO_EDGE_TOL: f64 = 1e-12;

/// Denominator guard for the ρ₂ radicand.
const RHO_TWO_DENOM_GUARD: f64 = 1e-13;

/// The four positive products entering the bound and its threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaSet {
    omega1: BigRational,
    omega2: BigRational,
    omega3: BigRational,
    omega4: BigRational,
}

impl OmegaSet {
    pub fn omega1(&self) -> &BigRational {
        &self.omega1
    }
    pub fn omega2(&self) -> &BigRational {
        &self.omega2
    }
    pub fn omega3(&self) -> &BigRational {
        &self.omega3
    }
    pub fn omega4(&self) -> &BigRational {
        &self.omega4
    }

    pub fn to_f64(&self) -> (f64, f64, f64, f64) {
        (
            rational_f64(&self.omega1),
            rational_f64(&self.omega2),
            rational_f64(&self.omega3),
            rational_f64(&self.omega4),
        )
    }
}

/// The four coefficients of the surrogate surface
/// `F(μ₁, μ₂) = F₁ + F₂(μ₁+μ₂) + F₃(μ₁²+μ₂²) + F₄(μ₁+μ₂)²` at a fixed ρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FCoeffs {
    pub rho: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
}

impl FCoeffs {
    /// Value of the surrogate surface at `(μ₁, μ₂)`.
    pub fn surface(&self, mu1: f64, mu2: f64) -> f64 {
        let s = mu1 + mu2;
        self.f1 + self.f2 * s + self.f3 * (mu1 * mu1 + mu2 * mu2) + self.f4 * s * s
    }

    /// Boundary value `K(ρ) = F(1,1) = F₁ + 2(F₂+F₃) + 4F₄`.
    pub fn k_value(&self) -> f64 {
        self.f1 + 2.0 * (self.f2 + self.f3) + 4.0 * self.f4
    }
}

/// Which piece of the bound applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `β ≤ τ`: the boundary polynomial peaks at the endpoint ρ = 2.
    AtRhoTwo,
    /// `β > τ`: the peak sits at the interior critical point ρ₂.
    AtRhoStar,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Branch::AtRhoTwo => write!(f, "AtRhoTwo"),
            Branch::AtRhoStar => write!(f, "AtRhoStar"),
        }
    }
}

/// Evaluated bound together with the branch bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    /// Upper bound for `|a_{m+1} a_{3m+1} − a_{2m+1}²|`.
    pub value: f64,
    pub branch: Branch,
    /// Branch threshold of the family. Negative for families whose boundary
    /// polynomial peaks in the interior for every admissible β.
    pub tau: f64,
    /// Location of the maximum of `K`: 2 on [`Branch::AtRhoTwo`], ρ₂ on
    /// [`Branch::AtRhoStar`].
    pub rho_star: f64,
}

/// Closed-form extreme values of `K` at ρ = 0, ρ = 2 and (when present) ρ₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KExtremes {
    pub k_at_zero: f64,
    pub k_at_two: f64,
    pub k_at_rho2: Option<f64>,
}

fn rational_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl Family {
    /// The four ω-products. Independent of β.
    pub fn omega_set(&self) -> OmegaSet {
        let m = rat(self.m() as i64);
        let g1 = rat(self.gamma() as i64 + 1);
        let g2 = rat(self.gamma() as i64 + 2);
        let g3 = rat(self.gamma() as i64 + 3);
        let ml = &m * self.lambda();
        let ml1 = &ml + rat(1);
        let ml2 = &ml * rat(2) + rat(1);
        let ml3 = &ml * rat(3) + rat(1);
        let m1 = &m + rat(1);
        OmegaSet {
            omega1: &m1 * &m1 * &g2 * &g2 * &g3 * &ml2 * &ml2 * &ml3,
            omega2: &m * &g1 * &g2 * &g3 * &ml1 * &ml1 * &ml2 * &ml3,
            omega3: &g1 * &g1 * &g2 * &ml1 * &ml1 * &ml1 * &ml2 * &ml2,
            omega4: &g1 * &g1 * &g3 * &ml1 * &ml1 * &ml1 * &ml1 * &ml3,
        }
    }

    /// Branch threshold `τ = 1 − (ω₂ + √(ω₂² + 12ω₁ω₃)) / (2ω₁)`.
    ///
    /// The square root is the only inexact step (≤ 1e-14 relative). Use
    /// [`Family::beta_le_tau`] when the comparison itself must be exact.
    pub fn tau(&self) -> f64 {
        let w = self.omega_set();
        let radicand = &w.omega2 * &w.omega2 + rat(12) * &w.omega1 * &w.omega3;
        1.0 - (rational_f64(&w.omega2) + rational_f64(&radicand).sqrt())
            / (2.0 * rational_f64(&w.omega1))
    }

    /// Exact test of `β ≤ τ`, carried out entirely in rational arithmetic:
    /// `β ≤ τ  ⇔  2ω₁(1−β) − ω₂ ≥ 0  ∧  ω₂² + 12ω₁ω₃ ≤ (2ω₁(1−β) − ω₂)²`.
    pub fn beta_le_tau(&self, beta: &BigRational) -> bool {
        let w = self.omega_set();
        let u = rat(1) - beta;
        let rhs = rat(2) * &w.omega1 * u - &w.omega2;
        if rhs.is_negative() {
            return false;
        }
        let radicand = &w.omega2 * &w.omega2 + rat(12) * &w.omega1 * &w.omega3;
        radicand <= &rhs * &rhs
    }

    /// `K(0) = 16(1−β)² / ((γ+1)²(γ+2)²(2mλ+1)²)`, exactly rounded.
    pub fn k_at_zero(&self, beta: &BigRational) -> f64 {
        let u = rat(1) - beta;
        let g1 = rat(self.gamma() as i64 + 1);
        let g2 = rat(self.gamma() as i64 + 2);
        let ml2 = rat(2 * self.m() as i64) * self.lambda() + rat(1);
        rational_f64(&(rat(16) * &u * &u / (&g1 * &g1 * &g2 * &g2 * &ml2 * &ml2)))
    }

    /// Endpoint value
    /// `K(2) = 4(1−β)²/((γ+1)²(mλ+1)) · [ (m+1)²(1−β)²/((γ+1)²(mλ+1)³)
    ///         + 6/((γ+2)(γ+3)(3mλ+1)) ]`, exactly rounded.
    pub fn k_at_two(&self, beta: &BigRational) -> f64 {
        let u = rat(1) - beta;
        let m1 = rat(self.m() as i64 + 1);
        let g1 = rat(self.gamma() as i64 + 1);
        let g2 = rat(self.gamma() as i64 + 2);
        let g3 = rat(self.gamma() as i64 + 3);
        let ml1 = rat(self.m() as i64) * self.lambda() + rat(1);
        let ml3 = rat(3 * self.m() as i64) * self.lambda() + rat(1);
        let first = &m1 * &m1 * &u * &u / (&g1 * &g1 * &ml1 * &ml1 * &ml1);
        let second = rat(6) / (&g2 * &g3 * &ml3);
        let value = rat(4) * &u * &u / (&g1 * &g1 * &ml1) * (first + second);
        rational_f64(&value)
    }

    /// Interior critical point
    /// `ρ₂ = √[(16ω₄ − 4ω₂(1−β) − 36ω₃) / (ω₁(1−β)² − 2ω₂(1−β) − 12ω₃ + 4ω₄)]`,
    /// reported when the radicand is finite and positive and the root lands
    /// in (0, 2] (up to a 1e-12 rounding margin at the upper end); `None`
    /// otherwise. A radicand denominator within 1e-13 of zero is treated as
    /// degenerate and also yields `None`.
    pub fn rho_two(&self, beta: &BigRational) -> Option<f64> {
        let w = self.omega_set();
        let u = rat(1) - beta;
        let numer = rat(16) * &w.omega4 - rat(4) * &w.omega2 * &u - rat(36) * &w.omega3;
        let denom = &w.omega1 * &u * &u - rat(2) * &w.omega2 * &u - rat(12) * &w.omega3
            + rat(4) * &w.omega4;
        if denom.is_zero() || rational_f64(&denom).abs() < RHO_TWO_DENOM_GUARD {
            return None;
        }
        let radicand = numer / denom;
        if !radicand.is_positive() {
            return None;
        }
        let rho = rational_f64(&radicand).sqrt();
        (rho.is_finite() && rho > 0.0 && rho <= 2.0 * (1.0 + RHO_TWO_EDGE_TOL)).then_some(rho)
    }

    /// Interior maximum value
    /// `K(ρ₂) = 4(1−β)²/((γ+1)²(γ+2)²(2mλ+1)²) ·
    ///          [4 − (ω₂(1−β)+9ω₃−4ω₄)² / (ω₄·(ω₁(1−β)²−2ω₂(1−β)−12ω₃+4ω₄))]`,
    /// exactly rounded; present exactly when [`Family::rho_two`] is.
    pub fn k_at_rho_two(&self, beta: &BigRational) -> Option<f64> {
        self.rho_two(beta)?;
        let w = self.omega_set();
        let u = rat(1) - beta;
        let e = &w.omega2 * &u + rat(9) * &w.omega3 - rat(4) * &w.omega4;
        let denom = &w.omega1 * &u * &u - rat(2) * &w.omega2 * &u - rat(12) * &w.omega3
            + rat(4) * &w.omega4;
        let g1 = rat(self.gamma() as i64 + 1);
        let g2 = rat(self.gamma() as i64 + 2);
        let ml2 = rat(2 * self.m() as i64) * self.lambda() + rat(1);
        let prefactor = rat(4) * &u * &u / (&g1 * &g1 * &g2 * &g2 * &ml2 * &ml2);
        let bracket = rat(4) - &e * &e / (&w.omega4 * denom);
        Some(rational_f64(&(prefactor * bracket)))
    }
}

/// Per-parameter rational prefactors baked to `f64`, shared by the surface,
/// `K` and `K′` evaluators. Built once and reused in grid loops.
#[derive(Debug, Clone)]
pub(crate) struct SurfaceCtx {
    // F-coefficient constants.
    c_f1_r4: f64,
    c_f1_r: f64,
    c_f2: f64,
    c_f3_r2: f64,
    c_f3_r: f64,
    c_f4: f64,
    // Expanded quartic K(ρ) = scale·(A ρ⁴ + B ρ² + C) and its derivative
    // K′(ρ) = 4·scale·(A ρ³ + (B/2) ρ).
    quart_a: f64,
    quart_b: f64,
    quart_c: f64,
    quart_scale: f64,
}

impl SurfaceCtx {
    pub(crate) fn new(family: &Family, beta: &BigRational) -> Self {
        let m = rat(family.m() as i64);
        let u = rat(1) - beta;
        let g1 = rat(family.gamma() as i64 + 1);
        let g2 = rat(family.gamma() as i64 + 2);
        let g3 = rat(family.gamma() as i64 + 3);
        let ml = &m * family.lambda();
        let ml1 = &ml + rat(1);
        let ml2 = &ml * rat(2) + rat(1);
        let ml3 = &ml * rat(3) + rat(1);
        let m1 = &m + rat(1);

        let u2 = &u * &u;
        // Shared coefficient T = 3(1−β)² / ((γ+1)²(γ+2)(γ+3)(mλ+1)(3mλ+1)).
        let t = rat(3) * &u2 / (&g1 * &g1 * &g2 * &g3 * &ml1 * &ml3);
        let t_half = &t / rat(2);
        let c_f1_r4 = &m1 * &m1 * &u2 * &u2
            / (rat(4) * &g1 * &g1 * &g1 * &g1 * &ml1 * &ml1 * &ml1 * &ml1)
            + &t_half;
        let c_f2 = &m * &u2 * &u / (rat(4) * &g1 * &g1 * &g1 * &g2 * &ml1 * &ml1 * &ml2) + &t_half;
        let c_f4 = &u2 / (rat(4) * &g1 * &g1 * &g2 * &g2 * &ml2 * &ml2);

        let w = family.omega_set();
        let quart_a =
            &w.omega1 * &u2 - rat(2) * &w.omega2 * &u - rat(12) * &w.omega3 + rat(4) * &w.omega4;
        let quart_b = rat(8) * &w.omega2 * &u + rat(72) * &w.omega3 - rat(32) * &w.omega4;
        let quart_c = rat(64) * &w.omega4;
        let denom = &g1
            * &g1
            * &g1
            * &g1
            * &g2
            * &g2
            * &g3
            * &ml1
            * &ml1
            * &ml1
            * &ml1
            * &ml2
            * &ml2
            * &ml3;
        let quart_scale = &u2 / (rat(4) * denom);

        SurfaceCtx {
            c_f1_r4: rational_f64(&c_f1_r4),
            c_f1_r: rational_f64(&t),
            c_f2: rational_f64(&c_f2),
            c_f3_r2: rational_f64(&(&t / rat(4))),
            c_f3_r: rational_f64(&t_half),
            c_f4: rational_f64(&c_f4),
            quart_a: rational_f64(&quart_a),
            quart_b: rational_f64(&quart_b),
            quart_c: rational_f64(&quart_c),
            quart_scale: rational_f64(&quart_scale),
        }
    }

    pub(crate) fn for_params(p: &Params) -> Self {
        SurfaceCtx::new(p.family(), p.beta())
    }

    /// F-coefficients at ρ; the caller guarantees `0 ≤ ρ ≤ 2`.
    pub(crate) fn f_coeffs(&self, rho: f64) -> FCoeffs {
        let r2 = rho * rho;
        let gap = 4.0 - r2;
        FCoeffs {
            rho,
            f1: self.c_f1_r4 * r2 * r2 + self.c_f1_r * rho * gap,
            f2: self.c_f2 * r2 * gap,
            f3: self.c_f3_r2 * r2 * gap - self.c_f3_r * rho * gap,
            f4: self.c_f4 * gap * gap,
        }
    }

    /// `K(ρ)` via the expanded quartic route.
    pub(crate) fn k_expanded(&self, rho: f64) -> f64 {
        let r2 = rho * rho;
        self.quart_scale * ((self.quart_a * r2 + self.quart_b) * r2 + self.quart_c)
    }

    /// `K′(ρ)` via the displayed cubic.
    pub(crate) fn k_prime(&self, rho: f64) -> f64 {
        4.0 * self.quart_scale * (self.quart_a * rho * rho + 0.5 * self.quart_b) * rho
    }

    /// `K(ρ)` with the double-entry check between the F-combination and the
    /// expanded quartic. Disagreement is a transcription bug and panics.
    pub(crate) fn k_checked(&self, rho: f64) -> f64 {
        let via_f = self.f_coeffs(rho).k_value();
        let via_quartic = self.k_expanded(rho);
        let diff = (via_f - via_quartic).abs();
        assert!(
            diff <= K_TWO_PATH_TOL * via_f.abs().max(via_quartic.abs()),
            "K(rho) evaluation routes disagree at rho = {rho}: {via_f} vs {via_quartic}"
        );
        via_f
    }
}

fn check_rho(rho: f64) -> Result<(), Error> {
    if !(0.0..=2.0).contains(&rho) {
        return Err(Error::range("rho", format!("{rho} outside [0, 2]")));
    }
    Ok(())
}

/// The four ω-products for validated parameters (β is unused).
pub fn omega_set(p: &Params) -> OmegaSet {
    p.family().omega_set()
}

/// Branch threshold τ of the parameter family.
pub fn tau(p: &Params) -> f64 {
    p.family().tau()
}

/// F-coefficients of the surrogate surface at `ρ ∈ [0, 2]`.
pub fn f_coeffs(p: &Params, rho: f64) -> Result<FCoeffs, Error> {
    check_rho(rho)?;
    Ok(SurfaceCtx::for_params(p).f_coeffs(rho))
}

/// Surrogate surface `F(μ₁, μ₂)` at `ρ ∈ [0, 2]`, `μ₁, μ₂ ∈ [0, 1]`.
pub fn f_surface(p: &Params, rho: f64, mu1: f64, mu2: f64) -> Result<f64, Error> {
    check_rho(rho)?;
    if !(0.0..=1.0).contains(&mu1) {
        return Err(Error::range("mu1", format!("{mu1} outside [0, 1]")));
    }
    if !(0.0..=1.0).contains(&mu2) {
        return Err(Error::range("mu2", format!("{mu2} outside [0, 1]")));
    }
    Ok(SurfaceCtx::for_params(p).f_coeffs(rho).surface(mu1, mu2))
}

/// Boundary polynomial `K(ρ) = F₁ + 2(F₂+F₃) + 4F₄`, checked on every call
/// against the expanded quartic route.
pub fn k_of_rho(p: &Params, rho: f64) -> Result<f64, Error> {
    check_rho(rho)?;
    Ok(SurfaceCtx::for_params(p).k_checked(rho))
}

/// Derivative `K′(ρ)` via the displayed cubic in ρ.
pub fn k_prime(p: &Params, rho: f64) -> Result<f64, Error> {
    check_rho(rho)?;
    Ok(SurfaceCtx::for_params(p).k_prime(rho))
}

/// Interior critical point ρ₂ of `K`, when it lies in (0, 2).
pub fn rho_two(p: &Params) -> Option<f64> {
    p.family().rho_two(p.beta())
}

/// Closed-form extremes of `K`; `k_at_rho2` is present exactly when
/// [`rho_two`] is.
pub fn k_extremes(p: &Params) -> KExtremes {
    let f = p.family();
    KExtremes {
        k_at_zero: f.k_at_zero(p.beta()),
        k_at_two: f.k_at_two(p.beta()),
        k_at_rho2: f.k_at_rho_two(p.beta()),
    }
}

/// The piecewise bound: `K(2)` for `β ≤ τ` (branch [`Branch::AtRhoTwo`]),
/// `K(ρ₂)` for `β > τ` (branch [`Branch::AtRhoStar`]). Branch selection is
/// exact; at `β = τ` the two pieces agree and the endpoint branch is
/// reported.
pub fn theorem_bound(p: &Params) -> BoundResult {
    let family = p.family();
    let tau = family.tau();
    if family.beta_le_tau(p.beta()) {
        BoundResult {
            value: family.k_at_two(p.beta()),
            branch: Branch::AtRhoTwo,
            tau,
            rho_star: 2.0,
        }
    } else {
        let value = family
            .k_at_rho_two(p.beta())
            .expect("interior critical point exists above the branch threshold");
        let rho_star = family
            .rho_two(p.beta())
            .expect("interior critical point exists above the branch threshold");
        BoundResult {
            value,
            branch: Branch::AtRhoStar,
            tau,
            rho_star,
        }
    }
}

/// A specialised family with its own closed-form bound and threshold,
/// evaluated independently of [`theorem_bound`] so the two can be
/// cross-checked.
#[derive(Debug, Clone, PartialEq)]
pub enum Corollary {
    /// λ = 1, γ = 0 at fold order m; threshold `v`.
    MFold { m: u32, beta: BigRational },
    /// 1-fold with free λ and γ; threshold `ξ`.
    General1Fold {
        lambda: BigRational,
        gamma: u32,
        beta: BigRational,
    },
    /// 1-fold, γ = 0 with free λ; threshold `ε`.
    Lambda1Fold {
        lambda: BigRational,
        beta: BigRational,
    },
    /// 1-fold, λ = 1, γ = 0; threshold `(11 − √37)/12`.
    Base { beta: BigRational },
}

/// Value and threshold of a corollary bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryBound {
    pub value: f64,
    pub threshold: f64,
}

fn check_corollary_beta(beta: &BigRational) -> Result<BigRational, Error> {
    if beta.is_negative() || *beta >= rat(1) {
        return Err(Error::range(
            "beta",
            format!("{beta} violates 0 <= beta < 1"),
        ));
    }
    Ok(rat(1) - beta)
}

fn check_corollary_lambda(lambda: &BigRational) -> Result<(), Error> {
    if *lambda < rat(1) {
        return Err(Error::range(
            "lambda",
            format!("{lambda} violates lambda >= 1"),
        ));
    }
    Ok(())
}

/// Exact branch test for thresholds of the shape
/// `t = (shift − √radicand)/denom`, i.e. `β ≤ t ⇔ denom·β ≤ shift − √radicand`.
fn beta_le_radical_threshold(
    beta: &BigRational,
    shift: &BigRational,
    radicand: &BigRational,
    denom: &BigRational,
) -> bool {
    let rhs = shift - denom * beta;
    if rhs.is_negative() {
        return false;
    }
    *radicand <= &rhs * &rhs
}

/// Evaluates the requested corollary's piecewise bound and threshold.
///
/// Each arm re-derives its products (ψ, ϑ, η) from scratch; none of the
/// ω-machinery behind [`theorem_bound`] is reused, which is what makes the
/// specialisation cross-checks meaningful.
pub fn corollary_bound(c: &Corollary) -> Result<CorollaryBound, Error> {
    match c {
        Corollary::MFold { m, beta } => {
            if *m < 1 {
                return Err(Error::range("m", "must satisfy m >= 1".to_string()));
            }
            let u = check_corollary_beta(beta)?;
            let m = rat(*m as i64);
            let m1 = &m + rat(1);
            let m2 = rat(2) * &m + rat(1);
            let m3 = rat(3) * &m + rat(1);
            let psi1 = &m2 * &m3;
            let psi2 = &m1 * &m2 * &m2;
            let psi3 = &m1 * &m1 * &m3;

            let shift = &m3 * (rat(7) * &m + rat(4));
            let radicand = &m * &m * &m3 * &m3 + rat(8) * &psi2 * &m3;
            let denom = rat(4) * &psi1;
            let threshold =
                (rational_f64(&shift) - rational_f64(&radicand).sqrt()) / rational_f64(&denom);

            let value = if beta_le_radical_threshold(beta, &shift, &radicand, &denom) {
                rat(4) * &u * &u / &m1 * (&u * &u / &m1 + rat(1) / &m3)
            } else {
                let p = &m * &psi1 * &u + rat(3) * &psi2 - rat(2) * &psi3;
                let dn = &m2 * &psi1 * &u * &u - &m * &psi1 * &u + &psi3 - rat(2) * &psi2;
                &u * &u / (&m2 * &m2) * (rat(4) - &p * &p / (&psi3 * dn))
            };
            Ok(CorollaryBound {
                value: rational_f64(&value),
                threshold,
            })
        }
        Corollary::General1Fold {
            lambda,
            gamma,
            beta,
        } => {
            check_corollary_lambda(lambda)?;
            let u = check_corollary_beta(beta)?;
            let g1 = rat(*gamma as i64 + 1);
            let g2 = rat(*gamma as i64 + 2);
            let g3 = rat(*gamma as i64 + 3);
            let l1 = lambda + rat(1);
            let l2 = rat(2) * lambda + rat(1);
            let l3 = rat(3) * lambda + rat(1);
            let th1 = &g2 * &g2 * &g3 * &l2 * &l2 * &l3;
            let th2 = &g1 * &g2 * &g3 * &l1 * &l1 * &l2 * &l3;
            let th3 = &g1 * &g1 * &g2 * &l1 * &l1 * &l1 * &l2 * &l2;
            let th4 = &g1 * &g1 * &g3 * &l1 * &l1 * &l1 * &l1 * &l3;

            // ξ = 1 − (ϑ₂ + √(ϑ₂² + 48ϑ₁ϑ₃)) / (8ϑ₁), rewritten to the
            // (shift − √radicand)/denom shape with shift = 8ϑ₁ − ϑ₂.
            let denom = rat(8) * &th1;
            let shift = &denom - &th2;
            let radicand = &th2 * &th2 + rat(48) * &th1 * &th3;
            let threshold =
                (rational_f64(&shift) - rational_f64(&radicand).sqrt()) / rational_f64(&denom);

            let value = if beta_le_radical_threshold(beta, &shift, &radicand, &denom) {
                rat(8) * &u * &u / (&g1 * &g1 * &l1)
                    * (rat(2) * &u * &u / (&g1 * &g1 * &l1 * &l1 * &l1)
                        + rat(3) / (&g2 * &g3 * &l3))
            } else {
                let p = &th2 * &u + rat(9) * &th3 - rat(4) * &th4;
                let dn =
                    rat(4) * &th1 * &u * &u - rat(2) * &th2 * &u - rat(12) * &th3 + rat(4) * &th4;
                rat(4) * &u * &u / (&g1 * &g1 * &g2 * &g2 * &l2 * &l2)
                    * (rat(4) - &p * &p / (&th4 * dn))
            };
            Ok(CorollaryBound {
                value: rational_f64(&value),
                threshold,
            })
        }
        Corollary::Lambda1Fold { lambda, beta } => {
            check_corollary_lambda(lambda)?;
            let u = check_corollary_beta(beta)?;
            let l1 = lambda + rat(1);
            let l2 = rat(2) * lambda + rat(1);
            let l3 = rat(3) * lambda + rat(1);
            let eta1 = &l2 * &l2 * &l3;
            let eta2 = &l1 * &l1 * &l2 * &l3;
            let eta3 = &l1 * &l1 * &l1 * &l2 * &l2;
            let eta4 = &l1 * &l1 * &l1 * &l1 * &l3;

            // ε = 1 − ((λ+1)²(3λ+1) + √Q) / (16(2λ+1)(3λ+1)).
            let denom = rat(16) * &l2 * &l3;
            let p0 = &l1 * &l1 * &l3;
            let shift = &denom - &p0;
            let radicand = &p0 * &p0 + rat(32) * &l1 * &l1 * &l1 * &l2 * &l2 * &l3;
            let threshold =
                (rational_f64(&shift) - rational_f64(&radicand).sqrt()) / rational_f64(&denom);

            let value = if beta_le_radical_threshold(beta, &shift, &radicand, &denom) {
                rat(8) * &u * &u / &l1
                    * (rat(2) * &u * &u / (&l1 * &l1 * &l1) + rat(1) / (rat(2) * &l3))
            } else {
                // Second branch in the form that specialises the general
                // bound at γ = 0 and agrees with the λ = 1 base family.
                let p = &eta2 * &u + rat(3) * &eta3 - rat(2) * &eta4;
                let dn = rat(4) * &eta1 * &u * &u - &eta2 * &u - rat(2) * &eta3 + &eta4;
                &u * &u / (&l2 * &l2) * (rat(4) - &p * &p / (&eta4 * dn))
            };
            Ok(CorollaryBound {
                value: rational_f64(&value),
                threshold,
            })
        }
        Corollary::Base { beta } => {
            let u = check_corollary_beta(beta)?;
            // Threshold (11 − √37)/12.
            let shift = rat(11);
            let radicand = rat(37);
            let denom = rat(12);
            let threshold = (11.0 - 37.0_f64.sqrt()) / 12.0;
            let value = if beta_le_radical_threshold(beta, &shift, &radicand, &denom) {
                &u * &u * (&u * &u + rat(1) / rat(2))
            } else {
                &u * &u / rat(16) * (rat(60) * beta * beta - rat(84) * beta - rat(25))
                    / (rat(9) * beta * beta - rat(15) * beta + rat(1))
            };
            Ok(CorollaryBound {
                value: rational_f64(&value),
                threshold,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_rational;
    use approx::assert_relative_eq;

    fn params(m: i64, lambda: &str, gamma: i64, beta: &str) -> Params {
        Params::parse(m, lambda, gamma, beta).unwrap()
    }

    fn r(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn omega_hand_values() {
        let w = omega_set(&params(1, "1", 0, "0"));
        assert_eq!(w.to_f64(), (1728.0, 288.0, 144.0, 192.0));
        let w = omega_set(&params(2, "1", 0, "0"));
        assert_eq!(w.to_f64(), (18900.0, 3780.0, 1350.0, 1701.0));
        let w = omega_set(&params(1, "1", 1, "0"));
        assert_eq!(w.to_f64(), (5184.0, 1152.0, 864.0, 1024.0));
    }

    #[test]
    fn omega_independent_of_beta() {
        let a = omega_set(&params(2, "3/2", 1, "0"));
        let b = omega_set(&params(2, "3/2", 1, "0.9"));
        assert_eq!(a, b);
    }

    #[test]
    fn tau_closed_forms() {
        // Base family: (11 − √37)/12.
        let t = tau(&params(1, "1", 0, "0"));
        assert_relative_eq!(t, (11.0 - 37.0_f64.sqrt()) / 12.0, max_relative = 1e-14);

        // m = 2 threshold v = ((3m+1)(7m+4) − √(m²(3m+1)² + 8ψ₂(3m+1)))/(4ψ₁)
        // with ψ₁ = 35, ψ₂ = 75 at m = 2, i.e. (126 − √4396)/140.
        let t = tau(&params(2, "1", 0, "0"));
        assert_relative_eq!(t, (126.0 - 4396.0_f64.sqrt()) / 140.0, max_relative = 1e-14);

        // γ = 1 family, cross-checked against the ϑ-product threshold
        // 1 − (ϑ₂ + √(ϑ₂² + 48ϑ₁ϑ₃))/(8ϑ₁) with ϑ = (1296, 1152, 864, 1024).
        let t = tau(&params(1, "1", 1, "0"));
        let xi =
            1.0 - (1152.0 + (1152.0_f64 * 1152.0 + 48.0 * 1296.0 * 864.0).sqrt()) / (8.0 * 1296.0);
        assert_relative_eq!(t, xi, max_relative = 1e-14);
        assert_relative_eq!(t, 0.17310562629304858, max_relative = 1e-12);
    }

    #[test]
    fn tau_can_sit_below_zero() {
        // Families with large mλ and γ peak in the interior for every
        // admissible β; their threshold is negative.
        let t = tau(&params(3, "2", 2, "0"));
        assert_relative_eq!(t, -0.5273348284162735, max_relative = 1e-12);
        assert!(!params(3, "2", 2, "0").family().beta_le_tau(&r("0")));
    }

    #[test]
    fn exact_branch_test_matches_float_threshold() {
        for (m, l, g) in [(1, "1", 0), (2, "1", 0), (1, "3/2", 1), (3, "2", 2)] {
            let fam = params(m, l, g, "0").family().clone();
            let t = fam.tau();
            for k in 0..20 {
                let beta = r(&format!("{k}/20"));
                let expected = rational_f64(&beta) <= t;
                // Away from the threshold the exact and float tests agree.
                if (rational_f64(&beta) - t).abs() > 1e-9 {
                    assert_eq!(fam.beta_le_tau(&beta), expected, "m={m} l={l} g={g} k={k}");
                }
            }
        }
    }

    #[test]
    fn f_coeffs_examples() {
        let p = params(1, "1", 0, "0");
        let fc = f_coeffs(&p, 2.0).unwrap();
        assert_eq!(fc.f2, 0.0);
        assert_eq!(fc.f3, 0.0);
        assert_eq!(fc.f4, 0.0);
        assert_relative_eq!(fc.f1, 1.5, max_relative = 1e-14);

        let fc = f_coeffs(&p, 0.0).unwrap();
        assert_eq!((fc.f1, fc.f2, fc.f3), (0.0, 0.0, 0.0));
        assert_relative_eq!(fc.f4, 1.0 / 9.0, max_relative = 1e-14);

        assert!(f_coeffs(&p, -0.1).is_err());
        assert!(f_coeffs(&p, 2.1).is_err());
    }

    #[test]
    fn f_surface_examples() {
        let p = params(1, "1", 0, "0");
        let fc = f_coeffs(&p, 0.7).unwrap();
        assert_eq!(f_surface(&p, 0.7, 0.0, 0.0).unwrap(), fc.f1);
        assert_relative_eq!(
            f_surface(&p, 0.0, 1.0, 1.0).unwrap(),
            4.0 / 9.0,
            max_relative = 1e-14
        );
        assert!(f_surface(&p, 0.7, 1.2, 0.0).is_err());
        assert!(f_surface(&p, 0.7, 0.0, -0.2).is_err());
    }

    #[test]
    fn k_values_and_two_path_agreement() {
        let p = params(1, "1", 0, "0");
        assert_relative_eq!(k_of_rho(&p, 2.0).unwrap(), 1.5, max_relative = 1e-13);
        assert_relative_eq!(k_of_rho(&p, 0.0).unwrap(), 4.0 / 9.0, max_relative = 1e-13);

        // The double-entry assert inside k_of_rho runs on every call; sweep
        // a few families over the grid to exercise it broadly.
        for (m, l, g) in [(1, "1", 0), (2, "3/2", 1), (3, "2", 2)] {
            for b in ["0", "0.1", "0.5", "0.9"] {
                let p = params(m, l, g, b);
                for i in 0..=100 {
                    let rho = 2.0 * i as f64 / 100.0;
                    k_of_rho(&p, rho).unwrap();
                }
            }
        }
    }

    #[test]
    fn k_nonnegative_on_grid() {
        for b in ["0", "0.1", "0.2", "0.9"] {
            let p = params(1, "1", 0, b);
            for i in 0..=400 {
                let rho = 2.0 * i as f64 / 400.0;
                assert!(k_of_rho(&p, rho).unwrap() >= 0.0, "beta={b} rho={rho}");
            }
        }
    }

    #[test]
    fn k_prime_examples() {
        let p = params(1, "1", 0, "0");
        assert_eq!(k_prime(&p, 0.0).unwrap(), 0.0);
        for i in 1..400 {
            let rho = 2.0 * i as f64 / 400.0;
            assert!(k_prime(&p, rho).unwrap() > 0.0, "rho={rho}");
        }

        // Root of the cubic at β = 0.5 sits at ρ₂ = √(2688/816).
        let p = params(1, "1", 0, "0.5");
        let rho2 = (2688.0_f64 / 816.0).sqrt();
        assert!(k_prime(&p, rho2).unwrap().abs() <= 1e-9);
    }

    #[test]
    fn k_prime_matches_finite_differences() {
        let h = 1e-5;
        for m in [1i64, 2, 3] {
            for l in ["1", "3/2", "2"] {
                for g in [0i64, 1, 2] {
                    let p = params(m, l, g, "0.3");
                    let ctx = SurfaceCtx::for_params(&p);
                    for i in 0..=100 {
                        let rho = h + (2.0 - 2.0 * h) * i as f64 / 100.0;
                        let fd = (ctx.k_checked(rho + h) - ctx.k_checked(rho - h)) / (2.0 * h);
                        assert!(
                            (ctx.k_prime(rho) - fd).abs() <= 1e-6,
                            "m={m} l={l} g={g} rho={rho}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn rho_two_examples() {
        // β = 0.5: radicand 2688/816 after sign cancellation.
        let got = rho_two(&params(1, "1", 0, "0.5")).unwrap();
        assert_relative_eq!(got, (2688.0_f64 / 816.0).sqrt(), max_relative = 1e-13);
        assert_relative_eq!(got, 1.8149704259460603, max_relative = 1e-12);

        // β = 0.2: formula value ≈ 3.10 > 2, so no interior point.
        assert_eq!(rho_two(&params(1, "1", 0, "0.2")), None);

        // β = 0: radicand is negative, no interior point.
        assert_eq!(rho_two(&params(1, "1", 0, "0")), None);

        // β = 0.9: radicand 2227.2/1000.32.
        let got = rho_two(&params(1, "1", 0, "0.9")).unwrap();
        assert_relative_eq!(got, (2227.2_f64 / 1000.32).sqrt(), max_relative = 1e-13);
        assert_relative_eq!(got, 1.4921419248825905, max_relative = 1e-12);
    }

    #[test]
    fn k_extremes_examples() {
        let e = k_extremes(&params(1, "1", 0, "0"));
        assert_relative_eq!(e.k_at_zero, 4.0 / 9.0, max_relative = 1e-14);
        assert_relative_eq!(e.k_at_two, 1.5, max_relative = 1e-14);
        assert_eq!(e.k_at_rho2, None);

        let e = k_extremes(&params(1, "1", 0, "0.5"));
        assert_relative_eq!(e.k_at_rho2.unwrap(), 13.0 / 68.0, max_relative = 1e-14);

        // Everything collapses as β → 1.
        let e = k_extremes(&params(1, "1", 0, "0.999999"));
        assert!(e.k_at_zero < 1e-9 && e.k_at_two < 1e-9);
        assert!(e.k_at_rho2.unwrap() < 1e-9);
    }

    #[test]
    fn k_extremes_agree_with_k_of_rho() {
        for (m, l, g, b) in [
            (1, "1", 0, "0"),
            (1, "1", 0, "0.5"),
            (2, "3/2", 1, "0.7"),
            (3, "2", 2, "0.2"),
        ] {
            let p = params(m, l, g, b);
            let e = k_extremes(&p);
            assert_relative_eq!(
                e.k_at_zero,
                k_of_rho(&p, 0.0).unwrap(),
                max_relative = 1e-10
            );
            assert_relative_eq!(e.k_at_two, k_of_rho(&p, 2.0).unwrap(), max_relative = 1e-10);
            if let Some(k2) = e.k_at_rho2 {
                let rho2 = rho_two(&p).unwrap();
                assert_relative_eq!(
                    k2,
                    k_of_rho(&p, rho2.min(2.0)).unwrap(),
                    max_relative = 1e-10
                );
            }
        }
    }

    #[test]
    fn theorem_bound_examples() {
        let b = theorem_bound(&params(1, "1", 0, "0"));
        assert_relative_eq!(b.value, 1.5, max_relative = 1e-14);
        assert_eq!(b.branch, Branch::AtRhoTwo);
        assert_eq!(b.rho_star, 2.0);
        assert_relative_eq!(b.tau, 0.40976978914181503, max_relative = 1e-12);

        let b = theorem_bound(&params(1, "1", 0, "0.5"));
        assert_relative_eq!(b.value, 13.0 / 68.0, max_relative = 1e-14);
        assert_eq!(b.branch, Branch::AtRhoStar);
        assert_relative_eq!(b.rho_star, 1.8149704259460603, max_relative = 1e-12);

        let b = theorem_bound(&params(1, "1", 0, "0.9"));
        assert_relative_eq!(b.value, 0.006238003838771593, max_relative = 1e-12);
    }

    #[test]
    fn branch_formulas_agree_at_tau() {
        let fam = params(1, "1", 0, "0").family().clone();
        let t = BigRational::from_float(fam.tau()).unwrap();
        let b1 = fam.k_at_two(&t);
        let b2 = fam.k_at_rho_two(&t).unwrap();
        assert_relative_eq!(b1, b2, max_relative = 1e-9);
        assert_relative_eq!(b1, 0.2955486935266335, max_relative = 1e-10);
        assert_relative_eq!(fam.rho_two(&t).unwrap(), 2.0, epsilon = 1e-8);
    }

    #[test]
    fn bound_is_max_of_extremes() {
        for m in [1i64, 2, 3] {
            for l in ["1", "3/2", "2"] {
                for g in [0i64, 1, 2] {
                    for b in ["0", "0.2", "0.5", "0.9"] {
                        let p = params(m, l, g, b);
                        let bound = theorem_bound(&p);
                        let e = k_extremes(&p);
                        let max = e
                            .k_at_zero
                            .max(e.k_at_two)
                            .max(e.k_at_rho2.unwrap_or(f64::NEG_INFINITY));
                        assert_relative_eq!(bound.value, max, max_relative = 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn rho_two_presence_matches_branch() {
        // The interior critical point exists exactly above the threshold.
        for m in [1i64, 2, 3] {
            for l in ["1", "3/2", "2"] {
                for g in [0i64, 1, 2] {
                    for b in ["0", "0.2", "0.5", "0.9"] {
                        let p = params(m, l, g, b);
                        let endpoint_branch = p.family().beta_le_tau(p.beta());
                        assert_eq!(
                            rho_two(&p).is_none(),
                            endpoint_branch,
                            "m={m} l={l} g={g} b={b}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn corollary_base_examples() {
        let c = corollary_bound(&Corollary::Base { beta: r("0") }).unwrap();
        assert_relative_eq!(c.value, 1.5, max_relative = 1e-14);
        assert_relative_eq!(
            c.threshold,
            (11.0 - 37.0_f64.sqrt()) / 12.0,
            max_relative = 1e-14
        );

        let c = corollary_bound(&Corollary::Base { beta: r("0.5") }).unwrap();
        assert_relative_eq!(c.value, 13.0 / 68.0, max_relative = 1e-14);
    }

    #[test]
    fn corollary_mfold_matches_theorem() {
        let c = corollary_bound(&Corollary::MFold {
            m: 2,
            beta: r("0.1"),
        })
        .unwrap();
        let t = theorem_bound(&params(2, "1", 0, "0.1"));
        assert_relative_eq!(c.value, t.value, max_relative = 1e-10);
        assert_relative_eq!(c.threshold, t.tau, max_relative = 1e-12);
        assert_relative_eq!(c.threshold, 0.4264118727356921, max_relative = 1e-12);
    }

    #[test]
    fn corollary_rejects_out_of_range() {
        assert!(corollary_bound(&Corollary::Base { beta: r("1") }).is_err());
        assert!(corollary_bound(&Corollary::MFold { m: 0, beta: r("0") }).is_err());
        assert!(corollary_bound(&Corollary::Lambda1Fold {
            lambda: r("0.5"),
            beta: r("0")
        })
        .is_err());
        assert!(corollary_bound(&Corollary::General1Fold {
            lambda: r("1"),
            gamma: 0,
            beta: r("-0.1")
        })
        .is_err());
    }

    #[test]
    fn specialization_tower_on_beta_grid() {
        // Each corollary is an independent evaluation path; agreement with
        // the piecewise bound on a β grid is the cross-check.
        for k in 0..20 {
            let beta = r(&format!("{k}/20"));
            let bs = beta.to_string();

            for m in [1i64, 2, 3] {
                let c = corollary_bound(&Corollary::MFold {
                    m: m as u32,
                    beta: beta.clone(),
                })
                .unwrap();
                let t = theorem_bound(&params(m, "1", 0, &bs));
                assert_relative_eq!(c.value, t.value, max_relative = 1e-10);
            }
            for l in ["1", "3/2", "2"] {
                for g in [0i64, 1, 2] {
                    let c = corollary_bound(&Corollary::General1Fold {
                        lambda: r(l),
                        gamma: g as u32,
                        beta: beta.clone(),
                    })
                    .unwrap();
                    let t = theorem_bound(&params(1, l, g, &bs));
                    assert_relative_eq!(c.value, t.value, max_relative = 1e-10, epsilon = 1e-300);
                }
                let c = corollary_bound(&Corollary::Lambda1Fold {
                    lambda: r(l),
                    beta: beta.clone(),
                })
                .unwrap();
                let t = theorem_bound(&params(1, l, 0, &bs));
                assert_relative_eq!(c.value, t.value, max_relative = 1e-10);
            }
            let c = corollary_bound(&Corollary::Base { beta: beta.clone() }).unwrap();
            let t = theorem_bound(&params(1, "1", 0, &bs));
            assert_relative_eq!(c.value, t.value, max_relative = 1e-10);
        }
    }

    #[test]
    fn corollary_thresholds_match_tau() {
        // v, ξ and ε are the specialised forms of τ.
        for (m, l, g, kind) in [
            (2, "1", 0, Corollary::MFold { m: 2, beta: r("0") }),
            (
                1,
                "3/2",
                1,
                Corollary::General1Fold {
                    lambda: r("3/2"),
                    gamma: 1,
                    beta: r("0"),
                },
            ),
            (
                1,
                "3/2",
                0,
                Corollary::Lambda1Fold {
                    lambda: r("3/2"),
                    beta: r("0"),
                },
            ),
            (1, "1", 0, Corollary::Base { beta: r("0") }),
        ] {
            let c = corollary_bound(&kind).unwrap();
            let t = tau(&params(m, l, g, "0"));
            assert_relative_eq!(c.threshold, t, max_relative = 1e-12);
        }
        // ε(3/2) frozen value.
        let c = corollary_bound(&Corollary::Lambda1Fold {
            lambda: r("3/2"),
            beta: r("0"),
        })
        .unwrap();
        assert_relative_eq!(c.threshold, 0.2984808686041496, max_relative = 1e-12);
    }
}
