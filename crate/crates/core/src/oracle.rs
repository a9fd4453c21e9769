//! Independent verification of the closed-form bound.
//!
//! Nothing in this module trusts the piecewise formulas it checks. The
//! brute-force search maximises the surrogate surface numerically over its
//! whole box; the Monte Carlo driver samples admissible coefficient tuples
//! through the Carathéodory representation and compares the resulting
//! functional against the bound; the lemma checks exercise the coefficient
//! representation the sampling is built on.
//!
//! All comparisons carry a 1e-9 relative slack so that genuine
//! counterexamples are separated from floating-point noise. Grid evaluation
//! and sampling fan out across the rayon thread pool; results are merged in
//! a fixed order, so identical inputs produce identical reports at any
//! thread count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bound::{theorem_bound, SurfaceCtx};
use crate::error::Error;
use crate::model::{rat, Params};
use crate::series::CoefficientTriple;

/// Relative slack on all ≤ comparisons; separates counterexamples from
/// floating-point noise.
const ORACLE_SLACK: f64 = 1e-9;

/// Relative agreement demanded of the two functional evaluation routes.
const FUNCTIONAL_TOL: f64 = 1e-10;

/// Samples per Monte Carlo work unit. Substreams are keyed by chunk index,
/// not by thread, so reports do not depend on the worker count.
const MC_CHUNK: u64 = 8192;

/// Absolute slack for the nonstrict sign checks; exact zeros at the grid
/// endpoints must survive rounding.
const SIGN_SLACK: f64 = 1e-12;

/// A point of the coefficient representation: `ρ = p_m` taken real and
/// nonnegative, and the four disk parameters generating the higher
/// coefficients of the pair of positive-real-part functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaratheodorySample {
    rho: f64,
    x: Complex64,
    y: Complex64,
    z: Complex64,
    w: Complex64,
}

impl CaratheodorySample {
    /// Validates `0 ≤ ρ ≤ 2` and `|x|, |y|, |z|, |w| ≤ 1`.
    pub fn new(
        rho: f64,
        x: Complex64,
        y: Complex64,
        z: Complex64,
        w: Complex64,
    ) -> Result<Self, Error> {
        if !(0.0..=2.0).contains(&rho) {
            return Err(Error::range("rho", format!("{rho} outside [0, 2]")));
        }
        for (name, v) in [("x", x), ("y", y), ("z", z), ("w", w)] {
            if v.norm_sqr() > 1.0 + ORACLE_SLACK {
                return Err(Error::range(name, format!("|{v}| exceeds 1")));
            }
        }
        Ok(CaratheodorySample { rho, x, y, z, w })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn x(&self) -> Complex64 {
        self.x
    }
    pub fn y(&self) -> Complex64 {
        self.y
    }
    pub fn z(&self) -> Complex64 {
        self.z
    }
    pub fn w(&self) -> Complex64 {
        self.w
    }
}

/// Coefficient combinations reconstructed from a sample: the two
/// differences and the sum entering the functional, plus the individual
/// coefficients of both representation functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PQDifferences {
    pub p2m_minus_q2m: Complex64,
    pub p3m_minus_q3m: Complex64,
    pub p2m_plus_q2m: Complex64,
    pub p2m: Complex64,
    pub q2m: Complex64,
    pub p3m: Complex64,
    pub q3m: Complex64,
}

/// Outcome of the brute-force box search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchResult {
    pub max_value: f64,
    pub arg_rho: f64,
    pub arg_mu1: f64,
    pub arg_mu2: f64,
    /// Whether local golden-section refinement ran after the grid pass.
    pub refined: bool,
}

/// Outcome of a Monte Carlo verification run. A correct implementation
/// reports `violations = 0` and `worst_ratio ≤ 1` (up to the 1e-9 slack).
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub params: Params,
    pub bound: f64,
    pub observed_max: f64,
    pub violations: u64,
    pub worst_ratio: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Reconstructs the coefficient combinations of both representation
/// functions from a sample, with `q_m = −p_m = −ρ`:
///
/// ```text
/// p_{2m} − q_{2m} = (4−ρ²)/2 · (x − y)
/// p_{2m} + q_{2m} = ρ² + (4−ρ²)/2 · (x + y)
/// p_{3m} − q_{3m} = ρ³/2 + ρ(4−ρ²)/2·(x+y) − ρ(4−ρ²)/4·(x²+y²)
///                   + (4−ρ²)/2·[(1−|x|²)z − (1−|y|²)w]
/// ```
///
/// `p_{2m}` and `q_{2m}` come from recombining the displayed sum and
/// difference; `p_{3m}` and `q_{3m}` are built individually from the
/// third-coefficient representation applied to each function.
pub fn reconstruct_pq(s: &CaratheodorySample) -> PQDifferences {
    let rho = s.rho;
    let r2 = rho * rho;
    let gap = 4.0 - r2;
    let half_gap = 0.5 * gap;
    let sum_xy = s.x + s.y;

    let d2 = (s.x - s.y) * half_gap;
    let s2 = sum_xy * half_gap + r2;
    let d3 = Complex64::new(0.5 * rho * r2, 0.0) + sum_xy * (rho * half_gap)
        - (s.x * s.x + s.y * s.y) * (0.25 * rho * gap)
        + (s.z * (1.0 - s.x.norm_sqr()) - s.w * (1.0 - s.y.norm_sqr())) * half_gap;

    let p3m = (Complex64::new(rho * r2, 0.0) + s.x * (2.0 * gap * rho) - s.x * s.x * (rho * gap)
        + s.z * (2.0 * gap * (1.0 - s.x.norm_sqr())))
        * 0.25;
    let q3m = (Complex64::new(-rho * r2, 0.0) - s.y * (2.0 * gap * rho)
        + s.y * s.y * (rho * gap)
        + s.w * (2.0 * gap * (1.0 - s.y.norm_sqr())))
        * 0.25;

    PQDifferences {
        p2m_minus_q2m: d2,
        p3m_minus_q3m: d3,
        p2m_plus_q2m: s2,
        p2m: (s2 + d2) * 0.5,
        q2m: (s2 - d2) * 0.5,
        p3m,
        q3m,
    }
}

/// Per-parameter prefactors for the coefficient reconstruction and the
/// two functional routes, baked from exact rationals once.
#[derive(Debug, Clone, Copy)]
struct SampleEval {
    c_a1: f64,
    c_a2_p2: f64,
    c_a2_d: f64,
    c_a3_pd: f64,
    c_a3_d3: f64,
    t1: f64,
    t2: f64,
    t3: f64,
    t4: f64,
}

impl SampleEval {
    fn new(p: &Params) -> Self {
        let m = rat(p.m() as i64);
        let m1 = &m + rat(1);
        let u = p.one_minus_beta();
        let g1 = rat(p.gamma() as i64 + 1);
        let g2 = rat(p.gamma() as i64 + 2);
        let g3 = rat(p.gamma() as i64 + 3);
        let ml = &m * p.lambda();
        let ml1 = &ml + rat(1);
        let ml2 = &ml * rat(2) + rat(1);
        let ml3 = &ml * rat(3) + rat(1);
        let u2 = &u * &u;

        let f =
            |r: &num_rational::BigRational| num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN);
        SampleEval {
            c_a1: f(&(&u / (&g1 * &ml1))),
            c_a2_p2: f(&(&m1 * &u2 / (rat(2) * &g1 * &g1 * &ml1 * &ml1))),
            c_a2_d: f(&(&u / (&g1 * &g2 * &ml2))),
            c_a3_pd: f(&((rat(3) * &m + rat(2)) * &u2 / (rat(2) * &g1 * &g1 * &g2 * &ml1 * &ml2))),
            c_a3_d3: f(&(rat(3) * &u / (&g1 * &g2 * &g3 * &ml3))),
            t1: f(&(&m1 * &m1 * &u2 * &u2
                / (rat(4) * &g1 * &g1 * &g1 * &g1 * &ml1 * &ml1 * &ml1 * &ml1))),
            t2: f(&(&m * &u2 * &u / (rat(2) * &g1 * &g1 * &g1 * &g2 * &ml1 * &ml1 * &ml2))),
            t3: f(&(rat(3) * &u2 / (&g1 * &g1 * &g2 * &g3 * &ml1 * &ml3))),
            t4: f(&(&u2 / (&g1 * &g1 * &g2 * &g2 * &ml2 * &ml2))),
        }
    }

    fn coefficients(&self, s: &CaratheodorySample) -> CoefficientTriple<Complex64> {
        let pq = reconstruct_pq(s);
        let rho = s.rho;
        let r2 = rho * rho;
        CoefficientTriple {
            a_m1: Complex64::new(self.c_a1 * rho, 0.0),
            a_2m1: Complex64::new(self.c_a2_p2 * r2, 0.0) + pq.p2m_minus_q2m * self.c_a2_d,
            a_3m1: pq.p2m_minus_q2m * (self.c_a3_pd * rho) + pq.p3m_minus_q3m * self.c_a3_d3,
        }
    }

    /// `|a_{m+1} a_{3m+1} − a_{2m+1}²|` along both routes: direct from the
    /// coefficient triple and via the four-term representation display.
    /// Returns `(direct, display, term_scale)`.
    fn functional_two_ways(&self, s: &CaratheodorySample) -> (f64, f64, f64) {
        let triple = self.coefficients(s);
        let direct = (triple.a_m1 * triple.a_3m1 - triple.a_2m1 * triple.a_2m1).norm();

        let pq = reconstruct_pq(s);
        let rho = s.rho;
        let r2 = rho * rho;
        let term1 = Complex64::new(-self.t1 * r2 * r2, 0.0);
        let term2 = pq.p2m_minus_q2m * (self.t2 * r2);
        let term3 = pq.p3m_minus_q3m * (self.t3 * rho);
        let term4 = -(pq.p2m_minus_q2m * pq.p2m_minus_q2m) * self.t4;
        let display = (term1 + term2 + term3 + term4).norm();
        let scale = term1.norm() + term2.norm() + term3.norm() + term4.norm();
        (direct, display, scale)
    }
}

/// Coefficients `(a_{m+1}, a_{2m+1}, a_{3m+1})` generated by a sample:
///
/// ```text
/// a_{m+1}  = (1−β) ρ / ((γ+1)(mλ+1))
/// a_{2m+1} = (m+1)(1−β)² ρ² / (2(γ+1)²(mλ+1)²)
///            + (1−β)(p_{2m}−q_{2m}) / ((γ+1)(γ+2)(2mλ+1))
/// a_{3m+1} = (3m+2)(1−β)² ρ(p_{2m}−q_{2m}) / (2(γ+1)²(γ+2)(mλ+1)(2mλ+1))
///            + 3(1−β)(p_{3m}−q_{3m}) / ((γ+1)(γ+2)(γ+3)(3mλ+1))
/// ```
pub fn coefficients_from_sample(
    p: &Params,
    s: &CaratheodorySample,
) -> CoefficientTriple<Complex64> {
    SampleEval::new(p).coefficients(s)
}

/// `|a_{m+1} a_{3m+1} − a_{2m+1}²|` for the sample, computed two ways —
/// directly from [`coefficients_from_sample`] and through the four-term
/// representation display — and checked for agreement. The tolerance is
/// relative to the term magnitudes, so heavily cancelling samples do not
/// trip it spuriously.
pub fn hankel_functional(p: &Params, s: &CaratheodorySample) -> Result<f64, Error> {
    SampleEval::new(p).functional(s)
}

impl SampleEval {
    fn functional(&self, s: &CaratheodorySample) -> Result<f64, Error> {
        let (direct, display, scale) = self.functional_two_ways(s);
        let tol = FUNCTIONAL_TOL * direct.max(display).max(scale);
        if (direct - display).abs() > tol {
            return Err(Error::Inconsistent {
                context: "hankel functional evaluation routes",
                left: direct,
                right: display,
            });
        }
        Ok(direct)
    }
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
///
/// Returns `(x_max, f_max)`.
fn golden_section_maximize(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_iters: usize,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;

    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);

    let mut iters = 0;
    while (b - a).abs() > tol && iters < max_iters {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        iters += 1;
    }

    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Exhaustive grid maximisation of the surrogate surface over
/// `[0,2] × [0,1]²`, optionally followed by coordinate-wise golden-section
/// refinement around the best grid point (at most 100 iterations per
/// coordinate, argument tolerance 1e-10).
///
/// The result never falls below any examined grid value. Rows of the ρ-grid
/// are evaluated in parallel and merged by a total order (value, then
/// lowest index), so the outcome is independent of the thread count.
pub fn brute_force_max(
    p: &Params,
    rho_steps: usize,
    mu_steps: usize,
    refine: bool,
) -> SearchResult {
    assert!(
        rho_steps >= 3 && mu_steps >= 3,
        "grids need at least 3 steps"
    );
    let ctx = SurfaceCtx::for_params(p);
    let mus: Vec<f64> = (0..mu_steps)
        .map(|i| i as f64 / (mu_steps - 1) as f64)
        .collect();

    struct Best {
        value: f64,
        idx: (usize, usize, usize),
    }

    let best = (0..rho_steps)
        .into_par_iter()
        .map(|i| {
            let rho = 2.0 * i as f64 / (rho_steps - 1) as f64;
            let fc = ctx.f_coeffs(rho);
            let mut value = f64::NEG_INFINITY;
            let mut idx = (i, 0, 0);
            for (j, &mu1) in mus.iter().enumerate() {
                for (k, &mu2) in mus.iter().enumerate() {
                    let v = fc.surface(mu1, mu2);
                    if v > value {
                        value = v;
                        idx = (i, j, k);
                    }
                }
            }
            Best { value, idx }
        })
        .max_by(|a, b| {
            a.value
                .partial_cmp(&b.value)
                .unwrap()
                .then_with(|| b.idx.cmp(&a.idx))
        })
        .expect("at least one grid row");

    let h_rho = 2.0 / (rho_steps - 1) as f64;
    let h_mu = 1.0 / (mu_steps - 1) as f64;
    let mut arg_rho = 2.0 * best.idx.0 as f64 / (rho_steps - 1) as f64;
    let mut arg_mu1 = mus[best.idx.1];
    let mut arg_mu2 = mus[best.idx.2];
    let mut max_value = best.value;

    if refine {
        let surface = |r: f64, m1: f64, m2: f64| ctx.f_coeffs(r).surface(m1, m2);
        for _ in 0..16 {
            let before = (arg_rho, arg_mu1, arg_mu2);
            let (r, v) = golden_section_maximize(
                |r| surface(r, arg_mu1, arg_mu2),
                (arg_rho - h_rho).max(0.0),
                (arg_rho + h_rho).min(2.0),
                1e-10,
                100,
            );
            if v > max_value {
                max_value = v;
                arg_rho = r;
            }
            let (m1, v) = golden_section_maximize(
                |m| surface(arg_rho, m, arg_mu2),
                (arg_mu1 - h_mu).max(0.0),
                (arg_mu1 + h_mu).min(1.0),
                1e-10,
                100,
            );
            if v > max_value {
                max_value = v;
                arg_mu1 = m1;
            }
            let (m2, v) = golden_section_maximize(
                |m| surface(arg_rho, arg_mu1, m),
                (arg_mu2 - h_mu).max(0.0),
                (arg_mu2 + h_mu).min(1.0),
                1e-10,
                100,
            );
            if v > max_value {
                max_value = v;
                arg_mu2 = m2;
            }
            let moved = (arg_rho - before.0)
                .abs()
                .max((arg_mu1 - before.1).abs())
                .max((arg_mu2 - before.2).abs());
            if moved < 1e-10 {
                break;
            }
        }
    }

    SearchResult {
        max_value,
        arg_rho,
        arg_mu1,
        arg_mu2,
        refined: refine,
    }
}

struct ChunkStats {
    violations: u64,
    worst_ratio: f64,
    observed_max: f64,
}

/// Draws `n` seeded samples (ρ uniform on [0,2]; x, y, z, w uniform on the
/// closed unit disk via square-root radius sampling) and counts samples
/// whose functional exceeds the bound beyond the 1e-9 slack.
///
/// Substreams are derived from `(seed, chunk index)`, so identical
/// `(params, n, seed)` produce an identical report at any thread count.
pub fn monte_carlo_verify(p: &Params, n: u64, seed: u64) -> Result<VerifyReport, Error> {
    assert!(n >= 1, "need at least one sample");
    let bound = theorem_bound(p).value;
    let eval = SampleEval::new(p);

    let chunks = n.div_ceil(MC_CHUNK);
    let stats: Vec<Result<ChunkStats, Error>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = MC_CHUNK.min(n - c * MC_CHUNK);
            let mut s = ChunkStats {
                violations: 0,
                worst_ratio: 0.0,
                observed_max: 0.0,
            };
            for _ in 0..count {
                let rho = 2.0 * rng.gen::<f64>();
                let mut disk = || {
                    let r = rng.gen::<f64>().sqrt();
                    let theta = std::f64::consts::TAU * rng.gen::<f64>();
                    Complex64::from_polar(r, theta)
                };
                let (x, y, z, w) = (disk(), disk(), disk(), disk());
                let sample = CaratheodorySample { rho, x, y, z, w };
                let value = eval.functional(&sample)?;
                if value > bound * (1.0 + ORACLE_SLACK) {
                    s.violations += 1;
                }
                s.worst_ratio = s.worst_ratio.max(value / bound);
                s.observed_max = s.observed_max.max(value);
            }
            Ok(s)
        })
        .collect();

    let mut report = VerifyReport {
        params: p.clone(),
        bound,
        observed_max: 0.0,
        violations: 0,
        worst_ratio: 0.0,
        samples: n,
        seed,
    };
    for s in stats {
        let s = s?;
        report.violations += s.violations;
        report.worst_ratio = report.worst_ratio.max(s.worst_ratio);
        report.observed_max = report.observed_max.max(s.observed_max);
    }
    Ok(report)
}

/// One sign invariant of the F-coefficients, with the first failing grid
/// point when the check did not hold.
#[derive(Debug, Clone, PartialEq)]
pub struct SignCheck {
    pub name: &'static str,
    pub passed: bool,
    pub first_failure: Option<(f64, f64)>,
}

/// Outcome of [`sign_invariant_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct SignReport {
    pub checks: Vec<SignCheck>,
}

impl SignReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Evaluates the sign suite of the F-coefficients on a ρ grid:
/// `F₁, F₂, F₄ ≥ 0` and `F₃ ≤ 0` everywhere; `F₃ + 2F₄ > 0` and
/// `4F₃(F₃+2F₄) < 0` on interior points; `F₂ + 2(F₃+F₄) ≥ 0` and
/// `K(ρ) ≥ 0` everywhere. Strict inequalities hold only on the open
/// interval, so the two endpoint grid points are excluded from them.
pub fn sign_invariant_check(p: &Params, rho_steps: usize) -> SignReport {
    assert!(rho_steps >= 3, "grid needs at least 3 steps");
    let ctx = SurfaceCtx::for_params(p);

    // Each check reports a margin that must stay nonnegative (or strictly
    // positive for the open-interval checks). Nonstrict margins carry the
    // absolute slack so that exact zeros survive rounding.
    type Margin = fn(&crate::bound::FCoeffs) -> f64;
    let checks: [(&'static str, bool, Margin); 8] = [
        ("F1 >= 0", false, |fc| fc.f1 + SIGN_SLACK),
        ("F2 >= 0", false, |fc| fc.f2 + SIGN_SLACK),
        ("F3 <= 0", false, |fc| SIGN_SLACK - fc.f3),
        ("F4 >= 0", false, |fc| fc.f4 + SIGN_SLACK),
        ("F3 + 2 F4 > 0 (interior)", true, |fc| fc.f3 + 2.0 * fc.f4),
        ("4 F3 (F3 + 2 F4) < 0 (interior)", true, |fc| {
            -(4.0 * fc.f3 * (fc.f3 + 2.0 * fc.f4))
        }),
        ("F2 + 2 (F3 + F4) >= 0", false, |fc| {
            fc.f2 + 2.0 * (fc.f3 + fc.f4) + SIGN_SLACK
        }),
        ("K >= 0", false, |fc| fc.k_value() + SIGN_SLACK),
    ];

    let mut report = SignReport {
        checks: checks
            .iter()
            .map(|(name, _, _)| SignCheck {
                name,
                passed: true,
                first_failure: None,
            })
            .collect(),
    };

    for i in 0..rho_steps {
        let rho = 2.0 * i as f64 / (rho_steps - 1) as f64;
        let interior = i > 0 && i + 1 < rho_steps;
        let fc = ctx.f_coeffs(rho);
        for (idx, (_, strict, margin)) in checks.iter().enumerate() {
            if *strict && !interior {
                continue;
            }
            let m = margin(&fc);
            let ok = if *strict { m > 0.0 } else { m >= 0.0 };
            if !ok && report.checks[idx].passed {
                report.checks[idx].passed = false;
                report.checks[idx].first_failure = Some((rho, m));
            }
        }
    }
    report
}

/// Outcome of [`lemma_identity_check`].
///
/// `remainder_in_budget` asserts `|h₂ − h₁²/2| ≤ 2 − |h₁|²/2`.
/// `alt_remainder_in_budget` evaluates the variant right-hand side
/// `2 − |h₂|²/2`; it fails on admissible inputs (`h₁ = 0, x = 1` gives
/// `2 ≤ 0`) and is reported for diagnosis only, never asserted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaReport {
    pub h1: f64,
    pub h2: Complex64,
    pub h3: Complex64,
    pub h2_in_disk: bool,
    pub h3_in_disk: bool,
    pub remainder_in_budget: bool,
    pub alt_remainder_in_budget: bool,
}

impl LemmaReport {
    /// All asserted checks (everything except the diagnostic variant).
    pub fn passed(&self) -> bool {
        self.h2_in_disk && self.h3_in_disk && self.remainder_in_budget
    }
}

/// Builds the second and third coefficients of a positive-real-part
/// function from its representation parameters,
///
/// ```text
/// 2 h₂ = h₁² + x (4 − h₁²)
/// 4 h₃ = h₁³ + 2(4−h₁²) h₁ x − h₁ (4−h₁²) x² + 2(4−h₁²)(1−|x|²) z,
/// ```
///
/// and verifies the coefficient bounds `|h₂| ≤ 2`, `|h₃| ≤ 2` and
/// `|h₂ − h₁²/2| ≤ 2 − |h₁|²/2`. Failures are reported, not thrown.
pub fn lemma_identity_check(h1: f64, x: Complex64, z: Complex64) -> LemmaReport {
    let h1sq = h1 * h1;
    let gap = 4.0 - h1sq;
    let h2 = (x * gap + h1sq) * 0.5;
    let h3 = (Complex64::new(h1 * h1sq, 0.0) + x * (2.0 * gap * h1) - x * x * (h1 * gap)
        + z * (2.0 * gap * (1.0 - x.norm_sqr())))
        * 0.25;

    let le = |lhs: f64, rhs: f64| lhs <= rhs + ORACLE_SLACK * (1.0 + lhs.abs().max(rhs.abs()));
    let remainder = (h2 - h1sq * 0.5).norm();
    LemmaReport {
        h1,
        h2,
        h3,
        h2_in_disk: le(h2.norm(), 2.0),
        h3_in_disk: le(h3.norm(), 2.0),
        remainder_in_budget: le(remainder, 2.0 - 0.5 * h1sq),
        alt_remainder_in_budget: le(remainder, 2.0 - 0.5 * h2.norm_sqr()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::{f_surface, k_extremes};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(m: i64, lambda: &str, gamma: i64, beta: &str) -> Params {
        Params::parse(m, lambda, gamma, beta).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample(
        rho: f64,
        x: Complex64,
        y: Complex64,
        z: Complex64,
        w: Complex64,
    ) -> CaratheodorySample {
        CaratheodorySample::new(rho, x, y, z, w).unwrap()
    }

    #[test]
    fn sample_validation() {
        assert!(
            CaratheodorySample::new(2.1, c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))
                .is_err()
        );
        assert!(
            CaratheodorySample::new(1.0, c(1.1, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))
                .is_err()
        );
    }

    #[test]
    fn reconstruct_at_rho_two() {
        let s = sample(2.0, c(0.4, 0.3), c(-0.2, 0.1), c(0.9, 0.0), c(0.0, -0.8));
        let pq = reconstruct_pq(&s);
        assert_eq!(pq.p2m_minus_q2m, c(0.0, 0.0));
        assert_eq!(pq.p3m_minus_q3m, c(4.0, 0.0));
        assert_eq!(pq.p2m_plus_q2m, c(4.0, 0.0));
    }

    #[test]
    fn reconstruct_opposed_unit_points() {
        let s = sample(0.0, c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let pq = reconstruct_pq(&s);
        assert_eq!(pq.p2m_minus_q2m, c(4.0, 0.0));
        assert_eq!(pq.p3m_minus_q3m, c(0.0, 0.0));
        assert_eq!(pq.p2m_plus_q2m, c(0.0, 0.0));
    }

    #[test]
    fn reconstruct_zero_sample() {
        let s = sample(0.0, c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let pq = reconstruct_pq(&s);
        assert_eq!(pq.p2m_minus_q2m, c(0.0, 0.0));
        assert_eq!(pq.p3m_minus_q3m, c(0.0, 0.0));
        assert_eq!(pq.p2m_plus_q2m, c(0.0, 0.0));
        assert_eq!(pq.p2m, c(0.0, 0.0));
        assert_eq!(pq.p3m, c(0.0, 0.0));
    }

    #[test]
    fn coefficients_examples() {
        let p = params(1, "1", 0, "0");
        let t = coefficients_from_sample(
            &p,
            &sample(2.0, c(0.3, 0.1), c(-0.5, 0.2), c(0.1, 0.0), c(0.0, 0.0)),
        );
        assert_relative_eq!(t.a_m1.re, 1.0, max_relative = 1e-14);
        assert_relative_eq!(t.a_2m1.re, 1.0, max_relative = 1e-14);
        assert_relative_eq!(t.a_3m1.re, 0.5, max_relative = 1e-14);
        assert_eq!((t.a_m1.im, t.a_2m1.im, t.a_3m1.im), (0.0, 0.0, 0.0));

        let t = coefficients_from_sample(
            &p,
            &sample(0.0, c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)),
        );
        assert_eq!(t.a_m1, c(0.0, 0.0));
        assert_relative_eq!(t.a_2m1.re, 2.0 / 3.0, max_relative = 1e-14);
        assert_eq!(t.a_3m1, c(0.0, 0.0));

        let t = coefficients_from_sample(
            &p,
            &sample(0.0, c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)),
        );
        assert_eq!(
            (t.a_m1, t.a_2m1, t.a_3m1),
            (c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))
        );
    }

    #[test]
    fn functional_examples() {
        let p = params(1, "1", 0, "0");
        let v = hankel_functional(
            &p,
            &sample(2.0, c(0.3, 0.0), c(0.0, 0.4), c(0.0, 0.0), c(0.5, 0.0)),
        )
        .unwrap();
        assert_relative_eq!(v, 0.5, max_relative = 1e-12);
        assert!(v <= 1.5);

        let v = hankel_functional(
            &p,
            &sample(0.0, c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)),
        )
        .unwrap();
        assert_relative_eq!(v, 4.0 / 9.0, max_relative = 1e-12);
        assert_relative_eq!(v, k_extremes(&p).k_at_zero, max_relative = 1e-12);

        let v = hankel_functional(
            &p,
            &sample(0.0, c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)),
        )
        .unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn brute_force_finds_the_endpoint_peak() {
        let p = params(1, "1", 0, "0");
        let r = brute_force_max(&p, 201, 51, true);
        assert_relative_eq!(r.max_value, 1.5, max_relative = 1e-6);
        assert_relative_eq!(r.arg_rho, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn brute_force_finds_the_interior_peak() {
        let p = params(1, "1", 0, "0.5");
        let r = brute_force_max(&p, 201, 51, true);
        assert_relative_eq!(r.max_value, 13.0 / 68.0, max_relative = 1e-6);
        assert_relative_eq!(r.arg_rho, 1.8149704259460603, epsilon = 1e-4);
        assert_relative_eq!(r.arg_mu1, 1.0, epsilon = 1e-9);
        assert_relative_eq!(r.arg_mu2, 1.0, epsilon = 1e-9);

        let p = params(1, "1", 0, "0.9");
        let r = brute_force_max(&p, 201, 51, true);
        assert_relative_eq!(r.max_value, 0.006238003838771593, max_relative = 1e-6);
        assert_relative_eq!(r.arg_rho, 1.4921419248825905, epsilon = 1e-4);
    }

    #[test]
    fn bound_dominates_whole_surface() {
        for (m, l, g, b) in [(1, "1", 0, "0"), (2, "3/2", 1, "0.5"), (3, "2", 2, "0.9")] {
            let p = params(m, l, g, b);
            let bound = crate::bound::theorem_bound(&p).value;
            let search = brute_force_max(&p, 201, 51, true);
            assert!(
                search.max_value <= bound * (1.0 + 1e-9),
                "m={m} l={l} g={g} b={b}: {} vs {bound}",
                search.max_value
            );
        }
    }

    #[test]
    fn brute_force_deterministic() {
        let p = params(2, "3/2", 1, "0.3");
        let a = brute_force_max(&p, 101, 21, true);
        let b = brute_force_max(&p, 101, 21, true);
        assert_eq!(a, b);
    }

    #[test]
    fn monte_carlo_no_violations_and_deterministic() {
        let p = params(1, "1", 0, "0");
        let r = monte_carlo_verify(&p, 20_000, 42).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.worst_ratio <= 1.0);
        assert!(r.observed_max <= r.bound);
        assert_eq!(r.samples, 20_000);

        let again = monte_carlo_verify(&p, 20_000, 42).unwrap();
        assert_eq!(r, again);

        let p = params(2, "2", 1, "0.7");
        let r = monte_carlo_verify(&p, 10_000, 7).unwrap();
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn sign_suite_passes_for_figure_configs() {
        for b in ["0", "0.1", "0.2", "0.9"] {
            let report = sign_invariant_check(&params(1, "1", 0, b), 401);
            assert!(report.all_passed(), "beta = {b}: {report:?}");
        }
    }

    #[test]
    fn sign_suite_endpoint_is_excluded_from_strict_checks() {
        // At ρ = 2 every gap factor vanishes: F3 + 2 F4 = 0 there, which is
        // why the strict checks run on interior points only.
        let p = params(1, "1", 0, "0");
        let fc = crate::bound::f_coeffs(&p, 2.0).unwrap();
        assert_eq!(fc.f3 + 2.0 * fc.f4, 0.0);
        assert!(sign_invariant_check(&p, 401).all_passed());
    }

    #[test]
    fn lemma_examples() {
        // h₁ = 2 pins h₂ = h₃ = 2 regardless of x, z.
        let r = lemma_identity_check(2.0, c(0.3, -0.4), c(0.2, 0.9));
        assert_eq!(r.h2, c(2.0, 0.0));
        assert_eq!(r.h3, c(2.0, 0.0));
        assert!(r.passed());

        // Boundary case |h₂ − 0| = 2 ≤ 2 − 0.
        let r = lemma_identity_check(0.0, c(1.0, 0.0), c(0.0, 0.0));
        assert_eq!(r.h2, c(2.0, 0.0));
        assert!(r.passed());
        // The |h₂|²-based variant fails here: 2 ≤ 2 − 2 is false.
        assert!(!r.alt_remainder_in_budget);

        let r = lemma_identity_check(0.0, c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(r.h2, c(0.0, 0.0));
        assert_eq!(r.h3, c(2.0, 0.0));
        assert!(r.passed());
    }

    proptest! {
        #![proptest_config(ProptestConfig { failure_persistence: None, cases: 200, ..ProptestConfig::default() })]

        /// Any admissible sample stays under the surface value at
        /// (ρ, |x|, |y|): the pointwise triangle-inequality step.
        #[test]
        fn sample_soundness(
            rho in 0.0f64..=2.0,
            (rx, tx) in (0.0f64..=1.0, 0.0f64..std::f64::consts::TAU),
            (ry, ty) in (0.0f64..=1.0, 0.0f64..std::f64::consts::TAU),
            (rz, tz) in (0.0f64..=1.0, 0.0f64..std::f64::consts::TAU),
            (rw, tw) in (0.0f64..=1.0, 0.0f64..std::f64::consts::TAU),
        ) {
            let p = params(2, "3/2", 1, "0.4");
            let x = Complex64::from_polar(rx.sqrt(), tx);
            let y = Complex64::from_polar(ry.sqrt(), ty);
            let s = sample(rho, x, y, Complex64::from_polar(rz.sqrt(), tz), Complex64::from_polar(rw.sqrt(), tw));
            let value = hankel_functional(&p, &s).unwrap();
            let surface = f_surface(&p, rho, x.norm(), y.norm()).unwrap();
            prop_assert!(value <= surface * (1.0 + 1e-9) + 1e-15);
        }

        /// Recombined individual coefficients satisfy the second-coefficient
        /// representation for each function separately.
        #[test]
        fn reconstruction_consistency(
            rho in 0.0f64..=2.0,
            (rx, tx) in (0.0f64..=1.0, 0.0f64..std::f64::consts::TAU),
            (ry, ty) in (0.0f64..=1.0, 0.0f64..std::f64::consts::TAU),
        ) {
            let x = Complex64::from_polar(rx.sqrt(), tx);
            let y = Complex64::from_polar(ry.sqrt(), ty);
            let s = sample(rho, x, y, c(0.0, 0.0), c(0.0, 0.0));
            let pq = reconstruct_pq(&s);
            let gap = 4.0 - rho * rho;
            let expect_p2m = (x * gap + rho * rho) * 0.5;
            let expect_q2m = (y * gap + rho * rho) * 0.5;
            prop_assert!((pq.p2m - expect_p2m).norm() <= 1e-12);
            prop_assert!((pq.q2m - expect_q2m).norm() <= 1e-12);
            // The displayed difference and the individual route agree.
            prop_assert!((pq.p3m - pq.q3m - pq.p3m_minus_q3m).norm() <= 1e-12);
            prop_assert!((pq.p2m + pq.q2m - pq.p2m_plus_q2m).norm() <= 1e-12);
        }

        /// Representation-built coefficients stay in the closed disk of
        /// radius 2 for real first coefficients.
        #[test]
        fn lemma_holds_on_random_inputs(
            h1 in 0.0f64..=2.0,
            (rx, tx) in (0.0f64..=1.0, 0.0f64..std::f64::consts::TAU),
            (rz, tz) in (0.0f64..=1.0, 0.0f64..std::f64::consts::TAU),
        ) {
            let r = lemma_identity_check(
                h1,
                Complex64::from_polar(rx.sqrt(), tx),
                Complex64::from_polar(rz.sqrt(), tz),
            );
            prop_assert!(r.passed(), "{r:?}");
        }
    }
}
