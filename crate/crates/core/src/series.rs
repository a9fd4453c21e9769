//! Truncated power-series machinery for m-fold symmetric functions.
//!
//! An m-fold symmetric normalized function only carries coefficients at
//! indices `m·k + 1`:
//!
//! ```text
//! f(z) = z + a_{m+1} z^{m+1} + a_{2m+1} z^{2m+1} + a_{3m+1} z^{3m+1} + …
//! ```
//!
//! This module provides the operator weights scaling those coefficients,
//! application of the convex operator condition, reversion of the series to
//! the stated depth, and the Hankel/Fekete–Szegö coefficient functionals.
//!
//! Operations are generic over the coefficient scalar so the same code runs
//! on `Complex64` for numeric work and on `BigRational` when exact results
//! are required. All functions are pure; inputs are never mutated.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::Error;

/// Coefficient scalar for series operations.
///
/// Implemented for `Complex64` (numeric path) and `BigRational` (exact
/// path). `from_rational` injects the exact operator weights and prefactors;
/// the complex implementation rounds once to the nearest double.
pub trait Scalar:
    Clone + Zero + One + std::ops::Neg<Output = Self> + std::ops::Sub<Output = Self> + PartialEq
{
    fn from_rational(r: &BigRational) -> Self;
}

impl Scalar for Complex64 {
    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

impl Scalar for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
}

/// A truncated m-fold symmetric series. The leading coefficient `a_1 = 1`
/// is implicit; `coeffs[k-1]` holds `a_{m·k+1}` for `k = 1..=depth`.
///
/// Truncation depth is explicit and checked by every consumer; missing
/// coefficients are never zero-padded.
#[derive(Debug, Clone, PartialEq)]
pub struct MFoldSeries<S> {
    m: u32,
    coeffs: Vec<S>,
}

impl<S: Scalar> MFoldSeries<S> {
    /// Builds a series from the coefficients `a_{m+1}, a_{2m+1}, …` in order.
    pub fn new(m: u32, coeffs: Vec<S>) -> Result<Self, Error> {
        if m < 1 {
            return Err(Error::range("m", "must satisfy m >= 1".to_string()));
        }
        Ok(MFoldSeries { m, coeffs })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Truncation depth `K` (number of stored coefficients).
    pub fn depth(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient `a_{m·k+1}`, `k = 1..=depth`.
    pub fn coeff(&self, k: usize) -> Option<&S> {
        if k == 0 {
            None
        } else {
            self.coeffs.get(k - 1)
        }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    fn require_depth(&self, needed: usize) -> Result<(), Error> {
        if self.depth() < needed {
            Err(Error::Truncation {
                needed,
                got: self.depth(),
            })
        } else {
            Ok(())
        }
    }
}

/// The three coefficients entering the second Hankel determinant, either on
/// the forward side (`a_{m+1}, a_{2m+1}, a_{3m+1}`) or their images on the
/// inverse side.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTriple<S> {
    pub a_m1: S,
    pub a_2m1: S,
    pub a_3m1: S,
}

/// Exact operator weight multiplying `a_{m·k+1}`:
/// `Γ(γ+k+1) / (Γ(k+1) Γ(γ+1)) = ∏_{j=1..k} (γ+j)/j`.
///
/// Built by iterated products; floating-point gamma evaluation is never
/// used, so the value is exact for every `γ, k`. On a plain series indexed
/// by coefficient position the same operator scales `a_k` by this weight at
/// `k − 1`; only the m-fold indexing is exposed here.
pub fn ruscheweyh_weight(gamma: u32, k: u32) -> BigRational {
    debug_assert!(k >= 1);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 1..=k {
        num *= BigInt::from(gamma as u64 + j as u64);
        den *= BigInt::from(j);
    }
    BigRational::new(num, den)
}

/// Applies the order-γ operator: coefficient `k` of the result equals
/// `ruscheweyh_weight(γ, k) · a_{m·k+1}`. Depth is preserved; `γ = 0` is
/// the identity.
pub fn apply_ruscheweyh<S: Scalar>(f: &MFoldSeries<S>, gamma: u32) -> MFoldSeries<S> {
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let w = ruscheweyh_weight(gamma, (i + 1) as u32);
            a.clone() * S::from_rational(&w)
        })
        .collect();
    MFoldSeries { m: f.m, coeffs }
}

/// Coefficients of `z^m`, `z^{2m}`, `z^{3m}` in
/// `(1−λ)·R^γ f(z)/z + λ·(R^γ f(z))′`:
///
/// ```text
/// c_m  = (γ+1)(mλ+1)                 a_{m+1}
/// c_2m = ½(γ+1)(γ+2)(2mλ+1)          a_{2m+1}
/// c_3m = ⅙(γ+1)(γ+2)(γ+3)(3mλ+1)     a_{3m+1}
/// ```
pub fn operator_lhs_coeffs<S: Scalar>(
    f: &MFoldSeries<S>,
    lambda: &BigRational,
    gamma: u32,
) -> Result<(S, S, S), Error> {
    f.require_depth(3)?;
    let m = BigRational::from_integer(BigInt::from(f.m));
    let one = BigRational::one();
    let pick = |k: u32| -> S {
        // weight(γ,k)·(k·m·λ + 1): the k-th derivative term folds the
        // (1−λ) and λ·(mk+1) contributions into a single factor.
        let factor = ruscheweyh_weight(gamma, k)
            * (BigRational::from_integer(BigInt::from(k)) * &m * lambda + &one);
        f.coeffs[(k - 1) as usize].clone() * S::from_rational(&factor)
    };
    Ok((pick(1), pick(2), pick(3)))
}

/// Coefficients of the inverse series `g = f⁻¹` at orders
/// `m+1`, `2m+1`, `3m+1`:
///
/// ```text
/// b_{m+1}  = −a_{m+1}
/// b_{2m+1} = (m+1) a_{m+1}² − a_{2m+1}
/// b_{3m+1} = −[ ½(m+1)(3m+2) a_{m+1}³ − (3m+2) a_{m+1} a_{2m+1} + a_{3m+1} ]
/// ```
///
/// At `m = 1` this reduces to the classical degree-4 reversion
/// `(−a₂, 2a₂²−a₃, −(5a₂³−5a₂a₃+a₄))`.
pub fn invert_series<S: Scalar>(f: &MFoldSeries<S>) -> Result<CoefficientTriple<S>, Error> {
    f.require_depth(3)?;
    let m = f.m as i64;
    let a1 = f.coeffs[0].clone();
    let a2 = f.coeffs[1].clone();
    let a3 = f.coeffs[2].clone();
    let int = |n: i64| S::from_rational(&BigRational::from_integer(BigInt::from(n)));

    let b1 = -a1.clone();
    let b2 = int(m + 1) * a1.clone() * a1.clone() - a2.clone();
    // (m+1)(3m+2) is even for every m, so the ½ factor stays integral.
    let half_c = (m + 1) * (3 * m + 2) / 2;
    let b3 = -(int(half_c) * a1.clone() * a1.clone() * a1.clone() - int(3 * m + 2) * a1 * a2 + a3);
    Ok(CoefficientTriple {
        a_m1: b1,
        a_2m1: b2,
        a_3m1: b3,
    })
}

/// Hankel determinant `H_q(n)`: the determinant of the q×q matrix with
/// entry `(i, j) = a_{n+i+j−2}` (1-indexed), built from a coefficient
/// sequence `coeffs[t-1] = a_t` with `a_1 = 1` supplied by the caller.
///
/// Requires every index up to `a_{n+2q−2}`.
pub fn hankel_determinant<S: Scalar>(coeffs: &[S], q: usize, n: usize) -> Result<S, Error> {
    if q < 1 || n < 1 {
        return Err(Error::range(
            "q/n",
            "must satisfy q >= 1 and n >= 1".to_string(),
        ));
    }
    let top = n + 2 * q - 2;
    if coeffs.len() < top {
        return Err(Error::MissingCoefficient {
            index: top,
            len: coeffs.len(),
        });
    }
    let entry = |i: usize, j: usize| coeffs[n + i + j - 1].clone(); // zero-indexed i, j
    let matrix: Vec<Vec<S>> = (0..q)
        .map(|i| (0..q).map(|j| entry(i, j)).collect())
        .collect();
    Ok(det(&matrix))
}

/// Laplace expansion along the first row; fine for the small q used here.
fn det<S: Scalar>(m: &[Vec<S>]) -> S {
    let q = m.len();
    if q == 1 {
        return m[0][0].clone();
    }
    let mut acc = S::zero();
    for (j, pivot) in m[0].iter().enumerate() {
        if pivot.is_zero() {
            continue;
        }
        let minor: Vec<Vec<S>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = pivot.clone() * det(&minor);
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// Fekete–Szegö functional `a₃ − μ a₂²`. Coincides with `H₂(1)` at `μ = 1`.
pub fn fekete_szego(a2: Complex64, a3: Complex64, mu: f64) -> Complex64 {
    a3 - a2 * a2 * mu
}
