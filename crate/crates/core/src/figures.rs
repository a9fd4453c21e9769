//! CSV figure data for the F-coefficient curves.
//!
//! The artifact emits data only; rendering is left to external plot tools.
//! Output is byte-stable for identical inputs: fixed column order, fixed
//! 12-significant-digit formatting, `\n` line endings.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::bound::SurfaceCtx;
use crate::error::Error;
use crate::model::Family;

/// Which curve family to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    /// The four coefficients F₁…F₄, one column group per β.
    Fcurves,
    /// F₃ + 2F₄ (positive on the open interval).
    F3Plus2F4,
    /// F₂ + 2(F₃ + F₄) (nonnegative on the closed interval).
    F2Plus2F3F4,
    /// The boundary polynomial K = F₁ + 2(F₂ + F₃) + 4F₄.
    KCurve,
}

impl FigureKind {
    fn quantities(self) -> &'static [&'static str] {
        match self {
            FigureKind::Fcurves => &["F1", "F2", "F3", "F4"],
            FigureKind::F3Plus2F4 => &["F3plus2F4"],
            FigureKind::F2Plus2F3F4 => &["F2plus2F3F4"],
            FigureKind::KCurve => &["K"],
        }
    }
}

/// Renders a rational as an exact decimal when its reduced denominator is of
/// the form 2^a·5^b (`1/20` → `0.05`), falling back to `p/q` otherwise.
/// Used for column labels.
pub fn decimal_label(r: &BigRational) -> String {
    let mut den = r.denom().clone();
    let mut scale = 0u32;
    for (factor, bump) in [(2u32, 1u32), (5, 1)] {
        let f = num_bigint::BigInt::from(factor);
        while (&den % &f).is_zero() {
            den /= &f;
            scale += bump;
        }
    }
    if !den.is_one() {
        return r.to_string();
    }
    // Denominator divides 10^k for some k; scale the numerator out exactly.
    let mut k = 0u32;
    let ten = num_bigint::BigInt::from(10u32);
    let mut pow = num_bigint::BigInt::one();
    while !(r.numer() * &pow % r.denom()).is_zero() {
        pow *= &ten;
        k += 1;
        debug_assert!(k <= scale + 1);
    }
    let scaled = (r.numer() * pow / r.denom()).abs();
    let sign = if r.is_negative() { "-" } else { "" };
    let digits = scaled.to_string();
    if k == 0 {
        return format!("{sign}{digits}");
    }
    let digits = format!("{digits:0>width$}", width = k as usize + 1);
    let split = digits.len() - k as usize;
    format!("{sign}{}.{}", &digits[..split], &digits[split..])
}

/// Builds the CSV table for one figure: column `rho`, then one column per
/// quantity per β (quantity-major order), ρ sampled uniformly on [0, 2]
/// inclusive, values formatted with 12 significant digits.
pub fn figure_csv(
    family: &Family,
    betas: &[BigRational],
    which: FigureKind,
    rho_steps: usize,
) -> Result<String, Error> {
    assert!(rho_steps >= 2, "need at least the two endpoints");
    if betas.is_empty() {
        return Err(Error::range("betas", "must be nonempty".to_string()));
    }
    for beta in betas {
        if beta.is_negative() || *beta >= BigRational::one() {
            return Err(Error::range(
                "betas",
                format!("{beta} violates 0 <= beta < 1"),
            ));
        }
    }

    let contexts: Vec<SurfaceCtx> = betas.iter().map(|b| SurfaceCtx::new(family, b)).collect();
    let quantities = which.quantities();

    let mut out = String::from("rho");
    for q in quantities {
        for beta in betas {
            out.push_str(&format!(",{q}_beta={}", decimal_label(beta)));
        }
    }
    out.push('\n');

    for i in 0..rho_steps {
        let rho = 2.0 * i as f64 / (rho_steps - 1) as f64;
        out.push_str(&format!("{rho:.11e}"));
        for q in quantities {
            for ctx in &contexts {
                let fc = ctx.f_coeffs(rho);
                let v = match *q {
                    "F1" => fc.f1,
                    "F2" => fc.f2,
                    "F3" => fc.f3,
                    "F4" => fc.f4,
                    "F3plus2F4" => fc.f3 + 2.0 * fc.f4,
                    "F2plus2F3F4" => fc.f2 + 2.0 * (fc.f3 + fc.f4),
                    "K" => ctx.k_checked(rho),
                    _ => unreachable!(),
                };
                out.push_str(&format!(",{v:.11e}"));
            }
        }
        out.push('\n');
    }
    Ok(out)
}
