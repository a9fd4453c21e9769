//! Validated class parameters.
//!
//! The quadruple `(m, λ, γ, β)` selects one function class: `m ≥ 1` is the
//! fold order, `λ ≥ 1` the convex-combination weight of the defining
//! operator condition, `γ ≥ 0` the integral operator order and
//! `β ∈ [0, 1)` the order of the class. `λ` and `β` are stored as exact
//! rationals so that every polynomial quantity downstream stays exact;
//! decimal strings such as `"0.05"` parse to exactly `1/20`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// The β-free part of the parameter quadruple: `(m, λ, γ)`.
///
/// Everything that does not depend on β (the ω-products, the branch
/// threshold τ, figure data) is defined on the family alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    m: u32,
    lambda: BigRational,
    gamma: u32,
}

impl Family {
    /// Builds a family, checking `m ≥ 1` and `λ ≥ 1`.
    pub fn new(m: u32, lambda: BigRational, gamma: u32) -> Result<Self, Error> {
        if m < 1 {
            return Err(Error::range("m", "must satisfy m >= 1".to_string()));
        }
        if lambda < BigRational::one() {
            return Err(Error::range(
                "lambda",
                format!("{lambda} violates lambda >= 1"),
            ));
        }
        Ok(Family { m, lambda, gamma })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn lambda(&self) -> &BigRational {
        &self.lambda
    }

    pub fn gamma(&self) -> u32 {
        self.gamma
    }

    /// Attaches an order β, producing validated [`Params`].
    pub fn with_beta(&self, beta: BigRational) -> Result<Params, Error> {
        check_beta(&beta)?;
        Ok(Params {
            family: self.clone(),
            beta,
        })
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "m = {}, lambda = {}, gamma = {}",
            self.m, self.lambda, self.gamma
        )
    }
}

/// Validated class parameters `(m, λ, γ, β)`.
///
/// Immutable value type; freely shareable across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Params {
    family: Family,
    beta: BigRational,
}

impl Params {
    /// Parses and validates all four parameters from integer/string inputs.
    /// `lambda` and `beta` accept decimal strings (`"0.25"`) or fractions
    /// (`"1/4"`).
    pub fn parse(m: i64, lambda: &str, gamma: i64, beta: &str) -> Result<Self, Error> {
        validate_params(
            m,
            parse_rational(lambda)?,
            BigRational::from_integer(BigInt::from(gamma)),
            parse_rational(beta)?,
        )
    }

    pub fn m(&self) -> u32 {
        self.family.m
    }

    pub fn lambda(&self) -> &BigRational {
        &self.family.lambda
    }

    pub fn gamma(&self) -> u32 {
        self.family.gamma
    }

    pub fn beta(&self) -> &BigRational {
        &self.beta
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// `1 − β` as an exact rational.
    pub fn one_minus_beta(&self) -> BigRational {
        BigRational::one() - &self.beta
    }
}

impl std::fmt::Display for Params {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}, beta = {}", self.family, self.beta)
    }
}

fn check_beta(beta: &BigRational) -> Result<(), Error> {
    if beta.is_negative() || *beta >= BigRational::one() {
        return Err(Error::range(
            "beta",
            format!("{beta} violates 0 <= beta < 1"),
        ));
    }
    Ok(())
}

/// Validates raw inputs into [`Params`].
///
/// Constraints are checked in order and the first violation is reported:
/// `m ≥ 1`, `λ ≥ 1`, `γ ≥ 0` and integral, `0 ≤ β < 1`. No silent clamping:
/// every input either yields parameters satisfying all four invariants or a
/// range error.
pub fn validate_params(
    m: i64,
    lambda: BigRational,
    gamma: BigRational,
    beta: BigRational,
) -> Result<Params, Error> {
    if m < 1 {
        return Err(Error::range("m", format!("{m} violates m >= 1")));
    }
    if lambda < BigRational::one() {
        return Err(Error::range(
            "lambda",
            format!("{lambda} violates lambda >= 1"),
        ));
    }
    if gamma.is_negative() || !gamma.is_integer() {
        return Err(Error::range(
            "gamma",
            format!("{gamma} violates gamma >= 0 and integral"),
        ));
    }
    check_beta(&beta)?;
    let gamma_u32 = gamma
        .to_integer()
        .try_into()
        .map_err(|_| Error::range("gamma", format!("{gamma} is too large")))?;
    let m_u32 = u32::try_from(m).map_err(|_| Error::range("m", format!("{m} is too large")))?;
    Ok(Params {
        family: Family {
            m: m_u32,
            lambda,
            gamma: gamma_u32,
        },
        beta,
    })
}

/// Parses a rational from a decimal string (`"1.5"`, `"-0.25"`), a fraction
/// (`"3/2"`) or a plain integer (`"2"`). Decimal digits convert exactly, so
/// `"0.1"` becomes `1/10` rather than the nearest binary double.
pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let s = s.trim();
    let err = || Error::Parse {
        input: s.to_string(),
    };
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| err())?;
        let d: BigInt = den.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = int_part.starts_with('-');
        let int_digits = if int_part.is_empty() || int_part == "-" || int_part == "+" {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| err())?
        };
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac: BigInt = frac_part.parse().map_err(|_| err())?;
        let magnitude = int_digits.magnitude() * scale.magnitude() + frac.magnitude();
        let mut value = BigRational::new(BigInt::from(magnitude), scale);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    let n: BigInt = s.parse().map_err(|_| err())?;
    Ok(BigRational::from_integer(n))
}

/// Exact rational for a small integer; shorthand used throughout the crate.
pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}
