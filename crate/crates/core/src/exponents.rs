//! The exponent system attached to `y = (ln x)^K`.
//!
//! With `κ = 1/K`:
//!
//! ```text
//! β = (1 − 3κ)/4        γ = 2β = (1 − 3κ)/2
//! η = κ(ρ − 1)/(2 + 3κρ)        ξ = 1 − 2η = (2 + 2κ + κρ)/(2 + 3κρ)
//! ζ = κ(1 − 12κ)/(1 + 5κ − 6κ²)
//! ```
//!
//! Every formula is evaluated in the caller's [`Exponent`] field, so with
//! [`Rational`](crate::Rational) inputs all identities between them hold
//! exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Exponent;

/// Exponents derived from `K`, `ρ` and the arc-split parameter `ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentParams<P> {
    pub k: P,
    pub kappa: P,
    pub beta: P,
    pub gamma: P,
    pub rho: P,
    pub eta: P,
    pub xi: P,
    /// Undefined at `K = 1`, where `1 + 5κ − 6κ²` vanishes.
    pub zeta: Option<P>,
    pub epsilon: f64,
}

/// Computes the exponent system for `K > 0`, `ρ > 0` and `ε > 0`.
///
/// `ρ` is only required to be positive here; the ranges in which the
/// individual bounds apply are reported by their validity predicates.
pub fn exponent_params<P: Exponent>(k: P, rho: P, epsilon: f64) -> Result<ExponentParams<P>> {
    if !k.is_positive() {
        return Err(Error::Domain(format!("K must be positive, got {k}")));
    }
    if !rho.is_positive() {
        return Err(Error::Domain(format!("rho must be positive, got {rho}")));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let one = P::one();
    let two = P::int(2);
    let three = P::int(3);

    let kappa = one.clone() / k.clone();
    let beta = (one.clone() - three.clone() * kappa.clone()) / P::int(4);
    let gamma = two.clone() * beta.clone();
    let eta = kappa.clone() * (rho.clone() - one.clone())
        / (two.clone() + three * kappa.clone() * rho.clone());
    let xi = one.clone() - two * eta.clone();
    let zeta_den = one.clone() + P::int(5) * kappa.clone() - P::int(6) * kappa.clone() * kappa.clone();
    let zeta = (!zeta_den.is_zero())
        .then(|| kappa.clone() * (one - P::int(12) * kappa.clone()) / zeta_den);

    Ok(ExponentParams {
        k,
        kappa,
        beta,
        gamma,
        rho,
        eta,
        xi,
        zeta,
        epsilon,
    })
}

impl<P: Exponent> ExponentParams<P> {
    /// `K > 3`, the range in which the pointwise lemmas and both theorems
    /// are stated.
    pub fn in_theory(&self) -> bool {
        self.k > P::int(3)
    }

    /// Same parameters with `ρ` replaced.
    pub fn with_rho(&self, rho: P) -> Result<Self> {
        exponent_params(self.k.clone(), rho, self.epsilon)
    }

    /// Floating-point view of the parameters.
    pub fn approx(&self) -> ExponentParams<f64> {
        ExponentParams {
            k: self.k.approx(),
            kappa: self.kappa.approx(),
            beta: self.beta.approx(),
            gamma: self.gamma.approx(),
            rho: self.rho.approx(),
            eta: self.eta.approx(),
            xi: self.xi.approx(),
            zeta: self.zeta.as_ref().map(Exponent::approx),
            epsilon: self.epsilon,
        }
    }

    /// `ρ` is an even positive integer `2s`; returns `s`.
    pub fn even_rho_half(&self) -> Option<u32> {
        let r = self.rho.approx();
        let s = (r / 2.0).round();
        (s >= 1.0 && P::int(2 * s as i64) == self.rho).then_some(s as u32)
    }
}

/// Parses `"13"`, `"-7/2"`, `"2.75"` or `"1.5e-3"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Argument(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let numer: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(if negative { -value } else { value })
}

/// Exact rational value of a finite `f64`.
pub fn rational_from_f64(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| Error::Argument(format!("not finite: {v}")))
}

pub(crate) fn half<P: Exponent>() -> P {
    P::one() / P::int(2)
}
