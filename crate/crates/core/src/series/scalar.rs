//! Scalar building blocks: double factorials, arcsine Taylor coefficients,
//! the gap function `h`, its inverse and the certified radius `γ*`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};

/// `k!!` as an arbitrary-precision integer, with `0!! = 1!! = 1`.
pub fn double_factorial(k: u32) -> BigUint {
    let mut acc = BigUint::one();
    let mut f = k;
    while f > 1 {
        acc *= f;
        f -= 2;
    }
    acc
}

/// `k!!` in 128 bits, or [`Error::Overflow`].
pub fn double_factorial_u128(k: u32) -> Result<u128> {
    let mut acc: u128 = 1;
    let mut f = k;
    while f > 1 {
        acc = acc.checked_mul(f as u128).ok_or(Error::Overflow(k))?;
        f -= 2;
    }
    Ok(acc)
}

/// Coefficient of `r^(2i+1)` in the Taylor series of `arcsin(r)`:
/// `(2i-1)!! / ((2i)!! (2i+1))`.
pub fn arcsin_coeff(i: u32) -> BigRational {
    let num = if i == 0 { BigUint::one() } else { double_factorial(2 * i - 1) };
    let den = double_factorial(2 * i) * BigUint::from(2 * i + 1);
    BigRational::new(num.into(), den.into())
}

/// `h(x) = (x+1) sqrt(1 - (x/(x+1))^2) - x arccos(x/(x+1))` for `x ≥ 0`.
///
/// Strictly decreasing from `h(0) = 1` towards 0.
pub fn h(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::DomainError { func: "h", value: x });
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    // (x+1) sqrt(1 - (x/(x+1))^2) simplifies to sqrt(2x+1)
    Ok((2.0 * x + 1.0).sqrt() - x * (x / (x + 1.0)).acos())
}

/// Inverse of [`h`] on `(0, 1]`, by bracketed bisection.
///
/// The upper bracket doubles from 1 until `h(x_hi) < y`; bisection then runs
/// for at most 200 steps or until the bracket is narrower than `1e-14`
/// relative to its upper end.
pub fn h_inverse(y: f64) -> Result<f64> {
    if !(y > 0.0 && y <= 1.0) {
        return Err(Error::DomainError { func: "h_inverse", value: y });
    }
    if y == 1.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while h(hi)? >= y {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::DomainError { func: "h_inverse", value: y });
        }
    }
    for _ in 0..200 {
        if hi - lo <= 1e-14 * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if h(mid)? >= y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `γ* = arccos(h⁻¹(s) / (h⁻¹(s) + 1))` for `s = ‖eta‖∞ ∈ [0, 1]`.
///
/// Increasing in `s`: `γ*(1) = π/2`, and `γ* → 0` as `s → 0`.
pub fn gamma_star(eta_norm: f64) -> Result<f64> {
    if !(eta_norm >= 0.0 && eta_norm <= 1.0) {
        return Err(Error::DomainError { func: "gamma_star", value: eta_norm });
    }
    if eta_norm == 0.0 {
        return Ok(0.0);
    }
    let x = h_inverse(eta_norm)?;
    Ok((x / (x + 1.0)).acos())
}
