//! Conversions from arbitrary-precision rationals to floats that stay
//! accurate far outside the f64 exponent range.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, Signed, ToPrimitive, Zero};

/// `r` as an f64, correct even when numerator and denominator each overflow
/// f64 on their own. Both are shifted down to ~96 significant bits before
/// dividing; the shift difference returns as a power-of-two factor.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    big_to_f64_scaled(r.numer()) / big_to_f64_scaled(r.denom())
        * exp2_i64(shift_of(r.numer()) - shift_of(r.denom()))
}

fn shift_of(x: &BigInt) -> i64 {
    (x.bits() as i64 - 96).max(0)
}

fn big_to_f64_scaled(x: &BigInt) -> f64 {
    (x >> shift_of(x)).to_f64().unwrap_or(f64::NAN)
}

fn exp2_i64(e: i64) -> f64 {
    // split so each factor stays in range
    let half = e / 2;
    Float::powi(2.0f64, half as i32) * Float::powi(2.0f64, (e - half) as i32)
}

// Float math routed through the trait so the crate builds without std.
pub(crate) fn sqrt(x: f64) -> f64 {
    Float::sqrt(x)
}

pub(crate) fn exp(x: f64) -> f64 {
    Float::exp(x)
}

pub(crate) fn ln(x: f64) -> f64 {
    Float::ln(x)
}

pub(crate) fn abs(x: f64) -> f64 {
    Float::abs(x)
}

/// Natural log of a positive rational of arbitrary magnitude.
pub fn ln_ratio(r: &BigRational) -> f64 {
    debug_assert!(r.is_positive());
    ln_big(r.numer()) - ln_big(r.denom())
}

pub(crate) fn ln_big(x: &BigInt) -> f64 {
    debug_assert!(!x.is_zero());
    let b = x.bits() as i64;
    if b <= 900 {
        Float::ln(x.to_f64().unwrap())
    } else {
        let shift = b - 64;
        Float::ln((x >> shift).to_f64().unwrap()) + shift as f64 * core::f64::consts::LN_2
    }
}
