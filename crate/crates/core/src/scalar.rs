//! Scalar abstraction shared by every floating-point routine.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive, Zero};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::str::FromStr;

pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + FromStr
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Significand bits of the working precision.
    const BITS: u32;

    fn lit(x: f64) -> Self;

    fn from_ratio(r: &BigRational) -> Self;

    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("usize fits")
    }

    fn from_i64_exact(n: i64) -> Self {
        Self::from_i64(n).expect("i64 fits")
    }

    fn from_bigint(n: &BigInt) -> Self {
        Self::from_ratio(&BigRational::from_integer(n.clone()))
    }

    /// `2^{-BITS}`.
    fn unit_roundoff() -> Self {
        Self::lit(2.0).powi(-(Self::BITS as i32))
    }
}

impl Real for f64 {
    const BITS: u32 = 53;

    fn lit(x: f64) -> Self {
        x
    }

    fn from_ratio(r: &BigRational) -> Self {
        ratio_to_f64(r)
    }
}

impl Real for f32 {
    const BITS: u32 = 24;

    fn lit(x: f64) -> Self {
        x as f32
    }

    fn from_ratio(r: &BigRational) -> Self {
        ratio_to_f64(r) as f32
    }
}

/// Correctly scaled conversion that survives numerators and denominators far outside f64 range.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.numer().is_zero() {
        return 0.0;
    }
    if let Some(v) = r.to_f64() {
        if v.is_finite() && v != 0.0 {
            return v;
        }
    }
    let (sign, num) = split(r.numer());
    let (dsign, den) = split(r.denom());
    let shift = num.bits() as i64 - den.bits() as i64 - 64;
    let q = if shift >= 0 {
        num / (den << shift as usize)
    } else {
        (num << (-shift) as usize) / den
    };
    let m = q.to_f64().unwrap_or(f64::NAN);
    let v = m * 2f64.powi(shift.clamp(-2000, 2000) as i32);
    if (sign == Sign::Minus) ^ (dsign == Sign::Minus) {
        -v
    } else {
        v
    }
}

fn split(n: &BigInt) -> (Sign, num_bigint::BigUint) {
    (n.sign(), n.magnitude().clone())
}
