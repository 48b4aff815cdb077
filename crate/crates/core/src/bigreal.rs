//! Conversions from arbitrary-precision integers to floating point.
//!
//! Exact Bell/Stirling values quickly outgrow `f64`; the observables only
//! ever need logarithms and ratios of consecutive values, both of which
//! stay in range.  These helpers compute them without round-tripping
//! through a possibly-infinite `f64`.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// Natural logarithm of a positive big integer.
///
/// Accurate to ~1 ulp of the result plus `bits * eps` from the `ln 2`
/// multiple, i.e. absolute error below ~1e-12 for values up to 10^4000.
pub fn ln_biguint(v: &BigUint) -> f64 {
    assert!(!v.is_zero(), "ln of zero");
    let bits = v.bits();
    if bits <= 53 {
        return v.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 53;
    let top = (v >> shift).to_f64().expect("53-bit mantissa");
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

/// `num / den` as `f64`, correct to ~2 ulp, for positive big integers of
/// any magnitude (the quotient itself must fit in `f64`).
pub fn ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    assert!(!den.is_zero(), "ratio with zero denominator");
    if num.is_zero() {
        return 0.0;
    }
    // Scale the numerator so the integer quotient carries >= 64
    // significant bits, then undo the scale with an exact power of two.
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let shift = (db - nb + 96).max(0) as u64;
    let q = (num << shift) / den;
    let qf = q.to_f64().expect("quotient fits after scaling");
    qf * (2.0f64).powi(-(shift as i32))
}
