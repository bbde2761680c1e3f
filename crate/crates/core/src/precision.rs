//! Working-precision configuration and scalar helpers.
//!
//! All numerical kernels operate on [`Real`] values carrying a single global
//! mantissa precision. The precision is configured once per run (startup or
//! test setup) and defaults to 34 significant decimal digits, i.e. a
//! quadruple-precision equivalent.

use std::sync::atomic::{AtomicU32, Ordering};

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};

/// Extended-precision real scalar.
pub type Real = Float;

pub const DEFAULT_DIGITS: u32 = 34;
const MIN_DIGITS: u32 = 30;

static PRECISION_BITS: AtomicU32 = AtomicU32::new(0);

fn digits_to_bits(digits: u32) -> u32 {
    // log2(10) = 3.3219...; a few guard bits on top
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 4
}

/// Set the global working precision in decimal digits. Values below the
/// 30-digit floor are clamped up. Intended to be called once at startup.
pub fn set_precision_digits(digits: u32) {
    let d = digits.max(MIN_DIGITS);
    PRECISION_BITS.store(digits_to_bits(d), Ordering::Relaxed);
}

/// Current working precision in decimal digits.
pub fn precision_digits() -> u32 {
    (bits() as f64 / std::f64::consts::LOG2_10).floor() as u32
}

/// Current working precision in mantissa bits.
pub fn bits() -> u32 {
    let b = PRECISION_BITS.load(Ordering::Relaxed);
    if b == 0 {
        let d = digits_to_bits(DEFAULT_DIGITS);
        PRECISION_BITS.store(d, Ordering::Relaxed);
        d
    } else {
        b
    }
}

/// New scalar from an `f64` (exact conversion).
pub fn real(v: f64) -> Real {
    Float::with_val(bits(), v)
}

/// New scalar parsed from a decimal string at full working precision.
pub fn real_str(s: &str) -> Result<Real> {
    let parsed = Float::parse(s).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("{e}: {s:?}"),
    })?;
    Ok(Float::with_val(bits(), parsed))
}

pub fn pi() -> Real {
    Float::with_val(bits(), Constant::Pi)
}

/// Unit roundoff at the working precision, 2^(1-bits).
pub fn eps() -> Real {
    let mut e = Float::with_val(bits(), 1.0);
    e >>= bits() - 1;
    e
}

/// Format at full precision; the digit count guarantees an exact binary
/// round trip through `real_str`.
pub fn to_full_string(v: &Real) -> String {
    v.to_string_radix(10, Some(precision_digits() as usize + 4))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_precision_is_quadruple_equivalent() {
        assert!(bits() >= 113);
        assert!(precision_digits() >= 34);
    }

    #[test]
    fn parse_round_trip() {
        let x = real_str("-0.249997552780").unwrap();
        let s = to_full_string(&x);
        let y = real_str(&s).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn eps_matches_digit_count() {
        let e = eps();
        assert!(e.to_f64() < 1e-34);
    }
}
