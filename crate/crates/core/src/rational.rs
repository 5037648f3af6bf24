//! Helpers for the exact rational scalar: construction, the "p/q" string
//! format used in all JSON payloads, and integrality tests.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::Q;

/// Rational from an integer pair; panics on zero denominator.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from an integer.
pub fn qi(num: i64) -> Q {
    Q::from(BigInt::from(num))
}

/// Formats as "p/q", or "p" when the denominator is one.
pub fn q_to_string(x: &Q) -> String {
    if x.denom() == &BigInt::from(1) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses the "p/q" (or "p") string format.
pub fn q_from_str(s: &str) -> Result<Q, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|e| format!("bad numerator {num:?}: {e}"))?;
    let den: BigInt = den
        .parse()
        .map_err(|e| format!("bad denominator {den:?}: {e}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Q::new(num, den))
}

/// Whether `x` is an integer.
pub fn is_integer(x: &Q) -> bool {
    x.is_integer()
}

/// Whether `x` is a nonnegative integer.
pub fn is_nonneg_integer(x: &Q) -> bool {
    x.is_integer() && !x.is_negative()
}

/// Whether `x` is a negative integer.
pub fn is_negative_integer(x: &Q) -> bool {
    x.is_integer() && x.is_negative()
}

/// Exact conversion to u64 for known-nonnegative integers.
pub fn to_u64(x: &Q) -> Option<u64> {
    use num_traits::ToPrimitive;
    if !is_nonneg_integer(x) {
        return None;
    }
    x.numer().to_u64()
}
