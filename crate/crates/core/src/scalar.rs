//! Scalar values: exact integers or finite binary64 reals.

use core::cmp::Ordering;
use core::fmt;

use thiserror::Error;

/// A member of a scalar domain.
///
/// Integers stay exact under `+ - *` until they overflow `i64`, at which point
/// arithmetic promotes to binary64. A `Real` is always finite.
#[derive(Clone, Copy, Debug)]
pub enum Scalar {
    Int(i64),
    Real(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("NaN is not a scalar")]
    NaN,
    #[error("infinite values are not scalars")]
    Infinite,
}

impl Scalar {
    pub fn real(v: f64) -> Result<Self, ScalarError> {
        if v.is_nan() {
            Err(ScalarError::NaN)
        } else if v.is_infinite() {
            Err(ScalarError::Infinite)
        } else {
            Ok(Scalar::Real(v))
        }
    }

    pub const fn int(v: i64) -> Self {
        Scalar::Int(v)
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Scalar::Int(i) => i as f64,
            Scalar::Real(r) => r,
        }
    }

    pub fn is_int(self) -> bool {
        matches!(self, Scalar::Int(_))
    }

    /// The integer this scalar equals, if it is integer-valued and fits `i64`.
    pub fn integer_value(self) -> Option<i64> {
        match self {
            Scalar::Int(i) => Some(i),
            Scalar::Real(r) => real_to_i64(r),
        }
    }

    /// Numeric comparison across representations; `Int(7)` and `Real(7.0)` are equal.
    pub fn cmp_value(&self, other: &Scalar) -> Ordering {
        match (*self, *other) {
            (Scalar::Int(a), Scalar::Int(b)) => a.cmp(&b),
            // never NaN, so partial_cmp is total; -0.0 == 0.0
            (a, b) => a.as_f64().partial_cmp(&b.as_f64()).unwrap_or(Ordering::Equal),
        }
    }

    pub fn value_eq(&self, other: &Scalar) -> bool {
        match (*self, *other) {
            (Scalar::Int(a), Scalar::Int(b)) => a == b,
            (a, b) => a.as_f64() == b.as_f64(),
        }
    }

    /// `|self - other|` as a real.
    pub fn abs_diff(self, other: Scalar) -> f64 {
        match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => (a as i128 - b as i128).unsigned_abs() as f64,
            (a, b) => libm::fabs(a.as_f64() - b.as_f64()),
        }
    }

    /// Structural equality: same representation and same bits.
    pub fn same(&self, other: &Scalar) -> bool {
        match (*self, *other) {
            (Scalar::Int(a), Scalar::Int(b)) => a == b,
            (Scalar::Real(a), Scalar::Real(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

/// `Some(i)` when `r` is an integer inside the `i64` range.
pub(crate) fn real_to_i64(r: f64) -> Option<i64> {
    // 2^63 is exactly representable; i64::MAX is not
    const LIMIT: f64 = 9_223_372_036_854_775_808.0;
    if r.is_finite() && libm::trunc(r) == r && (-LIMIT..LIMIT).contains(&r) {
        Some(r as i64)
    } else {
        None
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::Int(v)
    }
}

impl fmt::Display for Scalar {
    /// Integers print bare, reals always carry a `.` or exponent so the text
    /// parses back to the same representation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Int(i) => write!(f, "{i}"),
            Scalar::Real(r) => write!(f, "{r:?}"),
        }
    }
}

/// Sort and deduplicate by numeric value. Among equal values the first
/// occurrence in sorted order is kept.
pub fn sort_dedup(values: &mut alloc::vec::Vec<Scalar>) {
    values.sort_by(Scalar::cmp_value);
    values.dedup_by(|a, b| a.value_eq(b));
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_non_finite() {
        assert_eq!(Scalar::real(f64::NAN), Err(ScalarError::NaN));
        assert_eq!(Scalar::real(f64::INFINITY), Err(ScalarError::Infinite));
        assert!(Scalar::real(1.5).is_ok());
    }

    #[test]
    fn mixed_comparison_is_numeric() {
        assert!(Scalar::Int(7).value_eq(&Scalar::Real(7.0)));
        assert!(!Scalar::Int(7).same(&Scalar::Real(7.0)));
        assert_eq!(Scalar::Int(2).cmp_value(&Scalar::Real(2.5)), Ordering::Less);
        assert!(Scalar::Real(0.0).value_eq(&Scalar::Real(-0.0)));
    }

    #[test]
    fn integer_value_of_reals() {
        assert_eq!(Scalar::Real(3.0).integer_value(), Some(3));
        assert_eq!(Scalar::Real(3.5).integer_value(), None);
        assert_eq!(Scalar::Real(1e300).integer_value(), None);
    }

    #[test]
    fn display_keeps_representation() {
        assert_eq!(alloc::format!("{}", Scalar::Int(3)), "3");
        assert_eq!(alloc::format!("{}", Scalar::Real(3.0)), "3.0");
        assert_eq!(alloc::format!("{}", Scalar::Real(1e-7)), "1e-7");
    }

    #[test]
    fn dedup_merges_representations() {
        let mut v = vec![Scalar::Int(3), Scalar::Real(1.0), Scalar::Int(1), Scalar::Real(3.0)];
        sort_dedup(&mut v);
        assert_eq!(v.len(), 2);
        assert!(v[0].value_eq(&Scalar::Int(1)));
        assert!(v[1].value_eq(&Scalar::Int(3)));
    }
}
