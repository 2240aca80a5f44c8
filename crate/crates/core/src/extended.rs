use std::fmt;

use serde::{Deserialize, Serialize};

/// A real value or `+inf`, the result type of every series, integral and norm.
///
/// Signed integrals (commutators) may produce negative finite values; norms
/// are always nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum ExtendedValue {
    Finite(f64),
    Infinite,
}

impl ExtendedValue {
    pub const ZERO: ExtendedValue = ExtendedValue::Finite(0.0);

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedValue::Finite(_))
    }

    pub fn is_divergent(&self) -> bool {
        !self.is_finite()
    }

    /// The value as an `f64`, mapping divergence to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        match *self {
            ExtendedValue::Finite(v) => v,
            ExtendedValue::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            ExtendedValue::Finite(v) => Some(v),
            ExtendedValue::Infinite => None,
        }
    }

    pub fn from_f64(v: f64) -> Self {
        if v.is_infinite() && v > 0.0 {
            ExtendedValue::Infinite
        } else {
            ExtendedValue::Finite(v)
        }
    }

    pub fn map(self, f: impl FnOnce(f64) -> f64) -> Self {
        match self {
            ExtendedValue::Finite(v) => ExtendedValue::from_f64(f(v)),
            ExtendedValue::Infinite => ExtendedValue::Infinite,
        }
    }

    /// Product of nonnegative extended values, with `0 * inf = 0`.
    pub fn mul(self, other: ExtendedValue) -> Self {
        match (self, other) {
            (ExtendedValue::Finite(a), ExtendedValue::Finite(b)) => ExtendedValue::Finite(a * b),
            (ExtendedValue::Finite(a), ExtendedValue::Infinite)
            | (ExtendedValue::Infinite, ExtendedValue::Finite(a)) => {
                if a == 0.0 {
                    ExtendedValue::ZERO
                } else {
                    ExtendedValue::Infinite
                }
            }
            _ => ExtendedValue::Infinite,
        }
    }

    pub fn add(self, other: ExtendedValue) -> Self {
        match (self, other) {
            (ExtendedValue::Finite(a), ExtendedValue::Finite(b)) => ExtendedValue::Finite(a + b),
            _ => ExtendedValue::Infinite,
        }
    }

    pub fn max(self, other: ExtendedValue) -> Self {
        match (self, other) {
            (ExtendedValue::Finite(a), ExtendedValue::Finite(b)) => ExtendedValue::Finite(a.max(b)),
            _ => ExtendedValue::Infinite,
        }
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValue::Finite(v) => write!(f, "{v}"),
            ExtendedValue::Infinite => write!(f, "+inf (divergent)"),
        }
    }
}

impl From<f64> for ExtendedValue {
    fn from(v: f64) -> Self {
        ExtendedValue::from_f64(v)
    }
}
