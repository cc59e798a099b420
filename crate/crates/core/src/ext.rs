//! Extended-real scalar used for function values.
//!
//! `+inf` marks points outside a domain; `-inf` only ever appears as the
//! value of an unbounded infimum and is never stored inside a function
//! carrier. `(+inf) + (-inf)` is rejected rather than silently collapsed.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

pub use ExtReal::{Finite, NegInf, PosInf};

impl ExtReal {
    /// Wraps a float, mapping IEEE infinities to the symbolic variants.
    /// NaN is a programmer error.
    pub fn of(v: f64) -> Self {
        assert!(!v.is_nan(), "ExtReal::of(NaN)");
        if v == f64::INFINITY {
            PosInf
        } else if v == f64::NEG_INFINITY {
            NegInf
        } else {
            Finite(v)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn is_pos_inf(self) -> bool {
        matches!(self, PosInf)
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, NegInf)
    }

    /// Finite payload, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Collapses to an IEEE float (infinities become IEEE infinities).
    pub fn to_f64(self) -> f64 {
        match self {
            NegInf => f64::NEG_INFINITY,
            Finite(v) => v,
            PosInf => f64::INFINITY,
        }
    }

    /// Addition that reports the undefined case instead of panicking.
    pub fn try_add(self, rhs: ExtReal) -> Option<ExtReal> {
        match (self, rhs) {
            (PosInf, NegInf) | (NegInf, PosInf) => None,
            (PosInf, _) | (_, PosInf) => Some(PosInf),
            (NegInf, _) | (_, NegInf) => Some(NegInf),
            (Finite(a), Finite(b)) => Some(Finite(a + b)),
        }
    }

    /// Multiplication by a finite scalar. `0 * inf` is rejected as undefined.
    pub fn scale(self, k: f64) -> ExtReal {
        assert!(k.is_finite(), "ExtReal::scale by non-finite");
        match self {
            Finite(v) => Finite(k * v),
            PosInf => {
                assert!(k != 0.0, "0 * inf is undefined");
                if k > 0.0 {
                    PosInf
                } else {
                    NegInf
                }
            }
            NegInf => {
                assert!(k != 0.0, "0 * -inf is undefined");
                if k > 0.0 {
                    NegInf
                } else {
                    PosInf
                }
            }
        }
    }

    pub fn min(self, rhs: ExtReal) -> ExtReal {
        if self <= rhs {
            self
        } else {
            rhs
        }
    }

    pub fn max(self, rhs: ExtReal) -> ExtReal {
        if self >= rhs {
            self
        } else {
            rhs
        }
    }

    /// |a - b| <= tol, with equal infinities counting as equal.
    pub fn close_to(self, rhs: ExtReal, tol: f64) -> bool {
        match (self, rhs) {
            (Finite(a), Finite(b)) => (a - b).abs() <= tol,
            (a, b) => a == b,
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        self.try_add(rhs).expect("(+inf) + (-inf) is undefined")
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        match self {
            NegInf => PosInf,
            Finite(v) => Finite(-v),
            PosInf => NegInf,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let rank = |e: &ExtReal| match e {
            NegInf => 0u8,
            Finite(_) => 1,
            PosInf => 2,
        };
        match (self, other) {
            (Finite(a), Finite(b)) => a.partial_cmp(b),
            (a, b) => rank(a).partial_cmp(&rank(b)),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::of(v)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegInf => write!(f, "-inf"),
            Finite(v) => write!(f, "{v}"),
            PosInf => write!(f, "inf"),
        }
    }
}

// JSON form: plain number, or the strings "inf" / "-inf".
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Finite(v) => s.serialize_f64(*v),
            PosInf => s.serialize_str("inf"),
            NegInf => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Tag(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) if v.is_nan() => Err(D::Error::custom("NaN is not a value")),
            Raw::Num(v) => Ok(ExtReal::of(v)),
            Raw::Tag(t) => match t.as_str() {
                "inf" | "+inf" => Ok(PosInf),
                "-inf" => Ok(NegInf),
                other => Err(D::Error::custom(format!("bad extended real: {other:?}"))),
            },
        }
    }
}

/// Serde adapter for `f64` fields that may legitimately hold IEEE
/// infinities (interval endpoints, ray anchors). JSON numbers cannot
/// encode them, so they round-trip as the strings "inf" / "-inf".
pub mod ext_f64 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        ExtReal::of(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(ExtReal::deserialize(d)?.to_f64())
    }
}
