//! Subsets of the real line: finite unions of intervals with explicit
//! endpoint closure. Used for operator domains and ranges, subdifferentials,
//! and the exact range oracle.

use crate::ext::ext_f64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// One interval. Endpoints may be infinite, in which case the closure flag
/// on that side is ignored (an infinite end is always open).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "ext_f64")]
    pub lo: f64,
    pub lo_closed: bool,
    #[serde(with = "ext_f64")]
    pub hi: f64,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "closed interval with lo > hi");
        Interval { lo, lo_closed: lo.is_finite(), hi, hi_closed: hi.is_finite() }
    }

    pub fn point(x: f64) -> Self {
        assert!(x.is_finite());
        Interval::closed(x, x)
    }

    pub fn all() -> Self {
        Interval::closed(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn new(lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> Self {
        assert!(lo <= hi);
        Interval {
            lo,
            lo_closed: lo_closed && lo.is_finite(),
            hi,
            hi_closed: hi_closed && hi.is_finite(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi && self.lo_closed && self.hi_closed
    }

    pub fn is_all(&self) -> bool {
        self.lo == f64::NEG_INFINITY && self.hi == f64::INFINITY
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = x > self.lo || (x == self.lo && self.lo_closed);
        let below = x < self.hi || (x == self.hi && self.hi_closed);
        above && below
    }

    /// Membership with a symmetric tolerance band at finite endpoints.
    pub fn contains_within(&self, x: f64, tol: f64) -> bool {
        let lo = if self.lo.is_finite() { self.lo - tol } else { self.lo };
        let hi = if self.hi.is_finite() { self.hi + tol } else { self.hi };
        x >= lo && x <= hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_closed) = if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else if self.lo < other.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed && other.lo_closed)
        };
        let (hi, hi_closed) = if self.hi < other.hi {
            (self.hi, self.hi_closed)
        } else if self.hi > other.hi {
            (other.hi, other.hi_closed)
        } else {
            (self.hi, self.hi_closed && other.hi_closed)
        };
        if lo > hi || (lo == hi && !(lo_closed && hi_closed)) {
            None
        } else {
            Some(Interval { lo, lo_closed, hi, hi_closed })
        }
    }

    /// Minkowski sum.
    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo + other.lo, // -inf + finite is fine; -inf + -inf is fine
            lo_closed: self.lo_closed && other.lo_closed,
            hi: self.hi + other.hi,
            hi_closed: self.hi_closed && other.hi_closed,
        }
    }

    /// Minkowski difference `self - other = { a - b }`.
    pub fn minkowski_sub(&self, other: &Interval) -> Interval {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -self.hi,
            lo_closed: self.hi_closed,
            hi: -self.lo,
            hi_closed: self.lo_closed,
        }
    }

    pub fn shift(&self, p: f64) -> Interval {
        Interval { lo: self.lo + p, hi: self.hi + p, ..*self }
    }

    /// Relative interior: open version for nondegenerate intervals, the
    /// point itself for singletons.
    pub fn relative_interior(&self) -> Interval {
        if self.is_point() {
            *self
        } else {
            Interval { lo: self.lo, lo_closed: false, hi: self.hi, hi_closed: false }
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lb = if self.lo_closed { '[' } else { '(' };
        let rb = if self.hi_closed { ']' } else { ')' };
        let show = |v: f64| {
            if v == f64::NEG_INFINITY {
                "-inf".to_string()
            } else if v == f64::INFINITY {
                "+inf".to_string()
            } else {
                format!("{v}")
            }
        };
        write!(f, "{lb}{}, {}{rb}", show(self.lo), show(self.hi))
    }
}

/// Finite union of intervals, kept sorted, disjoint and maximally merged.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct SetOnLine {
    components: Vec<Interval>,
}

impl SetOnLine {
    pub fn empty() -> Self {
        SetOnLine { components: vec![] }
    }

    pub fn all() -> Self {
        SetOnLine { components: vec![Interval::all()] }
    }

    pub fn from_interval(iv: Interval) -> Self {
        let mut s = SetOnLine { components: vec![iv] };
        s.normalize();
        s
    }

    pub fn from_intervals(ivs: Vec<Interval>) -> Self {
        let mut s = SetOnLine { components: ivs };
        s.normalize();
        s
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_all(&self) -> bool {
        self.components.len() == 1 && self.components[0].is_all()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.components.iter().any(|iv| iv.contains(x))
    }

    pub fn contains_within(&self, x: f64, tol: f64) -> bool {
        self.components.iter().any(|iv| iv.contains_within(x, tol))
    }

    pub fn push(&mut self, iv: Interval) {
        self.components.push(iv);
        self.normalize();
    }

    /// Convex hull interval, if nonempty.
    pub fn hull(&self) -> Option<Interval> {
        let first = self.components.first()?;
        let last = self.components.last()?;
        Some(Interval {
            lo: first.lo,
            lo_closed: first.lo_closed,
            hi: last.hi,
            hi_closed: last.hi_closed,
        })
    }

    pub fn intersect(&self, other: &SetOnLine) -> SetOnLine {
        let mut out = vec![];
        for a in &self.components {
            for b in &other.components {
                if let Some(c) = a.intersect(b) {
                    out.push(c);
                }
            }
        }
        SetOnLine::from_intervals(out)
    }

    fn normalize(&mut self) {
        self.components.retain(|iv| !iv.is_empty());
        self.components
            .sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap().then(a.hi.partial_cmp(&b.hi).unwrap()));
        let mut merged: Vec<Interval> = vec![];
        for iv in self.components.drain(..) {
            match merged.last_mut() {
                Some(last) if touches(last, &iv) => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                        last.hi_closed = iv.hi_closed;
                    } else if iv.hi == last.hi {
                        last.hi_closed |= iv.hi_closed;
                    }
                }
                _ => merged.push(iv),
            }
        }
        self.components = merged;
    }
}

/// Overlapping or exactly adjacent with at least one closed side.
fn touches(a: &Interval, b: &Interval) -> bool {
    if b.lo < a.hi {
        return true;
    }
    if b.lo == a.hi {
        return a.hi_closed || b.lo_closed;
    }
    false
}

impl fmt::Display for SetOnLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.components.iter().map(|iv| iv.to_string()).collect();
        write!(f, "{}", parts.join(" u "))
    }
}
