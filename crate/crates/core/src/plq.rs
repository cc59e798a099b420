//! Exact calculus for univariate piecewise-quadratic functions with
//! explicit `+inf` regions.
//!
//! A `PlqFunction` is described by strictly increasing breakpoints
//! `x_1 < ... < x_k`, one piece per open interval between them (including
//! the two unbounded end intervals), and an explicit value at every
//! breakpoint. A piece is either a quadratic `a x^2 + b x + c` or `+inf`.
//! This closure of functions is stable under addition, shift/tilt,
//! pointwise min/max, Fenchel conjugation and infimal convolution, and all
//! of those are computed in closed form here: no grids, no sampling.

use crate::error::{Error, Result};
use crate::ext::{ExtReal, Finite, NegInf, PosInf};
use crate::interval::{Interval, SetOnLine};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Comparisons between exactly-computed coefficients.
pub const EXACT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Piece {
    Quad { a: f64, b: f64, c: f64 },
    Infinite,
}

impl Piece {
    pub fn quad(a: f64, b: f64, c: f64) -> Self {
        assert!(a.is_finite() && b.is_finite() && c.is_finite(), "non-finite piece coefficient");
        Piece::Quad { a, b, c }
    }

    pub fn constant(c: f64) -> Self {
        Piece::quad(0.0, 0.0, c)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Piece::Quad { .. })
    }

    pub fn eval(&self, x: f64) -> ExtReal {
        match self {
            Piece::Quad { a, b, c } => Finite((a * x + b) * x + c),
            Piece::Infinite => PosInf,
        }
    }

    pub fn slope(&self, x: f64) -> Option<f64> {
        match self {
            Piece::Quad { a, b, .. } => Some(2.0 * a * x + b),
            Piece::Infinite => None,
        }
    }

    fn close_to(&self, other: &Piece, tol: f64) -> bool {
        match (self, other) {
            (Piece::Infinite, Piece::Infinite) => true,
            (Piece::Quad { a, b, c }, Piece::Quad { a: a2, b: b2, c: c2 }) => {
                (a - a2).abs() <= tol && (b - b2).abs() <= tol && (c - c2).abs() <= tol
            }
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlqFunction {
    breakpoints: Vec<f64>,
    pieces: Vec<Piece>,
    values: Vec<ExtReal>,
}

impl PlqFunction {
    /// Validates shape: `pieces.len() == breakpoints.len() + 1`,
    /// `values.len() == breakpoints.len()`, breakpoints strictly increasing
    /// and finite, no `-inf` values. Properness and lower semicontinuity are
    /// separate queries, not construction requirements.
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Piece>, values: Vec<ExtReal>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::Malformed(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            )));
        }
        if values.len() != breakpoints.len() {
            return Err(Error::Malformed(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len(),
                values.len()
            )));
        }
        for w in breakpoints.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Malformed(format!(
                    "breakpoints not strictly increasing at {} >= {}",
                    w[0], w[1]
                )));
            }
        }
        if breakpoints.iter().any(|x| !x.is_finite()) {
            return Err(Error::Malformed("non-finite breakpoint".into()));
        }
        if values.iter().any(|v| v.is_neg_inf()) {
            return Err(Error::Malformed("-inf breakpoint value".into()));
        }
        Ok(PlqFunction { breakpoints, pieces, values })
    }

    fn raw(breakpoints: Vec<f64>, pieces: Vec<Piece>, values: Vec<ExtReal>) -> Self {
        debug_assert_eq!(pieces.len(), breakpoints.len() + 1);
        debug_assert_eq!(values.len(), breakpoints.len());
        PlqFunction { breakpoints, pieces, values }
    }

    // ---- builders ----

    pub fn constant(c: f64) -> Self {
        PlqFunction::raw(vec![], vec![Piece::constant(c)], vec![])
    }

    pub fn affine(b: f64, c: f64) -> Self {
        PlqFunction::raw(vec![], vec![Piece::quad(0.0, b, c)], vec![])
    }

    pub fn quadratic(a: f64, b: f64, c: f64) -> Self {
        PlqFunction::raw(vec![], vec![Piece::quad(a, b, c)], vec![])
    }

    pub fn abs_fn() -> Self {
        PlqFunction::raw(
            vec![0.0],
            vec![Piece::quad(0.0, -1.0, 0.0), Piece::quad(0.0, 1.0, 0.0)],
            vec![Finite(0.0)],
        )
    }

    /// Indicator of `[lo, hi]` (endpoints may be infinite; `lo == hi` gives
    /// the indicator of a point).
    pub fn indicator(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "indicator of empty interval");
        assert!(!(lo.is_nan() || hi.is_nan()));
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) if lo == hi => {
                PlqFunction::raw(vec![lo], vec![Piece::Infinite; 2], vec![Finite(0.0)])
            }
            (true, true) => PlqFunction::raw(
                vec![lo, hi],
                vec![Piece::Infinite, Piece::constant(0.0), Piece::Infinite],
                vec![Finite(0.0), Finite(0.0)],
            ),
            (true, false) => PlqFunction::raw(
                vec![lo],
                vec![Piece::Infinite, Piece::constant(0.0)],
                vec![Finite(0.0)],
            ),
            (false, true) => PlqFunction::raw(
                vec![hi],
                vec![Piece::constant(0.0), Piece::Infinite],
                vec![Finite(0.0)],
            ),
            (false, false) => PlqFunction::constant(0.0),
        }
    }

    pub fn point_indicator(x: f64) -> Self {
        PlqFunction::indicator(x, x)
    }

    /// Support function of `[lo, hi]`: `s -> sup { s x : lo <= x <= hi }`.
    pub fn support_fn(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi);
        let left: Piece = if lo.is_finite() { Piece::quad(0.0, lo, 0.0) } else { Piece::Infinite };
        let right: Piece = if hi.is_finite() { Piece::quad(0.0, hi, 0.0) } else { Piece::Infinite };
        if lo == hi {
            // single point: linear everywhere
            return PlqFunction::affine(lo, 0.0);
        }
        PlqFunction::raw(vec![0.0], vec![left, right], vec![Finite(0.0)])
    }

    // ---- accessors ----

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    /// Index of the piece covering `x` when `x` is not a breakpoint.
    fn piece_index(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|&b| b < x)
    }

    pub fn eval(&self, x: f64) -> ExtReal {
        debug_assert!(!x.is_nan());
        // arguments reconstructed through arithmetic land ulps away from a
        // breakpoint; snapping keeps domain endpoints reachable
        let i = self.breakpoints.partition_point(|&b| b < x);
        let snap = 4.0 * f64::EPSILON * x.abs().max(1.0);
        for j in [i.wrapping_sub(1), i] {
            if let Some(&b) = self.breakpoints.get(j) {
                if (b - x).abs() <= snap {
                    return self.values[j];
                }
            }
        }
        self.pieces[self.piece_index(x)].eval(x)
    }

    /// Set of points with finite value.
    pub fn domain(&self) -> SetOnLine {
        let mut parts = vec![];
        let k = self.breakpoints.len();
        for (i, piece) in self.pieces.iter().enumerate() {
            if piece.is_finite() {
                let lo = if i == 0 { f64::NEG_INFINITY } else { self.breakpoints[i - 1] };
                let hi = if i == k { f64::INFINITY } else { self.breakpoints[i] };
                parts.push(Interval::new(lo, false, hi, false));
            }
        }
        for (i, v) in self.values.iter().enumerate() {
            if v.is_finite() {
                parts.push(Interval::point(self.breakpoints[i]));
            }
        }
        SetOnLine::from_intervals(parts)
    }

    pub fn is_proper(&self) -> bool {
        self.pieces.iter().any(Piece::is_finite) || self.values.iter().any(|v| v.is_finite())
    }

    /// Lower semicontinuous: every breakpoint value is at most both
    /// one-sided limits.
    pub fn is_lsc(&self) -> bool {
        self.breakpoints.iter().enumerate().all(|(i, &x)| {
            self.values[i] <= self.pieces[i].eval(x) && self.values[i] <= self.pieces[i + 1].eval(x)
        })
    }

    /// Replaces each breakpoint value by the minimum of itself and the two
    /// one-sided limits. This is the lsc hull for this function class.
    pub fn lsc_hull(&self) -> PlqFunction {
        let values = self
            .breakpoints
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                self.values[i].min(self.pieces[i].eval(x)).min(self.pieces[i + 1].eval(x))
            })
            .collect();
        PlqFunction::raw(self.breakpoints.clone(), self.pieces.clone(), values)
    }

    /// `None` when convex; otherwise a description of the first violation.
    /// Checks: properness, nonnegative curvature per piece, connected
    /// domain, value continuity at breakpoints inside the domain, and
    /// nondecreasing slopes across pieces.
    pub fn convexity_violation(&self) -> Option<String> {
        if !self.is_proper() {
            return Some("improper".into());
        }
        let dom = self.domain();
        if dom.components().len() > 1 {
            return Some("domain is not an interval".into());
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if let Piece::Quad { a, .. } = p {
                if *a < -1e-12 {
                    return Some(format!("negative curvature {a} on piece {i}"));
                }
            }
        }
        // value continuity where a breakpoint touches a finite piece
        for (i, &x) in self.breakpoints.iter().enumerate() {
            let v = self.values[i];
            for side in [self.pieces[i].eval(x), self.pieces[i + 1].eval(x)] {
                if let (Finite(v), Finite(lim)) = (v, side) {
                    if (v - lim).abs() > EXACT_TOL {
                        return Some(format!("value jump at breakpoint {x}: {v} vs limit {lim}"));
                    }
                }
                if v.is_pos_inf() && side.is_finite() {
                    return Some(format!("+inf value against finite piece at {x}"));
                }
            }
        }
        // slope monotonicity across the finite run
        let mut prev_slope: Option<f64> = None;
        let k = self.breakpoints.len();
        for (i, p) in self.pieces.iter().enumerate() {
            let Piece::Quad { a, b, .. } = p else { continue };
            let lo = if i == 0 { f64::NEG_INFINITY } else { self.breakpoints[i - 1] };
            let hi = if i == k { f64::INFINITY } else { self.breakpoints[i] };
            let slope_in = if lo.is_finite() { 2.0 * a * lo + b } else { f64::NEG_INFINITY };
            let slope_out = if hi.is_finite() { 2.0 * a * hi + b } else { f64::INFINITY };
            if let Some(prev) = prev_slope {
                if slope_in < prev - EXACT_TOL {
                    return Some(format!("slope drops from {prev} to {slope_in} entering piece {i}"));
                }
            }
            prev_slope = Some(slope_out);
        }
        None
    }

    pub fn convexity_check(&self) -> bool {
        self.convexity_violation().is_none()
    }

    // ---- affine reparameterizations ----

    /// `x -> f(x - p) - ps * x`.
    pub fn transform_shift_tilt(&self, p: f64, ps: f64) -> PlqFunction {
        assert!(p.is_finite() && ps.is_finite());
        let breakpoints: Vec<f64> = self.breakpoints.iter().map(|x| x + p).collect();
        let pieces = self
            .pieces
            .iter()
            .map(|piece| match piece {
                Piece::Infinite => Piece::Infinite,
                Piece::Quad { a, b, c } => Piece::quad(
                    *a,
                    -2.0 * a * p + b - ps,
                    a * p * p - b * p + c,
                ),
            })
            .collect();
        let values = self
            .values
            .iter()
            .zip(&breakpoints)
            .map(|(v, &x)| *v + Finite(-ps * x))
            .collect();
        PlqFunction::raw(breakpoints, pieces, values)
    }

    /// `x -> f(-x)`.
    pub fn reflect(&self) -> PlqFunction {
        let breakpoints: Vec<f64> = self.breakpoints.iter().rev().map(|x| -x).collect();
        let pieces = self
            .pieces
            .iter()
            .rev()
            .map(|piece| match piece {
                Piece::Infinite => Piece::Infinite,
                Piece::Quad { a, b, c } => Piece::quad(*a, -b, *c),
            })
            .collect();
        let values = self.values.iter().rev().cloned().collect();
        PlqFunction::raw(breakpoints, pieces, values)
    }

    /// `x -> f(t - x)` (reflection through `t/2`).
    pub fn precompose_sub(&self, t: f64) -> PlqFunction {
        self.reflect().transform_shift_tilt(t, 0.0)
    }

    pub fn plus_const(&self, t: f64) -> PlqFunction {
        assert!(t.is_finite());
        let pieces = self
            .pieces
            .iter()
            .map(|p| match p {
                Piece::Infinite => Piece::Infinite,
                Piece::Quad { a, b, c } => Piece::quad(*a, *b, c + t),
            })
            .collect();
        let values = self.values.iter().map(|v| *v + Finite(t)).collect();
        PlqFunction::raw(self.breakpoints.clone(), pieces, values)
    }

    /// Pointwise sum. The result is improper when the domains are disjoint;
    /// callers that need properness must check.
    pub fn add(&self, other: &PlqFunction) -> PlqFunction {
        let bps = merge_breakpoints(&self.breakpoints, &other.breakpoints);
        let mut pieces = Vec::with_capacity(bps.len() + 1);
        for i in 0..=bps.len() {
            let x = cell_probe(&bps, i);
            let pf = &self.pieces[self.piece_index(x)];
            let pg = &other.pieces[other.piece_index(x)];
            pieces.push(match (pf, pg) {
                (Piece::Quad { a, b, c }, Piece::Quad { a: a2, b: b2, c: c2 }) => {
                    Piece::quad(a + a2, b + b2, c + c2)
                }
                _ => Piece::Infinite,
            });
        }
        let values = bps.iter().map(|&x| self.eval(x) + other.eval(x)).collect();
        PlqFunction::raw(bps, pieces, values).normalized(0.0)
    }

    // ---- normalization and comparison ----

    /// Removes breakpoints that separate identical pieces (coefficients
    /// within `tol`) whose stored value agrees with the shared piece.
    pub fn normalized(&self, tol: f64) -> PlqFunction {
        let mut bps = vec![];
        let mut pieces = vec![self.pieces[0].clone()];
        let mut values = vec![];
        for i in 0..self.breakpoints.len() {
            let x = self.breakpoints[i];
            let prev = pieces.last().unwrap().clone();
            let next = &self.pieces[i + 1];
            let removable = prev.close_to(next, tol)
                && match (&prev, self.values[i]) {
                    (Piece::Infinite, v) => v.is_pos_inf(),
                    (q, v) => v.close_to(q.eval(x), tol),
                };
            if removable {
                continue;
            }
            bps.push(x);
            values.push(self.values[i]);
            pieces.push(next.clone());
        }
        PlqFunction::raw(bps, pieces, values)
    }

    /// Structural equality after normalization: same breakpoints, piece
    /// coefficients and breakpoint values, all within `tol`.
    pub fn approx_eq(&self, other: &PlqFunction, tol: f64) -> bool {
        let a = self.normalized(tol);
        let b = other.normalized(tol);
        if a.breakpoints.len() != b.breakpoints.len() {
            return false;
        }
        a.breakpoints.iter().zip(&b.breakpoints).all(|(x, y)| (x - y).abs() <= tol)
            && a.pieces.iter().zip(&b.pieces).all(|(p, q)| p.close_to(q, tol))
            && a.values.iter().zip(&b.values).all(|(v, w)| v.close_to(*w, tol))
    }

    // ---- minimization ----

    /// Global infimum together with the smallest attaining point, if the
    /// infimum is attained.
    pub fn minimize(&self) -> (ExtReal, Option<f64>) {
        // candidates: (value, attaining point or None for a limit)
        let mut cands: Vec<(ExtReal, Option<f64>)> = vec![];
        let k = self.breakpoints.len();
        for (i, piece) in self.pieces.iter().enumerate() {
            let Piece::Quad { a, b, c } = *piece else { continue };
            let lo = if i == 0 { f64::NEG_INFINITY } else { self.breakpoints[i - 1] };
            let hi = if i == k { f64::INFINITY } else { self.breakpoints[i] };
            if a > 0.0 {
                let xv = -b / (2.0 * a);
                if xv > lo && xv < hi {
                    cands.push((piece.eval(xv), Some(xv)));
                }
                if lo.is_finite() {
                    cands.push((piece.eval(lo), None));
                }
                if hi.is_finite() {
                    cands.push((piece.eval(hi), None));
                }
            } else if a == 0.0 {
                if b == 0.0 {
                    let rep = representative(lo, hi);
                    cands.push((Finite(c), Some(rep)));
                } else if b > 0.0 {
                    if lo.is_finite() {
                        cands.push((piece.eval(lo), None));
                    } else {
                        cands.push((NegInf, None));
                    }
                } else if hi.is_finite() {
                    cands.push((piece.eval(hi), None));
                } else {
                    cands.push((NegInf, None));
                }
            } else {
                for end in [lo, hi] {
                    if end.is_finite() {
                        cands.push((piece.eval(end), None));
                    } else {
                        cands.push((NegInf, None));
                    }
                }
            }
        }
        for (i, &v) in self.values.iter().enumerate() {
            if v.is_finite() {
                cands.push((v, Some(self.breakpoints[i])));
            }
        }
        if cands.is_empty() {
            return (PosInf, None);
        }
        let best = cands.iter().map(|(v, _)| *v).fold(PosInf, ExtReal::min);
        if best.is_neg_inf() {
            return (NegInf, None);
        }
        // piece-endpoint evaluations and stored breakpoint values coincide
        // mathematically but can round apart, so match attainment by ulps
        let ties_best = |v: ExtReal| match (v, best) {
            (Finite(a), Finite(b)) => (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0),
            (a, b) => a == b,
        };
        let argmin = cands
            .iter()
            .filter(|(v, x)| x.is_some() && ties_best(*v))
            .filter_map(|(_, x)| *x)
            .fold(f64::INFINITY, f64::min);
        (best, if argmin.is_finite() { Some(argmin) } else { None })
    }

    // ---- subdifferential and duality ----

    /// Subdifferential at `x` for convex lsc input: the closed interval of
    /// slopes between the one-sided derivatives, unbounded at domain ends.
    /// `None` when `f(x) = +inf`.
    pub fn subdifferential(&self, x: f64) -> Option<Interval> {
        if !self.eval(x).is_finite() {
            return None;
        }
        if let Ok(i) = self.breakpoints.binary_search_by(|b| b.partial_cmp(&x).unwrap()) {
            let left = self.pieces[i].slope(x).unwrap_or(f64::NEG_INFINITY);
            let right = self.pieces[i + 1].slope(x).unwrap_or(f64::INFINITY);
            return Some(Interval::new(left, left.is_finite(), right, right.is_finite()));
        }
        let s = self.pieces[self.piece_index(x)].slope(x)?;
        Some(Interval::point(s))
    }

    /// `f(x) + f*(xs) - x * xs`. Nonnegative; zero exactly when
    /// `xs` is a subgradient of `f` at `x`.
    pub fn fenchel_young_gap(&self, x: f64, xs: f64) -> Result<ExtReal> {
        let conj = self.conjugate()?;
        Ok(fenchel_young_gap_with(self, &conj, x, xs))
    }

    // ---- conjugation ----

    /// Fenchel conjugate `f*(s) = sup_x { s x - f(x) }`, exact. A nonconvex
    /// or non-lsc input is implicitly replaced by its closed convex hull
    /// (the conjugate does not distinguish them). Errors when the input is
    /// improper or admits no affine minorant (so the conjugate would be
    /// identically `+inf`).
    pub fn conjugate(&self) -> Result<PlqFunction> {
        if !self.is_proper() {
            return Err(Error::Improper);
        }
        if self.is_lsc() && self.convexity_check() {
            return self.conjugate_convex();
        }
        self.conjugate_general()
    }

    fn conjugate_convex(&self) -> Result<PlqFunction> {
        let run: Vec<usize> =
            (0..self.pieces.len()).filter(|&i| self.pieces[i].is_finite()).collect();
        if run.is_empty() {
            // domain is a single point (convexity guarantees exactly one)
            let i = self
                .values
                .iter()
                .position(|v| v.is_finite())
                .expect("proper function with no finite piece has a finite value");
            let x0 = self.breakpoints[i];
            let v = self.values[i].finite().unwrap();
            return Ok(PlqFunction::affine(x0, -v));
        }
        let i0 = run[0];
        let i1 = *run.last().unwrap();
        let k = self.breakpoints.len();
        let x_lo = if i0 == 0 { f64::NEG_INFINITY } else { self.breakpoints[i0 - 1] };
        let x_hi = if i1 == k { f64::INFINITY } else { self.breakpoints[i1] };

        // (s_lo, s_hi, piece) with contiguous nondecreasing slope ranges
        let mut segs: Vec<(f64, f64, Piece)> = vec![];
        let slope_at = |i: usize, x: f64| self.pieces[i].slope(x).unwrap();

        if x_lo.is_finite() {
            let v = self.values[i0 - 1].finite().expect("finite boundary value");
            segs.push((f64::NEG_INFINITY, slope_at(i0, x_lo), Piece::quad(0.0, x_lo, -v)));
        }
        for (pos, &i) in run.iter().enumerate() {
            let Piece::Quad { a, b, c } = self.pieces[i] else { unreachable!() };
            let l = if i == 0 { f64::NEG_INFINITY } else { self.breakpoints[i - 1] };
            let u = if i == k { f64::INFINITY } else { self.breakpoints[i] };
            if a > 0.0 {
                let s_lo = if l.is_finite() { 2.0 * a * l + b } else { f64::NEG_INFINITY };
                let s_hi = if u.is_finite() { 2.0 * a * u + b } else { f64::INFINITY };
                segs.push((
                    s_lo,
                    s_hi,
                    Piece::quad(1.0 / (4.0 * a), -b / (2.0 * a), b * b / (4.0 * a) - c),
                ));
            }
            if pos + 1 < run.len() {
                // kink between consecutive finite pieces
                let x = self.breakpoints[i];
                let v = self.values[i].finite().expect("interior breakpoint value is finite");
                let s_l = slope_at(i, x);
                let s_r = slope_at(i + 1, x);
                if s_r > s_l {
                    segs.push((s_l, s_r, Piece::quad(0.0, x, -v)));
                }
            }
        }
        if x_hi.is_finite() {
            let v = self.values[i1].finite().expect("finite boundary value");
            segs.push((slope_at(i1, x_hi), f64::INFINITY, Piece::quad(0.0, x_hi, -v)));
        }

        segs.retain(|(lo, hi, _)| lo < hi);
        // Junction slopes reached through different arithmetic (piece-top,
        // kink, next piece-bottom) can disagree by an ulp and invert the
        // dual breakpoint order; stitch each start up to the running end.
        if !segs.is_empty() {
            let mut run_hi = segs[0].1;
            for idx in 1..segs.len() {
                if segs[idx].0 < run_hi {
                    segs[idx].0 = run_hi;
                }
                run_hi = run_hi.max(segs[idx].1);
            }
        }
        segs.retain(|(lo, hi, _)| lo < hi);
        // C1 junctions leave cells a few ulps wide (both side slopes name
        // the same real number); keeping them would thread rounding noise
        // into the output partition
        let sliver = |s: &(f64, f64, Piece)| {
            s.0.is_finite()
                && s.1.is_finite()
                && s.1 - s.0 <= 32.0 * f64::EPSILON * s.0.abs().max(s.1.abs()).max(1.0)
        };
        if !segs.iter().all(sliver) {
            segs.retain(|s| !sliver(s));
        }
        if segs.is_empty() {
            // f is a single affine piece on the whole line: conjugate is an
            // indicator of one slope
            let Piece::Quad { b, c, .. } = self.pieces[i0] else { unreachable!() };
            return Ok(PlqFunction::raw(
                vec![b],
                vec![Piece::Infinite, Piece::Infinite],
                vec![Finite(-c)],
            ));
        }
        Ok(assemble_from_segments(&segs))
    }

    fn conjugate_general(&self) -> Result<PlqFunction> {
        let k = self.breakpoints.len();
        let mut parts: Vec<PlqFunction> = vec![];
        for (i, piece) in self.pieces.iter().enumerate() {
            let Piece::Quad { a, b, c } = *piece else { continue };
            let l = if i == 0 { f64::NEG_INFINITY } else { self.breakpoints[i - 1] };
            let u = if i == k { f64::INFINITY } else { self.breakpoints[i] };
            parts.push(conjugate_of_piece(l, u, a, b, c)?);
        }
        for (i, v) in self.values.iter().enumerate() {
            if let Finite(v) = v {
                parts.push(PlqFunction::affine(self.breakpoints[i], -v));
            }
        }
        let mut acc = parts.pop().ok_or(Error::Improper)?;
        for p in parts {
            acc = pointwise_max(&acc, &p);
        }
        Ok(acc.normalized(0.0))
    }

    // ---- JSON ----

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(PlqJson::from(self)).expect("plq serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: PlqJson = serde_json::from_value(v.clone())?;
        raw.build()
    }
}

/// `f(x) + f*(xs) - x * xs` with a precomputed conjugate.
pub fn fenchel_young_gap_with(f: &PlqFunction, conj: &PlqFunction, x: f64, xs: f64) -> ExtReal {
    f.eval(x) + conj.eval(xs) + Finite(-x * xs)
}

/// Conjugate of one quadratic restricted to `[l, u]` (full-line domain
/// result). Errors when the restricted piece has no affine minorant.
fn conjugate_of_piece(l: f64, u: f64, a: f64, b: f64, c: f64) -> Result<PlqFunction> {
    if a > 0.0 || (a == 0.0 && l.is_finite() && u.is_finite()) || (a < 0.0 && l.is_finite() && u.is_finite())
    {
        if a > 0.0 {
            let mut segs: Vec<(f64, f64, Piece)> = vec![];
            let s_lo = if l.is_finite() { 2.0 * a * l + b } else { f64::NEG_INFINITY };
            let s_hi = if u.is_finite() { 2.0 * a * u + b } else { f64::INFINITY };
            if l.is_finite() {
                let fl = (a * l + b) * l + c;
                segs.push((f64::NEG_INFINITY, s_lo, Piece::quad(0.0, l, -fl)));
            }
            segs.push((s_lo, s_hi, Piece::quad(1.0 / (4.0 * a), -b / (2.0 * a), b * b / (4.0 * a) - c)));
            if u.is_finite() {
                let fu = (a * u + b) * u + c;
                segs.push((s_hi, f64::INFINITY, Piece::quad(0.0, u, -fu)));
            }
            segs.retain(|(lo, hi, _)| lo < hi);
            return Ok(assemble_from_segments(&segs));
        }
        // bounded interval, affine or concave: sup sits at an endpoint
        let fl = (a * l + b) * l + c;
        let fu = (a * u + b) * u + c;
        let left = PlqFunction::affine(l, -fl);
        let right = PlqFunction::affine(u, -fu);
        return Ok(pointwise_max(&left, &right));
    }
    if a == 0.0 {
        // affine on an unbounded interval
        return Ok(match (l.is_finite(), u.is_finite()) {
            (false, false) => PlqFunction::raw(
                vec![b],
                vec![Piece::Infinite, Piece::Infinite],
                vec![Finite(-c)],
            ),
            (false, true) => {
                let fu = b * u + c;
                PlqFunction::raw(
                    vec![b],
                    vec![Piece::Infinite, Piece::quad(0.0, u, -fu)],
                    vec![Finite(-c)],
                )
            }
            (true, false) => {
                let fl = b * l + c;
                PlqFunction::raw(
                    vec![b],
                    vec![Piece::quad(0.0, l, -fl), Piece::Infinite],
                    vec![Finite(-c)],
                )
            }
            (true, true) => unreachable!(),
        });
    }
    // concave on an unbounded interval: no affine minorant anywhere
    Err(Error::Improper)
}

/// Builds a function from contiguous `(s_lo, s_hi, piece)` segments sorted
/// by slope, filling `+inf` outside the covered range. Boundary values come
/// from the adjacent finite piece.
fn assemble_from_segments(segs: &[(f64, f64, Piece)]) -> PlqFunction {
    debug_assert!(!segs.is_empty());
    let mut bps: Vec<f64> = vec![];
    let mut pieces: Vec<Piece> = vec![];
    let mut values: Vec<ExtReal> = vec![];

    let (first_lo, _, first_piece) = &segs[0];
    if first_lo.is_finite() {
        bps.push(*first_lo);
        pieces.push(Piece::Infinite);
        values.push(first_piece.eval(*first_lo));
    }
    for (idx, (lo, hi, piece)) in segs.iter().enumerate() {
        debug_assert!(lo < hi, "zero-length segment survived");
        if idx > 0 {
            debug_assert!((segs[idx - 1].1 - lo).abs() < 1e-9, "gap between segments");
            bps.push(*lo);
            // both one-sided limits name the same real number; storing the
            // lower float keeps the result lsc under its own evaluation
            values.push(piece.eval(*lo).min(segs[idx - 1].2.eval(*lo)));
        }
        pieces.push(piece.clone());
        if idx + 1 == segs.len() && hi.is_finite() {
            bps.push(*hi);
            values.push(piece.eval(*hi));
            pieces.push(Piece::Infinite);
        }
    }
    PlqFunction::raw(bps, pieces, values).normalized(0.0)
}

/// Union of two sorted breakpoint lists, exact dedup.
fn merge_breakpoints(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i] <= b[j]);
        let x = if take_a {
            let x = a[i];
            i += 1;
            x
        } else {
            let x = b[j];
            j += 1;
            x
        };
        if out.last() != Some(&x) {
            out.push(x);
        }
    }
    out
}

/// A representative interior point of cell `i` of the partition induced by
/// `bps` (cell 0 is `(-inf, bps[0])`, cell `len` is `(last, +inf)`).
fn cell_probe(bps: &[f64], i: usize) -> f64 {
    if bps.is_empty() {
        return 0.0;
    }
    if i == 0 {
        bps[0] - 1.0
    } else if i == bps.len() {
        bps[bps.len() - 1] + 1.0
    } else {
        0.5 * (bps[i - 1] + bps[i])
    }
}

fn representative(lo: f64, hi: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo + 1.0,
        (false, true) => hi - 1.0,
        (false, false) => 0.0,
    }
}

/// Real roots of `a x^2 + b x + c`, ascending. Degenerate (identically
/// zero) inputs produce no roots.
fn quad_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        if b == 0.0 {
            return vec![];
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    if disc == 0.0 {
        return vec![-b / (2.0 * a)];
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    let (r1, r2) = if b == 0.0 {
        let r = sq / (2.0 * a);
        (-r, r)
    } else {
        (q / a, c / q)
    };
    let mut rs = vec![r1, r2];
    rs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    rs
}

// Piece crossings reported beyond this magnitude come from coefficient
// rounding noise (ulp-level slope differences put them near 1e16), and
// f64 evaluation cannot rank the pieces out there anyway.
const CROSSING_HORIZON: f64 = 1e9;

fn combine(f: &PlqFunction, g: &PlqFunction, take_min: bool) -> PlqFunction {
    let base = merge_breakpoints(&f.breakpoints, &g.breakpoints);
    // refine cells at crossings of the two quadratics
    let mut bps: Vec<f64> = vec![];
    for i in 0..=base.len() {
        let lo = if i == 0 { f64::NEG_INFINITY } else { base[i - 1] };
        let hi = if i == base.len() { f64::INFINITY } else { base[i] };
        if lo.is_finite() {
            bps.push(lo);
        }
        let x = representative(lo, hi);
        if let (Piece::Quad { a, b, c }, Piece::Quad { a: a2, b: b2, c: c2 }) =
            (&f.pieces[f.piece_index(x)], &g.pieces[g.piece_index(x)])
        {
            for r in quad_roots(a - a2, b - b2, c - c2) {
                if r > lo
                    && r < hi
                    && r.abs() <= CROSSING_HORIZON
                    && bps.last().map_or(true, |&p| r > p)
                {
                    bps.push(r);
                }
            }
        }
    }
    let mut pieces: Vec<Piece> = Vec::with_capacity(bps.len() + 1);
    for i in 0..=bps.len() {
        let lo = if i == 0 { f64::NEG_INFINITY } else { bps[i - 1] };
        let hi = if i == bps.len() { f64::INFINITY } else { bps[i] };
        let x = representative(lo, hi);
        let pf = &f.pieces[f.piece_index(x)];
        let pg = &g.pieces[g.piece_index(x)];
        pieces.push(match (pf, pg) {
            (Piece::Infinite, q) => {
                if take_min {
                    q.clone()
                } else {
                    Piece::Infinite
                }
            }
            (p, Piece::Infinite) => {
                if take_min {
                    p.clone()
                } else {
                    Piece::Infinite
                }
            }
            (p, q) => {
                let keep_f = if take_min {
                    p.eval(x) <= q.eval(x)
                } else {
                    p.eval(x) >= q.eval(x)
                };
                if keep_f {
                    p.clone()
                } else {
                    q.clone()
                }
            }
        });
    }
    let values = bps
        .iter()
        .map(|&x| {
            let (a, b) = (f.eval(x), g.eval(x));
            if take_min {
                a.min(b)
            } else {
                a.max(b)
            }
        })
        .collect();
    PlqFunction::raw(bps, pieces, values).normalized(0.0)
}

pub fn pointwise_min(f: &PlqFunction, g: &PlqFunction) -> PlqFunction {
    combine(f, g, true)
}

pub fn pointwise_max(f: &PlqFunction, g: &PlqFunction) -> PlqFunction {
    combine(f, g, false)
}

// ---- infimal convolution ----

/// Value function of `inf_x { f(x) + g(a - x) }` together with the inputs,
/// kept so that attaining points can be recovered per query.
#[derive(Clone, Debug)]
pub struct InfConvolution {
    pub value: PlqFunction,
    f: PlqFunction,
    g: PlqFunction,
}

impl InfConvolution {
    /// Smallest `x` attaining the infimum at `a`, or `None` when the value
    /// is infinite or the infimum is not attained.
    pub fn witness(&self, a: f64) -> Option<f64> {
        let target = self.value.eval(a).finite()?;
        let mut cands: Vec<f64> = vec![];
        for (i, &x0) in self.f.breakpoints.iter().enumerate() {
            if self.f.values[i].is_finite() {
                cands.push(x0);
            }
        }
        for (j, &y0) in self.g.breakpoints.iter().enumerate() {
            if self.g.values[j].is_finite() {
                cands.push(a - y0);
            }
        }
        let kf = self.f.breakpoints.len();
        let kg = self.g.breakpoints.len();
        for i in 0..=kf {
            let Piece::Quad { a: a1, b: b1, .. } = self.f.pieces[i] else { continue };
            let lf = if i == 0 { f64::NEG_INFINITY } else { self.f.breakpoints[i - 1] };
            let uf = if i == kf { f64::INFINITY } else { self.f.breakpoints[i] };
            for j in 0..=kg {
                let Piece::Quad { a: a2, b: b2, .. } = self.g.pieces[j] else { continue };
                let lg = if j == 0 { f64::NEG_INFINITY } else { self.g.breakpoints[j - 1] };
                let ug = if j == kg { f64::INFINITY } else { self.g.breakpoints[j] };
                let xlo = lf.max(a - ug);
                let xhi = uf.min(a - lg);
                if xlo > xhi {
                    continue;
                }
                if xlo.is_finite() {
                    cands.push(xlo);
                }
                if xhi.is_finite() {
                    cands.push(xhi);
                }
                let a2sum = a1 + a2;
                if a2sum > 0.0 {
                    let xv = (2.0 * a2 * a + b2 - b1) / (2.0 * a2sum);
                    if xv >= xlo && xv <= xhi {
                        cands.push(xv);
                    }
                } else if a1 == 0.0 && a2 == 0.0 && b1 == b2 {
                    // flat pair region: every point attains, and the finite
                    // endpoints above are absent when the region is a full
                    // line, so pick a representative
                    cands.push(0.0f64.clamp(xlo, xhi));
                }
            }
        }
        let mut best: Option<f64> = None;
        for x in cands {
            if let (Finite(vf), Finite(vg)) = (self.f.eval(x), self.g.eval(a - x)) {
                if vf + vg <= target + 1e-9 {
                    best = Some(match best {
                        Some(b) => b.min(x),
                        None => x,
                    });
                }
            }
        }
        best
    }
}

/// Exact infimal convolution `(f [] g)(a) = inf_x { f(x) + g(a - x) }` for
/// proper inputs. Errors when the value is `-inf` somewhere.
pub fn inf_convolution(f: &PlqFunction, g: &PlqFunction) -> Result<InfConvolution> {
    if !f.is_proper() || !g.is_proper() {
        return Err(Error::Improper);
    }
    let parts = infconv_parts(f, g)?;
    let mut acc: Option<PlqFunction> = None;
    for p in parts {
        acc = Some(match acc {
            Some(a) => pointwise_min(&a, &p),
            None => p,
        });
    }
    let acc = acc.ok_or(Error::Improper)?;
    Ok(InfConvolution { value: acc.normalized(0.0), f: f.clone(), g: g.clone() })
}

#[doc(hidden)]
pub fn infconv_parts(f: &PlqFunction, g: &PlqFunction) -> Result<Vec<PlqFunction>> {
    let mut parts: Vec<PlqFunction> = vec![];
    for (i, v) in f.values.iter().enumerate() {
        if let Finite(v) = v {
            parts.push(g.transform_shift_tilt(f.breakpoints[i], 0.0).plus_const(*v));
        }
    }
    for (j, w) in g.values.iter().enumerate() {
        if let Finite(w) = w {
            parts.push(f.transform_shift_tilt(g.breakpoints[j], 0.0).plus_const(*w));
        }
    }
    let kf = f.breakpoints.len();
    let kg = g.breakpoints.len();
    for i in 0..=kf {
        let Piece::Quad { a: a1, b: b1, c: c1 } = f.pieces[i] else { continue };
        let lf = if i == 0 { f64::NEG_INFINITY } else { f.breakpoints[i - 1] };
        let uf = if i == kf { f64::INFINITY } else { f.breakpoints[i] };
        for j in 0..=kg {
            let Piece::Quad { a: a2, b: b2, c: c2 } = g.pieces[j] else { continue };
            let lg = if j == 0 { f64::NEG_INFINITY } else { g.breakpoints[j - 1] };
            let ug = if j == kg { f64::INFINITY } else { g.breakpoints[j] };
            parts.push(pair_partial(lf, uf, (a1, b1, c1), lg, ug, (a2, b2, c2))?);
        }
    }
    Ok(parts)
}

/// Partial value function for one pair of quadratic pieces:
/// `h(t) = inf { f1(x) + f2(t - x) : x in [lf, uf], t - x in [lg, ug] }`.
fn pair_partial(
    lf: f64,
    uf: f64,
    (a1, b1, c1): (f64, f64, f64),
    lg: f64,
    ug: f64,
    (a2, b2, c2): (f64, f64, f64),
) -> Result<PlqFunction> {
    let lo = lf + lg; // -inf + finite behaves
    let hi = uf + ug;
    let a_sum = a1 + a2;

    // φ_t(x) = a_sum x^2 + B(t) x + C(t)
    // B(t) = b1 - b2 - 2 a2 t, C(t) = a2 t^2 + b2 t + c1 + c2
    // candidate minimizer branches, each affine in t: x = p t + q
    let vertex: Option<(f64, f64)> = if a_sum > 0.0 {
        Some((a2 / a_sum, (b2 - b1) / (2.0 * a_sum)))
    } else {
        None
    };
    let l_branches: Vec<(f64, f64)> = {
        let mut v = vec![];
        if lf.is_finite() {
            v.push((0.0, lf));
        }
        if ug.is_finite() {
            v.push((1.0, -ug));
        }
        v
    };
    let u_branches: Vec<(f64, f64)> = {
        let mut v = vec![];
        if uf.is_finite() {
            v.push((0.0, uf));
        }
        if lg.is_finite() {
            v.push((1.0, -lg));
        }
        v
    };

    // split points where the active branch can change; the horizon keeps
    // rounding-noise crossings of near-parallel branches out
    let mut splits: Vec<f64> = vec![];
    let mut push = |t: f64| {
        if t.is_finite() && t.abs() <= CROSSING_HORIZON && t > lo && t < hi {
            splits.push(t);
        }
    };
    if lf.is_finite() && ug.is_finite() {
        push(lf + ug);
    }
    if uf.is_finite() && lg.is_finite() {
        push(uf + lg);
    }
    if let Some((p, q)) = vertex {
        for &(bp, bq) in l_branches.iter().chain(u_branches.iter()) {
            if (p - bp).abs() > 0.0 {
                push((bq - q) / (p - bp));
            }
        }
    }
    if a_sum == 0.0 && a2 != 0.0 {
        push((b1 - b2) / (2.0 * a2));
    }
    splits.sort_by(|x, y| x.partial_cmp(y).unwrap());
    splits.dedup();

    let mut cell_edges: Vec<f64> = vec![];
    if lo.is_finite() {
        cell_edges.push(lo);
    }
    cell_edges.extend_from_slice(&splits);
    if hi.is_finite() {
        cell_edges.push(hi);
    }
    cell_edges.dedup();

    let subst = |p: f64, q: f64| -> Piece {
        Piece::quad(
            a_sum * p * p - 2.0 * a2 * p + a2,
            2.0 * a_sum * p * q + (b1 - b2) * p - 2.0 * a2 * q + b2,
            a_sum * q * q + (b1 - b2) * q + c1 + c2,
        )
    };
    let active = |branches: &[(f64, f64)], t: f64, want_max: bool| -> Option<(f64, f64)> {
        branches
            .iter()
            .copied()
            .max_by(|(p1, q1), (p2, q2)| {
                let v1 = p1 * t + q1;
                let v2 = p2 * t + q2;
                let ord = v1.partial_cmp(&v2).unwrap();
                if want_max {
                    ord
                } else {
                    ord.reverse()
                }
            })
            .map(|(p, q)| (p, q))
    };

    // assemble pieces cell by cell inside [lo, hi]
    let mut out_bps: Vec<f64> = vec![];
    let mut out_pieces: Vec<Piece> = vec![];
    if lo.is_finite() {
        out_pieces.push(Piece::Infinite);
    }
    let n_cells = cell_edges.len() + 1;
    let mut cell_pieces: Vec<(f64, f64, Vec<Piece>)> = vec![];
    for ci in 0..n_cells {
        let c_lo = if ci == 0 { f64::NEG_INFINITY } else { cell_edges[ci - 1] };
        let c_hi = if ci == cell_edges.len() { f64::INFINITY } else { cell_edges[ci] };
        // skip cells outside the domain
        if c_hi <= lo || c_lo >= hi {
            continue;
        }
        let t = representative(c_lo.max(lo), c_hi.min(hi));
        let lb = active(&l_branches, t, true);
        let ub = active(&u_branches, t, false);
        let mut quads: Vec<Piece> = vec![];
        if a_sum > 0.0 {
            let (p, q) = vertex.unwrap();
            let xv = p * t + q;
            let l_val = lb.map(|(bp, bq)| bp * t + bq).unwrap_or(f64::NEG_INFINITY);
            let u_val = ub.map(|(bp, bq)| bp * t + bq).unwrap_or(f64::INFINITY);
            let branch = if xv < l_val {
                lb.unwrap()
            } else if xv > u_val {
                ub.unwrap()
            } else {
                (p, q)
            };
            quads.push(subst(branch.0, branch.1));
        } else if a_sum == 0.0 {
            let slope = b1 - b2 - 2.0 * a2 * t;
            if slope.abs() == 0.0 && a2 == 0.0 {
                quads.push(subst(0.0, 0.0));
            } else if slope > 0.0 {
                match lb {
                    Some((p, q)) => quads.push(subst(p, q)),
                    None => {
                        return Err(Error::UnboundedBelow(format!(
                            "inf-convolution dives to -inf near t = {t}"
                        )))
                    }
                }
            } else {
                match ub {
                    Some((p, q)) => quads.push(subst(p, q)),
                    None => {
                        return Err(Error::UnboundedBelow(format!(
                            "inf-convolution dives to -inf near t = {t}"
                        )))
                    }
                }
            }
        } else {
            // concave: minimum at one of the interval ends
            match (lb, ub) {
                (Some((p1, q1)), Some((p2, q2))) => {
                    quads.push(subst(p1, q1));
                    quads.push(subst(p2, q2));
                }
                _ => {
                    return Err(Error::UnboundedBelow(
                        "concave objective on an unbounded section".into(),
                    ))
                }
            }
        }
        cell_pieces.push((c_lo.max(lo), c_hi.min(hi), quads));
    }

    // stitch cells into a single function, resolving two-candidate cells
    // through pointwise_min of full functions on that cell
    let mut out_values: Vec<ExtReal> = vec![];
    for (c_lo, c_hi, quads) in cell_pieces {
        let piece = if quads.len() == 1 {
            quads[0].clone()
        } else {
            // compare the two candidates on the cell; split at crossings
            let fa = PlqFunction::raw(vec![], vec![quads[0].clone()], vec![]);
            let fb = PlqFunction::raw(vec![], vec![quads[1].clone()], vec![]);
            let m = pointwise_min(&fa, &fb);
            // m may have interior crossings inside (c_lo, c_hi): inline them
            let mut last_piece: Option<Piece> = None;
            for (idx, p) in m.pieces.iter().enumerate() {
                let p_lo = if idx == 0 { f64::NEG_INFINITY } else { m.breakpoints[idx - 1] };
                let p_hi =
                    if idx == m.breakpoints.len() { f64::INFINITY } else { m.breakpoints[idx] };
                let s_lo = p_lo.max(c_lo);
                let s_hi = p_hi.min(c_hi);
                if s_lo >= s_hi {
                    continue;
                }
                if let Some(prev) = &last_piece {
                    if !prev.close_to(p, 0.0) {
                        out_bps.push(s_lo);
                        out_values.push(p.eval(s_lo));
                        out_pieces.push(p.clone());
                        last_piece = Some(p.clone());
                        continue;
                    } else {
                        continue;
                    }
                }
                if c_lo.is_finite() {
                    out_bps.push(c_lo);
                    out_values.push(p.eval(c_lo));
                }
                out_pieces.push(p.clone());
                last_piece = Some(p.clone());
            }
            continue;
        };
        if c_lo.is_finite() {
            out_bps.push(c_lo);
            out_values.push(piece.eval(c_lo));
        }
        out_pieces.push(piece);
    }
    if hi.is_finite() {
        out_bps.push(hi);
        let last = out_pieces.last().unwrap().clone();
        out_values.push(last.eval(hi));
        out_pieces.push(Piece::Infinite);
    }
    debug_assert_eq!(out_pieces.len(), out_bps.len() + 1);
    Ok(PlqFunction::raw(out_bps, out_pieces, out_values).normalized(0.0))
}

// ---- random generation for property suites ----

/// Random proper convex lsc function: up to four kinks, mixed affine and
/// strictly convex pieces, optional indicator walls. Coefficients stay
/// small so chained exact operations keep well within 1e-9.
pub fn random_convex<R: Rng + ?Sized>(rng: &mut R) -> PlqFunction {
    let k = rng.gen_range(0..=4usize);
    let mut bps: Vec<f64> = (0..k).map(|_| rng.gen_range(-4.0..4.0)).collect();
    bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bps.dedup_by(|a, b| (*a - *b).abs() < 0.3);
    let k = bps.len();

    let wall_left = k > 0 && rng.gen_bool(0.3);
    let wall_right = k > 0 && rng.gen_bool(0.3);

    let mut pieces: Vec<Piece> = Vec::with_capacity(k + 1);
    let mut values: Vec<ExtReal> = Vec::with_capacity(k);

    // walk left to right keeping slope and value continuous
    let mut slope = rng.gen_range(-3.0..3.0);
    let mut val = rng.gen_range(-2.0..2.0);
    for i in 0..=k {
        let lo = if i == 0 { f64::NEG_INFINITY } else { bps[i - 1] };
        let hi = if i == k { f64::INFINITY } else { bps[i] };
        let infinite = (i == 0 && wall_left) || (i == k && wall_right);
        if infinite {
            pieces.push(Piece::Infinite);
            if i < k {
                values.push(Finite(val));
            }
            continue;
        }
        let a = if rng.gen_bool(0.4) { 0.0 } else { rng.gen_range(0.05..1.5) };
        let piece = if lo.is_finite() {
            let b = slope - 2.0 * a * lo;
            let c = val - (a * lo + b) * lo;
            Piece::quad(a, b, c)
        } else {
            // leftmost unbounded piece: choose the slope at hi (or at 0)
            let anchor = if hi.is_finite() { hi } else { 0.0 };
            let b = slope - 2.0 * a * anchor;
            let c = val - (a * anchor + b) * anchor;
            Piece::quad(a, b, c)
        };
        pieces.push(piece.clone());
        if hi.is_finite() {
            val = piece.eval(hi).finite().unwrap();
            slope = piece.slope(hi).unwrap() + if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..2.0) };
            if i < k {
                values.push(Finite(val));
            }
        }
    }
    // anchored evaluation can land an ulp off the stored value; snapping to
    // the one-sided limits keeps the result exactly lsc
    let f = PlqFunction::raw(bps, pieces, values).lsc_hull();
    debug_assert!(f.convexity_check(), "generator produced non-convex: {f}");
    f
}

// ---- JSON form ----

#[derive(Serialize, Deserialize)]
struct PlqJson {
    breakpoints: Vec<f64>,
    pieces: Vec<PieceJson>,
    values: Vec<ExtReal>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PieceJson {
    Quad { a: f64, b: f64, c: f64 },
    Tag(String),
}

impl From<&PlqFunction> for PlqJson {
    fn from(f: &PlqFunction) -> Self {
        PlqJson {
            breakpoints: f.breakpoints.clone(),
            pieces: f
                .pieces
                .iter()
                .map(|p| match p {
                    Piece::Quad { a, b, c } => PieceJson::Quad { a: *a, b: *b, c: *c },
                    Piece::Infinite => PieceJson::Tag("inf".into()),
                })
                .collect(),
            values: f.values.clone(),
        }
    }
}

impl PlqJson {
    fn build(self) -> Result<PlqFunction> {
        let pieces = self
            .pieces
            .into_iter()
            .map(|p| match p {
                PieceJson::Quad { a, b, c } => Ok(Piece::quad(a, b, c)),
                PieceJson::Tag(t) if t == "inf" => Ok(Piece::Infinite),
                PieceJson::Tag(t) => Err(Error::Malformed(format!("unknown piece tag {t:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        PlqFunction::new(self.breakpoints, pieces, self.values)
    }
}

impl Serialize for PlqFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PlqJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PlqFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PlqJson::deserialize(d)?;
        raw.build().map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for PlqFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.breakpoints.len();
        for i in 0..=k {
            let lo = if i == 0 { "-inf".to_string() } else { format!("{}", self.breakpoints[i - 1]) };
            let hi = if i == k { "+inf".to_string() } else { format!("{}", self.breakpoints[i]) };
            match &self.pieces[i] {
                Piece::Infinite => writeln!(f, "  ({lo}, {hi}): +inf")?,
                Piece::Quad { a, b, c } => {
                    writeln!(f, "  ({lo}, {hi}): {a}*x^2 + {b}*x + {c}")?
                }
            }
            if i < k {
                writeln!(f, "  [{}]: {}", self.breakpoints[i], self.values[i])?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_square() -> PlqFunction {
        PlqFunction::quadratic(0.5, 0.0, 0.0)
    }

    // -------- eval --------

    #[test]
    fn eval_uses_stored_breakpoint_values() {
        let f = PlqFunction::indicator(0.0, f64::INFINITY);
        assert_eq!(f.eval(0.0), Finite(0.0));
        assert_eq!(f.eval(-0.5), PosInf);
        assert_eq!(f.eval(3.0), Finite(0.0));
    }

    #[test]
    fn eval_point_indicator() {
        let f = PlqFunction::point_indicator(2.0);
        assert_eq!(f.eval(2.0), Finite(0.0));
        assert_eq!(f.eval(1.999999), PosInf);
    }

    #[test]
    fn eval_abs() {
        let f = PlqFunction::abs_fn();
        assert_eq!(f.eval(-3.0), Finite(3.0));
        assert_eq!(f.eval(0.0), Finite(0.0));
        assert_eq!(f.eval(2.5), Finite(2.5));
    }

    // -------- convexity / lsc --------

    #[test]
    fn convexity_flags_negative_curvature() {
        let f = PlqFunction::quadratic(-1.0, 0.0, 0.0);
        assert!(!f.convexity_check());
        assert!(f.convexity_violation().unwrap().contains("curvature"));
    }

    #[test]
    fn convexity_flags_disconnected_domain() {
        let f = PlqFunction::new(
            vec![0.0, 1.0],
            vec![Piece::constant(0.0), Piece::Infinite, Piece::constant(0.0)],
            vec![Finite(0.0), Finite(0.0)],
        )
        .unwrap();
        assert!(!f.convexity_check());
    }

    #[test]
    fn convexity_accepts_indicators_and_abs() {
        assert!(PlqFunction::indicator(0.0, 1.0).convexity_check());
        assert!(PlqFunction::point_indicator(0.0).convexity_check());
        assert!(PlqFunction::abs_fn().convexity_check());
        assert!(half_square().convexity_check());
    }

    #[test]
    fn lsc_hull_lowers_raised_value() {
        // 1 at x = 0, 0 elsewhere
        let f = PlqFunction::new(
            vec![0.0],
            vec![Piece::constant(0.0), Piece::constant(0.0)],
            vec![Finite(1.0)],
        )
        .unwrap();
        assert!(!f.is_lsc());
        let h = f.lsc_hull();
        assert_eq!(h.eval(0.0), Finite(0.0));
        assert!(h.is_lsc());
    }

    // -------- conjugate --------

    #[test]
    fn conjugate_of_half_square_is_itself() {
        let c = half_square().conjugate().unwrap();
        assert!(c.approx_eq(&half_square(), 1e-12));
    }

    #[test]
    fn conjugate_of_abs_is_box_indicator() {
        let c = PlqFunction::abs_fn().conjugate().unwrap();
        assert!(c.approx_eq(&PlqFunction::indicator(-1.0, 1.0), 1e-12));
    }

    #[test]
    fn conjugate_of_halfline_indicator() {
        let c = PlqFunction::indicator(0.0, f64::INFINITY).conjugate().unwrap();
        assert!(c.approx_eq(&PlqFunction::indicator(f64::NEG_INFINITY, 0.0), 1e-12));
    }

    #[test]
    fn conjugate_of_point_indicator_is_linear() {
        let c = PlqFunction::point_indicator(0.0).conjugate().unwrap();
        assert!(c.approx_eq(&PlqFunction::constant(0.0), 1e-12));
        let c2 = PlqFunction::point_indicator(2.0).conjugate().unwrap();
        assert!(c2.approx_eq(&PlqFunction::affine(2.0, 0.0), 1e-12));
    }

    #[test]
    fn conjugate_of_affine_is_point_indicator() {
        let c = PlqFunction::affine(3.0, 1.0).conjugate().unwrap();
        assert_eq!(c.eval(3.0), Finite(-1.0));
        assert_eq!(c.eval(2.0), PosInf);
    }

    #[test]
    fn conjugate_of_nonconvex_goes_through_hull() {
        // min(|x - 1|, |x + 1|) is nonconvex; its conjugate equals the
        // conjugate of the hull
        let left = PlqFunction::abs_fn().transform_shift_tilt(-1.0, 0.0);
        let right = PlqFunction::abs_fn().transform_shift_tilt(1.0, 0.0);
        let w = pointwise_min(&left, &right);
        assert!(!w.convexity_check());
        let c = w.conjugate().unwrap();
        // hull is the "flat-bottomed" |.|: 0 on [-1,1], |x|-1 outside;
        // conjugate: sup s x - hull = |s| <= 1 ? |s| : +inf
        assert_eq!(c.eval(0.5), Finite(0.5));
        assert_eq!(c.eval(-0.25), Finite(0.25));
        assert_eq!(c.eval(1.5), PosInf);
    }

    #[test]
    fn conjugate_rejects_unbounded_below() {
        let f = PlqFunction::quadratic(-1.0, 0.0, 0.0);
        assert!(matches!(f.conjugate(), Err(Error::Improper)));
    }

    #[test]
    fn biconjugate_recovers_convex_lsc() {
        let cases = vec![
            half_square(),
            PlqFunction::abs_fn(),
            PlqFunction::indicator(-1.0, 2.0),
            PlqFunction::support_fn(0.0, 1.0),
            PlqFunction::point_indicator(-0.5),
            PlqFunction::affine(2.0, -1.0),
        ];
        for f in cases {
            let ff = f.conjugate().unwrap().conjugate().unwrap();
            assert!(ff.approx_eq(&f, 1e-9), "biconjugate mismatch:\n{f}\nvs\n{ff}");
        }
    }

    // -------- shift / tilt / reflect --------

    #[test]
    fn shift_tilt_matches_pointwise() {
        let f = PlqFunction::abs_fn();
        let g = f.transform_shift_tilt(1.5, -2.0);
        for x in [-3.0, -1.0, 0.0, 1.5, 2.0, 4.0] {
            let expect = f.eval(x - 1.5) + Finite(2.0 * x);
            assert!(g.eval(x).close_to(expect, 1e-12));
        }
    }

    #[test]
    fn shift_moves_indicator_walls() {
        let f = PlqFunction::indicator(0.0, 1.0).transform_shift_tilt(2.0, 0.0);
        assert_eq!(f.eval(2.0), Finite(0.0));
        assert_eq!(f.eval(3.0), Finite(0.0));
        assert_eq!(f.eval(1.5), PosInf);
    }

    #[test]
    fn reflect_flips_argument() {
        let f = PlqFunction::indicator(0.0, f64::INFINITY).reflect();
        assert_eq!(f.eval(-1.0), Finite(0.0));
        assert_eq!(f.eval(1.0), PosInf);
        let g = PlqFunction::quadratic(0.0, 1.0, 0.0).reflect();
        assert_eq!(g.eval(2.0), Finite(-2.0));
    }

    // -------- add / min / max --------

    #[test]
    fn add_intersects_domains() {
        let f = PlqFunction::indicator(0.0, 2.0);
        let g = PlqFunction::indicator(1.0, 3.0).plus_const(1.0);
        let s = f.add(&g);
        assert_eq!(s.eval(1.5), Finite(1.0));
        assert_eq!(s.eval(0.5), PosInf);
        assert_eq!(s.eval(2.5), PosInf);
    }

    #[test]
    fn add_disjoint_domains_is_improper() {
        let f = PlqFunction::indicator(0.0, 1.0);
        let g = PlqFunction::indicator(5.0, 6.0);
        assert!(!f.add(&g).is_proper());
    }

    #[test]
    fn pointwise_min_splits_at_crossings() {
        let f = PlqFunction::affine(1.0, 0.0);
        let g = PlqFunction::affine(-1.0, 0.0);
        let m = pointwise_min(&f, &g);
        assert_eq!(m.eval(2.0), Finite(-2.0));
        assert_eq!(m.eval(-2.0), Finite(-2.0));
        assert_eq!(m.eval(0.0), Finite(0.0));
        let mx = pointwise_max(&f, &g);
        assert!(mx.approx_eq(&PlqFunction::abs_fn(), 1e-12));
    }

    #[test]
    fn pointwise_min_with_quadratics() {
        let f = half_square();
        let g = PlqFunction::constant(2.0);
        let m = pointwise_min(&f, &g);
        assert_eq!(m.eval(0.0), Finite(0.0));
        assert_eq!(m.eval(3.0), Finite(2.0));
        assert_eq!(m.eval(2.0), Finite(2.0));
    }

    // -------- minimize --------

    #[test]
    fn minimize_finds_interior_vertex() {
        let f = PlqFunction::quadratic(1.0, -2.0, 0.5);
        let (v, x) = f.minimize();
        assert!(v.close_to(Finite(-0.5), 1e-12));
        assert_eq!(x, Some(1.0));
    }

    #[test]
    fn minimize_ties_break_to_smallest() {
        let f = PlqFunction::indicator(1.0, 4.0);
        let (v, x) = f.minimize();
        assert_eq!(v, Finite(0.0));
        assert_eq!(x, Some(1.0));
    }

    #[test]
    fn minimize_detects_unbounded() {
        let f = PlqFunction::affine(1.0, 0.0);
        let (v, x) = f.minimize();
        assert_eq!(v, NegInf);
        assert_eq!(x, None);
    }

    // -------- subdifferential --------

    #[test]
    fn subdifferential_of_abs() {
        let f = PlqFunction::abs_fn();
        assert_eq!(f.subdifferential(0.0), Some(Interval::closed(-1.0, 1.0)));
        assert_eq!(f.subdifferential(2.0), Some(Interval::point(1.0)));
        assert_eq!(f.subdifferential(-1.0), Some(Interval::point(-1.0)));
    }

    #[test]
    fn subdifferential_at_domain_wall() {
        let f = PlqFunction::indicator(0.0, f64::INFINITY);
        let d = f.subdifferential(0.0).unwrap();
        assert_eq!(d, Interval::closed(f64::NEG_INFINITY, 0.0));
        assert_eq!(f.subdifferential(-1.0), None);
        assert_eq!(f.subdifferential(1.0), Some(Interval::point(0.0)));
    }

    #[test]
    fn subdifferential_of_point_indicator_is_line() {
        let f = PlqFunction::point_indicator(0.0);
        assert_eq!(f.subdifferential(0.0), Some(Interval::all()));
    }

    // -------- Fenchel-Young --------

    #[test]
    fn fenchel_young_zero_iff_subgradient() {
        let f = half_square();
        assert!(f.fenchel_young_gap(2.0, 2.0).unwrap().close_to(Finite(0.0), 1e-12));
        let g = f.fenchel_young_gap(2.0, 1.0).unwrap().finite().unwrap();
        assert!(g > 0.4 && g < 0.6); // (2-1)^2/2
    }

    #[test]
    fn fenchel_young_infinite_outside_domain() {
        let f = PlqFunction::indicator(0.0, 1.0);
        assert_eq!(f.fenchel_young_gap(2.0, 0.0).unwrap(), PosInf);
    }

    #[test]
    fn fenchel_young_nonnegative_on_grid() {
        let f = PlqFunction::abs_fn();
        let conj = f.conjugate().unwrap();
        for i in -20..=20 {
            for j in -20..=20 {
                let (x, xs) = (i as f64 / 5.0, j as f64 / 5.0);
                let gap = fenchel_young_gap_with(&f, &conj, x, xs);
                assert!(gap >= Finite(-1e-12), "negative gap at ({x}, {xs})");
            }
        }
    }

    // -------- infimal convolution --------

    #[test]
    fn infconv_of_two_half_squares() {
        // (x^2/2) [] (x^2/2) = a^2/4
        let f = half_square();
        let ic = inf_convolution(&f, &f).unwrap();
        assert!(ic.value.approx_eq(&PlqFunction::quadratic(0.25, 0.0, 0.0), 1e-12));
        assert_eq!(ic.witness(2.0), Some(1.0));
    }

    #[test]
    fn infconv_with_point_indicator_shifts() {
        let f = PlqFunction::abs_fn();
        let g = PlqFunction::point_indicator(1.0);
        let ic = inf_convolution(&f, &g).unwrap();
        assert!(ic.value.approx_eq(&f.transform_shift_tilt(1.0, 0.0), 1e-12));
        assert_eq!(ic.witness(3.0), Some(2.0));
    }

    #[test]
    fn infconv_of_indicators_adds_intervals() {
        let f = PlqFunction::indicator(0.0, 1.0);
        let g = PlqFunction::indicator(2.0, 3.0);
        let ic = inf_convolution(&f, &g).unwrap();
        assert!(ic.value.approx_eq(&PlqFunction::indicator(2.0, 4.0), 1e-12));
        // witness ties break to the smallest x
        assert_eq!(ic.witness(3.0), Some(0.0));
        assert_eq!(ic.witness(1.0), None);
    }

    #[test]
    fn infconv_abs_with_half_square_is_huber() {
        let f = PlqFunction::abs_fn();
        let g = half_square();
        let ic = inf_convolution(&f, &g).unwrap();
        // Huber: |a| <= 1 -> a^2/2, else |a| - 1/2
        assert!(ic.value.eval(0.5).close_to(Finite(0.125), 1e-12));
        assert!(ic.value.eval(3.0).close_to(Finite(2.5), 1e-12));
        assert!(ic.value.eval(-2.0).close_to(Finite(1.5), 1e-12));
        assert_eq!(ic.witness(0.5), Some(0.0));
    }

    #[test]
    fn infconv_reports_unbounded_below() {
        let f = PlqFunction::affine(1.0, 0.0);
        let g = PlqFunction::constant(0.0);
        assert!(matches!(inf_convolution(&f, &g), Err(Error::UnboundedBelow(_))));
    }

    #[test]
    fn infconv_duality_identity() {
        // (f [] g)* = f* + g* for convex lsc proper inputs
        let f = PlqFunction::abs_fn();
        let g = half_square();
        let ic = inf_convolution(&f, &g).unwrap();
        let lhs = ic.value.conjugate().unwrap();
        let rhs = f.conjugate().unwrap().add(&g.conjugate().unwrap());
        assert!(lhs.approx_eq(&rhs, 1e-9), "duality identity failed:\n{lhs}\nvs\n{rhs}");
    }

    // -------- random generator sanity --------

    #[test]
    fn random_convex_functions_are_convex_lsc() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let f = random_convex(&mut rng);
            assert!(f.convexity_check());
            assert!(f.is_lsc());
            assert!(f.is_proper());
        }
    }

    #[test]
    fn json_round_trip() {
        let f = PlqFunction::indicator(0.0, 1.0);
        let j = serde_json::to_string(&f).unwrap();
        let back: PlqFunction = serde_json::from_str(&j).unwrap();
        assert!(back.approx_eq(&f, 0.0));
        assert!(j.contains("\"inf\""));
    }
}
