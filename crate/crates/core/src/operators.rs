//! Piecewise-linear maximal monotone operators on the real line,
//! represented by their graphs in the `(x, y)` plane with `y` the operator
//! value. A graph is an ordered chain of segments that is connected,
//! nondecreasing in both coordinates, and unbounded in both directions of
//! `x + y` (which is exactly maximality for this class).

use crate::error::{Error, Result};
use crate::ext::{ext_f64, ExtReal, Finite, NegInf, PosInf};
use crate::interval::Interval;
use crate::plq::{Piece, PlqFunction};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

const NODE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Segment {
    /// Single graph point. Never part of a maximal operator; accepted by
    /// the graph-based constructions that work on arbitrary monotone sets.
    Point { x: f64, y: f64 },
    Vertical {
        x: f64,
        #[serde(with = "ext_f64")]
        y_lo: f64,
        #[serde(with = "ext_f64")]
        y_hi: f64,
    },
    Horizontal {
        y: f64,
        #[serde(with = "ext_f64")]
        x_lo: f64,
        #[serde(with = "ext_f64")]
        x_hi: f64,
    },
    /// `y = slope * x + intercept` on `[x_lo, x_hi]`, slope > 0.
    Sloped {
        slope: f64,
        intercept: f64,
        #[serde(with = "ext_f64")]
        x_lo: f64,
        #[serde(with = "ext_f64")]
        x_hi: f64,
    },
}

impl Segment {
    /// Closed x-extent.
    pub fn x_range(&self) -> (f64, f64) {
        match *self {
            Segment::Point { x, .. } => (x, x),
            Segment::Vertical { x, .. } => (x, x),
            Segment::Horizontal { x_lo, x_hi, .. } => (x_lo, x_hi),
            Segment::Sloped { x_lo, x_hi, .. } => (x_lo, x_hi),
        }
    }

    /// Closed y-extent.
    pub fn y_range(&self) -> (f64, f64) {
        match *self {
            Segment::Point { y, .. } => (y, y),
            Segment::Vertical { y_lo, y_hi, .. } => (y_lo, y_hi),
            Segment::Horizontal { y, .. } => (y, y),
            Segment::Sloped { slope, intercept, x_lo, x_hi } => {
                let lo = if x_lo.is_finite() { slope * x_lo + intercept } else { f64::NEG_INFINITY };
                let hi = if x_hi.is_finite() { slope * x_hi + intercept } else { f64::INFINITY };
                (lo, hi)
            }
        }
    }

    /// Extent along the diagonal parameter `x + y`, which is strictly
    /// increasing along any monotone graph.
    pub fn minty_range(&self) -> (f64, f64) {
        let (xl, xh) = self.x_range();
        let (yl, yh) = self.y_range();
        (xl + yl, xh + yh)
    }

    fn start_node(&self) -> (f64, f64) {
        let (xl, _) = self.x_range();
        let (yl, _) = self.y_range();
        (xl, yl)
    }

    fn end_node(&self) -> (f64, f64) {
        let (_, xh) = self.x_range();
        let (_, yh) = self.y_range();
        (xh, yh)
    }

    /// Values `y` with `(x, y)` on this segment, as a closed interval.
    pub fn values_at(&self, x: f64) -> Option<(f64, f64)> {
        let (xl, xh) = self.x_range();
        if x < xl || x > xh {
            return None;
        }
        match *self {
            Segment::Point { y, .. } => Some((y, y)),
            Segment::Vertical { y_lo, y_hi, .. } => Some((y_lo, y_hi)),
            Segment::Horizontal { y, .. } => Some((y, y)),
            Segment::Sloped { slope, intercept, .. } => {
                let y = slope * x + intercept;
                Some((y, y))
            }
        }
    }

    pub fn contains(&self, x: f64, y: f64, tol: f64) -> bool {
        let (xl, xh) = self.x_range();
        let (yl, yh) = self.y_range();
        match *self {
            Segment::Sloped { slope, intercept, .. } => {
                x >= xl - tol
                    && x <= xh + tol
                    && (y - (slope * x + intercept)).abs() <= tol * (1.0 + slope)
            }
            _ => x >= xl - tol && x <= xh + tol && y >= yl - tol && y <= yh + tol,
        }
    }

    fn is_degenerate(&self) -> bool {
        match *self {
            Segment::Point { .. } => false,
            Segment::Vertical { y_lo, y_hi, .. } => !(y_lo < y_hi),
            Segment::Horizontal { x_lo, x_hi, .. } => !(x_lo < x_hi),
            Segment::Sloped { x_lo, x_hi, slope, .. } => !(x_lo < x_hi) || !(slope > 0.0),
        }
    }
}

/// Maximal monotone piecewise-linear operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Segment>", into = "Vec<Segment>")]
pub struct Operator {
    segments: Vec<Segment>,
}

impl TryFrom<Vec<Segment>> for Operator {
    type Error = Error;
    fn try_from(segments: Vec<Segment>) -> Result<Self> {
        Operator::new(segments)
    }
}

impl From<Operator> for Vec<Segment> {
    fn from(op: Operator) -> Self {
        op.segments
    }
}

impl Operator {
    /// Validates connectivity, monotonicity and maximality. The chain must
    /// run from `x + y = -inf` to `x + y = +inf` with consecutive segments
    /// sharing an endpoint.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::NotMaximal("empty graph".into()));
        }
        for (i, s) in segments.iter().enumerate() {
            if matches!(s, Segment::Point { .. }) {
                return Err(Error::Malformed(format!("segment {i} is a bare point")));
            }
            if s.is_degenerate() {
                return Err(Error::Malformed(format!("segment {i} is degenerate: {s:?}")));
            }
        }
        let (m_first, _) = segments[0].minty_range();
        let (_, m_last) = segments[segments.len() - 1].minty_range();
        if m_first.is_finite() {
            return Err(Error::NotMaximal(format!(
                "graph starts at x + y = {m_first}, not -inf"
            )));
        }
        if m_last.is_finite() {
            return Err(Error::NotMaximal(format!("graph ends at x + y = {m_last}, not +inf")));
        }
        for w in segments.windows(2) {
            let (ex, ey) = w[0].end_node();
            let (sx, sy) = w[1].start_node();
            if !ex.is_finite() || !sx.is_finite() {
                return Err(Error::NotMaximal("interior segment with infinite end".into()));
            }
            if (ex - sx).abs() > NODE_TOL || (ey - sy).abs() > NODE_TOL {
                return Err(Error::NotMaximal(format!(
                    "gap between ({ex}, {ey}) and ({sx}, {sy})"
                )));
            }
        }
        Ok(Operator { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    // ---- builders ----

    pub fn duality_map() -> Self {
        Operator::new(vec![Segment::Sloped {
            slope: 1.0,
            intercept: 0.0,
            x_lo: f64::NEG_INFINITY,
            x_hi: f64::INFINITY,
        }])
        .unwrap()
    }

    pub fn constant(y: f64) -> Self {
        Operator::new(vec![Segment::Horizontal {
            y,
            x_lo: f64::NEG_INFINITY,
            x_hi: f64::INFINITY,
        }])
        .unwrap()
    }

    /// Normal cone operator of `[lo, hi]` (the subdifferential of its
    /// indicator). `lo == hi` gives the full vertical line.
    pub fn normal_cone(lo: f64, hi: f64) -> Self {
        Operator::from_subdifferential(&PlqFunction::indicator(lo, hi))
            .expect("indicator potentials are convex")
    }

    /// Graph of `∂f` for proper convex lsc `f`: sloped runs where `f` is
    /// strictly convex, horizontal runs where affine, vertical jumps at
    /// kinks, vertical rays at domain walls.
    pub fn from_subdifferential(f: &PlqFunction) -> Result<Self> {
        if let Some(why) = f.convexity_violation() {
            return Err(Error::Malformed(format!("potential is not convex: {why}")));
        }
        if !f.is_lsc() {
            return Err(Error::Malformed("potential is not lsc".into()));
        }
        let dom = f.domain();
        let hull = dom.hull().ok_or(Error::Improper)?;
        if hull.is_point() {
            let x = hull.lo;
            return Operator::new(vec![Segment::Vertical {
                x,
                y_lo: f64::NEG_INFINITY,
                y_hi: f64::INFINITY,
            }]);
        }
        let bps = f.breakpoints();
        let k = bps.len();
        let mut segs: Vec<Segment> = vec![];
        let mut prev_slope: Option<f64> = None;
        if hull.lo.is_finite() {
            // left wall; the matching upper slope is patched in below
            segs.push(Segment::Vertical { x: hull.lo, y_lo: f64::NEG_INFINITY, y_hi: 0.0 });
        }
        for (i, piece) in f.pieces().iter().enumerate() {
            let Piece::Quad { a, b, .. } = *piece else { continue };
            let lo = if i == 0 { f64::NEG_INFINITY } else { bps[i - 1] };
            let hi = if i == k { f64::INFINITY } else { bps[i] };
            let slope_in = if lo.is_finite() { 2.0 * a * lo + b } else { f64::NEG_INFINITY };
            if let Some(last) = segs.last_mut() {
                match last {
                    Segment::Vertical { y_hi, .. } if lo.is_finite() => *y_hi = slope_in,
                    _ => {}
                }
            }
            if let Some(prev) = prev_slope {
                if lo.is_finite() && slope_in > prev + NODE_TOL {
                    segs.push(Segment::Vertical { x: lo, y_lo: prev, y_hi: slope_in });
                }
            }
            if a > 0.0 {
                segs.push(Segment::Sloped { slope: 2.0 * a, intercept: b, x_lo: lo, x_hi: hi });
            } else {
                segs.push(Segment::Horizontal { y: b, x_lo: lo, x_hi: hi });
            }
            prev_slope = Some(if hi.is_finite() { 2.0 * a * hi + b } else { f64::INFINITY });
        }
        if hull.hi.is_finite() {
            let y_lo = prev_slope.unwrap_or(f64::NEG_INFINITY);
            segs.push(Segment::Vertical { x: hull.hi, y_lo, y_hi: f64::INFINITY });
        }
        Operator::new(segs)
    }

    /// Convex potential `P` with `∂P` equal to this operator, anchored so
    /// that the value at the leftmost finite node is 0 (or `P(0) = 0` when
    /// the graph is a single unbounded segment). The x-partition comes from
    /// segment extents, with one quadratic piece laid per covered cell.
    pub fn potential(&self) -> PlqFunction {
        if let [Segment::Vertical { x, y_lo, y_hi }] = self.segments[..] {
            if y_lo.is_infinite() && y_hi.is_infinite() {
                return PlqFunction::point_indicator(x);
            }
        }
        let mut bps: Vec<f64> = vec![];
        for seg in &self.segments {
            let (xl, xh) = seg.x_range();
            for x in [xl, xh] {
                if x.is_finite() && bps.last().map_or(true, |&p| x > p + NODE_TOL) {
                    bps.push(x);
                }
            }
        }
        let (dom_lo, _) = self.segments[0].x_range();
        let (_, dom_hi) = self.segments[self.segments.len() - 1].x_range();
        let mut pieces: Vec<Piece> = Vec::with_capacity(bps.len() + 1);
        let mut values: Vec<ExtReal> = Vec::with_capacity(bps.len());
        let mut val = 0.0;
        let mut started = false;
        for i in 0..=bps.len() {
            let lo = if i == 0 { f64::NEG_INFINITY } else { bps[i - 1] };
            let hi = if i == bps.len() { f64::INFINITY } else { bps[i] };
            let inside = lo >= dom_lo - NODE_TOL && hi <= dom_hi + NODE_TOL;
            if !inside {
                pieces.push(Piece::Infinite);
                if i < bps.len() {
                    values.push(if hi >= dom_lo - NODE_TOL && hi <= dom_hi + NODE_TOL {
                        Finite(val)
                    } else {
                        PosInf
                    });
                }
                continue;
            }
            // slope on this cell comes from the covering segment
            let probe = if lo.is_finite() && hi.is_finite() {
                0.5 * (lo + hi)
            } else if lo.is_finite() {
                lo + 1.0
            } else {
                hi - 1.0
            };
            let seg = self
                .segments
                .iter()
                .find(|s| {
                    let (xl, xh) = s.x_range();
                    probe >= xl && probe <= xh && !matches!(s, Segment::Vertical { .. })
                })
                .expect("cell inside the domain is covered by a segment");
            let piece = match *seg {
                Segment::Horizontal { y, .. } => {
                    if lo.is_finite() {
                        Piece::quad(0.0, y, val - y * lo)
                    } else if hi.is_finite() {
                        Piece::quad(0.0, y, -y * hi)
                    } else {
                        Piece::quad(0.0, y, 0.0)
                    }
                }
                Segment::Sloped { slope, intercept, .. } => {
                    let a = 0.5 * slope;
                    let b = intercept;
                    if lo.is_finite() {
                        Piece::quad(a, b, val - (a * lo + b) * lo)
                    } else if hi.is_finite() {
                        Piece::quad(a, b, -(a * hi + b) * hi)
                    } else {
                        Piece::quad(a, b, 0.0)
                    }
                }
                _ => unreachable!(),
            };
            started = true;
            if hi.is_finite() {
                val = piece.eval(hi).finite().expect("finite piece value");
                values.push(Finite(val));
            }
            pieces.push(piece);
        }
        let _ = started;
        PlqFunction::new(bps, pieces, values)
            .expect("potential shape")
            .lsc_hull()
            .normalized(0.0)
    }

    // ---- queries ----

    /// `T(x)` as a closed interval, `None` outside the domain. Infinite
    /// interval ends encode vertical rays.
    pub fn eval(&self, x: f64) -> Option<Interval> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut hit = false;
        for seg in &self.segments {
            if let Some((l, h)) = seg.values_at(x) {
                lo = lo.min(l);
                hi = hi.max(h);
                hit = true;
            }
        }
        if hit {
            Some(Interval::new(lo, lo.is_finite(), hi, hi.is_finite()))
        } else {
            None
        }
    }

    pub fn contains(&self, x: f64, y: f64, tol: f64) -> bool {
        self.segments.iter().any(|s| s.contains(x, y, tol))
    }

    /// Domain: a closed interval (finite ends of maximal graphs always
    /// carry vertical rays, so they belong to the domain).
    pub fn domain(&self) -> Interval {
        let (lo, _) = self.segments[0].x_range();
        let (_, hi) = self.segments[self.segments.len() - 1].x_range();
        Interval::new(lo, lo.is_finite(), hi, hi.is_finite())
    }

    /// Range: also a closed interval, by the same argument applied to the
    /// inverse graph.
    pub fn range(&self) -> Interval {
        let (lo, _) = self.segments[0].y_range();
        let (_, hi) = self.segments[self.segments.len() - 1].y_range();
        Interval::new(lo, lo.is_finite(), hi, hi.is_finite())
    }

    /// Graph of `x -> T(p + x)`: the graph shifted left by `p`.
    pub fn shift(&self, p: f64) -> Operator {
        let segments = self
            .segments
            .iter()
            .map(|s| match *s {
                Segment::Point { x, y } => Segment::Point { x: x - p, y },
                Segment::Vertical { x, y_lo, y_hi } => Segment::Vertical { x: x - p, y_lo, y_hi },
                Segment::Horizontal { y, x_lo, x_hi } => {
                    Segment::Horizontal { y, x_lo: x_lo - p, x_hi: x_hi - p }
                }
                Segment::Sloped { slope, intercept, x_lo, x_hi } => Segment::Sloped {
                    slope,
                    intercept: intercept + slope * p,
                    x_lo: x_lo - p,
                    x_hi: x_hi - p,
                },
            })
            .collect();
        Operator { segments }
    }

    /// Inverse operator: the graph with coordinates swapped.
    pub fn inverse(&self) -> Operator {
        let segments = self
            .segments
            .iter()
            .map(|s| match *s {
                Segment::Point { x, y } => Segment::Point { x: y, y: x },
                Segment::Vertical { x, y_lo, y_hi } => {
                    Segment::Horizontal { y: x, x_lo: y_lo, x_hi: y_hi }
                }
                Segment::Horizontal { y, x_lo, x_hi } => {
                    Segment::Vertical { x: y, y_lo: x_lo, y_hi: x_hi }
                }
                Segment::Sloped { slope, intercept, x_lo, x_hi } => {
                    let (y_lo, y_hi) = (
                        if x_lo.is_finite() { slope * x_lo + intercept } else { f64::NEG_INFINITY },
                        if x_hi.is_finite() { slope * x_hi + intercept } else { f64::INFINITY },
                    );
                    Segment::Sloped {
                        slope: 1.0 / slope,
                        intercept: -intercept / slope,
                        x_lo: y_lo,
                        x_hi: y_hi,
                    }
                }
            })
            .collect();
        Operator { segments }
    }

    pub fn is_staircase(&self) -> bool {
        self.segments
            .iter()
            .all(|s| !matches!(s, Segment::Sloped { .. }))
    }

    /// Vertices and recession rays of the closed convex hull of the graph.
    pub fn hull_vrep(&self) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
        let mut verts: Vec<[f64; 2]> = vec![];
        for seg in &self.segments {
            for (x, y) in [seg.start_node(), seg.end_node()] {
                if x.is_finite() && y.is_finite() {
                    let p = [x, y];
                    if verts.last() != Some(&p) {
                        verts.push(p);
                    }
                }
            }
        }
        let mut rays: Vec<[f64; 2]> = vec![];
        let first = &self.segments[0];
        rays.push(match *first {
            Segment::Vertical { .. } => [0.0, -1.0],
            Segment::Horizontal { .. } => [-1.0, 0.0],
            Segment::Sloped { slope, .. } => [-1.0, -slope],
            Segment::Point { .. } => unreachable!(),
        });
        let last = &self.segments[self.segments.len() - 1];
        rays.push(match *last {
            Segment::Vertical { .. } => [0.0, 1.0],
            Segment::Horizontal { .. } => [1.0, 0.0],
            Segment::Sloped { slope, .. } => [1.0, slope],
            Segment::Point { .. } => unreachable!(),
        });
        if verts.is_empty() {
            // single unbounded segment: pick any point on it as the vertex
            let seg = &self.segments[0];
            let (xl, xh) = seg.x_range();
            let x = if xl.is_finite() {
                xl
            } else if xh.is_finite() {
                xh
            } else {
                0.0
            };
            let (yl, yh) = seg.values_at(x).expect("x inside segment");
            let y = if yl.is_finite() { yl } else { yh };
            let y = if y.is_finite() { y } else { 0.0 };
            verts.push([x, y]);
        }
        (verts, rays)
    }

    /// Merges consecutive collinear segments; used before comparisons.
    pub fn normalized(&self) -> Operator {
        let mut out: Vec<Segment> = vec![];
        for seg in &self.segments {
            if let Some(prev) = out.last_mut() {
                let merged = match (*prev, *seg) {
                    (
                        Segment::Horizontal { y: y1, x_lo, .. },
                        Segment::Horizontal { y: y2, x_hi, .. },
                    ) if (y1 - y2).abs() <= NODE_TOL => {
                        Some(Segment::Horizontal { y: y1, x_lo, x_hi })
                    }
                    (
                        Segment::Vertical { x: x1, y_lo, .. },
                        Segment::Vertical { x: x2, y_hi, .. },
                    ) if (x1 - x2).abs() <= NODE_TOL => {
                        Some(Segment::Vertical { x: x1, y_lo, y_hi })
                    }
                    (
                        Segment::Sloped { slope: s1, intercept: q1, x_lo, .. },
                        Segment::Sloped { slope: s2, intercept: q2, x_hi, .. },
                    ) if (s1 - s2).abs() <= NODE_TOL && (q1 - q2).abs() <= NODE_TOL => {
                        Some(Segment::Sloped { slope: s1, intercept: q1, x_lo, x_hi })
                    }
                    _ => None,
                };
                if let Some(m) = merged {
                    *prev = m;
                    continue;
                }
            }
            out.push(*seg);
        }
        Operator { segments: out }
    }

    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        let a = self.normalized();
        let b = other.normalized();
        if a.segments.len() != b.segments.len() {
            return false;
        }
        let close = |u: f64, v: f64| (u == v) || (u - v).abs() <= tol;
        a.segments.iter().zip(&b.segments).all(|(s, t)| match (*s, *t) {
            (Segment::Point { x, y }, Segment::Point { x: x2, y: y2 }) => {
                close(x, x2) && close(y, y2)
            }
            (
                Segment::Vertical { x, y_lo, y_hi },
                Segment::Vertical { x: x2, y_lo: l2, y_hi: h2 },
            ) => close(x, x2) && close(y_lo, l2) && close(y_hi, h2),
            (
                Segment::Horizontal { y, x_lo, x_hi },
                Segment::Horizontal { y: y2, x_lo: l2, x_hi: h2 },
            ) => close(y, y2) && close(x_lo, l2) && close(x_hi, h2),
            (
                Segment::Sloped { slope, intercept, x_lo, x_hi },
                Segment::Sloped { slope: s2, intercept: q2, x_lo: l2, x_hi: h2 },
            ) => close(slope, s2) && close(intercept, q2) && close(x_lo, l2) && close(x_hi, h2),
            _ => false,
        })
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for seg in &self.segments {
            match *seg {
                Segment::Point { x, y } => writeln!(f, "  point ({x}, {y})")?,
                Segment::Vertical { x, y_lo, y_hi } => {
                    writeln!(f, "  vertical x = {x}, y in [{y_lo}, {y_hi}]")?
                }
                Segment::Horizontal { y, x_lo, x_hi } => {
                    writeln!(f, "  horizontal y = {y}, x in [{x_lo}, {x_hi}]")?
                }
                Segment::Sloped { slope, intercept, x_lo, x_hi } => {
                    writeln!(f, "  sloped y = {slope} x + {intercept}, x in [{x_lo}, {x_hi}]")?
                }
            }
        }
        Ok(())
    }
}

// ---- random generation ----

/// Random maximal monotone operator built along the diagonal parameter:
/// strictly increasing knots of `x + y` with a per-piece direction that is
/// vertical, horizontal, or sloped.
pub fn random_operator<R: Rng + ?Sized>(rng: &mut R) -> Operator {
    random_operator_with(rng, true)
}

/// Random staircase operator (vertical and horizontal segments only).
pub fn random_staircase<R: Rng + ?Sized>(rng: &mut R) -> Operator {
    random_operator_with(rng, false)
}

fn random_operator_with<R: Rng + ?Sized>(rng: &mut R, allow_sloped: bool) -> Operator {
    let k = rng.gen_range(1..=5usize);
    let mut knots: Vec<f64> = (0..k).map(|_| rng.gen_range(-5.0..5.0)).collect();
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup_by(|a, b| (*a - *b).abs() < 0.4);

    // choose a direction per span; consecutive spans must not repeat the
    // same vertical/horizontal direction (they would merge)
    #[derive(Clone, Copy, PartialEq)]
    enum Dir {
        V,
        H,
        S(f64),
    }
    let n_spans = knots.len() + 1;
    let mut dirs: Vec<Dir> = Vec::with_capacity(n_spans);
    for i in 0..n_spans {
        loop {
            let d = match rng.gen_range(0..3) {
                0 => Dir::V,
                1 => Dir::H,
                _ if allow_sloped => Dir::S(rng.gen_range(0.25..4.0)),
                _ => {
                    if rng.gen_bool(0.5) {
                        Dir::V
                    } else {
                        Dir::H
                    }
                }
            };
            let repeats = i > 0
                && matches!(
                    (dirs[i - 1], d),
                    (Dir::V, Dir::V) | (Dir::H, Dir::H)
                );
            if !repeats {
                dirs.push(d);
                break;
            }
        }
    }

    // start node on the first knot diagonal
    let m0 = knots.first().copied().unwrap_or(0.0);
    let x0 = rng.gen_range(-3.0..3.0);
    let mut node = (x0, m0 - x0);
    let mut segs: Vec<Segment> = vec![];

    // first span runs from minty -inf up to the first knot
    segs.push(match dirs[0] {
        Dir::V => Segment::Vertical { x: node.0, y_lo: f64::NEG_INFINITY, y_hi: node.1 },
        Dir::H => Segment::Horizontal { y: node.1, x_lo: f64::NEG_INFINITY, x_hi: node.0 },
        Dir::S(s) => Segment::Sloped {
            slope: s,
            intercept: node.1 - s * node.0,
            x_lo: f64::NEG_INFINITY,
            x_hi: node.0,
        },
    });
    for i in 1..n_spans {
        let m_hi = if i < knots.len() { knots[i] } else { f64::INFINITY };
        let dm = if m_hi.is_finite() { m_hi - knots[i - 1] } else { f64::INFINITY };
        let seg = match dirs[i] {
            Dir::V => {
                let y_hi = if dm.is_finite() { node.1 + dm } else { f64::INFINITY };
                let s = Segment::Vertical { x: node.0, y_lo: node.1, y_hi };
                node = (node.0, y_hi);
                s
            }
            Dir::H => {
                let x_hi = if dm.is_finite() { node.0 + dm } else { f64::INFINITY };
                let s = Segment::Horizontal { y: node.1, x_lo: node.0, x_hi };
                node = (x_hi, node.1);
                s
            }
            Dir::S(s) => {
                let dx = if dm.is_finite() { dm / (1.0 + s) } else { f64::INFINITY };
                let x_hi = if dx.is_finite() { node.0 + dx } else { f64::INFINITY };
                let seg = Segment::Sloped {
                    slope: s,
                    intercept: node.1 - s * node.0,
                    x_lo: node.0,
                    x_hi,
                };
                node = (x_hi, if dm.is_finite() { node.1 + s * dx } else { f64::INFINITY });
                seg
            }
        };
        segs.push(seg);
    }
    Operator::new(segs).expect("diagonal construction is maximal")
}

// ---- range of a translated sum ----

/// Range description for `x -> S(p + x) + T(x)`, computed directly from
/// the two graphs. Finite range endpoints of this operator class are
/// always attained, so the range is the closed interval `[lo, hi]`
/// intersected with the reals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumRange {
    /// Common domain `(D(S) - p) ∩ D(T)`; `None` when empty.
    pub domain: Option<Interval>,
    pub lo: ExtReal,
    pub hi: ExtReal,
}

impl SumRange {
    pub fn is_empty(&self) -> bool {
        self.domain.is_none()
    }

    pub fn contains(&self, y: f64, tol: f64) -> bool {
        if self.domain.is_none() {
            return false;
        }
        let above = match self.lo {
            NegInf => true,
            Finite(l) => y >= l - tol,
            PosInf => false,
        };
        let below = match self.hi {
            PosInf => true,
            Finite(h) => y <= h + tol,
            NegInf => false,
        };
        above && below
    }
}

impl fmt::Display for SumRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.domain {
            None => write!(f, "empty (domains do not meet)"),
            Some(d) => write!(f, "[{}, {}] over common domain {}", self.lo, self.hi, d),
        }
    }
}

/// Minty test on a raw segment list: the graph is maximal monotone iff
/// `x + s` sweeps all of ℝ along the curve with no gaps. `Operator::new`
/// enforces exactly that, so this just reports whether construction holds.
pub fn maximality_check(segments: &[Segment]) -> bool {
    Operator::new(segments.to_vec()).is_ok()
}

/// Direct computation of the range of `S(p + .) + T`, used as the ground
/// truth the certificate pipeline is checked against.
pub fn sum_range_oracle(s: &Operator, t: &Operator, p: f64) -> SumRange {
    let ds = s.domain().shift(-p);
    let dt = t.domain();
    let Some(d) = ds.intersect(&dt) else {
        return SumRange { domain: None, lo: PosInf, hi: NegInf };
    };
    // Rebuilding an endpoint of the intersected domain (and adding p back)
    // costs a few ulps, enough to slide past a vertical ray sitting exactly
    // at a domain endpoint; snap such queries onto the endpoint itself.
    let snap_into = |x: f64, dom: &Interval| {
        let near =
            |a: f64, b: f64| (a - b).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0);
        if dom.lo.is_finite() && near(x, dom.lo) {
            return dom.lo;
        }
        if dom.hi.is_finite() && near(x, dom.hi) {
            return dom.hi;
        }
        x.clamp(dom.lo, dom.hi)
    };
    let ds_full = s.domain();
    let dt_full = t.domain();
    let s_at = |x: f64| s.eval(snap_into(x, &ds_full));
    let t_at = |x: f64| t.eval(snap_into(x, &dt_full));
    let lo = if d.lo.is_finite() {
        let a = s_at(p + d.lo).expect("domain endpoint is in D(S(p+.))");
        let b = t_at(d.lo).expect("domain endpoint is in D(T)");
        ext_low(a.lo, a.lo_closed) + ext_low(b.lo, b.lo_closed)
    } else {
        // both graphs run to x = -inf; tail infima are the range infima
        range_inf(s) + range_inf(t)
    };
    let hi = if d.hi.is_finite() {
        let a = s_at(p + d.hi).expect("domain endpoint is in D(S(p+.))");
        let b = t_at(d.hi).expect("domain endpoint is in D(T)");
        ext_high(a.hi, a.hi_closed) + ext_high(b.hi, b.hi_closed)
    } else {
        range_sup(s) + range_sup(t)
    };
    SumRange { domain: Some(d), lo, hi }
}

fn ext_low(v: f64, closed: bool) -> ExtReal {
    if closed {
        Finite(v)
    } else {
        NegInf
    }
}

fn ext_high(v: f64, closed: bool) -> ExtReal {
    if closed {
        Finite(v)
    } else {
        PosInf
    }
}

fn range_inf(op: &Operator) -> ExtReal {
    let r = op.range();
    if r.lo.is_finite() {
        Finite(r.lo)
    } else {
        NegInf
    }
}

fn range_sup(op: &Operator) -> ExtReal {
    let r = op.range();
    if r.hi.is_finite() {
        Finite(r.hi)
    } else {
        PosInf
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn halfline_wall() -> Operator {
        // ∂ of the indicator of [0, +inf)
        Operator::new(vec![
            Segment::Vertical { x: 0.0, y_lo: f64::NEG_INFINITY, y_hi: 0.0 },
            Segment::Horizontal { y: 0.0, x_lo: 0.0, x_hi: f64::INFINITY },
        ])
        .unwrap()
    }

    fn point_line() -> Operator {
        Operator::new(vec![Segment::Vertical {
            x: 0.0,
            y_lo: f64::NEG_INFINITY,
            y_hi: f64::INFINITY,
        }])
        .unwrap()
    }

    #[test]
    fn rejects_non_maximal_graphs() {
        // bounded chain
        assert!(Operator::new(vec![Segment::Horizontal { y: 0.0, x_lo: 0.0, x_hi: 1.0 }]).is_err());
        // gap between segments
        assert!(Operator::new(vec![
            Segment::Horizontal { y: 0.0, x_lo: f64::NEG_INFINITY, x_hi: 0.0 },
            Segment::Horizontal { y: 1.0, x_lo: 1.0, x_hi: f64::INFINITY },
        ])
        .is_err());
    }

    #[test]
    fn eval_collects_vertical_sets() {
        let s = halfline_wall();
        assert_eq!(s.eval(0.0), Some(Interval::new(f64::NEG_INFINITY, false, 0.0, true)));
        assert_eq!(s.eval(2.0), Some(Interval::point(0.0)));
        assert_eq!(s.eval(-1.0), None);
    }

    #[test]
    fn domain_and_range() {
        let s = halfline_wall();
        assert_eq!(s.domain(), Interval::new(0.0, true, f64::INFINITY, false));
        assert_eq!(s.range(), Interval::new(f64::NEG_INFINITY, false, 0.0, true));
        let t = point_line();
        assert_eq!(t.domain(), Interval::point(0.0));
        assert!(t.range().is_all());
    }

    #[test]
    fn subdifferential_of_indicator_matches_wall() {
        let f = crate::plq::PlqFunction::indicator(0.0, f64::INFINITY);
        let op = Operator::from_subdifferential(&f).unwrap();
        assert!(op.approx_eq(&halfline_wall(), 1e-12));
    }

    #[test]
    fn subdifferential_of_point_indicator_is_vertical_line() {
        let f = crate::plq::PlqFunction::point_indicator(0.0);
        let op = Operator::from_subdifferential(&f).unwrap();
        assert!(op.approx_eq(&point_line(), 1e-12));
    }

    #[test]
    fn subdifferential_of_abs_has_jump() {
        let op = Operator::from_subdifferential(&crate::plq::PlqFunction::abs_fn()).unwrap();
        let at0 = op.eval(0.0).unwrap();
        assert_eq!(at0, Interval::closed(-1.0, 1.0));
        assert_eq!(op.eval(3.0), Some(Interval::point(1.0)));
    }

    #[test]
    fn subdifferential_of_half_square_is_identity() {
        let op =
            Operator::from_subdifferential(&crate::plq::PlqFunction::quadratic(0.5, 0.0, 0.0)).unwrap();
        assert!(op.approx_eq(&Operator::duality_map(), 1e-12));
    }

    #[test]
    fn potential_round_trip_through_subdifferential() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let t = random_operator(&mut rng);
            let p = t.potential();
            assert!(p.convexity_check(), "potential not convex:\n{p}");
            let back = Operator::from_subdifferential(&p).unwrap();
            assert!(
                back.approx_eq(&t, 1e-7),
                "round trip mismatch:\n{t}\npotential:\n{p}\nback:\n{back}"
            );
        }
    }

    #[test]
    fn potential_of_wall_is_indicator() {
        let p = halfline_wall().potential();
        assert!(p.approx_eq(&crate::plq::PlqFunction::indicator(0.0, f64::INFINITY), 1e-12));
    }

    #[test]
    fn potential_of_identity_is_half_square() {
        let p = Operator::duality_map().potential();
        assert!(p.approx_eq(&crate::plq::PlqFunction::quadratic(0.5, 0.0, 0.0), 1e-12));
    }

    #[test]
    fn shift_translates_graph() {
        let s = halfline_wall().shift(1.0);
        // x -> S(1 + x): wall moves to x = -1
        assert_eq!(s.domain(), Interval::new(-1.0, true, f64::INFINITY, false));
        assert!(s.contains(-1.0, -3.0, 1e-12));
    }

    #[test]
    fn inverse_swaps_domain_and_range() {
        let s = halfline_wall();
        let inv = s.inverse();
        assert_eq!(inv.domain(), Interval::new(f64::NEG_INFINITY, false, 0.0, true));
        assert_eq!(inv.range(), Interval::new(0.0, true, f64::INFINITY, false));
        let id = Operator::duality_map();
        assert!(id.inverse().approx_eq(&id, 1e-12));
    }

    #[test]
    fn random_operators_are_valid_and_round_trip_inverse() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let t = random_operator(&mut rng);
            let back = t.inverse().inverse();
            assert!(back.approx_eq(&t, 1e-9));
        }
    }

    #[test]
    fn staircase_generator_avoids_slopes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            assert!(random_staircase(&mut rng).is_staircase());
        }
    }

    #[test]
    fn sum_range_disjoint_domains_is_empty() {
        // S = ∂δ_{0} shifted so domains miss: S(p + x) needs p + x = 0
        let s = point_line();
        let t = Operator::new(vec![
            Segment::Vertical { x: 2.0, y_lo: f64::NEG_INFINITY, y_hi: 0.0 },
            Segment::Horizontal { y: 0.0, x_lo: 2.0, x_hi: f64::INFINITY },
        ])
        .unwrap();
        let r = sum_range_oracle(&s, &t, 0.0);
        assert!(r.is_empty());
        assert!(!r.contains(0.0, 1e-9));
    }

    #[test]
    fn sum_range_of_wall_and_point_is_full_line() {
        // S = ∂δ_[0,inf), T = ∂δ_{0}: S(x) + T(x) at x = 0 is (-inf,0] + R
        let r = sum_range_oracle(&halfline_wall(), &point_line(), 0.0);
        assert_eq!(r.lo, NegInf);
        assert_eq!(r.hi, PosInf);
        assert!(r.contains(-7.0, 0.0) && r.contains(13.5, 0.0));
    }

    #[test]
    fn sum_range_of_two_identities() {
        let r = sum_range_oracle(&Operator::duality_map(), &Operator::duality_map(), 0.0);
        assert_eq!(r.lo, NegInf);
        assert_eq!(r.hi, PosInf);
    }

    #[test]
    fn sum_range_with_upper_walls() {
        // S = T = ∂δ_(-inf, 0]: zero left tails, upward walls at 0
        let f = crate::plq::PlqFunction::indicator(f64::NEG_INFINITY, 0.0);
        let s = Operator::from_subdifferential(&f).unwrap();
        let r = sum_range_oracle(&s, &s, 0.0);
        assert_eq!(r.lo, Finite(0.0));
        assert_eq!(r.hi, PosInf);
        // shifted apart: common domain (-inf, -1]; only the wall of
        // S(1 + .) fires at the right end
        let r2 = sum_range_oracle(&s, &s, 1.0);
        assert_eq!(r2.lo, Finite(0.0));
        assert_eq!(r2.hi, PosInf);
    }

    #[test]
    fn sum_range_finite_endpoint_attained() {
        // S = identity restricted by nothing, T = constant 1 on [0, inf)
        // with lower wall: T = ∂(x + δ_[0,inf))
        let f = crate::plq::PlqFunction::affine(1.0, 0.0)
            .add(&crate::plq::PlqFunction::indicator(0.0, f64::INFINITY));
        let t = Operator::from_subdifferential(&f).unwrap();
        let r = sum_range_oracle(&Operator::duality_map(), &t, 0.0);
        // at x = 0: identity gives 0, T gives (-inf, 1]; sup over x: +inf
        assert_eq!(r.lo, NegInf);
        assert_eq!(r.hi, PosInf);

        // both tails horizontal: S = T = sign-like operator
        let sgn = Operator::from_subdifferential(&crate::plq::PlqFunction::abs_fn()).unwrap();
        let r2 = sum_range_oracle(&sgn, &sgn, 0.0);
        assert_eq!(r2.lo, Finite(-2.0));
        assert_eq!(r2.hi, Finite(2.0));
        assert!(r2.contains(2.0, 0.0));
        assert!(!r2.contains(2.1, 1e-9));
    }

    #[test]
    fn segment_json_round_trip() {
        let op = halfline_wall();
        let j = serde_json::to_string(&op).unwrap();
        assert!(j.contains("\"vertical\"") && j.contains("\"-inf\""));
        let back: Operator = serde_json::from_str(&j).unwrap();
        assert!(back.approx_eq(&op, 0.0));
    }

    #[test]
    fn maximality_check_accepts_full_curves_and_rejects_gaps() {
        assert!(maximality_check(halfline_wall().segments()));
        assert!(maximality_check(Operator::duality_map().segments()));
        // the identity restricted to [0, 1] stops short on both ends
        let clipped = vec![Segment::Sloped {
            slope: 1.0,
            intercept: 0.0,
            x_lo: 0.0,
            x_hi: 1.0,
        }];
        assert!(!maximality_check(&clipped));
        // two monotone runs with a hole between them
        let gapped = vec![
            Segment::Horizontal { y: 0.0, x_lo: f64::NEG_INFINITY, x_hi: 0.0 },
            Segment::Horizontal { y: 2.0, x_lo: 1.0, x_hi: f64::INFINITY },
        ];
        assert!(!maximality_check(&gapped));
    }
}
