//! Bivariate representatives of monotone graphs: the Fitzpatrick function,
//! the Fenchel representative built from a potential, the interpolation
//! function of a finite graph sample, the hat transform, and exact bivariate
//! conjugation for the polyhedral representations.
//!
//! Argument order is a caller concern: every function here works on the raw
//! `(first, second)` slots, and conjugation pairs first-with-first. A
//! representative is read as `h(x, x*)`; its conjugate is read as `h*(x*, x)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::ExtReal::{self, Finite, NegInf, PosInf};
use crate::grid::{lower_hull, Axis, Grid2};
use crate::interval::Interval;
use crate::operators::{Operator, Segment};
use crate::parallel::Strategy;
use crate::plq::{pointwise_max, PlqFunction};
use crate::poly2::{Box2, Poly2};

const GEOM_TOL: f64 = 1e-9;

/// Affine minorant `gx·w₀ + gy·w₁ + c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Affine2 {
    pub gx: f64,
    pub gy: f64,
    pub c: f64,
}

impl Affine2 {
    pub fn eval(&self, w: [f64; 2]) -> f64 {
        self.gx * w[0] + self.gy * w[1] + self.c
    }

    fn close_to(&self, other: &Affine2, tol: f64) -> bool {
        (self.gx - other.gx).abs() <= tol
            && (self.gy - other.gy).abs() <= tol
            && (self.c - other.c).abs() <= tol
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain2 {
    All,
    Box(Box2),
    Hull(Poly2),
}

impl Domain2 {
    pub fn contains_within(&self, w: [f64; 2], tol: f64) -> bool {
        match self {
            Domain2::All => true,
            Domain2::Box(b) => b.contains_within(w, tol),
            Domain2::Hull(p) => p.contains(w, tol),
        }
    }

    pub fn neg_y(&self) -> Domain2 {
        match self {
            Domain2::All => Domain2::All,
            Domain2::Box(b) => Domain2::Box(b.neg_y()),
            Domain2::Hull(p) => Domain2::Hull(p.neg_y()),
        }
    }

    pub fn to_box(&self) -> Option<Box2> {
        match self {
            Domain2::All => Some(Box2::all()),
            Domain2::Box(b) => Some(b.clone()),
            Domain2::Hull(p) => p.to_box(),
        }
    }
}

/// A convex function of two variables in one of four representations.
///
/// The variants trade generality for what downstream analysis can do with
/// them: `Separable` and `PolyMax` conjugate exactly, `SegmentSup` is an
/// exact evaluator without a finite description, `Sampled` is the grid
/// fallback.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BivariateFn {
    /// `F(a, b) = first(a) + second(b)`.
    Separable { first: PlqFunction, second: PlqFunction },
    /// Maximum of affine minorants plus the indicator of `domain`.
    /// An empty minorant list means the plain indicator.
    PolyMax { affines: Vec<Affine2>, domain: Domain2 },
    /// Supremum of `(a, b) ↦ b·y + y*·a − y*·y` over graph points `(y, y*)`
    /// of `op`, taken segment by segment in closed form. `neg_second` flips
    /// the sign of `b` first.
    SegmentSup { op: Operator, neg_second: bool },
    /// Grid samples with nearest-node evaluation.
    Sampled(Grid2),
}

impl BivariateFn {
    pub fn eval(&self, w: [f64; 2]) -> ExtReal {
        match self {
            BivariateFn::Separable { first, second } => first.eval(w[0]) + second.eval(w[1]),
            BivariateFn::PolyMax { affines, domain } => {
                if !domain.contains_within(w, GEOM_TOL) {
                    return PosInf;
                }
                match affines.iter().map(|a| a.eval(w)).fold(None, |m: Option<f64>, v| {
                    Some(m.map_or(v, |m| m.max(v)))
                }) {
                    Some(v) => Finite(v),
                    None => Finite(0.0),
                }
            }
            BivariateFn::SegmentSup { op, neg_second } => {
                let b = if *neg_second { -w[1] } else { w[1] };
                let mut best = NegInf;
                for seg in op.segments() {
                    best = best.max(segment_sup(seg, w[0], b));
                }
                best
            }
            BivariateFn::Sampled(g) => g.eval_nearest(w),
        }
    }

    /// Both components when the representation is separable.
    pub fn as_separable(&self) -> Option<(&PlqFunction, &PlqFunction)> {
        match self {
            BivariateFn::Separable { first, second } => Some((first, second)),
            _ => None,
        }
    }

    /// Bounding box of the effective domain, when the representation makes
    /// one available exactly.
    pub fn domain_box(&self) -> Option<Box2> {
        match self {
            BivariateFn::Separable { first, second } => {
                let hx = first.domain().hull()?;
                let hy = second.domain().hull()?;
                Some(Box2::new(hx, hy))
            }
            BivariateFn::PolyMax { domain, .. } => domain.to_box(),
            _ => None,
        }
    }

    pub fn to_json(&self, arg_order: &str) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("representation serializes");
        if let serde_json::Value::Object(m) = &mut v {
            m.insert("arg_order".into(), arg_order.into());
        }
        v
    }
}

/// Supremum of `b·y + y*·a − y*·y` over the graph points `(y, y*)` of one
/// segment. Linear segments leave a concave quadratic in the parameter, so
/// the maximizer is the clamped vertex; axis-parallel segments leave a
/// linear objective whose supremum sits at an endpoint or escapes.
fn segment_sup(seg: &Segment, a: f64, b: f64) -> ExtReal {
    match *seg {
        Segment::Point { x, y } => Finite(b * x + y * a - y * x),
        Segment::Vertical { x, y_lo, y_hi } => {
            // objective: b·x + t·(a − x) over t ∈ [y_lo, y_hi]
            let d = a - x;
            if d > 0.0 {
                if y_hi.is_finite() { Finite(b * x + y_hi * d) } else { PosInf }
            } else if d < 0.0 {
                if y_lo.is_finite() { Finite(b * x + y_lo * d) } else { PosInf }
            } else {
                Finite(b * x)
            }
        }
        Segment::Horizontal { y, x_lo, x_hi } => {
            // objective: y·a + t·(b − y) over t ∈ [x_lo, x_hi]
            let d = b - y;
            if d > 0.0 {
                if x_hi.is_finite() { Finite(y * a + x_hi * d) } else { PosInf }
            } else if d < 0.0 {
                if x_lo.is_finite() { Finite(y * a + x_lo * d) } else { PosInf }
            } else {
                Finite(y * a)
            }
        }
        Segment::Sloped { slope, intercept, x_lo, x_hi } => {
            // objective in y: -slope·y² + (b + slope·a - intercept)·y + intercept·a
            let lin = b + slope * a - intercept;
            let vertex = lin / (2.0 * slope);
            let y = vertex.clamp(x_lo, x_hi);
            Finite(-slope * y * y + lin * y + intercept * a)
        }
    }
}

fn push_affine(affines: &mut Vec<Affine2>, a: Affine2) {
    if !affines.iter().any(|b| b.close_to(&a, 1e-12)) {
        affines.push(a);
    }
}

/// The supremum over a staircase graph is a finite maximum of endpoint
/// affines, going infinite beyond the constraints contributed by unbounded
/// segment ends. Both pieces assemble into an exact polyhedral description.
fn staircase_polymax(op: &Operator) -> BivariateFn {
    let mut affines: Vec<Affine2> = vec![];
    let mut xr = Interval::all();
    let mut yr = Interval::all();
    let clip = |iv: &mut Interval, lo: f64, hi: f64| {
        let cons = Interval::new(lo, lo.is_finite(), hi, hi.is_finite());
        *iv = iv.intersect(&cons).expect("staircase constraints are consistent");
    };
    for seg in op.segments() {
        match *seg {
            Segment::Point { x, y } => {
                push_affine(&mut affines, Affine2 { gx: y, gy: x, c: -x * y });
            }
            Segment::Vertical { x, y_lo, y_hi } => {
                let mut endpoint = false;
                if y_hi.is_finite() {
                    push_affine(&mut affines, Affine2 { gx: y_hi, gy: x, c: -y_hi * x });
                    endpoint = true;
                } else {
                    clip(&mut xr, f64::NEG_INFINITY, x);
                }
                if y_lo.is_finite() {
                    push_affine(&mut affines, Affine2 { gx: y_lo, gy: x, c: -y_lo * x });
                    endpoint = true;
                } else {
                    clip(&mut xr, x, f64::INFINITY);
                }
                if !endpoint {
                    // full vertical line: value x*·x on the slice
                    push_affine(&mut affines, Affine2 { gx: 0.0, gy: x, c: 0.0 });
                }
            }
            Segment::Horizontal { y, x_lo, x_hi } => {
                let mut endpoint = false;
                if x_hi.is_finite() {
                    push_affine(&mut affines, Affine2 { gx: y, gy: x_hi, c: -y * x_hi });
                    endpoint = true;
                } else {
                    clip(&mut yr, f64::NEG_INFINITY, y);
                }
                if x_lo.is_finite() {
                    push_affine(&mut affines, Affine2 { gx: y, gy: x_lo, c: -y * x_lo });
                    endpoint = true;
                } else {
                    clip(&mut yr, y, f64::INFINITY);
                }
                if !endpoint {
                    push_affine(&mut affines, Affine2 { gx: y, gy: 0.0, c: 0.0 });
                }
            }
            Segment::Sloped { .. } => unreachable!("staircase graphs have no sloped runs"),
        }
    }
    let domain = if xr.is_all() && yr.is_all() {
        Domain2::All
    } else {
        Domain2::Box(Box2::new(xr, yr))
    };
    BivariateFn::PolyMax { affines, domain }
}

/// Largest-coupling representative of the graph:
/// `(x, x*) ↦ sup { x*·y + y*·x − y*·y : (y, y*) ∈ G(T) }`.
///
/// Staircase graphs come back in exact polyhedral form; graphs with sloped
/// runs keep the segment-wise closed-form supremum as an evaluator.
pub fn fitzpatrick_fn(t: &Operator) -> BivariateFn {
    if t.is_staircase() {
        staircase_polymax(t)
    } else {
        BivariateFn::SegmentSup { op: t.clone(), neg_second: false }
    }
}

/// Representative built from a convex potential: `(x, x*) ↦ f(x) + f*(x*)`.
pub fn fenchel_representative(f: &PlqFunction) -> Result<BivariateFn> {
    let second = f.conjugate()?;
    Ok(BivariateFn::Separable { first: f.clone(), second })
}

/// Convex interpolation of finitely many graph points: the lower convex
/// envelope of the lifted samples `(y, y*, y·y*)`, finite exactly on the
/// convex hull of the sample.
#[allow(non_snake_case)]
pub fn psi_T(t: &Operator, sample: &[(f64, f64)]) -> Result<BivariateFn> {
    if sample.is_empty() {
        return Err(Error::Malformed("empty graph sample".into()));
    }
    for &(x, y) in sample {
        if !t.contains(x, y, GEOM_TOL) {
            return Err(Error::NotOnGraph(x, y));
        }
    }
    let lifted: Vec<[f64; 3]> = sample.iter().map(|&(x, y)| [x, y, x * y]).collect();
    let (affines, hull) = lower_envelope(&lifted);
    Ok(BivariateFn::PolyMax { affines, domain: Domain2::Hull(hull) })
}

/// Sign flip in the second argument: `ĥ(a, b) = h(a, −b)`, exact in every
/// representation.
pub fn hat_transform(h: &BivariateFn) -> BivariateFn {
    match h {
        BivariateFn::Separable { first, second } => {
            BivariateFn::Separable { first: first.clone(), second: second.reflect() }
        }
        BivariateFn::PolyMax { affines, domain } => BivariateFn::PolyMax {
            affines: affines
                .iter()
                .map(|a| Affine2 { gx: a.gx, gy: -a.gy, c: a.c })
                .collect(),
            domain: domain.neg_y(),
        },
        BivariateFn::SegmentSup { op, neg_second } => {
            BivariateFn::SegmentSup { op: op.clone(), neg_second: !neg_second }
        }
        BivariateFn::Sampled(g) => {
            let y = *g.y_axis();
            let flipped = Axis::new(-y.hi(), -y.lo(), y.len()).expect("axis stays valid");
            let ny = y.len();
            let nx = g.x_axis().len();
            let mut values = Vec::with_capacity(nx * ny);
            for i in 0..nx {
                for j in 0..ny {
                    values.push(g.at(i, ny - 1 - j));
                }
            }
            BivariateFn::Sampled(
                Grid2::new(*g.x_axis(), flipped, values).expect("same shape"),
            )
        }
    }
}

/// Exact conjugate `h*(v, w) = sup { v·a + w·b − h(a, b) }`, pairing slots
/// in order. Separable inputs conjugate per component; polyhedral maxima go
/// through the separation shortcut, a bounded-domain candidate search, or
/// the planar lower envelope. Anything else needs the grid route (`llt_2d`).
pub fn conjugate_bivariate(h: &BivariateFn) -> Result<BivariateFn> {
    match h {
        BivariateFn::Separable { first, second } => Ok(BivariateFn::Separable {
            first: first.conjugate()?,
            second: second.conjugate()?,
        }),
        BivariateFn::PolyMax { affines, domain } => conjugate_polymax(affines, domain),
        _ => Err(Error::NeedsGrid),
    }
}

/// Splits a polyhedral max into `[max of (gx·a + part of c) + δ_X](a) +
/// [max of (gy·b + rest) + δ_Y](b)` when all minorants share a slope in one
/// slot and the domain is a box.
fn try_separate(affines: &[Affine2], domain: &Domain2) -> Option<(PlqFunction, PlqFunction)> {
    let (ix, iy) = match domain {
        Domain2::All => (Interval::all(), Interval::all()),
        Domain2::Box(b) => (b.x, b.y),
        Domain2::Hull(_) => return None,
    };
    let dx = PlqFunction::indicator(ix.lo, ix.hi);
    let dy = PlqFunction::indicator(iy.lo, iy.hi);
    if affines.is_empty() {
        return Some((dx, dy));
    }
    let max_along = |slopes: &mut dyn Iterator<Item = (f64, f64)>| -> PlqFunction {
        let mut out: Option<PlqFunction> = None;
        for (b, c) in slopes {
            let aff = PlqFunction::affine(b, c);
            out = Some(match out {
                None => aff,
                Some(cur) => pointwise_max(&cur, &aff),
            });
        }
        out.expect("at least one minorant")
    };
    if affines.iter().all(|a| (a.gx - affines[0].gx).abs() <= 1e-12) {
        let first = dx.transform_shift_tilt(0.0, -affines[0].gx);
        let second = max_along(&mut affines.iter().map(|a| (a.gy, a.c))).add(&dy);
        return Some((first, second));
    }
    if affines.iter().all(|a| (a.gy - affines[0].gy).abs() <= 1e-12) {
        let first = max_along(&mut affines.iter().map(|a| (a.gx, a.c))).add(&dx);
        let second = dy.transform_shift_tilt(0.0, -affines[0].gy);
        return Some((first, second));
    }
    None
}

fn line_intersect(n1: [f64; 2], r1: f64, n2: [f64; 2], r2: f64) -> Option<[f64; 2]> {
    let det = n1[0] * n2[1] - n1[1] * n2[0];
    if det.abs() <= 1e-12 {
        return None;
    }
    Some([(r1 * n2[1] - r2 * n1[1]) / det, (n1[0] * r2 - n2[0] * r1) / det])
}

fn conjugate_polymax(affines: &[Affine2], domain: &Domain2) -> Result<BivariateFn> {
    if let Some((f, g)) = try_separate(affines, domain) {
        return Ok(BivariateFn::Separable { first: f.conjugate()?, second: g.conjugate()? });
    }
    let poly = match domain {
        Domain2::All => None,
        Domain2::Box(b) => {
            if b.x.lo.is_finite() && b.x.hi.is_finite() && b.y.lo.is_finite() && b.y.hi.is_finite()
            {
                Some(Poly2::from_points(&[
                    [b.x.lo, b.y.lo],
                    [b.x.hi, b.y.lo],
                    [b.x.hi, b.y.hi],
                    [b.x.lo, b.y.hi],
                ]))
            } else {
                return Err(Error::NeedsGrid);
            }
        }
        Domain2::Hull(p) => {
            if p.is_bounded() {
                Some(p.clone())
            } else {
                return Err(Error::NeedsGrid);
            }
        }
    };
    match poly {
        Some(p) => Ok(conjugate_over_polygon(affines, &p)),
        None => {
            // unconstrained max of affines: the conjugate is the lower
            // convex envelope of the slope points (g, -c)
            let lifted: Vec<[f64; 3]> =
                affines.iter().map(|a| [a.gx, a.gy, -a.c]).collect();
            let (facets, hull) = lower_envelope(&lifted);
            Ok(BivariateFn::PolyMax { affines: facets, domain: Domain2::Hull(hull) })
        }
    }
}

/// Conjugate of `max(affines) + δ_P` for bounded `P`: the supremum is
/// attained on the vertex set of the subdivision of `P` into linearity
/// cells, so every vertex, tie-line edge crossing, and interior triple tie
/// becomes one affine `w ↦ w·z − F(z)` of the conjugate.
fn conjugate_over_polygon(affines: &[Affine2], p: &Poly2) -> BivariateFn {
    let value_at = |z: [f64; 2]| -> f64 {
        affines.iter().map(|a| a.eval(z)).fold(None, |m: Option<f64>, v| {
            Some(m.map_or(v, |m: f64| m.max(v)))
        })
        .unwrap_or(0.0)
    };
    let verts = p.vertices();
    let mut cands: Vec<[f64; 2]> = verts.to_vec();
    let push_cand = |cs: &mut Vec<[f64; 2]>, z: [f64; 2]| {
        if cs.iter().all(|q| (q[0] - z[0]).abs() > GEOM_TOL || (q[1] - z[1]).abs() > GEOM_TOL) {
            cs.push(z);
        }
    };
    // tie lines between pairs of minorants
    let mut ties: Vec<([f64; 2], f64)> = vec![];
    for i in 0..affines.len() {
        for j in i + 1..affines.len() {
            let n = [affines[i].gx - affines[j].gx, affines[i].gy - affines[j].gy];
            if n[0].abs() <= 1e-12 && n[1].abs() <= 1e-12 {
                continue;
            }
            ties.push((n, affines[j].c - affines[i].c));
        }
    }
    // tie line against polygon edge
    for &(n, r) in &ties {
        for k in 0..verts.len() {
            let a = verts[k];
            let b = verts[(k + 1) % verts.len()];
            if verts.len() == 2 && k == 1 {
                break;
            }
            let e = [b[0] - a[0], b[1] - a[1]];
            let den = n[0] * e[0] + n[1] * e[1];
            if den.abs() <= 1e-12 {
                continue;
            }
            let t = (r - n[0] * a[0] - n[1] * a[1]) / den;
            if (-GEOM_TOL..=1.0 + GEOM_TOL).contains(&t) {
                push_cand(&mut cands, [a[0] + t * e[0], a[1] + t * e[1]]);
            }
        }
    }
    // triple ties inside the polygon
    for i in 0..ties.len() {
        for j in i + 1..ties.len() {
            if let Some(z) = line_intersect(ties[i].0, ties[i].1, ties[j].0, ties[j].1) {
                if p.contains(z, GEOM_TOL) {
                    push_cand(&mut cands, z);
                }
            }
        }
    }
    let mut out: Vec<Affine2> = vec![];
    for z in cands {
        push_affine(&mut out, Affine2 { gx: z[0], gy: z[1], c: -value_at(z) });
    }
    BivariateFn::PolyMax { affines: out, domain: Domain2::All }
}

/// Facet planes and footprint of the lower convex envelope of 3D points.
/// The envelope function is the maximum of the returned affines over the
/// returned hull.
pub fn lower_envelope(points: &[[f64; 3]]) -> (Vec<Affine2>, Poly2) {
    // coincident base points keep only the lowest lift
    let mut pts: Vec<[f64; 3]> = vec![];
    for &p in points {
        match pts
            .iter_mut()
            .find(|q| (q[0] - p[0]).abs() <= 1e-12 && (q[1] - p[1]).abs() <= 1e-12)
        {
            Some(q) => q[2] = q[2].min(p[2]),
            None => pts.push(p),
        }
    }
    let base: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
    let hull = Poly2::from_points(&base);
    if pts.len() == 1 {
        return (vec![Affine2 { gx: 0.0, gy: 0.0, c: pts[0][2] }], hull);
    }

    // collinearity against the widest spanning direction
    let p0 = base[0];
    let far = base
        .iter()
        .max_by(|a, b| {
            let da = (a[0] - p0[0]).hypot(a[1] - p0[1]);
            let db = (b[0] - p0[0]).hypot(b[1] - p0[1]);
            da.partial_cmp(&db).unwrap()
        })
        .copied()
        .unwrap();
    let span = (far[0] - p0[0]).hypot(far[1] - p0[1]);
    let d = [(far[0] - p0[0]) / span, (far[1] - p0[1]) / span];
    let max_cross = base
        .iter()
        .map(|q| ((q[0] - p0[0]) * d[1] - (q[1] - p0[1]) * d[0]).abs())
        .fold(0.0_f64, f64::max);
    if max_cross <= GEOM_TOL * span.max(1.0) {
        // 1D hull along the common line, extended to planes constant in the
        // transverse direction
        let samples: Vec<(f64, f64)> = pts
            .iter()
            .map(|p| ((p[0] - p0[0]) * d[0] + (p[1] - p0[1]) * d[1], p[2]))
            .collect();
        let mut sorted = samples.clone();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let hull1 = lower_hull(&sorted);
        let shift = p0[0] * d[0] + p0[1] * d[1];
        let mut facets = vec![];
        if hull1.len() == 1 {
            facets.push(Affine2 { gx: 0.0, gy: 0.0, c: hull1[0].1 });
        }
        for w in hull1.windows(2) {
            let m = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            push_affine(
                &mut facets,
                Affine2 { gx: m * d[0], gy: m * d[1], c: w[0].1 - m * w[0].0 - m * shift },
            );
        }
        return (facets, hull);
    }

    let mut facets: Vec<Affine2> = vec![];
    let m = pts.len();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let (pi, pj, pk) = (pts[i], pts[j], pts[k]);
                let det = (pj[0] - pi[0]) * (pk[1] - pi[1]) - (pj[1] - pi[1]) * (pk[0] - pi[0]);
                if det.abs() <= 1e-12 {
                    continue;
                }
                let rz1 = pj[2] - pi[2];
                let rz2 = pk[2] - pi[2];
                let gx = (rz1 * (pk[1] - pi[1]) - rz2 * (pj[1] - pi[1])) / det;
                let gy = ((pj[0] - pi[0]) * rz2 - (pk[0] - pi[0]) * rz1) / det;
                let c = pi[2] - gx * pi[0] - gy * pi[1];
                let plane = Affine2 { gx, gy, c };
                if pts.iter().all(|q| plane.eval([q[0], q[1]]) <= q[2] + GEOM_TOL) {
                    push_affine(&mut facets, plane);
                }
            }
        }
    }
    (facets, hull)
}

/// Scaled sup-metric distance from a point to the graph, in grid steps.
fn graph_distance_steps(t: &Operator, x: f64, y: f64, hx: f64, hy: f64) -> f64 {
    let dist_at = |gx: f64, gy: f64| ((x - gx) / hx).abs().max(((y - gy) / hy).abs());
    let mut best = f64::INFINITY;
    for seg in t.segments() {
        let d = match *seg {
            Segment::Point { x: px, y: py } => dist_at(px, py),
            Segment::Vertical { x: vx, y_lo, y_hi } => dist_at(vx, y.clamp(y_lo, y_hi)),
            Segment::Horizontal { y: hy0, x_lo, x_hi } => dist_at(x.clamp(x_lo, x_hi), hy0),
            Segment::Sloped { slope, intercept, x_lo, x_hi } => {
                // candidate parameters: closest in x, closest in y, and the
                // scaled least-squares projection
                let u1 = x.clamp(x_lo, x_hi);
                let u2 = ((y - intercept) / slope).clamp(x_lo, x_hi);
                let (a, b) = (1.0 / (hx * hx), 1.0 / (hy * hy));
                let u3 = ((a * x + b * slope * (y - intercept)) / (a + b * slope * slope))
                    .clamp(x_lo, x_hi);
                [u1, u2, u3]
                    .iter()
                    .map(|&u| dist_at(u, slope * u + intercept))
                    .fold(f64::INFINITY, f64::min)
            }
        };
        best = best.min(d);
    }
    best
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidityReport {
    pub nodes: usize,
    /// smallest h − c over finite nodes; must clear −1e-9
    pub min_margin: f64,
    pub margin_failures: usize,
    pub on_graph_nodes: usize,
    /// largest |h − c| over nodes on the graph; must stay within 1e-9
    pub on_graph_max_gap: f64,
    pub equality_failures: usize,
    pub off_graph_nodes: usize,
    /// smallest h − c over nodes at least two steps from the graph
    pub off_graph_min_excess: f64,
    pub strictness_failures: usize,
    /// whether the conjugate side ran exactly or through the grid fallback
    pub conjugate_exact: bool,
    /// tolerance band applied to the conjugate inequality
    pub conjugate_band: f64,
    pub conjugate_min_margin: f64,
    pub conjugate_failures: usize,
    pub midpoint_violations: usize,
    pub passed: bool,
}

/// Checks the defining inequalities of a representative of `T` on the node
/// set of the given axes: `h ≥ c` everywhere, `h* ≥ c` with slots swapped,
/// equality within 1e-9 on graph nodes, strict excess at nodes two or more
/// steps away from the graph, and discrete midpoint convexity along rows,
/// columns and both diagonals.
pub fn representative_validity_check(
    h: &BivariateFn,
    t: &Operator,
    x_axis: Axis,
    y_axis: Axis,
) -> ValidityReport {
    let tol = 1e-9;
    let (nx, ny) = (x_axis.len(), y_axis.len());
    let mut vals = vec![PosInf; nx * ny];
    for i in 0..nx {
        for j in 0..ny {
            vals[i * ny + j] = h.eval([x_axis.node(i), y_axis.node(j)]);
        }
    }

    let mut min_margin = f64::INFINITY;
    let mut margin_failures = 0;
    let mut on_graph_nodes = 0;
    let mut on_graph_max_gap: f64 = 0.0;
    let mut equality_failures = 0;
    let mut off_graph_nodes = 0;
    let mut off_graph_min_excess = f64::INFINITY;
    let mut strictness_failures = 0;

    for i in 0..nx {
        for j in 0..ny {
            let (x, y) = (x_axis.node(i), y_axis.node(j));
            let c = x * y;
            let hv = vals[i * ny + j];
            if let Finite(v) = hv {
                min_margin = min_margin.min(v - c);
                if v - c < -tol {
                    margin_failures += 1;
                }
            } else if hv.is_neg_inf() {
                margin_failures += 1;
            }
            if t.contains(x, y, 1e-12) {
                on_graph_nodes += 1;
                match hv {
                    Finite(v) => {
                        let gap = (v - c).abs();
                        on_graph_max_gap = on_graph_max_gap.max(gap);
                        if gap > tol {
                            equality_failures += 1;
                        }
                    }
                    _ => equality_failures += 1,
                }
            } else if graph_distance_steps(t, x, y, x_axis.step(), y_axis.step()) >= 2.0 {
                off_graph_nodes += 1;
                if let Finite(v) = hv {
                    off_graph_min_excess = off_graph_min_excess.min(v - c);
                    if v - c <= tol {
                        strictness_failures += 1;
                    }
                }
            }
        }
    }

    // conjugate side: h*(y, x) ≥ x·y, exactly when conjugation is exact,
    // within an O(step) band when only the grid transform is available
    let mut conjugate_exact = true;
    let mut conjugate_band = tol;
    let mut conjugate_min_margin = f64::INFINITY;
    let mut conjugate_failures = 0;
    let conj_at: Box<dyn Fn(f64, f64) -> ExtReal> = match conjugate_bivariate(h) {
        Ok(hc) => Box::new(move |v, w| hc.eval([v, w])),
        Err(_) => {
            conjugate_exact = false;
            let wx = x_axis.lo().abs().max(x_axis.hi().abs());
            let wy = y_axis.lo().abs().max(y_axis.hi().abs());
            conjugate_band = wx.max(wy) * (x_axis.step() + y_axis.step()) + tol;
            let sampled = Grid2::sample(x_axis, y_axis, Strategy::default(), |a, b| {
                h.eval([a, b])
            })
            .ok()
            .and_then(|g| {
                crate::grid::llt_2d(&g, Some(y_axis), Some(x_axis), Strategy::default()).ok()
            });
            match sampled {
                Some(g) => Box::new(move |v, w| g.eval_nearest([v, w])),
                None => Box::new(|_, _| PosInf),
            }
        }
    };
    for i in 0..nx {
        for j in 0..ny {
            let (x, y) = (x_axis.node(i), y_axis.node(j));
            match conj_at(y, x) {
                Finite(v) => {
                    conjugate_min_margin = conjugate_min_margin.min(v - x * y);
                    if v - x * y < -conjugate_band {
                        conjugate_failures += 1;
                    }
                }
                NegInf => conjugate_failures += 1,
                PosInf => {}
            }
        }
    }

    // midpoint convexity on adjacent triples; an infinite midpoint between
    // finite neighbours breaks convexity, an infinite neighbour constrains
    // nothing
    let mut midpoint_violations = 0;
    let mut check_triple = |lo: ExtReal, mid: ExtReal, hi: ExtReal| {
        if let (Finite(a), Finite(b)) = (lo, hi) {
            match mid {
                Finite(m) => {
                    if 2.0 * m > a + b + tol {
                        midpoint_violations += 1;
                    }
                }
                _ => midpoint_violations += 1,
            }
        }
    };
    for i in 0..nx {
        for j in 1..ny.saturating_sub(1) {
            check_triple(vals[i * ny + j - 1], vals[i * ny + j], vals[i * ny + j + 1]);
        }
    }
    for j in 0..ny {
        for i in 1..nx.saturating_sub(1) {
            check_triple(vals[(i - 1) * ny + j], vals[i * ny + j], vals[(i + 1) * ny + j]);
        }
    }
    for i in 1..nx.saturating_sub(1) {
        for j in 1..ny.saturating_sub(1) {
            check_triple(
                vals[(i - 1) * ny + j - 1],
                vals[i * ny + j],
                vals[(i + 1) * ny + j + 1],
            );
            check_triple(
                vals[(i - 1) * ny + j + 1],
                vals[i * ny + j],
                vals[(i + 1) * ny + j - 1],
            );
        }
    }

    let passed = margin_failures == 0
        && equality_failures == 0
        && strictness_failures == 0
        && conjugate_failures == 0
        && midpoint_violations == 0;
    ValidityReport {
        nodes: nx * ny,
        min_margin,
        margin_failures,
        on_graph_nodes,
        on_graph_max_gap,
        equality_failures,
        off_graph_nodes,
        off_graph_min_excess,
        strictness_failures,
        conjugate_exact,
        conjugate_band,
        conjugate_min_margin,
        conjugate_failures,
        midpoint_violations,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::ExtReal::Finite;

    fn wall() -> Operator {
        // graph {(x, 0): x ≥ 0} ∪ {(0, y): y ≤ 0}
        Operator::new(vec![
            Segment::Vertical { x: 0.0, y_lo: f64::NEG_INFINITY, y_hi: 0.0 },
            Segment::Horizontal { y: 0.0, x_lo: 0.0, x_hi: f64::INFINITY },
        ])
        .unwrap()
    }

    fn pin() -> Operator {
        // full vertical line at the origin
        Operator::new(vec![Segment::Vertical {
            x: 0.0,
            y_lo: f64::NEG_INFINITY,
            y_hi: f64::INFINITY,
        }])
        .unwrap()
    }

    #[test]
    fn fitzpatrick_of_wall_is_quadrant_indicator() {
        let phi = fitzpatrick_fn(&wall());
        assert_eq!(phi.eval([0.0, 0.0]), Finite(0.0));
        assert_eq!(phi.eval([3.0, -2.0]), Finite(0.0));
        assert_eq!(phi.eval([3.0, 0.0]), Finite(0.0));
        assert_eq!(phi.eval([-0.5, -1.0]), ExtReal::PosInf);
        assert_eq!(phi.eval([1.0, 0.5]), ExtReal::PosInf);
        let bx = phi.domain_box().unwrap();
        assert_eq!(bx.x.lo, 0.0);
        assert_eq!(bx.y.hi, 0.0);
        assert!(bx.x.hi.is_infinite() && bx.y.lo.is_infinite());
    }

    #[test]
    fn fitzpatrick_of_pin_lives_on_the_axis() {
        let phi = fitzpatrick_fn(&pin());
        assert_eq!(phi.eval([0.0, 5.0]), Finite(0.0));
        assert_eq!(phi.eval([0.0, -7.0]), Finite(0.0));
        assert_eq!(phi.eval([0.1, 0.0]), ExtReal::PosInf);
    }

    #[test]
    fn fitzpatrick_of_duality_map_is_squared_average() {
        let phi = fitzpatrick_fn(&Operator::duality_map());
        for &(x, xs) in &[(0.0, 0.0), (1.0, 1.0), (2.0, -1.0), (-3.0, 0.5), (0.3, 0.7)] {
            let want = (x + xs) * (x + xs) / 4.0;
            let got = phi.eval([x, xs]).finite().unwrap();
            assert!((got - want).abs() <= 1e-12, "({x}, {xs}): {got} vs {want}");
        }
    }

    #[test]
    fn fitzpatrick_of_interval_normal_cone_is_abs_on_slab() {
        let phi = fitzpatrick_fn(&Operator::normal_cone(-1.0, 1.0));
        assert_eq!(phi.eval([0.5, 2.0]), Finite(2.0));
        assert_eq!(phi.eval([0.5, -2.0]), Finite(2.0));
        assert_eq!(phi.eval([-1.0, 3.0]), Finite(3.0));
        assert_eq!(phi.eval([0.0, 0.0]), Finite(0.0));
        assert_eq!(phi.eval([2.0, 0.0]), ExtReal::PosInf);
    }

    #[test]
    fn conjugate_of_wall_representative_swaps_the_quadrant() {
        let phi = fitzpatrick_fn(&wall());
        let conj = conjugate_bivariate(&phi).unwrap();
        // read as h*(x*, x): zero when x* ≤ 0 and x ≥ 0
        assert_eq!(conj.eval([-1.0, 2.0]), Finite(0.0));
        assert_eq!(conj.eval([0.0, 0.0]), Finite(0.0));
        assert_eq!(conj.eval([1.0, 2.0]), ExtReal::PosInf);
        assert_eq!(conj.eval([-1.0, -2.0]), ExtReal::PosInf);
    }

    #[test]
    fn conjugate_of_pin_representative_pins_the_second_slot() {
        let phi = fitzpatrick_fn(&pin());
        let conj = conjugate_bivariate(&phi).unwrap();
        assert_eq!(conj.eval([5.0, 0.0]), Finite(0.0));
        assert_eq!(conj.eval([-9.0, 0.0]), Finite(0.0));
        assert_eq!(conj.eval([5.0, 0.5]), ExtReal::PosInf);
    }

    #[test]
    fn fenchel_representative_of_half_square_is_symmetric() {
        let f = PlqFunction::quadratic(0.5, 0.0, 0.0);
        let rep = fenchel_representative(&f).unwrap();
        assert_eq!(rep.eval([1.0, 1.0]), Finite(1.0));
        assert_eq!(rep.eval([1.0, 0.0]), Finite(0.5));
        assert_eq!(rep.eval([3.0, -2.0]), Finite(6.5));
        let conj = conjugate_bivariate(&rep).unwrap();
        for &(a, b) in &[(0.0, 0.0), (1.0, 2.0), (-0.5, 3.0)] {
            assert_eq!(conj.eval([a, b]), rep.eval([a, b]));
        }
    }

    #[test]
    fn fenchel_representative_matches_fitzpatrick_on_sublinear_potentials() {
        let rep = fenchel_representative(&PlqFunction::indicator(0.0, f64::INFINITY)).unwrap();
        let phi = fitzpatrick_fn(&wall());
        for &w in &[[0.0, 0.0], [2.0, -1.0], [2.0, 1.0], [-1.0, -1.0], [5.0, 0.0]] {
            assert_eq!(rep.eval(w), phi.eval(w), "at {w:?}");
        }
        let rep_pin = fenchel_representative(&PlqFunction::point_indicator(0.0)).unwrap();
        let phi_pin = fitzpatrick_fn(&pin());
        for &w in &[[0.0, 3.0], [0.0, -4.0], [1.0, 0.0]] {
            assert_eq!(rep_pin.eval(w), phi_pin.eval(w), "at {w:?}");
        }
    }

    #[test]
    fn hat_transform_is_an_involution_and_flips_sign() {
        let rep = fenchel_representative(&PlqFunction::abs_fn()).unwrap();
        let hat = hat_transform(&rep);
        let back = hat_transform(&hat);
        for &w in &[[0.0, 0.5], [1.0, -1.0], [-2.0, 0.25], [3.0, 2.0]] {
            assert_eq!(hat.eval(w), rep.eval([w[0], -w[1]]), "at {w:?}");
            assert_eq!(back.eval(w), rep.eval(w), "at {w:?}");
        }
        let phi = fitzpatrick_fn(&Operator::duality_map());
        let hat_phi = hat_transform(&phi);
        for &w in &[[1.0, 1.0], [2.0, -0.5]] {
            assert_eq!(hat_phi.eval(w), phi.eval([w[0], -w[1]]));
        }
    }

    #[test]
    fn hat_and_conjugate_commute() {
        // conj(hat h)(v, w) = (conj h)(v, -w)
        for rep in [
            fenchel_representative(&PlqFunction::abs_fn()).unwrap(),
            fitzpatrick_fn(&wall()),
            fitzpatrick_fn(&Operator::normal_cone(-1.0, 1.0)),
        ] {
            let lhs = conjugate_bivariate(&hat_transform(&rep)).unwrap();
            let rhs = conjugate_bivariate(&rep).unwrap();
            for &w in &[[0.0, 0.0], [1.0, 0.5], [-0.5, 2.0], [0.25, -3.0]] {
                assert_eq!(lhs.eval(w), rhs.eval([w[0], -w[1]]), "at {w:?}");
            }
        }
    }

    #[test]
    fn interpolation_of_single_point_is_its_indicator() {
        let psi = psi_T(&pin(), &[(0.0, 0.0)]).unwrap();
        assert_eq!(psi.eval([0.0, 0.0]), Finite(0.0));
        assert_eq!(psi.eval([0.0, 1.0]), ExtReal::PosInf);
        assert_eq!(psi.eval([0.5, 0.0]), ExtReal::PosInf);
    }

    #[test]
    fn interpolation_of_two_points_runs_along_the_segment() {
        let psi = psi_T(&Operator::duality_map(), &[(0.0, 0.0), (1.0, 1.0)]).unwrap();
        for t in [0.0, 0.25, 0.5, 1.0] {
            let v = psi.eval([t, t]).finite().unwrap();
            assert!((v - t).abs() <= 1e-12, "at {t}: {v}");
        }
        assert_eq!(psi.eval([0.5, 0.6]), ExtReal::PosInf);
        assert_eq!(psi.eval([2.0, 2.0]), ExtReal::PosInf);
    }

    #[test]
    fn interpolation_rejects_points_off_the_graph() {
        let err = psi_T(&Operator::duality_map(), &[(1.0, 2.0)]).unwrap_err();
        assert!(matches!(err, Error::NotOnGraph(_, _)));
        assert!(matches!(
            psi_T(&pin(), &[]).unwrap_err(),
            Error::Malformed(_)
        ));
    }

    #[test]
    fn conjugate_of_interpolation_recovers_sample_coupling() {
        // conj over the sample {(0,0), (1,1)}: max(0, v + w - 1)
        let psi = psi_T(&Operator::duality_map(), &[(0.0, 0.0), (1.0, 1.0)]).unwrap();
        let conj = conjugate_bivariate(&psi).unwrap();
        for &(v, w) in &[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0), (-1.0, 0.5), (3.0, 2.0)] {
            let want = (v + w - 1.0f64).max(0.0);
            let got = conj.eval([v, w]).finite().unwrap();
            assert!((got - want).abs() <= 1e-9, "({v}, {w}): {got} vs {want}");
        }
    }

    #[test]
    fn interpolation_dominates_fitzpatrick_at_nodes() {
        let t = Operator::normal_cone(-1.0, 1.0);
        let sample = [(-1.0, -2.0), (-1.0, 0.0), (0.0, 0.0), (1.0, 0.0), (1.0, 2.0)];
        let psi = psi_T(&t, &sample).unwrap();
        let phi = fitzpatrick_fn(&t);
        let ax = Axis::symmetric(2.0, 17).unwrap();
        for x in ax.nodes() {
            for y in ax.nodes() {
                let (p, q) = (phi.eval([x, y]), psi.eval([x, y]));
                assert!(p <= q || p == q, "phi > psi at ({x}, {y}): {p:?} vs {q:?}");
            }
        }
        // equality where the sample pins the graph
        assert_eq!(psi.eval([0.0, 0.0]), Finite(0.0));
        assert_eq!(psi.eval([1.0, 1.0]), Finite(1.0));
    }

    #[test]
    fn envelope_of_square_corners_is_hinge() {
        let pts = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 1.0]];
        let (facets, hull) = lower_envelope(&pts);
        assert!(hull.is_bounded());
        let env = BivariateFn::PolyMax { affines: facets, domain: Domain2::Hull(hull) };
        for &(x, y, want) in &[
            (0.5, 0.5, 0.0),
            (0.9, 0.9, 0.8),
            (1.0, 0.5, 0.5),
            (0.0, 0.7, 0.0),
        ] {
            let got = env.eval([x, y]).finite().unwrap();
            assert!((got - want).abs() <= 1e-9, "({x}, {y}): {got} vs {want}");
        }
        assert_eq!(env.eval([1.5, 0.5]), ExtReal::PosInf);
    }

    #[test]
    fn validity_check_passes_wall_representative() {
        let t = wall();
        let (ax, ay) = (Axis::symmetric(4.0, 33).unwrap(), Axis::symmetric(4.0, 33).unwrap());
        let rep = representative_validity_check(&fitzpatrick_fn(&t), &t, ax, ay);
        assert!(rep.passed, "{rep:?}");
        assert!(rep.on_graph_nodes > 0 && rep.off_graph_nodes > 0);
        assert!(rep.conjugate_exact);
        assert!(rep.on_graph_max_gap <= 1e-9);
    }

    #[test]
    fn validity_check_equality_set_of_duality_map_is_the_diagonal() {
        let t = Operator::duality_map();
        let (ax, ay) = (Axis::symmetric(4.0, 33).unwrap(), Axis::symmetric(4.0, 33).unwrap());
        let rep = representative_validity_check(&fitzpatrick_fn(&t), &t, ax, ay);
        assert!(rep.passed, "{rep:?}");
        assert!(!rep.conjugate_exact, "no finite description of this conjugate");
        assert_eq!(rep.on_graph_nodes, 33);
        assert!(rep.off_graph_min_excess > 0.0);
    }

    #[test]
    fn validity_check_rejects_the_bilinear_coupling() {
        // c(x, y) = x·y minorizes nothing and is not convex; the midpoint
        // test along the antidiagonal must fire
        let ax = Axis::symmetric(2.0, 9).unwrap();
        let grid = Grid2::sample(ax, ax, Strategy::default(), |x, y| Finite(x * y)).unwrap();
        let rep = representative_validity_check(
            &BivariateFn::Sampled(grid),
            &Operator::duality_map(),
            ax,
            ax,
        );
        assert!(!rep.passed);
        assert!(rep.midpoint_violations > 0);
    }

    #[test]
    fn json_carries_tag_and_argument_order() {
        let phi = fitzpatrick_fn(&wall());
        let j = phi.to_json("(x, x*)");
        assert_eq!(j["kind"], "poly_max");
        assert_eq!(j["arg_order"], "(x, x*)");
        let rep = fenchel_representative(&PlqFunction::abs_fn()).unwrap();
        assert_eq!(rep.to_json("(x, x*)")["kind"], "separable");
    }
}
