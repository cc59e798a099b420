//! Planar convex sets in two representations: axis-aligned boxes built from
//! `Interval`s (domains of bivariate functions) and convex polyhedra in
//! vertex/ray form (hulls of operator graphs and their Minkowski
//! differences). The polyhedron type derives a complete halfplane
//! description from its generators, which makes membership and interior
//! tests exact for the piecewise-linear data handled here.

use crate::interval::Interval;
use serde::{Deserialize, Serialize};

/// Product of two intervals. Empty if either factor is empty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Box2 {
    pub x: Interval,
    pub y: Interval,
}

impl Box2 {
    pub fn new(x: Interval, y: Interval) -> Self {
        Box2 { x, y }
    }

    pub fn all() -> Self {
        Box2 { x: Interval::all(), y: Interval::all() }
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty() || self.y.is_empty()
    }

    pub fn is_all(&self) -> bool {
        self.x.is_all() && self.y.is_all()
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.x.contains(p[0]) && self.y.contains(p[1])
    }

    pub fn contains_within(&self, p: [f64; 2], tol: f64) -> bool {
        self.x.contains_within(p[0], tol) && self.y.contains_within(p[1], tol)
    }

    pub fn intersect(&self, other: &Box2) -> Option<Box2> {
        Some(Box2 { x: self.x.intersect(&other.x)?, y: self.y.intersect(&other.y)? })
    }

    pub fn shift(&self, dx: f64, dy: f64) -> Box2 {
        Box2 { x: self.x.shift(dx), y: self.y.shift(dy) }
    }

    /// Minkowski difference `self - other`, factor by factor.
    pub fn minkowski_sub(&self, other: &Box2) -> Box2 {
        Box2 { x: self.x.minkowski_sub(&other.x), y: self.y.minkowski_sub(&other.y) }
    }

    /// Mirror in the second coordinate.
    pub fn neg_y(&self) -> Box2 {
        Box2 { x: self.x, y: self.y.neg() }
    }

    pub fn relative_interior(&self) -> Box2 {
        Box2 { x: self.x.relative_interior(), y: self.y.relative_interior() }
    }
}

/// Closed halfplane `n . w <= c`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HalfPlane {
    pub n: [f64; 2],
    pub c: f64,
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Convex hull of a point set, counterclockwise, collinear points dropped.
/// Degenerate inputs collapse to one or two points.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap().then(a[1].partial_cmp(&b[1]).unwrap()));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<[f64; 2]> = vec![];
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = vec![];
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Convex polyhedron `conv(verts) + cone(rays)` with at least one vertex.
#[derive(Clone, Debug, Serialize)]
pub struct Poly2 {
    verts: Vec<[f64; 2]>,
    rays: Vec<[f64; 2]>,
}

impl Poly2 {
    pub fn new(verts: Vec<[f64; 2]>, rays: Vec<[f64; 2]>) -> Poly2 {
        assert!(!verts.is_empty(), "polyhedron needs at least one vertex");
        let verts = convex_hull(&verts);
        let mut unit: Vec<[f64; 2]> = rays
            .into_iter()
            .filter(|r| norm(*r) > 0.0)
            .map(|r| {
                let l = norm(r);
                [r[0] / l, r[1] / l]
            })
            .collect();
        unit.sort_by(|a, b| a.partial_cmp(b).unwrap());
        unit.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        Poly2 { verts, rays: unit }
    }

    pub fn from_points(points: &[[f64; 2]]) -> Poly2 {
        Poly2::new(points.to_vec(), vec![])
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.verts
    }

    pub fn rays(&self) -> &[[f64; 2]] {
        &self.rays
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty()
    }

    /// Mirror in the second coordinate. Turns the hull of a graph `G(T)`
    /// into the hull of `G(-T)`.
    pub fn neg_y(&self) -> Poly2 {
        Poly2::new(
            self.verts.iter().map(|v| [v[0], -v[1]]).collect(),
            self.rays.iter().map(|r| [r[0], -r[1]]).collect(),
        )
    }

    /// Minkowski difference `self - other = { a - b }`. Vertices combine
    /// pairwise, rays accumulate with the second set negated.
    pub fn minkowski_sub(&self, other: &Poly2) -> Poly2 {
        let mut verts = Vec::with_capacity(self.verts.len() * other.verts.len());
        for a in &self.verts {
            for b in &other.verts {
                verts.push([a[0] - b[0], a[1] - b[1]]);
            }
        }
        let mut rays = self.rays.clone();
        rays.extend(other.rays.iter().map(|r| [-r[0], -r[1]]));
        Poly2::new(verts, rays)
    }

    /// Supporting halfplanes whose intersection equals the polyhedron.
    ///
    /// Candidate normals are the perpendiculars of vertex differences and of
    /// rays, both signs, plus the four axis directions (which close off
    /// points and segments). A candidate supports the set when every ray
    /// points weakly inward; its offset is the maximum over vertices.
    /// Redundant halfplanes are kept; they do not affect membership.
    pub fn hrep(&self) -> Vec<HalfPlane> {
        let mut cands: Vec<[f64; 2]> = vec![[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]];
        for i in 0..self.verts.len() {
            for j in (i + 1)..self.verts.len() {
                let d = [
                    self.verts[j][0] - self.verts[i][0],
                    self.verts[j][1] - self.verts[i][1],
                ];
                cands.push([-d[1], d[0]]);
                cands.push([d[1], -d[0]]);
            }
        }
        for r in &self.rays {
            cands.push([-r[1], r[0]]);
            cands.push([r[1], -r[0]]);
        }
        let mut out: Vec<HalfPlane> = vec![];
        for c in cands {
            let l = norm(c);
            if l < 1e-12 {
                continue;
            }
            let n = [c[0] / l, c[1] / l];
            if out
                .iter()
                .any(|h| (h.n[0] - n[0]).abs() < 1e-12 && (h.n[1] - n[1]).abs() < 1e-12)
            {
                continue;
            }
            if self.rays.iter().all(|r| dot(*r, n) <= 1e-12) {
                let c = self
                    .verts
                    .iter()
                    .map(|v| dot(*v, n))
                    .fold(f64::NEG_INFINITY, f64::max);
                out.push(HalfPlane { n, c });
            }
        }
        out
    }

    pub fn contains(&self, q: [f64; 2], tol: f64) -> bool {
        self.hrep().iter().all(|h| dot(q, h.n) <= h.c + tol)
    }

    /// Topological interior membership. Empty for lower-dimensional sets,
    /// where opposite supporting halfplanes force equality.
    pub fn interior_contains(&self, q: [f64; 2], margin: f64) -> bool {
        self.hrep().iter().all(|h| dot(q, h.n) < h.c - margin)
    }

    /// Support value `sup { n . w : w in self }`.
    pub fn support(&self, n: [f64; 2]) -> f64 {
        if self.rays.iter().any(|r| dot(*r, n) > 1e-12) {
            return f64::INFINITY;
        }
        self.verts.iter().map(|v| dot(*v, n)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// The polyhedron as a product of intervals, when it is one.
    ///
    /// The candidate box is the support box; it equals the set exactly when
    /// its finite corners lie inside and its recession directions are
    /// recession directions of the set.
    pub fn to_box(&self) -> Option<Box2> {
        let hi_x = self.support([1.0, 0.0]);
        let lo_x = -self.support([-1.0, 0.0]);
        let hi_y = self.support([0.0, 1.0]);
        let lo_y = -self.support([0.0, -1.0]);
        let bx = Box2::new(Interval::closed(lo_x, hi_x), Interval::closed(lo_y, hi_y));
        let hrep = self.hrep();
        let inside = |q: [f64; 2]| hrep.iter().all(|h| dot(q, h.n) <= h.c + 1e-9);
        for &cx in &[lo_x, hi_x] {
            for &cy in &[lo_y, hi_y] {
                if cx.is_finite() && cy.is_finite() && !inside([cx, cy]) {
                    return None;
                }
            }
        }
        let mut recession: Vec<[f64; 2]> = vec![];
        if lo_x == f64::NEG_INFINITY {
            recession.push([-1.0, 0.0]);
        }
        if hi_x == f64::INFINITY {
            recession.push([1.0, 0.0]);
        }
        if lo_y == f64::NEG_INFINITY {
            recession.push([0.0, -1.0]);
        }
        if hi_y == f64::INFINITY {
            recession.push([0.0, 1.0]);
        }
        // Mixed corners of an unbounded box recede diagonally; those
        // directions must be admissible too.
        if hi_x == f64::INFINITY && hi_y == f64::INFINITY {
            recession.push([1.0, 1.0]);
        }
        if hi_x == f64::INFINITY && lo_y == f64::NEG_INFINITY {
            recession.push([1.0, -1.0]);
        }
        if lo_x == f64::NEG_INFINITY && hi_y == f64::INFINITY {
            recession.push([-1.0, 1.0]);
        }
        if lo_x == f64::NEG_INFINITY && lo_y == f64::NEG_INFINITY {
            recession.push([-1.0, -1.0]);
        }
        for d in recession {
            if hrep.iter().any(|h| dot(d, h.n) > 1e-12) {
                return None;
            }
        }
        Some(bx)
    }
}
