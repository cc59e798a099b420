//! Uniform grids and the discrete transforms used as the numeric fallback
//! when no exact representation is available: Legendre transforms of sampled
//! functions, discrete inf-convolution, and a refining search for minimizers.
//!
//! Grid values live in the extended reals but never take -inf. The discrete
//! Legendre transform of a sampled function is finite on its whole dual
//! axis, including slopes outside the true dual domain, because it is a
//! maximum over finitely many finite affine forms; comparisons against exact
//! conjugates are therefore meaningful only where the exact conjugate is
//! finite.

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::parallel::{map_indexed, Strategy};

pub const DEFAULT_GRID_N: usize = 257;
pub const DEFAULT_BOX_HALF_WIDTH: f64 = 8.0;
pub const DEFAULT_TOL: f64 = 1e-6;

/// Uniformly spaced nodes `lo + i*step`, `i = 0..n`, with `n >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Axis {
    lo: f64,
    hi: f64,
    n: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Axis> {
        if !lo.is_finite() || !hi.is_finite() || !(hi > lo) {
            return Err(Error::BadAxis(format!("range [{lo}, {hi}] is not finite and increasing")));
        }
        if n < 2 {
            return Err(Error::BadAxis(format!("{n} nodes, need at least 2")));
        }
        Ok(Axis { lo, hi, n })
    }

    /// Symmetric axis `[-half, half]` with the module defaults.
    pub fn default_box() -> Axis {
        Axis::new(-DEFAULT_BOX_HALF_WIDTH, DEFAULT_BOX_HALF_WIDTH, DEFAULT_GRID_N).unwrap()
    }

    pub fn symmetric(half: f64, n: usize) -> Result<Axis> {
        Axis::new(-half, half, n)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        if i == self.n - 1 {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.node(i))
    }

    /// Index of the node nearest to `t`, ties resolved to the lower index.
    /// `None` when `t` is more than half a step outside the axis.
    pub fn nearest(&self, t: f64) -> Option<usize> {
        let h = self.step();
        if t < self.lo - 0.5 * h || t > self.hi + 0.5 * h {
            return None;
        }
        let u = (t - self.lo) / h;
        let frac = u - u.floor();
        let k = if (frac - 0.5).abs() == 0.0 { u.floor() } else { u.round() };
        Some((k.max(0.0) as usize).min(self.n - 1))
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }
}

/// Function sampled on one axis.
#[derive(Clone, Debug, serde::Serialize)]
pub struct Grid1 {
    axis: Axis,
    values: Vec<ExtReal>,
}

impl Grid1 {
    pub fn new(axis: Axis, values: Vec<ExtReal>) -> Result<Grid1> {
        if values.len() != axis.len() {
            return Err(Error::GridMismatch(format!(
                "{} values on an axis of {} nodes",
                values.len(),
                axis.len()
            )));
        }
        if values.iter().any(|v| v.is_neg_inf()) {
            return Err(Error::GridMismatch("grid value is -inf".into()));
        }
        Ok(Grid1 { axis, values })
    }

    pub fn sample(axis: Axis, f: impl Fn(f64) -> ExtReal) -> Result<Grid1> {
        let values = (0..axis.len()).map(|i| f(axis.node(i))).collect();
        Grid1::new(axis, values)
    }

    pub fn axis(&self) -> &Axis {
        &self.axis
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn value(&self, i: usize) -> ExtReal {
        self.values[i]
    }

    /// Value at the node nearest `t`; +inf beyond the half-step margin.
    pub fn eval_nearest(&self, t: f64) -> ExtReal {
        match self.axis.nearest(t) {
            Some(i) => self.values[i],
            None => ExtReal::PosInf,
        }
    }
}

/// Function sampled on a product of two axes, row-major in the first axis:
/// the value at `(x.node(i), y.node(j))` sits at `i * y.len() + j`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct Grid2 {
    x: Axis,
    y: Axis,
    values: Vec<ExtReal>,
}

impl Grid2 {
    pub fn new(x: Axis, y: Axis, values: Vec<ExtReal>) -> Result<Grid2> {
        if values.len() != x.len() * y.len() {
            return Err(Error::GridMismatch(format!(
                "{} values on a {}x{} grid",
                values.len(),
                x.len(),
                y.len()
            )));
        }
        if values.iter().any(|v| v.is_neg_inf()) {
            return Err(Error::GridMismatch("grid value is -inf".into()));
        }
        Ok(Grid2 { x, y, values })
    }

    pub fn sample(
        x: Axis,
        y: Axis,
        strategy: Strategy,
        f: impl Fn(f64, f64) -> ExtReal + Sync + Send,
    ) -> Result<Grid2> {
        let ny = y.len();
        let values = map_indexed(strategy, x.len() * ny, |k| f(x.node(k / ny), y.node(k % ny)));
        Grid2::new(x, y, values)
    }

    pub fn x_axis(&self) -> &Axis {
        &self.x
    }

    pub fn y_axis(&self) -> &Axis {
        &self.y
    }

    pub fn at(&self, i: usize, j: usize) -> ExtReal {
        self.values[i * self.y.len() + j]
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn eval_nearest(&self, p: [f64; 2]) -> ExtReal {
        match (self.x.nearest(p[0]), self.y.nearest(p[1])) {
            (Some(i), Some(j)) => self.at(i, j),
            _ => ExtReal::PosInf,
        }
    }
}

/// Strict lower convex hull of the finite sample points, as indices into
/// ascending x. Consecutive chord slopes strictly increase.
pub(crate) fn lower_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = vec![];
    for &(x, v) in points {
        while hull.len() >= 2 {
            let (x1, v1) = hull[hull.len() - 2];
            let (x2, v2) = hull[hull.len() - 1];
            // Keep (x2, v2) only if it lies strictly below the chord from
            // (x1, v1) to (x, v).
            if (v2 - v1) * (x - x1) >= (v - v1) * (x2 - x1) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, v));
    }
    hull
}

/// Discrete Legendre transform `g(s) = max_i [ s * x_i - f(x_i) ]` over the
/// finite sample points, evaluated on `dual`.
///
/// The default dual axis spans the chord slopes of the lower convex hull of
/// the samples, the exact range on which the discrete transform can track a
/// true conjugate; a degenerate slope range is widened to unit width. Errors
/// if every sample is +inf.
pub fn llt_1d(f: &Grid1, dual: Option<Axis>) -> Result<Grid1> {
    let pts: Vec<(f64, f64)> = (0..f.axis().len())
        .filter_map(|i| f.value(i).finite().map(|v| (f.axis().node(i), v)))
        .collect();
    if pts.is_empty() {
        return Err(Error::AllInfinite);
    }
    let hull = lower_hull(&pts);
    let dual = match dual {
        Some(axis) => axis,
        None => {
            let (mut s_lo, mut s_hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for w in hull.windows(2) {
                let s = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                s_lo = s_lo.min(s);
                s_hi = s_hi.max(s);
            }
            if s_lo > s_hi {
                (s_lo, s_hi) = (-0.5, 0.5);
            } else if s_hi - s_lo < 1e-12 {
                (s_lo, s_hi) = (s_lo - 0.5, s_hi + 0.5);
            }
            Axis::new(s_lo, s_hi, f.axis().len())?
        }
    };

    let mut values = Vec::with_capacity(dual.len());
    let mut k = 0usize;
    for s in dual.nodes() {
        while k + 1 < hull.len() {
            let slope = (hull[k + 1].1 - hull[k].1) / (hull[k + 1].0 - hull[k].0);
            if slope <= s {
                k += 1;
            } else {
                break;
            }
        }
        values.push(ExtReal::Finite(s * hull[k].0 - hull[k].1));
    }
    Grid1::new(dual, values)
}

/// Two-dimensional discrete Legendre transform via two passes of the
/// one-dimensional one: first along x within each y-row, then along y.
/// Rows with no finite sample drop out of the outer maximum.
pub fn llt_2d(
    f: &Grid2,
    dual_x: Option<Axis>,
    dual_y: Option<Axis>,
    strategy: Strategy,
) -> Result<Grid2> {
    let nx = f.x_axis().len();
    let ny = f.y_axis().len();

    let dual_x = match dual_x {
        Some(a) => a,
        None => {
            // Smallest axis covering every row's default slope range.
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for j in 0..ny {
                let row = Grid1::new(
                    *f.x_axis(),
                    (0..nx).map(|i| f.at(i, j)).collect(),
                )?;
                if let Ok(t) = llt_1d(&row, None) {
                    lo = lo.min(t.axis().lo());
                    hi = hi.max(t.axis().hi());
                }
            }
            if lo > hi {
                return Err(Error::AllInfinite);
            }
            Axis::new(lo, hi, nx)?
        }
    };

    // Stage 1: a(s, j) = max_i [ s x_i - f(i, j) ], or None for empty rows.
    let stage1: Vec<Option<Grid1>> = map_indexed(strategy, ny, |j| {
        let row = Grid1::new(*f.x_axis(), (0..nx).map(|i| f.at(i, j)).collect()).ok()?;
        llt_1d(&row, Some(dual_x)).ok()
    });
    if stage1.iter().all(|r| r.is_none()) {
        return Err(Error::AllInfinite);
    }

    let dual_y = match dual_y {
        Some(a) => a,
        None => {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for s_idx in 0..dual_x.len() {
                let col = Grid1::new(
                    *f.y_axis(),
                    (0..ny)
                        .map(|j| match &stage1[j] {
                            Some(row) => row.value(s_idx).scale(-1.0),
                            None => ExtReal::PosInf,
                        })
                        .collect(),
                )?;
                if let Ok(t) = llt_1d(&col, None) {
                    lo = lo.min(t.axis().lo());
                    hi = hi.max(t.axis().hi());
                }
            }
            if lo > hi {
                return Err(Error::AllInfinite);
            }
            Axis::new(lo, hi, ny)?
        }
    };

    // Stage 2: g(s, t) = max_j [ t y_j + a(s, j) ], a Legendre transform of
    // -a along y for each fixed s.
    let columns: Vec<Result<Vec<ExtReal>>> = map_indexed(strategy, dual_x.len(), |s_idx| {
        let col = Grid1::new(
            *f.y_axis(),
            (0..ny)
                .map(|j| match &stage1[j] {
                    Some(row) => row.value(s_idx).scale(-1.0),
                    None => ExtReal::PosInf,
                })
                .collect(),
        )?;
        Ok(llt_1d(&col, Some(dual_y))?.values().to_vec())
    });

    let mut values = vec![ExtReal::PosInf; dual_x.len() * dual_y.len()];
    for (s_idx, col) in columns.into_iter().enumerate() {
        let col = col?;
        for (t_idx, v) in col.into_iter().enumerate() {
            values[s_idx * dual_y.len() + t_idx] = v;
        }
    }
    Grid2::new(dual_x, dual_y, values)
}

/// Discrete inf-convolution with a linear tilt:
/// `h(w) = min_u [ f(w - u) + g(u) + tilt * u ]`, `u` ranging over the nodes
/// of `g` and `w - u` snapped to the nearest node of `f` (+inf beyond its
/// half-step margin).
pub fn discrete_infconv_1d(f: &Grid1, g: &Grid1, tilt: f64, out: Axis) -> Result<Grid1> {
    let values = (0..out.len())
        .map(|k| {
            let w = out.node(k);
            let mut best = ExtReal::PosInf;
            for (j, u) in g.axis().nodes().enumerate() {
                let Some(gv) = g.value(j).finite() else { continue };
                if let Some(fv) = f.eval_nearest(w - u).finite() {
                    best = best.min(ExtReal::Finite(fv + gv + tilt * u));
                }
            }
            best
        })
        .collect();
    Grid1::new(out, values)
}

/// Two-dimensional discrete inf-convolution with a linear tilt on the second
/// argument block:
/// `h(w) = min_u [ f(w - u) + g(u) + tilt . u ]` over the nodes of `g`.
pub fn discrete_infconv_2d(
    f: &Grid2,
    g: &Grid2,
    tilt: [f64; 2],
    out_x: Axis,
    out_y: Axis,
    strategy: Strategy,
) -> Result<Grid2> {
    let g_nodes: Vec<(f64, f64, f64)> = (0..g.x_axis().len())
        .flat_map(|i| {
            let gx = g.x_axis().node(i);
            (0..g.y_axis().len()).filter_map(move |j| {
                g.at(i, j).finite().map(|v| (gx, g.y_axis().node(j), v))
            })
        })
        .collect::<Vec<_>>();
    let ny = out_y.len();
    let values = map_indexed(strategy, out_x.len() * ny, |k| {
        let w = [out_x.node(k / ny), out_y.node(k % ny)];
        let mut best = ExtReal::PosInf;
        for &(ux, uy, gv) in &g_nodes {
            if let Some(fv) = f.eval_nearest([w[0] - ux, w[1] - uy]).finite() {
                best = best.min(ExtReal::Finite(fv + gv + tilt[0] * ux + tilt[1] * uy));
            }
        }
        best
    });
    Grid2::new(out_x, out_y, values)
}

/// Outcome of a minimizer search over a rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Probe {
    /// Best point found, strictly inside the search box.
    Minimizer { u: [f64; 2], value: f64 },
    /// The incumbent sits on the edge of the search box; the true infimum
    /// may lie outside and attainment cannot be certified.
    Boundary { u: [f64; 2], value: f64 },
}

impl Probe {
    pub fn value(&self) -> f64 {
        match self {
            Probe::Minimizer { value, .. } | Probe::Boundary { value, .. } => *value,
        }
    }

    pub fn point(&self) -> [f64; 2] {
        match self {
            Probe::Minimizer { u, .. } | Probe::Boundary { u, .. } => *u,
        }
    }
}

const REFINE_NODES: usize = 33;

/// Searches `min_u [ f(w - u) + g(u) + tilt . u ]` by scanning the search
/// box and repeatedly rebuilding a finer local grid (two coarse cells wide)
/// around the incumbent. `None` when the objective is +inf everywhere on the
/// search box.
///
/// The refinement loop stops early once the local grid step drops below
/// `tol`. An incumbent within one initial step of the search box edge is
/// reported as `Boundary`.
pub fn attainment_probe(
    f: &(dyn Fn([f64; 2]) -> ExtReal + Sync),
    g: &(dyn Fn([f64; 2]) -> ExtReal + Sync),
    tilt: [f64; 2],
    w: [f64; 2],
    search: (Axis, Axis),
    tol: f64,
    refinements: usize,
) -> Option<Probe> {
    let objective = |u: [f64; 2]| -> ExtReal {
        let fv = f([w[0] - u[0], w[1] - u[1]]);
        match fv.try_add(g(u)) {
            Some(v) => match v.try_add(ExtReal::Finite(tilt[0] * u[0] + tilt[1] * u[1])) {
                Some(t) => t,
                None => ExtReal::PosInf,
            },
            None => ExtReal::PosInf,
        }
    };

    let scan = |ax: &Axis, ay: &Axis| -> Option<([f64; 2], f64)> {
        let ny = ay.len();
        let best = map_indexed(Strategy::default(), ax.len() * ny, |k| {
            let u = [ax.node(k / ny), ay.node(k % ny)];
            (objective(u), u)
        })
        .into_iter()
        .filter_map(|(v, u)| v.finite().map(|v| (v, u)))
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())?;
        Some((best.1, best.0))
    };

    let (outer_x, outer_y) = search;
    let (mut u, mut value) = scan(&outer_x, &outer_y)?;

    let near_edge = |u: [f64; 2]| {
        u[0] - outer_x.lo() < outer_x.step() - 1e-12
            || outer_x.hi() - u[0] < outer_x.step() - 1e-12
            || u[1] - outer_y.lo() < outer_y.step() - 1e-12
            || outer_y.hi() - u[1] < outer_y.step() - 1e-12
    };

    let (mut hx, mut hy) = (outer_x.step(), outer_y.step());
    for _ in 0..refinements {
        if near_edge(u) {
            return Some(Probe::Boundary { u, value });
        }
        if hx.max(hy) < tol {
            break;
        }
        let ax = Axis::new(u[0] - 2.0 * hx, u[0] + 2.0 * hx, REFINE_NODES).ok()?;
        let ay = Axis::new(u[1] - 2.0 * hy, u[1] + 2.0 * hy, REFINE_NODES).ok()?;
        if let Some((nu, nv)) = scan(&ax, &ay) {
            if nv <= value {
                u = nu;
                value = nv;
            }
        }
        hx = ax.step();
        hy = ay.step();
    }
    if near_edge(u) {
        return Some(Probe::Boundary { u, value });
    }
    Some(Probe::Minimizer { u, value })
}
