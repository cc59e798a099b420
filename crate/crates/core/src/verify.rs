//! The certificate engine: range membership for sums of maximal monotone
//! operators through representative functions, surjectivity sweeps,
//! zero-in-range with total duality, classical regularity conditions, and
//! the subdifferential/normal-cone drivers.
//!
//! A query asks whether `p* ∈ R(S(p + ·) + T)`. The engine forms
//! `V = inf over (u*, u) of [f_S*(p* − u*, p − u) + f̂_T*(u*, u) + p*·u + p·u*]`,
//! which always dominates the duality product `⟨p*, p⟩`; membership holds
//! exactly when `V = ⟨p*, p⟩` with the infimum attained and both optimality
//! residuals vanishing. Separable representatives make the computation an
//! exact one-dimensional infimal convolution per slot; otherwise a probe
//! minimizes the objective numerically and the verdict degrades honestly.

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::ext::ExtReal::{self, Finite, NegInf, PosInf};
use crate::fitzpatrick::{
    conjugate_bivariate, fenchel_representative, fitzpatrick_fn, hat_transform, BivariateFn,
};
use crate::grid::{
    attainment_probe, llt_2d, Axis, Grid2, Probe, DEFAULT_BOX_HALF_WIDTH, DEFAULT_GRID_N,
};
use crate::interval::Interval;
use crate::operators::{sum_range_oracle, Operator};
use crate::parallel::{map_indexed, Strategy};
use crate::plq::{inf_convolution, PlqFunction};
use crate::poly2::{Box2, Poly2};

/// Which representative function backs the certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RepChoice {
    /// `f(x) + f*(x*)` built from the operator potential. Always separable,
    /// so queries run on the exact route.
    Fenchel,
    /// The graph supremum. Polyhedral for staircase graphs, an exact
    /// evaluator otherwise.
    Fitzpatrick,
}

/// Where the coupling tilt sits in the infimal convolution. Both placements
/// describe the same value after normalization; keeping both exercises that
/// identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TiltPlacement {
    /// tilt `p*·u + p·u*` added inside the infimum
    SumSide,
    /// tilt subtracted from `f_S*`, with `2⟨p*, p⟩` restored afterwards
    ConjSide,
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub reps: RepChoice,
    pub tilt: TiltPlacement,
    /// tolerance for exact-kernel comparisons
    pub exact_tol: f64,
    /// tolerance for probe- and grid-backed comparisons
    pub grid_tol: f64,
    pub grid_n: usize,
    pub box_half: f64,
    pub strategy: Strategy,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            reps: RepChoice::Fenchel,
            tilt: TiltPlacement::SumSide,
            exact_tol: 1e-9,
            grid_tol: 1e-6,
            grid_n: DEFAULT_GRID_N,
            box_half: DEFAULT_BOX_HALF_WIDTH,
            strategy: Strategy::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "reason")]
pub enum Verdict {
    #[serde(rename = "YES")]
    Yes,
    #[serde(rename = "NO")]
    No(String),
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive(String),
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes)
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No(_))
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Verdict::Inconclusive(_))
    }

    /// Agreement with the oracle answer; `None` when no claim was made.
    pub fn agrees_with(&self, oracle: bool) -> Option<bool> {
        match self {
            Verdict::Yes => Some(oracle),
            Verdict::No(_) => Some(!oracle),
            Verdict::Inconclusive(_) => None,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Yes => write!(f, "YES"),
            Verdict::No(r) => write!(f, "NO ({r})"),
            Verdict::Inconclusive(r) => write!(f, "INCONCLUSIVE ({r})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// separable representatives, one-dimensional exact kernels
    Exact,
    /// exact conjugate evaluators minimized by the refinement probe
    Probe,
    /// grid-transformed conjugates; verdicts carry a discretization band
    Grid,
}

#[derive(Clone, Debug, Serialize)]
pub struct RangeCheckReport {
    pub p: f64,
    pub ps: f64,
    pub rep: RepChoice,
    pub route: Route,
    pub representatives: serde_json::Value,
    /// certified infimal value, normalized to the sum-side tilt placement
    pub value: ExtReal,
    /// the duality product `p*·p` the value is measured against
    pub target: f64,
    pub gap: ExtReal,
    /// attaining `(ū*, ū)` of the dual infimum
    pub witness: Option<[f64; 2]>,
    /// recovered solution point `x̄ = −ū` of `p* ∈ S(p + x) + T(x)`
    pub solution: Option<f64>,
    /// the two optimality residuals at the witness
    pub residuals: Option<[f64; 2]>,
    /// direct graph checks: `p* − ū* ∈ S(p − ū)` and `ū* ∈ T(−ū)`
    pub graph_memberships: Option<[bool; 2]>,
    /// exact answer of the range oracle at this query
    pub oracle: bool,
    pub oracle_agrees: Option<bool>,
    pub verdict: Verdict,
}

fn rep_summary(h: &BivariateFn, arg_order: &str) -> serde_json::Value {
    match h {
        BivariateFn::Sampled(g) => json!({
            "kind": "sampled",
            "nx": g.x_axis().len(),
            "ny": g.y_axis().len(),
            "arg_order": arg_order,
        }),
        _ => h.to_json(arg_order),
    }
}

struct Reps {
    f_s: BivariateFn,
    f_t: BivariateFn,
    f_t_hat: BivariateFn,
}

fn build_reps(s: &Operator, t: &Operator, choice: RepChoice) -> Result<Reps> {
    let (f_s, f_t) = match choice {
        RepChoice::Fenchel => (
            fenchel_representative(&s.potential())?,
            fenchel_representative(&t.potential())?,
        ),
        RepChoice::Fitzpatrick => (fitzpatrick_fn(s), fitzpatrick_fn(t)),
    };
    let f_t_hat = hat_transform(&f_t);
    Ok(Reps { f_s, f_t, f_t_hat })
}

/// Conjugate components of both separable representatives.
struct ExactKernels {
    /// first and second slot of `f_S*`
    a_star: PlqFunction,
    b_star: PlqFunction,
    /// first and second slot of `f̂_T*`
    c_star: PlqFunction,
    d_star: PlqFunction,
}

fn exact_kernels(reps: &Reps) -> Option<ExactKernels> {
    let (a, b) = reps.f_s.as_separable()?;
    let (c, d) = reps.f_t_hat.as_separable()?;
    Some(ExactKernels {
        a_star: a.conjugate().ok()?,
        b_star: b.conjugate().ok()?,
        c_star: c.conjugate().ok()?,
        d_star: d.conjugate().ok()?,
    })
}

/// One slot of the separable dual infimum, as value and attaining point.
/// An unbounded-below slot is legal only when the other slot is identically
/// `+∞`; it is reported as `-∞` here and reconciled by the caller.
fn slot_infimum(g: &PlqFunction, f: &PlqFunction, at: f64) -> Result<(ExtReal, Option<f64>)> {
    match inf_convolution(g, f) {
        Ok(ic) => Ok((ic.value.eval(at), ic.witness(at))),
        Err(Error::UnboundedBelow(_)) => Ok((NegInf, None)),
        Err(e) => Err(e),
    }
}

/// Checks `p* ∈ R(S(p + ·) + T)` and assembles the full certificate.
pub fn range_membership(
    s: &Operator,
    t: &Operator,
    p: f64,
    ps: f64,
    reps: RepChoice,
    cfg: &CheckConfig,
) -> Result<RangeCheckReport> {
    let bundle = build_reps(s, t, reps)?;
    let oracle = sum_range_oracle(s, t, p).contains(ps, 0.0);
    let target = ps * p;
    let representatives = json!({
        "f_s": rep_summary(&bundle.f_s, "(x, x*)"),
        "f_t_hat": rep_summary(&bundle.f_t_hat, "(x, x*)"),
    });
    let report = |route: Route,
                  value: ExtReal,
                  witness: Option<[f64; 2]>,
                  residuals: Option<[f64; 2]>,
                  graph_memberships: Option<[bool; 2]>,
                  verdict: Verdict| {
        let gap = match value {
            Finite(v) => Finite(v - target),
            other => other,
        };
        RangeCheckReport {
            p,
            ps,
            rep: reps,
            route,
            representatives: representatives.clone(),
            value,
            target,
            gap,
            witness,
            solution: witness.map(|w| -w[1]),
            residuals,
            graph_memberships,
            oracle,
            oracle_agrees: verdict.agrees_with(oracle),
            verdict,
        }
    };

    // Domain clause: the representatives must overlap after translation,
    // otherwise no representative-based value exists and the query fails.
    if let (Some(bs), Some(bt)) = (bundle.f_s.domain_box(), bundle.f_t_hat.domain_box()) {
        if bs.intersect(&bt.shift(p, ps)).is_none() {
            return Ok(report(
                Route::Exact,
                PosInf,
                None,
                None,
                None,
                Verdict::No("representative domains never meet after translation".into()),
            ));
        }
    }

    if let Some(k) = exact_kernels(&bundle) {
        return exact_route(s, t, p, ps, cfg, &k, report);
    }
    probe_route(&bundle, p, ps, cfg, s, t, report)
}

fn exact_route(
    s: &Operator,
    t: &Operator,
    p: f64,
    ps: f64,
    cfg: &CheckConfig,
    k: &ExactKernels,
    report: impl Fn(
        Route,
        ExtReal,
        Option<[f64; 2]>,
        Option<[f64; 2]>,
        Option<[bool; 2]>,
        Verdict,
    ) -> RangeCheckReport,
) -> Result<RangeCheckReport> {
    // slot infima over u* and u; the tilt placement rearranges the same
    // objective, so the normalized value must agree across placements
    let ((m1, w1), (m2, w2), offset) = match cfg.tilt {
        TiltPlacement::SumSide => {
            let g1 = k.c_star.transform_shift_tilt(0.0, -p);
            let g2 = k.d_star.transform_shift_tilt(0.0, -ps);
            (
                slot_infimum(&g1, &k.a_star, ps)?,
                slot_infimum(&g2, &k.b_star, p)?,
                0.0,
            )
        }
        TiltPlacement::ConjSide => {
            let a_tilted = k.a_star.transform_shift_tilt(0.0, p);
            let b_tilted = k.b_star.transform_shift_tilt(0.0, ps);
            (
                slot_infimum(&k.c_star, &a_tilted, ps)?,
                slot_infimum(&k.d_star, &b_tilted, p)?,
                2.0 * ps * p,
            )
        }
    };
    let value = match m1.try_add(m2) {
        Some(Finite(v)) => Finite(v + offset),
        Some(other) => other,
        // mixed infinities: one slot empty, the joint infimum is +inf
        None => PosInf,
    };
    if value.is_neg_inf() {
        return Err(Error::Malformed(
            "representative value unbounded below; the pair cannot both be representatives".into(),
        ));
    }
    let target = ps * p;
    let witness = match (w1, w2) {
        (Some(us), Some(u)) => Some([us, u]),
        _ => None,
    };
    let (residuals, memberships) = match witness {
        Some([us, u]) => {
            let r1 = (k.a_star.eval(ps - us) + k.b_star.eval(p - u))
                .finite()
                .map(|v| v - (ps - us) * (p - u));
            let r2 = (k.c_star.eval(us) + k.d_star.eval(u)).finite().map(|v| v + us * u);
            let mem = [s.contains(p - u, ps - us, 1e-7), t.contains(-u, us, 1e-7)];
            (r1.zip(r2).map(|(x, y)| [x, y]), Some(mem))
        }
        None => (None, None),
    };
    let verdict = match value {
        Finite(v) if (v - target).abs() <= cfg.exact_tol => match (witness, residuals) {
            (Some(_), Some([r1, r2])) if r1.abs() <= cfg.exact_tol && r2.abs() <= cfg.exact_tol => {
                Verdict::Yes
            }
            _ => Verdict::Inconclusive(
                "value matches the duality product but attainment could not be certified".into(),
            ),
        },
        _ => Verdict::No("certified value exceeds the duality product".into()),
    };
    Ok(report(Route::Exact, value, witness, residuals, memberships, verdict))
}

/// Exact conjugate evaluator when one exists, grid transform otherwise.
fn conj_evaluator(
    h: &BivariateFn,
    cfg: &CheckConfig,
) -> Result<(Box<dyn Fn([f64; 2]) -> ExtReal + Sync>, bool)> {
    match conjugate_bivariate(h) {
        Ok(hc) => Ok((Box::new(move |w| hc.eval(w)), true)),
        Err(Error::NeedsGrid) => {
            let axis = Axis::symmetric(cfg.box_half, cfg.grid_n)?;
            let sampled = Grid2::sample(axis, axis, cfg.strategy, |a, b| h.eval([a, b]))?;
            let g = llt_2d(&sampled, Some(axis), Some(axis), cfg.strategy)?;
            Ok((Box::new(move |w| g.eval_nearest(w)), false))
        }
        Err(e) => Err(e),
    }
}

fn probe_route(
    bundle: &Reps,
    p: f64,
    ps: f64,
    cfg: &CheckConfig,
    s: &Operator,
    t: &Operator,
    report: impl Fn(
        Route,
        ExtReal,
        Option<[f64; 2]>,
        Option<[f64; 2]>,
        Option<[bool; 2]>,
        Verdict,
    ) -> RangeCheckReport,
) -> Result<RangeCheckReport> {
    let (fs_conj, fs_exact) = conj_evaluator(&bundle.f_s, cfg)?;
    let (ft_conj, ft_exact) = conj_evaluator(&bundle.f_t_hat, cfg)?;
    let exact_evals = fs_exact && ft_exact;
    let route = if exact_evals { Route::Probe } else { Route::Grid };
    let target = ps * p;
    // the grid transform and nearest-node snapping cost O(step) accuracy
    let band = if exact_evals {
        cfg.grid_tol
    } else {
        let step = 2.0 * cfg.box_half / (cfg.grid_n as f64 - 1.0);
        4.0 * cfg.box_half * step
    };

    let axis = Axis::symmetric(cfg.box_half, cfg.grid_n)?;
    let (tilt, offset): ([f64; 2], f64) = match cfg.tilt {
        TiltPlacement::SumSide => ([p, ps], 0.0),
        TiltPlacement::ConjSide => ([0.0, 0.0], 2.0 * ps * p),
    };
    let conj_side = cfg.tilt == TiltPlacement::ConjSide;
    let f = |w: [f64; 2]| {
        let base = fs_conj(w);
        if conj_side {
            base + Finite(-p * w[0] - ps * w[1])
        } else {
            base
        }
    };
    let refinements = if exact_evals { 40 } else { 0 };
    let probe = attainment_probe(
        &f,
        &|u| ft_conj(u),
        tilt,
        [ps, p],
        (axis, axis),
        cfg.grid_tol * 1e-3,
        refinements,
    );

    let (value, witness) = match &probe {
        None => (PosInf, None),
        Some(Probe::Boundary { u, value }) | Some(Probe::Minimizer { u, value }) => {
            (Finite(*value + offset), Some(*u))
        }
    };
    let (residuals, memberships) = match witness {
        Some([us, u]) => {
            let r1 = fs_conj([ps - us, p - u]).finite().map(|v| v - (ps - us) * (p - u));
            let r2 = ft_conj([us, u]).finite().map(|v| v + us * u);
            let mem = [s.contains(p - u, ps - us, 1e-5), t.contains(-u, us, 1e-5)];
            (r1.zip(r2).map(|(x, y)| [x, y]), Some(mem))
        }
        None => (None, None),
    };

    let verdict = match &probe {
        None => Verdict::Inconclusive("objective infinite on the whole search box".into()),
        Some(Probe::Boundary { .. }) => {
            Verdict::Inconclusive("infimum escaped to the search boundary".into())
        }
        Some(Probe::Minimizer { value: v, .. }) => {
            let v = *v + offset;
            let res_ok = matches!(residuals, Some([r1, r2]) if r1.abs() <= band && r2.abs() <= band);
            if (v - target).abs() <= band && res_ok {
                Verdict::Yes
            } else if v - target > band {
                if exact_evals {
                    // the objective is convex and evaluated exactly, so an
                    // interior local minimizer certifies the global value
                    Verdict::No("certified value exceeds the duality product".into())
                } else {
                    Verdict::Inconclusive(
                        "grid value exceeds the duality product beyond the discretization band"
                            .into(),
                    )
                }
            } else {
                Verdict::Inconclusive("attainment residuals did not vanish".into())
            }
        }
    };
    Ok(report(route, value, witness, residuals, memberships, verdict))
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSummary {
    pub all_yes_on_grid: bool,
    pub inconclusive: usize,
    /// exact oracle statement: the translated sum covers the whole line
    pub oracle_full_line: bool,
    pub oracle_agrees_everywhere: bool,
    /// scope of the grid claim
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub p: f64,
    pub reports: Vec<RangeCheckReport>,
    pub summary: SweepSummary,
}

/// Runs `range_membership` across a grid of `p*` values. The positive claim
/// is grid evidence; the oracle line is exact.
pub fn surjectivity_sweep(
    s: &Operator,
    t: &Operator,
    p: f64,
    ps_grid: &[f64],
    cfg: &CheckConfig,
) -> Result<SweepReport> {
    let results = map_indexed(cfg.strategy, ps_grid.len(), |i| {
        range_membership(s, t, p, ps_grid[i], cfg.reps, cfg)
    });
    let reports: Vec<RangeCheckReport> = results.into_iter().collect::<Result<_>>()?;
    let oracle = sum_range_oracle(s, t, p);
    let summary = SweepSummary {
        all_yes_on_grid: reports.iter().all(|r| r.verdict.is_yes()),
        inconclusive: reports.iter().filter(|r| r.verdict.is_inconclusive()).count(),
        oracle_full_line: oracle.domain.is_some()
            && oracle.lo.is_neg_inf()
            && oracle.hi.is_pos_inf(),
        oracle_agrees_everywhere: reports.iter().all(|r| r.oracle_agrees != Some(false)),
        note: "grid evidence only; the oracle line is the exact claim".into(),
    };
    Ok(SweepReport { p, reports, summary })
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroRangeReport {
    pub check: RangeCheckReport,
    /// present exactly when the membership verdict is YES
    pub total_duality: Option<TotalDualityReport>,
}

/// Specialization to `0 ∈ R(S + T)`; a positive certificate is completed
/// with the strong-duality decomposition.
pub fn zero_in_range(
    s: &Operator,
    t: &Operator,
    reps: RepChoice,
    cfg: &CheckConfig,
) -> Result<ZeroRangeReport> {
    let check = range_membership(s, t, 0.0, 0.0, reps, cfg)?;
    let total_duality = if check.verdict.is_yes() {
        Some(total_duality_check(s, t, reps, cfg)?)
    } else {
        None
    };
    Ok(ZeroRangeReport { check, total_duality })
}

#[derive(Clone, Debug, Serialize)]
pub struct TotalDualityReport {
    pub primal_value: ExtReal,
    /// primal attaining pair `(ū, ū*)`
    pub primal_witness: Option<[f64; 2]>,
    pub dual_value: ExtReal,
    /// dual attaining pair `(ū*, ū)`
    pub dual_witness: Option<[f64; 2]>,
    pub duality_gap: Option<f64>,
    /// coupling value `c = ū·ū*` at the primal witness
    pub coupling: Option<f64>,
    pub f_s_at_witness: ExtReal,
    pub f_t_hat_at_witness: ExtReal,
    /// deviations of the two witness equalities: `f_S = c` and `f̂_T = −c`
    pub equality_gaps: Option<[f64; 2]>,
    pub primal_attained: bool,
    pub dual_attained: bool,
    pub passed: bool,
}

/// Verifies strong duality for `inf [f_S + f̂_T]` against its conjugate
/// dual, both attained with common value 0, and the witness equalities
/// `f_S(ū, ū*) = ū·ū*`, `f̂_T(ū, ū*) = −ū·ū*`.
pub fn total_duality_check(
    s: &Operator,
    t: &Operator,
    reps: RepChoice,
    cfg: &CheckConfig,
) -> Result<TotalDualityReport> {
    if !sum_range_oracle(s, t, 0.0).contains(0.0, 0.0) {
        return Err(Error::Malformed(
            "total duality requires 0 in the range of the sum".into(),
        ));
    }
    let bundle = build_reps(s, t, reps)?;
    let (a, b) = bundle.f_s.as_separable().ok_or(Error::NeedsGrid)?;
    let (c, d) = bundle.f_t_hat.as_separable().ok_or(Error::NeedsGrid)?;

    // primal splits per slot: inf_x [A + C] + inf_x* [B + D]; a slot that is
    // identically +inf absorbs an unbounded one, hence the +inf fallback
    let (px, wx) = a.add(c).minimize();
    let (pxs, wxs) = b.add(d).minimize();
    let primal_value = px.try_add(pxs).unwrap_or(PosInf);
    let primal_witness = match (wx, wxs) {
        (Some(x), Some(xs)) => Some([x, xs]),
        _ => None,
    };

    // dual: −inf_u* [A*(−u*) + C*(u*)] − inf_u [B*(−u) + D*(u)]
    let (a_star, b_star) = (a.conjugate()?, b.conjugate()?);
    let (c_star, d_star) = (c.conjugate()?, d.conjugate()?);
    let (n1, wus) = a_star.reflect().add(&c_star).minimize();
    let (n2, wu) = b_star.reflect().add(&d_star).minimize();
    let dual_value = -n1.try_add(n2).unwrap_or(PosInf);
    let dual_witness = match (wus, wu) {
        (Some(us), Some(u)) => Some([us, u]),
        _ => None,
    };

    let duality_gap = match (primal_value, dual_value) {
        (Finite(pv), Finite(dv)) => Some(pv - dv),
        _ => None,
    };
    let (coupling, f_s_at_witness, f_t_hat_at_witness, equality_gaps) = match primal_witness {
        Some([u, us]) => {
            let cpl = u * us;
            let fs = bundle.f_s.eval([u, us]);
            let ft = bundle.f_t_hat.eval([u, us]);
            let gaps = match (fs, ft) {
                (Finite(x), Finite(y)) => Some([(x - cpl).abs(), (y + cpl).abs()]),
                _ => None,
            };
            (Some(cpl), fs, ft, gaps)
        }
        None => (None, PosInf, PosInf, None),
    };

    let tol = cfg.grid_tol;
    let passed = matches!(primal_value, Finite(v) if v.abs() <= tol)
        && matches!(dual_value, Finite(v) if v.abs() <= tol)
        && primal_witness.is_some()
        && dual_witness.is_some()
        && matches!(equality_gaps, Some([g1, g2]) if g1 <= tol && g2 <= tol);
    Ok(TotalDualityReport {
        primal_value,
        primal_witness,
        dual_value,
        dual_witness,
        duality_gap,
        coupling,
        f_s_at_witness,
        f_t_hat_at_witness,
        equality_gaps,
        primal_attained: primal_witness.is_some(),
        dual_attained: dual_witness.is_some(),
        passed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionCheck {
    /// `None` means the condition could not be decided exactly
    pub holds: Option<bool>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GridConditionCheck {
    pub holds: Option<bool>,
    pub grid: Vec<f64>,
    pub witnesses: Vec<Option<[f64; 2]>>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    /// dom f_T is the whole product space
    pub dom_f_t_full: ConditionCheck,
    /// dom f_S − dom f̂_T is the whole product space
    pub dom_difference_full: ConditionCheck,
    /// {0} × X* lies in the strong quasi relative interior of the difference
    pub sqri_zero_section: ConditionCheck,
    /// (0, 0) lies in the algebraic interior of co G(S) − co G(−T)
    pub core_origin: ConditionCheck,
    /// the sqri of the difference, when it is a box
    pub sqri_set: Option<Box2>,
    /// the core of the hull difference, when it is a full-dimensional box
    pub core_set: Option<Box2>,
    pub rc: GridConditionCheck,
    pub rc_bar: GridConditionCheck,
    pub rc_tilde: GridConditionCheck,
    pub implication_chain: Vec<String>,
    pub chain_consistent: bool,
}

const CONDITION_GRID: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];

/// Evaluates the classical regularity conditions exactly on the polyhedral
/// domains, plus the value-based conditions on a fixed grid at `p = 0`.
/// In finite dimension the strong quasi relative interior of a polyhedral
/// set is its relative interior, which is what gets computed.
pub fn classical_conditions(
    s: &Operator,
    t: &Operator,
    reps: RepChoice,
) -> Result<RegularityReport> {
    let bundle = build_reps(s, t, reps)?;
    let unknown = || ConditionCheck {
        holds: None,
        detail: "no exact polyhedral domain available for this representative".into(),
    };

    let dom_f_t_full = match bundle.f_t.domain_box() {
        Some(b) => ConditionCheck {
            holds: Some(b.is_all()),
            detail: format!("dom f_T = {} x {}", b.x, b.y),
        },
        None => unknown(),
    };

    let diff = match (bundle.f_s.domain_box(), bundle.f_t_hat.domain_box()) {
        (Some(bs), Some(bt)) => Some(bs.minkowski_sub(&bt)),
        _ => None,
    };
    let dom_difference_full = match &diff {
        Some(d) => ConditionCheck {
            holds: Some(d.is_all()),
            detail: format!("dom f_S - dom f_T_hat = {} x {}", d.x, d.y),
        },
        None => unknown(),
    };
    let (sqri_zero_section, sqri_set) = match &diff {
        Some(d) => {
            let ri = d.relative_interior();
            let holds = ri.x.contains(0.0) && ri.y.is_all();
            (
                ConditionCheck {
                    holds: Some(holds),
                    detail: format!("sqri of the difference = {} x {}", ri.x, ri.y),
                },
                Some(ri),
            )
        }
        None => (unknown(), None),
    };

    // hull difference of the graphs, queried for its algebraic interior
    let (vs, rs) = s.hull_vrep();
    let (vt, rt) = t.hull_vrep();
    let hull_s = Poly2::new(vs, rs);
    let hull_neg_t = Poly2::new(
        vt.into_iter().map(|v| [v[0], -v[1]]).collect(),
        rt.into_iter().map(|r| [r[0], -r[1]]).collect(),
    );
    let d = hull_s.minkowski_sub(&hull_neg_t);
    let origin_inside = d.interior_contains([0.0, 0.0], 0.0);
    let core_set = d.to_box().and_then(|b| {
        if b.x.is_point() || b.y.is_point() {
            None
        } else {
            Some(Box2::new(b.x.relative_interior(), b.y.relative_interior()))
        }
    });
    let core_origin = ConditionCheck {
        holds: Some(origin_inside),
        detail: match &core_set {
            Some(c) => format!("core of the hull difference = {} x {}", c.x, c.y),
            None => "hull difference has empty interior or is not axis-aligned".into(),
        },
    };

    // value-based conditions, evidenced on the fixed grid at p = 0
    let cfg = CheckConfig { reps, ..CheckConfig::default() };
    let sweep = surjectivity_sweep(s, t, 0.0, &CONDITION_GRID, &cfg)?;
    let grid_holds = if sweep.reports.iter().any(|r| r.verdict.is_inconclusive()) {
        None
    } else {
        Some(sweep.reports.iter().all(|r| r.verdict.is_yes()))
    };
    let witnesses: Vec<Option<[f64; 2]>> = sweep.reports.iter().map(|r| r.witness).collect();
    let rc = GridConditionCheck {
        holds: grid_holds,
        grid: CONDITION_GRID.to_vec(),
        witnesses: witnesses.clone(),
        detail: "value condition at p = 0 across the p* grid".into(),
    };
    let rc_bar = GridConditionCheck {
        holds: grid_holds,
        grid: CONDITION_GRID.to_vec(),
        witnesses,
        detail: "surjectivity form of the value condition, p = 0".into(),
    };
    let zero = range_membership(s, t, 0.0, 0.0, reps, &cfg)?;
    let rc_tilde = GridConditionCheck {
        holds: match &zero.verdict {
            Verdict::Yes => Some(true),
            Verdict::No(_) => Some(false),
            Verdict::Inconclusive(_) => None,
        },
        grid: vec![0.0],
        witnesses: vec![zero.witness],
        detail: "zero-in-range form of the value condition".into(),
    };

    let implication_chain = vec![
        "dom f_T full => difference full".to_string(),
        "difference full => zero section in sqri".to_string(),
        "zero section in sqri => value condition on grid".to_string(),
    ];
    let implies = |a: Option<bool>, b: Option<bool>| !matches!((a, b), (Some(true), Some(false)));
    let chain_consistent = implies(dom_f_t_full.holds, dom_difference_full.holds)
        && implies(dom_difference_full.holds, sqri_zero_section.holds)
        && implies(sqri_zero_section.holds, rc_bar.holds);

    Ok(RegularityReport {
        dom_f_t_full,
        dom_difference_full,
        sqri_zero_section,
        core_origin,
        sqri_set,
        core_set,
        rc,
        rc_bar,
        rc_tilde,
        implication_chain,
        chain_consistent,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SinglePoint {
    pub ps: f64,
    /// the reduced dual function evaluated at `y* = p*`
    pub reduced_at_ps: ExtReal,
    pub attained: bool,
    pub witness: Option<f64>,
    pub fenchel_gap: Option<f64>,
    pub in_range: bool,
    pub oracle: bool,
    pub agrees: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SingleSurjectivityReport {
    pub points: Vec<SinglePoint>,
    pub surjective_on_grid: bool,
    pub oracle_range: Interval,
    pub oracle_full_line: bool,
}

/// Surjectivity of a single operator via its representative: `p* ∈ R(S)`
/// exactly when the potential slot attains the conjugate value, tested per
/// grid point through the Fenchel-Young gap.
pub fn single_surjectivity(
    s: &Operator,
    reps: RepChoice,
    ps_grid: &[f64],
    cfg: &CheckConfig,
) -> Result<SingleSurjectivityReport> {
    let bundle = build_reps(s, &Operator::duality_map(), reps)?;
    let (a, b) = bundle.f_s.as_separable().ok_or(Error::NeedsGrid)?;
    let a_star = a.conjugate()?;
    let range = s.range();
    let points: Vec<SinglePoint> = map_indexed(cfg.strategy, ps_grid.len(), |i| {
        let ps = ps_grid[i];
        let reduced_at_ps = a_star.eval(ps).try_add(b.eval(ps).scale(-1.0)).unwrap_or(PosInf);
        let (val, wit) = a.transform_shift_tilt(0.0, ps).minimize();
        let attained = val.is_finite() && wit.is_some();
        let fenchel_gap = wit.and_then(|x| {
            (a.eval(x) + a_star.eval(ps)).finite().map(|v| v - x * ps)
        });
        let in_range = attained
            && a_star.eval(ps).is_finite()
            && matches!(fenchel_gap, Some(g) if g.abs() <= cfg.exact_tol);
        let oracle = range.contains_within(ps, 0.0);
        SinglePoint {
            ps,
            reduced_at_ps,
            attained,
            witness: wit,
            fenchel_gap,
            in_range,
            oracle,
            agrees: in_range == oracle,
        }
    });
    Ok(SingleSurjectivityReport {
        surjective_on_grid: points.iter().all(|q| q.in_range),
        oracle_full_line: range.lo.is_infinite() && range.hi.is_infinite(),
        oracle_range: range,
        points,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalConeReport {
    pub interval: Interval,
    pub sweep: SweepReport,
}

/// Range queries for `S + N_U`: the normal cone enters through the single
/// representative `δ_U(x) + σ_U(x*)`, so this instantiates the sweep with
/// that choice.
pub fn normal_cone_driver(
    s: &Operator,
    u: Interval,
    p: f64,
    ps_grid: &[f64],
    cfg: &CheckConfig,
) -> Result<NormalConeReport> {
    if u.is_empty() {
        return Err(Error::Malformed("the constraint interval is empty".into()));
    }
    let t = Operator::normal_cone(u.lo, u.hi);
    let cfg = CheckConfig { reps: RepChoice::Fenchel, ..cfg.clone() };
    let sweep = surjectivity_sweep(s, &t, p, ps_grid, &cfg)?;
    Ok(NormalConeReport { interval: u, sweep })
}

#[derive(Clone, Debug, Serialize)]
pub struct SubdiffPoint {
    pub ps: f64,
    /// conjugate-side slot value: inf over u* of f*(p* − u*) + g*(u*) + p·u*
    pub mu1: ExtReal,
    /// potential-side slot value: inf over u of f(p − u) + g(−u) + p*·u
    pub mu2: ExtReal,
    pub value: ExtReal,
    pub target: f64,
    /// attaining `(ū*, ū)`
    pub witness: Option<[f64; 2]>,
    pub verdict: Verdict,
    pub oracle: bool,
    pub agrees: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubdiffReport {
    pub p: f64,
    pub points: Vec<SubdiffPoint>,
    pub all_agree: bool,
}

/// Two-sided surjectivity test for `∂f + ∂g` worked entirely in univariate
/// kernels: both slot infima must be attained and sum to the duality
/// product.
pub fn subdiff_driver(
    f: &PlqFunction,
    g: &PlqFunction,
    p: f64,
    ps_grid: &[f64],
    cfg: &CheckConfig,
) -> Result<SubdiffReport> {
    for (name, h) in [("f", f), ("g", g)] {
        if !h.is_proper() || !h.is_lsc() || !h.convexity_check() {
            return Err(Error::Malformed(format!(
                "{name} must be proper convex lsc for the subdifferential driver"
            )));
        }
    }
    let f_star = f.conjugate()?;
    let g_star = g.conjugate()?;
    let g_hat = g.reflect();
    let s_op = Operator::from_subdifferential(f)?;
    let t_op = Operator::from_subdifferential(g)?;

    let dom_overlap = match (f.domain().hull(), g.domain().hull()) {
        (Some(df), Some(dg)) => df.intersect(&dg.shift(p)).is_some(),
        _ => false,
    };
    let conj_hulls = (f_star.domain().hull(), g_star.domain().hull());

    let points: Vec<SubdiffPoint> = ps_grid
        .iter()
        .map(|&ps| {
            let target = ps * p;
            let oracle = sum_range_oracle(&s_op, &t_op, p).contains(ps, 0.0);
            let fail = |reason: &str| SubdiffPoint {
                ps,
                mu1: PosInf,
                mu2: PosInf,
                value: PosInf,
                target,
                witness: None,
                verdict: Verdict::No(reason.into()),
                oracle,
                agrees: Some(!oracle),
            };
            if !dom_overlap {
                return fail("dom f misses p + dom g");
            }
            if let (Some(df), Some(dg)) = &conj_hulls {
                if df.intersect(&dg.neg().shift(ps)).is_none() {
                    return fail("dom f* misses p* - dom g*");
                }
            }
            let m2 = inf_convolution(&g_hat.transform_shift_tilt(0.0, -ps), f);
            let m1 = inf_convolution(&g_star.transform_shift_tilt(0.0, -p), &f_star);
            let (mu2, wu) = match &m2 {
                Ok(ic) => (ic.value.eval(p), ic.witness(p)),
                Err(_) => (NegInf, None),
            };
            let (mu1, wus) = match &m1 {
                Ok(ic) => (ic.value.eval(ps), ic.witness(ps)),
                Err(_) => (NegInf, None),
            };
            let value = mu1.try_add(mu2).unwrap_or(PosInf);
            let witness = match (wus, wu) {
                (Some(us), Some(u)) => Some([us, u]),
                _ => None,
            };
            let verdict = match value {
                Finite(v) if (v - target).abs() <= cfg.exact_tol && witness.is_some() => {
                    Verdict::Yes
                }
                _ => Verdict::No("slot infima do not certify the duality product".into()),
            };
            let agrees = verdict.agrees_with(oracle);
            SubdiffPoint { ps, mu1, mu2, value, target, witness, verdict, oracle, agrees }
        })
        .collect();

    Ok(SubdiffReport {
        p,
        all_agree: points.iter().all(|q| q.agrees != Some(false)),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Segment;

    fn wall() -> Operator {
        Operator::new(vec![
            Segment::Vertical { x: 0.0, y_lo: f64::NEG_INFINITY, y_hi: 0.0 },
            Segment::Horizontal { y: 0.0, x_lo: 0.0, x_hi: f64::INFINITY },
        ])
        .unwrap()
    }

    fn pin_at(x: f64) -> Operator {
        Operator::new(vec![Segment::Vertical {
            x,
            y_lo: f64::NEG_INFINITY,
            y_hi: f64::INFINITY,
        }])
        .unwrap()
    }

    #[test]
    fn wall_and_pin_membership_is_certified_at_one() {
        let cfg = CheckConfig::default();
        let r =
            range_membership(&wall(), &pin_at(0.0), 0.0, 1.0, RepChoice::Fenchel, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Yes, "{r:?}");
        assert_eq!(r.value, Finite(0.0));
        assert_eq!(r.target, 0.0);
        assert_eq!(r.route, Route::Exact);
        assert_eq!(r.oracle_agrees, Some(true));
        let [us, u] = r.witness.unwrap();
        assert_eq!(u, 0.0);
        assert!(us >= 1.0 - 1e-12);
        assert_eq!(r.graph_memberships, Some([true, true]));
    }

    #[test]
    fn disjoint_domains_after_translation_fail_fast() {
        let cfg = CheckConfig::default();
        let r =
            range_membership(&wall(), &pin_at(0.0), -1.0, 0.0, RepChoice::Fenchel, &cfg).unwrap();
        assert!(r.verdict.is_no(), "{:?}", r.verdict);
        assert_eq!(r.oracle_agrees, Some(true));
    }

    #[test]
    fn symmetric_quadratic_pair_attains_at_zero() {
        let cfg = CheckConfig::default();
        let q = PlqFunction::quadratic(0.5, 0.0, 0.0);
        let s = Operator::from_subdifferential(&q).unwrap();
        let r = range_membership(&s, &s, 0.0, 0.0, RepChoice::Fenchel, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Yes);
        assert_eq!(r.witness, Some([0.0, 0.0]));
        assert_eq!(r.solution, Some(0.0));
    }

    #[test]
    fn tilt_placements_agree_on_value_and_verdict() {
        let q = PlqFunction::quadratic(0.5, 0.0, 0.0);
        let s = Operator::from_subdifferential(&q).unwrap();
        let base = CheckConfig::default();
        let swapped = CheckConfig { tilt: TiltPlacement::ConjSide, ..base.clone() };
        for &(p, ps) in &[(0.0, 0.0), (1.0, 2.0), (-0.5, 1.5), (2.0, -3.0)] {
            let r1 = range_membership(&s, &s, p, ps, RepChoice::Fenchel, &base).unwrap();
            let r2 = range_membership(&s, &s, p, ps, RepChoice::Fenchel, &swapped).unwrap();
            assert_eq!(r1.verdict, r2.verdict, "at ({p}, {ps})");
            match (r1.value, r2.value) {
                (Finite(a), Finite(b)) => {
                    assert!((a - b).abs() <= 1e-9, "at ({p}, {ps}): {a} vs {b}")
                }
                (a, b) => assert_eq!(a, b),
            }
        }
    }

    #[test]
    fn sweep_over_wall_and_pin_is_all_yes_with_full_oracle() {
        let cfg = CheckConfig::default();
        let grid = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let sw = surjectivity_sweep(&wall(), &pin_at(0.0), 0.0, &grid, &cfg).unwrap();
        assert!(sw.summary.all_yes_on_grid, "{:#?}", sw.summary);
        assert!(sw.summary.oracle_full_line);
        assert!(sw.summary.oracle_agrees_everywhere);
    }

    #[test]
    fn sweep_over_two_flat_lines_passes_only_at_zero() {
        let flat = Operator::constant(0.0);
        let cfg = CheckConfig::default();
        let grid = [-1.0, 0.0, 1.0];
        let sw = surjectivity_sweep(&flat, &flat, 0.0, &grid, &cfg).unwrap();
        assert!(!sw.summary.all_yes_on_grid);
        assert!(!sw.summary.oracle_full_line);
        let verdicts: Vec<bool> = sw.reports.iter().map(|r| r.verdict.is_yes()).collect();
        assert_eq!(verdicts, vec![false, true, false]);
        assert!(sw.summary.oracle_agrees_everywhere);
    }

    #[test]
    fn zero_in_range_forwards_to_total_duality() {
        let cfg = CheckConfig::default();
        let z = zero_in_range(&wall(), &pin_at(0.0), RepChoice::Fenchel, &cfg).unwrap();
        assert!(z.check.verdict.is_yes());
        let td = z.total_duality.expect("forwarded on YES");
        assert!(td.passed, "{td:?}");
        assert_eq!(td.primal_value, Finite(0.0));
        assert_eq!(td.dual_value, Finite(0.0));
        let [u, us] = td.primal_witness.unwrap();
        assert_eq!(u, 0.0);
        assert!(us <= 1e-12);
    }

    #[test]
    fn zero_in_range_detects_disjoint_pins() {
        let cfg = CheckConfig::default();
        let z = zero_in_range(&pin_at(1.0), &pin_at(0.0), RepChoice::Fenchel, &cfg).unwrap();
        assert!(z.check.verdict.is_no());
        assert!(z.total_duality.is_none());
        assert_eq!(z.check.oracle_agrees, Some(true));
    }

    #[test]
    fn shifted_line_against_pin_has_zero_in_range() {
        // s = x - 1 against the vertical line at 0
        let line = Operator::from_subdifferential(&PlqFunction::quadratic(0.5, -1.0, 0.0))
            .unwrap();
        let cfg = CheckConfig::default();
        let z = zero_in_range(&line, &pin_at(0.0), RepChoice::Fenchel, &cfg).unwrap();
        assert!(z.check.verdict.is_yes(), "{:?}", z.check.verdict);
        assert!(z.total_duality.unwrap().passed);
    }

    #[test]
    fn classical_conditions_on_wall_and_pin_match_the_known_split() {
        let rep = classical_conditions(&wall(), &pin_at(0.0), RepChoice::Fenchel).unwrap();
        assert_eq!(rep.dom_f_t_full.holds, Some(false));
        assert_eq!(rep.dom_difference_full.holds, Some(false));
        assert_eq!(rep.sqri_zero_section.holds, Some(false));
        assert_eq!(rep.core_origin.holds, Some(false));
        // both exceptional sets are exactly the open right half-plane
        let sq = rep.sqri_set.unwrap();
        assert_eq!((sq.x.lo, sq.x.lo_closed), (0.0, false));
        assert!(sq.x.hi.is_infinite() && sq.y.is_all());
        let co = rep.core_set.unwrap();
        assert_eq!((co.x.lo, co.x.lo_closed), (0.0, false));
        assert!(co.x.hi.is_infinite() && co.y.is_all());
        // while the value conditions hold on the grid
        assert_eq!(rep.rc_bar.holds, Some(true));
        assert_eq!(rep.rc_tilde.holds, Some(true));
        assert!(rep.chain_consistent);
    }

    #[test]
    fn classical_conditions_on_duality_map_have_full_domain() {
        let rep = classical_conditions(
            &Operator::duality_map(),
            &Operator::duality_map(),
            RepChoice::Fenchel,
        )
        .unwrap();
        assert_eq!(rep.dom_f_t_full.holds, Some(true));
        assert_eq!(rep.dom_difference_full.holds, Some(true));
        assert_eq!(rep.sqri_zero_section.holds, Some(true));
        assert_eq!(rep.core_origin.holds, Some(true));
        assert_eq!(rep.rc_bar.holds, Some(true));
        assert!(rep.chain_consistent);
    }

    #[test]
    fn single_surjectivity_separates_the_three_model_operators() {
        let cfg = CheckConfig::default();
        let grid = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let j = single_surjectivity(&Operator::duality_map(), RepChoice::Fenchel, &grid, &cfg)
            .unwrap();
        assert!(j.surjective_on_grid && j.oracle_full_line);
        assert!(j.points.iter().all(|q| q.agrees));

        let w = single_surjectivity(&wall(), RepChoice::Fenchel, &grid, &cfg).unwrap();
        assert!(!w.surjective_on_grid);
        for q in &w.points {
            assert_eq!(q.in_range, q.ps <= 0.0, "at {}", q.ps);
            assert!(q.agrees);
        }

        let flat = single_surjectivity(&Operator::constant(0.0), RepChoice::Fenchel, &grid, &cfg)
            .unwrap();
        for q in &flat.points {
            assert_eq!(q.in_range, q.ps == 0.0, "at {}", q.ps);
            assert!(q.agrees);
        }
    }

    #[test]
    fn normal_cone_driver_over_the_whole_line_reduces_to_the_operator() {
        let cfg = CheckConfig::default();
        let grid = [-1.0, 0.0, 1.0];
        let r = normal_cone_driver(
            &Operator::duality_map(),
            Interval::all(),
            0.0,
            &grid,
            &cfg,
        )
        .unwrap();
        assert!(r.sweep.summary.all_yes_on_grid);
        assert!(r.sweep.summary.oracle_full_line);
    }

    #[test]
    fn subdiff_driver_certifies_the_quadratic_pair() {
        let cfg = CheckConfig::default();
        let q = PlqFunction::quadratic(0.5, 0.0, 0.0);
        let r = subdiff_driver(&q, &q, 0.0, &[3.0], &cfg).unwrap();
        assert!(r.points[0].verdict.is_yes(), "{:?}", r.points[0]);
        assert!(r.all_agree);
        // the two slots split the product evenly here
        assert_eq!(r.points[0].value, Finite(0.0));
    }

    #[test]
    fn subdiff_driver_matches_oracle_on_indicator_pair() {
        let cfg = CheckConfig::default();
        let f = PlqFunction::indicator(0.0, f64::INFINITY);
        let g = PlqFunction::point_indicator(0.0);
        let r = subdiff_driver(&f, &g, 0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], &cfg).unwrap();
        assert!(r.all_agree);
        assert!(r.points.iter().all(|q| q.verdict.is_yes()));
    }

    #[test]
    fn fitzpatrick_reps_agree_with_fenchel_on_staircase_pairs() {
        let cfg = CheckConfig::default();
        let cases: Vec<(Operator, Operator)> = vec![
            (wall(), pin_at(0.0)),
            (Operator::normal_cone(-1.0, 1.0), wall()),
            (
                Operator::from_subdifferential(&PlqFunction::abs_fn()).unwrap(),
                Operator::normal_cone(0.0, 2.0),
            ),
        ];
        for (s, t) in cases {
            for &(p, ps) in &[(0.0, 0.0), (0.0, 1.0), (0.5, -1.0), (-1.0, 0.5)] {
                let fe = range_membership(&s, &t, p, ps, RepChoice::Fenchel, &cfg).unwrap();
                let fi = range_membership(&s, &t, p, ps, RepChoice::Fitzpatrick, &cfg).unwrap();
                assert_eq!(
                    fe.verdict.is_yes(),
                    fi.verdict.is_yes(),
                    "split at ({p}, {ps}): {:?} vs {:?}",
                    fe.verdict,
                    fi.verdict
                );
                assert_ne!(fe.oracle_agrees, Some(false));
                assert_ne!(fi.oracle_agrees, Some(false));
            }
        }
    }

    #[test]
    fn probe_route_certifies_smooth_operators_with_fitzpatrick_reps() {
        // J is not staircase, so the Fitzpatrick representative has no
        // finite polyhedral conjugate and the probe takes over
        let cfg = CheckConfig::default();
        let s = Operator::duality_map();
        let r = range_membership(&s, &s, 0.0, 1.0, RepChoice::Fitzpatrick, &cfg).unwrap();
        assert_ne!(r.route, Route::Exact);
        assert_ne!(r.oracle_agrees, Some(false), "{r:?}");
    }
}
