//! Scenario files: named definitions plus one task, parsed from JSON and
//! executed against the verify engine. Reports are versioned, deterministic
//! for a fixed seed, and renderable as JSON or plain-text tables.
//!
//! The definition vocabulary is deliberately tiny. Functions: `ind[l,u]`,
//! `sup[l,u]`, `quad(a,b,c)`, `abs`. Operators: `ncone[l,u]`,
//! `subdiff(<function>)`, `J`. Either side may also reference an entry of
//! the `define` map by name.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::interval::Interval;
use crate::operators::{random_operator, sum_range_oracle, Operator};
use crate::plq::PlqFunction;
use crate::verify::{
    classical_conditions, normal_cone_driver, range_membership, single_surjectivity,
    subdiff_driver, surjectivity_sweep, total_duality_check, zero_in_range, CheckConfig,
    NormalConeReport, RangeCheckReport, RegularityReport, RepChoice, SingleSurjectivityReport,
    SubdiffReport, SweepReport, TotalDualityReport, Verdict, ZeroRangeReport,
};

/// Stamped into every report header; bump on any breaking schema change.
pub const REPORT_SCHEMA: &str = "fitzcert-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Range,
    Sweep,
    Zero,
    Single,
    NormalCone,
    Subdiff,
    Conditions,
    TotalDuality,
    Fuzz,
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Task::Range => "range",
            Task::Sweep => "sweep",
            Task::Zero => "zero",
            Task::Single => "single",
            Task::NormalCone => "normal-cone",
            Task::Subdiff => "subdiff",
            Task::Conditions => "conditions",
            Task::TotalDuality => "total-duality",
            Task::Fuzz => "fuzz",
        };
        write!(f, "{name}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub task: Task,
    /// reusable named definitions, referenced from the fields below
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub define: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    /// constraint interval `[lo, hi]` for the normal-cone task
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ps_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rep: Option<RepChoiceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "box")]
    pub box_half: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instances: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepChoiceSpec {
    Fenchel,
    Fitzpatrick,
}

impl From<RepChoiceSpec> for RepChoice {
    fn from(v: RepChoiceSpec) -> RepChoice {
        match v {
            RepChoiceSpec::Fenchel => RepChoice::Fenchel,
            RepChoiceSpec::Fitzpatrick => RepChoice::Fitzpatrick,
        }
    }
}

impl Scenario {
    pub fn config(&self) -> CheckConfig {
        let mut cfg = CheckConfig::default();
        if let Some(r) = self.rep {
            cfg.reps = r.into();
        }
        if let Some(n) = self.grid_n {
            cfg.grid_n = n;
        }
        if let Some(b) = self.box_half {
            cfg.box_half = b;
        }
        if let Some(t) = self.tol {
            cfg.grid_tol = t;
        }
        cfg
    }

    fn grid(&self) -> Result<Vec<f64>> {
        match &self.ps_grid {
            Some(g) if g.is_empty() => Err(Error::Scenario("ps_grid must be nonempty".into())),
            Some(g) => Ok(g.clone()),
            None => Ok(vec![-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0]),
        }
    }

    fn operator(&self, field: &str, expr: &Option<String>) -> Result<Operator> {
        let expr = expr
            .as_deref()
            .ok_or_else(|| Error::Scenario(format!("field `{field}` required for this task")))?;
        resolve_operator(&self.define, expr, 0)
            .map_err(|e| Error::Scenario(format!("field `{field}`: {e}")))
    }

    fn function(&self, field: &str, expr: &Option<String>) -> Result<PlqFunction> {
        let expr = expr
            .as_deref()
            .ok_or_else(|| Error::Scenario(format!("field `{field}` required for this task")))?;
        resolve_function(&self.define, expr, 0)
            .map_err(|e| Error::Scenario(format!("field `{field}`: {e}")))
    }
}

/// Parses and validates a scenario from JSON text. Diagnostics name the
/// offending field; referenced definitions are resolved eagerly so dangling
/// names fail here, not mid-run.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let raw: Value =
        serde_json::from_str(text).map_err(|e| Error::Scenario(format!("invalid JSON: {e}")))?;
    if raw.get("task").is_none() {
        return Err(Error::Scenario("task required".into()));
    }
    let sc: Scenario = serde_json::from_value(raw)
        .map_err(|e| Error::Scenario(format!("invalid scenario: {e}")))?;

    match sc.task {
        Task::Range => {
            sc.operator("s", &sc.s)?;
            sc.operator("t", &sc.t)?;
            if sc.ps.is_none() {
                return Err(Error::Scenario("field `ps` required for task range".into()));
            }
        }
        Task::Sweep | Task::Zero | Task::Conditions | Task::TotalDuality => {
            sc.operator("s", &sc.s)?;
            sc.operator("t", &sc.t)?;
            sc.grid()?;
        }
        Task::Single => {
            sc.operator("s", &sc.s)?;
            sc.grid()?;
        }
        Task::NormalCone => {
            sc.operator("s", &sc.s)?;
            if sc.u.is_none() {
                return Err(Error::Scenario(
                    "field `u` (constraint interval) required for task normal-cone".into(),
                ));
            }
            sc.grid()?;
        }
        Task::Subdiff => {
            sc.function("f", &sc.f)?;
            sc.function("g", &sc.g)?;
            sc.grid()?;
        }
        Task::Fuzz => {
            if sc.seed.is_none() {
                return Err(Error::Scenario("field `seed` required for task fuzz".into()));
            }
        }
    }
    // unused definitions must still resolve, so typos surface immediately
    for (name, expr) in &sc.define {
        if resolve_function(&sc.define, expr, 0).is_err()
            && resolve_operator(&sc.define, expr, 0).is_err()
        {
            return Err(Error::Scenario(format!(
                "definition `{name}` is neither a function nor an operator: `{expr}`"
            )));
        }
    }
    Ok(sc)
}

/// Canonical JSON form; `parse_scenario(render_scenario(s))` returns `s`.
pub fn render_scenario(sc: &Scenario) -> String {
    serde_json::to_string_pretty(sc).expect("scenario serialization cannot fail")
}

const MAX_RESOLVE_DEPTH: usize = 32;

fn parse_number(tok: &str, expr: &str) -> Result<f64> {
    let t = tok.trim();
    match t {
        "inf" | "+inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => t
            .parse::<f64>()
            .map_err(|_| Error::Scenario(format!("malformed number `{t}` in `{expr}`"))),
    }
}

fn bracket_args(expr: &str, open: char, close: char) -> Option<Vec<&str>> {
    let start = expr.find(open)?;
    if !expr.ends_with(close) {
        return None;
    }
    let inner = &expr[start + 1..expr.len() - 1];
    Some(inner.split(',').collect())
}

fn two_numbers(expr: &str, open: char, close: char) -> Result<(f64, f64)> {
    let args = bracket_args(expr, open, close)
        .ok_or_else(|| Error::Scenario(format!("expected two arguments in `{expr}`")))?;
    if args.len() != 2 {
        return Err(Error::Scenario(format!("expected two arguments in `{expr}`")));
    }
    Ok((parse_number(args[0], expr)?, parse_number(args[1], expr)?))
}

fn resolve_function(
    defs: &BTreeMap<String, String>,
    expr: &str,
    depth: usize,
) -> Result<PlqFunction> {
    if depth > MAX_RESOLVE_DEPTH {
        return Err(Error::Scenario(format!("circular definition at `{expr}`")));
    }
    let expr = expr.trim();
    if let Some(inner) = defs.get(expr) {
        return resolve_function(defs, inner, depth + 1);
    }
    if expr == "abs" {
        return Ok(PlqFunction::abs_fn());
    }
    if expr.starts_with("ind[") && expr.ends_with(']') {
        let (lo, hi) = two_numbers(expr, '[', ']')?;
        return if lo == hi {
            Ok(PlqFunction::point_indicator(lo))
        } else {
            Ok(PlqFunction::indicator(lo, hi))
        };
    }
    if expr.starts_with("sup[") && expr.ends_with(']') {
        let (lo, hi) = two_numbers(expr, '[', ']')?;
        return Ok(PlqFunction::support_fn(lo, hi));
    }
    if expr.starts_with("quad(") && expr.ends_with(')') {
        let args = bracket_args(expr, '(', ')')
            .ok_or_else(|| Error::Scenario(format!("expected three arguments in `{expr}`")))?;
        if args.len() != 3 {
            return Err(Error::Scenario(format!("expected three arguments in `{expr}`")));
        }
        let a = parse_number(args[0], expr)?;
        let b = parse_number(args[1], expr)?;
        let c = parse_number(args[2], expr)?;
        return Ok(PlqFunction::quadratic(a, b, c));
    }
    Err(Error::Scenario(format!("unknown builtin or dangling reference `{expr}`")))
}

fn resolve_operator(
    defs: &BTreeMap<String, String>,
    expr: &str,
    depth: usize,
) -> Result<Operator> {
    if depth > MAX_RESOLVE_DEPTH {
        return Err(Error::Scenario(format!("circular definition at `{expr}`")));
    }
    let expr = expr.trim();
    if let Some(inner) = defs.get(expr) {
        return resolve_operator(defs, inner, depth + 1);
    }
    if expr == "J" {
        return Ok(Operator::duality_map());
    }
    if expr.starts_with("ncone[") && expr.ends_with(']') {
        let (lo, hi) = two_numbers(expr, '[', ']')?;
        if lo > hi {
            return Err(Error::Scenario(format!("empty interval in `{expr}`")));
        }
        return Ok(Operator::normal_cone(lo, hi));
    }
    if expr.starts_with("subdiff(") && expr.ends_with(')') {
        let inner = &expr["subdiff(".len()..expr.len() - 1];
        let f = resolve_function(defs, inner, depth + 1)?;
        return Operator::from_subdifferential(&f);
    }
    Err(Error::Scenario(format!("unknown builtin or dangling reference `{expr}`")))
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzInstance {
    pub index: usize,
    pub p: f64,
    pub ps: f64,
    pub verdict: Verdict,
    pub oracle: bool,
    pub agrees: Option<bool>,
    /// strong-duality outcome when the instance has zero in the sum range
    pub zero_duality_passed: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzReport {
    pub seed: u64,
    pub instances: usize,
    pub disagreements: usize,
    pub inconclusive: usize,
    pub inconclusive_rate: f64,
    pub zero_cases: usize,
    pub zero_failures: usize,
    pub results: Vec<FuzzInstance>,
}

/// Randomized oracle-agreement run: seeded operator pairs with random
/// queries, each verdict compared against the exact range oracle, and the
/// strong-duality decomposition exercised whenever zero lies in the range.
pub fn fuzz_oracle_agreement(seed: u64, count: usize, cfg: &CheckConfig) -> Result<FuzzReport> {
    let mut results = Vec::with_capacity(count);
    let (mut disagreements, mut inconclusive, mut zero_cases, mut zero_failures) = (0, 0, 0, 0);
    for index in 0..count {
        // one stream per instance keeps results stable under reordering
        let mut rng = ChaCha8Rng::seed_from_u64(
            seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        );
        let s = random_operator(&mut rng);
        let t = random_operator(&mut rng);
        let p = rng.gen_range(-3.0..3.0);
        let ps = rng.gen_range(-3.0..3.0);
        let r = range_membership(&s, &t, p, ps, cfg.reps, cfg)?;
        if r.oracle_agrees == Some(false) {
            disagreements += 1;
        }
        if r.verdict.is_inconclusive() {
            inconclusive += 1;
        }
        let zero_duality_passed = if sum_range_oracle(&s, &t, 0.0).contains(0.0, 0.0) {
            zero_cases += 1;
            let td = total_duality_check(&s, &t, cfg.reps, cfg)?;
            if !td.passed {
                zero_failures += 1;
            }
            Some(td.passed)
        } else {
            None
        };
        results.push(FuzzInstance {
            index,
            p,
            ps,
            verdict: r.verdict,
            oracle: r.oracle,
            agrees: r.oracle_agrees,
            zero_duality_passed,
        });
    }
    Ok(FuzzReport {
        seed,
        instances: count,
        disagreements,
        inconclusive,
        inconclusive_rate: if count == 0 { 0.0 } else { inconclusive as f64 / count as f64 },
        zero_cases,
        zero_failures,
        results,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum TaskOutcome {
    Range(RangeCheckReport),
    Sweep(SweepReport),
    Zero(ZeroRangeReport),
    Single(SingleSurjectivityReport),
    NormalCone(NormalConeReport),
    Subdiff(SubdiffReport),
    Conditions(RegularityReport),
    TotalDuality(TotalDualityReport),
    Fuzz(FuzzReport),
}

impl TaskOutcome {
    /// True when nothing contradicted the oracle or the duality theory.
    pub fn ok(&self) -> bool {
        match self {
            TaskOutcome::Range(r) => r.oracle_agrees != Some(false),
            TaskOutcome::Sweep(r) => r.summary.oracle_agrees_everywhere,
            TaskOutcome::Zero(r) => {
                r.check.oracle_agrees != Some(false)
                    && r.total_duality.as_ref().map_or(true, |d| d.passed)
            }
            TaskOutcome::Single(r) => r.points.iter().all(|q| q.agrees),
            TaskOutcome::NormalCone(r) => r.sweep.summary.oracle_agrees_everywhere,
            TaskOutcome::Subdiff(r) => r.all_agree,
            TaskOutcome::Conditions(r) => r.chain_consistent,
            TaskOutcome::TotalDuality(r) => r.passed,
            TaskOutcome::Fuzz(r) => r.disagreements == 0 && r.zero_failures == 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: String,
    pub task: Task,
    pub ok: bool,
    pub report: TaskOutcome,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("schema  {}\ntask    {}\n", self.schema, self.task));
        out.push_str(&render_outcome(&self.report));
        out.push_str(&format!("\nresult  {}\n", if self.ok { "OK" } else { "DISAGREEMENT" }));
        out
    }
}

/// Executes a validated scenario. Output is fully determined by the
/// scenario content; parallel sweeps assemble results in input order.
pub fn run(sc: &Scenario) -> Result<RunReport> {
    let cfg = sc.config();
    let p = sc.p.unwrap_or(0.0);
    let outcome = match sc.task {
        Task::Range => {
            let s = sc.operator("s", &sc.s)?;
            let t = sc.operator("t", &sc.t)?;
            let ps = sc
                .ps
                .ok_or_else(|| Error::Scenario("field `ps` required for task range".into()))?;
            TaskOutcome::Range(range_membership(&s, &t, p, ps, cfg.reps, &cfg)?)
        }
        Task::Sweep => {
            let s = sc.operator("s", &sc.s)?;
            let t = sc.operator("t", &sc.t)?;
            TaskOutcome::Sweep(surjectivity_sweep(&s, &t, p, &sc.grid()?, &cfg)?)
        }
        Task::Zero => {
            let s = sc.operator("s", &sc.s)?;
            let t = sc.operator("t", &sc.t)?;
            TaskOutcome::Zero(zero_in_range(&s, &t, cfg.reps, &cfg)?)
        }
        Task::Single => {
            let s = sc.operator("s", &sc.s)?;
            TaskOutcome::Single(single_surjectivity(&s, cfg.reps, &sc.grid()?, &cfg)?)
        }
        Task::NormalCone => {
            let s = sc.operator("s", &sc.s)?;
            let [lo, hi] = sc
                .u
                .ok_or_else(|| Error::Scenario("field `u` required for task normal-cone".into()))?;
            let u = Interval::closed(lo, hi);
            TaskOutcome::NormalCone(normal_cone_driver(&s, u, p, &sc.grid()?, &cfg)?)
        }
        Task::Subdiff => {
            let f = sc.function("f", &sc.f)?;
            let g = sc.function("g", &sc.g)?;
            TaskOutcome::Subdiff(subdiff_driver(&f, &g, p, &sc.grid()?, &cfg)?)
        }
        Task::Conditions => {
            let s = sc.operator("s", &sc.s)?;
            let t = sc.operator("t", &sc.t)?;
            TaskOutcome::Conditions(classical_conditions(&s, &t, cfg.reps)?)
        }
        Task::TotalDuality => {
            let s = sc.operator("s", &sc.s)?;
            let t = sc.operator("t", &sc.t)?;
            TaskOutcome::TotalDuality(total_duality_check(&s, &t, cfg.reps, &cfg)?)
        }
        Task::Fuzz => {
            let seed = sc
                .seed
                .ok_or_else(|| Error::Scenario("field `seed` required for task fuzz".into()))?;
            TaskOutcome::Fuzz(fuzz_oracle_agreement(seed, sc.instances.unwrap_or(200), &cfg)?)
        }
    };
    Ok(RunReport {
        schema: REPORT_SCHEMA.to_string(),
        task: sc.task,
        ok: outcome.ok(),
        report: outcome,
    })
}

fn show(v: ExtReal) -> String {
    match v {
        ExtReal::Finite(x) => format!("{x:.9}"),
        ExtReal::PosInf => "+inf".into(),
        ExtReal::NegInf => "-inf".into(),
    }
}

fn show_verdict(v: &Verdict) -> String {
    format!("{v}")
}

fn render_range_line(r: &RangeCheckReport) -> String {
    format!(
        "{:>8}  {:<12} {:>14} {:>14}  {:<5}  {}\n",
        r.ps,
        format!("{:?}", r.route).to_lowercase(),
        show(r.value),
        show(r.gap),
        r.oracle,
        show_verdict(&r.verdict)
    )
}

fn render_sweep(sw: &SweepReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("sweep at p = {}\n", sw.p));
    out.push_str(&format!(
        "{:>8}  {:<12} {:>14} {:>14}  {:<5}  {}\n",
        "p*", "route", "value", "gap", "in", "verdict"
    ));
    for r in &sw.reports {
        out.push_str(&render_range_line(r));
    }
    out.push_str(&format!(
        "all YES on grid: {}   inconclusive: {}   oracle full line: {}\n",
        sw.summary.all_yes_on_grid, sw.summary.inconclusive, sw.summary.oracle_full_line
    ));
    out
}

fn render_condition(name: &str, holds: Option<bool>) -> String {
    let verdict = match holds {
        Some(true) => "HOLDS",
        Some(false) => "FAILS",
        None => "UNKNOWN",
    };
    format!("{name:<58} {verdict}\n")
}

fn render_conditions(r: &RegularityReport) -> String {
    let mut out = String::new();
    out.push_str(&render_condition("dom f_T is the whole space", r.dom_f_t_full.holds));
    out.push_str(&render_condition(
        "dom f_S - dom f_T_hat is the whole space",
        r.dom_difference_full.holds,
    ));
    out.push_str(&render_condition(
        "{0} x X* inside sqri of the domain difference",
        r.sqri_zero_section.holds,
    ));
    out.push_str(&render_condition(
        "(0,0) inside core of the hull difference",
        r.core_origin.holds,
    ));
    out.push_str(&render_condition("value condition on the p* grid", r.rc.holds));
    out.push_str(&render_condition("surjectivity form on the p* grid", r.rc_bar.holds));
    out.push_str(&render_condition("zero-in-range form", r.rc_tilde.holds));
    if let Some(b) = &r.sqri_set {
        out.push_str(&format!("sqri set: {} x {}\n", b.x, b.y));
    }
    if let Some(b) = &r.core_set {
        out.push_str(&format!("core set: {} x {}\n", b.x, b.y));
    }
    out.push_str(&format!("implication chain consistent: {}\n", r.chain_consistent));
    out
}

fn render_duality(d: &TotalDualityReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "primal value {}  attained {}\n",
        show(d.primal_value),
        d.primal_attained
    ));
    out.push_str(&format!(
        "dual value   {}  attained {}\n",
        show(d.dual_value),
        d.dual_attained
    ));
    if let Some([g1, g2]) = d.equality_gaps {
        out.push_str(&format!("witness equality gaps {g1:.3e} {g2:.3e}\n"));
    }
    out.push_str(&format!("total duality passed: {}\n", d.passed));
    out
}

fn render_outcome(outcome: &TaskOutcome) -> String {
    match outcome {
        TaskOutcome::Range(r) => {
            let mut out = format!("query p = {}, p* = {}\n", r.p, r.ps);
            out.push_str(&format!(
                "{:>8}  {:<12} {:>14} {:>14}  {:<5}  {}\n",
                "p*", "route", "value", "gap", "in", "verdict"
            ));
            out.push_str(&render_range_line(r));
            if let Some([us, u]) = r.witness {
                out.push_str(&format!("witness u* = {us}, u = {u}\n"));
            }
            if let Some(x) = r.solution {
                out.push_str(&format!("solution x = {x}\n"));
            }
            out
        }
        TaskOutcome::Sweep(sw) => render_sweep(sw),
        TaskOutcome::Zero(z) => {
            let mut out = render_outcome(&TaskOutcome::Range(z.check.clone()));
            if let Some(d) = &z.total_duality {
                out.push_str(&render_duality(d));
            }
            out
        }
        TaskOutcome::Single(r) => {
            let mut out = format!(
                "{:>8}  {:<9} {:>14}  {:<5}  agrees\n",
                "p*", "in range", "reduced", "in"
            );
            for q in &r.points {
                out.push_str(&format!(
                    "{:>8}  {:<9} {:>14}  {:<5}  {}\n",
                    q.ps,
                    q.in_range,
                    show(q.reduced_at_ps),
                    q.oracle,
                    q.agrees
                ));
            }
            out.push_str(&format!(
                "surjective on grid: {}   oracle range: {}\n",
                r.surjective_on_grid, r.oracle_range
            ));
            out
        }
        TaskOutcome::NormalCone(r) => {
            format!("constraint interval {}\n{}", r.interval, render_sweep(&r.sweep))
        }
        TaskOutcome::Subdiff(r) => {
            let mut out = format!("two-sided test at p = {}\n", r.p);
            out.push_str(&format!(
                "{:>8}  {:>14} {:>14}  {:<5}  verdict\n",
                "p*", "value", "target", "in"
            ));
            for q in &r.points {
                out.push_str(&format!(
                    "{:>8}  {:>14} {:>14}  {:<5}  {}\n",
                    q.ps,
                    show(q.value),
                    q.target,
                    q.oracle,
                    show_verdict(&q.verdict)
                ));
            }
            out.push_str(&format!("oracle agreement everywhere: {}\n", r.all_agree));
            out
        }
        TaskOutcome::Conditions(r) => render_conditions(r),
        TaskOutcome::TotalDuality(d) => render_duality(d),
        TaskOutcome::Fuzz(r) => {
            let mut out = format!(
                "fuzz seed {}: {} instances, {} disagreements, {} inconclusive ({:.1}%)\n",
                r.seed,
                r.instances,
                r.disagreements,
                r.inconclusive,
                100.0 * r.inconclusive_rate
            );
            out.push_str(&format!(
                "zero-in-range cases {}, duality failures {}\n",
                r.zero_cases, r.zero_failures
            ));
            for q in r.results.iter().filter(|q| q.agrees == Some(false)).take(10) {
                out.push_str(&format!(
                    "  disagreement at instance {} (p = {}, p* = {}): {} vs oracle {}\n",
                    q.index,
                    q.p,
                    q.ps,
                    show_verdict(&q.verdict),
                    q.oracle
                ));
            }
            out
        }
    }
}
