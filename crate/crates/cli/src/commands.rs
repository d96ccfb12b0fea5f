//! The three subcommands as library functions returning an exit code and a report.

use crate::config::{ConfigError, PotentialSpec, RunConfig};
use crate::report::{self, complex, matrix, max_abs, Check, Status};
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};
use qspace::algebra::parse_series;
use qspace::calculus::{partial_action, DIndex, DerivativeKind};
use qspace::classical::specialize;
use qspace::dyson::{dyson_u, evolution_for, smatrix_from_u, DysonForm, InteractionMatrixFn};
use qspace::lattice::{LatticeField, SpaceGrid, TimeAxis};
use qspace::qexp::{qinvert, translate, InversionKind, TranslationKind};
use qspace::scatter::{
    born_wavefunction, ls_residual, norm_preservation, smatrix, theory_of, unitarity_defect, BornVariant, Potential,
    SVariant,
};
use qspace::star::star_any;
use qspace::suites::{run_suite, Suite, SuiteConfig};
use qspace::waves::{Physics, PlaneWaveFamily, TimeSense, WaveVariant};
use qspace::{NSeries, Ordering, QError, QResult};
use serde_json::{json, Value};
use std::sync::Arc;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// What a command produced: exit code, JSON report and human-readable summary lines.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Option<Value>,
    pub summary: String,
}

impl Outcome {
    fn config_error(e: ConfigError) -> Self {
        Outcome { code: EXIT_USAGE, report: None, summary: format!("{e}\n") }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScatterReport {
    Born,
    Smatrix,
    Unitarity,
    Dyson,
}

impl ScatterReport {
    pub fn name(self) -> &'static str {
        match self {
            ScatterReport::Born => "born",
            ScatterReport::Smatrix => "smatrix",
            ScatterReport::Unitarity => "unitarity",
            ScatterReport::Dyson => "dyson",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalOp {
    Star,
    Partial,
    Translate,
    Invert,
}

fn to_f64(r: &num_rational::BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Plane-wave family on the configured lattice and time window.
pub fn build_family(cfg: &RunConfig) -> QResult<Arc<PlaneWaveFamily>> {
    let space = SpaceGrid::symmetric(cfg.q.clone(), cfg.x0.clone(), cfg.jmin, cfg.jmax, 1)?;
    let momentum = SpaceGrid::symmetric(cfg.q.clone(), cfg.p0.clone(), cfg.p_jmin, cfg.p_jmax, 1)?;
    let time = TimeAxis::new(cfg.t0, cfg.t1, cfg.slices())?;
    let physics = Physics::new(to_f64(&cfg.mass), to_f64(&cfg.c))?;
    Ok(Arc::new(PlaneWaveFamily::new(&space, &momentum, &time, physics)?))
}

/// Resolve the potential spec on the family grid.
pub fn build_potential(cfg: &RunConfig, family: &PlaneWaveFamily) -> QResult<Potential> {
    let grid = family.grid();
    match cfg.potential_spec().map_err(|e| QError::InvalidParameter(e.0))? {
        PotentialSpec::Builtin(p) => Potential::builtin(&p, &grid),
        PotentialSpec::File(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| QError::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
            let pairs: Vec<[f64; 2]> = serde_json::from_str(&text).map_err(|e| {
                QError::InvalidParameter(format!("{}: expected a JSON array of [re, im] pairs: {e}", path.display()))
            })?;
            let values: Vec<Complex64> = pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect();
            let n = grid.space.npoints();
            if values.len() == n {
                Ok(Potential::from_spatial(&grid, values))
            } else if values.len() == n * grid.time.n {
                Ok(Potential::from_field(LatticeField { grid, values }))
            } else {
                Err(QError::InvalidParameter(format!(
                    "{}: {} values, expected {n} (static) or {} (per slice)",
                    path.display(),
                    values.len(),
                    n * grid.time.n
                )))
            }
        }
    }
}

/// Fixed packet coefficients c_p = 1/(1+p) + i(0.3 − 0.05p).
pub fn packet_coeffs(n: usize) -> Vec<Complex64> {
    (0..n).map(|p| Complex64::new(1.0 / (1.0 + p as f64), 0.3 - 0.05 * p as f64)).collect()
}

fn suite_config(cfg: &RunConfig) -> QResult<SuiteConfig> {
    let params = cfg.params().map_err(|e| QError::InvalidParameter(e.0))?;
    let family = if cfg.classical { None } else { Some(build_family(cfg)?) };
    Ok(SuiteConfig {
        params,
        seed: cfg.seed,
        instances: cfg.instances,
        mass: cfg.mass.clone(),
        light_speed: cfg.c.clone(),
        tolerance: cfg.tol,
        near_one: cfg.near_one.clone(),
        family,
    })
}

fn core_failure(cfg: &RunConfig, command: &str, e: &QError) -> Outcome {
    let doc = report::document(cfg, command, Status::Error, json!({ "error": e.to_string() }));
    Outcome { code: EXIT_FAIL, report: Some(doc), summary: format!("error: {e}\n") }
}

pub fn cmd_identities(cfg: &RunConfig, suite: Suite) -> Outcome {
    if let Err(e) = cfg.validate() {
        return Outcome::config_error(e);
    }
    let command = format!("identities {}", suite.name());
    let sc = match suite_config(cfg) {
        Ok(sc) => sc,
        Err(e) => return core_failure(cfg, &command, &e),
    };
    let ids = run_suite(suite, &sc);
    let mut summary = String::new();
    let mut counts = [0usize; 3];
    let mut rows = Vec::new();
    for id in &ids {
        counts[id.status as usize] += 1;
        summary.push_str(&format!("{:<7} {}/{}: {} ({})\n", id.status.name(), id.suite, id.topic, id.name, id.detail));
        rows.push(json!({
            "suite": id.suite,
            "topic": id.topic,
            "name": id.name,
            "exact": id.exact,
            "status": id.status.name(),
            "detail": id.detail,
        }));
    }
    summary.push_str(&format!("{} passed, {} failed, {} skipped\n", counts[0], counts[1], counts[2]));
    let status = if counts[1] == 0 { Status::Pass } else { Status::Fail };
    let result = json!({ "passed": counts[0], "failed": counts[1], "skipped": counts[2], "identities": rows });
    Outcome {
        code: if status == Status::Pass { EXIT_OK } else { EXIT_FAIL },
        report: Some(report::document(cfg, &command, status, result)),
        summary,
    }
}

/// A derivative label: `[∂][̂|hat][^]index`, e.g. `∂+`, `∂̂3`, `hat-`, `^+`.
pub fn parse_derivative(label: &str, right: bool) -> QResult<DerivativeKind> {
    let mut s = label.trim();
    s = s.strip_prefix('∂').unwrap_or(s);
    let hat = if let Some(rest) = s.strip_prefix('\u{302}').or_else(|| s.strip_prefix("hat")) {
        s = rest.trim_start();
        true
    } else {
        false
    };
    let upper = if let Some(rest) = s.strip_prefix('^') {
        s = rest;
        true
    } else {
        false
    };
    let i = DIndex::parse(s).map_err(|_| QError::BadIndex(label.to_string()))?;
    let kind = match (hat, right) {
        (false, false) => DerivativeKind::left(i),
        (true, false) => DerivativeKind::hat_left(i),
        (false, true) => DerivativeKind::right(i),
        (true, true) => DerivativeKind::hat_right(i),
    };
    Ok(if upper { kind.raised() } else { kind.lowered() })
}

fn parse_in(text: &str, ordering: Ordering) -> QResult<NSeries> {
    Ok(parse_series(text)?.with_ordering(ordering))
}

/// Resolved eval request: operands and operator.
struct EvalRequest {
    op: EvalOp,
    series: String,
    arg: Option<String>,
    right_action: bool,
}

fn resolve_eval(left: &str, op: Option<EvalOp>, right: Option<&str>, right_action: bool) -> QResult<EvalRequest> {
    let missing = |what: &str| QError::InvalidParameter(format!("missing {what}"));
    if let Some(op) = op {
        let arg = right.map(str::to_string);
        if arg.is_none() {
            return Err(missing("right operand"));
        }
        return Ok(EvalRequest { op, series: left.to_string(), arg, right_action });
    }
    if right.is_some() {
        return Err(QError::InvalidParameter("an operator is needed between the operands".into()));
    }
    if let Some((a, b)) = left.split_once('⋆') {
        return Ok(EvalRequest { op: EvalOp::Star, series: a.to_string(), arg: Some(b.to_string()), right_action });
    }
    if let Some((d, f)) = left.split_once('▷') {
        return Ok(EvalRequest { op: EvalOp::Partial, series: f.to_string(), arg: Some(d.to_string()), right_action: false });
    }
    if let Some((f, d)) = left.split_once('◁') {
        return Ok(EvalRequest { op: EvalOp::Partial, series: f.to_string(), arg: Some(d.to_string()), right_action: true });
    }
    Err(QError::InvalidParameter(format!(
        "no operator in {left:?}; use `f ⋆ g`, `∂A ▷ f`, `f ◁ ∂A` or `<left> <op> <right>`"
    )))
}

fn eval_inner(cfg: &RunConfig, req: &EvalRequest, ordering: Ordering) -> QResult<(String, Value)> {
    let arg = req.arg.as_deref().unwrap_or("").trim();
    let shown = |f: NSeries| -> QResult<NSeries> {
        if cfg.classical {
            specialize(&f, &num_rational::BigRational::one())
        } else {
            Ok(f)
        }
    };
    let f = parse_in(&req.series, ordering)?;
    let (text, kind) = match req.op {
        EvalOp::Star => {
            let g = parse_in(arg, ordering)?;
            (shown(star_any(&f, &g)?)?.to_string(), "series")
        }
        EvalOp::Partial => {
            let k = parse_derivative(arg, req.right_action)?;
            (shown(partial_action(k, &f)?)?.to_string(), "series")
        }
        EvalOp::Translate => {
            let k = match arg {
                "plus" | "⊕" => TranslationKind::Plus,
                "plus-bar" | "⊕̄" => TranslationKind::PlusBar,
                _ => return Err(QError::InvalidParameter(format!("unknown translation {arg:?}; expected plus or plus-bar"))),
            };
            (translate(&f, k, cfg.order)?.to_string(), "bi-series")
        }
        EvalOp::Invert => {
            let k = match arg {
                "minus" | "⊖" => InversionKind::Minus,
                "minus-bar" | "⊖̄" => InversionKind::MinusBar,
                _ => return Err(QError::InvalidParameter(format!("unknown inversion {arg:?}; expected minus or minus-bar"))),
            };
            (shown(qinvert(&f, k)?)?.to_string(), "series")
        }
    };
    let op = match req.op {
        EvalOp::Star => "star",
        EvalOp::Partial if req.right_action => "partial-right",
        EvalOp::Partial => "partial",
        EvalOp::Translate => "translate",
        EvalOp::Invert => "invert",
    };
    let result = json!({
        "op": op,
        "left": req.series.trim(),
        "right": arg,
        "ordering": ordering.name(),
        "kind": kind,
        "value": text,
    });
    Ok((text, result))
}

pub fn cmd_eval(
    cfg: &RunConfig,
    left: &str,
    op: Option<EvalOp>,
    right: Option<&str>,
    ordering: Ordering,
    right_action: bool,
) -> Outcome {
    if let Err(e) = cfg.validate() {
        return Outcome::config_error(e);
    }
    let res = resolve_eval(left, op, right, right_action).and_then(|req| eval_inner(cfg, &req, ordering));
    match res {
        Ok((text, result)) => Outcome {
            code: EXIT_OK,
            report: Some(report::document(cfg, "eval", Status::Pass, result)),
            summary: format!("{text}\n"),
        },
        Err(e) => {
            let code = match e {
                QError::ParseError { .. }
                | QError::OrderingMismatch { .. }
                | QError::BadIndex(_)
                | QError::InvalidParameter(_) => EXIT_USAGE,
                _ => EXIT_FAIL,
            };
            let doc = report::document(cfg, "eval", Status::Error, json!({ "error": e.to_string() }));
            Outcome { code, report: Some(doc), summary: format!("error: {e}\n") }
        }
    }
}

/// Free packet matching the wave variant of the Born solution.
fn free_packet(family: &PlaneWaveFamily, sense: TimeSense, variant: BornVariant) -> QResult<LatticeField> {
    let c = packet_coeffs(family.np());
    let conj: Vec<Complex64> = c.iter().map(|z| z.conj()).collect();
    let theory = theory_of(sense);
    match variant {
        BornVariant::PsiR => family.packet(theory, WaveVariant::Lower, &c),
        BornVariant::PsiStarL => family.packet(theory, WaveVariant::DualLower, &conj),
        BornVariant::PsiL => family.packet(theory, WaveVariant::Upper, &c),
        BornVariant::PsiStarR => family.packet(theory, WaveVariant::DualUpper, &conj),
    }
}

struct ScatterRun {
    checks: Vec<Check>,
    result: Value,
    summary: String,
}

fn run_born(cfg: &RunConfig, fam: &Arc<PlaneWaveFamily>, v: &Potential) -> QResult<ScatterRun> {
    let sense = cfg.time_sense().map_err(|e| QError::InvalidParameter(e.0))?;
    let variant = cfg.born().map_err(|e| QError::InvalidParameter(e.0))?;
    let n_max = cfg.born_order;
    if n_max == 0 {
        return Err(QError::InvalidParameter("born_order must be at least 1".into()));
    }
    let free = free_packet(fam, sense, variant)?;
    let eps = cfg.epsilon;
    let full = born_wavefunction(fam, &free, &v.scaled(eps), n_max, sense, variant)?;
    let half = born_wavefunction(fam, &free, &v.scaled(eps / 2.0), n_max, sense, variant)?;
    let (mut checks, mut rows, mut summary) = (Vec::new(), Vec::new(), String::new());
    for n in 1..=n_max {
        let a = ls_residual(&full, &v.scaled(eps), n)?;
        let b = ls_residual(&half, &v.scaled(eps / 2.0), n)?;
        let want = 2f64.powi(n as i32 + 1);
        let ratio = a / b;
        let dev = (ratio / want - 1.0).abs();
        checks.push(Check::at_most(format!("residual ratio at order {n}"), dev, cfg.ratio_tol));
        summary.push_str(&format!("order {n}: residual {a:.6e} at eps, {b:.6e} at eps/2, ratio {ratio:.4} (expected {want})\n"));
        rows.push(json!({ "order": n, "residual": a, "residual_half": b, "ratio": ratio, "expected": want }));
    }
    let result = json!({
        "sense": sense.name(),
        "variant": variant.name(),
        "epsilon": eps,
        "orders": rows,
    });
    Ok(ScatterRun { checks, result, summary })
}

fn run_smatrix(cfg: &RunConfig, fam: &Arc<PlaneWaveFamily>, v: &Potential) -> QResult<ScatterRun> {
    let sense = cfg.time_sense().map_err(|e| QError::InvalidParameter(e.0))?;
    let variant = cfg.s_variant().map_err(|e| QError::InvalidParameter(e.0))?;
    let s = smatrix(fam, v, cfg.s_order, sense, variant, None)?;
    let id = DMatrix::<Complex64>::identity(fam.np(), fam.np());
    let total = s.total();
    let identity_deviation = (&total - &id).norm();
    let mut checks = vec![Check::at_most("order-0 term is the identity", max_abs(&(&s.terms[0] - &id)), cfg.tol)];
    if v.is_zero() {
        checks.push(Check::at_most("zero potential gives the identity", identity_deviation, cfg.tol));
    }
    let mut summary = String::new();
    for (n, t) in s.terms.iter().enumerate() {
        summary.push_str(&format!("order {n}: max |entry| {:.6e}\n", max_abs(t)));
    }
    summary.push_str(&format!("|S - 1| = {identity_deviation:.6e}\n"));
    let result = json!({
        "variant": variant.name(),
        "sense": sense.name(),
        "labels": s.labels,
        "identity_deviation": identity_deviation,
        "terms": s.terms.iter().map(matrix).collect::<Vec<_>>(),
        "total": matrix(&total),
    });
    Ok(ScatterRun { checks, result, summary })
}

/// The partner of a variant in the unitarity product (left factor first).
fn unitarity_pair(v: SVariant) -> (SVariant, SVariant) {
    match v {
        SVariant::SR | SVariant::SStarL => (SVariant::SStarL, SVariant::SR),
        SVariant::SL | SVariant::SStarR => (SVariant::SL, SVariant::SStarR),
    }
}

fn run_unitarity(cfg: &RunConfig, fam: &Arc<PlaneWaveFamily>, v: &Potential) -> QResult<ScatterRun> {
    let sense = cfg.time_sense().map_err(|e| QError::InvalidParameter(e.0))?;
    let variant = cfg.s_variant().map_err(|e| QError::InvalidParameter(e.0))?;
    let (lv, rv) = unitarity_pair(variant);
    let l = smatrix(fam, v, cfg.s_order, sense, lv, None)?;
    let r = smatrix(fam, v, cfg.s_order, sense, rv, None)?;
    let (mut checks, mut rows, mut summary) = (Vec::new(), Vec::new(), String::new());
    for n in 1..=cfg.s_order {
        let d = unitarity_defect(&l, &r, n)?;
        if n == 1 && v.is_real() {
            checks.push(Check::below("order-1 unitarity defect", d, cfg.unitarity_tol));
        }
        summary.push_str(&format!("order {n}: unitarity defect {d:.6e}\n"));
        rows.push(json!({ "order": n, "defect": d }));
    }
    let mut norms = Vec::new();
    if sense != TimeSense::KgMixed {
        let c = packet_coeffs(fam.np());
        for n in 1..=cfg.s_order {
            let nc = norm_preservation(fam, &c, v, n, sense, None)?;
            summary.push_str(&format!("order {n}: norm deviation {:.6e} at slice {}\n", nc.deviation, nc.slice));
            norms.push(json!({
                "order": n,
                "slice": nc.slice,
                "free": complex(nc.free),
                "scattered": complex(nc.scattered),
                "deviation": nc.deviation,
            }));
        }
    }
    let result = json!({
        "left": lv.name(),
        "right": rv.name(),
        "sense": sense.name(),
        "real_potential": v.is_real(),
        "defects": rows,
        "norm_preservation": norms,
    });
    Ok(ScatterRun { checks, result, summary })
}

fn run_dyson(cfg: &RunConfig, fam: &Arc<PlaneWaveFamily>, v: &Potential) -> QResult<ScatterRun> {
    let sense = cfg.time_sense().map_err(|e| QError::InvalidParameter(e.0))?;
    let variant = cfg.s_variant().map_err(|e| QError::InvalidParameter(e.0))?;
    let from_u = smatrix_from_u(fam, v, 1, sense, variant)?;
    let direct = smatrix(fam, v, 1, sense, variant, None)?;
    let cross = max_abs(&(&from_u.terms[1] - &direct.terms[1]));
    let ev = evolution_for(variant, sense)?;
    let vi = InteractionMatrixFn::new(fam, v, ev.placement())?;
    let last = fam.time.n - 1;
    let n_max = cfg.dyson_order;
    let nested = dyson_u(&vi, ev, n_max, 0, last, DysonForm::Nested)?;
    let ordered = dyson_u(&vi, ev, n_max, 0, last, DysonForm::TimeOrdered)?;
    let id = DMatrix::<Complex64>::identity(fam.np(), fam.np());
    let mut equal_times: f64 = 0.0;
    for k in 0..fam.time.n {
        let u = dyson_u(&vi, ev, n_max, k, k, DysonForm::Nested)?;
        equal_times = equal_times.max(max_abs(&(&u.total() - &id)));
    }
    let (mut checks, mut rows, mut summary) = (Vec::new(), Vec::new(), String::new());
    for n in 1..=n_max {
        let d = max_abs(&(&nested.terms[n] - &ordered.terms[n]));
        checks.push(Check::below(format!("nested vs time-ordered at order {n}"), d, cfg.cross_tol));
        summary.push_str(&format!("order {n}: nested vs time-ordered {d:.6e}\n"));
        rows.push(json!({ "order": n, "deviation": d, "max_entry": max_abs(&nested.terms[n]) }));
    }
    checks.push(Check::at_most("U(t,t) is the identity", equal_times, 0.0));
    checks.push(Check::below("S from U vs direct S at order 1", cross, cfg.cross_tol));
    summary.push_str(&format!("U(t,t) - 1: {equal_times:.6e}\n"));
    summary.push_str(&format!("S from U vs direct S (order 1): {cross:.6e}\n"));
    let result = json!({
        "evolution": ev.name(),
        "variant": variant.name(),
        "sense": sense.name(),
        "orders": rows,
        "equal_time_deviation": equal_times,
        "smatrix_cross_deviation": cross,
        "u_total": matrix(&nested.total()),
    });
    Ok(ScatterRun { checks, result, summary })
}

pub fn cmd_scatter(cfg: &RunConfig, which: ScatterReport) -> Outcome {
    if let Err(e) = cfg.validate() {
        return Outcome::config_error(e);
    }
    if cfg.classical {
        return Outcome::config_error(ConfigError("scattering needs a deformed lattice; classical mode collapses it".into()));
    }
    let command = format!("scatter {}", which.name());
    let run = build_family(cfg).and_then(|fam| {
        let v = build_potential(cfg, &fam)?;
        match which {
            ScatterReport::Born => run_born(cfg, &fam, &v),
            ScatterReport::Smatrix => run_smatrix(cfg, &fam, &v),
            ScatterReport::Unitarity => run_unitarity(cfg, &fam, &v),
            ScatterReport::Dyson => run_dyson(cfg, &fam, &v),
        }
    });
    let run = match run {
        Ok(r) => r,
        Err(e) => return core_failure(cfg, &command, &e),
    };
    let pass = run.checks.iter().all(|c| c.pass);
    let mut summary = run.summary;
    for c in &run.checks {
        let verdict = if c.pass { "pass" } else { "FAIL" };
        summary.push_str(&format!("{verdict} {}: {:.6e} (limit {:.1e})\n", c.name, c.value, c.limit));
    }
    let mut result = run.result;
    result["checks"] = Value::Array(run.checks.iter().map(Check::to_json).collect());
    let status = if pass { Status::Pass } else { Status::Fail };
    Outcome {
        code: if pass { EXIT_OK } else { EXIT_FAIL },
        report: Some(report::document(cfg, &command, status, result)),
        summary,
    }
}
