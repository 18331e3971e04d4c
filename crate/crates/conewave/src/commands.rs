//! Subcommand orchestration.

use std::fs;
use std::path::Path;

use conewave_core::stationary_phase::{PhaseData, ShiftedPhase};
use conewave_core::wavepacket::{argmin_variance_scan, optimal_origin};
use conewave_core::{OriginResult, Symbol};
use rayon::prelude::*;
use serde::Serialize;

use crate::checks::{self, Check, ConeStudy, PointRow, RegionTag};
use crate::config::{ExperimentConfig, Format, Scenario};
use crate::error::{exit, CliResult};
use crate::parallel::Rayon;
use crate::report::{self, num, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Evaluate,
    Approximate,
    Origin,
    Verify,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Evaluate => "evaluate",
            Command::Approximate => "approximate",
            Command::Origin => "origin",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct OriginReport {
    t0: f64,
    x0: f64,
    auto: bool,
}

#[derive(Debug, Clone, Serialize)]
struct ConstantsReport {
    delta: f64,
    l_delta: f64,
    c5: f64,
    c6: f64,
    c7: f64,
    c8: f64,
    velocity_gap: f64,
    g: f64,
    l1_norm_u0: f64,
}

#[derive(Debug, Clone, Serialize)]
struct OriginEstimate {
    method: &'static str,
    t_star: f64,
    x_star: f64,
    min_variance: f64,
}

impl From<&OriginResult> for OriginEstimate {
    fn from(o: &OriginResult) -> Self {
        let method = match o.method {
            conewave_core::OriginMethod::ClosedForm => "closed_form",
            conewave_core::OriginMethod::Scan => "scan",
            conewave_core::OriginMethod::GoldenSection => "golden_section",
        };
        Self { method, t_star: o.t_star, x_star: o.x_star, min_variance: o.min_variance }
    }
}

#[derive(Debug, Clone, Serialize)]
struct RowSummary {
    inside: usize,
    outside: usize,
    slice_excluded: usize,
    violations: usize,
    max_bound_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
struct Report<'a, T: Serialize> {
    command: &'static str,
    config: &'a ExperimentConfig,
    origin: OriginReport,
    #[serde(flatten)]
    body: T,
}

/// Runs `cmd` and writes its outputs into `out`. Returns the exit code.
pub fn run(cmd: Command, scenario: &Scenario, out: &Path) -> CliResult<i32> {
    fs::create_dir_all(out)?;
    match cmd {
        Command::Evaluate => evaluate(scenario, out),
        Command::Approximate => approximate(scenario, out),
        Command::Origin => origin(scenario, out),
        Command::Verify => verify(scenario, out),
        Command::Sweep => sweep(scenario, out),
    }
}

fn origin_report(s: &Scenario) -> OriginReport {
    OriginReport { t0: s.cone.origin.0, x0: s.cone.origin.1, auto: s.auto_origin }
}

fn emit<T: Serialize>(s: &Scenario, out: &Path, cmd: Command, table: Option<&Table>, body: T) -> CliResult<()> {
    let formats = &s.config.output.formats;
    if let Some(t) = table {
        if formats.contains(&Format::Csv) {
            t.write(out)?;
        }
    }
    if formats.contains(&Format::Json) {
        let r = Report { command: cmd.name(), config: &s.config, origin: origin_report(s), body };
        report::write_json(out, &r)?;
    }
    Ok(())
}

fn grid_points(s: &Scenario) -> Vec<(f64, f64)> {
    s.times().into_iter().flat_map(|t| s.x_grid(t).into_iter().map(move |x| (t, x))).collect()
}

fn study(s: &Scenario) -> CliResult<ConeStudy<'_>> {
    ConeStudy::new(&s.symbol, &s.profile, s.cone, s.config.delta, s.config.tolerances.quadrature)
}

fn constants_report(st: &ConeStudy<'_>) -> ConstantsReport {
    let c = &st.constants;
    ConstantsReport {
        delta: c.delta,
        l_delta: c.l,
        c5: c.c5,
        c6: c.c6,
        c7: c.c7,
        c8: c.c8,
        velocity_gap: c.gap,
        g: st.g,
        l1_norm_u0: st.l1,
    }
}

fn summarize(rows: &[PointRow], slack: f64) -> RowSummary {
    let count = |tag| rows.iter().filter(|r| r.region == tag).count();
    RowSummary {
        inside: count(RegionTag::Inside),
        outside: count(RegionTag::Outside),
        slice_excluded: count(RegionTag::SliceExcluded),
        violations: rows.iter().filter(|r| !r.certified(slack)).count(),
        max_bound_ratio: rows.iter().filter(|r| r.bound.is_finite()).map(|r| r.ratio()).fold(0.0, f64::max),
    }
}

fn evaluate(s: &Scenario, out: &Path) -> CliResult<i32> {
    let points = grid_points(s);
    let tol = s.config.tolerances.quadrature;
    let values = points
        .par_iter()
        .map(|&(t, x)| conewave_core::wavepacket::evaluate_solution(&s.symbol, &s.profile, t, x, None, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["t", "x", "re_u", "im_u", "abs_u"]);
    for (&(t, x), u) in points.iter().zip(&values) {
        table.push(&[num(t), num(x), num(u.re), num(u.im), num(u.norm())]);
    }
    #[derive(Serialize)]
    struct Body {
        points: usize,
    }
    emit(s, out, Command::Evaluate, Some(&table), Body { points: points.len() })?;
    Ok(exit::OK)
}

fn approximate(s: &Scenario, out: &Path) -> CliResult<i32> {
    let st = study(s)?;
    let rows = st.rows(&grid_points(s))?;
    let summary = summarize(&rows, s.config.tolerances.certification_slack);
    let code = if summary.violations == 0 { exit::OK } else { exit::CERTIFICATION };
    #[derive(Serialize)]
    struct Body {
        constants: ConstantsReport,
        rows: RowSummary,
    }
    let body = Body { constants: constants_report(&st), rows: summary };
    emit(s, out, Command::Approximate, Some(&report::approximate_table(&rows)), body)?;
    Ok(code)
}

fn origin_estimates(sym: &Symbol, s: &Scenario) -> CliResult<Vec<OriginResult>> {
    let closed = optimal_origin(sym, &s.profile)?;
    let c = closed.t_star.floor();
    let scan = argmin_variance_scan(sym, &s.profile, c - 10.0, c + 10.0)?;
    Ok(vec![closed, scan])
}

fn origin(s: &Scenario, out: &Path) -> CliResult<i32> {
    let est = origin_estimates(&s.symbol, s)?;
    let mut table = Table::new(&["method", "t_star", "x_star", "min_variance"]);
    let list: Vec<OriginEstimate> = est.iter().map(OriginEstimate::from).collect();
    for e in &list {
        table.push(&[e.method.to_string(), num(e.t_star), num(e.x_star), num(e.min_variance)]);
    }
    #[derive(Serialize)]
    struct Body {
        estimates: Vec<OriginEstimate>,
    }
    emit(s, out, Command::Origin, Some(&table), Body { estimates: list })?;
    Ok(exit::OK)
}

/// Every check that applies to the configured scenario, plus the point rows.
pub fn verify_checks(s: &Scenario) -> CliResult<(Vec<Check>, Vec<PointRow>)> {
    let sym = &s.symbol;
    let prof = &s.profile;
    let slack = s.config.tolerances.certification_slack;
    let delta = s.config.delta;
    let (t0, _) = s.cone.origin;
    let (p1, p2) = prof.band();
    let mut out = checks::plancherel(&[(sym, prof)], &Rayon)?;
    out.extend(checks::fresnel_suite(&[1.0, 10.0, 100.0], &[0.55, 0.6, delta, 0.7], &[0.25, 0.5, 1.0, 2.0, 3.0])?);
    let mid = ShiftedPhase::new(sym.clone(), sym.df(0.5 * (p1 + p2)));
    out.extend(checks::diffeo_suite("shifted phase", &PhaseData::new(mid, s.cone.padded, None)?, 64)?);
    let omegas = [10.0, 1e2, 1e3, 1e4];
    let interior = checks::interior_cases(sym, prof, s.cone.padded, &omegas, &[0.55, delta, 0.7])?;
    out.push(checks::certify_cases("interior expansion bound", &interior, slack));
    let exterior = checks::exterior_cases(sym, prof, &omegas)?;
    out.push(checks::certify_cases("non-stationary bound", &exterior, slack));
    let times: Vec<f64> = [-5.0, 0.0, 3.0, 10.0, 50.0].iter().map(|d| t0 + d).collect();
    out.extend(checks::moment_closed_forms(sym, prof, &times, &Rayon)?);
    out.extend(checks::origin_agreement(sym, prof, true, &Rayon)?);
    out.extend(checks::stability(sym, prof, &s.cone, &[1.0, 10.0, 100.0, 1000.0])?);
    let st = study(s)?;
    let rows = st.rows(&grid_points(s))?;
    out.push(checks::certify_rows("cone points within interior bound", &rows, RegionTag::Inside, slack));
    out.push(checks::certify_rows("outside points within exterior bound", &rows, RegionTag::Outside, slack));
    let decay = checks::max_error_by_time(&rows, t0);
    if decay.len() >= 3 {
        out.push(Check::new("log-log slope of max interior error", checks::log_log_slope(&decay), -0.45, decay.len()));
    }
    if matches!(sym, Symbol::FreeSchrodinger) {
        // Constant (1/4π)^{-1/2} as stated for the shifted dispersive estimate.
        out.extend(checks::lp_decay(prof, &[1.0, 10.0, 100.0], (4.0 * std::f64::consts::PI).sqrt(), "sqrt(4 pi)", &Rayon)?);
    }
    Ok((out, rows))
}

fn verify(s: &Scenario, out: &Path) -> CliResult<i32> {
    let (checks, rows) = verify_checks(s)?;
    let passed = checks.iter().all(|c| c.passed);
    #[derive(Serialize)]
    struct Body {
        passed: bool,
        checks: Vec<Check>,
    }
    emit(s, out, Command::Verify, Some(&report::approximate_table(&rows)), Body { passed, checks })?;
    Ok(if passed { exit::OK } else { exit::CERTIFICATION })
}

fn sweep(s: &Scenario, out: &Path) -> CliResult<i32> {
    let st = study(s)?;
    let (t0, _) = s.cone.origin;
    let rows = st.rows(&grid_points(s))?;
    let slack = s.config.tolerances.certification_slack;
    let mut table = Table::new(&["dt", "t", "max_err", "bound", "bound_ratio"]);
    let mut times: Vec<f64> = rows.iter().filter(|r| r.region == RegionTag::Inside).map(|r| r.t).collect();
    times.dedup();
    let mut errors = Vec::new();
    let mut bounds = Vec::new();
    for &t in &times {
        let slice: Vec<&PointRow> = rows.iter().filter(|r| r.t == t && r.region == RegionTag::Inside).collect();
        let err = slice.iter().map(|r| r.abs_err).fold(0.0, f64::max);
        let bound = slice[0].bound;
        let dt = (t - t0).abs();
        table.push(&[num(t - t0), num(t), num(err), num(bound), num(err / bound)]);
        if err > 0.0 {
            errors.push((dt, err));
        }
        bounds.push((dt, bound));
    }
    let violations = rows.iter().filter(|r| !r.certified(slack)).count();
    #[derive(Serialize)]
    struct Body {
        slices: usize,
        violations: usize,
        error_slope: Option<f64>,
        bound_slope: Option<f64>,
    }
    let fit = |v: &[(f64, f64)]| if v.len() >= 2 { Some(checks::log_log_slope(v)) } else { None };
    let body = Body { slices: times.len(), violations, error_slope: fit(&errors), bound_slope: fit(&bounds) };
    emit(s, out, Command::Sweep, Some(&table), body)?;
    Ok(if violations == 0 { exit::OK } else { exit::CERTIFICATION })
}
