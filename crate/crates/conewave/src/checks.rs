//! Certification checks shared by `verify` and the acceptance suite.
//!
//! Each check reports the worst observed quantity against a limit; it passes
//! when `worst <= limit`.

use std::f64::consts::{FRAC_PI_4, PI};

use conewave_core::moments::{
    firstterm_moments_from, sample_solution, solution_moments_from, spatial_moments,
};
use conewave_core::stationary_phase::{
    diffeo_bounds, expand_with_bound, exterior_bound, fresnel_primitive, l_delta, phase_diffeo,
    phase_diffeo_inverse, Phase, PhaseData, ShiftedPhase, Side,
};
use conewave_core::wavepacket::{
    argmin_variance_golden, argmin_variance_scan, classify_point, cone_constants, evaluate_solution,
    first_term_h, optimal_origin, remainder_bound, shift_norm_g, shifted_lp_check, ConeConstants,
    LpExponent,
};
use conewave_core::{
    oscillatory_integral, BandProfile, Complex64, ConeSpec, GridExecutor, OscillatoryJob, Regime, Region,
    Symbol,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliResult;

/// Tolerance of the reference quadratures used as oracles.
pub const ORACLE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub worst: f64,
    pub limit: f64,
    pub samples: usize,
}

impl Check {
    pub fn new(name: impl Into<String>, worst: f64, limit: f64, samples: usize) -> Self {
        Self { name: name.into(), passed: worst <= limit, worst, limit, samples }
    }

    /// Counts violations; passes when there are none.
    pub fn violations(name: impl Into<String>, count: usize, samples: usize) -> Self {
        Self::new(name, count as f64, 0.0, samples)
    }
}

/// Spectral mass `(1/2π)‖F u0‖²` and x-space mass `‖u0‖²`.
pub fn plancherel(profiles: &[(&Symbol, &BandProfile)], exec: &dyn GridExecutor) -> CliResult<Vec<Check>> {
    let mut spec = 0.0f64;
    let mut space = 0.0f64;
    for &(sym, prof) in profiles {
        spec = spec.max((prof.spectral_mass()? - 1.0).abs());
        space = space.max((spatial_moments(&sample_solution(sym, prof, 0.0, exec)?)?.mass - 1.0).abs());
    }
    Ok(vec![
        Check::new("spectral mass equals one", spec, 1e-9, profiles.len()),
        Check::new("x-space mass equals one", space, 1e-7, profiles.len()),
    ])
}

/// Closed value at `s = 0`, derivative `e^{-iωs²}` and the decay bound.
pub fn fresnel_suite(omegas: &[f64], deltas: &[f64], ss: &[f64]) -> CliResult<Vec<Check>> {
    let mut origin = 0.0f64;
    for &w in omegas {
        let exact = -0.5 * PI.sqrt() * Complex64::from_polar(w.powf(-0.5), -FRAC_PI_4);
        origin = origin.max((fresnel_primitive(0.0, w)? - exact).norm());
    }
    let h = 1e-4;
    let mut deriv = 0.0f64;
    let mut n_deriv = 0;
    for &w in omegas {
        for &s in ss.iter().filter(|&&s| s > 2.0 * h) {
            let phi = |x: f64| fresnel_primitive(x, w);
            let d = (phi(s - 2.0 * h)? - phi(s + 2.0 * h)? + 8.0 * (phi(s + h)? - phi(s - h)?)) / (12.0 * h);
            deriv = deriv.max((d - Complex64::from_polar(1.0, -w * s * s)).norm());
            n_deriv += 1;
        }
    }
    let mut bad = 0;
    let mut n = 0;
    for &d in deltas {
        let l = l_delta(d)?;
        for &w in omegas {
            for &s in ss.iter().filter(|&&s| s > 0.0) {
                n += 1;
                if fresnel_primitive(s, w)?.norm() > l * s.powf(1.0 - 2.0 * d) * w.powf(-d) {
                    bad += 1;
                }
            }
        }
    }
    Ok(vec![
        Check::new("fresnel primitive at s = 0", origin, 1e-10, omegas.len()),
        Check::new("fresnel primitive derivative", deriv, 1e-6, n_deriv),
        Check::violations("fresnel primitive decay bound", bad, n),
    ])
}

/// Slope of `φ_j` at `p0`, the lower bound on `|φ_j'|` and the bound on
/// `|(φ_j^{-1})''|`, sampled on both sides of `p0`.
pub fn diffeo_suite<P: Phase>(label: &str, ph: &PhaseData<P>, samples: usize) -> CliResult<Vec<Check>> {
    let p0 = ph.p0.ok_or(conewave_core::Error::Domain(format!("{label}: no stationary point")))?;
    let (lo, hi) = ph.padded_band;
    let b = diffeo_bounds(ph);
    let h = 1e-4;
    let mut slope = 0.0f64;
    let mut low_bad = 0;
    let mut inv_bad = 0;
    let mut n = 0;
    for (side, a, z) in [(Side::Left, lo, p0), (Side::Right, p0, hi)] {
        let phi = |p: f64| phase_diffeo(ph, side, p).map(|v| v.0);
        let dphi = |p: f64| phase_diffeo(ph, side, p).map(|v| v.1);
        let e = if side == Side::Left { -h } else { h };
        let fd = (-3.0 * phi(p0)? + 4.0 * phi(p0 + e)? - phi(p0 + 2.0 * e)?) / (2.0 * e);
        slope = slope.max((fd - dphi(p0)?).abs());
        let top = phi(if side == Side::Left { lo } else { hi })?.abs();
        for k in 0..=samples {
            let p = (a + (z - a) * k as f64 / samples as f64).clamp(a, z);
            n += 1;
            if dphi(p)?.abs() < b.dphi_lower * (1.0 - 1e-12) {
                low_bad += 1;
            }
            // (φ⁻¹)'' = -φ''/φ'³ with φ'' from a central difference of the exact φ'.
            let s = top * k as f64 / samples as f64;
            let q = phase_diffeo_inverse(ph, side, s)?;
            let g = 1e-5 * (hi - lo);
            let (ql, qr) = ((q - g).max(a), (q + g).min(z));
            let d2phi = (dphi(qr)? - dphi(ql)?) / (qr - ql);
            let inv2 = (-d2phi / dphi(q)?.powi(3)).abs();
            if inv2 > b.inverse_d2_upper * (1.0 + 1e-9) + 1e-9 {
                inv_bad += 1;
            }
        }
    }
    Ok(vec![
        Check::new(format!("{label}: diffeo slope at p0"), slope, 1e-6, 2),
        Check::violations(format!("{label}: diffeo derivative lower bound"), low_bad, n),
        Check::violations(format!("{label}: inverse diffeo curvature bound"), inv_bad, n),
    ])
}

/// One interior-expansion case: `∫ U e^{iωψ}` with `ψ = vp - f`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExpansionCase {
    pub omega: f64,
    pub delta: f64,
    pub velocity: f64,
    pub error: f64,
    pub bound: f64,
}

fn oracle(prof: &BandProfile, sym: &Symbol, v: f64, omega: f64) -> CliResult<Complex64> {
    let amp = |p: f64| prof.amp(p);
    let psi = |p: f64| v * p - sym.f(p);
    let dpsi = |p: f64| v - sym.df(p);
    let job = OscillatoryJob::new(&amp, &psi, &dpsi, omega, prof.band(), ORACLE_TOL)?;
    Ok(oscillatory_integral(&job)?.value)
}

/// Interior expansion against the oracle for stationary points at the band
/// quartiles.
pub fn interior_cases(
    sym: &Symbol,
    prof: &BandProfile,
    padded: (f64, f64),
    omegas: &[f64],
    deltas: &[f64],
) -> CliResult<Vec<ExpansionCase>> {
    let (p1, p2) = prof.band();
    let jobs: Vec<(f64, f64, f64)> = [0.25, 0.5, 0.75]
        .iter()
        .flat_map(|q| {
            let v = sym.df(p1 + q * (p2 - p1));
            omegas.iter().flat_map(move |&w| deltas.iter().map(move |&d| (v, w, d)))
        })
        .collect();
    jobs.par_iter()
        .map(|&(v, omega, delta)| {
            let ph = PhaseData::new(ShiftedPhase::new(sym.clone(), v), padded, None)?;
            let e = expand_with_bound(prof, &ph, omega, delta)?;
            let error = (oracle(prof, sym, v, omega)? - e.approx).norm();
            Ok(ExpansionCase { omega, delta, velocity: v, error, bound: e.bound })
        })
        .collect()
}

/// Non-stationary estimate for velocities outside `[f'(p1), f'(p2)]`.
pub fn exterior_cases(sym: &Symbol, prof: &BandProfile, omegas: &[f64]) -> CliResult<Vec<ExpansionCase>> {
    let (p1, p2) = prof.band();
    let (a, b) = (sym.df(p1), sym.df(p2));
    let w = b - a;
    let jobs: Vec<(f64, f64)> = [a - w, a - 0.1 * w, b + 0.1 * w, b + w]
        .iter()
        .flat_map(|&v| omegas.iter().map(move |&o| (v, o)))
        .collect();
    jobs.par_iter()
        .map(|&(v, omega)| {
            let dpsi = |p: f64| v - sym.df(p);
            let bound = exterior_bound(prof, &dpsi, omega)?;
            let error = oracle(prof, sym, v, omega)?.norm();
            Ok(ExpansionCase { omega, delta: 1.0, velocity: v, error, bound })
        })
        .collect()
}

pub fn certify_cases(name: &str, cases: &[ExpansionCase], slack: f64) -> Check {
    let bad = cases.iter().filter(|c| !(c.error <= c.bound + slack)).count();
    Check::violations(name, bad, cases.len())
}

/// Closed-form mean and variance against x-space quadrature.
pub fn moment_closed_forms(
    sym: &Symbol,
    prof: &BandProfile,
    times: &[f64],
    exec: &dyn GridExecutor,
) -> CliResult<Vec<Check>> {
    let sm = prof.spectral_moments(sym)?;
    let mut dm = 0.0f64;
    let mut dv = 0.0f64;
    for &t in times {
        let oracle = spatial_moments(&sample_solution(sym, prof, t, exec)?)?;
        let closed = solution_moments_from(&sm, t);
        dm = dm.max((oracle.m1 - closed.m1).abs());
        dv = dv.max((oracle.v - closed.v).abs() / closed.v);
    }
    Ok(vec![
        Check::new("closed-form mean", dm, 1e-6, times.len()),
        Check::new("closed-form variance (relative)", dv, 1e-5, times.len()),
    ])
}

/// Closed-form origin against the three-point fit and the x-space golden search.
pub fn origin_agreement(
    sym: &Symbol,
    prof: &BandProfile,
    golden: bool,
    exec: &dyn GridExecutor,
) -> CliResult<Vec<Check>> {
    let o = optimal_origin(sym, prof)?;
    let scan = argmin_variance_scan(sym, prof, o.t_star.floor() - 10.0, o.t_star.floor() + 10.0)?;
    let mut checks = vec![Check::new(
        "origin: closed form vs three-point fit",
        (o.t_star - scan.t_star).abs().max((o.x_star - scan.x_star).abs()),
        1e-9,
        1,
    )];
    if golden {
        let c = o.t_star.round();
        let g = argmin_variance_golden(sym, prof, c - 3.0, c + 3.0, exec)?;
        checks.push(Check::new(
            "origin: closed form vs golden-section x-space search",
            (o.t_star - g.t_star).abs().max((o.x_star - g.x_star).abs()),
            1e-5,
            1,
        ));
    }
    Ok(checks)
}

/// Region tag of a CSV row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionTag {
    Inside,
    Outside,
    SliceExcluded,
}

impl RegionTag {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionTag::Inside => "inside",
            RegionTag::Outside => "outside",
            RegionTag::SliceExcluded => "slice-excluded",
        }
    }
}

/// `u_f`, `H_f` and the applicable remainder bound at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointRow {
    pub t: f64,
    pub x: f64,
    pub region: RegionTag,
    pub u: Complex64,
    pub h: Complex64,
    pub abs_err: f64,
    /// NaN on the excluded slice.
    pub bound: f64,
}

impl PointRow {
    pub fn ratio(&self) -> f64 {
        self.abs_err / self.bound
    }

    pub fn certified(&self, slack: f64) -> bool {
        self.region == RegionTag::SliceExcluded || self.abs_err <= self.bound + slack
    }
}

/// Inputs shared by every row of a cone study.
pub struct ConeStudy<'a> {
    pub symbol: &'a Symbol,
    pub profile: &'a BandProfile,
    pub cone: ConeSpec,
    pub constants: ConeConstants,
    /// `‖(· - x0) u_f(t0, ·)‖₂`.
    pub g: f64,
    /// `‖u0‖₁`.
    pub l1: f64,
    pub tol: f64,
}

impl<'a> ConeStudy<'a> {
    pub fn new(symbol: &'a Symbol, profile: &'a BandProfile, cone: ConeSpec, delta: f64, tol: f64) -> CliResult<Self> {
        let constants = cone_constants(symbol, &cone, delta)?;
        let g = shift_norm_g(symbol, profile, cone.origin.0, cone.origin.1)?;
        let l1 = profile.l1_norm_u0()?;
        Ok(Self { symbol, profile, cone, constants, g, l1, tol })
    }

    pub fn row(&self, t: f64, x: f64) -> CliResult<PointRow> {
        let (t0, _) = self.cone.origin;
        let u = evaluate_solution(self.symbol, self.profile, t, x, Some(self.cone.origin), self.tol)?;
        let (region, h, bound) = match classify_point(self.symbol, &self.cone, t, x) {
            Region::OnTimeSlice => (RegionTag::SliceExcluded, Complex64::new(0.0, 0.0), f64::NAN),
            Region::InsideCone { .. } => (
                RegionTag::Inside,
                first_term_h(self.symbol, self.profile, &self.cone, t, x)?,
                remainder_bound(&self.constants, self.g, self.l1, t, t0, Regime::Interior)?,
            ),
            Region::OutsideCone => (
                RegionTag::Outside,
                Complex64::new(0.0, 0.0),
                remainder_bound(&self.constants, self.g, self.l1, t, t0, Regime::Exterior)?,
            ),
        };
        Ok(PointRow { t, x, region, u, h, abs_err: (u - h).norm(), bound })
    }

    /// Rows for all points, evaluated in parallel and returned in input order.
    pub fn rows(&self, points: &[(f64, f64)]) -> CliResult<Vec<PointRow>> {
        points.par_iter().map(|&(t, x)| self.row(t, x)).collect()
    }
}

/// Violation count over rows of one region.
pub fn certify_rows(name: &str, rows: &[PointRow], region: RegionTag, slack: f64) -> Check {
    let sel: Vec<&PointRow> = rows.iter().filter(|r| r.region == region).collect();
    let bad = sel.iter().filter(|r| !r.certified(slack)).count();
    Check::violations(name, bad, sel.len())
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| {
        let dx = x.ln() - mx;
        (a + dx * (y.ln() - my), b + dx * dx)
    });
    num / den
}

/// Largest interior error at each distinct `|t - t0|`, sorted by `|t - t0|`.
pub fn max_error_by_time(rows: &[PointRow], t0: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for r in rows.iter().filter(|r| r.region == RegionTag::Inside) {
        let dt = (r.t - t0).abs();
        match out.iter_mut().find(|(d, _)| *d == dt) {
            Some(e) => e.1 = e.1.max(r.abs_err),
            None => out.push((dt, r.abs_err)),
        }
    }
    out.retain(|&(_, e)| e > 0.0);
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Mean matching and constancy of the variance gap at the optimal origin, and
/// the gap slope `2 v_fp (t0 - t*)` for a shifted origin.
pub fn stability(sym: &Symbol, prof: &BandProfile, cone: &ConeSpec, dts: &[f64]) -> CliResult<Vec<Check>> {
    let sm = prof.spectral_moments(sym)?;
    let o = optimal_origin(sym, prof)?;
    let best = cone.with_origin((o.t_star, o.x_star));
    let mut mean = 0.0f64;
    let mut gap = 0.0f64;
    for &dt in dts {
        let t = o.t_star + dt;
        let u = solution_moments_from(&sm, t);
        let h = firstterm_moments_from(&sm, &best, t)?;
        mean = mean.max((u.m1 - h.m1).abs());
        gap = gap.max((u.v - h.v - o.min_variance).abs());
    }
    let moved = cone.with_origin((o.t_star + 1.0, o.x_star));
    let gap_at = |t: f64| -> CliResult<f64> {
        Ok(solution_moments_from(&sm, t).v - firstterm_moments_from(&sm, &moved, t)?.v)
    };
    let mut slope = 0.0f64;
    for w in dts.windows(2) {
        let (ta, tb) = (o.t_star + 1.0 + w[0], o.t_star + 1.0 + w[1]);
        let s = (gap_at(tb)? - gap_at(ta)?) / (tb - ta);
        slope = slope.max((s - 2.0 * sm.v_fp).abs());
    }
    Ok(vec![
        Check::new("mean of first term equals mean of solution", mean, 1e-9, dts.len()),
        Check::new("variance gap equals the minimal variance", gap, 1e-9, dts.len()),
        Check::new("variance gap slope for a shifted origin", slope, 1e-9, dts.len().saturating_sub(1)),
    ])
}

/// `sup |u_S(t)|` against `constant · ‖u_S(t*)‖₁ |t - t*|^{-1/2}`, and
/// `‖u_S(t)‖₂ = ‖u_S(t*)‖₂ = 1`.
pub fn lp_decay(
    prof: &BandProfile,
    dts: &[f64],
    constant: f64,
    label: &str,
    exec: &dyn GridExecutor,
) -> CliResult<Vec<Check>> {
    let sym = Symbol::FreeSchrodinger;
    let t_star = optimal_origin(&sym, prof)?.t_star;
    let mut worst = 0.0f64;
    let mut eq = 0.0f64;
    for &dt in dts {
        let c = shifted_lp_check(&sym, prof, t_star + dt, LpExponent::Infinity, exec)?;
        worst = worst.max(c.lhs / (constant * c.dual_norm * c.time_factor));
        let two = shifted_lp_check(&sym, prof, t_star + dt, LpExponent::Two, exec)?;
        eq = eq.max((two.lhs - 1.0).abs()).max((two.rhs - 1.0).abs());
    }
    Ok(vec![
        Check::new(format!("sup-norm decay with constant {label} (lhs/rhs)"), worst, 1.0, dts.len()),
        Check::new("L2 norm conserved", eq, 1e-7, dts.len()),
    ])
}
