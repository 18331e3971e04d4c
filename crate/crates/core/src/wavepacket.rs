//! Wave packets `u_f(t, x)`, their cones, first terms and remainder bounds.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use num_traits::Float;

use crate::band_profile::{BandProfile, SpectralMoments, BAND_TOL};
use crate::error::{domain, Error, Result};
use crate::moments::{
    sample_adaptive, solution_moments_from, solution_window, spatial_moments, FieldSampler, GridExecutor, GridFn,
    SampledField, TailCriterion,
};
use crate::oscillatory::{integrate_real, integrate_smooth, oscillatory_integral, panel_nodes, OscillatoryJob};
use crate::stationary_phase::l_delta;
use crate::symbols::Symbol;

/// Default quadrature tolerance for `u_f(t, x)`.
pub const SOLUTION_TOL: f64 = 1e-12;

/// Default relative padding of the band.
pub const DEFAULT_PADDING: f64 = 0.1;

/// Leading coefficients at or below this are treated as degenerate.
pub const DEGENERATE_VFP: f64 = 1e-12;

/// Band, padded band and origin of a space-time cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeSpec {
    pub band: (f64, f64),
    pub padded: (f64, f64),
    pub origin: (f64, f64),
}

/// Position of a space-time point relative to a cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    InsideCone { p0: f64 },
    OutsideCone,
    OnTimeSlice,
}

/// Which remainder estimate applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Interior,
    Exterior,
}

impl ConeSpec {
    pub fn new(band: (f64, f64), padded: (f64, f64), origin: (f64, f64)) -> Result<Self> {
        if !(band.0 < band.1) {
            return Err(domain("cone band needs p1 < p2"));
        }
        if !(padded.0 < band.0 && band.1 < padded.1) {
            return Err(domain("padded band must strictly contain the band"));
        }
        if !origin.0.is_finite() || !origin.1.is_finite() {
            return Err(domain("cone origin must be finite"));
        }
        Ok(Self { band, padded, origin })
    }

    /// Pads `band` on both sides by `fraction` of its width.
    pub fn with_padding(band: (f64, f64), fraction: f64, origin: (f64, f64)) -> Result<Self> {
        if !(fraction > 0.0) || !fraction.is_finite() {
            return Err(domain("padding fraction must be positive"));
        }
        let w = band.1 - band.0;
        Self::new(band, (band.0 - fraction * w, band.1 + fraction * w), origin)
    }

    pub fn with_origin(&self, origin: (f64, f64)) -> Self {
        Self { origin, ..*self }
    }

    /// `min{f'(p1) - f'(p̃1), f'(p̃2) - f'(p2)}`, required positive.
    pub fn velocity_gap(&self, sym: &Symbol) -> Result<f64> {
        let gap = (sym.df(self.band.0) - sym.df(self.padded.0)).min(sym.df(self.padded.1) - sym.df(self.band.1));
        if !(gap > 0.0) {
            return Err(Error::Convexity { a: self.padded.0, b: self.padded.1, inf_d2f: gap });
        }
        Ok(gap)
    }
}

/// Locates `(t, x)` relative to the closed cone.
pub fn classify_point(sym: &Symbol, cone: &ConeSpec, t: f64, x: f64) -> Region {
    let (t0, x0) = cone.origin;
    if t == t0 {
        return Region::OnTimeSlice;
    }
    let r = (x - x0) / (t - t0);
    let (a, b) = cone.padded;
    match sym.invert_velocity(r, a, b) {
        Ok(p0) => Region::InsideCone { p0 },
        Err(_) => Region::OutsideCone,
    }
}

/// `u_f(t, x) = (1/2π) ∫ F u0(p) e^{-itf(p) + ixp} dp` by phase-resolved quadrature.
///
/// With an origin `(t0, x0)` the integral is written as
/// `∫ U(p) e^{i(t-t0) Ψ(p)} dp` with `Ψ(p) = rp - f(p)`, `r = (x-x0)/(t-t0)` and
/// `U = (1/2π) F u0 e^{-it0 f + ix0 p}`.
pub fn evaluate_solution(
    sym: &Symbol,
    prof: &BandProfile,
    t: f64,
    x: f64,
    origin: Option<(f64, f64)>,
    tol: f64,
) -> Result<Complex64> {
    if !t.is_finite() || !x.is_finite() {
        return Err(domain("evaluation point must be finite"));
    }
    let band = prof.band();
    let scale = 1.0 / (2.0 * PI);
    match origin {
        Some((t0, x0)) if t != t0 => {
            let omega = t - t0;
            let r = (x - x0) / omega;
            let s = omega.signum();
            let amp = |p: f64| prof.amp(p) * Complex64::from_polar(scale, x0 * p - t0 * sym.f(p));
            let psi = |p: f64| s * (r * p - sym.f(p));
            let dpsi = |p: f64| s * (r - sym.df(p));
            let job = OscillatoryJob::new(&amp, &psi, &dpsi, omega.abs(), band, tol)?;
            Ok(oscillatory_integral(&job)?.value)
        }
        _ => {
            let amp = |p: f64| prof.amp(p) * scale;
            let psi = |p: f64| x * p - t * sym.f(p);
            let dpsi = |p: f64| x - t * sym.df(p);
            let job = OscillatoryJob::new(&amp, &psi, &dpsi, 1.0, band, tol)?;
            Ok(oscillatory_integral(&job)?.value)
        }
    }
}

/// The first term `H_f(t, x)` of the expansion in `cone`.
pub fn first_term_h(sym: &Symbol, prof: &BandProfile, cone: &ConeSpec, t: f64, x: f64) -> Result<Complex64> {
    match classify_point(sym, cone, t, x) {
        Region::OnTimeSlice => Err(domain("first term is undefined on the slice t = t0")),
        Region::OutsideCone => Ok(Complex64::new(0.0, 0.0)),
        Region::InsideCone { p0 } => Ok(first_term_at(sym, prof, cone.origin.0, t, x, p0)),
    }
}

fn first_term_at(sym: &Symbol, prof: &BandProfile, t0: f64, t: f64, x: f64, p0: f64) -> Complex64 {
    let a = prof.amp(p0);
    if a == Complex64::new(0.0, 0.0) {
        return a;
    }
    let dt = t - t0;
    let theta = -dt.signum() * FRAC_PI_4 - t * sym.f(p0) + x * p0;
    let modulus = 1.0 / ((2.0 * PI) * sym.d2f(p0) * dt.abs()).sqrt();
    a * Complex64::from_polar(modulus, theta)
}

/// Remainder constants of the cone expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeConstants {
    pub delta: f64,
    pub l: f64,
    pub factor_c5: f64,
    pub factor_c6: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub c8: f64,
    pub gap: f64,
}

/// `C5 … C8` from the extrema of `f''` and `|f'''|` over the padded band.
pub fn cone_constants(sym: &Symbol, cone: &ConeSpec, delta: f64) -> Result<ConeConstants> {
    if !(delta > 0.5 && delta < 0.75) {
        return Err(domain("delta must lie in (1/2, 3/4)"));
    }
    let l = l_delta(delta)?;
    let e = sym.band_extrema(cone.padded.0, cone.padded.1)?;
    let (big_m, m, t) = (e.sup_d2f, e.inf_d2f, e.sup_abs_d3f);
    let w = cone.padded.1 - cone.padded.0;
    let factor_c5 = big_m.powf(1.5 - delta) * m.powf(-1.5);
    let factor_c6 =
        big_m.powf(2.5 - delta) * t * m.powf(-3.5) + big_m.powf(3.5 - delta) * t * m.powf(-4.5) / 3.0;
    let c5 = 2.0.powf(delta + 0.5) * l / (PI.sqrt() * (3.0 - 4.0 * delta).sqrt())
        * w.powf((3.0 - 4.0 * delta) / 2.0)
        * factor_c5;
    let c6 = 2.0.powf(delta - 2.0) * l / (PI * (1.0 - delta)) * w.powf(2.0 - 2.0 * delta) * factor_c6;
    let gap = cone.velocity_gap(sym)?;
    let c7 = (cone.band.1 - cone.band.0).sqrt() / ((2.0 * PI).sqrt() * gap);
    let c8 = 1.0 / (2.0 * PI * gap);
    Ok(ConeConstants { delta, l, factor_c5, factor_c6, c5, c6, c7, c8, gap })
}

/// `‖(· - x0) u_f(t0, ·)‖_{L²}` from the spectral side.
pub fn shift_norm_g(sym: &Symbol, prof: &BandProfile, t0: f64, x0: f64) -> Result<f64> {
    let (a, b) = prof.band();
    let i = Complex64::new(0.0, 1.0);
    let sq = integrate_real(
        |p| (prof.damp(p) + i * (x0 - t0 * sym.df(p)) * prof.amp(p)).norm_sqr(),
        a,
        b,
        BAND_TOL,
    )?;
    Ok((sq.max(0.0) / (2.0 * PI)).sqrt())
}

/// Interior `(C5 g + C6 l1)|t-t0|^{-δ}` or exterior `(C7 g + C8 l1)|t-t0|^{-1}`.
pub fn remainder_bound(c: &ConeConstants, g: f64, l1: f64, t: f64, t0: f64, regime: Regime) -> Result<f64> {
    if t == t0 {
        return Err(domain("remainder bound is undefined on the slice t = t0"));
    }
    let dt = (t - t0).abs();
    Ok(match regime {
        Regime::Interior => (c.c5 * g + c.c6 * l1) * dt.powf(-c.delta),
        Regime::Exterior => (c.c7 * g + c.c8 * l1) / dt,
    })
}

/// How an [`OriginResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OriginMethod {
    ClosedForm,
    /// Vertex of a parabola through three spectral-side variances.
    Scan,
    /// Golden-section search on x-space variances.
    GoldenSection,
}

/// Origin `(t*, x*)` minimizing the variance of the packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OriginResult {
    pub t_star: f64,
    pub x_star: f64,
    pub min_variance: f64,
    pub method: OriginMethod,
}

/// Closed-form `(t*, x*)` and the minimal variance.
pub fn optimal_origin(sym: &Symbol, prof: &BandProfile) -> Result<OriginResult> {
    optimal_origin_from(&prof.spectral_moments(sym)?)
}

pub fn optimal_origin_from(sm: &SpectralMoments) -> Result<OriginResult> {
    if !(sm.v_fp > DEGENERATE_VFP) {
        return Err(Error::DegenerateBand(sm.v_fp));
    }
    let t_star = (-sm.cross_im / (2.0 * PI) + sm.m_fp * sm.m1_u0) / sm.v_fp;
    let at = solution_moments_from(sm, t_star);
    Ok(OriginResult { t_star, x_star: at.m1, min_variance: at.v.max(0.0), method: OriginMethod::ClosedForm })
}

/// Mean and variance of `u_f(τ, ·)` from the evolved spectrum `F u0 e^{-iτf}`.
fn evolved_moments(sym: &Symbol, prof: &BandProfile, tau: f64) -> Result<(f64, f64)> {
    let (a, b) = prof.band();
    let i = Complex64::new(0.0, 1.0);
    // Derivative of the evolved spectrum, up to the unimodular factor e^{-iτf}.
    let d = |p: f64| prof.damp(p) - i * tau * sym.df(p) * prof.amp(p);
    let m1 = (i * integrate_smooth(|p| d(p) * prof.amp(p).conj(), a, b, 1e-13)?).re / (2.0 * PI);
    let v = integrate_real(|p| (d(p) + i * m1 * prof.amp(p)).norm_sqr(), a, b, 1e-13)? / (2.0 * PI);
    Ok((m1, v))
}

/// Vertex of the parabola through `(x_k, y_k)`.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> Result<(f64, f64)> {
    let d01 = (y[1] - y[0]) / (x[1] - x[0]);
    let d12 = (y[2] - y[1]) / (x[2] - x[1]);
    let a = (d12 - d01) / (x[2] - x[0]);
    if !(a > 0.0) {
        return Err(Error::DegenerateBand(a));
    }
    let b = d01 - a * (x[0] + x[1]);
    let xv = -b / (2.0 * a);
    let yv = y[0] + (xv - x[0]) * (d01 + a * (xv - x[1]));
    Ok((xv, yv))
}

/// Minimizes `τ ↦ V(u_f(τ, ·))` by fitting the exact quadratic through
/// three spectral-side evaluations at `τ_lo`, the midpoint and `τ_hi`.
pub fn argmin_variance_scan(sym: &Symbol, prof: &BandProfile, tau_lo: f64, tau_hi: f64) -> Result<OriginResult> {
    if !(tau_lo < tau_hi) {
        return Err(domain("scan bracket needs tau_lo < tau_hi"));
    }
    let taus = [tau_lo, 0.5 * (tau_lo + tau_hi), tau_hi];
    let mut vs = [0.0; 3];
    for (v, &tau) in vs.iter_mut().zip(taus.iter()) {
        *v = evolved_moments(sym, prof, tau)?.1;
    }
    let (t_star, min_variance) = parabola_vertex(taus, vs)?;
    let (x_star, _) = evolved_moments(sym, prof, t_star)?;
    Ok(OriginResult { t_star, x_star, min_variance: min_variance.max(0.0), method: OriginMethod::Scan })
}

/// Golden-section search on x-space variances followed by one parabolic step
/// through well-separated points.
pub fn argmin_variance_golden(
    sym: &Symbol,
    prof: &BandProfile,
    tau_lo: f64,
    tau_hi: f64,
    exec: &dyn GridExecutor,
) -> Result<OriginResult> {
    if !(tau_lo < tau_hi) {
        return Err(domain("scan bracket needs tau_lo < tau_hi"));
    }
    let sm = prof.spectral_moments(sym)?;
    let moments_at = |tau: f64| -> Result<(f64, f64)> {
        let (c, w) = solution_window(sym, prof, &sm, tau);
        let field = sample_adaptive(&SolutionSampler::new(sym, prof, tau), exec, tau, c, w, TailCriterion::MOMENTS)?;
        let m = spatial_moments(&field)?;
        Ok((m.m1, m.v))
    };
    let r = 0.5 * (5.0.sqrt() - 1.0);
    let (mut lo, mut hi) = (tau_lo, tau_hi);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut v1 = moments_at(x1)?.1;
    let mut v2 = moments_at(x2)?.1;
    while hi - lo > 0.05 * (tau_hi - tau_lo) {
        if v1 < v2 {
            hi = x2;
            x2 = x1;
            v2 = v1;
            x1 = hi - r * (hi - lo);
            v1 = moments_at(x1)?.1;
        } else {
            lo = x1;
            x1 = x2;
            v1 = v2;
            x2 = lo + r * (hi - lo);
            v2 = moments_at(x2)?.1;
        }
    }
    let c = 0.5 * (lo + hi);
    let h = 0.25 * (tau_hi - tau_lo);
    let xs = [c - h, c, c + h];
    let mut vs = [0.0; 3];
    for (v, &x) in vs.iter_mut().zip(xs.iter()) {
        *v = moments_at(x)?.1;
    }
    let (t_star, min_variance) = parabola_vertex(xs, vs)?;
    let (x_star, _) = moments_at(t_star)?;
    Ok(OriginResult { t_star, x_star, min_variance: min_variance.max(0.0), method: OriginMethod::GoldenSection })
}

/// Exponent of the shifted `L^p - L^{p'}` estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpExponent {
    Two,
    Infinity,
}

/// Both sides of `‖u_S(t)‖_{L^p} ≤ (1/4π)^{-1/2+1/p} ‖u_S(t*)‖_{L^{p'}} |t-t*|^{-1/2+1/p}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `‖u_S(t*)‖_{L^{p'}}`.
    pub dual_norm: f64,
    /// `|t - t*|^{-1/2+1/p}`.
    pub time_factor: f64,
    pub t_star: f64,
}

/// Shifted decay check for the free Schrödinger packet.
pub fn shifted_lp_check(
    sym: &Symbol,
    prof: &BandProfile,
    t: f64,
    p: LpExponent,
    exec: &dyn GridExecutor,
) -> Result<LpCheck> {
    if !matches!(sym, Symbol::FreeSchrodinger) {
        return Err(domain("the shifted L^p estimate is stated for the free Schrodinger symbol"));
    }
    let sm = prof.spectral_moments(sym)?;
    let t_star = optimal_origin_from(&sm)?.t_star;
    if t == t_star {
        return Err(domain("shifted L^p check needs t != t*"));
    }
    let sample = |tau: f64, criterion| -> Result<SampledField> {
        let (c, w) = solution_window(sym, prof, &sm, tau);
        sample_adaptive(&SolutionSampler::new(sym, prof, tau), exec, tau, c, w, criterion)
    };
    let dt = (t - t_star).abs();
    match p {
        LpExponent::Two => {
            let lhs = spatial_moments(&sample(t, TailCriterion::MOMENTS)?)?.mass.sqrt();
            let dual = spatial_moments(&sample(t_star, TailCriterion::MOMENTS)?)?.mass.sqrt();
            Ok(LpCheck { lhs, rhs: dual, dual_norm: dual, time_factor: 1.0, t_star })
        }
        LpExponent::Infinity => {
            let field = sample(t, TailCriterion::MOMENTS)?;
            let lhs = refined_sup(sym, prof, &field)?;
            let dual = sample(t_star, TailCriterion::L1_NORM)?.l1_norm();
            let time_factor = dt.powf(-0.5);
            let rhs = (4.0 * PI).sqrt() * dual * time_factor;
            Ok(LpCheck { lhs, rhs, dual_norm: dual, time_factor, t_star })
        }
    }
}

/// `sup |u|` from the grid maximum polished by golden-section search.
fn refined_sup(sym: &Symbol, prof: &BandProfile, field: &SampledField) -> Result<f64> {
    let (k, grid_max) = field.argmax();
    let dx = field.dx();
    let (mut lo, mut hi) = (field.x(k) - dx, field.x(k) + dx);
    let eval = |x: f64| evaluate_solution(sym, prof, field.t, x, None, SOLUTION_TOL).map(|u| u.norm());
    let r = 0.5 * (5.0.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut g1, mut g2) = (eval(x1)?, eval(x2)?);
    for _ in 0..50 {
        if g1 < g2 {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + r * (hi - lo);
            g2 = eval(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - r * (hi - lo);
            g1 = eval(x1)?;
        }
    }
    Ok(grid_max.max(g1).max(g2))
}

/// Composite Gauss–Legendre discretization of the solution integral for a
/// fixed time, accurate on a bounded spatial window.
pub struct SolutionKernel {
    nodes: Vec<f64>,
    weights: Vec<Complex64>,
    rotations: Vec<Complex64>,
    cached_dx: f64,
}

/// Samples between re-seeding the phase recurrence.
const RESEED: usize = 128;

/// Minimum number of panels over the band.
const MIN_KERNEL_PANELS: usize = 64;

impl SolutionKernel {
    /// Kernel valid for `x ∈ [x_lo, x_hi]`: each panel carries a phase change of at most `π`.
    pub fn new(sym: &Symbol, prof: &BandProfile, t: f64, x_lo: f64, x_hi: f64) -> Self {
        let (p1, p2) = prof.band();
        let mut rate: f64 = 0.0;
        for x in [x_lo, x_hi] {
            for p in [p1, p2] {
                rate = rate.max((x - t * sym.df(p)).abs());
            }
        }
        rate += prof.phase_rate();
        let panels = ((rate * (p2 - p1) / PI).ceil() as usize).max(MIN_KERNEL_PANELS);
        let h = (p2 - p1) / panels as f64;
        let mut nodes = Vec::with_capacity(15 * panels);
        let mut weights = Vec::with_capacity(15 * panels);
        for k in 0..panels {
            let lo = p1 + h * k as f64;
            let hi = if k + 1 == panels { p2 } else { lo + h };
            for (p, w) in panel_nodes(lo, hi) {
                nodes.push(p);
                weights.push(prof.amp(p) * Complex64::from_polar(w / (2.0 * PI), -t * sym.f(p)));
            }
        }
        Self { nodes, weights, rotations: Vec::new(), cached_dx: f64::NAN }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Precomputes `e^{i dx p_j}` for [`GridFn::fill`].
    pub fn with_step(mut self, dx: f64) -> Self {
        self.rotations = self.nodes.iter().map(|&p| Complex64::from_polar(1.0, dx * p)).collect();
        self.cached_dx = dx;
        self
    }
}

impl GridFn for SolutionKernel {
    fn fill(&self, x_start: f64, dx: f64, first: usize, out: &mut [Complex64]) {
        let owned;
        let rot: &[Complex64] = if dx == self.cached_dx {
            &self.rotations
        } else {
            owned = self.nodes.iter().map(|&p| Complex64::from_polar(1.0, dx * p)).collect::<Vec<_>>();
            &owned
        };
        let mut z = alloc::vec![Complex64::new(0.0, 0.0); self.nodes.len()];
        let mut k = 0;
        while k < out.len() {
            // Blocks start at multiples of RESEED counted from index 0.
            let idx = first + k;
            let block_end = (idx / RESEED + 1) * RESEED - first;
            let end = block_end.min(out.len());
            let x = x_start + idx as f64 * dx;
            for ((zj, &p), &w) in z.iter_mut().zip(&self.nodes).zip(&self.weights) {
                *zj = w * Complex64::from_polar(1.0, x * p);
            }
            for slot in &mut out[k..end] {
                let mut acc = Complex64::new(0.0, 0.0);
                for (zj, r) in z.iter_mut().zip(rot) {
                    acc += *zj;
                    *zj *= r;
                }
                *slot = acc;
            }
            k = end;
        }
    }

    fn eval(&self, x: f64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * Complex64::from_polar(1.0, x * p))
            .sum()
    }
}

/// [`FieldSampler`] for `u_f(t, ·)`.
pub struct SolutionSampler<'a> {
    sym: &'a Symbol,
    prof: &'a BandProfile,
    t: f64,
}

impl<'a> SolutionSampler<'a> {
    pub fn new(sym: &'a Symbol, prof: &'a BandProfile, t: f64) -> Self {
        Self { sym, prof, t }
    }
}

impl FieldSampler for SolutionSampler<'_> {
    fn prepare(&self, x_lo: f64, x_hi: f64) -> Result<Box<dyn GridFn + '_>> {
        Ok(Box::new(SolutionKernel::new(self.sym, self.prof, self.t, x_lo, x_hi)))
    }
}

/// [`FieldSampler`] for `H_f(t, ·)`.
pub struct FirstTermSampler<'a> {
    sym: &'a Symbol,
    prof: &'a BandProfile,
    cone: ConeSpec,
    t: f64,
}

impl<'a> FirstTermSampler<'a> {
    pub fn new(sym: &'a Symbol, prof: &'a BandProfile, cone: &ConeSpec, t: f64) -> Result<Self> {
        if t == cone.origin.0 {
            return Err(domain("first term is undefined on the slice t = t0"));
        }
        Ok(Self { sym, prof, cone: *cone, t })
    }
}

impl GridFn for FirstTermSampler<'_> {
    fn fill(&self, x_start: f64, dx: f64, first: usize, out: &mut [Complex64]) {
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.eval(x_start + (first + k) as f64 * dx);
        }
    }

    fn eval(&self, x: f64) -> Complex64 {
        first_term_h(self.sym, self.prof, &self.cone, self.t, x).unwrap_or(Complex64::new(0.0, 0.0))
    }
}

impl FieldSampler for FirstTermSampler<'_> {
    fn prepare(&self, _x_lo: f64, _x_hi: f64) -> Result<Box<dyn GridFn + '_>> {
        Ok(Box::new(FirstTermSampler { sym: self.sym, prof: self.prof, cone: self.cone, t: self.t }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band_profile::{make_profile, Shape};

    fn schrodinger_bump() -> (Symbol, BandProfile) {
        let sym = Symbol::FreeSchrodinger;
        let prof = make_profile(1.0, 2.0, Shape::Bump, &sym).unwrap();
        (sym, prof)
    }

    #[test]
    fn classify_examples() {
        let sym = Symbol::FreeSchrodinger;
        let cone = ConeSpec::new((1.1, 1.9), (1.0, 2.0), (0.0, 0.0)).unwrap();
        match classify_point(&sym, &cone, 10.0, 15.0) {
            Region::InsideCone { p0 } => assert!((p0 - 1.5).abs() < 1e-12),
            r => panic!("{r:?}"),
        }
        assert_eq!(classify_point(&sym, &cone, 10.0, 30.0), Region::OutsideCone);
        assert_eq!(classify_point(&sym, &cone, 0.0, 7.0), Region::OnTimeSlice);
        assert!(matches!(classify_point(&sym, &cone, 10.0, 20.0), Region::InsideCone { .. }));
    }

    #[test]
    fn cone_constant_examples() {
        let cone = ConeSpec::with_padding((1.0, 2.0), 0.1, (0.0, 0.0)).unwrap();
        let c = cone_constants(&Symbol::FreeSchrodinger, &cone, 0.625).unwrap();
        assert_eq!((c.factor_c6, c.c6), (0.0, 0.0));
        assert!((c.c7 - 10.0 / (2.0 * PI).sqrt()).abs() < 1e-12);
        assert!((c.c8 - 10.0 / (2.0 * PI)).abs() < 1e-12);
        let kg = Symbol::klein_gordon(1.0).unwrap();
        let cone = ConeSpec::new((-0.5, 0.5), (-0.7, 0.7), (0.0, 0.0)).unwrap();
        let c = cone_constants(&kg, &cone, 0.625).unwrap();
        for v in [c.c5, c.c6, c.c7, c.c8] {
            assert!(v > 0.0 && v.is_finite());
        }
    }

    #[test]
    fn solution_at_time_zero_is_inverse_transform() {
        let (sym, prof) = schrodinger_bump();
        for x in [-3.0, 0.0, 2.5] {
            let direct = integrate_smooth(|p| prof.amp(p) * Complex64::from_polar(1.0 / (2.0 * PI), x * p), 1.0, 2.0, 1e-14)
                .unwrap();
            let u = evaluate_solution(&sym, &prof, 0.0, x, None, 1e-13).unwrap();
            assert!((u - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn shifted_and_raw_forms_agree() {
        let kg = Symbol::klein_gordon(1.0).unwrap();
        let prof = make_profile(1.0, 2.0, Shape::ChirpedBump { tau: 2.0 }, &kg).unwrap();
        for (t, x) in [(30.0, 25.0), (-12.0, -4.0)] {
            let raw = evaluate_solution(&kg, &prof, t, x, None, 1e-13).unwrap();
            let shifted = evaluate_solution(&kg, &prof, t, x, Some((2.0, 0.5)), 1e-13).unwrap();
            assert!((raw - shifted).norm() < 1e-11);
        }
    }

    #[test]
    fn kernel_matches_adaptive_oracle() {
        let (sym, prof) = schrodinger_bump();
        let t = 7.0;
        let kernel = SolutionKernel::new(&sym, &prof, t, -60.0, 60.0).with_step(0.37);
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); 300];
        kernel.fill(-55.0, 0.37, 0, &mut out);
        for k in (0..300).step_by(17) {
            let x = -55.0 + k as f64 * 0.37;
            let u = evaluate_solution(&sym, &prof, t, x, None, 1e-14).unwrap();
            assert!((out[k] - u).norm() < 1e-12, "x = {x}");
            assert!((kernel.eval(x) - u).norm() < 1e-12);
        }
    }

    #[test]
    fn kernel_fill_is_split_invariant() {
        let (sym, prof) = schrodinger_bump();
        let kernel = SolutionKernel::new(&sym, &prof, 3.0, -40.0, 40.0);
        let mut whole = alloc::vec![Complex64::new(0.0, 0.0); 1000];
        kernel.fill(-40.0, 0.08, 0, &mut whole);
        let mut parts = alloc::vec![Complex64::new(0.0, 0.0); 1000];
        let (a, b) = parts.split_at_mut(256);
        kernel.fill(-40.0, 0.08, 0, a);
        kernel.fill(-40.0, 0.08, 256, b);
        assert_eq!(whole, parts);
    }

    #[test]
    fn first_term_outside_cone_is_zero() {
        let (sym, prof) = schrodinger_bump();
        let cone = ConeSpec::with_padding((1.0, 2.0), 0.1, (0.0, 0.0)).unwrap();
        assert_eq!(first_term_h(&sym, &prof, &cone, 10.0, 40.0).unwrap(), Complex64::new(0.0, 0.0));
        assert!(first_term_h(&sym, &prof, &cone, 0.0, 1.0).is_err());
        let plus = first_term_h(&sym, &prof, &cone, 10.0, 15.0).unwrap();
        let minus = first_term_h(&sym, &prof, &cone, -10.0, -15.0).unwrap();
        // Time reflection conjugates the bump packet.
        assert!((plus - minus.conj()).norm() < 1e-14);
    }

    #[test]
    fn origin_of_real_and_shifted_bumps() {
        let (sym, prof) = schrodinger_bump();
        let o = optimal_origin(&sym, &prof).unwrap();
        assert!(o.t_star.abs() < 1e-10 && o.x_star.abs() < 1e-10);
        let shifted = make_profile(1.0, 2.0, Shape::ShiftedBump { xc: 3.0 }, &sym).unwrap();
        let o = optimal_origin(&sym, &shifted).unwrap();
        assert!(o.t_star.abs() < 1e-9 && (o.x_star - 3.0).abs() < 1e-9);
        let g = shift_norm_g(&sym, &shifted, o.t_star, o.x_star).unwrap();
        assert!((g * g - o.min_variance).abs() < 1e-10);
    }

    #[test]
    fn chirped_bump_refocuses() {
        let sym = Symbol::FreeSchrodinger;
        let prof = make_profile(1.0, 2.0, Shape::ChirpedBump { tau: 2.0 }, &sym).unwrap();
        let o = optimal_origin(&sym, &prof).unwrap();
        assert!((o.t_star - 2.0).abs() < 1e-9);
        let s = argmin_variance_scan(&sym, &prof, -1.0, 5.0).unwrap();
        assert!((s.t_star - o.t_star).abs() < 1e-9);
        assert!((s.x_star - o.x_star).abs() < 1e-9);
        assert!((s.min_variance - o.min_variance).abs() < 1e-9);
    }

    #[test]
    fn remainder_bound_scaling() {
        let cone = ConeSpec::with_padding((1.0, 2.0), 0.1, (0.0, 0.0)).unwrap();
        let c = cone_constants(&Symbol::FreeSchrodinger, &cone, 0.625).unwrap();
        let b1 = remainder_bound(&c, 3.0, 4.0, 10.0, 0.0, Regime::Interior).unwrap();
        let b2 = remainder_bound(&c, 3.0, 4.0, 20.0, 0.0, Regime::Interior).unwrap();
        assert!((b2 / b1 - 2f64.powf(-0.625)).abs() < 1e-14);
        assert!(remainder_bound(&c, 3.0, 4.0, 0.0, 0.0, Regime::Exterior).is_err());
    }
}
