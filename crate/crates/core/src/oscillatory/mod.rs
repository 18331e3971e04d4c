//! Quadrature of smooth and oscillatory integrands over compact bands.
//!
//! [`integrate_smooth`] is an adaptive Gauss–Legendre scheme (15-point rule,
//! recursive bisection). [`oscillatory_integral`] first cuts the band into
//! panels on which the phase `ω ψ` moves by at most `π/2`, then runs the
//! adaptive scheme on every panel. Panel results are combined by pairwise
//! summation in index order, so outputs are reproducible bit for bit.

mod gauss;

pub(crate) use gauss::panel_nodes;

use alloc::format;
use core::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, Error, Result};

/// Maximum bisection depth of the adaptive scheme.
pub const MAX_DEPTH: u32 = 40;

/// Panel count above which an [`OscillatoryResult`] carries a cost warning.
pub const COST_WARNING_PANELS: usize = 1_000_000;

/// Hard cap on the number of phase panels.
pub const MAX_PANELS: usize = 50_000_000;

/// Scan resolution used to bound `|ψ'|` on the band.
const SLOPE_SCAN: usize = 1024;

/// Integral value together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

/// Adaptive Gauss–Legendre quadrature of `g` over `[a, b]`.
///
/// The returned value has estimated absolute error below `tol` (or below a
/// roundoff floor proportional to the magnitude of the integrand).
pub fn integrate_smooth<G>(g: G, a: f64, b: f64, tol: f64) -> Result<Complex64>
where
    G: Fn(f64) -> Complex64,
{
    integrate_with_error(&g, a, b, tol).map(|e| e.value)
}

/// Real-valued convenience wrapper around [`integrate_smooth`].
pub fn integrate_real<G>(g: G, a: f64, b: f64, tol: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    integrate_with_error(&|p: f64| Complex64::new(g(p), 0.0), a, b, tol).map(|e| e.value.re)
}

/// Same as [`integrate_smooth`] but also reports the error estimate.
pub fn integrate_with_error<G>(g: &G, a: f64, b: f64, tol: f64) -> Result<Estimate>
where
    G: Fn(f64) -> Complex64 + ?Sized,
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(domain("integration bounds must satisfy a < b and be finite"));
    }
    if !(tol > 0.0) {
        return Err(domain("tolerance must be positive"));
    }
    let whole = gauss::rule(g, a, b);
    refine(g, a, b, whole, tol, 1.0, 0)
}

/// Bisection refinement. Integrand values are trusted to a relative
/// `noise · ε`, which sets the floor below which `tol` is not pursued.
fn refine<G>(g: &G, a: f64, b: f64, whole: Complex64, tol: f64, noise: f64, depth: u32) -> Result<Estimate>
where
    G: Fn(f64) -> Complex64 + ?Sized,
{
    let mid = 0.5 * (a + b);
    let left = gauss::rule(g, a, mid);
    let right = gauss::rule(g, mid, b);
    let halves = left + right;
    let err = (halves - whole).norm();
    let floor = 64.0 * noise * f64::EPSILON * (left.norm() + right.norm());
    if err <= tol.max(floor) {
        return Ok(Estimate { value: halves, error: err });
    }
    if depth + 1 >= MAX_DEPTH || mid <= a || mid >= b {
        return Err(Error::Accuracy(format!(
            "adaptive quadrature hit depth {} on [{a}, {b}] (estimate {err:e}, target {tol:e})",
            depth + 1
        )));
    }
    let l = refine(g, a, mid, left, 0.5 * tol, noise, depth + 1)?;
    let r = refine(g, mid, b, right, 0.5 * tol, noise, depth + 1)?;
    Ok(Estimate { value: l.value + r.value, error: l.error + r.error })
}

/// A band-limited oscillatory integral `∫ U(p) e^{iωψ(p)} dp` over `[p1, p2]`.
pub struct OscillatoryJob<'a> {
    pub amplitude: &'a dyn Fn(f64) -> Complex64,
    pub phase: &'a dyn Fn(f64) -> f64,
    pub phase_slope: &'a dyn Fn(f64) -> f64,
    pub omega: f64,
    pub band: (f64, f64),
    pub tol: f64,
}

impl<'a> OscillatoryJob<'a> {
    pub fn new(
        amplitude: &'a dyn Fn(f64) -> Complex64,
        phase: &'a dyn Fn(f64) -> f64,
        phase_slope: &'a dyn Fn(f64) -> f64,
        omega: f64,
        band: (f64, f64),
        tol: f64,
    ) -> Result<Self> {
        let job = Self { amplitude, phase, phase_slope, omega, band, tol };
        job.validate()?;
        Ok(job)
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(domain("oscillatory job needs tol > 0"));
        }
        // ω = 0 is accepted and degenerates to plain quadrature.
        if !(self.omega >= 0.0) || !self.omega.is_finite() {
            return Err(domain("oscillatory job needs a finite omega >= 0"));
        }
        if !(self.band.0 < self.band.1) {
            return Err(domain("oscillatory job needs p1 < p2"));
        }
        Ok(())
    }
}

/// Result of [`oscillatory_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatoryResult {
    pub value: Complex64,
    pub error: f64,
    pub panels: usize,
    pub cost_warning: bool,
}

/// Phase-resolved quadrature of an [`OscillatoryJob`].
pub fn oscillatory_integral(job: &OscillatoryJob<'_>) -> Result<OscillatoryResult> {
    job.validate()?;
    let (a, b) = job.band;
    let slope = max_abs_slope(job.phase_slope, a, b);
    let rate = job.omega * slope;
    let panels_f = (rate * (b - a) / FRAC_PI_2).ceil().max(1.0);
    if !panels_f.is_finite() || panels_f > MAX_PANELS as f64 {
        return Err(Error::Accuracy(format!(
            "oscillatory integral needs {panels_f:e} panels (cap {MAX_PANELS})"
        )));
    }
    let panels = panels_f as usize;
    let width = (b - a) / panels as f64;
    let panel_tol = job.tol / panels as f64;
    let omega = job.omega;
    let integrand = |p: f64| {
        let theta = omega * (job.phase)(p);
        (job.amplitude)(p) * Complex64::new(theta.cos(), theta.sin())
    };
    // Rounding of p and of the terms of ψ perturbs ωψ by about ω(|ψ| + |pψ'|) ε.
    let noise = |p: f64| 1.0 + omega * ((job.phase)(p).abs() + (p * (job.phase_slope)(p)).abs());
    let est = sum_panels(&integrand, &noise, a, b, width, panels, 0, panels, panel_tol)?;
    Ok(OscillatoryResult {
        value: est.value,
        error: est.error,
        panels,
        cost_warning: panels > COST_WARNING_PANELS,
    })
}

#[allow(clippy::too_many_arguments)]
fn sum_panels<G, N>(
    g: &G,
    noise: &N,
    a: f64,
    b: f64,
    width: f64,
    panels: usize,
    lo: usize,
    hi: usize,
    tol: f64,
) -> Result<Estimate>
where
    G: Fn(f64) -> Complex64,
    N: Fn(f64) -> f64,
{
    if hi - lo == 1 {
        let left = a + width * lo as f64;
        let right = if hi == panels { b } else { a + width * hi as f64 };
        let whole = gauss::rule(g, left, right);
        return refine(g, left, right, whole, tol, noise(left).max(noise(right)), 0);
    }
    let mid = lo + (hi - lo) / 2;
    let l = sum_panels(g, noise, a, b, width, panels, lo, mid, tol)?;
    let r = sum_panels(g, noise, a, b, width, panels, mid, hi, tol)?;
    Ok(Estimate { value: l.value + r.value, error: l.error + r.error })
}

/// Upper estimate of `sup |ψ'|` on `[a, b]` from a dense scan, with a 5% margin.
fn max_abs_slope(slope: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mut m = slope(a).abs().max(slope(b).abs());
    let h = (b - a) / SLOPE_SCAN as f64;
    for k in 1..SLOPE_SCAN {
        m = m.max(slope(a + h * k as f64).abs());
    }
    1.05 * m
}

/// Pairwise summation of a slice, in index order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        return values.iter().sum();
    }
    let (l, r) = values.split_at(values.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}
