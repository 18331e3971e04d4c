//! One-term stationary phase expansions with explicit remainder constants.
//!
//! The building blocks are the diffeomorphisms `φ_j` that straighten a concave
//! phase into `-s²` on each side of its stationary point, and the contour
//! primitive `φ(s, ω)` of `e^{-iωs²}`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use num_traits::Float;

use crate::band_profile::BandProfile;
use crate::error::{domain, Error, Result};
use crate::oscillatory::{integrate_real, oscillatory_integral, panel_nodes, OscillatoryJob};
use crate::symbols::{increasing_root, scan_max, Symbol};

/// Grid size for `‖U‖_∞`.
pub const SUP_GRID: usize = 8192;

/// Inflation applied to the grid maximum of `|U|`.
pub const SUP_SAFETY: f64 = 1.01;

/// Default exponent `δ`.
pub const DEFAULT_DELTA: f64 = 0.625;

/// A real phase with three derivatives.
pub trait Phase {
    fn value(&self, p: f64) -> f64;
    fn d1(&self, p: f64) -> f64;
    fn d2(&self, p: f64) -> f64;
    fn d3(&self, p: f64) -> f64;

    /// `sup |ψ''|`, `min(-ψ'')` and `sup |ψ'''|` over `[a, b]`.
    fn curvature_bounds(&self, a: f64, b: f64) -> CurvatureBounds {
        CurvatureBounds {
            sup_abs_d2: scan_max(&|p| self.d2(p).abs(), a, b),
            min_neg_d2: -scan_max(&|p| self.d2(p), a, b),
            sup_abs_d3: scan_max(&|p| self.d3(p).abs(), a, b),
        }
    }
}

/// Extrema of the phase curvature over the padded band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureBounds {
    pub sup_abs_d2: f64,
    pub min_neg_d2: f64,
    pub sup_abs_d3: f64,
}

/// `ψ(p) = v p - f(p)`, the phase of a wave packet seen along the ray `x/t = v`.
#[derive(Debug, Clone)]
pub struct ShiftedPhase {
    pub symbol: Symbol,
    pub velocity: f64,
}

impl ShiftedPhase {
    pub fn new(symbol: Symbol, velocity: f64) -> Self {
        Self { symbol, velocity }
    }
}

impl Phase for ShiftedPhase {
    fn value(&self, p: f64) -> f64 {
        self.velocity * p - self.symbol.f(p)
    }
    fn d1(&self, p: f64) -> f64 {
        self.velocity - self.symbol.df(p)
    }
    fn d2(&self, p: f64) -> f64 {
        -self.symbol.d2f(p)
    }
    fn d3(&self, p: f64) -> f64 {
        -self.symbol.d3f(p)
    }
    fn curvature_bounds(&self, a: f64, b: f64) -> CurvatureBounds {
        match self.symbol.band_extrema(a, b) {
            Ok(e) => CurvatureBounds {
                sup_abs_d2: e.sup_d2f,
                min_neg_d2: e.inf_d2f,
                sup_abs_d3: e.sup_abs_d3f,
            },
            Err(Error::Convexity { inf_d2f, .. }) => CurvatureBounds {
                sup_abs_d2: f64::NAN,
                min_neg_d2: inf_d2f,
                sup_abs_d3: f64::NAN,
            },
            Err(_) => CurvatureBounds { sup_abs_d2: f64::NAN, min_neg_d2: f64::NAN, sup_abs_d3: f64::NAN },
        }
    }
}

/// Polynomial phase `Σ c_k p^k` with coefficients in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialPhase {
    pub coeffs: Vec<f64>,
}

impl PolynomialPhase {
    pub fn new(coeffs: &[f64]) -> Self {
        Self { coeffs: coeffs.to_vec() }
    }

    fn eval_deriv(&self, p: f64, order: u32) -> f64 {
        let mut acc = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate().skip(order as usize).rev() {
            let falling: f64 = (0..order).map(|j| (k as u32 - j) as f64).product();
            acc = acc * p + c * falling;
        }
        acc
    }
}

impl Phase for PolynomialPhase {
    fn value(&self, p: f64) -> f64 {
        self.eval_deriv(p, 0)
    }
    fn d1(&self, p: f64) -> f64 {
        self.eval_deriv(p, 1)
    }
    fn d2(&self, p: f64) -> f64 {
        self.eval_deriv(p, 2)
    }
    fn d3(&self, p: f64) -> f64 {
        self.eval_deriv(p, 3)
    }
}

/// A strictly concave phase on a padded band, with its stationary point if any.
#[derive(Debug, Clone)]
pub struct PhaseData<P: Phase> {
    pub phase: P,
    pub p0: Option<f64>,
    pub padded_band: (f64, f64),
    pub bounds: CurvatureBounds,
}

impl<P: Phase> PhaseData<P> {
    /// Validates concavity on `padded_band` and locates the stationary point
    /// when `p0` is not supplied.
    pub fn new(phase: P, padded_band: (f64, f64), p0: Option<f64>) -> Result<Self> {
        let (a, b) = padded_band;
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(domain("padded band needs finite a < b"));
        }
        let bounds = phase.curvature_bounds(a, b);
        if !(bounds.min_neg_d2 > 0.0) || !bounds.sup_abs_d2.is_finite() || !bounds.sup_abs_d3.is_finite() {
            return Err(Error::Concavity(-bounds.min_neg_d2));
        }
        let p0 = match p0 {
            Some(p) => {
                if !(p > a && p < b) {
                    return Err(domain("stationary point must lie inside the padded band"));
                }
                if phase.d1(p).abs() >= 1e-10 {
                    return Err(domain("supplied p0 is not a stationary point"));
                }
                Some(p)
            }
            None => locate_stationary_point(&phase, a, b)?,
        };
        Ok(Self { phase, p0, padded_band, bounds })
    }

    fn require_p0(&self) -> Result<f64> {
        self.p0.ok_or_else(|| domain("phase has no stationary point in the padded band"))
    }
}

fn locate_stationary_point<P: Phase>(phase: &P, a: f64, b: f64) -> Result<Option<f64>> {
    let (da, db) = (phase.d1(a), phase.d1(b));
    if !(da > 0.0 && db < 0.0) {
        return Ok(None);
    }
    let p = increasing_root(&|p| -phase.d1(p), &|p| -phase.d2(p), 0.0, a, b, 1e-13)?;
    Ok(if p > a && p < b { Some(p) } else { None })
}

/// Side of the stationary point: `I_1 = [p̃1, p0]` or `I_2 = [p0, p̃2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }
}

/// Mean of `w(s) (-ψ'')(p0 + s(p - p0))` over `s ∈ [0, 1]`.
fn weighted_curvature<P: Phase>(phase: &P, p0: f64, p: f64, w: impl Fn(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for k in 0..4 {
        let (lo, hi) = (k as f64 / 4.0, (k + 1) as f64 / 4.0);
        for (s, wt) in panel_nodes(lo, hi) {
            acc += wt * w(s) * -phase.d2(p0 + s * (p - p0));
        }
    }
    acc
}

/// `φ_j(p) = (ψ(p0) - ψ(p))^{1/2}` and its derivative on `I_j`.
///
/// Both are evaluated through the Taylor remainder representation
/// `ψ(p0) - ψ(p) = (p - p0)² ∫_0^1 (1-s)(-ψ'')(p0 + s(p-p0)) ds`, which avoids
/// cancellation near `p0`.
pub fn phase_diffeo<P: Phase>(ph: &PhaseData<P>, side: Side, p: f64) -> Result<(f64, f64)> {
    let p0 = ph.require_p0()?;
    let (a, b) = ph.padded_band;
    let inside = match side {
        Side::Left => p >= a && p <= p0,
        Side::Right => p >= p0 && p <= b,
    };
    if !inside {
        return Err(domain("point lies outside the requested side of p0"));
    }
    let sign = side.sign();
    if p == p0 {
        return Ok((0.0, sign * (-ph.phase.d2(p0) / 2.0).sqrt()));
    }
    let d = weighted_curvature(&ph.phase, p0, p, |s| 1.0 - s);
    let mean = weighted_curvature(&ph.phase, p0, p, |_| 1.0);
    let root = d.sqrt();
    Ok((sign * (p - p0) * root, sign * mean / (2.0 * root)))
}

/// Inverse of `φ_j`: the `p ∈ I_j` with `φ_j(p) = s`.
pub fn phase_diffeo_inverse<P: Phase>(ph: &PhaseData<P>, side: Side, s: f64) -> Result<f64> {
    let p0 = ph.require_p0()?;
    let (a, b) = ph.padded_band;
    let phi = |p: f64| phase_diffeo(ph, side, p).map(|v| v.0).unwrap_or(f64::NAN);
    let dphi = |p: f64| phase_diffeo(ph, side, p).map(|v| v.1).unwrap_or(f64::NAN);
    let tol = 1e-14 * s.abs().max(1.0);
    match side {
        Side::Right => {
            let top = phi(b);
            if !(s >= 0.0 && s <= top) {
                return Err(Error::Range { v: s, lo: 0.0, hi: top });
            }
            increasing_root(&phi, &dphi, s, p0, b, tol)
        }
        Side::Left => {
            let top = phi(a);
            if !(s >= 0.0 && s <= top) {
                return Err(Error::Range { v: s, lo: 0.0, hi: top });
            }
            increasing_root(&|p| -phi(p), &|p| -dphi(p), -s, a, p0, tol)
        }
    }
}

/// Uniform bounds on the straightening diffeomorphisms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffeoBounds {
    /// Lower bound on `|φ_j'|`.
    pub dphi_lower: f64,
    /// Upper bound on `|(φ_j^{-1})''|`.
    pub inverse_d2_upper: f64,
}

pub fn diffeo_bounds<P: Phase>(ph: &PhaseData<P>) -> DiffeoBounds {
    let CurvatureBounds { sup_abs_d2: big_m, min_neg_d2: m, sup_abs_d3: t } = ph.bounds;
    DiffeoBounds {
        dphi_lower: m / (2.0 * big_m).sqrt(),
        inverse_d2_upper: big_m.powf(1.5) * t * m.powf(-3.5)
            + big_m.powf(2.5) * t * m.powf(-4.5) / 3.0,
    }
}

/// `φ(s, ω) = -∫_{Λ(s)} e^{-iωz²} dz` along `z = s + t e^{-iπ/4}`, `t ≥ 0`.
pub fn fresnel_primitive(s: f64, omega: f64) -> Result<Complex64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(domain("fresnel primitive needs finite s >= 0"));
    }
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(domain("fresnel primitive needs finite omega > 0"));
    }
    let r2 = 2.0.sqrt();
    // The integrand modulus e^{-√2ωst - ωt²} is below e^{-40} past either cut.
    let mut t_max = (40.0 / omega).sqrt();
    if s > 0.0 {
        t_max = t_max.min(40.0 / (r2 * omega * s));
    }
    let amp = |t: f64| Complex64::new((-r2 * omega * s * t - omega * t * t).exp(), 0.0);
    let phase = |t: f64| -r2 * s * t;
    let slope = |_t: f64| -r2 * s;
    let tol = 1e-15 * omega.powf(-0.5);
    let job = OscillatoryJob::new(&amp, &phase, &slope, omega, (0.0, t_max), tol)?;
    let tail = oscillatory_integral(&job)?.value;
    let rot = Complex64::from_polar(1.0, -FRAC_PI_4 - omega * s * s);
    Ok(-rot * tail)
}

/// `L(δ) = (√π/2)(1/(2√π) + √(1/(4π) + 1/2))^{2δ-1}`, for `δ ∈ [1/2, 1)`.
pub fn l_delta(delta: f64) -> Result<f64> {
    if !(delta >= 0.5 && delta < 1.0) {
        return Err(domain("L(delta) needs delta in [1/2, 1)"));
    }
    let sp = PI.sqrt();
    let base = 1.0 / (2.0 * sp) + (1.0 / (4.0 * PI) + 0.5).sqrt();
    Ok(0.5 * sp * base.powf(2.0 * delta - 1.0))
}

fn check_expansion_delta(delta: f64) -> Result<()> {
    if !(delta > 0.5 && delta < 0.75) {
        return Err(domain("delta must lie in (1/2, 3/4)"));
    }
    Ok(())
}

/// Remainder constants of the one-term expansions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionConstants {
    pub delta: f64,
    pub l: f64,
    pub factor_c1: f64,
    pub factor_c2: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: Option<f64>,
    pub c4: Option<f64>,
}

/// `C1`, `C2` for a phase with an interior stationary point.
pub fn interior_constants<P: Phase>(ph: &PhaseData<P>, delta: f64) -> Result<ExpansionConstants> {
    check_expansion_delta(delta)?;
    let l = l_delta(delta)?;
    let CurvatureBounds { sup_abs_d2: big_m, min_neg_d2: m, sup_abs_d3: t } = ph.bounds;
    let w = ph.padded_band.1 - ph.padded_band.0;
    let factor_c1 = big_m.powf(1.5 - delta) * m.powf(-1.5);
    let factor_c2 = big_m.powf(2.5 - delta) * t * m.powf(-3.5)
        + big_m.powf(3.5 - delta) * t * m.powf(-4.5) / 3.0;
    let c1 = 2.0.powf(delta + 1.0) * l / (3.0 - 4.0 * delta).sqrt()
        * w.powf((3.0 - 4.0 * delta) / 2.0)
        * factor_c1;
    let c2 = 2.0.powf(delta - 1.0) * l / (1.0 - delta) * w.powf(2.0 - 2.0 * delta) * factor_c2;
    Ok(ExpansionConstants { delta, l, factor_c1, factor_c2, c1, c2, c3: None, c4: None })
}

/// `(C3, C4)` for a phase without stationary point on `[p1, p2]`.
pub fn exterior_constants(dpsi: &dyn Fn(f64) -> f64, p1: f64, p2: f64) -> Result<(f64, f64)> {
    if !(p1 < p2) {
        return Err(domain("exterior constants need p1 < p2"));
    }
    let (d1, d2) = (dpsi(p1), dpsi(p2));
    let m = d1.abs().min(d2.abs());
    if !(d1 * d2 > 0.0) || !(m > 0.0) {
        return Err(Error::StationaryPointInBand { p1, p2 });
    }
    Ok(((p2 - p1).sqrt() / m, 1.0 / m))
}

/// A `C¹` amplitude supported in a compact interval.
pub trait Amplitude {
    fn value(&self, p: f64) -> Complex64;
    fn deriv(&self, p: f64) -> Complex64;
    fn support(&self) -> (f64, f64);
}

impl Amplitude for BandProfile {
    fn value(&self, p: f64) -> Complex64 {
        self.amp(p)
    }
    fn deriv(&self, p: f64) -> Complex64 {
        self.damp(p)
    }
    fn support(&self) -> (f64, f64) {
        self.band()
    }
}

/// Amplitude given by a pair of closures.
pub struct FnAmplitude<V, D> {
    pub value: V,
    pub deriv: D,
    pub support: (f64, f64),
}

impl<V, D> Amplitude for FnAmplitude<V, D>
where
    V: Fn(f64) -> Complex64,
    D: Fn(f64) -> Complex64,
{
    fn value(&self, p: f64) -> Complex64 {
        (self.value)(p)
    }
    fn deriv(&self, p: f64) -> Complex64 {
        (self.deriv)(p)
    }
    fn support(&self) -> (f64, f64) {
        self.support
    }
}

/// `‖U'‖_{L²}` and a safe upper estimate of `‖U‖_{L∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeNorms {
    pub l2_deriv: f64,
    pub sup: f64,
}

pub fn amplitude_norms<A: Amplitude + ?Sized>(u: &A) -> Result<AmplitudeNorms> {
    let (a, b) = u.support();
    let l2 = integrate_real(|p| u.deriv(p).norm_sqr(), a, b, 1e-13)?.max(0.0).sqrt();
    let h = (b - a) / SUP_GRID as f64;
    let sup = (0..=SUP_GRID).map(|k| u.value(a + h * k as f64).norm()).fold(0.0, f64::max);
    Ok(AmplitudeNorms { l2_deriv: l2, sup: SUP_SAFETY * sup })
}

/// `√(2π) e^{-iπ/4} e^{iωψ(p0)} U(p0) / √(-ψ''(p0)) ω^{-1/2}`.
pub fn first_term<P: Phase, A: Amplitude + ?Sized>(u: &A, ph: &PhaseData<P>, omega: f64) -> Result<Complex64> {
    let p0 = ph.require_p0()?;
    if !(omega > 0.0) {
        return Err(domain("first term needs omega > 0"));
    }
    let d2 = ph.phase.d2(p0);
    if !(d2 < 0.0) {
        return Err(Error::Concavity(d2));
    }
    let u0 = u.value(p0);
    if u0 == Complex64::new(0.0, 0.0) {
        return Ok(u0);
    }
    let rot = Complex64::from_polar(1.0, omega * ph.phase.value(p0) - FRAC_PI_4);
    Ok(rot * u0 * ((2.0 * PI) / (-d2 * omega)).sqrt())
}

/// First term together with its certified remainder bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expansion {
    pub approx: Complex64,
    pub bound: f64,
    pub constants: ExpansionConstants,
    pub norms: AmplitudeNorms,
}

pub fn expand_with_bound<P: Phase, A: Amplitude + ?Sized>(
    u: &A,
    ph: &PhaseData<P>,
    omega: f64,
    delta: f64,
) -> Result<Expansion> {
    let (a, b) = u.support();
    let (pa, pb) = ph.padded_band;
    if !(pa < a && b < pb) {
        return Err(domain("amplitude support must lie strictly inside the padded band"));
    }
    let constants = interior_constants(ph, delta)?;
    let norms = amplitude_norms(u)?;
    let approx = first_term(u, ph, omega)?;
    let bound = (constants.c1 * norms.l2_deriv + constants.c2 * norms.sup) * omega.powf(-delta);
    Ok(Expansion { approx, bound, constants, norms })
}

/// `(C3 ‖U'‖₂ + C4 ‖U‖_∞)/ω` for a phase without stationary point on the support.
pub fn exterior_bound<A: Amplitude + ?Sized>(u: &A, dpsi: &dyn Fn(f64) -> f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(domain("exterior bound needs omega > 0"));
    }
    let (a, b) = u.support();
    let (c3, c4) = exterior_constants(dpsi, a, b)?;
    let n = amplitude_norms(u)?;
    Ok((c3 * n.l2_deriv + c4 * n.sup) / omega)
}
