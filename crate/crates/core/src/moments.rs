//! Spatial moments of wave packets: x-space quadrature and closed forms.
//!
//! Fields are sampled on uniform grids whose window grows until the tails are
//! negligible. `|u_f(t, ·)|²` is band limited, so the trapezoid sum on such a
//! grid is exact up to truncation and roundoff.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::band_profile::{BandProfile, SpectralMoments};
use crate::error::{domain, Error, Result};
use crate::oscillatory::pairwise_sum;
use crate::symbols::Symbol;
use crate::wavepacket::{ConeSpec, FirstTermSampler, SolutionSampler};

/// Initial number of grid points.
pub const MIN_POINTS: usize = 1 << 12;

/// Largest grid the window doubling may reach.
pub const MAX_POINTS: usize = 1 << 20;

/// Fraction of the window treated as its core when auditing tails.
pub const CORE_FRACTION: f64 = 0.8;

/// A field evaluable on uniform grids.
pub trait GridFn: Sync {
    /// `out[k] = field(x_start + (first + k) dx)`.
    fn fill(&self, x_start: f64, dx: f64, first: usize, out: &mut [Complex64]);
    fn eval(&self, x: f64) -> Complex64;
}

/// Produces a [`GridFn`] accurate on a given spatial window.
pub trait FieldSampler: Sync {
    fn prepare(&self, x_lo: f64, x_hi: f64) -> Result<Box<dyn GridFn + '_>>;
}

/// Strategy for filling a grid; implementations must give results independent
/// of scheduling.
pub trait GridExecutor: Sync {
    fn fill(&self, f: &dyn GridFn, x_start: f64, dx: f64, first: usize, out: &mut [Complex64]);
}

/// Single-threaded [`GridExecutor`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl GridExecutor for Serial {
    fn fill(&self, f: &dyn GridFn, x_start: f64, dx: f64, first: usize, out: &mut [Complex64]) {
        f.fill(x_start, dx, first, out);
    }
}

/// Samples of a spatial profile at time `t` on `x_lo + k dx`, `k < n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    pub t: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub values: Vec<Complex64>,
}

/// Mean, second moment and variance of `|u|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub m1: f64,
    pub m2: f64,
    pub v: f64,
    pub mass: f64,
}

/// When a sampled window is wide enough.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailCriterion {
    /// Mass and centred second moment outside the core below the given fractions.
    Moments { mass: f64, second: f64 },
    /// `∫|u|` outside the core below the given fraction.
    L1(f64),
}

impl TailCriterion {
    /// Defaults used by the moment oracles.
    pub const MOMENTS: TailCriterion = TailCriterion::Moments { mass: 1e-10, second: 1e-9 };
    pub const L1_NORM: TailCriterion = TailCriterion::L1(1e-8);
}

impl SampledField {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn dx(&self) -> f64 {
        (self.x_hi - self.x_lo) / self.n() as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        self.x_lo + k as f64 * self.dx()
    }

    fn center(&self) -> f64 {
        0.5 * (self.x_lo + self.x_hi)
    }

    /// Fractions of mass, centred second moment and `L¹` mass outside the core.
    pub fn tail_fractions(&self) -> (f64, f64, f64) {
        let c = self.center();
        let half = 0.5 * (self.x_hi - self.x_lo) * CORE_FRACTION;
        let (mut m_in, mut m_out, mut s_in, mut s_out, mut a_in, mut a_out) =
            (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (k, u) in self.values.iter().enumerate() {
            let xi = self.x(k) - c;
            let w = u.norm_sqr();
            if xi.abs() > half {
                m_out.push(w);
                s_out.push(xi * xi * w);
                a_out.push(u.norm());
            } else {
                m_in.push(w);
                s_in.push(xi * xi * w);
                a_in.push(u.norm());
            }
        }
        let frac = |o: &[f64], i: &[f64]| {
            let (o, i) = (pairwise_sum(o), pairwise_sum(i));
            if o + i > 0.0 {
                o / (o + i)
            } else {
                0.0
            }
        };
        (frac(&m_out, &m_in), frac(&s_out, &s_in), frac(&a_out, &a_in))
    }

    fn tails_ok(&self, criterion: TailCriterion) -> bool {
        let (mass, second, l1) = self.tail_fractions();
        match criterion {
            TailCriterion::Moments { mass: mt, second: st } => mass < mt && second < st,
            TailCriterion::L1(lt) => l1 < lt,
        }
    }

    /// `∫ |u| dx` by the trapezoid sum.
    pub fn l1_norm(&self) -> f64 {
        let a: Vec<f64> = self.values.iter().map(|u| u.norm()).collect();
        pairwise_sum(&a) * self.dx()
    }

    /// Largest sample modulus and its index.
    pub fn argmax(&self) -> (usize, f64) {
        let mut best = (0, 0.0);
        for (k, u) in self.values.iter().enumerate() {
            let m = u.norm();
            if m > best.1 {
                best = (k, m);
            }
        }
        best
    }
}

/// Samples `sampler` on a window centred at `center`, starting from half-width
/// `half_width` with [`MIN_POINTS`] points and doubling window and point count
/// together until `criterion` holds.
pub fn sample_adaptive(
    sampler: &dyn FieldSampler,
    exec: &dyn GridExecutor,
    t: f64,
    center: f64,
    half_width: f64,
    criterion: TailCriterion,
) -> Result<SampledField> {
    if !(half_width > 0.0) || !half_width.is_finite() || !center.is_finite() {
        return Err(domain("sampling window must be finite and non-empty"));
    }
    let mut n = MIN_POINTS;
    let dx = 2.0 * half_width / n as f64;
    let x_lo = center - half_width;
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    let f = sampler.prepare(x_lo, x_lo + n as f64 * dx)?;
    exec.fill(&*f, x_lo, dx, 0, &mut values);
    drop(f);
    let mut field = SampledField { t, x_lo, x_hi: x_lo + n as f64 * dx, values };
    loop {
        if field.tails_ok(criterion) {
            return Ok(field);
        }
        if 2 * n > MAX_POINTS {
            let (m, s, a) = field.tail_fractions();
            return Err(Error::Accuracy(format!(
                "window of {n} points still has tails (mass {m:e}, second moment {s:e}, l1 {a:e})"
            )));
        }
        let quarter = n / 2;
        let new_lo = center - (n as f64) * dx;
        let new_n = 2 * n;
        let new_hi = new_lo + new_n as f64 * dx;
        let f = sampler.prepare(new_lo, new_hi)?;
        let mut values = vec![Complex64::new(0.0, 0.0); new_n];
        values[quarter..quarter + n].copy_from_slice(&field.values);
        exec.fill(&*f, new_lo, dx, 0, &mut values[..quarter]);
        exec.fill(&*f, new_lo, dx, quarter + n, &mut values[quarter + n..]);
        drop(f);
        n = new_n;
        field = SampledField { t, x_lo: new_lo, x_hi: new_hi, values };
    }
}

/// Moments of `|field|²` by trapezoid quadrature, normalized by the mass.
pub fn spatial_moments(field: &SampledField) -> Result<MomentReport> {
    if !(field.x_lo < field.x_hi) || field.values.is_empty() {
        return Err(domain("sampled field needs a non-empty window"));
    }
    let dx = field.dx();
    let c = field.center();
    let w: Vec<f64> = field.values.iter().map(|u| u.norm_sqr()).collect();
    let mass = pairwise_sum(&w) * dx;
    if !(mass >= 1e-6) {
        return Err(Error::EmptyField(mass));
    }
    let first: Vec<f64> = w.iter().enumerate().map(|(k, w)| (field.x(k) - c) * w).collect();
    let shift = pairwise_sum(&first) * dx / mass;
    let second: Vec<f64> = w
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let d = field.x(k) - c - shift;
            d * d * w
        })
        .collect();
    let v = pairwise_sum(&second) * dx / mass;
    let m1 = c + shift;
    Ok(MomentReport { m1, m2: v + m1 * m1, v, mass })
}

/// Initial window for `u_f(t, ·)`: centred at the closed-form mean, half-width
/// `12 √V + (f'(p2) - f'(p1)) |t|`.
pub fn solution_window(sym: &Symbol, prof: &BandProfile, sm: &SpectralMoments, t: f64) -> (f64, f64) {
    let closed = solution_moments_from(sm, t);
    let (p1, p2) = prof.band();
    let spread = (sym.df(p2) - sym.df(p1)).abs();
    (closed.m1, 12.0 * closed.v.max(0.0).sqrt() + spread * t.abs())
}

/// Samples `u_f(t, ·)` until the moment tail criterion holds.
pub fn sample_solution(
    sym: &Symbol,
    prof: &BandProfile,
    t: f64,
    exec: &dyn GridExecutor,
) -> Result<SampledField> {
    let sm = prof.spectral_moments(sym)?;
    let (c, w) = solution_window(sym, prof, &sm, t);
    sample_adaptive(&SolutionSampler::new(sym, prof, t), exec, t, c, w, TailCriterion::MOMENTS)
}

/// `‖u_f(t, ·)‖_{L¹}` by x-space quadrature on an adaptive window.
pub fn l1_norm_field(sym: &Symbol, prof: &BandProfile, t: f64, exec: &dyn GridExecutor) -> Result<f64> {
    let sm = prof.spectral_moments(sym)?;
    let (c, w) = solution_window(sym, prof, &sm, t);
    let field = sample_adaptive(&SolutionSampler::new(sym, prof, t), exec, t, c, w, TailCriterion::L1_NORM)?;
    Ok(field.l1_norm())
}

/// `‖u0‖_{L¹}` on a serial grid.
pub(crate) fn l1_norm_x_space(prof: &BandProfile) -> Result<f64> {
    l1_norm_field(prof.symbol(), prof, 0.0, &Serial)
}

/// Samples the first term `H_f(t, ·)` of a cone.
pub fn sample_first_term(
    sym: &Symbol,
    prof: &BandProfile,
    cone: &ConeSpec,
    t: f64,
    exec: &dyn GridExecutor,
) -> Result<SampledField> {
    let sampler = FirstTermSampler::new(sym, prof, cone, t)?;
    let (t0, x0) = cone.origin;
    let (a, b) = (sym.df(cone.padded.0), sym.df(cone.padded.1));
    let ends = (x0 + (t - t0) * a, x0 + (t - t0) * b);
    let (lo, hi) = (ends.0.min(ends.1), ends.0.max(ends.1));
    // H_f lives inside the cone slice, which fills the core of this window.
    let half = 0.5 * (hi - lo) / CORE_FRACTION;
    sample_adaptive(&sampler, exec, t, 0.5 * (lo + hi), half, TailCriterion::MOMENTS)
}

/// Mean and variance of `u_f(t, ·)` from the closed polynomials.
pub fn solution_moments_closed(sym: &Symbol, prof: &BandProfile, t: f64) -> Result<MomentReport> {
    Ok(solution_moments_from(&prof.spectral_moments(sym)?, t))
}

pub fn solution_moments_from(sm: &SpectralMoments, t: f64) -> MomentReport {
    let m1 = sm.m_fp * t + sm.m1_u0;
    let lin = 2.0 * (sm.cross_im / (2.0 * PI) - sm.m_fp * sm.m1_u0);
    let v = sm.v_fp * t * t + lin * t + sm.v_u0;
    MomentReport { m1, m2: v + m1 * m1, v, mass: 1.0 }
}

/// Mean and variance of `H_f(t, ·)` for the cone origin `(t0, x0)`.
pub fn firstterm_moments_closed(
    sym: &Symbol,
    prof: &BandProfile,
    cone: &ConeSpec,
    t: f64,
) -> Result<MomentReport> {
    firstterm_moments_from(&prof.spectral_moments(sym)?, cone, t)
}

pub fn firstterm_moments_from(sm: &SpectralMoments, cone: &ConeSpec, t: f64) -> Result<MomentReport> {
    let (t0, x0) = cone.origin;
    if t == t0 {
        return Err(domain("first-term moments are undefined on the slice t = t0"));
    }
    let m1 = x0 + sm.m_fp * (t - t0);
    let v = sm.v_fp * (t - t0) * (t - t0);
    Ok(MomentReport { m1, m2: v + m1 * m1, v, mass: 1.0 })
}

/// `V(u_f(t)) - V(H_f(t))`, affine in `t`.
pub fn variance_gap(sym: &Symbol, prof: &BandProfile, cone: &ConeSpec, t: f64) -> Result<f64> {
    variance_gap_from(&prof.spectral_moments(sym)?, cone, t)
}

pub fn variance_gap_from(sm: &SpectralMoments, cone: &ConeSpec, t: f64) -> Result<f64> {
    let t0 = cone.origin.0;
    if t == t0 {
        return Err(domain("variance gap is undefined on the slice t = t0"));
    }
    let slope = 2.0 * (sm.cross_im / (2.0 * PI) - sm.m_fp * sm.m1_u0 + sm.v_fp * t0);
    Ok(slope * t + sm.v_u0 - sm.v_fp * t0 * t0)
}

/// Closed-form means `(M1(u_f(t)), M1(H_f(t)))`.
pub fn mean_match_check(sym: &Symbol, prof: &BandProfile, cone: &ConeSpec, t: f64) -> Result<(f64, f64)> {
    let sm = prof.spectral_moments(sym)?;
    let u = solution_moments_from(&sm, t);
    let h = firstterm_moments_from(&sm, cone, t)?;
    Ok((u.m1, h.m1))
}
