//! Frequency-band initial data `F u0` supported in `[p1, p2]`.

use core::f64::consts::PI;
use core::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, Result};
use crate::oscillatory::{integrate_real, integrate_smooth};
use crate::symbols::Symbol;

/// Absolute tolerance of every band integral in this module.
pub const BAND_TOL: f64 = 1e-11;

/// Modulation applied to the base bump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Bump,
    /// `e^{-i xc p}`: translates `u0` to be centred near `xc`.
    ShiftedBump { xc: f64 },
    /// `e^{i tau f(p)}`: the free evolution at time `-tau` of a bump.
    ChirpedBump { tau: f64 },
    /// `e^{i beta p²}`.
    QuadraticChirp { beta: f64 },
}

/// Normalized initial datum on the Fourier side.
#[derive(Debug)]
pub struct BandProfile {
    p1: f64,
    p2: f64,
    shape: Shape,
    symbol: Symbol,
    norm: f64,
    l1_cache: AtomicU64,
}

impl Clone for BandProfile {
    fn clone(&self) -> Self {
        Self {
            p1: self.p1,
            p2: self.p2,
            shape: self.shape,
            symbol: self.symbol.clone(),
            norm: self.norm,
            l1_cache: AtomicU64::new(self.l1_cache.load(Ordering::Relaxed)),
        }
    }
}

/// Spectral quantities consumed by the moment and origin formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralMoments {
    /// Mean group velocity `(1/2π) ∫ f' |F u0|²`.
    pub m_fp: f64,
    pub m_fp2: f64,
    /// Group-velocity variance.
    pub v_fp: f64,
    /// `Im ∫ f' F u0 conj((F u0)')`.
    pub cross_im: f64,
    pub m1_u0: f64,
    pub m2_u0: f64,
    pub v_u0: f64,
}

/// Builds a normalized profile. `sym` is only consulted by [`Shape::ChirpedBump`].
pub fn make_profile(p1: f64, p2: f64, shape: Shape, sym: &Symbol) -> Result<BandProfile> {
    if !(p1 < p2) || !p1.is_finite() || !p2.is_finite() {
        return Err(domain("profile band needs finite p1 < p2"));
    }
    let param = match shape {
        Shape::Bump => 0.0,
        Shape::ShiftedBump { xc } => xc,
        Shape::ChirpedBump { tau } => tau,
        Shape::QuadraticChirp { beta } => beta,
    };
    if !param.is_finite() {
        return Err(domain("profile modulation parameter must be finite"));
    }
    let mut prof = BandProfile {
        p1,
        p2,
        shape,
        symbol: sym.clone(),
        norm: 1.0,
        l1_cache: AtomicU64::new(f64::NAN.to_bits()),
    };
    let g2 = integrate_real(|p| prof.bump(p).powi(2), p1, p2, 1e-15)?;
    prof.norm = (2.0 * PI / g2).sqrt();
    Ok(prof)
}

impl BandProfile {
    pub fn band(&self) -> (f64, f64) {
        (self.p1, self.p2)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// The constant `A` with `(A²/2π) ∫ g² = 1`.
    pub fn normalization(&self) -> f64 {
        self.norm
    }

    /// The symbol used by chirped modulations.
    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    fn q(&self, p: f64) -> f64 {
        (2.0 * p - self.p1 - self.p2) / (self.p2 - self.p1)
    }

    /// Unnormalized bump `exp(-1/(1-q²))`.
    fn bump(&self, p: f64) -> f64 {
        let q = self.q(p);
        if q.abs() >= 1.0 {
            return 0.0;
        }
        (-1.0 / (1.0 - q * q)).exp()
    }

    fn bump_deriv(&self, p: f64) -> f64 {
        let q = self.q(p);
        if q.abs() >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - q * q;
        (-1.0 / s).exp() * (-2.0 * q / (s * s)) * (2.0 / (self.p2 - self.p1))
    }

    /// Modulation phase and its derivative.
    fn modulation(&self, p: f64) -> (f64, f64) {
        match self.shape {
            Shape::Bump => (0.0, 0.0),
            Shape::ShiftedBump { xc } => (-xc * p, -xc),
            Shape::ChirpedBump { tau } => (tau * self.symbol.f(p), tau * self.symbol.df(p)),
            Shape::QuadraticChirp { beta } => (beta * p * p, 2.0 * beta * p),
        }
    }

    /// `F u0(p)`, zero outside the band.
    pub fn amp(&self, p: f64) -> Complex64 {
        let g = self.bump(p);
        if g == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let (theta, _) = self.modulation(p);
        Complex64::from_polar(self.norm * g, theta)
    }

    /// `(F u0)'(p)`, zero outside the band.
    pub fn damp(&self, p: f64) -> Complex64 {
        let g = self.bump(p);
        if g == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let (theta, dtheta) = self.modulation(p);
        Complex64::new(self.norm * self.bump_deriv(p), self.norm * g * dtheta)
            * Complex64::from_polar(1.0, theta)
    }

    /// Upper bound on `|d/dp arg F u0|` over the band.
    pub fn phase_rate(&self) -> f64 {
        let pmax = self.p1.abs().max(self.p2.abs());
        match self.shape {
            Shape::Bump => 0.0,
            Shape::ShiftedBump { xc } => xc.abs(),
            Shape::ChirpedBump { tau } => {
                tau.abs() * self.symbol.df(self.p1).abs().max(self.symbol.df(self.p2).abs())
            }
            Shape::QuadraticChirp { beta } => 2.0 * beta.abs() * pmax,
        }
    }

    /// `(1/2π) ∫ |F u0|²`, equal to one up to quadrature error.
    pub fn spectral_mass(&self) -> Result<f64> {
        Ok(integrate_real(|p| self.amp(p).norm_sqr(), self.p1, self.p2, BAND_TOL)? / (2.0 * PI))
    }

    /// Spectral moments with respect to the symbol `sym`.
    pub fn spectral_moments(&self, sym: &Symbol) -> Result<SpectralMoments> {
        let (a, b) = (self.p1, self.p2);
        let two_pi = 2.0 * PI;
        let m_fp = integrate_real(|p| sym.df(p) * self.amp(p).norm_sqr(), a, b, BAND_TOL)? / two_pi;
        let m_fp2 =
            integrate_real(|p| sym.df(p).powi(2) * self.amp(p).norm_sqr(), a, b, BAND_TOL)? / two_pi;
        let v_fp = integrate_real(|p| (sym.df(p) - m_fp).powi(2) * self.amp(p).norm_sqr(), a, b, BAND_TOL)?
            / two_pi;
        let cross_im =
            integrate_real(|p| (sym.df(p) * self.amp(p) * self.damp(p).conj()).im, a, b, BAND_TOL)?;
        let i = Complex64::new(0.0, 1.0);
        let m1_u0 = (i * integrate_smooth(|p| self.damp(p) * self.amp(p).conj(), a, b, BAND_TOL)?).re
            / two_pi;
        let m2_u0 = integrate_real(|p| self.damp(p).norm_sqr(), a, b, BAND_TOL)? / two_pi;
        // (x - m1) u0 transforms to i (F u0)' - m1 F u0.
        let v_u0 = integrate_real(|p| (self.damp(p) + i * m1_u0 * self.amp(p)).norm_sqr(), a, b, BAND_TOL)?
            / two_pi;
        Ok(SpectralMoments { m_fp, m_fp2, v_fp, cross_im, m1_u0, m2_u0, v_u0 })
    }

    /// `‖u0‖_{L¹}`, computed once by x-space quadrature and cached.
    pub fn l1_norm_u0(&self) -> Result<f64> {
        let cached = f64::from_bits(self.l1_cache.load(Ordering::Relaxed));
        if !cached.is_nan() {
            return Ok(cached);
        }
        let v = crate::moments::l1_norm_x_space(self)?;
        self.l1_cache.store(v.to_bits(), Ordering::Relaxed);
        Ok(v)
    }

    /// Seeds the `‖u0‖_{L¹}` cache with a value computed elsewhere.
    pub fn set_l1_norm_u0(&self, value: f64) {
        self.l1_cache.store(value.to_bits(), Ordering::Relaxed);
    }
}
