//! Frequency-band wave packets of one-dimensional dispersive equations
//! `i ∂_t u = f(D) u` with strictly convex symbol `f`.
//!
//! The crate evaluates the exact solution
//! `u_f(t,x) = (1/2π) ∫ F u0(p) e^{-itf(p)+ixp} dp`, its one-term
//! stationary-phase approximation `H_f` supported in a space-time cone with
//! arbitrary origin `(t0, x0)`, all explicit remainder constants, and the
//! origin `(t*, x*)` that minimises the remainder bound.
//!
//! Modules:
//!
//! - [`symbols`]: dispersion relations and their derivatives
//! - [`band_profile`]: initial data on the Fourier side and spectral moments
//! - [`oscillatory`]: adaptive Gauss–Legendre and phase-resolved quadrature
//! - [`stationary_phase`]: phase diffeomorphisms, the contour primitive and
//!   the interior / exterior expansions with their constants
//! - [`wavepacket`]: solution evaluation, cones, `H_f`, cone constants and
//!   the optimal origin
//! - [`moments`]: x-space moment oracles and closed-form moment polynomials
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod band_profile;
pub mod error;
pub mod moments;
pub mod oscillatory;
pub mod stationary_phase;
pub mod symbols;
pub mod wavepacket;

pub use num_complex::Complex64;

pub use band_profile::{BandProfile, Shape, SpectralMoments};
pub use error::{Error, Result};
pub use moments::{GridExecutor, MomentReport, SampledField, Serial};
pub use oscillatory::{integrate_smooth, oscillatory_integral, OscillatoryJob, OscillatoryResult};
pub use stationary_phase::{Amplitude, ExpansionConstants, Phase, PhaseData, PolynomialPhase, ShiftedPhase, Side};
pub use symbols::{BandExtrema, Symbol, SymbolKind};
pub use wavepacket::{ConeConstants, ConeSpec, OriginMethod, OriginResult, Regime, Region};
