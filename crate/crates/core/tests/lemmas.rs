//! Pointwise checks of the Fresnel primitive and the straightening diffeomorphisms.

use conewave_core::stationary_phase::{
    diffeo_bounds, fresnel_primitive, l_delta, phase_diffeo, phase_diffeo_inverse, PhaseData,
    PolynomialPhase, ShiftedPhase, Side,
};
use conewave_core::{Complex64, Symbol};

#[test]
fn fresnel_primitive_differentiates_to_the_gaussian_chirp() {
    // Fourth-order five-point stencil; the second-order one is too coarse at ω = 100.
    let h = 1e-4;
    for omega in [1.0, 10.0, 100.0] {
        for s in [0.05, 0.3, 1.0, 2.0] {
            let phi = |x: f64| fresnel_primitive(x, omega).unwrap();
            let d = (phi(s - 2.0 * h) - phi(s + 2.0 * h) + 8.0 * (phi(s + h) - phi(s - h))) / (12.0 * h);
            let expected = Complex64::from_polar(1.0, -omega * s * s);
            assert!((d - expected).norm() < 1e-6, "ω={omega} s={s} err={}", (d - expected).norm());
        }
    }
}

#[test]
fn fresnel_primitive_obeys_its_decay_bound() {
    for delta in [0.55, 0.625, 0.7, 0.9] {
        let l = l_delta(delta).unwrap();
        for omega in [1.0, 10.0, 1000.0] {
            for s in [0.01, 0.1, 1.0, 5.0] {
                let v = fresnel_primitive(s, omega).unwrap().norm();
                assert!(v <= l * s.powf(1.0 - 2.0 * delta) * omega.powf(-delta));
            }
        }
    }
}

fn check_diffeo_bounds<P: conewave_core::stationary_phase::Phase>(ph: &PhaseData<P>) {
    let b = diffeo_bounds(ph);
    let p0 = ph.p0.unwrap();
    let (lo, hi) = ph.padded_band;
    for (side, a, z) in [(Side::Left, lo, p0), (Side::Right, p0, hi)] {
        for k in 0..=100 {
            let p = (a + (z - a) * k as f64 / 100.0).clamp(a, z);
            let (_, d) = phase_diffeo(ph, side, p).unwrap();
            assert!(d.abs() >= b.dphi_lower * (1.0 - 1e-12), "{side:?} p={p}");
        }
        let top = phase_diffeo(ph, side, if side == Side::Left { lo } else { hi }).unwrap().0.abs();
        let h = 1e-3 * top;
        for k in 1..20 {
            let s = top * k as f64 / 20.0;
            let inv = |x: f64| phase_diffeo_inverse(ph, side, x).unwrap();
            let d2 = (inv(s + h) - 2.0 * inv(s) + inv(s - h)) / (h * h);
            assert!(d2.abs() <= b.inverse_d2_upper * 1.001 + 1e-6, "{side:?} s={s} d2={d2}");
        }
    }
}

#[test]
fn diffeo_bounds_hold_for_klein_gordon() {
    let sym = Symbol::klein_gordon(1.0).unwrap();
    let ph = PhaseData::new(ShiftedPhase::new(sym, 0.3), (-1.0, 1.5), None).unwrap();
    check_diffeo_bounds(&ph);
}

#[test]
fn diffeo_bounds_hold_for_a_quartic_phase() {
    let ph = PhaseData::new(PolynomialPhase::new(&[0.0, 0.4, -0.5, 0.0, -1.0 / 12.0]), (-1.5, 1.5), None).unwrap();
    check_diffeo_bounds(&ph);
}
