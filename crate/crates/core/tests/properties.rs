use conewave_core::band_profile::{make_profile, Shape};
use conewave_core::moments::solution_moments_closed;
use conewave_core::wavepacket::optimal_origin;
use conewave_core::{integrate_smooth, oscillatory_integral, Complex64, OscillatoryJob, Symbol};
use proptest::prelude::*;

fn symbol(kind: u8, mass: f64) -> Symbol {
    match kind % 3 {
        0 => Symbol::FreeSchrodinger,
        1 => Symbol::klein_gordon(mass).unwrap(),
        _ => Symbol::custom(
            "quartic",
            |p| 0.5 * p * p + p.powi(4) / 12.0,
            |p| p + p.powi(3) / 3.0,
            |p| 1.0 + p * p,
            |p| 2.0 * p,
        ),
    }
}

fn amplitude(p: f64) -> Complex64 {
    let q = 2.0 * p - 3.0;
    if q.abs() >= 1.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar((-1.0 / (1.0 - q * q)).exp(), 0.7 * p)
}

fn integrate(phase: &dyn Fn(f64) -> f64, slope: &dyn Fn(f64) -> f64, omega: f64) -> Complex64 {
    let job = OscillatoryJob::new(&amplitude, phase, slope, omega, (1.0, 2.0), 1e-12).unwrap();
    oscillatory_integral(&job).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn velocity_inversion_round_trips(kind in 0u8..3, mass in 0.2f64..3.0, a in -3.0f64..2.0, w in 0.1f64..2.0, s in 0.0f64..=1.0) {
        let sym = symbol(kind, mass);
        let b = a + w;
        let p = a + s * w;
        let back = sym.invert_velocity(sym.df(p), a, b).unwrap();
        prop_assert!((back - p).abs() <= 1e-10 * (1.0 + p.abs()));
    }

    #[test]
    fn band_extrema_bracket_samples(kind in 0u8..3, mass in 0.2f64..3.0, a in -3.0f64..2.0, w in 0.1f64..2.0) {
        let sym = symbol(kind, mass);
        let b = a + w;
        let e = sym.band_extrema(a, b).unwrap();
        for k in 0..=200 {
            let p = a + w * k as f64 / 200.0;
            prop_assert!(sym.d2f(p) <= e.sup_d2f * (1.0 + 1e-12) + 1e-14);
            prop_assert!(sym.d2f(p) >= e.inf_d2f * (1.0 - 1e-12) - 1e-14);
            prop_assert!(sym.d3f(p).abs() <= e.sup_abs_d3f * (1.0 + 1e-12) + 1e-14);
        }
    }

    #[test]
    fn conjugation_reverses_the_phase(v in -1.0f64..4.0, omega in 0.5f64..300.0) {
        let psi = move |p: f64| v * p - 0.5 * p * p;
        let dpsi = move |p: f64| v - p;
        let forward = integrate(&psi, &dpsi, omega);
        let neg = move |p: f64| -psi(p);
        let dneg = move |p: f64| -dpsi(p);
        let conj_amp = |p: f64| amplitude(p).conj();
        let job = OscillatoryJob::new(&conj_amp, &neg, &dneg, omega, (1.0, 2.0), 1e-12).unwrap();
        let backward = oscillatory_integral(&job).unwrap().value;
        prop_assert!((backward - forward.conj()).norm() < 1e-11);
    }

    #[test]
    fn constant_phase_offset_rotates(c in -10.0f64..10.0, omega in 0.5f64..300.0) {
        let psi = |p: f64| 1.5 * p - 0.5 * p * p;
        let dpsi = |p: f64| 1.5 - p;
        let base = integrate(&psi, &dpsi, omega);
        let shifted = move |p: f64| psi(p) + c;
        let rotated = integrate(&shifted, &dpsi, omega);
        prop_assert!((rotated - base * Complex64::from_polar(1.0, omega * c)).norm() < 1e-11);
    }

    #[test]
    fn variance_is_minimal_at_optimal_time(tau in -4.0f64..4.0, kind in 0u8..2, dt in -50.0f64..50.0) {
        let sym = symbol(kind, 1.0);
        let prof = make_profile(1.0, 2.0, Shape::ChirpedBump { tau }, &sym).unwrap();
        let o = optimal_origin(&sym, &prof).unwrap();
        prop_assert!((o.t_star - tau).abs() < 1e-8);
        let v = solution_moments_closed(&sym, &prof, o.t_star + dt).unwrap().v;
        prop_assert!(v >= o.min_variance * (1.0 - 1e-12));
    }
}

#[test]
fn zero_frequency_is_plain_quadrature() {
    let psi = |p: f64| p.sin();
    let dpsi = |p: f64| p.cos();
    let direct = integrate_smooth(amplitude, 1.0, 2.0, 1e-13).unwrap();
    assert!((integrate(&psi, &dpsi, 0.0) - direct).norm() < 1e-12);
}
