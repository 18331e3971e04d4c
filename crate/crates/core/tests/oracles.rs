//! Closed forms against independent x-space and quadrature oracles.

use std::f64::consts::PI;

use conewave_core::band_profile::{make_profile, Shape};
use conewave_core::moments::{
    l1_norm_field, sample_first_term, sample_solution, solution_moments_closed, spatial_moments,
    firstterm_moments_closed, variance_gap,
};
use conewave_core::stationary_phase::{expand_with_bound, exterior_bound, PhaseData, ShiftedPhase};
use conewave_core::wavepacket::{
    argmin_variance_golden, evaluate_solution, first_term_h, optimal_origin, shift_norm_g, ConeSpec,
};
use conewave_core::{oscillatory_integral, OscillatoryJob, Serial, Symbol};

#[test]
fn plancherel_in_x_space() {
    let sym = Symbol::FreeSchrodinger;
    for shape in [
        Shape::Bump,
        Shape::ShiftedBump { xc: 3.0 },
        Shape::ChirpedBump { tau: 2.0 },
        Shape::QuadraticChirp { beta: 0.5 },
    ] {
        let prof = make_profile(1.0, 2.0, shape, &sym).unwrap();
        for t in [0.0, 5.0, -3.0] {
            let m = spatial_moments(&sample_solution(&sym, &prof, t, &Serial).unwrap()).unwrap();
            assert!((m.mass - 1.0).abs() < 1e-7, "{shape:?} t={t} mass={}", m.mass);
        }
    }
}

#[test]
fn moment_polynomials_match_x_quadrature() {
    let kg = Symbol::klein_gordon(1.0).unwrap();
    let cases = [
        (Symbol::FreeSchrodinger, Shape::Bump),
        (Symbol::FreeSchrodinger, Shape::QuadraticChirp { beta: 0.5 }),
        (kg.clone(), Shape::ChirpedBump { tau: 2.0 }),
    ];
    for (sym, shape) in cases {
        let prof = make_profile(1.0, 2.0, shape, &sym).unwrap();
        for t in [-5.0, 0.0, 3.0, 10.0, 50.0] {
            let oracle = spatial_moments(&sample_solution(&sym, &prof, t, &Serial).unwrap()).unwrap();
            let closed = solution_moments_closed(&sym, &prof, t).unwrap();
            assert!((oracle.m1 - closed.m1).abs() < 1e-6, "{shape:?} t={t}");
            assert!((oracle.v - closed.v).abs() < 1e-5 * closed.v, "{shape:?} t={t}");
        }
    }
}

#[test]
fn l1_norm_is_translation_invariant() {
    let sym = Symbol::FreeSchrodinger;
    let bump = make_profile(1.0, 2.0, Shape::Bump, &sym).unwrap();
    let shifted = make_profile(1.0, 2.0, Shape::ShiftedBump { xc: 5.0 }, &sym).unwrap();
    let a = bump.l1_norm_u0().unwrap();
    let b = shifted.l1_norm_u0().unwrap();
    // numpy direct transform on ±3000 with dx = 0.01 and 0.02: 4.3920148 to 4.3920150.
    assert!((a - 4.392015).abs() < 1e-5, "{a}");
    assert!((a - b).abs() < 1e-7 * a);
    assert_eq!(bump.l1_norm_u0().unwrap(), a);
    let at0 = l1_norm_field(&sym, &bump, 0.0, &Serial).unwrap();
    assert_eq!(at0, a);
}

#[test]
fn first_term_moments_match_sampled_first_term() {
    let sym = Symbol::FreeSchrodinger;
    let prof = make_profile(1.0, 2.0, Shape::QuadraticChirp { beta: 0.5 }, &sym).unwrap();
    let cone = ConeSpec::with_padding((1.0, 2.0), 0.1, (1.5, -2.0)).unwrap();
    for t in [21.5, -18.5] {
        let m = spatial_moments(&sample_first_term(&sym, &prof, &cone, t, &Serial).unwrap()).unwrap();
        let closed = firstterm_moments_closed(&sym, &prof, &cone, t).unwrap();
        assert!((m.mass - 1.0).abs() < 1e-5);
        assert!((m.m1 - closed.m1).abs() < 1e-5);
        assert!((m.v - closed.v).abs() < 1e-5 * closed.v);
    }
}

#[test]
fn gap_is_constant_exactly_at_the_optimal_time() {
    let sym = Symbol::klein_gordon(1.0).unwrap();
    let prof = make_profile(1.0, 2.0, Shape::ChirpedBump { tau: 2.0 }, &sym).unwrap();
    let o = optimal_origin(&sym, &prof).unwrap();
    let sm = prof.spectral_moments(&sym).unwrap();
    let cone = ConeSpec::with_padding((1.0, 2.0), 0.1, (o.t_star, o.x_star)).unwrap();
    let g1 = variance_gap(&sym, &prof, &cone, o.t_star + 1.0).unwrap();
    let g2 = variance_gap(&sym, &prof, &cone, o.t_star + 100.0).unwrap();
    assert!((g1 - g2).abs() < 1e-9 && (g1 - o.min_variance).abs() < 1e-9);
    let moved = cone.with_origin((o.t_star + 1.0, o.x_star));
    let h1 = variance_gap(&sym, &prof, &moved, 10.0).unwrap();
    let h2 = variance_gap(&sym, &prof, &moved, 20.0).unwrap();
    assert!(((h2 - h1) / 10.0 - 2.0 * sm.v_fp).abs() < 1e-9);
}

#[test]
fn shift_norm_is_minimal_at_the_optimal_origin() {
    let sym = Symbol::FreeSchrodinger;
    let prof = make_profile(1.0, 2.0, Shape::ChirpedBump { tau: 2.0 }, &sym).unwrap();
    let o = optimal_origin(&sym, &prof).unwrap();
    let best = shift_norm_g(&sym, &prof, o.t_star, o.x_star).unwrap();
    assert!((best * best - o.min_variance).abs() < 1e-10);
    for d in [0.1, 1.0, 10.0] {
        for (a, b) in [(-1.0, -1.0), (-1.0, 0.0), (-1.0, 1.0), (0.0, -1.0), (0.0, 1.0), (1.0, -1.0), (1.0, 0.0), (1.0, 1.0)] {
            assert!(shift_norm_g(&sym, &prof, o.t_star + a * d, o.x_star + b * d).unwrap() >= best);
        }
    }
    // Moving x0 by one at the mean-matching time adds exactly one to g².
    let g = shift_norm_g(&sym, &prof, o.t_star, o.x_star + 1.0).unwrap();
    assert!((g * g - best * best - 1.0).abs() < 1e-10);
}

#[test]
fn golden_section_origin_agrees_with_closed_form() {
    let sym = Symbol::FreeSchrodinger;
    let prof = make_profile(1.0, 2.0, Shape::ChirpedBump { tau: 2.0 }, &sym).unwrap();
    let o = optimal_origin(&sym, &prof).unwrap();
    let g = argmin_variance_golden(&sym, &prof, -1.0, 5.0, &Serial).unwrap();
    assert!((g.t_star - o.t_star).abs() < 1e-5, "{} vs {}", g.t_star, o.t_star);
    assert!((g.x_star - o.x_star).abs() < 1e-5);
}

#[test]
fn interior_expansion_is_certified() {
    let kg = Symbol::klein_gordon(1.0).unwrap();
    for sym in [Symbol::FreeSchrodinger, kg] {
        let prof = make_profile(1.0, 2.0, Shape::Bump, &sym).unwrap();
        let v = 0.3 * sym.df(1.0) + 0.7 * sym.df(2.0);
        let ph = PhaseData::new(ShiftedPhase::new(sym.clone(), v), (0.9, 2.1), None).unwrap();
        for omega in [10.0, 100.0, 1000.0] {
            let e = expand_with_bound(&prof, &ph, omega, 0.625).unwrap();
            let amp = |p: f64| prof.amp(p);
            let psi = |p: f64| v * p - sym.f(p);
            let dpsi = |p: f64| v - sym.df(p);
            let job = OscillatoryJob::new(&amp, &psi, &dpsi, omega, (1.0, 2.0), 1e-12).unwrap();
            let exact = oscillatory_integral(&job).unwrap().value;
            assert!((exact - e.approx).norm() <= e.bound + 1e-9);
        }
    }
}

#[test]
fn exterior_estimate_is_certified() {
    let sym = Symbol::FreeSchrodinger;
    let prof = make_profile(1.0, 2.0, Shape::Bump, &sym).unwrap();
    let v = 0.5;
    let dpsi = |p: f64| v - p;
    for omega in [100.0, 1000.0] {
        let amp = |p: f64| prof.amp(p);
        let psi = |p: f64| v * p - 0.5 * p * p;
        let job = OscillatoryJob::new(&amp, &psi, &dpsi, omega, (1.0, 2.0), 1e-12).unwrap();
        let r = oscillatory_integral(&job).unwrap().value;
        assert!(r.norm() <= exterior_bound(&prof, &dpsi, omega).unwrap());
    }
}

#[test]
fn first_term_error_decays_like_inverse_time_at_the_peak() {
    let sym = Symbol::FreeSchrodinger;
    let prof = make_profile(1.0, 2.0, Shape::Bump, &sym).unwrap();
    let cone = ConeSpec::with_padding((1.0, 2.0), 0.1, (0.0, 0.0)).unwrap();
    let sm = prof.spectral_moments(&sym).unwrap();
    let rel = |t: f64| {
        let x = t * sm.m_fp;
        let u = evaluate_solution(&sym, &prof, t, x, Some((0.0, 0.0)), 1e-12).unwrap();
        let raw = evaluate_solution(&sym, &prof, t, x, None, 1e-12).unwrap();
        assert!((u - raw).norm() < 1e-11);
        let h = first_term_h(&sym, &prof, &cone, t, x).unwrap();
        assert!(h.norm() > 0.5 / (2.0 * PI * t).sqrt());
        (u - h).norm() / h.norm()
    };
    let (a, b) = (rel(500.0), rel(5000.0));
    assert!(a < 0.01 && (a / b - 10.0).abs() < 0.1, "{a} {b}");
}
