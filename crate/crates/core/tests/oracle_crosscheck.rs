use std::f64::consts::PI;

use qpd::central;
use qpd::cli::radial_curves;
use qpd::dynamics::{integrate_qpd, IntegratorSettings, ParticleState};
use qpd::ode::StepControl;
use qpd::oracles;
use qpd::potential::ClassicalPotential;
use qpd::wavemodels::{ModelKind, WaveModel};

fn run_1d(kind: ModelKind, x0: f64, v0: f64, times: Vec<f64>) -> Vec<(f64, f64)> {
    let m = WaveModel::new(kind).unwrap();
    let pot = ClassicalPotential::paired_with(&m);
    let settings = IntegratorSettings {
        rel_tol: 1e-11,
        abs_tol: 1e-11,
        t_end: *times.last().unwrap(),
        sample_times: times,
        stop_on_escape: false,
        escape_radius: 1e9,
        ..Default::default()
    };
    let init = ParticleState {
        x: [x0, 0.0, 0.0],
        v: [v0, 0.0, 0.0],
        t: 0.0,
    };
    integrate_qpd(&m, &pot, &init, &settings)
        .unwrap()
        .samples
        .iter()
        .map(|s| (s.t, s.x[0]))
        .collect()
}

#[test]
fn free_packet_follows_closed_form() {
    let times: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
    for (x0, v0) in [(0.0, 0.0), (1.0, 0.0), (-0.5, 1.5), (2.0, -2.0)] {
        for (t, x) in run_1d(ModelKind::FreeGaussian1D, x0, v0, times.clone()) {
            let want = oracles::free_gaussian_trajectory(x0, v0, t);
            assert!(
                (x - want).abs() < 1e-8 * want.abs().max(1.0),
                "({x0}, {v0}) t = {t}: {x} vs {want}"
            );
        }
    }
}

#[test]
fn free_packet_escape_matches_oracle_crossing() {
    let m = WaveModel::new(ModelKind::FreeGaussian1D).unwrap();
    let pot = ClassicalPotential::Free;
    for (x0, v0) in [(0.0, 1.0), (0.5, 0.4), (0.2, 2.0)] {
        let oracle = oracles::free_gaussian_escape(x0, v0).unwrap();
        let settings = IntegratorSettings {
            rel_tol: 1e-11,
            abs_tol: 1e-11,
            t_end: 1e3,
            escape_radius: 1.0,
            ..Default::default()
        };
        let init = ParticleState {
            x: [x0, 0.0, 0.0],
            v: [v0, 0.0, 0.0],
            t: 0.0,
        };
        let rec = integrate_qpd(&m, &pot, &init, &settings).unwrap();
        let t = rec.escaped().expect("escapes").time();
        let want = oracle.crossing_time.unwrap();
        assert!(
            (t - want).abs() < 1e-6 * want.max(1.0),
            "({x0}, {v0}): {t} vs {want}"
        );
    }
    // below threshold: never leaves
    let init = ParticleState {
        x: [0.0; 3],
        v: [0.6, 0.0, 0.0],
        t: 0.0,
    };
    let settings = IntegratorSettings {
        t_end: 1e4,
        escape_radius: 1.0,
        ..Default::default()
    };
    assert!(integrate_qpd(&m, &pot, &init, &settings)
        .unwrap()
        .escaped()
        .is_none());
}

#[test]
fn coherent_state_follows_closed_form() {
    let times: Vec<f64> = (0..=80).map(|i| i as f64 * PI / 10.0).collect();
    for (x0, v0) in [(0.0, 0.0), (1.0, 0.25), (-0.5, -0.25), (2.0, 0.1)] {
        for (t, x) in run_1d(ModelKind::CoherentState1D { a: 1.0 }, x0, v0, times.clone()) {
            let want = oracles::coherent_trajectory(x0, v0, 1.0, t);
            assert!(
                (x - want).abs() < 1e-8 * want.abs().max(1.0),
                "({x0}, {v0}) t = {t}: {x} vs {want}"
            );
        }
    }
}

#[test]
fn radial_equation_matches_closed_form() {
    let times: Vec<f64> = (0..=300).map(|i| i as f64 * 0.01).collect();
    let control = StepControl {
        rel_tol: 1e-12,
        abs_tol: 1e-12,
        ..StepControl::default()
    };
    for (rdot0, c) in [
        (1.0, 0.0),
        (0.0, -0.5),
        (-1.0, 0.5),
        (0.5, -0.2),
        (-0.3, 2.0),
    ] {
        let etilde = central::radial_energy(1.0, rdot0, c, 2.0);
        let mut compared = 0;
        for (t, r, ri) in radial_curves(1.0, rdot0, c, 2.0, &times, control) {
            let want = central::radial_trajectory(1.0, rdot0, etilde, 2.0, t);
            match want {
                Ok(w) => assert_eq!(r, w),
                Err(_) => assert!(r.is_nan()),
            }
            if r.is_finite() && ri.is_finite() && r > 0.05 {
                assert!(
                    (r - ri).abs() < 1e-7 * r,
                    "({rdot0}, {c}) t = {t}: {r} vs {ri}"
                );
                compared += 1;
            }
        }
        assert!(compared > 50);
    }
}

#[test]
fn named_oracles_agree_with_functions() {
    let r = oracles::evaluate("free_gaussian_trajectory", &[0.5, 1.0, 2.0]).unwrap();
    assert_eq!(r.value, oracles::free_gaussian_trajectory(0.5, 1.0, 2.0));
    let r = oracles::evaluate("free_gaussian_escape", &[0.0, 0.5]).unwrap();
    assert_eq!(r.value, f64::INFINITY);
}
