use std::f64::consts::PI;

use lzs_core::analysis::{
    bessel_j, classify_regime, complete_elliptic_e, complex_gamma_arg, landau_zener_probability, rabi_like_frequency_lz,
    spectrum_asymmetry,
};
use lzs_core::calibration::{bessel_zero_voltage_calibration, fit_flux_spectrum, CalibrationCurve, SpectroscopyPoint};
use lzs_core::dynamics::{evolve, Decoherence, DriveSpec, EvolveSettings, Frame, ModulationSpec, QubitState};
use lzs_core::sweep::{sweep_phase_time, sweep_spectrum, AmplitudeAxis, SimParams};
use lzs_core::units::mhz;
use lzs_core::{Axis, LzsPoint, SweepGrid, SweepResult};
use proptest::prelude::*;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn params(rabi: f64, amp: f64, omega: f64, eps: f64, phase: f64, gamma1: f64, gamma_phi: f64) -> SimParams {
    SimParams {
        modulation: ModulationSpec::new(mhz(amp), mhz(omega), phase).unwrap(),
        drive: DriveSpec::new(mhz(rabi), mhz(eps)).unwrap(),
        decoherence: Decoherence::new(gamma1, gamma_phi).unwrap(),
        tol: 1e-9,
    }
}

fn run(p: &SimParams, init: &QubitState, t: f64, tol: f64) -> lzs_core::dynamics::Trace {
    let s = EvolveSettings::new(t).sample_dt(t / 200.0).tol(tol).record_bloch(true);
    evolve(init, Frame::Rotating, &p.modulation, &p.drive, &p.decoherence, &s).unwrap()
}

fn unit_state(theta: f64, phi: f64) -> QubitState {
    QubitState::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()).unwrap()
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn bloch_norm_never_exceeds_one(
        rabi in 0.0..20.0f64, amp in 0.0..60.0f64, omega in 1.0..10.0f64, eps in -20.0..20.0f64,
        phase in 0.0..6.3f64, g1 in 0.0..1e6f64, gphi in 0.0..1e6f64, theta in 0.0..PI, phi in 0.0..6.3f64,
    ) {
        let p = params(rabi, amp, omega, eps, phase, g1, gphi);
        let tr = run(&p, &unit_state(theta, phi), 2e-6, 1e-9);
        prop_assert!(tr.max_norm <= 1.0 + 1e-9, "norm {}", tr.max_norm);
        for pop in &tr.populations {
            prop_assert!((-1e-9..=1.0 + 1e-9).contains(pop));
        }
    }

    #[test]
    fn coherent_evolution_preserves_purity(
        rabi in 0.5..20.0f64, amp in 0.0..60.0f64, omega in 1.0..10.0f64, eps in -20.0..20.0f64,
        phase in 0.0..6.3f64, theta in 0.0..PI, phi in 0.0..6.3f64,
    ) {
        let p = params(rabi, amp, omega, eps, phase, 0.0, 0.0);
        let tr = run(&p, &unit_state(theta, phi), 2e-6, 1e-10);
        for b in tr.bloch.as_ref().unwrap() {
            let n = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
            prop_assert!((n - 1.0).abs() < 1e-7, "norm drift {}", n - 1.0);
        }
    }

    #[test]
    fn tightening_tolerance_converges(
        rabi in 1.0..20.0f64, amp in 5.0..40.0f64, omega in 2.0..8.0f64, phase in 0.0..6.3f64,
    ) {
        let p = params(rabi, amp, omega, 0.0, phase, 3.8e4, 1.8e5);
        let a = run(&p, &QubitState::ground(), 2e-6, 1e-7);
        let b = run(&p, &QubitState::ground(), 2e-6, 1e-10);
        let diff = a.populations.iter().zip(&b.populations).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-4, "diff {diff}");
    }

    #[test]
    fn modulation_phase_is_two_pi_periodic(phase in 0.0..6.3f64, rabi in 1.0..20.0f64, amp in 5.0..40.0f64) {
        let p = params(rabi, amp, 3.0, 0.0, phase, 0.0, 0.0);
        let mut q = p;
        q.modulation = p.modulation.with_phase(phase + 2.0 * PI).unwrap();
        let a = run(&p, &QubitState::ground(), 1e-6, 1e-10);
        let b = run(&q, &QubitState::ground(), 1e-6, 1e-10);
        for (x, y) in a.populations.iter().zip(&b.populations) {
            prop_assert!((x - y).abs() < 1e-7);
        }
    }
}

proptest! {
    #![proptest_config(cfg(256))]

    #[test]
    fn gamma_arg_is_odd(y in -49.0..49.0f64) {
        let a = complex_gamma_arg(y).unwrap();
        let b = complex_gamma_arg(-y).unwrap();
        // the principal value may wrap at ±π
        let s = (a + b).rem_euclid(2.0 * PI);
        prop_assert!(s.min(2.0 * PI - s) < 1e-10, "{a} {b}");
    }

    #[test]
    fn elliptic_e_is_decreasing(m1 in 0.0..1.0f64, m2 in 0.0..1.0f64) {
        let (lo, hi) = if m1 < m2 { (m1, m2) } else { (m2, m1) };
        prop_assert!(complete_elliptic_e(lo).unwrap() >= complete_elliptic_e(hi).unwrap());
    }

    #[test]
    fn bessel_recurrence(n in 1u32..=10, x in 1.0..20.0f64) {
        let lhs = bessel_j(n - 1, x).unwrap() + bessel_j(n + 1, x).unwrap();
        let rhs = 2.0 * n as f64 / x * bessel_j(n, x).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-8);
    }

    #[test]
    fn bessel_normalization(x in 0.0..10.0f64) {
        let mut s = bessel_j(0, x).unwrap().powi(2);
        for n in 1..=40 {
            s += 2.0 * bessel_j(n, x).unwrap().powi(2);
        }
        prop_assert!((s - 1.0).abs() < 1e-9);
    }

    #[test]
    fn regime_is_scale_invariant(rabi in 0.1..50.0f64, amp in 1.0..200.0f64, omega in 0.5..20.0f64, k in 0.01..100.0f64) {
        let a = LzsPoint::resonant(mhz(rabi), mhz(amp), mhz(omega)).unwrap();
        let b = LzsPoint::resonant(mhz(rabi * k), mhz(amp * k), mhz(omega * k)).unwrap();
        prop_assert_eq!(classify_regime(&a), classify_regime(&b));
    }

    #[test]
    fn lz_probability_and_frequency_decrease_with_rabi(r1 in 0.1..30.0f64, r2 in 0.1..30.0f64) {
        let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        let f = |r: f64| LzsPoint::resonant(mhz(r), mhz(153.0), mhz(6.0)).unwrap();
        let d = |r: f64| lzs_core::analysis::adiabaticity_delta(&f(r)).unwrap();
        prop_assert!(landau_zener_probability(d(lo)) >= landau_zener_probability(d(hi)));
        prop_assert!(rabi_like_frequency_lz(&f(lo)).unwrap() >= rabi_like_frequency_lz(&f(hi)).unwrap());
    }
}

proptest! {
    #![proptest_config(cfg(32))]

    #[test]
    fn flux_spectrum_round_trip(ec in 0.1..0.5f64, ej in 5.0..30.0f64) {
        let points: Vec<SpectroscopyPoint> = (0..21)
            .map(|k| {
                let flux = -0.35 + 0.035 * k as f64;
                let f = (8.0 * ec * ej * (PI * flux).cos().abs()).sqrt() - ec;
                SpectroscopyPoint::new(flux, f).unwrap()
            })
            .collect();
        let fit = fit_flux_spectrum(&points, None).unwrap();
        prop_assert!((fit.ec - ec).abs() / ec < 1e-6, "ec {} vs {}", fit.ec, ec);
        prop_assert!((fit.ej - ej).abs() / ej < 1e-6, "ej {} vs {}", fit.ej, ej);
    }

    #[test]
    fn calibration_ignores_curve_and_sample_order(seed in any::<u64>(), slope in 1.0..10.0f64) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let zero = 2.404825557695773;
        let mut curves: Vec<CalibrationCurve> = [10.0, 15.0, 20.0, 30.0]
            .iter()
            .map(|&f| {
                let w = mhz(f);
                let points = (0..41)
                    .map(|k| {
                        let v = (2.0 + 0.02 * k as f64) * w / mhz(slope * 1e3);
                        (v, bessel_j(0, mhz(slope * 1e3) * v / w).unwrap().abs().sqrt())
                    })
                    .collect();
                CalibrationCurve { omega: w, points }
            })
            .collect();
        let a = bessel_zero_voltage_calibration(&curves, 1).unwrap();
        curves.shuffle(&mut rng);
        for c in &mut curves {
            c.points.shuffle(&mut rng);
        }
        let b = bessel_zero_voltage_calibration(&curves, 1).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!((a.map.slope / mhz(slope * 1e3) - 1.0).abs() < 1e-3);
        prop_assert!((a.zero - zero).abs() < 1e-9);
    }

    #[test]
    fn asymmetry_is_mirror_invariant(n in 1usize..6, cols in 1usize..5, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let eps = Axis::linspace("detuning", "rad/s", -1.0, 1.0, 2 * n + 1).unwrap();
        let amp = Axis::linspace("amplitude", "rad/s", 1.0, 2.0, cols).unwrap();
        let rows = eps.len();
        let values: Vec<f64> = (0..rows * cols).map(|_| rng.random::<f64>()).collect();
        let mirrored: Vec<f64> = (0..rows).rev().flat_map(|i| values[i * cols..(i + 1) * cols].to_vec()).collect();
        let make = |values: Vec<f64>| SweepResult {
            grid: SweepGrid { axis1: eps.clone(), axis2: amp.clone(), fixed: SimParams::default() },
            values,
            metadata: Default::default(),
        };
        let a = spectrum_asymmetry(&make(values)).unwrap();
        let b = spectrum_asymmetry(&make(mirrored)).unwrap();
        prop_assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn sweeps_are_bitwise_identical_across_worker_counts() {
    let p = params(12.0, 90.0, 6.0, 0.0, 0.3 * PI, 3.8e4, 1.8e5);
    let phis = [0.2, 0.9, 1.7, 2.5];
    let serial = sweep_phase_time(&phis, &p, 2e-6, 10e-9, Some(1)).unwrap();
    let parallel = sweep_phase_time(&phis, &p, 2e-6, 10e-9, Some(4)).unwrap();
    assert_eq!(serial.values, parallel.values);

    let eps: Vec<f64> = [-10.0, 0.0, 10.0].iter().map(|&e| mhz(e)).collect();
    let amps = AmplitudeAxis::Amplitude(vec![mhz(20.0), mhz(40.0)]);
    let a = sweep_spectrum(&eps, &amps, &p, 4e-6, 3, Some(1)).unwrap();
    let b = sweep_spectrum(&eps, &amps, &p, 4e-6, 3, Some(3)).unwrap();
    assert_eq!(a.values, b.values);
    assert_eq!(a.metadata.not_converged, b.metadata.not_converged);
}
