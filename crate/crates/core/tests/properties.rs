//! Randomized invariants.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use memqfi::analytic::{
    channel_coefficients, closed_form_bloch, closed_form_qfi, ChannelCoefficients,
};
use memqfi::channels::{ChannelConfig, ChannelKind, MemoryChannel};
use memqfi::qfi::{
    family_qfi, qfi_teleported_with_step, teleported_family_double, teleported_family_single,
    Qubits, DEFAULT_STEP,
};
use memqfi::qmath::{eigh, tensor, validate_density, ComplexMatrix};
use memqfi::qstate::{bloch_from_density, x_state, BlochVector, ProbeParams, ResourceParams};
use memqfi::teleport::BellProbabilities;
use num_complex::Complex64;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex(), n * n)
        .prop_map(move |v| ComplexMatrix::from_vec(n, n, v).unwrap())
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(n).prop_map(|m| m.hermitian_part())
}

fn density4() -> impl Strategy<Value = ComplexMatrix> {
    matrix(4).prop_map(|g| {
        let m = &g * &g.adjoint();
        let tr = m.trace().re;
        m.scale_real(1.0 / tr)
    })
}

/// Physical resources as convex mixtures of the four Bell states.
fn resource() -> impl Strategy<Value = ResourceParams> {
    prop::array::uniform4(0.0..1.0f64)
        .prop_filter("nonzero weights", |w| w.iter().sum::<f64>() > 1e-3)
        .prop_map(|w| {
            let s: f64 = w.iter().sum();
            let p: Vec<f64> = w.iter().map(|x| x / s).collect();
            let clip = |x: f64| x.clamp(-1.0, 1.0);
            ResourceParams::new(
                clip(1.0 - 2.0 * (p[0] + p[1])),
                clip(1.0 - 2.0 * (p[0] + p[2])),
                clip(1.0 - 2.0 * (p[0] + p[3])),
            )
            .unwrap()
        })
}

fn kind() -> impl Strategy<Value = ChannelKind> {
    prop::sample::select(ChannelKind::ALL.to_vec())
}

fn probe() -> impl Strategy<Value = ProbeParams> {
    (0.0..=PI, 0.0..TAU).prop_map(|(t, p)| ProbeParams::new(t, p).unwrap())
}

fn unit() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

fn cfg(kind: ChannelKind, d: f64, mu: f64) -> ChannelConfig {
    ChannelConfig::new(kind, d, mu).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_mixed_product(a in matrix(2), b in matrix(2), c in matrix(2), d in matrix(2)) {
        let lhs = &tensor(&a, &b) * &tensor(&c, &d);
        let rhs = tensor(&(&a * &c), &(&b * &d));
        prop_assert!(lhs.distance(&rhs) < 1e-12);
        let tr = tensor(&a, &b).trace() - a.trace() * b.trace();
        prop_assert!(tr.norm() < 1e-12);
    }

    #[test]
    fn eigh_reconstructs(m in hermitian(4)) {
        let s = eigh(&m).unwrap();
        prop_assert!(s.reconstruct().distance(&m) < 1e-10);
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1] - 1e-12));
        for (i, u) in s.eigenvectors.iter().enumerate() {
            for (j, v) in s.eigenvectors.iter().enumerate() {
                let ip: Complex64 = u.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((ip - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn channel_is_linear(k in kind(), d in unit(), mu in unit(), a in density4(), b in density4(), t in unit()) {
        let ch = MemoryChannel::new(cfg(k, d, mu)).unwrap();
        let mix = &a.scale_real(t) + &b.scale_real(1.0 - t);
        let lhs = ch.apply(&mix).unwrap();
        let rhs = &ch.apply(&a).unwrap().scale_real(t) + &ch.apply(&b).unwrap().scale_real(1.0 - t);
        prop_assert!(lhs.distance(&rhs) < 1e-12);
    }

    #[test]
    fn channel_interpolates_in_memory(k in kind(), d in unit(), mu in unit(), rho in density4()) {
        let at = |m| MemoryChannel::new(cfg(k, d, m)).unwrap().apply(&rho).unwrap();
        let rhs = &at(0.0).scale_real(1.0 - mu) + &at(1.0).scale_real(mu);
        prop_assert!(at(mu).distance(&rhs) < 1e-12);
    }

    #[test]
    fn channel_preserves_x_states(k in kind(), d in unit(), mu in unit(), c in resource()) {
        let ch = MemoryChannel::new(cfg(k, d, mu)).unwrap();
        prop_assert!(ch.completeness_residual() < 1e-12);
        let out = ch.apply(&x_state(&c).unwrap()).unwrap();
        let diag = validate_density(&out);
        prop_assert!(diag.passed, "{diag:?}");
        prop_assert!(diag.trace_residual < 1e-12);
        for i in 0..4 {
            for j in 0..4 {
                if i != j && i + j != 3 {
                    prop_assert!(out.get(i, j).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn bloch_round_trip(x in -1.0..1.0f64, y in -1.0..1.0f64, z in -1.0..1.0f64) {
        let r = BlochVector::new(x, y, z).scale(0.57);
        prop_assert!(bloch_from_density(&r.to_density()).max_abs_diff(&r) < 1e-15);
    }

    #[test]
    fn bell_weights_normalize(w in prop::array::uniform4(-1e-9..1.0f64)) {
        prop_assume!(w.iter().map(|x| x.max(0.0)).sum::<f64>() > 1e-3);
        let p = BellProbabilities::from_raw(w).as_array();
        prop_assert!(p.iter().all(|x| *x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn teleported_states_are_valid(k in kind(), d in unit(), mu in unit(), c in resource(), p in probe()) {
        let single = teleported_family_single(&cfg(k, d, mu), &c).unwrap();
        let double = teleported_family_double(&cfg(k, d, mu), &c).unwrap();
        prop_assert!(validate_density(&single.eval(&p)).passed);
        prop_assert!(validate_density(&double.eval(&p)).passed);
    }

    #[test]
    fn closed_form_bloch_matches_pipeline(k in kind(), d in unit(), mu in unit(), c in resource(), p in probe()) {
        let fam = teleported_family_single(&cfg(k, d, mu), &c).unwrap();
        let r = bloch_from_density(&fam.eval(&p));
        prop_assert!(r.max_abs_diff(&closed_form_bloch(k, d, mu, &c, &p)) < 1e-13);
        if k == ChannelKind::PhaseDamping {
            prop_assert!((r.rz + c.c3 * p.theta.cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn spectral_agrees_with_bloch(k in kind(), d in unit(), mu in unit(), c in resource(), p in probe()) {
        let fam = teleported_family_single(&cfg(k, d, mu), &c).unwrap();
        let r = family_qfi(&fam, &p, DEFAULT_STEP).unwrap();
        prop_assert!(r.spectral.diagnostics.bloch_residual.unwrap() <= 1e-6);
    }

    #[test]
    fn qfi_bounded(k in kind(), d in unit(), mu in unit(), c in resource(), p in probe()) {
        for q in [Qubits::One, Qubits::Two] {
            let fam = if q == Qubits::One {
                teleported_family_single(&cfg(k, d, mu), &c).unwrap()
            } else {
                teleported_family_double(&cfg(k, d, mu), &c).unwrap()
            };
            let r = family_qfi(&fam, &p, DEFAULT_STEP).unwrap().spectral;
            for f in [r.f_theta, r.f_phi] {
                prop_assert!((0.0..=1.0 + 1e-8).contains(&f), "{f}");
            }
        }
    }

    #[test]
    fn phi_qfi_vanishes_at_poles(k in kind(), d in unit(), mu in unit(), c in resource(), phi in 0.0..TAU) {
        for theta in [0.0, PI] {
            let p = ProbeParams::new(theta, phi).unwrap();
            for q in [Qubits::One, Qubits::Two] {
                let r = qfi_teleported_with_step(&cfg(k, d, mu), &c, &p, q, DEFAULT_STEP).unwrap();
                prop_assert!(r.f_phi.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn theta_qfi_is_symmetric(k in kind(), d in unit(), mu in unit(), c in resource(), p in probe()) {
        let mirror = ProbeParams::new(PI - p.theta, p.phi).unwrap();
        let fam = teleported_family_single(&cfg(k, d, mu), &c).unwrap();
        let a = family_qfi(&fam, &p, DEFAULT_STEP).unwrap().spectral.f_theta;
        let b = family_qfi(&fam, &mirror, DEFAULT_STEP).unwrap().spectral.f_theta;
        prop_assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn step_halving_is_stable(k in kind(), d in unit(), mu in unit(), c in resource(), p in probe()) {
        for q in [Qubits::One, Qubits::Two] {
            let a = qfi_teleported_with_step(&cfg(k, d, mu), &c, &p, q, 1e-5).unwrap();
            let b = qfi_teleported_with_step(&cfg(k, d, mu), &c, &p, q, 5e-6).unwrap();
            prop_assert!((a.f_theta - b.f_theta).abs() <= 1e-6);
            prop_assert!((a.f_phi - b.f_phi).abs() <= 1e-6);
        }
    }

    #[test]
    fn phase_damping_immunity(d in unit(), mu in unit(), c in resource(), phi in 0.0..TAU) {
        let r = closed_form_qfi(ChannelKind::PhaseDamping, d, mu, &c, &ProbeParams::new(FRAC_PI_2, phi).unwrap());
        prop_assert!((r.f_theta - c.c3 * c.c3).abs() < 1e-14);
    }

    #[test]
    fn coefficient_ranges(d in unit(), mu in unit(), c3 in -1.0..=1.0f64) {
        match channel_coefficients(ChannelKind::PhaseDamping, d, mu, c3) {
            ChannelCoefficients::PhaseDamping { delta } => prop_assert!(delta.abs() <= 1.0),
            other => prop_assert!(false, "{other:?}"),
        }
        match channel_coefficients(ChannelKind::Depolarizing, d, mu, c3) {
            ChannelCoefficients::Depolarizing { lambda } => prop_assert!(lambda >= 9.0 * mu - 1e-12),
            other => prop_assert!(false, "{other:?}"),
        }
        match channel_coefficients(ChannelKind::AmplitudeDamping, d, mu, c3) {
            ChannelCoefficients::AmplitudeDamping { a, b, m } => {
                let nu = 1.0 - mu;
                prop_assert!((a - (1.0 - (1.0 - d).sqrt()) * mu).abs() < 1e-14);
                prop_assert!((b - (a - 2.0 * (1.0 - d * nu))).abs() < 1e-14);
                prop_assert!((m - (2.0 * c3 * ((2.0 - d) * d * nu - 1.0) - 2.0 * d * d * nu)).abs() < 1e-14);
            }
            other => prop_assert!(false, "{other:?}"),
        }
    }

    #[test]
    fn full_memory_recovers_bell_precision(k in kind(), d in unit(), p in probe(), s in prop::sample::select(vec![1.0, -1.0])) {
        let c = ResourceParams::new(s, s, -1.0).unwrap();
        let r = closed_form_qfi(k, d, 1.0, &c, &p);
        prop_assert!((r.f_theta - 1.0).abs() < 1e-12);
        prop_assert!((r.f_phi - p.theta.sin().powi(2)).abs() < 1e-12);
    }
}
