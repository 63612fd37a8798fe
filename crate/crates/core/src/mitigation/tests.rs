use super::*;
use alloc::vec;
use crate::simulator::Angle;
use crate::vqe::build_hardware_efficient;
use crate::vqe::Entangler;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn est(mean: f64) -> ShotEstimate {
    ShotEstimate::exact(mean)
}

fn series(points: &[(f64, f64)]) -> NoiseScaledSeries {
    NoiseScaledSeries::new(points.iter().map(|&(l, y)| (l, est(y))).collect()).unwrap()
}

fn z0(n: usize) -> PauliSum {
    PauliSum::term(n, "Z0".parse().unwrap(), Complex64::new(1.0, 0.0)).unwrap()
}

/// Density-matrix oracle: each gate followed by its Pauli error channel.
fn density_expectation(circuit: &Circuit, theta: &[f64], noise: &NoiseModel, h: &PauliSum) -> f64 {
    let n = circuit.n_qubits;
    let d = 1usize << n;
    let mut rho = DMatrix::<Complex64>::zeros(d, d);
    rho[(0, 0)] = Complex64::new(1.0, 0.0);
    let unitary = |g: &Gate| {
        let mut u = DMatrix::<Complex64>::zeros(d, d);
        for b in 0..d {
            let mut s = StateVector::basis(n, b as u64).unwrap();
            s.apply_gate(g, theta).unwrap();
            for (r, a) in s.amplitudes().iter().enumerate() {
                u[(r, b)] = *a;
            }
        }
        u
    };
    for g in &circuit.gates {
        let u = unitary(g);
        rho = &u * rho * u.adjoint();
        let support = g.support();
        let arity = support.count_ones() as usize;
        if arity == 0 {
            continue;
        }
        let ch = PauliChannel::from_noise(noise, arity).unwrap();
        let mut next = DMatrix::<Complex64>::zeros(d, d);
        for (p, e) in &ch.probabilities {
            let m = unitary(&Gate::Pauli(place(p, support)));
            next += (&m * &rho * m.adjoint()) * Complex64::new(*e, 0.0);
        }
        rho = next;
    }
    (h.to_matrix().unwrap() * rho).trace().re
}

#[test]
fn constant_series_is_fixed() {
    let s = series(&[(1.0, -0.7), (2.0, -0.7), (3.0, -0.7)]);
    assert!((extrapolate_linear(&s).mean + 0.7).abs() < 1e-14);
    assert!((extrapolate_exponential(&s).unwrap().mean + 0.7).abs() < 1e-14);
}

#[test]
fn linear_model_is_exact() {
    let s = series(&[(1.0, 0.9), (2.0, 0.8)]);
    assert!((extrapolate_linear(&s).mean - 1.0).abs() < 1e-14);
    let s = series(&[(1.0, 0.9), (1.5, 0.85), (3.0, 0.7)]);
    assert!((extrapolate_linear(&s).mean - 1.0).abs() < 1e-14);
    // Two-point closed form.
    let (y1, y3) = (0.61, 0.4);
    let s = series(&[(1.0, y1), (3.0, y3)]);
    assert!((extrapolate_linear(&s).mean - (3.0 * y1 - y3) / 2.0).abs() < 1e-14);
}

#[test]
fn exponential_model_is_exact() {
    let f = |l: f64| 0.8 * (-0.5 * l).exp();
    let s = series(&[(1.0, f(1.0)), (2.0, f(2.0))]);
    assert!((extrapolate_exponential(&s).unwrap().mean - 0.8).abs() < 1e-12);
    let g = |l: f64| -1.3 * (-0.2 * l).exp();
    let s = series(&[(1.0, g(1.0)), (2.0, g(2.0)), (3.0, g(3.0))]);
    assert!((extrapolate_exponential(&s).unwrap().mean + 1.3).abs() < 1e-12);
    // Two-point closed form y(1)^(l/(l-1)) y(l)^(-1/(l-1)).
    let s = series(&[(1.0, 0.5), (3.0, 0.3)]);
    let closed = 0.5f64.powf(1.5) * 0.3f64.powf(-0.5);
    assert!((extrapolate_exponential(&s).unwrap().mean - closed).abs() < 1e-14);
}

#[test]
fn error_propagation() {
    let s = NoiseScaledSeries::new(vec![(1.0, ShotEstimate { mean: 1.0, std_error: 0.1 }), (2.0, ShotEstimate { mean: 0.9, std_error: 0.1 })]).unwrap();
    assert!((extrapolate_linear(&s).std_error - 0.1 * 5f64.sqrt()).abs() < 1e-14);
    assert!(extrapolate_exponential(&s).unwrap().std_error > 0.0);
}

#[test]
fn invalid_series_rejected() {
    assert!(matches!(NoiseScaledSeries::new(vec![(2.0, est(1.0)), (3.0, est(1.0))]), Err(Error::InvalidScale(_))));
    assert!(matches!(NoiseScaledSeries::new(vec![(1.0, est(1.0)), (1.0, est(1.0))]), Err(Error::InvalidScale(_))));
    assert!(NoiseScaledSeries::new(vec![(1.0, est(1.0))]).is_err());
    let s = series(&[(1.0, 0.2), (2.0, -0.1)]);
    assert_eq!(extrapolate_exponential(&s), Err(Error::SignInconsistent));
}

#[test]
fn noiseless_decomposition_is_identity() {
    for arity in [1, 2] {
        let d = pec_decompose_depolarizing(0.0, arity).unwrap();
        assert!((d.gamma - 1.0).abs() < 1e-14);
        assert!((d.entries[0].probability - 1.0).abs() < 1e-14);
        assert!(d.entries[1..].iter().all(|e| e.probability.abs() < 1e-14));
    }
}

#[test]
fn single_qubit_coefficients_match_closed_forms() {
    for p in [0.1, 0.01, 0.3, 0.77] {
        let d = pec_decompose_depolarizing(p, 1).unwrap();
        assert!((d.gamma - (p + 2.0) / (2.0 - 2.0 * p)).abs() < 1e-12);
        assert!((d.entries[0].probability - (4.0 - p) / (2.0 * p + 4.0)).abs() < 1e-12);
        assert_eq!(d.entries[0].parity, 1);
        for e in &d.entries[1..] {
            assert!((e.probability - p / (2.0 * p + 4.0)).abs() < 1e-12);
            assert_eq!(e.parity, -1);
        }
        let total: f64 = d.entries.iter().map(|e| e.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
    let d = pec_decompose_depolarizing(0.1, 1).unwrap();
    assert!((d.gamma - 2.1 / 1.8).abs() < 1e-12);
    assert!((d.entries[0].probability - 3.9 / 4.2).abs() < 1e-12);
    assert!((d.entries[1].probability - 0.1 / 4.2).abs() < 1e-12);
    assert!(pec_decompose_depolarizing(1.0, 1).is_err());
    assert!(pec_decompose_depolarizing(-0.1, 2).is_err());
}

#[test]
fn two_qubit_parities_follow_weight() {
    let d = pec_decompose_depolarizing(0.05, 2).unwrap();
    assert_eq!(d.entries.len(), 16);
    for e in &d.entries {
        let expect = if e.pauli.weight() == 1 { -1 } else { 1 };
        assert_eq!(e.parity, expect, "{}", e.pauli);
    }
    let g1 = pec_decompose_depolarizing(0.05, 1).unwrap().gamma;
    assert!((d.gamma - g1 * g1).abs() < 1e-12);
}

#[test]
fn inverse_composes_to_identity() {
    let channels = [
        PauliChannel::local(1, 0.2).unwrap(),
        PauliChannel::local(2, 0.075).unwrap(),
        PauliChannel::uniform(2, 0.1).unwrap(),
    ];
    for ch in &channels {
        let d = pec_decompose(ch).unwrap();
        for (a, b) in ch.transfer_eigenvalues().iter().zip(d.transfer_eigenvalues()) {
            assert!((a * b - 1.0).abs() < 1e-12);
        }
        assert!(d.gamma >= 1.0);
    }
    assert!(pec_decompose(&PauliChannel::local(1, 0.75).unwrap()).is_err());
}

#[test]
fn inverse_composes_to_identity_on_density_matrices() {
    let ch = PauliChannel::local(2, 0.06).unwrap();
    let d = pec_decompose(&ch).unwrap();
    let q = d.coefficients();
    let mats: Vec<DMatrix<Complex64>> = pauli_basis(2)
        .iter()
        .map(|p| PauliSum::term(2, *p, Complex64::new(1.0, 0.0)).unwrap().to_matrix().unwrap())
        .collect();
    let mut r = ChaCha8Rng::seed_from_u64(4);
    let mut rho = DMatrix::<Complex64>::from_fn(4, 4, |_, _| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
    rho = &rho * rho.adjoint();
    let tr = rho.trace();
    rho /= tr;
    let mut noisy = DMatrix::<Complex64>::zeros(4, 4);
    for (m, (_, e)) in mats.iter().zip(&ch.probabilities) {
        noisy += m * &rho * m * Complex64::new(*e, 0.0);
    }
    let mut back = DMatrix::<Complex64>::zeros(4, 4);
    for (m, c) in mats.iter().zip(&q) {
        back += m * &noisy * m * Complex64::new(*c, 0.0);
    }
    assert!((back - rho).norm() < 1e-12);
}

#[test]
fn pec_without_noise_is_plain_estimate() {
    let mut c = Circuit::new(1, 1);
    c.push(Gate::Rx(0, Angle::param(0)));
    let noise = NoiseModel::depolarizing(0.0).unwrap();
    let plan = PecPlan::for_noise(&noise).unwrap();
    let e = pec_estimate(&c, &[0.4], &z0(1), &noise, &plan, 10, Measurement::Exact, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert!((e.mean - 0.4f64.cos()).abs() < 1e-12);
    assert!(e.std_error < 1e-12);
}

#[test]
fn pec_recovers_noiseless_value() {
    let mut c = Circuit::new(1, 0);
    c.push(Gate::Rx(0, Angle::Fixed(core::f64::consts::FRAC_PI_3)));
    let noise = NoiseModel::depolarizing(0.05).unwrap();
    let oracle = density_expectation(&c, &[], &noise, &z0(1));
    assert!((oracle - 0.95 * 0.5).abs() < 1e-12);
    let plan = PecPlan::for_noise(&noise).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = pec_estimate(&c, &[], &z0(1), &noise, &plan, 40_000, Measurement::Shots(1), &mut rng).unwrap();
    assert!((m.mean - 0.5).abs() < 3.0 * m.std_error, "{m:?}");
    let raw = estimate_energy(
        &crate::vqe::Ansatz { family: crate::vqe::AnsatzFamily::Rotations, reference: Vec::new(), circuit: c },
        &[],
        &z0(1),
        Measurement::Shots(1),
        Some(&NoisySampling { noise, trajectories: 40_000 }),
        &mut rng,
    )
    .unwrap();
    assert!((raw.mean - oracle).abs() < 4.0 * raw.std_error, "{raw:?}");
}

#[test]
fn pec_matches_density_oracle_on_two_qubits() {
    let mut c = Circuit::new(2, 1);
    c.push(Gate::Ry(0, Angle::param(0)));
    c.push(Gate::Cnot(0, 1));
    c.push(Gate::H(1));
    let h = PauliSum::parse(2, "0.5 * Z0 Z1\n0.3 * X1\n-0.2 * Z1").unwrap();
    let noise = NoiseModel::depolarizing(0.08).unwrap();
    let theta = [0.9];
    let mut ideal = c.run(&theta).unwrap();
    let exact = ideal.expectation(&h).unwrap();
    let oracle = density_expectation(&c, &theta, &noise, &h);
    assert!((oracle - exact).abs() > 0.02);
    let plan = PecPlan::for_noise(&noise).unwrap();
    let m = pec_estimate(&c, &theta, &h, &noise, &plan, 40_000, Measurement::Exact, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    assert!((m.mean - exact).abs() < 3.0 * m.std_error, "{m:?} vs {exact}");
    ideal.normalize().unwrap();
}

#[test]
fn pec_variance_grows_as_gamma_squared() {
    // |+i> has <Z> = 0, so a single-shot sample has variance gamma^2.
    let mut c = Circuit::new(1, 0);
    c.push(Gate::H(0));
    c.push(Gate::S(0));
    let noise = NoiseModel::depolarizing(0.1).unwrap();
    let plan = PecPlan::for_noise(&noise).unwrap();
    let samples = 20_000;
    let m = pec_estimate(&c, &[], &z0(1), &noise, &plan, samples, Measurement::Shots(1), &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    let variance = m.std_error * m.std_error * samples as f64;
    let gamma2 = plan.single.gamma.powi(4);
    assert!((variance / gamma2 - 1.0).abs() < 0.3, "{variance} vs {gamma2}");
}

#[test]
fn channel_oracle_matches_trajectories() {
    let a = build_hardware_efficient(2, 1, Entangler::CnotChain, 0).unwrap();
    let theta: Vec<f64> = (0..a.n_params()).map(|k| 0.3 + 0.2 * k as f64).collect();
    let h = PauliSum::parse(2, "0.5 * Z0 Z1\n0.3 * X0\n-0.4 * Y1").unwrap();
    let noise = NoiseModel::new(0.02, 0.05).unwrap();
    let native = a.full_circuit().compile_native();
    let oracle = density_expectation(&native, &theta, &noise, &h);
    let e = estimate_energy(&a, &theta, &h, Measurement::Exact, Some(&NoisySampling { noise, trajectories: 20_000 }), &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    assert!((e.mean - oracle).abs() < 4.0 * e.std_error, "{e:?} vs {oracle}");
}

#[test]
fn zne_scales_share_errors() {
    let a = build_hardware_efficient(2, 1, Entangler::CnotChain, 0).unwrap();
    let theta: Vec<f64> = (0..a.n_params()).map(|k| 0.1 * k as f64).collect();
    let h = PauliSum::parse(2, "1 * Z0 Z1\n0.5 * X0").unwrap();
    let noisy = NoisySampling { noise: NoiseModel::new(0.0, 0.0).unwrap(), trajectories: 3 };
    let s = zne_series(&a, &theta, &h, &noisy, &[1.0, 2.0], Measurement::Exact, 5).unwrap();
    assert_eq!(s.points()[0].1, s.points()[1].1);
    let noisy = NoisySampling { noise: NoiseModel::new(0.01, 0.02).unwrap(), trajectories: 200 };
    let s1 = zne_series(&a, &theta, &h, &noisy, &[1.0, 2.0, 3.0], Measurement::Exact, 5).unwrap();
    let s2 = zne_series(&a, &theta, &h, &noisy, &[1.0, 2.0, 3.0], Measurement::Exact, 5).unwrap();
    assert_eq!(s1, s2);
    assert!(zne_series(&a, &theta, &h, &noisy, &[0.5, 1.0], Measurement::Exact, 5).is_err());
}

#[test]
fn checks_reject_parity_flips() {
    let hf = StateVector::basis(4, 0b0011).unwrap();
    let checks = [
        StabiliserCheck::number_parity(4, 2),
        StabiliserCheck::spin_up_parity(SpinOrdering::Interleaved, 2, 1),
    ];
    let quiet = NoiseModel::new(0.0, 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let kept = stabiliser_filter(&hf, &checks, &quiet, &mut rng).unwrap().unwrap();
    assert_eq!(kept, hf);
    for q in 0..4 {
        let mut s = hf.clone();
        s.apply_gate(&Gate::X(q), &[]).unwrap();
        for _ in 0..20 {
            assert!(stabiliser_filter(&s, &checks[..1], &quiet, &mut rng).unwrap().is_none());
        }
    }
    // Z errors keep every parity.
    let mut s = hf.clone();
    s.apply_gate(&Gate::Z(0), &[]).unwrap();
    assert!(stabiliser_filter(&s, &checks, &quiet, &mut rng).unwrap().is_some());
}

#[test]
fn spin_masks() {
    let up = StabiliserCheck::spin_up_parity(SpinOrdering::Interleaved, 2, 1);
    let down = StabiliserCheck::spin_down_parity(SpinOrdering::Interleaved, 2, 1);
    assert_eq!(up.parity_qubits, 0b0101);
    assert_eq!(down.parity_qubits, 0b1010);
    let up = StabiliserCheck::spin_up_parity(SpinOrdering::SpinBlocked, 3, 2);
    assert_eq!((up.parity_qubits, up.expected), (0b000111, 0));
}

#[test]
fn noiseless_postselection_keeps_everything() {
    let a = crate::vqe::build_rotations(2, 0b01, &[]).unwrap();
    let theta = vec![0.0; a.n_params()];
    let h = PauliSum::parse(2, "1 * Z0\n0.5 * Z1").unwrap();
    let noisy = NoisySampling { noise: NoiseModel::new(0.0, 0.0).unwrap(), trajectories: 50 };
    let checks = [StabiliserCheck::number_parity(2, 1)];
    let r = stabiliser_postselect(&a, &theta, &h, &checks, &noisy, Measurement::Exact, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    assert_eq!(r.retained_fraction, 1.0);
    assert!((r.mitigated.mean - r.raw.mean).abs() < 1e-14);
    assert!((r.mitigated.mean + 0.5).abs() < 1e-12);
    let wrong = [StabiliserCheck::number_parity(2, 2)];
    assert_eq!(
        stabiliser_postselect(&a, &theta, &h, &wrong, &noisy, Measurement::Exact, &mut ChaCha8Rng::seed_from_u64(1)),
        Err(Error::AllRejected)
    );
}
