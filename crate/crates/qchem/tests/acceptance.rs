//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every line is printed even when all
//! criteria pass. Exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_3;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;

use qchem::pipeline::{
    prepare, run_pipeline, ActiveSpaceThresholds, AnsatzSpec, Encoding, MitigationTechnique, NoiseSpec,
    OptimizerKind, OptimizerSpec, Ordering, Report, RunConfig, Solver, SpectrumMethod,
};
use qchem_core::encoding::{bravyi_kitaev_matrix, encode_operator, fenwick_parents, Encoder, EncodingScheme};
use qchem_core::fermion::{FermionSum, Ladder};
use qchem_core::linalg::{exact_eigensolve, hermitian_eigen};
use qchem_core::mitigation::{
    pec_decompose, pec_decompose_depolarizing, pec_estimate, stabiliser_filter, PauliChannel, PecPlan,
    StabiliserCheck,
};
use qchem_core::pauli::{PauliString, PauliSum};
use qchem_core::reduction::taper_state;
use qchem_core::rng;
use qchem_core::simulator::{trotter_evolve, Angle, Circuit, Gate, NoiseModel, StateVector};
use qchem_core::spectra::{qse_solve, single_qubit_expansion, S_CUTOFF};
use qchem_core::vqe::{analytic_gradient, estimate_energy, Ansatz, AnsatzFamily, Measurement};

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;

const CHEMICAL_ACCURACY: f64 = 1.6e-3;
const H2: &str = "h2_sto3g_0.7414";
const LIH: &str = "lih_sto3g_1.4500";

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn exact_solver() -> Solver {
    Solver::Exact { states: 1 }
}

fn config(name: &str, encoding: Encoding, ordering: Ordering, taper: bool, solver: Solver) -> RunConfig {
    RunConfig { ordering, taper, ..RunConfig::fixture(name, encoding, solver) }
}

fn lih_active(encoding: Encoding, taper: bool) -> RunConfig {
    RunConfig {
        taper,
        active_space: Some(ActiveSpaceThresholds { lower: 1e-3, upper: 1.99 }),
        ..RunConfig::fixture(LIH, encoding, exact_solver())
    }
}

fn energy(r: &Report, label: &str) -> Result<f64, String> {
    r.energy(label).ok_or_else(|| format!("report has no `{label}` row"))
}

fn std_error(r: &Report, label: &str) -> Result<f64, String> {
    r.energies
        .iter()
        .find(|e| e.label == label)
        .and_then(|e| e.std_error)
        .ok_or_else(|| format!("report has no error bar on `{label}`"))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_conserving(rng: &mut impl Rng, m: usize) -> Result<FermionSum, qchem_core::Error> {
    let mut op = FermionSum::zero(m);
    let mut z = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    for p in 0..m {
        for q in 0..m {
            op.add_word(vec![Ladder::create(p), Ladder::annihilate(q)], z())?;
        }
    }
    for p in 0..m {
        for q in p + 1..m {
            for r in 0..m {
                for s in r + 1..m {
                    let word = vec![Ladder::create(p), Ladder::create(q), Ladder::annihilate(r), Ladder::annihilate(s)];
                    op.add_word(word, z())?;
                }
            }
        }
    }
    op.add(&op.adjoint())
}

fn c1_isospectral() -> Outcome {
    let mut rng = rng::seeded(1);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let h = random_conserving(&mut rng, 4)?;
        let (oracle, _) = hermitian_eigen(h.occupation_matrix()?);
        for scheme in EncodingScheme::ALL {
            let (vals, _) = hermitian_eigen(encode_operator(&h, scheme)?.to_matrix()?);
            worst = worst.max(max_abs_diff(&vals, &oracle));
        }
    }
    Ok((worst < 1e-10, format!("max eigenvalue deviation {worst:.2e} over 50 operators x 4 schemes")))
}

fn c2_anticommutation() -> Outcome {
    let mut worst = 0.0f64;
    for m in 1..=6 {
        for scheme in EncodingScheme::ALL {
            let enc = Encoder::new(scheme, m)?;
            for p in 0..m {
                for q in 0..m {
                    let a = enc.ladder(p, false)?;
                    let ad = enc.ladder(q, true)?;
                    let anti = a.mul(ad)?.add(&ad.mul(a)?)?.to_matrix()?;
                    for i in 0..anti.nrows() {
                        for j in 0..anti.ncols() {
                            let want = if i == j && p == q { 1.0 } else { 0.0 };
                            worst = worst.max((anti[(i, j)] - c(want)).norm());
                        }
                    }
                }
            }
        }
    }
    Ok((worst < 1e-12, format!("max entry deviation {worst:.2e}, M = 1..6, all schemes")))
}

fn c3_structures() -> Outcome {
    let mut failures = Vec::new();

    let beta8: Vec<u64> = vec![0b1, 0b11, 0b100, 0b1111, 0b1_0000, 0b11_0000, 0b100_0000, 0b1111_1111];
    if bravyi_kitaev_matrix(8) != beta8 {
        failures.push("beta_8");
    }

    // Fen(0,7): 7 -> 3, 3 -> 1, 1 -> 0, 3 -> 2, 7 -> 5, 5 -> 4, 7 -> 6.
    let fen = vec![Some(1), Some(3), Some(3), Some(7), Some(5), Some(7), Some(7), None];
    if fenwick_parents(8) != fen {
        failures.push("Fen(0,7)");
    }

    let parity = Encoder::new(EncodingScheme::Parity, 3)?;
    let mapped: Vec<u64> = [0b001, 0b010, 0b100].iter().map(|&f| parity.encode_state(f)).collect();
    if mapped != [0b111, 0b110, 0b100] {
        failures.push("parity state map");
    }

    let ccpvdz = RunConfig {
        taper: true,
        active_space: Some(ActiveSpaceThresholds { lower: 1e-4, upper: 1.999 }),
        ..RunConfig::fixture("h2_ccpvdz_0.7500", Encoding::Bktree, exact_solver())
    };
    let p = prepare(&ccpvdz)?;
    if p.integrals.n_spin_orbitals() != 18 || p.n_qubits != 16 || p.hf_state != 0b0001_0111_0001_0111 {
        failures.push("BK-tree HF state");
    }
    let direct = taper_state(Encoder::new(EncodingScheme::BravyiKitaevTree, 18)?.encode_state(1 | 1 << 9), 18);
    if direct != 0b0001_0111_0001_0111 {
        failures.push("BK-tree HF state (direct)");
    }

    let p = prepare(&config(H2, Encoding::Jw, Ordering::Interleaved, false, exact_solver()))?;
    let got: BTreeSet<String> = p.hamiltonian.strings().map(|s| s.to_string()).collect();
    let want: BTreeSet<String> = [
        "I", "Z0", "Z1", "Z2", "Z3", "Z0 Z1", "Z0 Z2", "Z1 Z2", "Z0 Z3", "Z1 Z3", "Z2 Z3", "Y0 Y1 X2 X3",
        "X0 Y1 Y2 X3", "Y0 X1 X2 Y3", "X0 X1 Y2 Y3",
    ]
    .iter()
    .map(|s| s.parse::<PauliString>().map(|p| p.to_string()))
    .collect::<Result<_, _>>()?;
    if got != want || p.hamiltonian.len() != 15 {
        failures.push("H2 JW 15-term pattern");
    }

    let detail = if failures.is_empty() {
        "beta_8, Fen(0,7), parity map, BK-tree HF |0001011100010111>, H2 15 terms".to_string()
    } else {
        format!("mismatch: {}", failures.join(", "))
    };
    Ok((failures.is_empty(), detail))
}

fn c4_vqe() -> Outcome {
    let uccsd = AnsatzSpec::Uccsd { trotter_steps: 1 };
    let exact_mode = Solver::Vqe {
        ansatz: uccsd,
        optimizer: OptimizerSpec { kind: OptimizerKind::NelderMead, max_evals: 2000, tolerance: 1e-12 },
        shots: None,
        noise: None,
    };
    let r = run_pipeline(&config(H2, Encoding::Jw, Ordering::Interleaved, false, exact_mode))?;
    let exact = energy(&r, "exact")?;
    let err_exact = (energy(&r, "vqe")? - exact).abs();

    let shot_mode = Solver::Vqe {
        ansatz: uccsd,
        optimizer: OptimizerSpec { kind: OptimizerKind::Spsa, max_evals: 1000, tolerance: 1e-8 },
        shots: Some(10_000),
        noise: None,
    };
    let r = run_pipeline(&config(H2, Encoding::Jw, Ordering::Interleaved, false, shot_mode))?;
    let err_shots = (energy(&r, "vqe_exact_at_best")? - exact).abs();
    let fresh = energy(&r, "vqe_fresh_estimate")? - exact;
    let fresh_se = std_error(&r, "vqe_fresh_estimate")?;

    let ok = err_exact < 1e-6 && err_shots < CHEMICAL_ACCURACY;
    Ok((
        ok,
        format!(
            "exact mode |dE| = {err_exact:.2e}; shot mode (SPSA, 1e4 shots/term) |dE| = {err_shots:.2e} \
             at the final parameters, independent re-estimate {fresh:+.2e} +- {fresh_se:.1e}"
        ),
    ))
}

fn c5_tapering() -> Outcome {
    let mut worst = 0.0f64;
    let mut qubits = Vec::new();
    let pairs = [
        (config(H2, Encoding::Parity, Ordering::Blocked, false, exact_solver()), config(H2, Encoding::Parity, Ordering::Blocked, true, exact_solver())),
        (lih_active(Encoding::Parity, false), lih_active(Encoding::Parity, true)),
    ];
    for (full, tapered) in pairs {
        let (pf, pt) = (prepare(&full)?, prepare(&tapered)?);
        let ef = pf.exact_levels(1)?.values[0];
        let et = pt.exact_levels(1)?.values[0];
        worst = worst.max((ef - et).abs());
        qubits.push(format!("{}->{}", pf.n_qubits, pt.n_qubits));
    }
    let ok = worst < 1e-10 && qubits == ["4->2", "8->6"];
    Ok((ok, format!("qubits {}, max sector ground-energy shift {worst:.2e}", qubits.join(", "))))
}

fn c6_lih_active_space() -> Outcome {
    let full = run_pipeline(&RunConfig::fixture(LIH, Encoding::Jw, exact_solver()))?;
    let reduced_cfg = lih_active(Encoding::Parity, true);
    let reduced = run_pipeline(&reduced_cfg)?;
    let qubits = prepare(&reduced_cfg)?.n_qubits;
    let (ef, er) = (energy(&full, "exact")?, energy(&reduced, "exact")?);
    let gap = (er - ef).abs();
    let ok = gap < 5e-4 && qubits == 6;
    Ok((ok, format!("{qubits}-qubit active space {er:.9} vs 12-qubit FCI {ef:.9}: {:.3} mHa", gap * 1e3)))
}

fn c7_trotter_order() -> Outcome {
    let h = PauliSum::parse(1, "1.0 * X0\n1.0 * Z0")?;
    let psi0 = StateVector::zero(1)?;
    let t = 1.0;
    // exp(-i (X + Z) t) = cos(sqrt2 t) I - i sin(sqrt2 t) (X + Z) / sqrt2
    let w = std::f64::consts::SQRT_2 * t;
    let (cs, sn) = (w.cos(), w.sin() / std::f64::consts::SQRT_2);
    let exact = [Complex64::new(cs, -sn), Complex64::new(0.0, -sn)];
    let steps = [8usize, 16, 32, 64, 128, 256];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &n in &steps {
        let s = trotter_evolve(&h, &psi0, t, n)?;
        let err: f64 = s.amplitudes().iter().zip(&exact).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        xs.push((t / n as f64).ln());
        ys.push(err.ln());
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(((slope - 1.0).abs() <= 0.1, format!("log-log slope of error vs step size {slope:.4}")))
}

fn c8_gradients() -> Outcome {
    let p = prepare(&config(H2, Encoding::Jw, Ordering::Interleaved, false, exact_solver()))?;
    let h = &p.hamiltonian;
    let specs = [
        AnsatzSpec::Uccsd { trotter_steps: 2 },
        AnsatzSpec::Hea { layers: 2, cz: false },
        AnsatzSpec::Hva { steps: 2 },
        AnsatzSpec::Ldca { cycles: 2 },
    ];
    let mut rng = rng::seeded(8);
    let eps = 1e-5;
    let mut worst = 0.0f64;
    for spec in specs {
        let a = p.ansatz(spec)?;
        let e = |t: &[f64]| a.prepare(t).and_then(|s| s.expectation(h));
        for _ in 0..20 {
            let theta: Vec<f64> = (0..a.n_params()).map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).collect();
            let g = analytic_gradient(&a, &theta, h)?;
            for k in 0..theta.len() {
                let (mut up, mut down) = (theta.clone(), theta.clone());
                up[k] += eps;
                down[k] -= eps;
                let fd = (e(&up)? - e(&down)?) / (2.0 * eps);
                worst = worst.max((g[k] - fd).abs());
            }
        }
    }

    let mut circuit = Circuit::new(1, 1);
    circuit.push(Gate::Rx(0, Angle::param(0)));
    let toy = Ansatz { family: AnsatzFamily::Rotations, reference: Vec::new(), circuit };
    let y = PauliSum::parse(1, "1.0 * Y0")?;
    let d0 = analytic_gradient(&toy, &[0.0], &y)?[0];

    let ok = worst < 1e-6 && (d0 + 1.0).abs() < 1e-12;
    Ok((ok, format!("max |analytic - central FD| {worst:.2e} over 4 families x 20 points; toy dE/dtheta(0) = {d0}")))
}

fn c9_shot_scaling() -> Outcome {
    let p = prepare(&config(H2, Encoding::Jw, Ordering::Interleaved, false, exact_solver()))?;
    let a = p.ansatz(AnsatzSpec::Uccsd { trotter_steps: 1 })?;
    let theta = vec![0.05, -0.02, 0.1];
    let mut rng = rng::seeded(9);
    let base = estimate_energy(&a, &theta, &p.hamiltonian, Measurement::Shots(2500), None, &mut rng)?;
    let more = estimate_energy(&a, &theta, &p.hamiltonian, Measurement::Shots(10_000), None, &mut rng)?;
    let ratio = more.std_error / base.std_error;
    Ok(((ratio - 0.5).abs() <= 0.1, format!("std_error {:.3e} -> {:.3e} for 4x shots, ratio {ratio:.3}", base.std_error, more.std_error)))
}

fn mitigation_errors(technique: MitigationTechnique, p: f64, trajectories: usize, label: &str) -> Result<Vec<(f64, f64)>, Box<dyn std::error::Error>> {
    let noise = NoiseSpec { p1: p, p2: p, local_two_qubit: false, trajectories };
    let solver = Solver::Mitigate { technique, noise, lambdas: vec![1.0, 2.0, 3.0] };
    let mut out = Vec::new();
    for seed in 0..10 {
        let cfg = RunConfig { seed, ..config(H2, Encoding::Jw, Ordering::Interleaved, false, solver.clone()) };
        let r = run_pipeline(&cfg)?;
        let ideal = energy(&r, "noiseless")?;
        out.push(((energy(&r, "raw")? - ideal).abs(), (energy(&r, label)? - ideal).abs()));
    }
    Ok(out)
}

fn c10_extrapolation() -> Outcome {
    let errors = mitigation_errors(MitigationTechnique::Zne, 1e-3, 10_000, "exponential")?;
    let wins = errors.iter().filter(|(raw, mitigated)| *mitigated <= raw / 3.0).count();
    let mean_raw = errors.iter().map(|e| e.0).sum::<f64>() / 10.0;
    let mean_mit = errors.iter().map(|e| e.1).sum::<f64>() / 10.0;
    Ok((wins >= 7, format!("{wins}/10 seeds with exponential error <= raw/3 (mean |dE| raw {mean_raw:.2e}, mitigated {mean_mit:.2e})")))
}

fn c11_pec() -> Outcome {
    let mut circuit = Circuit::new(1, 0);
    circuit.push(Gate::Rx(0, Angle::Fixed(FRAC_PI_3)));
    let z = PauliSum::parse(1, "1.0 * Z0")?;
    let noise = NoiseModel::depolarizing(0.05)?;
    let plan = PecPlan::for_noise(&noise)?;
    let mut rng = rng::seeded(11);
    let m = pec_estimate(&circuit, &[], &z, &noise, &plan, 40_000, Measurement::Shots(1), &mut rng)?;
    let within = (m.mean - 0.5).abs() < 3.0 * m.std_error;

    let mut composition = 0.0f64;
    for arity in [1, 2] {
        for channel in [PauliChannel::from_noise(&noise, arity)?, PauliChannel::local(arity, 0.1)?, PauliChannel::uniform(arity, 0.1)?] {
            let inverse = pec_decompose(&channel)?;
            for (l, mu) in channel.transfer_eigenvalues().iter().zip(inverse.transfer_eigenvalues()) {
                composition = composition.max((l * mu - 1.0).abs());
            }
        }
    }

    let d = pec_decompose_depolarizing(0.1, 1)?;
    let round4 = |x: f64| (x * 1e4).round() / 1e4;
    let p1 = d.entries[0].probability;
    let p2 = d.entries[1].probability;
    let coeffs = round4(d.gamma) == 1.1667
        && round4(p1) == 0.9286
        && d.entries[1..].iter().all(|e| round4(e.probability) == 0.0238 && e.parity == -1)
        && (p2 - 0.02381).abs() < 5e-6;

    let ok = within && composition < 1e-12 && coeffs;
    Ok((
        ok,
        format!(
            "<Z> = {:.4} +- {:.4} (target 0.5); composition residual {composition:.1e}; \
             p=0.1: gamma {:.4}, p1 {p1:.4}, p2 {p2:.5}",
            m.mean, m.std_error, d.gamma
        ),
    ))
}

fn c12_postselection() -> Outcome {
    let p = prepare(&config(H2, Encoding::Jw, Ordering::Interleaved, false, exact_solver()))?;
    let ground = StateVector::from_amplitudes(p.exact_levels(1)?.vectors[0].clone())?;
    let check = [StabiliserCheck::number_parity(4, 2)];
    let quiet = NoiseModel::new(0.0, 0.0)?;
    let mut rng = rng::seeded(12);
    let mut rejected = 0;
    let mut injected = 0;
    for q in 0..4 {
        for _ in 0..25 {
            let mut s = ground.clone();
            s.apply_gate(&Gate::X(q), &[])?;
            injected += 1;
            if stabiliser_filter(&s, &check, &quiet, &mut rng)?.is_none() {
                rejected += 1;
            }
        }
    }

    let errors = mitigation_errors(MitigationTechnique::Postselect, 2e-3, 2000, "postselected")?;
    let wins = errors.iter().filter(|(raw, mitigated)| mitigated < raw).count();
    let ok = rejected == injected && wins >= 8;
    Ok((ok, format!("{rejected}/{injected} injected X errors rejected; post-selection beats raw on {wins}/10 seeds")))
}

fn c13_qse() -> Outcome {
    let cfg = config(H2, Encoding::Parity, Ordering::Blocked, true, Solver::Spectrum { method: SpectrumMethod::Qse, levels: 4, layers: 1 });
    let r = run_pipeline(&cfg)?;
    let mut full = 0.0f64;
    for k in 0..4 {
        let oracle = if k == 0 { energy(&r, "exact")? } else { energy(&r, &format!("exact_{k}"))? };
        full = full.max((energy(&r, &format!("level_{k}"))? - oracle).abs());
    }

    let p = prepare(&cfg)?;
    let dense = exact_eigensolve(&p.hamiltonian, 4)?;
    let ground = StateVector::from_amplitudes(p.exact_levels(1)?.vectors[0].clone())?;
    let local = qse_solve(&ground, &p.hamiltonian, &single_qubit_expansion(&[0, 1]), S_CUTOFF)?;
    let local_err = max_abs_diff(&local, &dense.values);

    let ok = full < 1e-8 && local.len() == 4 && local_err < CHEMICAL_ACCURACY;
    Ok((ok, format!("full Pauli expansion max error {full:.2e}; {{I,X,Y,Z}} per qubit: {} levels, max error {local_err:.2e}", local.len())))
}

fn c14_qpe() -> Outcome {
    let cfg = config(H2, Encoding::Parity, Ordering::Blocked, true, Solver::Qpe { ancillas: 10, samples: 1000, trotter_steps: None });
    let r = run_pipeline(&cfg)?;
    let (mode, exact) = (energy(&r, "qpe_mode")?, energy(&r, "exact")?);
    let bin = std_error(&r, "qpe_mode")?;
    let off = (mode - exact).abs();
    Ok((off <= bin, format!("mode {mode:.6} vs oracle {exact:.6}: {:.2} bins (bin {bin:.2e} Ha)", off / bin)))
}

fn c15_excited() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for method in [SpectrumMethod::Deflation, SpectrumMethod::Folded] {
        let cfg = config(H2, Encoding::Parity, Ordering::Blocked, true, Solver::Spectrum { method, levels: 2, layers: 3 });
        let r = run_pipeline(&cfg)?;
        let err = (energy(&r, "level_1")? - energy(&r, "exact_1")?).abs();
        ok &= err < CHEMICAL_ACCURACY;
        parts.push(format!("{method:?} |E1 error| {err:.2e}"));
    }
    Ok((ok, parts.join("; ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 15] = [
        ("encoding isospectrality", c1_isospectral),
        ("anticommutation relations", c2_anticommutation),
        ("pinned encoding structures", c3_structures),
        ("H2 UCCSD-VQE ground state", c4_vqe),
        ("two-qubit tapering", c5_tapering),
        ("LiH active space", c6_lih_active_space),
        ("Trotter order", c7_trotter_order),
        ("gradient fidelity", c8_gradients),
        ("sampling statistics", c9_shot_scaling),
        ("zero-noise extrapolation", c10_extrapolation),
        ("probabilistic error cancellation", c11_pec),
        ("stabiliser post-selection", c12_postselection),
        ("subspace expansion", c13_qse),
        ("phase estimation", c14_qpe),
        ("excited states", c15_excited),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !pass {
            failed += 1;
        }
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("{verdict} {:>2} {name}: {detail} [{:.1}s]", i + 1, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
