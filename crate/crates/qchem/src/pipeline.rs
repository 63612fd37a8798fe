//! Configured end-to-end runs: ingest, reduce, encode, taper, solve.

use std::path::PathBuf;

use qchem_core::encoding::{Encoder, EncodingScheme};
use qchem_core::fermion::{build_molecular_hamiltonian, partition_hamiltonian, uccsd_generators, FermionSum, MolecularIntegrals, SpinOrdering};
use qchem_core::linalg::subspace_eigensolve;
use qchem_core::mitigation::{
    extrapolate_exponential, extrapolate_linear, pec_estimate, stabiliser_postselect, zne_series, PecPlan, StabiliserCheck,
};
use qchem_core::pauli::PauliSum;
use qchem_core::reduction::{
    diagonalize_1rdm, freeze_reduce, rotate_integrals, select_active_space, taper_state, taper_two_qubits, TaperSector,
};
use qchem_core::rng;
use qchem_core::simulator::{qpe_sample, NoiseModel, QpeBackend, StateVector, TwoQubitChannel};
use qchem_core::spectra::{
    deflation_vqe, folded_levels, folded_scan, pauli_expansion, qse_solve, single_qubit_expansion, DeflatedObjective, S_CUTOFF,
};
use qchem_core::vqe::{
    build_hamiltonian_variational, build_hardware_efficient, build_ldca, build_uccsd, build_uccsd_tapered, estimate_energy, optimize, Ansatz,
    Entangler, Measurement, NoisySampling, OptimizerConfig, VariationalParts,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, StageExt};
use crate::fcidump::{parse_fcidump, parse_rdm1};
use crate::fixtures::fixture;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Jw,
    Parity,
    Bk,
    Bktree,
}

impl Encoding {
    pub fn scheme(self) -> EncodingScheme {
        match self {
            Encoding::Jw => EncodingScheme::JordanWigner,
            Encoding::Parity => EncodingScheme::Parity,
            Encoding::Bk => EncodingScheme::BravyiKitaev,
            Encoding::Bktree => EncodingScheme::BravyiKitaevTree,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    /// All spin-up orbitals, then all spin-down. Required for tapering.
    #[default]
    Blocked,
    /// Up and down alternate.
    Interleaved,
}

impl Ordering {
    pub fn spin_ordering(self) -> SpinOrdering {
        match self {
            Ordering::Blocked => SpinOrdering::SpinBlocked,
            Ordering::Interleaved => SpinOrdering::Interleaved,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Source {
    Fixture { name: String },
    Fcidump { path: PathBuf, rdm1: Option<PathBuf> },
}

/// Natural-orbital occupation thresholds: at or above `upper` is frozen,
/// at or below `lower` is dropped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActiveSpaceThresholds {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum AnsatzSpec {
    Uccsd { trotter_steps: usize },
    Hea { layers: usize, cz: bool },
    Hva { steps: usize },
    Ldca { cycles: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerKind {
    NelderMead,
    Spsa,
    GradientDescent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSpec {
    pub kind: OptimizerKind,
    pub max_evals: usize,
    pub tolerance: f64,
}

impl OptimizerSpec {
    pub fn config(&self, seed: u64) -> OptimizerConfig {
        let mut c = match self.kind {
            OptimizerKind::NelderMead => OptimizerConfig::nelder_mead(self.max_evals, self.tolerance),
            OptimizerKind::Spsa => OptimizerConfig::spsa(self.max_evals, self.tolerance, seed),
            OptimizerKind::GradientDescent => OptimizerConfig::gradient_descent(self.max_evals, self.tolerance),
        };
        c.seed = seed;
        c
    }
}

/// Per-gate Pauli insertion probabilities and the trajectory count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub p1: f64,
    pub p2: f64,
    pub local_two_qubit: bool,
    pub trajectories: usize,
}

impl NoiseSpec {
    pub fn model(&self) -> Result<NoiseModel> {
        let mut m = NoiseModel::new(self.p1, self.p2).stage("noise")?;
        if self.local_two_qubit {
            m.two_qubit = TwoQubitChannel::Local;
        }
        Ok(m)
    }

    pub fn sampling(&self) -> Result<NoisySampling> {
        Ok(NoisySampling { noise: self.model()?, trajectories: self.trajectories })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumMethod {
    Exact,
    Qse,
    Deflation,
    Folded,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MitigationTechnique {
    Zne,
    Pec,
    Postselect,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Solver {
    /// Lowest `states` levels of the electron-number sector.
    Exact { states: usize },
    Vqe { ansatz: AnsatzSpec, optimizer: OptimizerSpec, shots: Option<usize>, noise: Option<NoiseSpec> },
    /// Phase estimation on the Hartree-Fock state; `trotter_steps` selects a
    /// Trotterized controlled evolution instead of the exact one.
    Qpe { ancillas: usize, samples: usize, trotter_steps: Option<usize> },
    /// `levels` lowest levels by the chosen method. Variational methods use a
    /// hardware-efficient ansatz with `layers` layers.
    Spectrum { method: SpectrumMethod, levels: usize, layers: usize },
    /// Mitigated energy of the UCCSD state optimized without noise.
    Mitigate { technique: MitigationTechnique, noise: NoiseSpec, lambdas: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub source: Source,
    pub encoding: Encoding,
    #[serde(default)]
    pub ordering: Ordering,
    pub taper: bool,
    pub active_space: Option<ActiveSpaceThresholds>,
    pub solver: Solver,
    pub seed: u64,
}

impl RunConfig {
    pub fn fixture(name: &str, encoding: Encoding, solver: Solver) -> Self {
        RunConfig {
            source: Source::Fixture { name: name.into() },
            encoding,
            ordering: Ordering::Blocked,
            taper: false,
            active_space: None,
            solver,
            seed: 0,
        }
    }
}

/// Sizes after one pipeline stage.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageLog {
    pub stage: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbitals: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub electrons: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qubits: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pauli_terms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameters: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub label: String,
    pub energy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub stages: Vec<StageLog>,
    pub energies: Vec<EnergyRow>,
    /// Best energy so far after each optimizer iteration.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<f64>,
    /// Technique-specific scalars such as the retained fraction.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extras: Vec<(String, f64)>,
}

impl Report {
    pub fn energy(&self, label: &str) -> Option<f64> {
        self.energies.iter().find(|e| e.label == label).map(|e| e.energy)
    }
}

/// Everything downstream stages need: integrals, encoded operator and the
/// reference state, on the possibly tapered register.
#[derive(Clone, Debug)]
pub struct Problem {
    pub integrals: MolecularIntegrals,
    pub fermion: FermionSum,
    pub encoder: Encoder,
    /// Encoded Hamiltonian on `n_qubits` qubits.
    pub hamiltonian: PauliSum,
    pub sector: Option<TaperSector>,
    pub n_qubits: usize,
    /// Hartree-Fock mode occupation.
    pub hf_occupation: u64,
    /// Hartree-Fock basis state of the register.
    pub hf_state: u64,
    pub stages: Vec<StageLog>,
}

fn load_source(source: &Source, ordering: SpinOrdering) -> Result<(MolecularIntegrals, Option<(usize, Vec<f64>)>)> {
    match source {
        Source::Fixture { name } => {
            let f = fixture(name)?;
            Ok((f.integrals(ordering)?, f.density()?))
        }
        Source::Fcidump { path, rdm1 } => {
            let text = std::fs::read_to_string(path)?;
            let ints = parse_fcidump(&text, ordering)?;
            let rdm = match rdm1 {
                Some(p) => Some(parse_rdm1(&std::fs::read_to_string(p)?)?),
                None => None,
            };
            Ok((ints, rdm))
        }
    }
}

/// Ingest, reduce, encode and optionally taper.
pub fn prepare(config: &RunConfig) -> Result<Problem> {
    let ordering = config.ordering.spin_ordering();
    let (mut ints, rdm) = load_source(&config.source, ordering)?;
    let mut stages = vec![StageLog {
        stage: "ingest".into(),
        orbitals: Some(ints.n_orbitals),
        electrons: Some(ints.n_electrons),
        ..Default::default()
    }];

    if let Some(t) = config.active_space {
        let (n, d) = rdm.ok_or_else(|| Error::Config("active-space selection needs a 1-RDM".into()))?;
        if n != ints.n_orbitals {
            return Err(Error::Config(format!("1-RDM is {n}x{n} but there are {} orbitals", ints.n_orbitals)));
        }
        let no = diagonalize_1rdm(n, &d).stage("active space")?;
        let space = select_active_space(&no.noons, t.lower, t.upper).stage("active space")?;
        let rotated = rotate_integrals(&ints, &no.rotation).stage("active space")?;
        ints = freeze_reduce(&rotated, &space.frozen_occupied, &space.removed_virtual).stage("active space")?;
        stages.push(StageLog {
            stage: "active_space".into(),
            orbitals: Some(ints.n_orbitals),
            electrons: Some(ints.n_electrons),
            ..Default::default()
        });
    }

    let m = ints.n_spin_orbitals();
    let fermion = build_molecular_hamiltonian(&ints, 1e-14);
    let encoder = Encoder::new(config.encoding.scheme(), m).stage("encode")?;
    let mut hamiltonian = encoder.encode_operator(&fermion).stage("encode")?;
    hamiltonian.drop_small(1e-12);
    let hf_occupation = ints.hartree_fock_occupation();
    let mut hf_state = encoder.encode_state(hf_occupation);
    stages.push(StageLog {
        stage: "encode".into(),
        qubits: Some(m),
        pauli_terms: Some(hamiltonian.len()),
        ..Default::default()
    });

    let mut sector = None;
    if config.taper {
        if ordering != SpinOrdering::SpinBlocked {
            return Err(Error::Config("tapering needs spin-blocked ordering".into()));
        }
        let s = TaperSector::from_counts(ints.n_electrons, ints.n_up());
        hamiltonian = taper_two_qubits(&hamiltonian, &encoder, s).map_err(|e| match e {
            qchem_core::Error::UnsupportedScheme(m) => Error::Config(m),
            other => Error::Stage { stage: "taper", source: other },
        })?;
        hf_state = taper_state(hf_state, m);
        sector = Some(s);
        stages.push(StageLog {
            stage: "taper".into(),
            qubits: Some(m - 2),
            pauli_terms: Some(hamiltonian.len()),
            ..Default::default()
        });
    }
    let n_qubits = hamiltonian.n_qubits();
    Ok(Problem { integrals: ints, fermion, encoder, hamiltonian, sector, n_qubits, hf_occupation, hf_state, stages })
}

impl Problem {
    /// Register basis states with the molecule's spin-up and spin-down counts.
    pub fn sector_basis(&self) -> Vec<u64> {
        let ints = &self.integrals;
        let m = ints.n_spin_orbitals();
        let up = ints.ordering.up_mask(ints.n_orbitals);
        (0..1u64 << m)
            .filter(|occ| (occ & up).count_ones() as usize == ints.n_up() && (occ & !up).count_ones() as usize == ints.n_down())
            .map(|occ| {
                let q = self.encoder.encode_state(occ);
                if self.sector.is_some() {
                    taper_state(q, m)
                } else {
                    q
                }
            })
            .collect()
    }

    /// Lowest `k` levels in the electron-number sector, with eigenvectors.
    pub fn exact_levels(&self, k: usize) -> Result<qchem_core::linalg::Spectrum> {
        subspace_eigensolve(&self.hamiltonian, &self.sector_basis(), k).stage("exact")
    }

    /// `<HF|H|HF>`: only terms mapping the basis state to itself contribute.
    pub fn hf_energy(&self) -> Result<f64> {
        let b = self.hf_state;
        Ok(self
            .hamiltonian
            .iter()
            .filter_map(|(p, c)| match p.apply_to_basis(b) {
                (phase, t) if t == b => Some((c * phase).re),
                _ => None,
            })
            .sum())
    }

    pub fn ansatz(&self, spec: AnsatzSpec) -> Result<Ansatz> {
        let m = self.integrals.n_spin_orbitals();
        let a = match spec {
            AnsatzSpec::Uccsd { trotter_steps } => {
                let occ: Vec<usize> = (0..m).filter(|p| self.hf_occupation >> p & 1 == 1).collect();
                let vir: Vec<usize> = (0..m).filter(|p| self.hf_occupation >> p & 1 == 0).collect();
                let gens: Vec<FermionSum> = uccsd_generators(m, &occ, &vir, Some(self.integrals.ordering))
                    .stage("ansatz")?
                    .into_iter()
                    .map(|g| g.op)
                    .collect();
                match self.sector {
                    Some(s) => build_uccsd_tapered(&gens, &self.encoder, trotter_steps, self.hf_occupation, s),
                    None => build_uccsd(&gens, &self.encoder, trotter_steps, self.hf_occupation),
                }
            }
            AnsatzSpec::Hea { layers, cz } => {
                let e = if cz { Entangler::CzChain } else { Entangler::CnotChain };
                build_hardware_efficient(self.n_qubits, layers, e, self.hf_state)
            }
            AnsatzSpec::Hva { steps } => {
                let mut parts = VariationalParts::encode(&partition_hamiltonian(&self.fermion), &self.encoder).stage("ansatz")?;
                if let Some(s) = self.sector {
                    let t = |h: &PauliSum| taper_two_qubits(h, &self.encoder, s);
                    parts = VariationalParts {
                        diagonal: t(&parts.diagonal).stage("ansatz")?,
                        hopping: t(&parts.hopping).stage("ansatz")?,
                        exchange: t(&parts.exchange).stage("ansatz")?,
                    };
                }
                build_hamiltonian_variational(&parts, &self.hamiltonian, steps, self.hf_state)
            }
            AnsatzSpec::Ldca { cycles } => build_ldca(self.n_qubits, cycles, self.hf_state),
        };
        a.stage("ansatz")
    }
}

fn row(label: impl Into<String>, energy: f64, std_error: Option<f64>) -> EnergyRow {
    EnergyRow { label: label.into(), energy, std_error }
}

/// Run a configuration end to end. Identical configurations give identical reports.
pub fn run_pipeline(config: &RunConfig) -> Result<Report> {
    let problem = prepare(config)?;
    let mut report = Report {
        config: config.clone(),
        stages: problem.stages.clone(),
        energies: Vec::new(),
        trace: Vec::new(),
        extras: Vec::new(),
    };
    let exact = problem.exact_levels(match &config.solver {
        Solver::Exact { states } => (*states).max(1),
        Solver::Spectrum { levels, .. } => (*levels).max(1),
        _ => 1,
    })?;
    report.energies.push(row("hf", problem.hf_energy()?, None));
    report.energies.push(row("exact", exact.values[0], None));
    let h = &problem.hamiltonian;
    let mut rng = rng::seeded(config.seed);

    match &config.solver {
        Solver::Exact { .. } => {
            for (k, e) in exact.values.iter().enumerate().skip(1) {
                report.energies.push(row(format!("exact_{k}"), *e, None));
            }
        }
        Solver::Vqe { ansatz, optimizer, shots, noise } => {
            let a = problem.ansatz(*ansatz)?;
            report.stages.push(StageLog { stage: "ansatz".into(), parameters: Some(a.n_params()), ..Default::default() });
            let measurement = shots.map_or(Measurement::Exact, Measurement::Shots);
            let sampling = noise.map(|n| n.sampling()).transpose()?;
            let r = optimize(&a, h, &optimizer.config(config.seed), measurement, sampling.as_ref(), &mut rng).stage("vqe")?;
            let at_best = a.prepare(&r.best_params).and_then(|s| s.expectation(h)).stage("vqe")?;
            report.energies.push(row("vqe", r.best_energy, None));
            report.energies.push(row("vqe_exact_at_best", at_best, None));
            if shots.is_some() || sampling.is_some() {
                // The best traced value is biased low by selection; re-estimate independently.
                let fresh = estimate_energy(&a, &r.best_params, h, measurement, sampling.as_ref(), &mut rng).stage("vqe")?;
                report.energies.push(row("vqe_fresh_estimate", fresh.mean, Some(fresh.std_error)));
            }
            let mut best = f64::INFINITY;
            report.trace = r.trace.iter().map(|p| {
                best = best.min(p.energy);
                best
            }).collect();
            report.extras.push(("evaluations".into(), r.evaluations as f64));
            report.extras.push(("shots_used".into(), r.shots_used as f64));
            report.extras.push(("converged".into(), if r.converged { 1.0 } else { 0.0 }));
        }
        Solver::Qpe { ancillas, samples, trotter_steps } => {
            let input = StateVector::basis(problem.n_qubits, problem.hf_state).stage("qpe")?;
            let backend = match trotter_steps {
                Some(s) => QpeBackend::Trotter { steps_per_unit: *s },
                None => QpeBackend::Exact,
            };
            let q = qpe_sample(h, &input, *ancillas, *samples, backend, &mut rng).stage("qpe")?;
            let y = q.mode().ok_or_else(|| Error::Config("no samples drawn".into()))?;
            report.energies.push(row("qpe_mode", q.scaling.energy(q.phase(y)), Some(q.scaling.span / (1u64 << ancillas) as f64)));
            report.extras.push(("mode_probability".into(), q.distribution[y as usize]));
        }
        Solver::Spectrum { method, levels, layers } => spectrum(&problem, *method, *levels, *layers, config.seed, &exact, &mut report)?,
        Solver::Mitigate { technique, noise, lambdas } => mitigate(&problem, *technique, noise, lambdas, config, &mut report)?,
    }
    Ok(report)
}

fn spectrum(
    problem: &Problem,
    method: SpectrumMethod,
    levels: usize,
    layers: usize,
    seed: u64,
    exact: &qchem_core::linalg::Spectrum,
    report: &mut Report,
) -> Result<()> {
    let h = &problem.hamiltonian;
    let ground = StateVector::from_amplitudes(exact.vectors[0].clone()).stage("spectrum")?;
    let found: Vec<f64> = match method {
        SpectrumMethod::Exact => exact.values.clone(),
        SpectrumMethod::Qse => {
            let qubits: Vec<usize> = (0..problem.n_qubits).collect();
            let expansion = if problem.n_qubits <= 3 { pauli_expansion(&qubits) } else { single_qubit_expansion(&qubits) };
            qse_solve(&ground, h, &expansion, S_CUTOFF).stage("qse")?
        }
        SpectrumMethod::Deflation => {
            let a = build_hardware_efficient(problem.n_qubits, layers, Entangler::CnotChain, problem.hf_state).stage("ansatz")?;
            let config = OptimizerConfig { seed, ..OptimizerConfig::gradient_descent(4000, 1e-10) };
            let mut lower = Vec::new();
            let mut out = Vec::new();
            for _ in 0..levels.max(1) {
                let obj = DeflatedObjective::new(h, lower.clone(), None).stage("deflation")?;
                let r = deflation_vqe(&a, &obj, &config).stage("deflation")?;
                let state = a.prepare(&r.best_params).stage("deflation")?;
                out.push(state.expectation(h).stage("deflation")?);
                lower.push(state);
            }
            out
        }
        SpectrumMethod::Folded => {
            let a = build_hardware_efficient(problem.n_qubits, layers, Entangler::CnotChain, problem.hf_state).stage("ansatz")?;
            let (lo, hi) = (exact.values[0], *exact.values.last().expect("nonempty"));
            let pad = 0.1 * (hi - lo).max(0.1);
            let n = 4 * levels.max(2);
            let alphas: Vec<f64> = (0..n).map(|k| lo - pad + (hi - lo + 2.0 * pad) * k as f64 / (n - 1) as f64).collect();
            let config = OptimizerConfig { seed, ..OptimizerConfig::gradient_descent(3000, 1e-12) };
            let points = folded_scan(h, &a, &alphas, &config).stage("folded")?;
            folded_levels(&points, 1e-6, 1.6e-3)
        }
    };
    for (k, e) in found.iter().take(levels.max(1)).enumerate() {
        report.energies.push(row(format!("level_{k}"), *e, None));
    }
    for (k, e) in exact.values.iter().enumerate().skip(1) {
        report.energies.push(row(format!("exact_{k}"), *e, None));
    }
    Ok(())
}

fn mitigate(
    problem: &Problem,
    technique: MitigationTechnique,
    noise: &NoiseSpec,
    lambdas: &[f64],
    config: &RunConfig,
    report: &mut Report,
) -> Result<()> {
    let h = &problem.hamiltonian;
    let a = problem.ansatz(AnsatzSpec::Uccsd { trotter_steps: 1 })?;
    let mut rng = rng::seeded(config.seed);
    let opt = OptimizerConfig::nelder_mead(4000, 1e-12);
    let r = optimize(&a, h, &opt, Measurement::Exact, None, &mut rng).stage("vqe")?;
    let theta = r.best_params;
    report.energies.push(row("noiseless", r.best_energy, None));
    let sampling = noise.sampling()?;
    match technique {
        MitigationTechnique::Zne => {
            let s = zne_series(&a, &theta, h, &sampling, lambdas, Measurement::Exact, config.seed).stage("zne")?;
            let raw = s.unmitigated();
            report.energies.push(row("raw", raw.mean, Some(raw.std_error)));
            let lin = extrapolate_linear(&s);
            report.energies.push(row("linear", lin.mean, Some(lin.std_error)));
            let exp = extrapolate_exponential(&s).stage("zne")?;
            report.energies.push(row("exponential", exp.mean, Some(exp.std_error)));
        }
        MitigationTechnique::Pec => {
            let model = noise.model()?;
            let plan = PecPlan::for_noise(&model).stage("pec")?;
            let circuit = a.full_circuit();
            let raw = estimate_energy(&a, &theta, h, Measurement::Exact, Some(&sampling), &mut rng).stage("pec")?;
            report.energies.push(row("raw", raw.mean, Some(raw.std_error)));
            let m = pec_estimate(&circuit, &theta, h, &model, &plan, noise.trajectories, Measurement::Exact, &mut rng).stage("pec")?;
            report.energies.push(row("pec", m.mean, Some(m.std_error)));
        }
        MitigationTechnique::Postselect => {
            if problem.encoder.scheme() != EncodingScheme::JordanWigner || problem.sector.is_some() {
                return Err(Error::Config("post-selection checks need an untapered Jordan-Wigner register".into()));
            }
            let ints = &problem.integrals;
            let checks = [
                StabiliserCheck::number_parity(ints.n_spin_orbitals(), ints.n_electrons),
                StabiliserCheck::spin_up_parity(ints.ordering, ints.n_orbitals, ints.n_up()),
            ];
            let r = stabiliser_postselect(&a, &theta, h, &checks, &sampling, Measurement::Exact, &mut rng).stage("postselect")?;
            report.energies.push(row("raw", r.raw.mean, Some(r.raw.std_error)));
            report.energies.push(row("postselected", r.mitigated.mean, Some(r.mitigated.std_error)));
            report.extras.push(("retained_fraction".into(), r.retained_fraction));
        }
    }
    Ok(())
}
