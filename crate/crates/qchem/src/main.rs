use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qchem::curve::dissociation_curve;
use qchem::pipeline::{
    prepare, run_pipeline, ActiveSpaceThresholds, AnsatzSpec, Encoding, MitigationTechnique, NoiseSpec, OptimizerKind,
    OptimizerSpec, Ordering, RunConfig, Solver, Source, SpectrumMethod, StageLog,
};
use qchem::{Error, Result};

#[derive(Parser)]
#[command(name = "qchem", version, about = "Qubit Hamiltonians, VQE, QPE and error mitigation for small molecules")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Master seed for every stochastic stage.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Read integrals from an FCIDUMP file.
    #[arg(long, global = true, conflicts_with = "fixture")]
    fcidump: Option<PathBuf>,
    /// Spin-summed 1-RDM matching --fcidump, for active-space selection.
    #[arg(long, global = true, requires = "fcidump")]
    rdm1: Option<PathBuf>,
    /// Built-in fixture name, e.g. h2_sto3g_0.7414 or lih_sto3g_1.4500.
    #[arg(long, global = true)]
    fixture: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Encoding::Jw)]
    encoding: Encoding,
    #[arg(long, global = true, value_enum, default_value_t = Ordering::Blocked)]
    ordering: Ordering,
    /// Remove the two qubits fixed by electron-number and spin-up parity.
    #[arg(long, global = true)]
    taper: bool,
    /// Natural-orbital occupation thresholds `LOWER,UPPER` for the active space.
    #[arg(long, global = true, value_parser = parse_thresholds)]
    active_space: Option<ActiveSpaceThresholds>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnsatzArg {
    Uccsd,
    Hea,
    Hva,
    Ldca,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveMethod {
    Exact,
    Vqe,
}

#[derive(Subcommand)]
enum Command {
    /// Encoded qubit Hamiltonian as JSON.
    Encode,
    /// Tapered qubit Hamiltonian as JSON; implies --taper.
    Taper,
    /// Variational ground-state search.
    Vqe {
        #[arg(long, value_enum, default_value_t = AnsatzArg::Uccsd)]
        ansatz: AnsatzArg,
        /// Trotter steps, layers, steps or cycles, by ansatz.
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = OptimizerKind::NelderMead)]
        optimizer: OptimizerKind,
        #[arg(long, default_value_t = 2000)]
        max_evals: usize,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        /// Shots per Pauli term; exact expectation values when absent.
        #[arg(long)]
        shots: Option<usize>,
        #[command(flatten)]
        noise: NoiseArgs,
        /// Also write the best-so-far energy per evaluation as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Phase estimation from the Hartree-Fock state.
    Qpe {
        #[arg(long, default_value_t = 8)]
        ancillas: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Trotterized controlled evolution; exact when absent.
        #[arg(long)]
        trotter_steps: Option<usize>,
    },
    /// Lowest levels as CSV.
    Spectrum {
        #[arg(long, value_enum, default_value_t = SpectrumMethod::Exact)]
        method: SpectrumMethod,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        /// Layers of the hardware-efficient ansatz for variational methods.
        #[arg(long, default_value_t = 3)]
        layers: usize,
    },
    /// Raw, mitigated and noiseless energies as JSON.
    Mitigate {
        #[arg(long, value_enum, default_value_t = MitigationTechnique::Zne)]
        technique: MitigationTechnique,
        /// Per-gate error probability.
        #[arg(long, default_value_t = 1e-3)]
        p: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        lambdas: Vec<f64>,
        #[arg(long, default_value_t = 2000)]
        trajectories: usize,
    },
    /// Energies across the bond lengths of a fixture series as CSV.
    Curve {
        #[arg(long, default_value = "h2_sto3g")]
        prefix: String,
        #[arg(long, value_enum, default_value_t = CurveMethod::Exact)]
        method: CurveMethod,
    },
}

#[derive(Args)]
struct NoiseArgs {
    /// Error probability after single-qubit gates; enables noisy trajectories.
    #[arg(long)]
    p1: Option<f64>,
    /// Error probability after two-qubit gates.
    #[arg(long)]
    p2: Option<f64>,
    #[arg(long, default_value_t = 100)]
    trajectories: usize,
}

fn parse_thresholds(s: &str) -> std::result::Result<ActiveSpaceThresholds, String> {
    let (a, b) = s.split_once(',').ok_or("expected LOWER,UPPER")?;
    let lower = a.trim().parse().map_err(|e| format!("{e}"))?;
    let upper = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok(ActiveSpaceThresholds { lower, upper })
}

impl Global {
    fn config(&self, solver: Solver) -> RunConfig {
        let source = match &self.fcidump {
            Some(path) => Source::Fcidump { path: path.clone(), rdm1: self.rdm1.clone() },
            None => Source::Fixture { name: self.fixture.clone().unwrap_or_else(|| "h2_sto3g_0.7414".into()) },
        };
        RunConfig {
            source,
            encoding: self.encoding,
            ordering: self.ordering,
            taper: self.taper,
            active_space: self.active_space,
            solver,
            seed: self.seed,
        }
    }
}

#[derive(Serialize)]
struct EncodedOutput {
    stages: Vec<StageLog>,
    qubits: usize,
    terms: Vec<(String, f64, f64)>,
}

fn encoded(config: &RunConfig) -> Result<String> {
    let p = prepare(config)?;
    let terms = p.hamiltonian.iter().map(|(s, c)| (s.to_string(), c.re, c.im)).collect();
    let out = EncodedOutput { stages: p.stages, qubits: p.n_qubits, terms };
    Ok(serde_json::to_string_pretty(&out)? + "\n")
}

fn energies_csv(report: &qchem::pipeline::Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["label", "energy"])?;
    for e in &report.energies {
        w.write_record([e.label.clone(), format!("{}", e.energy)])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn trace_csv(trace: &[f64]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["evaluation", "best_energy"])?;
    for (k, e) in trace.iter().enumerate() {
        w.write_record([(k + 1).to_string(), format!("{e}")])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn run(cli: Cli) -> Result<String> {
    let g = &cli.global;
    let json = |r| -> Result<String> { Ok(serde_json::to_string_pretty(&r)? + "\n") };
    match cli.command {
        Command::Encode => encoded(&g.config(Solver::Exact { states: 1 })),
        Command::Taper => encoded(&RunConfig { taper: true, ..g.config(Solver::Exact { states: 1 }) }),
        Command::Vqe { ansatz, depth, optimizer, max_evals, tolerance, shots, noise, trace } => {
            let ansatz = match ansatz {
                AnsatzArg::Uccsd => AnsatzSpec::Uccsd { trotter_steps: depth },
                AnsatzArg::Hea => AnsatzSpec::Hea { layers: depth, cz: false },
                AnsatzArg::Hva => AnsatzSpec::Hva { steps: depth },
                AnsatzArg::Ldca => AnsatzSpec::Ldca { cycles: depth },
            };
            let noise = (noise.p1.is_some() || noise.p2.is_some()).then(|| NoiseSpec {
                p1: noise.p1.unwrap_or(0.0),
                p2: noise.p2.unwrap_or(0.0),
                local_two_qubit: false,
                trajectories: noise.trajectories,
            });
            let optimizer = OptimizerSpec { kind: optimizer, max_evals, tolerance };
            let report = run_pipeline(&g.config(Solver::Vqe { ansatz, optimizer, shots, noise }))?;
            if let Some(path) = trace {
                std::fs::write(path, trace_csv(&report.trace)?)?;
            }
            json(report)
        }
        Command::Qpe { ancillas, samples, trotter_steps } => {
            json(run_pipeline(&g.config(Solver::Qpe { ancillas, samples, trotter_steps }))?)
        }
        Command::Spectrum { method, levels, layers } => {
            energies_csv(&run_pipeline(&g.config(Solver::Spectrum { method, levels, layers }))?)
        }
        Command::Mitigate { technique, p, lambdas, trajectories } => {
            let noise = NoiseSpec { p1: p, p2: p, local_two_qubit: false, trajectories };
            json(run_pipeline(&g.config(Solver::Mitigate { technique, noise, lambdas }))?)
        }
        Command::Curve { prefix, method } => {
            let solver = match method {
                CurveMethod::Exact => Solver::Exact { states: 1 },
                CurveMethod::Vqe => Solver::Vqe {
                    ansatz: AnsatzSpec::Uccsd { trotter_steps: 1 },
                    optimizer: OptimizerSpec { kind: OptimizerKind::NelderMead, max_evals: 2000, tolerance: 1e-10 },
                    shots: None,
                    noise: None,
                },
            };
            dissociation_curve(&prefix, &g.config(solver))?.to_csv()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.global.out.clone();
    let result = run(cli).and_then(|text| match &out {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
