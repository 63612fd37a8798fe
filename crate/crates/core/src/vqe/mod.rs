//! Variational eigensolver: ansatz circuits, energy estimates, gradients,
//! penalty terms and the classical optimizers.

mod optimize;

pub use optimize::{minimize, optimize, Method, OptimizerConfig, SpsaGains, TracePoint, VqeResult};

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::encoding::Encoder;
use crate::error::{Error, Result};
use crate::fermion::{FermionSum, HamiltonianParts};
use crate::linalg::HERMITIAN_TOL;
use crate::reduction::{taper_state, taper_two_qubits, TaperSector};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::rng;
use crate::simulator::{run_trajectory, sample_expectation, Angle, Circuit, Gate, NoiseModel, ShotEstimate, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnsatzFamily {
    Uccsd,
    HardwareEfficient,
    HamiltonianVariational,
    Ldca,
    /// One parameter per listed Pauli rotation.
    Rotations,
}

impl AnsatzFamily {
    pub fn name(self) -> &'static str {
        match self {
            AnsatzFamily::Uccsd => "uccsd",
            AnsatzFamily::HardwareEfficient => "hea",
            AnsatzFamily::HamiltonianVariational => "hva",
            AnsatzFamily::Ldca => "ldca",
            AnsatzFamily::Rotations => "rotations",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entangler {
    CnotChain,
    CzChain,
}

/// A reference preparation followed by a parametrized circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct Ansatz {
    pub family: AnsatzFamily,
    /// Parameter-free X gates preparing the reference bitstring from `|0...0>`.
    pub reference: Vec<Gate>,
    pub circuit: Circuit,
}

fn reference_gates(bits: u64, n: usize) -> Result<Vec<Gate>> {
    if n < 64 && bits >> n != 0 {
        return Err(Error::InvalidIndex { index: 63 - bits.leading_zeros() as usize, bound: n });
    }
    Ok((0..n).filter(|q| bits >> q & 1 == 1).map(Gate::X).collect())
}

impl Ansatz {
    pub fn n_qubits(&self) -> usize {
        self.circuit.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.circuit.n_params
    }

    /// `U(theta)|ref>`.
    pub fn prepare(&self, theta: &[f64]) -> Result<StateVector> {
        let mut s = StateVector::zero(self.n_qubits())?;
        for g in &self.reference {
            s.apply_gate(g, &[])?;
        }
        self.circuit.apply(&mut s, theta)?;
        Ok(s)
    }

    /// Reference and variational gates as a single circuit on `|0...0>`.
    pub fn full_circuit(&self) -> Circuit {
        let mut c = Circuit::new(self.n_qubits(), self.n_params());
        c.gates.extend(self.reference.iter().cloned());
        c.gates.extend(self.circuit.gates.iter().cloned());
        c
    }

    /// Zeros for UCCSD and rotation lists, which start at the reference.
    /// Other families draw uniformly from `[-0.01, 0.01]` so the start is not
    /// an exact stationary point.
    pub fn initial_params(&self, seed: u64) -> Vec<f64> {
        match self.family {
            AnsatzFamily::Uccsd | AnsatzFamily::Rotations => vec![0.0; self.n_params()],
            _ => {
                let mut r = rng::seeded(seed);
                (0..self.n_params()).map(|_| r.gen_range(-0.01..=0.01)).collect()
            }
        }
    }
}

/// Group of Pauli exponentials `prod_j exp(i theta factor c_j P_j)` sharing one parameter.
fn push_group(circuit: &mut Circuit, h: &PauliSum, index: usize, factor: f64) {
    for (p, c) in h.iter() {
        if !p.is_identity() {
            circuit.push(Gate::PauliExp(*p, Angle::Param { index, scale: factor * c.re }));
        }
    }
}

/// Trotterized `prod_k exp(theta_k G_k)` over encoded anti-Hermitian generators.
///
/// Each generator contributes its Pauli strings `c_j P_j` with `c_j = i a_j`
/// as `exp(i theta a_j / steps P_j)`; the strings of one generator commute.
pub fn build_uccsd(
    generators: &[FermionSum],
    encoder: &Encoder,
    trotter_steps: usize,
    hf_occupation: u64,
) -> Result<Ansatz> {
    let n = encoder.n_modes();
    let encoded = encode_generators(generators, encoder)?;
    uccsd_from_encoded(&encoded, n, trotter_steps, encoder.encode_state(hf_occupation))
}

/// [`build_uccsd`] on the register left after two-qubit tapering.
///
/// Generators conserve both tapered parities, so each encoded generator is
/// tapered like the Hamiltonian.
pub fn build_uccsd_tapered(
    generators: &[FermionSum],
    encoder: &Encoder,
    trotter_steps: usize,
    hf_occupation: u64,
    sector: TaperSector,
) -> Result<Ansatz> {
    let m = encoder.n_modes();
    let encoded = encode_generators(generators, encoder)?
        .iter()
        .map(|g| taper_two_qubits(g, encoder, sector))
        .collect::<Result<Vec<_>>>()?;
    let reference = taper_state(encoder.encode_state(hf_occupation), m);
    uccsd_from_encoded(&encoded, m - 2, trotter_steps, reference)
}

fn encode_generators(generators: &[FermionSum], encoder: &Encoder) -> Result<Vec<PauliSum>> {
    let n = encoder.n_modes();
    let mut encoded = Vec::with_capacity(generators.len());
    for g in generators {
        if g.n_modes() != n {
            return Err(Error::DimensionMismatch { expected: n, found: g.n_modes() });
        }
        let p = encoder.encode_operator(g)?;
        let residual = p.anti_hermiticity_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::NotAntiHermitian { residual });
        }
        encoded.push(p);
    }
    Ok(encoded)
}

fn uccsd_from_encoded(encoded: &[PauliSum], n: usize, trotter_steps: usize, reference: u64) -> Result<Ansatz> {
    if trotter_steps == 0 {
        return Err(Error::InvalidThreshold("trotter_steps must be positive".into()));
    }
    let mut circuit = Circuit::new(n, encoded.len());
    let step = 1.0 / trotter_steps as f64;
    for _ in 0..trotter_steps {
        for (k, g) in encoded.iter().enumerate() {
            for (p, c) in g.iter() {
                if !p.is_identity() {
                    circuit.push(Gate::PauliExp(*p, Angle::Param { index: k, scale: c.im * step }));
                }
            }
        }
    }
    Ok(Ansatz { family: AnsatzFamily::Uccsd, reference: reference_gates(reference, n)?, circuit })
}

/// `prod_k exp(i theta_k c_k P_k)`, one parameter per rotation, applied in list order.
pub fn build_rotations(n: usize, reference: u64, rotations: &[(PauliString, f64)]) -> Result<Ansatz> {
    let mut circuit = Circuit::new(n, rotations.len());
    for (k, (p, c)) in rotations.iter().enumerate() {
        if let Some(q) = p.max_qubit() {
            if q >= n {
                return Err(Error::InvalidIndex { index: q, bound: n });
            }
        }
        circuit.push(Gate::PauliExp(*p, Angle::Param { index: k, scale: *c }));
    }
    Ok(Ansatz { family: AnsatzFamily::Rotations, reference: reference_gates(reference, n)?, circuit })
}

/// Ry and Rz on every qubit, `layers` times separated by an entangling
/// ladder, plus a final rotation layer: `2 n (layers + 1)` parameters.
pub fn build_hardware_efficient(n: usize, layers: usize, entangler: Entangler, reference: u64) -> Result<Ansatz> {
    if layers == 0 {
        return Err(Error::InvalidThreshold("hardware-efficient ansatz needs at least one layer".into()));
    }
    let mut circuit = Circuit::new(n, 2 * n * (layers + 1));
    let mut k = 0;
    for l in 0..=layers {
        for q in 0..n {
            circuit.push(Gate::Ry(q, Angle::param(k)));
            k += 1;
        }
        for q in 0..n {
            circuit.push(Gate::Rz(q, Angle::param(k)));
            k += 1;
        }
        if l < layers {
            for q in 1..n {
                circuit.push(match entangler {
                    Entangler::CnotChain => Gate::Cnot(q - 1, q),
                    Entangler::CzChain => Gate::Cz(q - 1, q),
                });
            }
        }
    }
    Ok(Ansatz { family: AnsatzFamily::HardwareEfficient, reference: reference_gates(reference, n)?, circuit })
}

/// Qubit images of the diagonal, hopping and exchange groups.
#[derive(Clone, Debug, PartialEq)]
pub struct VariationalParts {
    pub diagonal: PauliSum,
    pub hopping: PauliSum,
    pub exchange: PauliSum,
}

impl VariationalParts {
    pub fn encode(parts: &HamiltonianParts, encoder: &Encoder) -> Result<Self> {
        Ok(VariationalParts {
            diagonal: encoder.encode_operator(&parts.diagonal)?,
            hopping: encoder.encode_operator(&parts.hopping)?,
            exchange: encoder.encode_operator(&parts.exchange)?,
        })
    }
}

/// `steps` repetitions of
/// `U_ex(t_ex/2) U_h(t_h/2) U_d(t_d) U_h(t_h/2) U_ex(t_ex/2)` with
/// `U_i(t) = exp(i t H_i)` Trotterized inside each group.
///
/// Parameters of step `b` are `3b` (exchange), `3b + 1` (hopping) and
/// `3b + 2` (diagonal). The groups must add up to `target` apart from the
/// identity term.
pub fn build_hamiltonian_variational(
    parts: &VariationalParts,
    target: &PauliSum,
    steps: usize,
    reference: u64,
) -> Result<Ansatz> {
    let n = target.n_qubits();
    let total = parts.diagonal.add(&parts.hopping)?.add(&parts.exchange)?;
    let residual = total.sub(target)?.one_norm_without_identity();
    if residual > HERMITIAN_TOL {
        return Err(Error::PartitionIncomplete { residual });
    }
    for part in [&parts.diagonal, &parts.hopping, &parts.exchange] {
        let residual = part.hermiticity_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
    }
    let mut circuit = Circuit::new(n, 3 * steps);
    for b in 0..steps {
        push_group(&mut circuit, &parts.exchange, 3 * b, 0.5);
        push_group(&mut circuit, &parts.hopping, 3 * b + 1, 0.5);
        push_group(&mut circuit, &parts.diagonal, 3 * b + 2, 1.0);
        push_group(&mut circuit, &parts.hopping, 3 * b + 1, 0.5);
        push_group(&mut circuit, &parts.exchange, 3 * b, 0.5);
    }
    Ok(Ansatz { family: AnsatzFamily::HamiltonianVariational, reference: reference_gates(reference, n)?, circuit })
}

/// Low-depth circuit ansatz: an Rz layer, then per cycle the block
/// `R^{-YX} R^{XY} R^{ZZ} R^{-YY} R^{XX}` on even neighbour pairs and then
/// odd pairs, with `R^{+-AB}(t) = exp(+-i t A_a B_b)` and independent angles.
pub fn build_ldca(n: usize, cycles: usize, reference: u64) -> Result<Ansatz> {
    if n < 2 {
        return Err(Error::InvalidThreshold("LDCA needs at least two qubits".into()));
    }
    let pairs: Vec<usize> = (0..n - 1).step_by(2).chain((1..n - 1).step_by(2)).collect();
    let mut circuit = Circuit::new(n, n + 5 * (n - 1) * cycles);
    for q in 0..n {
        circuit.push(Gate::Rz(q, Angle::param(q)));
    }
    // Application order, rightmost factor first.
    let block = [(Pauli::X, Pauli::X, 1.0), (Pauli::Y, Pauli::Y, -1.0), (Pauli::Z, Pauli::Z, 1.0), (Pauli::X, Pauli::Y, 1.0), (Pauli::Y, Pauli::X, -1.0)];
    let mut k = n;
    for _ in 0..cycles {
        for &a in &pairs {
            for &(pa, pb, sign) in &block {
                let p = PauliString::from_letters(&[(a, pa), (a + 1, pb)])?;
                circuit.push(Gate::PauliExp(p, Angle::Param { index: k, scale: sign }));
                k += 1;
            }
        }
    }
    Ok(Ansatz { family: AnsatzFamily::Ldca, reference: reference_gates(reference, n)?, circuit })
}

/// How each expectation value is read out.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Measurement {
    Exact,
    /// Shots per non-identity Pauli term.
    Shots(usize),
}

/// Noisy execution: average over independent error trajectories.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoisySampling {
    pub noise: NoiseModel,
    pub trajectories: usize,
}

fn check_operator(h: &PauliSum, n: usize) -> Result<()> {
    if h.n_qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, found: h.n_qubits() });
    }
    let residual = h.hermiticity_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

/// `<psi(theta)|H|psi(theta)>` by exact evaluation or Hamiltonian averaging.
///
/// With noise, the circuit is compiled to one- and two-qubit gates and run
/// `trajectories` times; the estimate is the trajectory mean and the error
/// is the spread over trajectories (the shot error when only one is run).
pub fn estimate_energy<R: Rng + ?Sized>(
    ansatz: &Ansatz,
    theta: &[f64],
    h: &PauliSum,
    measurement: Measurement,
    noise: Option<&NoisySampling>,
    rng: &mut R,
) -> Result<ShotEstimate> {
    check_operator(h, ansatz.n_qubits())?;
    let read = |s: &StateVector, rng: &mut R| match measurement {
        Measurement::Exact => Ok(ShotEstimate::exact(s.expectation(h)?)),
        Measurement::Shots(k) => sample_expectation(s, h, k, rng),
    };
    let Some(noisy) = noise else {
        let s = ansatz.prepare(theta)?;
        return read(&s, rng);
    };
    if noisy.trajectories == 0 {
        return Err(Error::InvalidThreshold("at least one trajectory is required".into()));
    }
    let native = ansatz.full_circuit().compile_native();
    let mut values = Vec::with_capacity(noisy.trajectories);
    let mut last = ShotEstimate::exact(0.0);
    for _ in 0..noisy.trajectories {
        let mut s = StateVector::zero(ansatz.n_qubits())?;
        run_trajectory(&native, theta, &mut s, &noisy.noise, rng)?;
        last = read(&s, rng)?;
        values.push(last.mean);
    }
    if values.len() == 1 {
        return Ok(last);
    }
    Ok(mean_and_error(&values))
}

/// Sample mean with the standard error of the mean.
pub fn mean_and_error(values: &[f64]) -> ShotEstimate {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return ShotEstimate { mean, std_error: 0.0 };
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    ShotEstimate { mean, std_error: (var / n).sqrt() }
}

fn has_parameter(g: &Gate) -> bool {
    matches!(
        g,
        Gate::Rx(_, Angle::Param { .. })
            | Gate::Ry(_, Angle::Param { .. })
            | Gate::Rz(_, Angle::Param { .. })
            | Gate::PauliExp(_, Angle::Param { .. })
            | Gate::ControlledPauliExp(_, _, Angle::Param { .. })
    )
}

/// Exact `dE/dtheta` on the statevector.
///
/// For a gate `exp(i phi P)` with `phi = s theta_k` the derivative inserts
/// `i s P` after that gate. Sweeping the circuit backwards with the
/// back-propagated `H|psi>` gives every such overlap in one pass.
pub fn analytic_gradient(ansatz: &Ansatz, theta: &[f64], h: &PauliSum) -> Result<Vec<f64>> {
    check_operator(h, ansatz.n_qubits())?;
    gradient_with(ansatz, theta, |psi| h.apply(psi.amplitudes()))
}

/// Gradient of `<psi|A|psi>` for a Hermitian `A` given by its action on the
/// prepared state.
pub fn gradient_with<F>(ansatz: &Ansatz, theta: &[f64], apply: F) -> Result<Vec<f64>>
where
    F: FnOnce(&StateVector) -> Result<Vec<Complex64>>,
{
    if theta.len() != ansatz.n_params() {
        return Err(Error::ParameterMismatch { expected: ansatz.n_params(), found: theta.len() });
    }
    let mut grad = vec![0.0; ansatz.n_params()];
    let mut phi = ansatz.prepare(theta)?;
    let mut apsi = apply(&phi)?;
    if apsi.len() != phi.amplitudes().len() {
        return Err(Error::DimensionMismatch { expected: phi.amplitudes().len(), found: apsi.len() });
    }
    let scale = apsi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if scale == 0.0 {
        return Ok(grad);
    }
    apsi.iter_mut().for_each(|a| *a /= scale);
    let mut lam = StateVector::from_amplitudes(apsi)?;
    for g in ansatz.circuit.gates.iter().rev() {
        match g.parametric_generator() {
            Some((p, Angle::Param { index, scale: s })) => {
                let mut dp = phi.clone();
                dp.apply_pauli(&p)?;
                grad[index] += 2.0 * scale * (lam.inner(&dp) * Complex64::new(0.0, s)).re;
            }
            _ if has_parameter(g) => return Err(Error::UnsupportedGate(alloc::format!("{g:?}"))),
            _ => {}
        }
        let inv = g.inverse();
        phi.apply_gate(&inv, theta)?;
        lam.apply_gate(&inv, theta)?;
    }
    Ok(grad)
}

/// A soft constraint `weight (Q - target)^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub op: PauliSum,
    pub target: f64,
    pub weight: f64,
}

/// `H + sum_j beta_j (Q_j - q_j I)^2`.
pub fn penalty_hamiltonian(h: &PauliSum, constraints: &[Constraint]) -> Result<PauliSum> {
    let n = h.n_qubits();
    let mut out = h.clone();
    for c in constraints {
        if !(c.weight > 0.0) {
            return Err(Error::InvalidThreshold(alloc::format!("penalty weight must be positive, got {}", c.weight)));
        }
        check_operator(&c.op, n)?;
        let d = c.op.sub(&PauliSum::identity(n, Complex64::new(c.target, 0.0)))?;
        out = out.add(&d.mul(&d)?.scale(Complex64::new(c.weight, 0.0)))?;
    }
    out.drop_small(1e-12);
    Ok(out)
}
