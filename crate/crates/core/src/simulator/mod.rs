//! Dense statevector simulation.

mod evolution;
mod noise;
mod qpe;
mod sampling;

pub use evolution::{adiabatic_prepare, exact_evolve, imaginary_time_evolve, trotter_evolve};
pub use noise::{run_trajectory, NoiseModel, TwoQubitChannel};
pub use qpe::{qpe_sample, QpeBackend, QpeResult, QpeScaling};
pub use sampling::{sample_expectation, sample_string, ShotEstimate};

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

/// Largest register the statevector accepts.
pub const MAX_STATE_QUBITS: usize = 24;

/// Amplitudes of an `n`-qubit register, index bit `k` is qubit `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, b: u64) -> Result<Self> {
        if n > MAX_STATE_QUBITS {
            return Err(Error::TooLarge { n, limit: MAX_STATE_QUBITS });
        }
        if n < 64 && b >> n != 0 {
            return Err(Error::InvalidIndex { index: 63 - b.leading_zeros() as usize, bound: n });
        }
        let mut amps = vec![Complex64::default(); 1 << n];
        amps[b as usize] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Wrap amplitudes; the length must be a power of two and the norm one.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch { expected: len.next_power_of_two(), found: len });
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_STATE_QUBITS {
            return Err(Error::TooLarge { n, limit: MAX_STATE_QUBITS });
        }
        let s = StateVector { n, amps };
        let norm = s.norm();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n < 1e-14 {
            return Err(Error::ZeroOverlap { norm: n });
        }
        self.amps.iter_mut().for_each(|a| *a /= n);
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Real part of `<psi|H|psi>`; `H` must be Hermitian.
    pub fn expectation(&self, h: &PauliSum) -> Result<f64> {
        check_width(h.n_qubits(), self.n)?;
        let residual = h.hermiticity_residual();
        if residual > crate::linalg::HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
        Ok(h.expectation(&self.amps)?.re)
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::InvalidIndex { index: q, bound: self.n });
        }
        Ok(())
    }

    /// Apply a 2x2 matrix `[[a, b], [c, d]]` to qubit `q`.
    pub fn apply_1q(&mut self, q: usize, m: [[Complex64; 2]; 2]) -> Result<()> {
        self.check_qubit(q)?;
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::InvalidIndex { index: target, bound: self.n });
        }
        let (c, t) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
        Ok(())
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        let m = (1usize << a) | (1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & m == m {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    /// Multiply by `exp(i phi)` on basis states where all `mask` bits are set.
    pub fn apply_phase(&mut self, mask: u64, phi: f64) {
        let ph = Complex64::new(0.0, phi).exp();
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i as u64 & mask == mask {
                *amp *= ph;
            }
        }
    }

    fn check_string(&self, p: &PauliString) -> Result<()> {
        if let Some(q) = p.max_qubit() {
            self.check_qubit(q)?;
        }
        Ok(())
    }

    /// Apply a Pauli string as an operator.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        self.check_string(p)?;
        let mut out = vec![Complex64::default(); self.amps.len()];
        for (b, amp) in self.amps.iter().enumerate() {
            let (ph, t) = p.apply_to_basis(b as u64);
            out[t as usize] = ph * amp;
        }
        self.amps = out;
        Ok(())
    }

    /// `exp(i phi P) = cos(phi) I + i sin(phi) P`.
    pub fn apply_pauli_exp(&mut self, p: &PauliString, phi: f64) -> Result<()> {
        self.apply_pauli_exp_controlled(None, p, phi)
    }

    /// `exp(i phi P)` on the subspace where `control` is one.
    pub fn apply_pauli_exp_controlled(&mut self, control: Option<usize>, p: &PauliString, phi: f64) -> Result<()> {
        self.check_string(p)?;
        let cmask = match control {
            Some(c) => {
                self.check_qubit(c)?;
                if p.support() >> c & 1 == 1 {
                    return Err(Error::InvalidIndex { index: c, bound: self.n });
                }
                1u64 << c
            }
            None => 0,
        };
        let (cs, sn) = (phi.cos(), phi.sin());
        let isn = Complex64::new(0.0, sn);
        let x = p.x_mask();
        if x == 0 {
            // Diagonal: each amplitude picks up exp(i phi s) with s = +-1.
            for (b, amp) in self.amps.iter_mut().enumerate() {
                if b as u64 & cmask != cmask {
                    continue;
                }
                let (ph, _) = p.apply_to_basis(b as u64);
                *amp *= Complex64::new(cs, 0.0) + isn * ph;
            }
            return Ok(());
        }
        // Pair b with b ^ x; visit each pair once from its lower member.
        let pivot = 1u64 << (63 - x.leading_zeros());
        for b in 0..self.amps.len() as u64 {
            if b & pivot != 0 || b & cmask != cmask {
                continue;
            }
            let t = b ^ x;
            let (ph_b, _) = p.apply_to_basis(b);
            let (ph_t, _) = p.apply_to_basis(t);
            let ab = self.amps[b as usize];
            let at = self.amps[t as usize];
            self.amps[b as usize] = ab * cs + isn * ph_t * at;
            self.amps[t as usize] = at * cs + isn * ph_b * ab;
        }
        Ok(())
    }

    /// Apply a dense unitary to the low `k` qubits, conditioned on `control`.
    pub fn apply_controlled_matrix(&mut self, control: usize, k: usize, u: &DMatrix<Complex64>) -> Result<()> {
        self.check_qubit(control)?;
        let dim = 1usize << k;
        if u.nrows() != dim || u.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: u.nrows() });
        }
        if control < k {
            return Err(Error::InvalidIndex { index: control, bound: k });
        }
        let c = 1usize << control;
        let mut block = vec![Complex64::default(); dim];
        for hi in (0..self.amps.len()).step_by(dim) {
            if hi & c == 0 {
                continue;
            }
            for (r, out) in block.iter_mut().enumerate() {
                *out = (0..dim).map(|s| u[(r, s)] * self.amps[hi + s]).sum();
            }
            self.amps[hi..hi + dim].copy_from_slice(&block);
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, g: &Gate, params: &[f64]) -> Result<()> {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::default();
        let i = Complex64::new(0.0, 1.0);
        match g {
            Gate::X(q) => self.apply_1q(*q, [[zero, one], [one, zero]]),
            Gate::Y(q) => self.apply_1q(*q, [[zero, -i], [i, zero]]),
            Gate::Z(q) => self.apply_1q(*q, [[one, zero], [zero, -one]]),
            Gate::H(q) => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                self.apply_1q(*q, [[h, h], [h, -h]])
            }
            Gate::S(q) => self.apply_1q(*q, [[one, zero], [zero, i]]),
            Gate::Sdg(q) => self.apply_1q(*q, [[one, zero], [zero, -i]]),
            Gate::T(q) => {
                let t = Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
                self.apply_1q(*q, [[one, zero], [zero, t]])
            }
            Gate::Tdg(q) => {
                let t = Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2);
                self.apply_1q(*q, [[one, zero], [zero, t]])
            }
            Gate::Rx(q, a) => self.apply_pauli_exp(&PauliString::single(*q, Pauli::X)?, -0.5 * a.value(params)?),
            Gate::Ry(q, a) => self.apply_pauli_exp(&PauliString::single(*q, Pauli::Y)?, -0.5 * a.value(params)?),
            Gate::Rz(q, a) => self.apply_pauli_exp(&PauliString::single(*q, Pauli::Z)?, -0.5 * a.value(params)?),
            Gate::Cnot(c, t) => self.apply_cnot(*c, *t),
            Gate::Cz(a, b) => self.apply_cz(*a, *b),
            Gate::PauliExp(p, a) => self.apply_pauli_exp(p, a.value(params)?),
            Gate::ControlledPauliExp(c, p, a) => self.apply_pauli_exp_controlled(Some(*c), p, a.value(params)?),
            Gate::Pauli(p) => self.apply_pauli(p),
        }
    }
}

fn check_width(op: usize, state: usize) -> Result<()> {
    if op != state {
        return Err(Error::DimensionMismatch { expected: state, found: op });
    }
    Ok(())
}

/// A rotation angle, fixed or drawn from the parameter vector as `scale * theta[index]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Angle {
    Fixed(f64),
    Param { index: usize, scale: f64 },
}

impl Angle {
    pub fn param(index: usize) -> Self {
        Angle::Param { index, scale: 1.0 }
    }

    pub fn value(&self, params: &[f64]) -> Result<f64> {
        match *self {
            Angle::Fixed(v) => Ok(v),
            Angle::Param { index, scale } => params
                .get(index)
                .map(|t| scale * t)
                .ok_or(Error::ParameterMismatch { expected: index + 1, found: params.len() }),
        }
    }

    fn scaled(&self, k: f64) -> Angle {
        match *self {
            Angle::Fixed(v) => Angle::Fixed(k * v),
            Angle::Param { index, scale } => Angle::Param { index, scale: k * scale },
        }
    }
}

/// Gates understood by the simulator. Rotations follow `R_P(t) = exp(-i t P / 2)`;
/// `PauliExp(P, phi)` is `exp(i phi P)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    X(usize),
    Y(usize),
    Z(usize),
    H(usize),
    S(usize),
    Sdg(usize),
    T(usize),
    Tdg(usize),
    Rx(usize, Angle),
    Ry(usize, Angle),
    Rz(usize, Angle),
    Cnot(usize, usize),
    Cz(usize, usize),
    PauliExp(PauliString, Angle),
    ControlledPauliExp(usize, PauliString, Angle),
    /// A bare Pauli string, used to inject errors.
    Pauli(PauliString),
}

impl Gate {
    /// Qubits the gate touches.
    pub fn support(&self) -> u64 {
        match self {
            Gate::X(q) | Gate::Y(q) | Gate::Z(q) | Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::T(q) | Gate::Tdg(q) => 1 << q,
            Gate::Rx(q, _) | Gate::Ry(q, _) | Gate::Rz(q, _) => 1 << q,
            Gate::Cnot(a, b) | Gate::Cz(a, b) => (1 << a) | (1 << b),
            Gate::PauliExp(p, _) | Gate::Pauli(p) => p.support(),
            Gate::ControlledPauliExp(c, p, _) => p.support() | 1 << c,
        }
    }

    /// The generator `P` and angle `phi` when the gate is `exp(i phi P)`
    /// with `phi` depending on parameters.
    pub fn parametric_generator(&self) -> Option<(PauliString, Angle)> {
        let rot = |q: usize, p: Pauli, a: &Angle| Some((PauliString::single(q, p).ok()?, a.scaled(-0.5)));
        match self {
            Gate::Rx(q, a @ Angle::Param { .. }) => rot(*q, Pauli::X, a),
            Gate::Ry(q, a @ Angle::Param { .. }) => rot(*q, Pauli::Y, a),
            Gate::Rz(q, a @ Angle::Param { .. }) => rot(*q, Pauli::Z, a),
            Gate::PauliExp(p, a @ Angle::Param { .. }) => Some((*p, *a)),
            _ => None,
        }
    }

    /// The inverse gate, with parameter-dependent angles negated.
    pub fn inverse(&self) -> Gate {
        match self {
            Gate::S(q) => Gate::Sdg(*q),
            Gate::Sdg(q) => Gate::S(*q),
            Gate::T(q) => Gate::Tdg(*q),
            Gate::Tdg(q) => Gate::T(*q),
            Gate::Rx(q, a) => Gate::Rx(*q, a.scaled(-1.0)),
            Gate::Ry(q, a) => Gate::Ry(*q, a.scaled(-1.0)),
            Gate::Rz(q, a) => Gate::Rz(*q, a.scaled(-1.0)),
            Gate::PauliExp(p, a) => Gate::PauliExp(*p, a.scaled(-1.0)),
            Gate::ControlledPauliExp(c, p, a) => Gate::ControlledPauliExp(*c, *p, a.scaled(-1.0)),
            other => other.clone(),
        }
    }
}

/// A gate list over a fixed register with a declared parameter count.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub n_params: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_params: usize) -> Self {
        Circuit { n_qubits, n_params, gates: Vec::new() }
    }

    pub fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::ParameterMismatch { expected: self.n_params, found: params.len() });
        }
        Ok(())
    }

    /// Run on `|0...0>`.
    pub fn run(&self, params: &[f64]) -> Result<StateVector> {
        let mut s = StateVector::zero(self.n_qubits)?;
        self.apply(&mut s, params)?;
        Ok(s)
    }

    pub fn apply(&self, state: &mut StateVector, params: &[f64]) -> Result<()> {
        self.check_params(params)?;
        check_width(self.n_qubits, state.n_qubits())?;
        for g in &self.gates {
            state.apply_gate(g, params)?;
        }
        Ok(())
    }

    /// Rewrite Pauli exponentials with basis changes, a CNOT ladder and one
    /// `Rz`, leaving only one- and two-qubit gates.
    pub fn compile_native(&self) -> Circuit {
        let mut out = Circuit::new(self.n_qubits, self.n_params);
        for g in &self.gates {
            match g {
                Gate::PauliExp(p, a) => pauli_exp_native(&mut out.gates, p, *a),
                other => out.gates.push(other.clone()),
            }
        }
        out
    }

    /// Count of gates acting on one qubit and on two or more.
    pub fn gate_counts(&self) -> (usize, usize) {
        let two = self.gates.iter().filter(|g| g.support().count_ones() >= 2).count();
        (self.gates.len() - two, two)
    }
}

/// `exp(i phi P)` as `U† CNOTs Rz(-2 phi) CNOTs U`.
fn pauli_exp_native(out: &mut Vec<Gate>, p: &PauliString, a: Angle) {
    let letters: Vec<(usize, Pauli)> = p.letters().collect();
    if letters.is_empty() {
        return;
    }
    let half_pi = core::f64::consts::FRAC_PI_2;
    for &(q, l) in &letters {
        match l {
            Pauli::X => out.push(Gate::H(q)),
            Pauli::Y => out.push(Gate::Rx(q, Angle::Fixed(half_pi))),
            _ => {}
        }
    }
    for w in letters.windows(2) {
        out.push(Gate::Cnot(w[0].0, w[1].0));
    }
    let last = letters[letters.len() - 1].0;
    out.push(Gate::Rz(last, a.scaled(-2.0)));
    for w in letters.windows(2).rev() {
        out.push(Gate::Cnot(w[0].0, w[1].0));
    }
    for &(q, l) in &letters {
        match l {
            Pauli::X => out.push(Gate::H(q)),
            Pauli::Y => out.push(Gate::Rx(q, Angle::Fixed(-half_pi))),
            _ => {}
        }
    }
}
