//! Stochastic Pauli noise by trajectory sampling.

use rand::Rng;

use super::{Circuit, StateVector};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

const LETTERS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

/// How errors are drawn after a two-qubit gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwoQubitChannel {
    /// With probability `p2`, one of the 15 non-identity two-qubit Paulis, uniformly.
    Uniform,
    /// Each qubit independently, with probability `p2`, gets X, Y or Z uniformly.
    Local,
}

/// Probability of inserting a random non-identity Pauli after each gate.
///
/// `p1` applies after single-qubit gates and `p2` after two-qubit gates.
/// A depolarizing channel of strength `p` corresponds to an insertion
/// probability of `3p/4` per qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    pub two_qubit: TwoQubitChannel,
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        for p in [p1, p2] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProbability(p));
            }
        }
        Ok(NoiseModel { p1, p2, two_qubit: TwoQubitChannel::Uniform })
    }

    /// Independent single-qubit depolarizing of strength `p` on every qubit a
    /// gate touches.
    pub fn depolarizing(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(NoiseModel { p1: 0.75 * p, p2: 0.75 * p, two_qubit: TwoQubitChannel::Local })
    }

    /// Multiply both insertion probabilities by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        let (p1, p2) = (self.p1 * lambda, self.p2 * lambda);
        for p in [p1, p2] {
            if !(0.0..=1.0).contains(&p) || lambda < 0.0 {
                return Err(Error::InvalidProbability(p));
            }
        }
        Ok(NoiseModel { p1, p2, two_qubit: self.two_qubit })
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0
    }

    /// Draw the error after a gate with the given support. Random numbers are
    /// consumed in a fixed pattern per gate, so runs at different strengths
    /// with the same stream see nested error sets.
    pub fn sample_error<R: Rng + ?Sized>(&self, support: u64, rng: &mut R) -> PauliString {
        let qubits = support.count_ones();
        let mut err = PauliString::identity();
        let mut each = |q: usize, p: f64, rng: &mut R| {
            let u: f64 = rng.gen();
            let k = rng.gen_range(1..4usize);
            if u < p {
                let _ = err.set(q, LETTERS[k]);
            }
        };
        match (qubits, self.two_qubit) {
            (0, _) => {}
            (1, _) => each(support.trailing_zeros() as usize, self.p1, rng),
            (2, TwoQubitChannel::Uniform) => {
                let u: f64 = rng.gen();
                let k = rng.gen_range(1..16usize);
                if u < self.p2 {
                    let a = support.trailing_zeros() as usize;
                    let b = 63 - support.leading_zeros() as usize;
                    let _ = err.set(a, LETTERS[k % 4]);
                    let _ = err.set(b, LETTERS[k / 4]);
                }
            }
            _ => {
                let mut rest = support;
                while rest != 0 {
                    let q = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    each(q, self.p2, rng);
                }
            }
        }
        err
    }
}

/// Run one noisy trajectory of `circuit` on `state`, inserting sampled errors
/// after every gate.
pub fn run_trajectory<R: Rng + ?Sized>(
    circuit: &Circuit,
    params: &[f64],
    state: &mut StateVector,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<()> {
    if params.len() != circuit.n_params {
        return Err(Error::ParameterMismatch { expected: circuit.n_params, found: params.len() });
    }
    for g in &circuit.gates {
        state.apply_gate(g, params)?;
        let err = noise.sample_error(g.support(), rng);
        if !err.is_identity() {
            state.apply_pauli(&err)?;
        }
    }
    Ok(())
}
