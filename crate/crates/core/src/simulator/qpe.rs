//! Quantum phase estimation on a joint ancilla and system register.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64;
use rand::Rng;

use super::{trotter_evolve, Gate, StateVector, MAX_STATE_QUBITS};
use crate::error::{Error, Result};
use crate::linalg::unitary_exp;
use crate::pauli::PauliSum;

/// How the controlled powers `exp(-2 pi i H' 2^k)` are built.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QpeBackend {
    /// Dense matrix exponential.
    Exact,
    /// First-order Trotter product with `steps_per_unit * 2^k` slices for power `k`.
    Trotter { steps_per_unit: usize },
}

/// Affine map from energies to phases in `[0, 1)`: `phase = (E - offset) / span`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QpeScaling {
    pub offset: f64,
    pub span: f64,
}

impl QpeScaling {
    /// Map the coefficient-norm bounds of `h` onto `[0, (N - 1) / N]`, where
    /// `N = 2^n_ancilla`, so no eigenvalue wraps around.
    pub fn for_hamiltonian(h: &PauliSum, n_ancilla: usize) -> Self {
        let (lo, hi) = h.spectral_bounds();
        let n = (1u64 << n_ancilla) as f64;
        let width = hi - lo;
        let span = if width > 0.0 { width * n / (n - 1.0) } else { 1.0 };
        QpeScaling { offset: lo, span }
    }

    pub fn phase(&self, energy: f64) -> f64 {
        (energy - self.offset) / self.span
    }

    pub fn energy(&self, phase: f64) -> f64 {
        self.offset + self.span * phase
    }
}

#[derive(Clone, Debug)]
pub struct QpeResult {
    pub scaling: QpeScaling,
    pub n_ancilla: usize,
    /// Ancilla readout probabilities indexed by integer outcome.
    pub distribution: Vec<f64>,
    /// Sampled integer outcomes `y`, phase `y / 2^n_ancilla`.
    pub outcomes: Vec<u64>,
}

impl QpeResult {
    pub fn phase(&self, y: u64) -> f64 {
        y as f64 / (1u64 << self.n_ancilla) as f64
    }

    pub fn energies(&self) -> Vec<f64> {
        self.outcomes.iter().map(|&y| self.scaling.energy(self.phase(y))).collect()
    }

    /// Most frequent outcome, lowest value on ties.
    pub fn mode(&self) -> Option<u64> {
        let mut counts = vec![0usize; self.distribution.len()];
        for &y in &self.outcomes {
            counts[y as usize] += 1;
        }
        let best = counts.iter().copied().max()?;
        if best == 0 {
            return None;
        }
        counts.iter().position(|&c| c == best).map(|y| y as u64)
    }
}

/// Run phase estimation for `h` on `state` and draw `shots` ancilla readouts.
///
/// Ancillas sit above the system qubits. After Hadamards, ancilla `k`
/// controls `exp(-2 pi i H' 2^k)` with `H' = (H - offset) / span`; the Fourier
/// transform on the ancilla register then concentrates weight at `y = phase * 2^n`.
pub fn qpe_sample<R: Rng + ?Sized>(
    h: &PauliSum,
    state: &StateVector,
    n_ancilla: usize,
    shots: usize,
    backend: QpeBackend,
    rng: &mut R,
) -> Result<QpeResult> {
    let ns = state.n_qubits();
    if h.n_qubits() != ns {
        return Err(Error::DimensionMismatch { expected: ns, found: h.n_qubits() });
    }
    if n_ancilla == 0 {
        return Err(Error::InvalidThreshold("phase estimation needs at least one ancilla".into()));
    }
    let total = ns + n_ancilla;
    if total > MAX_STATE_QUBITS {
        return Err(Error::TooLarge { n: total, limit: MAX_STATE_QUBITS });
    }
    let residual = h.hermiticity_residual();
    if residual > crate::linalg::HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let scaling = QpeScaling::for_hamiltonian(h, n_ancilla);
    let shifted = h
        .sub(&PauliSum::identity(ns, Complex64::new(scaling.offset, 0.0)))?
        .scale(Complex64::new(1.0 / scaling.span, 0.0));

    let mut amps = vec![Complex64::default(); 1 << total];
    amps[..1 << ns].copy_from_slice(state.amplitudes());
    let mut joint = StateVector::from_amplitudes(amps)?;
    for k in 0..n_ancilla {
        joint.apply_gate(&Gate::H(ns + k), &[])?;
    }
    let hm = shifted.to_matrix()?;
    for k in 0..n_ancilla {
        let t = 2.0 * PI * (1u64 << k) as f64;
        let u = match backend {
            QpeBackend::Exact => unitary_exp(&hm, t),
            QpeBackend::Trotter { steps_per_unit } => {
                let steps = steps_per_unit.max(1) * (1usize << k);
                let dim = 1usize << ns;
                let mut u = DMatrix::zeros(dim, dim);
                for col in 0..dim {
                    let e = StateVector::basis(ns, col as u64)?;
                    let out = trotter_evolve(&shifted, &e, t, steps)?;
                    for (r, a) in out.amplitudes().iter().enumerate() {
                        u[(r, col)] = *a;
                    }
                }
                u
            }
        };
        joint.apply_controlled_matrix(ns + k, ns, &u)?;
    }

    // Fourier transform on the ancilla register, one system index at a time.
    let n = 1usize << n_ancilla;
    let roots: Vec<Complex64> = (0..n).map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)).collect();
    let norm = 1.0 / (n as f64).sqrt();
    let mut distribution = vec![0.0; n];
    let amps = joint.amplitudes();
    let mut column = vec![Complex64::default(); n];
    for s in 0..1usize << ns {
        for (x, c) in column.iter_mut().enumerate() {
            *c = amps[s + (x << ns)];
        }
        if column.iter().all(|c| c.norm_sqr() == 0.0) {
            continue;
        }
        for (y, p) in distribution.iter_mut().enumerate() {
            let mut acc = Complex64::default();
            for (x, c) in column.iter().enumerate() {
                acc += roots[(x * y) % n] * c;
            }
            *p += (acc * norm).norm_sqr();
        }
    }

    let mut cdf = Vec::with_capacity(n);
    let mut acc = 0.0;
    for p in &distribution {
        acc += p;
        cdf.push(acc);
    }
    let outcomes = (0..shots)
        .map(|_| {
            let u = rng.gen::<f64>() * acc;
            cdf.partition_point(|&c| c <= u).min(n - 1) as u64
        })
        .collect();
    Ok(QpeResult { scaling, n_ancilla, distribution, outcomes })
}
