//! Finite-shot estimation by Hamiltonian averaging.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use super::{Gate, StateVector};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

/// A sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShotEstimate {
    pub mean: f64,
    pub std_error: f64,
}

impl ShotEstimate {
    pub fn exact(mean: f64) -> Self {
        ShotEstimate { mean, std_error: 0.0 }
    }
}

/// Measure one Pauli string `shots` times: rotate each support qubit to the Z
/// basis, draw bitstrings and average the parity eigenvalues.
///
/// Returns the mean and the unbiased sample variance of the +-1 outcomes.
pub fn sample_string<R: Rng + ?Sized>(state: &StateVector, p: &PauliString, shots: usize, rng: &mut R) -> Result<(f64, f64)> {
    if p.is_identity() {
        return Ok((1.0, 0.0));
    }
    let mut rotated = state.clone();
    for (q, l) in p.letters() {
        match l {
            Pauli::X => rotated.apply_gate(&Gate::H(q), &[])?,
            Pauli::Y => {
                rotated.apply_gate(&Gate::Sdg(q), &[])?;
                rotated.apply_gate(&Gate::H(q), &[])?;
            }
            _ => {}
        }
    }
    let mut cdf: Vec<f64> = Vec::with_capacity(rotated.amplitudes().len());
    let mut acc = 0.0;
    for a in rotated.amplitudes() {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let mask = p.support();
    let mut plus = 0usize;
    for _ in 0..shots {
        let u = rng.gen::<f64>() * acc;
        let b = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        if (b as u64 & mask).count_ones() % 2 == 0 {
            plus += 1;
        }
    }
    let n = shots as f64;
    let mean = (2.0 * plus as f64 - n) / n;
    let var = if shots > 1 { (1.0 - mean * mean) * n / (n - 1.0) } else { 1.0 };
    Ok((mean, var.max(0.0)))
}

/// Estimate `<H>` with `shots` measurements of every non-identity term.
pub fn sample_expectation<R: Rng + ?Sized>(
    state: &StateVector,
    h: &PauliSum,
    shots: usize,
    rng: &mut R,
) -> Result<ShotEstimate> {
    if h.n_qubits() != state.n_qubits() {
        return Err(Error::DimensionMismatch { expected: state.n_qubits(), found: h.n_qubits() });
    }
    let residual = h.hermiticity_residual();
    if residual > crate::linalg::HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    if shots == 0 {
        return Err(Error::InvalidProbability(0.0));
    }
    let mut mean = 0.0;
    let mut var = 0.0;
    for (p, c) in h.iter() {
        let (m, v) = sample_string(state, p, shots, rng)?;
        mean += c.re * m;
        var += c.re * c.re * v / shots as f64;
    }
    Ok(ShotEstimate { mean, std_error: var.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::Angle;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn deterministic_outcome_has_zero_error() {
        let s = StateVector::zero(1).unwrap();
        let h = PauliSum::term(1, "Z0".parse().unwrap(), Complex64::new(1.0, 0.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = sample_expectation(&s, &h, 100, &mut rng).unwrap();
        assert_eq!(e, ShotEstimate { mean: 1.0, std_error: 0.0 });
    }

    #[test]
    fn rotated_bases_agree_with_exact_values() {
        let mut s = StateVector::zero(2).unwrap();
        s.apply_gate(&Gate::Rx(0, Angle::Fixed(0.9)), &[]).unwrap();
        s.apply_gate(&Gate::Ry(1, Angle::Fixed(-1.3)), &[]).unwrap();
        s.apply_gate(&Gate::Cnot(0, 1), &[]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for text in ["X0", "Y0", "Z1", "Y0 X1", "X0 Y1", "Z0 Z1"] {
            let p: PauliString = text.parse().unwrap();
            let exact = crate::pauli::string_expectation(&p, s.amplitudes()).re;
            let (m, v) = sample_string(&s, &p, 200_000, &mut rng).unwrap();
            let se = (v / 200_000.0).sqrt();
            assert!((m - exact).abs() < 5.0 * se + 1e-3, "{text}: {m} vs {exact}");
        }
    }
}
