//! Real- and imaginary-time evolution.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64;

use super::StateVector;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, unitary_exp, HERMITIAN_TOL};
use crate::pauli::PauliSum;

fn check(h: &PauliSum, state: &StateVector) -> Result<()> {
    if h.n_qubits() != state.n_qubits() {
        return Err(Error::DimensionMismatch { expected: state.n_qubits(), found: h.n_qubits() });
    }
    let residual = h.hermiticity_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

/// One first-order step `prod_j exp(-i c_j P_j dt)` in canonical term order.
fn trotter_step(h: &PauliSum, state: &mut StateVector, dt: f64) -> Result<()> {
    for (p, c) in h.iter() {
        if p.is_identity() {
            let ph = Complex64::new(0.0, -c.re * dt).exp();
            state.amplitudes_mut().iter_mut().for_each(|a| *a *= ph);
        } else {
            state.apply_pauli_exp(p, -c.re * dt)?;
        }
    }
    Ok(())
}

/// First-order Trotter approximation of `exp(-i H t)|psi>` with `steps` slices.
pub fn trotter_evolve(h: &PauliSum, state: &StateVector, t: f64, steps: usize) -> Result<StateVector> {
    check(h, state)?;
    if steps == 0 {
        return Err(Error::InvalidThreshold("steps must be positive".into()));
    }
    let dt = t / steps as f64;
    let mut s = state.clone();
    for _ in 0..steps {
        trotter_step(h, &mut s, dt)?;
    }
    Ok(s)
}

/// `exp(-i H t)|psi>` from a dense eigendecomposition.
pub fn exact_evolve(h: &PauliSum, state: &StateVector, t: f64) -> Result<StateVector> {
    check(h, state)?;
    let u = unitary_exp(&h.to_matrix()?, t);
    let v = u * DVector::from_column_slice(state.amplitudes());
    StateVector::from_amplitudes(v.iter().copied().collect())
}

/// Piecewise-constant adiabatic path `H(s) = (1 - s) H0 + s Hs` over total
/// time `total_time`, one Trotter step per segment at the segment midpoint.
pub fn adiabatic_prepare(
    h0: &PauliSum,
    hs: &PauliSum,
    total_time: f64,
    steps: usize,
    initial: &StateVector,
) -> Result<StateVector> {
    check(h0, initial)?;
    check(hs, initial)?;
    if steps == 0 {
        return Err(Error::InvalidThreshold("steps must be positive".into()));
    }
    let dt = total_time / steps as f64;
    let mut s = initial.clone();
    for j in 0..steps {
        let x = (j as f64 + 0.5) / steps as f64;
        let hx = h0.scale(Complex64::new(1.0 - x, 0.0)).add(&hs.scale(Complex64::new(x, 0.0)))?;
        trotter_step(&hx, &mut s, dt)?;
    }
    Ok(s)
}

/// Apply `exp(-H dtau)` `steps` times with `dtau = tau / steps`, renormalizing
/// after each step.
pub fn imaginary_time_evolve(h: &PauliSum, state: &StateVector, tau: f64, steps: usize) -> Result<StateVector> {
    check(h, state)?;
    if steps == 0 {
        return Err(Error::InvalidThreshold("steps must be positive".into()));
    }
    let (vals, vecs) = hermitian_eigen(h.to_matrix()?);
    let dtau = tau / steps as f64;
    let shift = vals[0];
    let damp: Vec<Complex64> = vals.iter().map(|e| Complex64::new((-(e - shift) * dtau).exp(), 0.0)).collect();
    let step = &vecs * DMatrix::from_diagonal(&DVector::from_vec(damp)) * vecs.adjoint();
    let mut v = DVector::from_column_slice(state.amplitudes());
    for _ in 0..steps {
        v = &step * v;
        let n = v.norm();
        if n < 1e-14 {
            return Err(Error::ZeroOverlap { norm: n });
        }
        v /= Complex64::new(n, 0.0);
    }
    StateVector::from_amplitudes(v.iter().copied().collect())
}
