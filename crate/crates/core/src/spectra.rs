//! Excited states: overlap deflation, the folded spectrum and subspace expansion.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::encoding::Encoder;
use crate::error::{Error, Result};
use crate::fermion::{FermionSum, Ladder};
use crate::linalg::{hermitian_eigen, HERMITIAN_TOL};
use crate::pauli::{PauliString, PauliSum};
use crate::simulator::StateVector;
use crate::vqe::{gradient_with, minimize, optimize, Ansatz, Measurement, OptimizerConfig, VqeResult};

/// Default overlap-matrix cutoff for the generalized eigenproblem.
pub const S_CUTOFF: f64 = 1e-8;

/// Width of the coefficient-norm interval containing the spectrum.
pub fn spectral_width(h: &PauliSum) -> f64 {
    let (lo, hi) = h.spectral_bounds();
    hi - lo
}

/// Twice the spectral width bound, a shift large enough to lift any
/// penalized state above every eigenvalue.
pub fn default_alpha(h: &PauliSum) -> f64 {
    2.0 * spectral_width(h)
}

/// `<psi|H|psi> + alpha sum_i |<E_i|psi>|^2` over known lower states `E_i`.
///
/// The overlap is an exact inner product; on hardware it would come from a
/// swap test between the two prepared states.
#[derive(Clone, Debug)]
pub struct DeflatedObjective {
    pub h: PauliSum,
    pub lower: Vec<StateVector>,
    pub alpha: f64,
    /// Set when `alpha` is below the spectral width bound, in which case the
    /// penalized state may still be the minimum.
    pub alpha_too_small: bool,
}

impl DeflatedObjective {
    /// `alpha = None` selects [`default_alpha`].
    pub fn new(h: &PauliSum, lower: Vec<StateVector>, alpha: Option<f64>) -> Result<Self> {
        let residual = h.hermiticity_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
        for s in &lower {
            if s.n_qubits() != h.n_qubits() {
                return Err(Error::DimensionMismatch { expected: h.n_qubits(), found: s.n_qubits() });
            }
        }
        let alpha = alpha.unwrap_or_else(|| default_alpha(h));
        Ok(DeflatedObjective { h: h.clone(), lower, alpha, alpha_too_small: alpha < spectral_width(h) })
    }

    pub fn evaluate(&self, psi: &StateVector) -> Result<f64> {
        let e = psi.expectation(&self.h)?;
        let pen: f64 = self.lower.iter().map(|g| g.fidelity(psi)).sum();
        Ok(e + self.alpha * pen)
    }

    /// `(H + alpha sum_i |E_i><E_i|) |psi>`.
    pub fn apply(&self, psi: &StateVector) -> Result<Vec<Complex64>> {
        let mut out = self.h.apply(psi.amplitudes())?;
        for g in &self.lower {
            let ov = g.inner(psi) * self.alpha;
            out.iter_mut().zip(g.amplitudes()).for_each(|(o, a)| *o += a * ov);
        }
        Ok(out)
    }
}

/// The deflated objective for a single known ground state.
pub fn deflated_hamiltonian(h: &PauliSum, ground: &StateVector, alpha: Option<f64>) -> Result<DeflatedObjective> {
    DeflatedObjective::new(h, alloc::vec![ground.clone()], alpha)
}

/// Minimize a deflated objective over `ansatz` from its default start.
pub fn deflation_vqe(ansatz: &Ansatz, objective: &DeflatedObjective, config: &OptimizerConfig) -> Result<VqeResult> {
    let x0 = ansatz.initial_params(config.seed);
    let mut f = |t: &[f64]| objective.evaluate(&ansatz.prepare(t)?);
    let mut g = |t: &[f64]| gradient_with(ansatz, t, |psi| objective.apply(psi));
    minimize(&mut f, Some(&mut g), &x0, config)
}

/// `(H - alpha I)^2`, whose ground state is the eigenstate closest to `alpha`.
pub fn folded_hamiltonian(h: &PauliSum, alpha: f64) -> Result<PauliSum> {
    let d = h.sub(&PauliSum::identity(h.n_qubits(), Complex64::new(alpha, 0.0)))?;
    let mut out = d.mul(&d)?;
    out.drop_small(1e-14);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FoldedPoint {
    pub alpha: f64,
    /// Minimized `<(H - alpha)^2>`.
    pub folded: f64,
    /// `<H>` at the minimizer.
    pub energy: f64,
}

/// Minimize the folded operator at each shift and report the energy reached.
pub fn folded_scan(h: &PauliSum, ansatz: &Ansatz, alphas: &[f64], config: &OptimizerConfig) -> Result<Vec<FoldedPoint>> {
    let mut out = Vec::with_capacity(alphas.len());
    let mut rng = crate::rng::seeded(config.seed);
    for &alpha in alphas {
        let f = folded_hamiltonian(h, alpha)?;
        let r = optimize(ansatz, &f, config, Measurement::Exact, None, &mut rng)?;
        let energy = ansatz.prepare(&r.best_params)?.expectation(h)?;
        out.push(FoldedPoint { alpha, folded: r.best_energy, energy });
    }
    Ok(out)
}

/// Distinct energies among converged scan points, ascending.
///
/// A point counts when its folded minimum is below `variance_tol`, which
/// means the minimizer is close to an eigenstate. Energies within `merge_tol`
/// are averaged into one level.
pub fn folded_levels(points: &[FoldedPoint], variance_tol: f64, merge_tol: f64) -> Vec<f64> {
    let mut es: Vec<f64> = points
        .iter()
        .filter(|p| p.folded - (p.energy - p.alpha) * (p.energy - p.alpha) < variance_tol)
        .map(|p| p.energy)
        .collect();
    es.sort_by(f64::total_cmp);
    let mut levels: Vec<(f64, usize)> = Vec::new();
    for e in es {
        match levels.last_mut() {
            Some((sum, n)) if (e - *sum / *n as f64).abs() < merge_tol => {
                *sum += e;
                *n += 1;
            }
            _ => levels.push((e, 1)),
        }
    }
    levels.into_iter().map(|(s, n)| s / n as f64).collect()
}

/// Projected Hamiltonian and overlap matrices of a subspace expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceProblem {
    pub h: DMatrix<Complex64>,
    pub s: DMatrix<Complex64>,
}

impl SubspaceProblem {
    /// `H_ij = <psi|O_i† H O_j|psi>` and `S_ij = <psi|O_i† O_j|psi>`.
    pub fn build(state: &StateVector, h: &PauliSum, ops: &[PauliSum]) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidThreshold("expansion set is empty".into()));
        }
        let residual = h.hermiticity_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
        let psi = state.amplitudes();
        let v: Vec<Vec<Complex64>> = ops.iter().map(|o| o.apply(psi)).collect::<Result<_>>()?;
        let w: Vec<Vec<Complex64>> = v.iter().map(|x| h.apply(x)).collect::<Result<_>>()?;
        let dot = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>();
        let m = ops.len();
        let hm = DMatrix::from_fn(m, m, |i, j| dot(&v[i], &w[j]));
        let sm = DMatrix::from_fn(m, m, |i, j| dot(&v[i], &v[j]));
        Ok(SubspaceProblem { h: hm, s: sm })
    }

    /// Solve `H C = S C E` by canonical orthogonalization, dropping overlap
    /// eigenvalues below `s_cutoff`. Returns the eigenvalues ascending.
    pub fn solve(&self, s_cutoff: f64) -> Result<Vec<f64>> {
        let hs = (&self.h + self.h.adjoint()) * Complex64::new(0.5, 0.0);
        let ss = (&self.s + self.s.adjoint()) * Complex64::new(0.5, 0.0);
        let (svals, svecs) = hermitian_eigen(ss);
        let keep: Vec<usize> = (0..svals.len()).filter(|&k| svals[k] > s_cutoff).collect();
        if keep.is_empty() {
            return Err(Error::DegenerateSubspace);
        }
        let x = DMatrix::from_fn(svecs.nrows(), keep.len(), |r, c| {
            svecs[(r, keep[c])] / Complex64::new(svals[keep[c]].sqrt(), 0.0)
        });
        let reduced = x.adjoint() * hs * &x;
        Ok(hermitian_eigen(reduced).0)
    }
}

/// Subspace expansion over Pauli strings; the set must contain the identity.
pub fn qse_solve(state: &StateVector, h: &PauliSum, expansion: &[PauliString], s_cutoff: f64) -> Result<Vec<f64>> {
    if !expansion.iter().any(|p| p.is_identity()) {
        return Err(Error::InvalidThreshold("expansion must include the identity".into()));
    }
    let n = h.n_qubits();
    let ops: Vec<PauliSum> =
        expansion.iter().map(|p| PauliSum::term(n, *p, Complex64::new(1.0, 0.0))).collect::<Result<_>>()?;
    SubspaceProblem::build(state, h, &ops)?.solve(s_cutoff)
}

/// Every product of one Pauli letter per listed qubit, identity included:
/// `4^k` strings over `k` qubits.
pub fn pauli_expansion(qubits: &[usize]) -> Vec<PauliString> {
    let letters = [crate::pauli::Pauli::I, crate::pauli::Pauli::X, crate::pauli::Pauli::Y, crate::pauli::Pauli::Z];
    let mut out = alloc::vec![PauliString::identity()];
    for &q in qubits {
        let mut next = Vec::with_capacity(out.len() * 4);
        for p in &out {
            for &l in &letters {
                let mut s = *p;
                s.set(q, l).expect("qubit index below 64");
                next.push(s);
            }
        }
        out = next;
    }
    out
}

/// The identity and each single Pauli on each listed qubit: `3k + 1` strings.
pub fn single_qubit_expansion(qubits: &[usize]) -> Vec<PauliString> {
    use crate::pauli::Pauli;
    let mut out = alloc::vec![PauliString::identity()];
    for &q in qubits {
        for l in [Pauli::X, Pauli::Y, Pauli::Z] {
            out.push(PauliString::single(q, l).expect("qubit index below 64"));
        }
    }
    out
}

/// The identity and the encoded single excitations `a†_a a_i`.
pub fn fermionic_expansion(encoder: &Encoder, occupied: &[usize], virtual_: &[usize]) -> Result<Vec<PauliSum>> {
    let m = encoder.n_modes();
    let one = Complex64::new(1.0, 0.0);
    let mut out = alloc::vec![PauliSum::identity(m, one)];
    for &i in occupied {
        for &a in virtual_ {
            let w = FermionSum::word(m, &[Ladder::create(a), Ladder::annihilate(i)], one)?;
            out.push(encoder.encode_operator(&w)?);
        }
    }
    Ok(out)
}
