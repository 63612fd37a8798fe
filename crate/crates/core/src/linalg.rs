//! Reference eigensolvers used as oracles and by the spectral routines.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli::PauliSum;

/// Registers up to this size are diagonalized densely; larger ones use Lanczos.
pub const DENSE_EIGEN_LIMIT: usize = 10;
/// Hermiticity tolerance on Pauli coefficients.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Lowest eigenpairs in ascending order. Vectors span the full register.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
}

/// Dense Hermitian eigendecomposition, ascending, ties kept in solver order.
pub fn hermitian_eigen(m: DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = nalgebra::linalg::SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Real symmetric eigendecomposition, ascending.
pub fn symmetric_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = nalgebra::linalg::SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

fn check_hermitian(h: &PauliSum) -> Result<()> {
    let residual = h.hermiticity_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

/// The `k` lowest eigenpairs of a Hermitian Pauli sum.
///
/// Small registers are solved densely and return every requested pair with
/// multiplicity. Larger registers use Lanczos from a single start vector,
/// which resolves distinct extreme eigenvalues but not their multiplicity.
pub fn exact_eigensolve(h: &PauliSum, k: usize) -> Result<Spectrum> {
    check_hermitian(h)?;
    let n = h.n_qubits();
    let dim = 1usize << n;
    let k = k.min(dim);
    if n <= DENSE_EIGEN_LIMIT {
        let (values, vecs) = hermitian_eigen(h.to_matrix()?);
        return Ok(Spectrum {
            values: values[..k].to_vec(),
            vectors: (0..k).map(|c| vecs.column(c).iter().copied().collect()).collect(),
        });
    }
    if n > 24 {
        return Err(Error::TooLarge { n, limit: 24 });
    }
    let apply = |v: &[Complex64]| h.apply(v).expect("dimension checked");
    lanczos_lowest(apply, dim, k, 400)
}

/// Ground energy and state.
pub fn ground_state(h: &PauliSum) -> Result<(f64, Vec<Complex64>)> {
    let s = exact_eigensolve(h, 1)?;
    Ok((s.values[0], s.vectors[0].clone()))
}

/// Lowest eigenpairs of `h` restricted to the span of the given basis states.
///
/// Fails if `h` couples the subspace to its complement.
pub fn subspace_eigensolve(h: &PauliSum, basis: &[u64], k: usize) -> Result<Spectrum> {
    check_hermitian(h)?;
    let n = h.n_qubits();
    let mut states = basis.to_vec();
    states.sort_unstable();
    states.dedup();
    let d = states.len();
    let index = |b: u64| states.binary_search(&b).ok();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for (j, &b) in states.iter().enumerate() {
        let mut outside: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (p, c) in h.iter() {
            let (ph, t) = p.apply_to_basis(b);
            match index(t) {
                Some(i) => m[(i, j)] += c * ph,
                None => *outside.entry(t).or_default() += c * ph,
            }
        }
        let leak: f64 = outside.values().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if leak > HERMITIAN_TOL {
            return Err(Error::Numerical(alloc::format!("operator leaks out of the subspace (norm {leak:e})")));
        }
    }
    let (values, vecs) = hermitian_eigen(m);
    let k = k.min(d);
    let vectors = (0..k)
        .map(|c| {
            let mut full = vec![Complex64::default(); 1usize << n];
            for (i, &b) in states.iter().enumerate() {
                full[b as usize] = vecs[(i, c)];
            }
            full
        })
        .collect();
    Ok(Spectrum { values: values[..k].to_vec(), vectors })
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Lanczos with full reorthogonalization for the lowest eigenpairs.
pub fn lanczos_lowest<F>(apply: F, dim: usize, k: usize, max_iter: usize) -> Result<Spectrum>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2c_2057);
    let mut v: Vec<Complex64> =
        (0..dim).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut basis = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let max_iter = max_iter.min(dim);
    let mut result = None;
    for j in 0..max_iter {
        let mut w = apply(&basis[j]);
        let a = dot(&basis[j], &w).re;
        alphas.push(a);
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = norm(&w);
        let last = j + 1 == max_iter || b < 1e-12;
        if (j + 1) % 10 == 0 || last {
            let m = j + 1;
            let t = DMatrix::from_fn(m, m, |r, c| {
                if r == c {
                    alphas[r]
                } else if r + 1 == c {
                    betas[r]
                } else if c + 1 == r {
                    betas[c]
                } else {
                    0.0
                }
            });
            let (vals, vecs) = symmetric_eigen(t);
            let kk = k.min(m);
            let converged = (0..kk).all(|i| (b * vecs[(m - 1, i)]).abs() < 1e-10);
            if converged || last {
                result = Some((vals, vecs, kk));
                break;
            }
        }
        w.iter_mut().for_each(|x| *x /= b);
        basis.push(w);
        betas.push(b);
    }
    let (vals, vecs, kk) = result.ok_or_else(|| Error::Numerical("Lanczos did not run".into()))?;
    let mut vectors = Vec::with_capacity(kk);
    for i in 0..kk {
        let mut out = vec![Complex64::default(); dim];
        for (r, q) in basis.iter().enumerate().take(vecs.nrows()) {
            let c = vecs[(r, i)];
            out.iter_mut().zip(q).for_each(|(x, y)| *x += y * c);
        }
        let n = norm(&out);
        out.iter_mut().for_each(|x| *x /= n);
        vectors.push(out);
    }
    Ok(Spectrum { values: vals[..kk].to_vec(), vectors })
}

/// `exp(-i t H)` for a dense Hermitian matrix.
pub fn unitary_exp(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let (vals, vecs) = hermitian_eigen(h.clone());
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|e| Complex64::new(0.0, -t * e).exp()));
    &vecs * DMatrix::from_diagonal(&d) * vecs.adjoint()
}
