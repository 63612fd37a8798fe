//! Random problem generators shared by unit tests.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::fermion::{MolecularIntegrals, SpinOrdering};
use crate::pauli::{PauliString, PauliSum};
use crate::rng;

/// Real integrals with the full 8-fold permutational symmetry.
pub fn random_integrals(n: usize, n_electrons: usize, ordering: SpinOrdering, seed: u64) -> MolecularIntegrals {
    let mut r = rng::seeded(seed);
    let mut one = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = r.gen_range(-1.0..1.0);
            one[i * n + j] = v;
            one[j * n + i] = v;
        }
    }
    let idx = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;
    let mut two = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    if two[idx(i, j, k, l)] != 0.0 {
                        continue;
                    }
                    let v = r.gen_range(-0.5..0.5);
                    for (a, b, c, d) in [(i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k), (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i)] {
                        two[idx(a, b, c, d)] = v;
                    }
                }
            }
        }
    }
    MolecularIntegrals::from_spatial(n, one, two, 0.3, n_electrons, (n_electrons % 2) as i32, ordering).unwrap()
}

/// A Hermitian sum of `terms` random Pauli strings on `n` qubits.
pub fn random_hermitian(n: usize, terms: usize, seed: u64) -> PauliSum {
    let mut r = rng::seeded(seed);
    let mask = (1u64 << n) - 1;
    let list: Vec<(PauliString, Complex64)> = (0..terms)
        .map(|_| (PauliString::from_masks(r.gen::<u64>() & mask, r.gen::<u64>() & mask), Complex64::new(r.gen_range(-1.0..1.0), 0.0)))
        .collect();
    PauliSum::from_terms(n, list).unwrap()
}
