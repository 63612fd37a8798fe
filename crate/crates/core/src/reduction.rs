//! Problem-size reduction: natural-orbital active spaces and symmetry tapering.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::encoding::Encoder;
use crate::error::{Error, Result};
use crate::fermion::{FermionSum, Ladder, MolecularIntegrals, Spin};
use crate::linalg::symmetric_eigen;
use crate::pauli::{PauliString, PauliSum, DEFAULT_DROP_TOL};

/// Natural orbitals of a spin-summed one-particle density matrix.
#[derive(Clone, Debug)]
pub struct NaturalOrbitals {
    /// Occupation numbers, descending.
    pub noons: Vec<f64>,
    /// Column `k` is natural orbital `k` in the original basis.
    pub rotation: DMatrix<f64>,
}

/// Diagonalize a real symmetric 1-RDM given row-major as `n x n`.
///
/// Occupations are sorted descending; ties keep the solver's order.
pub fn diagonalize_1rdm(n: usize, rdm: &[f64]) -> Result<NaturalOrbitals> {
    if rdm.len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, found: rdm.len() });
    }
    let m = DMatrix::from_row_slice(n, n, rdm);
    let residual = (&m - m.transpose()).amax();
    if residual > 1e-10 {
        return Err(Error::NotSymmetricRdm { residual });
    }
    let (vals, vecs) = symmetric_eigen(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    Ok(NaturalOrbitals {
        noons: order.iter().map(|&k| vals[k]).collect(),
        rotation: DMatrix::from_fn(n, n, |r, c| vecs[(r, order[c])]),
    })
}

/// Partition of spatial orbitals by occupation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActiveSpace {
    /// Always doubly occupied; folded into the core energy.
    pub frozen_occupied: Vec<usize>,
    /// Always empty; dropped.
    pub removed_virtual: Vec<usize>,
    pub active: Vec<usize>,
}

/// Freeze orbitals with occupation at or above `upper` and drop those at or
/// below `lower`. Occupations are spin-summed, so they lie in `[0, 2]`.
pub fn select_active_space(noons: &[f64], lower: f64, upper: f64) -> Result<ActiveSpace> {
    if !(0.0..=2.0).contains(&lower) || !(0.0..=2.0).contains(&upper) || lower >= upper {
        return Err(Error::InvalidThreshold(alloc::format!("lower {lower}, upper {upper}")));
    }
    let mut space = ActiveSpace { frozen_occupied: Vec::new(), removed_virtual: Vec::new(), active: Vec::new() };
    for (k, &w) in noons.iter().enumerate() {
        if w >= upper {
            space.frozen_occupied.push(k);
        } else if w <= lower {
            space.removed_virtual.push(k);
        } else {
            space.active.push(k);
        }
    }
    Ok(space)
}

/// Express the integrals in a new orbital basis; column `k` of `c` is new orbital `k`.
pub fn rotate_integrals(ints: &MolecularIntegrals, c: &DMatrix<f64>) -> Result<MolecularIntegrals> {
    let n = ints.n_orbitals;
    if c.nrows() != n || c.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: c.nrows() });
    }
    let h = DMatrix::from_fn(n, n, |i, j| ints.spatial_one(i, j));
    let h_new = c.transpose() * h * c;
    let mut one = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            one.push(h_new[(i, j)]);
        }
    }
    // Four quarter transformations, one index at a time.
    let mut t: Vec<f64> = (0..n * n * n * n)
        .map(|idx| {
            let (i, j, k, l) = (idx / (n * n * n), idx / (n * n) % n, idx / n % n, idx % n);
            ints.spatial_two(i, j, k, l)
        })
        .collect();
    let stride = [n * n * n, n * n, n, 1];
    for &s in &stride {
        let mut next = alloc::vec![0.0; t.len()];
        for (idx, out) in next.iter_mut().enumerate() {
            let p = idx / s % n;
            let base = idx - p * s;
            *out = (0..n).map(|a| c[(a, p)] * t[base + a * s]).sum();
        }
        t = next;
    }
    MolecularIntegrals::from_spatial(n, one, t, ints.core_energy, ints.n_electrons, ints.ms2, ints.ordering)
}

/// Fold doubly occupied `frozen` orbitals into a mean field and drop `removed`.
///
/// `h'_pq = h_pq + sum_i [2 (pq|ii) - (pi|iq)]` and the core energy gains
/// `sum_i 2 h_ii + sum_ij [2 (ii|jj) - (ij|ji)]`.
pub fn freeze_reduce(ints: &MolecularIntegrals, frozen: &[usize], removed: &[usize]) -> Result<MolecularIntegrals> {
    let n = ints.n_orbitals;
    for &k in frozen.iter().chain(removed) {
        if k >= n {
            return Err(Error::InvalidIndex { index: k, bound: n });
        }
    }
    if frozen.iter().any(|k| removed.contains(k)) {
        return Err(Error::InvalidThreshold("orbital both frozen and removed".into()));
    }
    if 2 * frozen.len() > ints.n_electrons {
        return Err(Error::InvalidThreshold("more frozen electrons than electrons".into()));
    }
    let keep: Vec<usize> = (0..n).filter(|k| !frozen.contains(k) && !removed.contains(k)).collect();
    let mut core = ints.core_energy;
    for &i in frozen {
        core += 2.0 * ints.spatial_one(i, i);
        for &j in frozen {
            core += 2.0 * ints.spatial_two(i, i, j, j) - ints.spatial_two(i, j, j, i);
        }
    }
    let m = keep.len();
    let mut one = Vec::with_capacity(m * m);
    for &p in &keep {
        for &q in &keep {
            let mut v = ints.spatial_one(p, q);
            for &i in frozen {
                v += 2.0 * ints.spatial_two(p, q, i, i) - ints.spatial_two(p, i, i, q);
            }
            one.push(v);
        }
    }
    let mut two = Vec::with_capacity(m * m * m * m);
    for &i in &keep {
        for &j in &keep {
            for &k in &keep {
                for &l in &keep {
                    two.push(ints.spatial_two(i, j, k, l));
                }
            }
        }
    }
    MolecularIntegrals::from_spatial(
        m,
        one,
        two,
        core,
        ints.n_electrons - 2 * frozen.len(),
        ints.ms2,
        ints.ordering,
    )
}

/// Eigenvalues fixed on the two tapered qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TaperSector {
    /// `(-1)^N`.
    pub z_total: i8,
    /// `(-1)^(N_up)`.
    pub z_up: i8,
}

impl TaperSector {
    pub fn from_counts(n_electrons: usize, n_up: usize) -> Self {
        let sign = |k: usize| if k % 2 == 0 { 1 } else { -1 };
        TaperSector { z_total: sign(n_electrons), z_up: sign(n_up) }
    }
}

/// Bitmask of the two qubits removed by tapering: `M - 1` and `M/2 - 1`.
pub fn tapered_qubits(m: usize) -> u64 {
    (1u64 << (m - 1)) | (1u64 << (m / 2 - 1))
}

/// Check that qubit `M-1` stores the total parity and qubit `M/2-1` the
/// parity of the first half of the modes.
fn check_taperable(enc: &Encoder) -> Result<()> {
    let m = enc.n_modes();
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let half = (1u64 << (m / 2)) - 1;
    if m < 2 || m % 2 != 0 || enc.matrix()[m - 1] != full || enc.matrix()[m / 2 - 1] != half {
        return Err(Error::UnsupportedScheme(alloc::format!(
            "{} at M={} does not store both parities on qubits M-1 and M/2-1",
            enc.scheme().name(),
            m
        )));
    }
    Ok(())
}

/// Replace Z on qubits `M-1` and `M/2-1` by their sector eigenvalues and
/// remove both qubits, shifting higher qubits down.
pub fn taper_two_qubits(h: &PauliSum, enc: &Encoder, sector: TaperSector) -> Result<PauliSum> {
    check_taperable(enc)?;
    let m = enc.n_modes();
    if h.n_qubits() != m {
        return Err(Error::DimensionMismatch { expected: m, found: h.n_qubits() });
    }
    let (q_tot, q_up) = (m - 1, m / 2 - 1);
    let removed = tapered_qubits(m);
    let mut out = PauliSum::zero(m - 2);
    for (p, c) in h.iter() {
        if p.x_mask() & removed != 0 {
            let q = if p.x_mask() >> q_tot & 1 == 1 { q_tot } else { q_up };
            return Err(Error::NotSymmetric { qubit: q });
        }
        let mut coeff = *c;
        if p.z_mask() >> q_tot & 1 == 1 {
            coeff *= sector.z_total as f64;
        }
        if p.z_mask() >> q_up & 1 == 1 {
            coeff *= sector.z_up as f64;
        }
        out.add_term(p.remove_qubits(removed), coeff);
    }
    out.drop_small(DEFAULT_DROP_TOL);
    Ok(out)
}

/// Basis state with the tapered qubits removed.
pub fn taper_state(q: u64, m: usize) -> u64 {
    crate::pauli::compress(q, tapered_qubits(m))
}

/// Reinsert the tapered qubits with the values implied by the sector.
pub fn untaper_state(q: u64, m: usize, sector: TaperSector) -> u64 {
    let removed = tapered_qubits(m);
    let mut out = 0u64;
    let mut j = 0;
    for k in 0..m {
        if removed >> k & 1 == 1 {
            let z = if k == m - 1 { sector.z_total } else { sector.z_up };
            if z < 0 {
                out |= 1 << k;
            }
        } else {
            out |= (q >> j & 1) << k;
            j += 1;
        }
    }
    out
}

/// Spin-summed spatial 1-RDM `gamma_kl = sum_s <a†_ks a_ls>` of an encoded state.
pub fn one_rdm(state: &[Complex64], enc: &Encoder, ints: &MolecularIntegrals) -> Result<Vec<f64>> {
    let n = ints.n_orbitals;
    let mut out = alloc::vec![0.0; n * n];
    for k in 0..n {
        for l in 0..n {
            let mut v = 0.0;
            for s in [Spin::Up, Spin::Down] {
                let p = ints.ordering.mode(k, s, n);
                let q = ints.ordering.mode(l, s, n);
                let op = FermionSum::word(2 * n, &[Ladder::create(p), Ladder::annihilate(q)], Complex64::new(1.0, 0.0))?;
                v += enc.encode_operator(&op)?.expectation(state)?.re;
            }
            out[k * n + l] = v;
        }
    }
    Ok(out)
}

/// Diagonal Pauli string `Z` over every qubit in `mask`.
pub fn z_string(mask: u64) -> PauliString {
    PauliString::uniform(mask, crate::pauli::Pauli::Z)
}
