//! Second-quantized fermionic operators and molecular Hamiltonians.
//!
//! A word of ladder operators is applied right to left. On an occupation
//! bitmask `f`, `a_p` carries the sign `(-1)^(f_0 + ... + f_{p-1})`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{DEFAULT_DROP_TOL, DENSE_LIMIT};

/// `a_mode` or, when `dagger`, `a†_mode`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: usize) -> Self {
        Ladder { mode, dagger: true }
    }

    pub fn annihilate(mode: usize) -> Self {
        Ladder { mode, dagger: false }
    }
}

/// A coefficient times a product of ladder operators.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionOperator {
    pub factors: Vec<Ladder>,
    pub coeff: Complex64,
}

impl FermionOperator {
    pub fn new(factors: Vec<Ladder>, coeff: Complex64) -> Self {
        FermionOperator { factors, coeff }
    }
}

/// Apply a word of ladder operators to an occupation bitmask.
///
/// Returns `None` when the word annihilates the state.
pub fn apply_to_occupation(factors: &[Ladder], occupation: u64) -> Option<(f64, u64)> {
    let mut occ = occupation;
    let mut sign = 1.0;
    for l in factors.iter().rev() {
        let bit = 1u64 << l.mode;
        let occupied = occ & bit != 0;
        if occupied == l.dagger {
            return None;
        }
        if (occ & (bit - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        occ ^= bit;
    }
    Some((sign, occ))
}

/// A sum of fermionic words over `n_modes` modes. Identical words are merged.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionSum {
    n_modes: usize,
    terms: BTreeMap<Vec<Ladder>, Complex64>,
}

impl FermionSum {
    pub fn zero(n_modes: usize) -> Self {
        FermionSum { n_modes, terms: BTreeMap::new() }
    }

    pub fn from_operators<I>(n_modes: usize, ops: I) -> Result<Self>
    where
        I: IntoIterator<Item = FermionOperator>,
    {
        let mut s = Self::zero(n_modes);
        for op in ops {
            s.add_word(op.factors, op.coeff)?;
        }
        s.drop_small(DEFAULT_DROP_TOL);
        Ok(s)
    }

    /// Single word with a coefficient.
    pub fn word(n_modes: usize, factors: &[Ladder], coeff: Complex64) -> Result<Self> {
        Self::from_operators(n_modes, [FermionOperator::new(factors.to_vec(), coeff)])
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<Ladder>, &Complex64)> {
        self.terms.iter()
    }

    pub fn add_word(&mut self, factors: Vec<Ladder>, coeff: Complex64) -> Result<()> {
        if let Some(l) = factors.iter().find(|l| l.mode >= self.n_modes) {
            return Err(Error::InvalidIndex { index: l.mode, bound: self.n_modes });
        }
        *self.terms.entry(factors).or_default() += coeff;
        Ok(())
    }

    pub fn drop_small(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.norm() > tol);
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut s = self.clone();
        for v in s.terms.values_mut() {
            *v *= c;
        }
        s.drop_small(DEFAULT_DROP_TOL);
        s
    }

    pub fn add(&self, other: &FermionSum) -> Result<Self> {
        if self.n_modes != other.n_modes {
            return Err(Error::DimensionMismatch { expected: self.n_modes, found: other.n_modes });
        }
        let mut s = self.clone();
        for (w, c) in &other.terms {
            *s.terms.entry(w.clone()).or_default() += c;
        }
        s.drop_small(DEFAULT_DROP_TOL);
        Ok(s)
    }

    pub fn sub(&self, other: &FermionSum) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Word-level product without reordering.
    pub fn mul(&self, other: &FermionSum) -> Result<Self> {
        if self.n_modes != other.n_modes {
            return Err(Error::DimensionMismatch { expected: self.n_modes, found: other.n_modes });
        }
        let mut s = Self::zero(self.n_modes);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                *s.terms.entry(w).or_default() += ca * cb;
            }
        }
        s.drop_small(DEFAULT_DROP_TOL);
        Ok(s)
    }

    pub fn adjoint(&self) -> Self {
        let mut s = Self::zero(self.n_modes);
        for (w, c) in &self.terms {
            let rev: Vec<Ladder> = w.iter().rev().map(|l| Ladder { mode: l.mode, dagger: !l.dagger }).collect();
            *s.terms.entry(rev).or_default() += c.conj();
        }
        s
    }

    /// Creation operators to the left, each block in descending mode order,
    /// with anticommutator contractions added and zero words removed.
    pub fn normal_order(&self) -> Self {
        let mut s = Self::zero(self.n_modes);
        for (w, c) in &self.terms {
            for (nw, nc) in normal_order_word(w, *c) {
                *s.terms.entry(nw).or_default() += nc;
            }
        }
        s.drop_small(DEFAULT_DROP_TOL);
        s
    }

    /// Equality after normal ordering, coefficient-wise up to `tol`.
    pub fn approx_eq(&self, other: &FermionSum, tol: f64) -> bool {
        match self.normal_order().sub(&other.normal_order()) {
            Ok(d) => d.terms.values().all(|c| c.norm() <= tol),
            Err(_) => false,
        }
    }

    /// Largest coefficient of `self - self†` after normal ordering.
    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.normal_order().sub(&self.adjoint().normal_order()).unwrap_or_else(|_| self.clone());
        d.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Action on a superposition of occupation bitmasks.
    pub fn apply(&self, state: &BTreeMap<u64, Complex64>) -> BTreeMap<u64, Complex64> {
        let mut out: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (w, c) in &self.terms {
            for (occ, amp) in state {
                if let Some((sign, next)) = apply_to_occupation(w, *occ) {
                    *out.entry(next).or_default() += c * amp * sign;
                }
            }
        }
        out.retain(|_, a| a.norm() > DEFAULT_DROP_TOL);
        out
    }

    /// Dense matrix in the occupation-number basis, index = occupation bitmask.
    pub fn occupation_matrix(&self) -> Result<DMatrix<Complex64>> {
        if self.n_modes > DENSE_LIMIT {
            return Err(Error::TooLarge { n: self.n_modes, limit: DENSE_LIMIT });
        }
        let dim = 1usize << self.n_modes;
        let mut m = DMatrix::zeros(dim, dim);
        for (w, c) in &self.terms {
            for f in 0..dim as u64 {
                if let Some((sign, g)) = apply_to_occupation(w, f) {
                    m[(g as usize, f as usize)] += c * sign;
                }
            }
        }
        Ok(m)
    }
}

fn normal_order_word(word: &[Ladder], coeff: Complex64) -> Vec<(Vec<Ladder>, Complex64)> {
    let mut out = Vec::new();
    let mut term = word.to_vec();
    let mut c = coeff;
    for i in 1..term.len() {
        for j in (1..=i).rev() {
            let left = term[j - 1];
            let right = term[j];
            if right.dagger && !left.dagger {
                term.swap(j - 1, j);
                if right.mode == left.mode {
                    let mut contracted = term.clone();
                    contracted.remove(j);
                    contracted.remove(j - 1);
                    out.extend(normal_order_word(&contracted, c));
                }
                c = -c;
            } else if right.dagger == left.dagger {
                if right.mode == left.mode {
                    return out;
                }
                if right.mode > left.mode {
                    term.swap(j - 1, j);
                    c = -c;
                }
            }
        }
    }
    out.push((term, c));
    out
}

/// Layout of spin-orbitals over modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SpinOrdering {
    /// All spin-up orbitals first, then all spin-down: mode `k` and `k + M/2`
    /// share spatial orbital `k`.
    #[default]
    SpinBlocked,
    /// Alternating up, down: modes `2k` and `2k + 1` share spatial orbital `k`.
    Interleaved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

impl SpinOrdering {
    pub fn mode(self, orbital: usize, spin: Spin, n_orbitals: usize) -> usize {
        match (self, spin) {
            (SpinOrdering::SpinBlocked, Spin::Up) => orbital,
            (SpinOrdering::SpinBlocked, Spin::Down) => orbital + n_orbitals,
            (SpinOrdering::Interleaved, Spin::Up) => 2 * orbital,
            (SpinOrdering::Interleaved, Spin::Down) => 2 * orbital + 1,
        }
    }

    /// `(spatial orbital, spin)` of a mode.
    pub fn split(self, mode: usize, n_orbitals: usize) -> (usize, Spin) {
        match self {
            SpinOrdering::SpinBlocked if mode < n_orbitals => (mode, Spin::Up),
            SpinOrdering::SpinBlocked => (mode - n_orbitals, Spin::Down),
            SpinOrdering::Interleaved if mode % 2 == 0 => (mode / 2, Spin::Up),
            SpinOrdering::Interleaved => (mode / 2, Spin::Down),
        }
    }

    /// Bitmask of spin-up modes.
    pub fn up_mask(self, n_orbitals: usize) -> u64 {
        (0..n_orbitals).fold(0, |m, k| m | 1 << self.mode(k, Spin::Up, n_orbitals))
    }
}

/// Occupation bitmask of the lowest-orbital determinant.
pub fn hartree_fock_occupation(n_orbitals: usize, n_up: usize, n_down: usize, ordering: SpinOrdering) -> u64 {
    let mut occ = 0u64;
    for k in 0..n_up {
        occ |= 1 << ordering.mode(k, Spin::Up, n_orbitals);
    }
    for k in 0..n_down {
        occ |= 1 << ordering.mode(k, Spin::Down, n_orbitals);
    }
    occ
}

/// `sum_p a†_p a_p` over the modes in `mask`.
pub fn number_operator(n_modes: usize, mask: u64) -> FermionSum {
    let mut s = FermionSum::zero(n_modes);
    for p in (0..n_modes).filter(|p| mask >> p & 1 == 1) {
        s.terms.insert(vec![Ladder::create(p), Ladder::annihilate(p)], Complex64::new(1.0, 0.0));
    }
    s
}

/// Spin-restricted one- and two-electron integrals over spatial orbitals.
///
/// Two-electron integrals are stored in chemists' notation `(ij|kl)`. The
/// spin-orbital accessors return the physicists' coefficient `h_pqrs = (ps|qr)`
/// of `a†_p a†_q a_r a_s`, zero unless spins match.
#[derive(Clone, Debug, PartialEq)]
pub struct MolecularIntegrals {
    pub n_orbitals: usize,
    pub n_electrons: usize,
    /// Twice the spin projection, `N_up - N_down`.
    pub ms2: i32,
    pub core_energy: f64,
    pub ordering: SpinOrdering,
    one: Vec<f64>,
    two: Vec<f64>,
}

impl MolecularIntegrals {
    /// `one` is `n x n` row-major; `two` is `n^4` with `(ij|kl)` at `((i n + j) n + k) n + l`.
    pub fn from_spatial(
        n_orbitals: usize,
        one: Vec<f64>,
        two: Vec<f64>,
        core_energy: f64,
        n_electrons: usize,
        ms2: i32,
        ordering: SpinOrdering,
    ) -> Result<Self> {
        let n = n_orbitals;
        if 2 * n > crate::pauli::MAX_QUBITS {
            return Err(Error::TooLarge { n: 2 * n, limit: crate::pauli::MAX_QUBITS });
        }
        if one.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: one.len() });
        }
        if two.len() != n * n * n * n {
            return Err(Error::DimensionMismatch { expected: n * n * n * n, found: two.len() });
        }
        if n_electrons > 2 * n || ms2.unsigned_abs() as usize > n_electrons || (n_electrons as i32 + ms2) % 2 != 0 {
            return Err(Error::InvalidIndex { index: n_electrons, bound: 2 * n });
        }
        Ok(MolecularIntegrals { n_orbitals, n_electrons, ms2, core_energy, ordering, one, two })
    }

    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.n_orbitals
    }

    pub fn n_up(&self) -> usize {
        ((self.n_electrons as i32 + self.ms2) / 2) as usize
    }

    pub fn n_down(&self) -> usize {
        ((self.n_electrons as i32 - self.ms2) / 2) as usize
    }

    pub fn spatial_one(&self, i: usize, j: usize) -> f64 {
        self.one[i * self.n_orbitals + j]
    }

    /// Chemists' `(ij|kl)`.
    pub fn spatial_two(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n_orbitals;
        self.two[((i * n + j) * n + k) * n + l]
    }

    pub fn one_body(&self, p: usize, q: usize) -> f64 {
        let (i, si) = self.ordering.split(p, self.n_orbitals);
        let (j, sj) = self.ordering.split(q, self.n_orbitals);
        if si == sj {
            self.spatial_one(i, j)
        } else {
            0.0
        }
    }

    /// Physicists' `h_pqrs = (ps|qr)`.
    pub fn two_body(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_orbitals;
        let (i, sp) = self.ordering.split(p, n);
        let (j, sq) = self.ordering.split(q, n);
        let (k, sr) = self.ordering.split(r, n);
        let (l, ss) = self.ordering.split(s, n);
        if sp != ss || sq != sr {
            return 0.0;
        }
        self.spatial_two(i, l, j, k)
    }

    pub fn hartree_fock_occupation(&self) -> u64 {
        hartree_fock_occupation(self.n_orbitals, self.n_up(), self.n_down(), self.ordering)
    }

    pub fn with_ordering(&self, ordering: SpinOrdering) -> Self {
        MolecularIntegrals { ordering, ..self.clone() }
    }

    /// Largest violation of the eight-fold permutational symmetry.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.n_orbitals;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.spatial_one(i, j) - self.spatial_one(j, i)).abs());
                for k in 0..n {
                    for l in 0..n {
                        let v = self.spatial_two(i, j, k, l);
                        for w in [
                            self.spatial_two(j, i, k, l),
                            self.spatial_two(i, j, l, k),
                            self.spatial_two(k, l, i, j),
                        ] {
                            worst = worst.max((v - w).abs());
                        }
                    }
                }
            }
        }
        worst
    }
}

/// `H = sum h_pq a†_p a_q + 1/2 sum h_pqrs a†_p a†_q a_r a_s + E_core`,
/// normal ordered with integrals of magnitude at most `tol` dropped.
pub fn build_molecular_hamiltonian(ints: &MolecularIntegrals, tol: f64) -> FermionSum {
    let m = ints.n_spin_orbitals();
    let mut h = FermionSum::zero(m);
    let one = Complex64::new(1.0, 0.0);
    if ints.core_energy.abs() > tol {
        h.terms.insert(Vec::new(), one * ints.core_energy);
    }
    for p in 0..m {
        for q in 0..m {
            let v = ints.one_body(p, q);
            if v.abs() > tol {
                *h.terms.entry(vec![Ladder::create(p), Ladder::annihilate(q)]).or_default() += one * v;
            }
        }
    }
    let mut raw = FermionSum::zero(m);
    for p in 0..m {
        for q in (0..m).filter(|&q| q != p) {
            for r in 0..m {
                for s in (0..m).filter(|&s| s != r) {
                    let v = ints.two_body(p, q, r, s);
                    if v.abs() > tol {
                        let w = vec![Ladder::create(p), Ladder::create(q), Ladder::annihilate(r), Ladder::annihilate(s)];
                        *raw.terms.entry(w).or_default() += one * (0.5 * v);
                    }
                }
            }
        }
    }
    h.add(&raw.normal_order()).expect("same register").normal_order()
}

/// An anti-Hermitian cluster generator `T - T†` with a readable label.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub label: String,
    pub op: FermionSum,
}

/// Singles and doubles generators `T - T†` from `occupied` into `virtual_`.
///
/// With `spin` set, only excitations preserving the spin-up and spin-down
/// counts are kept. Generators equal up to sign to an earlier one are dropped.
pub fn uccsd_generators(
    n_modes: usize,
    occupied: &[usize],
    virtual_: &[usize],
    spin: Option<SpinOrdering>,
) -> Result<Vec<Generator>> {
    for &p in occupied.iter().chain(virtual_) {
        if p >= n_modes {
            return Err(Error::InvalidIndex { index: p, bound: n_modes });
        }
    }
    let n_orb = n_modes / 2;
    let up = |p: usize| spin.map(|o| o.split(p, n_orb).1 == Spin::Up);
    let mut occ = occupied.to_vec();
    let mut vir = virtual_.to_vec();
    occ.sort_unstable();
    occ.dedup();
    vir.sort_unstable();
    vir.dedup();

    let one = Complex64::new(1.0, 0.0);
    let mut out: Vec<Generator> = Vec::new();
    let mut push = |label: String, t: FermionSum| {
        let g = t.sub(&t.adjoint()).expect("same register").normal_order();
        if g.is_empty() {
            return;
        }
        let neg = g.scale(-one);
        if out.iter().any(|e| e.op.approx_eq(&g, 1e-12) || e.op.approx_eq(&neg, 1e-12)) {
            return;
        }
        out.push(Generator { label, op: g });
    };

    for &a in &occ {
        for &i in &vir {
            if i == a || up(i) != up(a) {
                continue;
            }
            let t = FermionSum::word(n_modes, &[Ladder::create(i), Ladder::annihilate(a)], one)?;
            push(format!("{i}<-{a}"), t);
        }
    }
    for (x, &a) in occ.iter().enumerate() {
        for &b in &occ[x + 1..] {
            for (y, &i) in vir.iter().enumerate() {
                for &j in &vir[y + 1..] {
                    let mut src = [up(a), up(b)];
                    let mut dst = [up(i), up(j)];
                    src.sort_unstable();
                    dst.sort_unstable();
                    if src != dst {
                        continue;
                    }
                    let w = [Ladder::create(j), Ladder::create(i), Ladder::annihilate(b), Ladder::annihilate(a)];
                    let t = FermionSum::word(n_modes, &w, one)?;
                    push(format!("{j},{i}<-{b},{a}"), t);
                }
            }
        }
    }
    Ok(out)
}

/// Number-conserving parts of a Hamiltonian by excitation pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianParts {
    /// Identity, `n_p` and `n_p n_q` words.
    pub diagonal: FermionSum,
    /// Words moving one electron, including `a†_p a_q n_r` forms.
    pub hopping: FermionSum,
    /// Words moving two electrons.
    pub exchange: FermionSum,
}

/// Split a normal-ordered Hamiltonian into diagonal, hopping and exchange words.
pub fn partition_hamiltonian(h: &FermionSum) -> HamiltonianParts {
    let n = h.n_modes();
    let mut parts = HamiltonianParts {
        diagonal: FermionSum::zero(n),
        hopping: FermionSum::zero(n),
        exchange: FermionSum::zero(n),
    };
    for (w, c) in h.normal_order().iter() {
        let mut created: Vec<usize> = w.iter().filter(|l| l.dagger).map(|l| l.mode).collect();
        let mut removed: Vec<usize> = w.iter().filter(|l| !l.dagger).map(|l| l.mode).collect();
        created.sort_unstable();
        removed.sort_unstable();
        let moved = created.iter().filter(|p| !removed.contains(p)).count();
        let target = match moved {
            0 => &mut parts.diagonal,
            1 => &mut parts.hopping,
            _ => &mut parts.exchange,
        };
        target.terms.insert(w.clone(), *c);
    }
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn cr(p: usize) -> Ladder {
        Ladder::create(p)
    }

    fn an(p: usize) -> Ladder {
        Ladder::annihilate(p)
    }

    #[test]
    fn normal_order_swaps_annihilators() {
        let s = FermionSum::word(2, &[an(0), an(1)], c(1.0)).unwrap().normal_order();
        let expect = FermionSum::word(2, &[an(1), an(0)], c(-1.0)).unwrap();
        assert_eq!(s, expect);
    }

    #[test]
    fn normal_order_contracts_same_mode() {
        // a_0 a†_0 = 1 - a†_0 a_0
        let s = FermionSum::word(1, &[an(0), cr(0)], c(1.0)).unwrap().normal_order();
        let mut e = FermionSum::word(1, &[], c(1.0)).unwrap();
        e = e.add(&FermionSum::word(1, &[cr(0), an(0)], c(-1.0)).unwrap()).unwrap();
        assert_eq!(s, e);
        assert!(FermionSum::word(2, &[cr(1), cr(1)], c(1.0)).unwrap().normal_order().is_empty());
    }

    #[test]
    fn normal_order_preserves_matrix() {
        let w = [an(2), cr(0), an(1), cr(2), cr(1)];
        let s = FermionSum::word(3, &w, c(0.7)).unwrap();
        let a = s.occupation_matrix().unwrap();
        let b = s.normal_order().occupation_matrix().unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn canonical_anticommutation_in_occupation_basis() {
        let m = 4;
        for p in 0..m {
            for q in 0..m {
                let ap = FermionSum::word(m, &[an(p)], c(1.0)).unwrap();
                let aq = FermionSum::word(m, &[cr(q)], c(1.0)).unwrap();
                let ac = ap.mul(&aq).unwrap().add(&aq.mul(&ap).unwrap()).unwrap().normal_order();
                let expect = if p == q { FermionSum::word(m, &[], c(1.0)).unwrap() } else { FermionSum::zero(m) };
                assert_eq!(ac, expect, "p={p} q={q}");
            }
        }
    }

    #[test]
    fn occupation_phase() {
        // a†_2 on |011> picks up (-1)^2.
        assert_eq!(apply_to_occupation(&[cr(2)], 0b011), Some((1.0, 0b111)));
        assert_eq!(apply_to_occupation(&[an(1)], 0b011), Some((-1.0, 0b001)));
        assert_eq!(apply_to_occupation(&[cr(0)], 0b001), None);
        // Right to left: a†_1 a_0 |01> = a†_1 |00> = |10>.
        assert_eq!(apply_to_occupation(&[cr(1), an(0)], 0b01), Some((1.0, 0b10)));
    }

    #[test]
    fn out_of_range_mode() {
        let r = FermionSum::word(2, &[cr(2)], c(1.0));
        assert_eq!(r, Err(Error::InvalidIndex { index: 2, bound: 2 }));
    }

    #[test]
    fn h2_interleaved_generators() {
        let g = uccsd_generators(4, &[0, 1], &[2, 3], Some(SpinOrdering::Interleaved)).unwrap();
        let labels: Vec<_> = g.iter().map(|g| g.label.as_str()).collect();
        assert_eq!(labels, ["2<-0", "3<-1", "3,2<-1,0"]);
        for gen in &g {
            let herm = gen.op.add(&gen.op.adjoint()).unwrap().normal_order();
            assert!(herm.is_empty());
        }
    }

    #[test]
    fn degenerate_generators_merge() {
        // Occupied and virtual sets overlap, so a†_1 a_0 and a†_0 a_1 give
        // generators that differ only in sign.
        let g = uccsd_generators(2, &[0, 1], &[0, 1], None).unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn spin_orderings_round_trip() {
        for o in [SpinOrdering::SpinBlocked, SpinOrdering::Interleaved] {
            for p in 0..8 {
                let (k, s) = o.split(p, 4);
                assert_eq!(o.mode(k, s, 4), p);
            }
        }
        assert_eq!(SpinOrdering::SpinBlocked.up_mask(3), 0b000111);
        assert_eq!(SpinOrdering::Interleaved.up_mask(3), 0b010101);
        assert_eq!(hartree_fock_occupation(2, 1, 1, SpinOrdering::Interleaved), 0b0011);
        assert_eq!(hartree_fock_occupation(2, 1, 1, SpinOrdering::SpinBlocked), 0b0101);
    }

    #[test]
    fn partition_classifies_words() {
        let mut h = FermionSum::zero(4);
        h.add_word(vec![cr(0), an(0)], c(1.0)).unwrap();
        h.add_word(vec![cr(1), cr(0), an(1), an(0)], c(0.5)).unwrap();
        h.add_word(vec![cr(2), an(0)], c(0.2)).unwrap();
        h.add_word(vec![cr(2), cr(1), an(1), an(0)], c(0.3)).unwrap();
        h.add_word(vec![cr(3), cr(2), an(1), an(0)], c(0.1)).unwrap();
        let p = partition_hamiltonian(&h);
        assert_eq!((p.diagonal.len(), p.hopping.len(), p.exchange.len()), (2, 2, 1));
    }
}
