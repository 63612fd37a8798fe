//! Linear fermion-to-qubit encodings.
//!
//! Every scheme here is a binary matrix `A` with `q = A f (mod 2)` between an
//! occupation vector `f` and a qubit basis state `q`. From `A` and its inverse
//! each ladder operator is assembled as
//!
//! ```text
//! a†_p = X_{U(p)} (I + Z_{F(p)}) / 2 Z_{P(p)}
//! a_p  = X_{U(p)} (I - Z_{F(p)}) / 2 Z_{P(p)}
//! ```
//!
//! where `U(p)` is column `p` of `A` (the qubits that store `f_p`), `F(p)` is
//! row `p` of `A^-1` (the qubits whose parity is `f_p`) and `P(p)` is the sum
//! of rows `0..p` of `A^-1` (the qubits whose parity is `f_0 + ... + f_{p-1}`).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fermion::FermionSum;
use crate::pauli::{Pauli, PauliString, PauliSum, DEFAULT_DROP_TOL, MAX_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EncodingScheme {
    JordanWigner,
    Parity,
    BravyiKitaev,
    BravyiKitaevTree,
}

impl EncodingScheme {
    pub const ALL: [EncodingScheme; 4] = [
        EncodingScheme::JordanWigner,
        EncodingScheme::Parity,
        EncodingScheme::BravyiKitaev,
        EncodingScheme::BravyiKitaevTree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EncodingScheme::JordanWigner => "jw",
            EncodingScheme::Parity => "parity",
            EncodingScheme::BravyiKitaev => "bk",
            EncodingScheme::BravyiKitaevTree => "bktree",
        }
    }
}

/// Rows of a square binary matrix, bit `j` of row `i` is entry `(i, j)`.
pub type BitMatrix = Vec<u64>;

/// The recursive BK matrix for the next power of two, cut to `m x m`.
pub fn bravyi_kitaev_matrix(m: usize) -> BitMatrix {
    let mut size = 1;
    let mut beta: BitMatrix = vec![1];
    while size < m {
        let mut next = beta.clone();
        for (r, row) in beta.iter().enumerate() {
            let mut shifted = row << size;
            if r == size - 1 {
                shifted |= (1u64 << size) - 1;
            }
            next.push(shifted);
        }
        beta = next;
        size *= 2;
    }
    beta.truncate(m);
    let mask = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    beta.iter().map(|r| r & mask).collect()
}

/// Parent of each node in the Fenwick tree over `0..m`; the root has none.
///
/// `Fen(L, R)`: when `L != R`, `R` becomes the parent of `floor((L + R) / 2)`,
/// then recurse on `(L, mid)` and `(mid + 1, R)`.
pub fn fenwick_parents(m: usize) -> Vec<Option<usize>> {
    fn fen(l: usize, r: usize, parent: &mut [Option<usize>]) {
        if l == r {
            return;
        }
        let mid = (l + r) / 2;
        parent[mid] = Some(r);
        fen(l, mid, parent);
        fen(mid + 1, r, parent);
    }
    let mut parent = vec![None; m];
    if m > 0 {
        fen(0, m - 1, &mut parent);
    }
    parent
}

/// Children of each Fenwick node, in ascending order.
pub fn fenwick_children(m: usize) -> Vec<Vec<usize>> {
    let mut children = vec![Vec::new(); m];
    for (k, p) in fenwick_parents(m).into_iter().enumerate() {
        if let Some(p) = p {
            children[p].push(k);
        }
    }
    children
}

/// Each qubit stores the parity of its Fenwick subtree.
pub fn fenwick_matrix(m: usize) -> BitMatrix {
    let parent = fenwick_parents(m);
    let mut rows = vec![0u64; m];
    for k in 0..m {
        let mut node = Some(k);
        while let Some(n) = node {
            rows[n] |= 1 << k;
            node = parent[n];
        }
    }
    rows
}

pub fn encoding_matrix(scheme: EncodingScheme, m: usize) -> BitMatrix {
    match scheme {
        EncodingScheme::JordanWigner => (0..m).map(|i| 1u64 << i).collect(),
        EncodingScheme::Parity => (0..m).map(|i| if i == 63 { u64::MAX } else { (1u64 << (i + 1)) - 1 }).collect(),
        EncodingScheme::BravyiKitaev => bravyi_kitaev_matrix(m),
        EncodingScheme::BravyiKitaevTree => fenwick_matrix(m),
    }
}

fn bit_matvec(rows: &[u64], v: u64) -> u64 {
    rows.iter().enumerate().fold(0, |acc, (i, r)| acc | (((r & v).count_ones() as u64) & 1) << i)
}

/// Inverse over GF(2) by Gauss-Jordan elimination.
fn bit_inverse(a: &[u64]) -> Option<BitMatrix> {
    let m = a.len();
    let mut left = a.to_vec();
    let mut right: BitMatrix = (0..m).map(|i| 1u64 << i).collect();
    for col in 0..m {
        let pivot = (col..m).find(|&r| left[r] >> col & 1 == 1)?;
        left.swap(col, pivot);
        right.swap(col, pivot);
        for r in 0..m {
            if r != col && left[r] >> col & 1 == 1 {
                left[r] ^= left[col];
                right[r] ^= right[col];
            }
        }
    }
    Some(right)
}

/// Encoding tables and cached ladder-operator images for one register size.
#[derive(Clone, Debug)]
pub struct Encoder {
    scheme: EncodingScheme,
    n_modes: usize,
    forward: BitMatrix,
    inverse: BitMatrix,
    creation: Vec<PauliSum>,
    annihilation: Vec<PauliSum>,
}

impl Encoder {
    pub fn new(scheme: EncodingScheme, n_modes: usize) -> Result<Self> {
        if n_modes == 0 || n_modes > MAX_QUBITS {
            return Err(Error::TooLarge { n: n_modes, limit: MAX_QUBITS });
        }
        let forward = encoding_matrix(scheme, n_modes);
        let inverse = bit_inverse(&forward).ok_or_else(|| Error::Numerical("singular encoding matrix".into()))?;
        let mut enc = Encoder { scheme, n_modes, forward, inverse, creation: Vec::new(), annihilation: Vec::new() };
        for p in 0..n_modes {
            enc.creation.push(enc.build_ladder(p, true));
            enc.annihilation.push(enc.build_ladder(p, false));
        }
        Ok(enc)
    }

    pub fn scheme(&self) -> EncodingScheme {
        self.scheme
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &[u64] {
        &self.forward
    }

    /// Qubits whose value flips with `f_p`, including `p` itself.
    pub fn update_mask(&self, p: usize) -> u64 {
        (0..self.n_modes).fold(0, |m, i| m | (self.forward[i] >> p & 1) << i)
    }

    /// Qubits whose parity equals `f_p`.
    pub fn occupation_mask(&self, p: usize) -> u64 {
        self.inverse[p]
    }

    /// Qubits whose parity equals `f_0 + ... + f_{p-1}`.
    pub fn parity_mask(&self, p: usize) -> u64 {
        self.inverse[..p].iter().fold(0, |m, r| m ^ r)
    }

    /// Update set: qubits other than `p` that store `f_p`.
    pub fn update_set(&self, p: usize) -> u64 {
        self.update_mask(p) & !(1 << p)
    }

    /// Flip set: qubits other than `p` that decide whether `q_p` equals `f_p`.
    pub fn flip_set(&self, p: usize) -> u64 {
        self.occupation_mask(p) & !(1 << p)
    }

    /// Remainder set: parity qubits not in the flip set.
    pub fn remainder_set(&self, p: usize) -> u64 {
        self.parity_mask(p) ^ self.flip_set(p)
    }

    pub fn encode_state(&self, occupation: u64) -> u64 {
        bit_matvec(&self.forward, occupation)
    }

    pub fn decode_state(&self, qubits: u64) -> u64 {
        bit_matvec(&self.inverse, qubits)
    }

    fn build_ladder(&self, p: usize, dagger: bool) -> PauliSum {
        let x = PauliString::uniform(self.update_mask(p), Pauli::X);
        let z_par = PauliString::uniform(self.parity_mask(p), Pauli::Z);
        let z_occ = PauliString::uniform(self.occupation_mask(p), Pauli::Z);
        let sign = if dagger { 0.5 } else { -0.5 };
        let (ph1, t1) = x.multiply(&z_par);
        let (ph_a, s) = z_occ.multiply(&z_par);
        let (ph_b, t2) = x.multiply(&s);
        PauliSum::from_terms(
            self.n_modes,
            [(t1, ph1 * 0.5), (t2, ph_a * ph_b * sign)],
        )
        .expect("strings fit the register")
    }

    /// Image of `a†_p` (`dagger`) or `a_p`.
    pub fn ladder(&self, p: usize, dagger: bool) -> Result<&PauliSum> {
        let table = if dagger { &self.creation } else { &self.annihilation };
        table.get(p).ok_or(Error::InvalidIndex { index: p, bound: self.n_modes })
    }

    pub fn encode_operator(&self, op: &FermionSum) -> Result<PauliSum> {
        if op.n_modes() != self.n_modes {
            return Err(Error::DimensionMismatch { expected: self.n_modes, found: op.n_modes() });
        }
        let mut out = PauliSum::zero(self.n_modes);
        for (word, c) in op.iter() {
            let mut acc = PauliSum::identity(self.n_modes, *c);
            for l in word {
                acc = acc.mul(self.ladder(l.mode, l.dagger)?)?;
            }
            for (p, v) in acc.iter() {
                out.add_term(*p, *v);
            }
        }
        out.drop_small(DEFAULT_DROP_TOL);
        Ok(out)
    }
}

/// One-shot encoding of a fermionic operator.
pub fn encode_operator(op: &FermionSum, scheme: EncodingScheme) -> Result<PauliSum> {
    Encoder::new(scheme, op.n_modes())?.encode_operator(op)
}

/// One-shot encoding of an occupation bitmask.
pub fn encode_state(occupation: u64, scheme: EncodingScheme, n_modes: usize) -> Result<u64> {
    Ok(Encoder::new(scheme, n_modes)?.encode_state(occupation))
}

/// Largest string weight in a sum.
pub fn max_weight(s: &PauliSum) -> usize {
    s.strings().map(|p| p.weight()).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::Ladder;
    use num_complex::Complex64;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn beta_8_matches_recursion_table() {
        let expect: [u64; 8] = [
            0b00000001, 0b00000011, 0b00000100, 0b00001111, 0b00010000, 0b00110000, 0b01000000, 0b11111111,
        ];
        assert_eq!(bravyi_kitaev_matrix(8), expect);
    }

    #[test]
    fn fenwick_0_7() {
        let ch = fenwick_children(8);
        assert_eq!(ch[7], [3, 5, 6]);
        assert_eq!(ch[3], [1, 2]);
        assert_eq!(ch[1], [0]);
        assert_eq!(ch[5], [4]);
        assert!(ch[0].is_empty() && ch[2].is_empty() && ch[4].is_empty() && ch[6].is_empty());
        assert_eq!(fenwick_parents(2), [Some(1), None]);
    }

    #[test]
    fn jw_table_images() {
        let e = Encoder::new(EncodingScheme::JordanWigner, 3).unwrap();
        // a_2 = Q_2 Z_1 Z_0 with Q = (X + iY) / 2.
        let expect = PauliSum::from_terms(3, [(ps("Z0 Z1 X2"), cx(0.5, 0.0)), (ps("Z0 Z1 Y2"), cx(0.0, 0.5))]).unwrap();
        assert_eq!(e.ladder(2, false).unwrap(), &expect);
        let n1 = FermionSum::word(3, &[Ladder::create(1), Ladder::annihilate(1)], cx(1.0, 0.0)).unwrap();
        let expect_n = PauliSum::from_terms(3, [(ps("I"), cx(0.5, 0.0)), (ps("Z1"), cx(-0.5, 0.0))]).unwrap();
        assert_eq!(e.encode_operator(&n1).unwrap(), expect_n);
    }

    #[test]
    fn parity_table_images() {
        let e = Encoder::new(EncodingScheme::Parity, 3).unwrap();
        // a_0 = X_2 X_1 Q_0.
        let a0 = PauliSum::from_terms(3, [(ps("X0 X1 X2"), cx(0.5, 0.0)), (ps("Y0 X1 X2"), cx(0.0, 0.5))]).unwrap();
        assert_eq!(e.ladder(0, false).unwrap(), &a0);
        // a_2 = Q_2 |0><0|_1 - Q†_2 |1><1|_1 = (X_2 Z_1 + i Y_2) / 2.
        let a2 = PauliSum::from_terms(3, [(ps("Z1 X2"), cx(0.5, 0.0)), (ps("Y2"), cx(0.0, 0.5))]).unwrap();
        assert_eq!(e.ladder(2, false).unwrap(), &a2);
        // n_j = (I - Z_j Z_{j-1}) / 2.
        let n2 = FermionSum::word(3, &[Ladder::create(2), Ladder::annihilate(2)], cx(1.0, 0.0)).unwrap();
        let expect = PauliSum::from_terms(3, [(ps("I"), cx(0.5, 0.0)), (ps("Z1 Z2"), cx(-0.5, 0.0))]).unwrap();
        assert_eq!(e.encode_operator(&n2).unwrap(), expect);
    }

    #[test]
    fn parity_state_map() {
        let e = Encoder::new(EncodingScheme::Parity, 3).unwrap();
        assert_eq!(e.encode_state(0b001), 0b111);
        assert_eq!(e.encode_state(0b010), 0b110);
        assert_eq!(e.encode_state(0b100), 0b100);
    }

    #[test]
    fn encode_decode_round_trip() {
        for scheme in EncodingScheme::ALL {
            for m in [1usize, 3, 6, 8, 11] {
                let e = Encoder::new(scheme, m).unwrap();
                for f in 0..(1u64 << m) {
                    assert_eq!(e.decode_state(e.encode_state(f)), f);
                }
            }
        }
    }

    #[test]
    fn bk_and_bktree_agree_on_states_at_powers_of_two() {
        for m in [2usize, 4, 8, 16] {
            assert_eq!(bravyi_kitaev_matrix(m), fenwick_matrix(m));
        }
        assert_ne!(bravyi_kitaev_matrix(6), fenwick_matrix(6));
    }

    #[test]
    fn bk_weight_is_logarithmic() {
        let m = 16;
        let jw = Encoder::new(EncodingScheme::JordanWigner, m).unwrap();
        let bk = Encoder::new(EncodingScheme::BravyiKitaev, m).unwrap();
        for p in 8..m {
            let wb = max_weight(bk.ladder(p, false).unwrap());
            let wj = max_weight(jw.ladder(p, false).unwrap());
            assert!(wb <= wj, "p={p}: bk {wb} jw {wj}");
            assert!(wb <= 1 + 2 * 4);
        }
    }

    #[test]
    fn set_structure_for_bk() {
        let e = Encoder::new(EncodingScheme::BravyiKitaev, 8).unwrap();
        // Qubit 3 stores f_0..f_3, so f_1 updates qubits 3 and 7.
        assert_eq!(e.update_set(1), 0b10001000);
        assert_eq!(e.parity_mask(4), 0b1000);
        assert_eq!(e.flip_set(3), 0b0110);
        assert_eq!(e.remainder_set(3), 0);
    }
}
