//! Pauli strings over up to 64 qubits and complex-weighted sums of them.
//!
//! Qubit 0 is the least-significant bit of a computational-basis index and the
//! rightmost character of a ket. A string is stored as an `(x, z)` bitmask pair,
//! so `X = (1, 0)`, `Z = (0, 1)` and `Y = (1, 1)`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 64;
/// Coefficients with magnitude at or below this are dropped.
pub const DEFAULT_DROP_TOL: f64 = 1e-12;
/// Largest register for which a dense matrix is built.
pub const DENSE_LIMIT: usize = 14;

const I_POW: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

/// `i^k` for any integer `k`.
#[inline]
pub fn i_pow(k: u32) -> Complex64 {
    I_POW[(k & 3) as usize]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A tensor product of single-qubit Paulis with no phase.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PauliString {
    x: u64,
    z: u64,
}

impl PauliString {
    pub const fn identity() -> Self {
        PauliString { x: 0, z: 0 }
    }

    pub const fn from_masks(x: u64, z: u64) -> Self {
        PauliString { x, z }
    }

    pub fn single(qubit: usize, p: Pauli) -> Result<Self> {
        let mut s = Self::identity();
        s.set(qubit, p)?;
        Ok(s)
    }

    /// Build from `(qubit, letter)` pairs. Later entries overwrite earlier ones.
    pub fn from_letters(letters: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity();
        for &(q, p) in letters {
            s.set(q, p)?;
        }
        Ok(s)
    }

    /// Same letter on every qubit in `mask`.
    pub fn uniform(mask: u64, p: Pauli) -> Self {
        let (x, z) = p.bits();
        PauliString {
            x: if x { mask } else { 0 },
            z: if z { mask } else { 0 },
        }
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.support() == 0
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    /// Highest qubit with a non-identity letter.
    pub fn max_qubit(&self) -> Option<usize> {
        let s = self.support();
        if s == 0 {
            None
        } else {
            Some(63 - s.leading_zeros() as usize)
        }
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        if qubit >= MAX_QUBITS {
            return Pauli::I;
        }
        Pauli::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) -> Result<()> {
        if qubit >= MAX_QUBITS {
            return Err(Error::InvalidIndex { index: qubit, bound: MAX_QUBITS });
        }
        let bit = 1u64 << qubit;
        let (x, z) = p.bits();
        self.x = if x { self.x | bit } else { self.x & !bit };
        self.z = if z { self.z | bit } else { self.z & !bit };
        Ok(())
    }

    /// Non-identity letters in ascending qubit order.
    pub fn letters(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        let mut rest = self.support();
        core::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let q = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some((q, self.get(q)))
        })
    }

    /// Number of Y letters; the string equals `i^ny X^x Z^z`.
    #[inline]
    fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Product `self * other = phase * result`.
    pub fn multiply(&self, other: &PauliString) -> (Complex64, PauliString) {
        let out = PauliString { x: self.x ^ other.x, z: self.z ^ other.z };
        let k = (self.y_count() + other.y_count() + 2 * (self.z & other.x).count_ones()).wrapping_sub(out.y_count());
        (i_pow(k), out)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Action on a computational-basis state: `P|b> = phase |b'>`.
    #[inline]
    pub fn apply_to_basis(&self, b: u64) -> (Complex64, u64) {
        let k = self.y_count() + 2 * (b & self.z).count_ones();
        (i_pow(k), b ^ self.x)
    }

    /// Drop qubits in `removed` (a bitmask) and shift higher qubits down.
    pub fn remove_qubits(&self, removed: u64) -> PauliString {
        PauliString { x: compress(self.x, removed), z: compress(self.z, removed) }
    }

    /// Letter code used for ordering: I < X < Y < Z on each qubit.
    fn code(&self, q: usize) -> u8 {
        match self.get(q) {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }
}

/// Remove the bits of `removed` from `v`, closing the gaps.
pub fn compress(v: u64, removed: u64) -> u64 {
    let mut out = 0u64;
    let mut j = 0;
    for q in 0..64 {
        if removed >> q & 1 == 1 {
            continue;
        }
        out |= (v >> q & 1) << j;
        j += 1;
    }
    out
}

impl Ord for PauliString {
    /// Lexicographic on letters, comparing qubit 0 first.
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = (self.x ^ other.x) | (self.z ^ other.z);
        if diff == 0 {
            return Ordering::Equal;
        }
        let q = diff.trailing_zeros() as usize;
        self.code(q).cmp(&other.code(q))
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("I");
        }
        let mut first = true;
        for (q, p) in self.letters() {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", p.letter(), q)?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({})", self)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `"X0 Z2 Y5"`; `"I"` or an empty string is the identity.
    fn from_str(s: &str) -> Result<Self> {
        let mut out = PauliString::identity();
        for tok in s.split_whitespace() {
            if tok == "I" {
                continue;
            }
            let mut chars = tok.chars();
            let letter = chars.next().ok_or_else(|| Error::Parse(String::from(tok)))?;
            let p = match letter {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(Error::Parse(alloc::format!("bad Pauli letter in '{tok}'"))),
            };
            let q: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::Parse(alloc::format!("bad qubit index in '{tok}'")))?;
            if out.get(q) != Pauli::I {
                return Err(Error::Parse(alloc::format!("qubit {q} repeated")));
            }
            out.set(q, p)?;
        }
        Ok(out)
    }
}

/// A complex linear combination of Pauli strings on a fixed register.
///
/// Terms are kept in canonical form: unique strings, sorted, with coefficients
/// of magnitude at most [`DEFAULT_DROP_TOL`] removed.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        PauliSum { n_qubits, terms: BTreeMap::new() }
    }

    pub fn identity(n_qubits: usize, coeff: Complex64) -> Self {
        let mut s = Self::zero(n_qubits);
        s.add_term(PauliString::identity(), coeff);
        s.drop_small(DEFAULT_DROP_TOL);
        s
    }

    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, Complex64)>,
    {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooLarge { n: n_qubits, limit: MAX_QUBITS });
        }
        let mut s = Self::zero(n_qubits);
        for (p, c) in terms {
            if let Some(q) = p.max_qubit() {
                if q >= n_qubits {
                    return Err(Error::InvalidIndex { index: q, bound: n_qubits });
                }
            }
            s.add_term(p, c);
        }
        s.drop_small(DEFAULT_DROP_TOL);
        Ok(s)
    }

    /// Single string with a coefficient.
    pub fn term(n_qubits: usize, p: PauliString, coeff: Complex64) -> Result<Self> {
        Self::from_terms(n_qubits, [(p, coeff)])
    }

    /// Parse one term per line in the form `coeff * X0 Z2 Y5`.
    pub fn parse(n_qubits: usize, text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (c, p) = match line.split_once('*') {
                Some((c, p)) => (c.trim(), p.trim()),
                None => (line, "I"),
            };
            terms.push((p.parse()?, parse_complex(c)?));
        }
        Self::from_terms(n_qubits, terms)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn strings(&self) -> impl Iterator<Item = &PauliString> {
        self.terms.keys()
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        self.terms.get(p).copied().unwrap_or_default()
    }

    /// Coefficient of the identity string.
    pub fn constant(&self) -> Complex64 {
        self.coefficient(&PauliString::identity())
    }

    pub fn without_identity(&self) -> Self {
        let mut s = self.clone();
        s.terms.remove(&PauliString::identity());
        s
    }

    /// Accumulate a term without re-canonicalizing; call [`Self::drop_small`] after.
    pub fn add_term(&mut self, p: PauliString, c: Complex64) {
        *self.terms.entry(p).or_default() += c;
    }

    pub fn drop_small(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.norm() > tol);
    }

    /// Widen the register; existing strings are untouched.
    pub fn with_n_qubits(mut self, n_qubits: usize) -> Result<Self> {
        if let Some(q) = self.terms.keys().filter_map(|p| p.max_qubit()).max() {
            if q >= n_qubits {
                return Err(Error::InvalidIndex { index: q, bound: n_qubits });
            }
        }
        self.n_qubits = n_qubits;
        Ok(self)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut s = self.clone();
        for v in s.terms.values_mut() {
            *v *= c;
        }
        s.drop_small(DEFAULT_DROP_TOL);
        s
    }

    pub fn add(&self, other: &PauliSum) -> Result<Self> {
        check_dims(self.n_qubits, other.n_qubits)?;
        let mut s = self.clone();
        for (p, c) in &other.terms {
            s.add_term(*p, *c);
        }
        s.drop_small(DEFAULT_DROP_TOL);
        Ok(s)
    }

    pub fn sub(&self, other: &PauliSum) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &PauliSum) -> Result<Self> {
        check_dims(self.n_qubits, other.n_qubits)?;
        let mut s = Self::zero(self.n_qubits);
        for (p, a) in &self.terms {
            for (q, b) in &other.terms {
                let (ph, r) = p.multiply(q);
                s.add_term(r, ph * a * b);
            }
        }
        s.drop_small(DEFAULT_DROP_TOL);
        Ok(s)
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &PauliSum) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn adjoint(&self) -> Self {
        let mut s = self.clone();
        for v in s.terms.values_mut() {
            *v = v.conj();
        }
        s
    }

    /// Largest imaginary part of any coefficient.
    pub fn hermiticity_residual(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// Largest real part of any coefficient.
    pub fn anti_hermiticity_residual(&self) -> f64 {
        self.terms.values().map(|c| c.re.abs()).fold(0.0, f64::max)
    }

    /// Sum of absolute coefficients, excluding the identity.
    pub fn one_norm_without_identity(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(p, _)| !p.is_identity())
            .map(|(_, c)| c.norm())
            .sum()
    }

    /// Interval guaranteed to contain the spectrum of a Hermitian sum.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let c = self.constant().re;
        let r = self.one_norm_without_identity();
        (c - r, c + r)
    }

    /// Term-wise equality up to `tol` on each coefficient.
    pub fn approx_eq(&self, other: &PauliSum, tol: f64) -> bool {
        if self.n_qubits != other.n_qubits {
            return false;
        }
        let keys: alloc::collections::BTreeSet<_> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().all(|p| (self.coefficient(p) - other.coefficient(p)).norm() <= tol)
    }

    /// Dense matrix in the computational basis.
    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > DENSE_LIMIT {
            return Err(Error::TooLarge { n: self.n_qubits, limit: DENSE_LIMIT });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for (p, c) in &self.terms {
            for b in 0..dim as u64 {
                let (ph, out) = p.apply_to_basis(b);
                m[(out as usize, b as usize)] += c * ph;
            }
        }
        Ok(m)
    }

    /// `out = self |psi>`.
    pub fn apply(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        let dim = 1usize << self.n_qubits;
        if psi.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: psi.len() });
        }
        let mut out = alloc::vec![Complex64::default(); dim];
        for (p, c) in &self.terms {
            for (b, amp) in psi.iter().enumerate() {
                let (ph, t) = p.apply_to_basis(b as u64);
                out[t as usize] += c * ph * amp;
            }
        }
        Ok(out)
    }

    /// `<psi| self |psi>` without forming the product state.
    pub fn expectation(&self, psi: &[Complex64]) -> Result<Complex64> {
        let dim = 1usize << self.n_qubits;
        if psi.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: psi.len() });
        }
        Ok(self.terms.iter().map(|(p, c)| c * string_expectation(p, psi)).sum())
    }
}

/// `<psi| P |psi>` for a single string.
pub fn string_expectation(p: &PauliString, psi: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::default();
    for (b, amp) in psi.iter().enumerate() {
        let (ph, t) = p.apply_to_basis(b as u64);
        acc += psi[t as usize].conj() * ph * amp;
    }
    acc
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let t = s.trim().trim_start_matches('(').trim_end_matches(')');
    let bad = || Error::Parse(alloc::format!("bad coefficient '{s}'"));
    if let Some(body) = t.strip_suffix('i') {
        // Split at the last sign that is not part of an exponent.
        let bytes = body.as_bytes();
        let mut cut = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                cut = Some(k);
                break;
            }
        }
        return match cut {
            Some(k) => Ok(Complex64::new(
                body[..k].parse().map_err(|_| bad())?,
                body[k..].parse().map_err(|_| bad())?,
            )),
            None => Ok(Complex64::new(0.0, body.parse().map_err(|_| bad())?)),
        };
    }
    Ok(Complex64::new(t.parse().map_err(|_| bad())?, 0.0))
}

fn fmt_complex(c: &Complex64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.im == 0.0 {
        write!(f, "{}", c.re)
    } else if c.im < 0.0 {
        write!(f, "({}{}i)", c.re, c.im)
    } else {
        write!(f, "({}+{}i)", c.re, c.im)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (p, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str("\n")?;
            }
            fmt_complex(c, f)?;
            write!(f, " * {}", p)?;
        }
        Ok(())
    }
}
