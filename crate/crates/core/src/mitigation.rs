//! Error mitigation on the noisy simulator.
//!
//! Zero-noise extrapolation scales the insertion probabilities of a
//! [`NoiseModel`] directly rather than stretching gates. Probabilistic error
//! cancellation inverts Pauli channels by quasi-probability sampling, and
//! stabiliser checks discard trajectories whose parity was corrupted.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fermion::SpinOrdering;
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::simulator::{
    run_trajectory, sample_expectation, Circuit, Gate, NoiseModel, ShotEstimate, StateVector, TwoQubitChannel,
    MAX_STATE_QUBITS,
};
use crate::vqe::{estimate_energy, mean_and_error, Ansatz, Measurement, NoisySampling};

/// Estimates at increasing noise scales, the first at scale 1.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseScaledSeries {
    points: Vec<(f64, ShotEstimate)>,
}

impl NoiseScaledSeries {
    pub fn new(points: Vec<(f64, ShotEstimate)>) -> Result<Self> {
        match points.first() {
            Some((l, _)) if *l == 1.0 => {}
            Some((l, _)) => return Err(Error::InvalidScale(*l)),
            None => return Err(Error::InvalidScale(f64::NAN)),
        }
        if points.len() < 2 {
            return Err(Error::InvalidThreshold("extrapolation needs at least two points".into()));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidScale(w[1].0));
            }
        }
        Ok(NoiseScaledSeries { points })
    }

    pub fn points(&self) -> &[(f64, ShotEstimate)] {
        &self.points
    }

    pub fn unmitigated(&self) -> ShotEstimate {
        self.points[0].1
    }
}

/// Weights `w_i` with `intercept = sum_i w_i y_i` for an ordinary
/// least-squares line through `(x_i, y_i)`.
fn intercept_weights(xs: &[f64]) -> Vec<f64> {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    xs.iter().map(|x| 1.0 / n - mean * (x - mean) / sxx).collect()
}

/// Richardson extrapolation to zero noise.
///
/// Two points give `(l y(1) - y(l)) / (l - 1)`; more points fit a straight
/// line by least squares. The error assumes independent estimates.
pub fn extrapolate_linear(series: &NoiseScaledSeries) -> ShotEstimate {
    let xs: Vec<f64> = series.points.iter().map(|p| p.0).collect();
    let w = intercept_weights(&xs);
    let mean = w.iter().zip(&series.points).map(|(w, p)| w * p.1.mean).sum();
    let var: f64 = w.iter().zip(&series.points).map(|(w, p)| w * w * p.1.std_error * p.1.std_error).sum();
    ShotEstimate { mean, std_error: var.sqrt() }
}

/// Fit `y(l) = A exp(-b l)` by least squares on `ln|y|` and return `A`.
///
/// All estimates must share a nonzero sign.
pub fn extrapolate_exponential(series: &NoiseScaledSeries) -> Result<ShotEstimate> {
    let sign = series.points[0].1.mean.signum();
    if series.points.iter().any(|p| p.1.mean == 0.0 || p.1.mean.signum() != sign) {
        return Err(Error::SignInconsistent);
    }
    let xs: Vec<f64> = series.points.iter().map(|p| p.0).collect();
    let w = intercept_weights(&xs);
    let log_a: f64 = w.iter().zip(&series.points).map(|(w, p)| w * p.1.mean.abs().ln()).sum();
    let a = sign * log_a.exp();
    let rel: f64 = w.iter().zip(&series.points).map(|(w, p)| (w * p.1.std_error / p.1.mean).powi(2)).sum();
    Ok(ShotEstimate { mean: a, std_error: a.abs() * rel.sqrt() })
}

/// Estimate the energy at each noise scale.
///
/// Every scale reuses the generator seeded with `seed`, so the error sets at
/// larger scales contain those at smaller ones and the differences between
/// points carry less sampling noise.
pub fn zne_series(
    ansatz: &Ansatz,
    theta: &[f64],
    h: &PauliSum,
    noisy: &NoisySampling,
    lambdas: &[f64],
    measurement: Measurement,
    seed: u64,
) -> Result<NoiseScaledSeries> {
    let mut points = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        if !(l >= 1.0) {
            return Err(Error::InvalidScale(l));
        }
        let scaled = NoisySampling { noise: noisy.noise.scaled(l)?, trajectories: noisy.trajectories };
        let mut rng = crate::rng::seeded(seed);
        points.push((l, estimate_energy(ansatz, theta, h, measurement, Some(&scaled), &mut rng)?));
    }
    NoiseScaledSeries::new(points)
}

/// A Pauli channel `rho -> sum_Q e_Q Q rho Q` on `arity` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliChannel {
    pub arity: usize,
    /// Probability of each Pauli on qubits `0..arity`, including the identity.
    pub probabilities: Vec<(PauliString, f64)>,
}

/// All `4^arity` Pauli strings on qubits `0..arity`, qubit `q` taking letter
/// `(k >> 2q) & 3` of `I, X, Y, Z` in entry `k`.
pub fn pauli_basis(arity: usize) -> Vec<PauliString> {
    const L: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    (0..4usize.pow(arity as u32))
        .map(|k| {
            let mut s = PauliString::identity();
            for q in 0..arity {
                let _ = s.set(q, L[(k >> (2 * q)) & 3]);
            }
            s
        })
        .collect()
}

fn sign(p: &PauliString, q: &PauliString) -> f64 {
    if p.commutes_with(q) {
        1.0
    } else {
        -1.0
    }
}

impl PauliChannel {
    /// A uniform X, Y or Z on each qubit independently with probability `p`.
    pub fn local(arity: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        let probabilities = pauli_basis(arity)
            .into_iter()
            .map(|s| {
                let w = s.weight() as i32;
                (s, (p / 3.0).powi(w) * (1.0 - p).powi(arity as i32 - w))
            })
            .collect();
        Ok(PauliChannel { arity, probabilities })
    }

    /// Identity with probability `1 - p`, otherwise a uniform non-identity Pauli.
    pub fn uniform(arity: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        let others = (4usize.pow(arity as u32) - 1) as f64;
        let probabilities =
            pauli_basis(arity).into_iter().map(|s| (s, if s.is_identity() { 1.0 - p } else { p / others })).collect();
        Ok(PauliChannel { arity, probabilities })
    }

    /// The error channel a noise model applies after a gate of this arity.
    pub fn from_noise(noise: &NoiseModel, arity: usize) -> Result<Self> {
        match (arity, noise.two_qubit) {
            (1, _) => Self::local(1, noise.p1),
            (2, TwoQubitChannel::Local) => Self::local(2, noise.p2),
            (2, TwoQubitChannel::Uniform) => Self::uniform(2, noise.p2),
            _ => Err(Error::UnsupportedGate(alloc::format!("no error channel for {arity}-qubit gates"))),
        }
    }

    /// Eigenvalues of the Pauli transfer matrix, indexed like [`pauli_basis`].
    pub fn transfer_eigenvalues(&self) -> Vec<f64> {
        pauli_basis(self.arity)
            .iter()
            .map(|p| self.probabilities.iter().map(|(q, e)| e * sign(p, q)).sum())
            .collect()
    }
}

/// One term of a quasi-probability decomposition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuasiEntry {
    pub pauli: PauliString,
    pub probability: f64,
    pub parity: i8,
}

/// `Lambda^-1 = gamma sum_Q parity_Q prob_Q (Q . Q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiProbDecomposition {
    pub arity: usize,
    pub gamma: f64,
    pub entries: Vec<QuasiEntry>,
}

impl QuasiProbDecomposition {
    /// Signed coefficients `gamma parity prob`.
    pub fn coefficients(&self) -> Vec<f64> {
        self.entries.iter().map(|e| self.gamma * e.parity as f64 * e.probability).collect()
    }

    /// Transfer-matrix eigenvalues of the represented map.
    pub fn transfer_eigenvalues(&self) -> Vec<f64> {
        let q = self.coefficients();
        pauli_basis(self.arity)
            .iter()
            .map(|p| self.entries.iter().zip(&q).map(|(e, c)| c * sign(p, &e.pauli)).sum())
            .collect()
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &QuasiEntry {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for e in &self.entries {
            acc += e.probability;
            if u < acc {
                return e;
            }
        }
        self.entries.last().expect("decomposition has entries")
    }
}

/// Quasi-probability representation of the inverse of a Pauli channel.
///
/// The inverse is diagonal in the Pauli transfer basis with eigenvalues
/// `1 / lambda_P`; its Pauli coefficients come from solving the sign system
/// `sum_Q q_Q s(P, Q) = 1 / lambda_P`.
pub fn pec_decompose(channel: &PauliChannel) -> Result<QuasiProbDecomposition> {
    let paulis = pauli_basis(channel.arity);
    let lambda = channel.transfer_eigenvalues();
    if let Some(l) = lambda.iter().find(|l| l.abs() < 1e-12) {
        return Err(Error::Numerical(alloc::format!("channel is not invertible (eigenvalue {l})")));
    }
    let d = paulis.len();
    let signs = DMatrix::from_fn(d, d, |i, j| sign(&paulis[i], &paulis[j]));
    let rhs = DVector::from_iterator(d, lambda.iter().map(|l| 1.0 / l));
    let q = signs.lu().solve(&rhs).ok_or_else(|| Error::Numerical("singular sign system".into()))?;
    let gamma: f64 = q.iter().map(|c| c.abs()).sum();
    let entries = paulis
        .into_iter()
        .zip(q.iter())
        .map(|(pauli, c)| QuasiEntry { pauli, probability: c.abs() / gamma, parity: if *c < 0.0 { -1 } else { 1 } })
        .collect();
    Ok(QuasiProbDecomposition { arity: channel.arity, gamma, entries })
}

/// Inverse of depolarizing noise of strength `p`, `rho -> (1 - p) rho + p I/2`
/// on each qubit; for `arity = 2` the channel acts on both qubits independently.
pub fn pec_decompose_depolarizing(p: f64, arity: usize) -> Result<QuasiProbDecomposition> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    if !(1..=2).contains(&arity) {
        return Err(Error::UnsupportedGate(alloc::format!("arity {arity}")));
    }
    pec_decompose(&PauliChannel::local(arity, 0.75 * p)?)
}

/// Decompositions for the single- and two-qubit gates of a circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct PecPlan {
    pub single: QuasiProbDecomposition,
    pub two: QuasiProbDecomposition,
}

impl PecPlan {
    pub fn for_noise(noise: &NoiseModel) -> Result<Self> {
        Ok(PecPlan {
            single: pec_decompose(&PauliChannel::from_noise(noise, 1)?)?,
            two: pec_decompose(&PauliChannel::from_noise(noise, 2)?)?,
        })
    }
}

/// Place a Pauli on qubits `0..k` onto the qubits of `support`, lowest first.
fn place(p: &PauliString, support: u64) -> PauliString {
    let mut out = PauliString::identity();
    let mut rest = support;
    let mut k = 0;
    while rest != 0 {
        let q = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let _ = out.set(q, p.get(k));
        k += 1;
    }
    out
}

/// Read an observable on one trajectory.
fn read<R: Rng + ?Sized>(s: &StateVector, h: &PauliSum, measurement: Measurement, rng: &mut R) -> Result<f64> {
    match measurement {
        Measurement::Exact => s.expectation(h),
        Measurement::Shots(k) => Ok(sample_expectation(s, h, k, rng)?.mean),
    }
}

/// Probabilistic error cancellation.
///
/// Each sample runs a noisy trajectory and, after each gate's error, inserts
/// a Pauli drawn from that gate's decomposition. The recorded value is the
/// observable times the product of the drawn parities, and the estimate is
/// `gamma_total` times their mean.
#[allow(clippy::too_many_arguments)]
pub fn pec_estimate<R: Rng + ?Sized>(
    circuit: &Circuit,
    theta: &[f64],
    observable: &PauliSum,
    noise: &NoiseModel,
    plan: &PecPlan,
    samples: usize,
    measurement: Measurement,
    rng: &mut R,
) -> Result<ShotEstimate> {
    if samples == 0 {
        return Err(Error::InvalidThreshold("at least one sample is required".into()));
    }
    let native = circuit.compile_native();
    let mut gamma_total = 1.0;
    for g in &native.gates {
        gamma_total *= match g.support().count_ones() {
            0 => 1.0,
            1 => plan.single.gamma,
            2 => plan.two.gamma,
            k => return Err(Error::UnsupportedGate(alloc::format!("{k}-qubit gate {g:?}"))),
        };
    }
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let mut s = StateVector::zero(native.n_qubits)?;
        let mut parity = 1.0;
        for g in &native.gates {
            s.apply_gate(g, theta)?;
            let support = g.support();
            let err = noise.sample_error(support, rng);
            if !err.is_identity() {
                s.apply_pauli(&err)?;
            }
            let decomp = match support.count_ones() {
                1 => &plan.single,
                2 => &plan.two,
                _ => continue,
            };
            let e = decomp.sample(rng);
            parity *= e.parity as f64;
            if !e.pauli.is_identity() {
                s.apply_pauli(&place(&e.pauli, support))?;
            }
        }
        values.push(gamma_total * parity * read(&s, observable, measurement, rng)?);
    }
    Ok(mean_and_error(&values))
}

/// Which conserved parity a check measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    TotalNumber,
    SpinUp,
    SpinDown,
}

/// A Z-parity over `parity_qubits` expected to equal `expected`, extracted
/// onto an ancilla by a fan of CNOTs. Valid for Jordan-Wigner registers,
/// where mode occupations are qubit values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StabiliserCheck {
    pub parity_qubits: u64,
    pub expected: u8,
    pub kind: CheckKind,
}

impl StabiliserCheck {
    pub fn number_parity(n_modes: usize, n_electrons: usize) -> Self {
        let mask = if n_modes >= 64 { u64::MAX } else { (1u64 << n_modes) - 1 };
        StabiliserCheck { parity_qubits: mask, expected: (n_electrons % 2) as u8, kind: CheckKind::TotalNumber }
    }

    pub fn spin_up_parity(ordering: SpinOrdering, n_orbitals: usize, n_up: usize) -> Self {
        StabiliserCheck { parity_qubits: ordering.up_mask(n_orbitals), expected: (n_up % 2) as u8, kind: CheckKind::SpinUp }
    }

    pub fn spin_down_parity(ordering: SpinOrdering, n_orbitals: usize, n_down: usize) -> Self {
        let all = (1u64 << (2 * n_orbitals)) - 1;
        StabiliserCheck {
            parity_qubits: all & !ordering.up_mask(n_orbitals),
            expected: (n_down % 2) as u8,
            kind: CheckKind::SpinDown,
        }
    }
}

/// Run the parity extraction for `checks` on `state` and keep or discard it.
///
/// One ancilla per check is appended above the system register. The CNOT
/// fan runs under `noise`; the ancillas are then measured and the shot is
/// kept only if every outcome matches. Returns the collapsed system state
/// when kept.
pub fn stabiliser_filter<R: Rng + ?Sized>(
    state: &StateVector,
    checks: &[StabiliserCheck],
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<Option<StateVector>> {
    let n = state.n_qubits();
    let total = n + checks.len();
    if total > MAX_STATE_QUBITS {
        return Err(Error::TooLarge { n: total, limit: MAX_STATE_QUBITS });
    }
    let mut amps = state.amplitudes().to_vec();
    amps.resize(1 << total, Complex64::new(0.0, 0.0));
    let mut s = StateVector::from_amplitudes(amps)?;
    let mut fan = Circuit::new(total, 0);
    let mut want = 0usize;
    for (j, c) in checks.iter().enumerate() {
        if c.parity_qubits >> n != 0 {
            return Err(Error::InvalidIndex { index: 63 - c.parity_qubits.leading_zeros() as usize, bound: n });
        }
        let mut rest = c.parity_qubits;
        while rest != 0 {
            let q = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            fan.push(Gate::Cnot(q, n + j));
        }
        want |= ((c.expected & 1) as usize) << j;
    }
    run_trajectory(&fan, &[], &mut s, noise, rng)?;
    let dim = 1usize << n;
    let block = &s.amplitudes()[want * dim..(want + 1) * dim];
    let keep: f64 = block.iter().map(|a| a.norm_sqr()).sum();
    let u: f64 = rng.gen();
    if u >= keep {
        return Ok(None);
    }
    let mut out = StateVector::zero(n)?;
    out.amplitudes_mut().copy_from_slice(block);
    out.normalize()?;
    Ok(Some(out))
}

/// Raw and post-selected estimates from the same trajectories.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PostselectResult {
    pub mitigated: ShotEstimate,
    pub raw: ShotEstimate,
    pub retained_fraction: f64,
}

/// Stabiliser post-selection over `noisy.trajectories` noisy runs of the
/// ansatz. Discarded runs are not repeated.
pub fn stabiliser_postselect<R: Rng + ?Sized>(
    ansatz: &Ansatz,
    theta: &[f64],
    h: &PauliSum,
    checks: &[StabiliserCheck],
    noisy: &NoisySampling,
    measurement: Measurement,
    rng: &mut R,
) -> Result<PostselectResult> {
    if noisy.trajectories == 0 {
        return Err(Error::InvalidThreshold("at least one trajectory is required".into()));
    }
    let native = ansatz.full_circuit().compile_native();
    let mut raw = Vec::with_capacity(noisy.trajectories);
    let mut kept = Vec::new();
    for _ in 0..noisy.trajectories {
        let mut s = StateVector::zero(ansatz.n_qubits())?;
        run_trajectory(&native, theta, &mut s, &noisy.noise, rng)?;
        raw.push(read(&s, h, measurement, rng)?);
        if let Some(post) = stabiliser_filter(&s, checks, &noisy.noise, rng)? {
            kept.push(read(&post, h, measurement, rng)?);
        }
    }
    if kept.is_empty() {
        return Err(Error::AllRejected);
    }
    Ok(PostselectResult {
        mitigated: mean_and_error(&kept),
        raw: mean_and_error(&raw),
        retained_fraction: kept.len() as f64 / noisy.trajectories as f64,
    })
}

#[cfg(test)]
mod tests;
