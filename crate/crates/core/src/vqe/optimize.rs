//! Classical optimizers for variational loops.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use super::{analytic_gradient, estimate_energy, Ansatz, Measurement, NoisySampling};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::rng;

/// Gain sequences `a_k = a / (k + 1 + A)^alpha` and `c_k = c / (k + 1)^gamma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpsaGains {
    pub a: f64,
    pub c: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// Stability constant `A`; `None` uses a tenth of the evaluation budget.
    pub stability: Option<f64>,
}

impl Default for SpsaGains {
    fn default() -> Self {
        SpsaGains { a: 0.1, c: 0.1, alpha: 0.602, gamma: 0.101, stability: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    /// Simplex search with dimension-adapted coefficients and an initial edge `step`.
    NelderMead { step: f64 },
    Spsa(SpsaGains),
    /// Steepest descent on the analytic gradient; the step halves whenever
    /// the energy rises.
    GradientDescent { step: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub method: Method,
    pub max_evals: usize,
    /// Converged once the per-iteration energy change stays below this for
    /// ten consecutive iterations.
    pub tolerance: f64,
    pub seed: u64,
}

impl OptimizerConfig {
    pub fn nelder_mead(max_evals: usize, tolerance: f64) -> Self {
        OptimizerConfig { method: Method::NelderMead { step: 0.1 }, max_evals, tolerance, seed: 0 }
    }

    pub fn spsa(max_evals: usize, tolerance: f64, seed: u64) -> Self {
        OptimizerConfig { method: Method::Spsa(SpsaGains::default()), max_evals, tolerance, seed }
    }

    pub fn gradient_descent(max_evals: usize, tolerance: f64) -> Self {
        OptimizerConfig { method: Method::GradientDescent { step: 0.5 }, max_evals, tolerance, seed: 0 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidThreshold(alloc::format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.max_evals == 0 {
            return Err(Error::InvalidThreshold("max_evals must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracePoint {
    pub energy: f64,
    /// Objective evaluations used so far.
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VqeResult {
    pub best_params: Vec<f64>,
    pub best_energy: f64,
    pub trace: Vec<TracePoint>,
    /// Objective and gradient evaluations.
    pub evaluations: usize,
    pub shots_used: u64,
    pub converged: bool,
}

const STREAK: usize = 10;

struct Tracker {
    tol: f64,
    streak: usize,
    last: Option<f64>,
    best: f64,
    best_params: Vec<f64>,
    trace: Vec<TracePoint>,
}

impl Tracker {
    fn new(tol: f64, x0: &[f64]) -> Self {
        Tracker { tol, streak: 0, last: None, best: f64::INFINITY, best_params: x0.to_vec(), trace: Vec::new() }
    }

    /// Record an iteration; returns true once the change streak is long enough.
    fn record(&mut self, energy: f64, x: &[f64], evaluations: usize) -> bool {
        if energy < self.best {
            self.best = energy;
            self.best_params = x.to_vec();
        }
        self.trace.push(TracePoint { energy, evaluations });
        match self.last {
            Some(prev) if (energy - prev).abs() < self.tol => self.streak += 1,
            _ => self.streak = 0,
        }
        self.last = Some(energy);
        self.streak >= STREAK
    }

    fn finish(self, evaluations: usize, converged: bool) -> VqeResult {
        VqeResult {
            best_params: self.best_params,
            best_energy: self.best,
            trace: self.trace,
            evaluations,
            shots_used: 0,
            converged,
        }
    }
}

pub type Objective<'a> = dyn FnMut(&[f64]) -> Result<f64> + 'a;
pub type Gradient<'a> = dyn FnMut(&[f64]) -> Result<Vec<f64>> + 'a;

/// Minimize `f` from `x0`. Gradient descent requires `grad`.
pub fn minimize(
    f: &mut Objective<'_>,
    grad: Option<&mut Gradient<'_>>,
    x0: &[f64],
    config: &OptimizerConfig,
) -> Result<VqeResult> {
    config.validate()?;
    match config.method {
        Method::NelderMead { step } => nelder_mead(f, x0, step, config),
        Method::Spsa(gains) => spsa(f, x0, gains, config),
        Method::GradientDescent { step } => {
            let grad = grad.ok_or_else(|| Error::InvalidThreshold("gradient descent needs a gradient".into()))?;
            gradient_descent(f, grad, x0, step, config)
        }
    }
}

fn nelder_mead(f: &mut Objective<'_>, x0: &[f64], step: f64, config: &OptimizerConfig) -> Result<VqeResult> {
    let n = x0.len();
    let mut tracker = Tracker::new(config.tolerance, x0);
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> Result<f64> {
        *evals += 1;
        f(x)
    };
    if n == 0 {
        let e = eval(x0, &mut evals)?;
        tracker.record(e, x0, evals);
        return Ok(tracker.finish(evals, true));
    }
    let nf = n as f64;
    let (alpha, beta, gamma, delta) =
        if n >= 2 { (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf) } else { (1.0, 2.0, 0.5, 0.5) };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let e0 = eval(x0, &mut evals)?;
    simplex.push((x0.to_vec(), e0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let e = eval(&x, &mut evals)?;
        simplex.push((x, e));
    }
    let along = |c: &[f64], d: &[f64], t: f64| -> Vec<f64> { c.iter().zip(d).map(|(ci, di)| ci + t * (di - ci)).collect() };

    let mut converged = false;
    while evals < config.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            centroid.iter_mut().zip(x).for_each(|(c, v)| *c += v / nf);
        }
        let (worst, fw) = simplex[n].clone();
        let (f0, fsecond) = (simplex[0].1, simplex[n - 1].1);
        let xr = along(&centroid, &worst, -alpha);
        let fr = eval(&xr, &mut evals)?;
        let mut shrink = false;
        if fr < f0 {
            let xe = along(&centroid, &xr, beta);
            let fe = eval(&xe, &mut evals)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < fsecond {
            simplex[n] = (xr, fr);
        } else if fr < fw {
            let xc = along(&centroid, &xr, gamma);
            let fc = eval(&xc, &mut evals)?;
            if fc <= fr {
                simplex[n] = (xc, fc);
            } else {
                shrink = true;
            }
        } else {
            let xc = along(&centroid, &worst, gamma);
            let fc = eval(&xc, &mut evals)?;
            if fc < fw {
                simplex[n] = (xc, fc);
            } else {
                shrink = true;
            }
        }
        if shrink {
            let best = simplex[0].0.clone();
            for entry in simplex.iter_mut().skip(1) {
                let x = along(&best, &entry.0, delta);
                let e = eval(&x, &mut evals)?;
                *entry = (x, e);
            }
        }
        let (bi, bf) = simplex.iter().enumerate().min_by(|a, b| a.1 .1.total_cmp(&b.1 .1)).map(|(i, v)| (i, v.1)).unwrap();
        let spread = simplex.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max) - bf;
        let best_x = simplex[bi].0.clone();
        if tracker.record(bf, &best_x, evals) && spread < config.tolerance {
            converged = true;
            break;
        }
    }
    if tracker.trace.is_empty() {
        let (x, e) = simplex.iter().min_by(|a, b| a.1.total_cmp(&b.1)).cloned().unwrap();
        tracker.record(e, &x, evals);
    }
    Ok(tracker.finish(evals, converged))
}

fn spsa(f: &mut Objective<'_>, x0: &[f64], g: SpsaGains, config: &OptimizerConfig) -> Result<VqeResult> {
    let n = x0.len();
    let mut r = rng::seeded(config.seed);
    let big_a = g.stability.unwrap_or(0.1 * config.max_evals as f64);
    let mut x = x0.to_vec();
    let mut tracker = Tracker::new(config.tolerance, x0);
    let mut evals = 1usize;
    let e0 = f(&x)?;
    tracker.record(e0, &x, evals);
    let mut converged = false;
    let mut k = 0usize;
    while evals + 3 <= config.max_evals {
        let ak = g.a / (k as f64 + 1.0 + big_a).powf(g.alpha);
        let ck = g.c / (k as f64 + 1.0).powf(g.gamma);
        let delta: Vec<f64> = (0..n).map(|_| if r.gen::<bool>() { 1.0 } else { -1.0 }).collect();
        let plus: Vec<f64> = x.iter().zip(&delta).map(|(v, d)| v + ck * d).collect();
        let minus: Vec<f64> = x.iter().zip(&delta).map(|(v, d)| v - ck * d).collect();
        let diff = f(&plus)? - f(&minus)?;
        for (v, d) in x.iter_mut().zip(&delta) {
            *v -= ak * diff / (2.0 * ck * d);
        }
        let e = f(&x)?;
        evals += 3;
        k += 1;
        if tracker.record(e, &x, evals) {
            converged = true;
            break;
        }
    }
    Ok(tracker.finish(evals, converged))
}

fn gradient_descent(
    f: &mut Objective<'_>,
    grad: &mut Gradient<'_>,
    x0: &[f64],
    step: f64,
    config: &OptimizerConfig,
) -> Result<VqeResult> {
    let mut tracker = Tracker::new(config.tolerance, x0);
    let mut x = x0.to_vec();
    let mut e = f(&x)?;
    let mut evals = 1usize;
    tracker.record(e, &x, evals);
    let mut eta = step;
    let mut converged = false;
    while evals + 2 <= config.max_evals {
        let gvec = grad(&x)?;
        evals += 1;
        let trial: Vec<f64> = x.iter().zip(&gvec).map(|(v, g)| v - eta * g).collect();
        let et = f(&trial)?;
        evals += 1;
        if et <= e {
            x = trial;
            e = et;
        } else {
            eta *= 0.5;
        }
        if tracker.record(e, &x, evals) {
            converged = true;
            break;
        }
    }
    Ok(tracker.finish(evals, converged))
}

/// Run a VQE loop for `h` on `ansatz` from `ansatz.initial_params(config.seed)`.
///
/// Gradient descent uses the exact analytic gradient regardless of the
/// measurement mode.
pub fn optimize<R: Rng + ?Sized>(
    ansatz: &Ansatz,
    h: &PauliSum,
    config: &OptimizerConfig,
    measurement: Measurement,
    noise: Option<&NoisySampling>,
    rng: &mut R,
) -> Result<VqeResult> {
    let x0 = ansatz.initial_params(config.seed);
    let mut calls = 0u64;
    let mut objective = |t: &[f64]| {
        calls += 1;
        estimate_energy(ansatz, t, h, measurement, noise, &mut *rng).map(|e| e.mean)
    };
    let mut gradient = |t: &[f64]| analytic_gradient(ansatz, t, h);
    let mut result = match config.method {
        Method::GradientDescent { .. } => minimize(&mut objective, Some(&mut gradient), &x0, config)?,
        _ => minimize(&mut objective, None, &x0, config)?,
    };
    if let Measurement::Shots(k) = measurement {
        let terms = h.strings().filter(|p| !p.is_identity()).count() as u64;
        let runs = noise.map_or(1, |n| n.trajectories as u64);
        result.shots_used = calls * terms * k as u64 * runs;
    }
    Ok(result)
}
