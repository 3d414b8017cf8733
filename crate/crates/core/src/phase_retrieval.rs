//! Phase retrieval from squared time moduli `y_j = |x_j|²` and squared
//! Fourier moduli `z_k = |x̂[k]|²`.
//!
//! Each restart draws uniform random phases, runs error reduction
//! (alternating projections onto the two modulus constraint sets) until the
//! target residual is met or progress stalls, then refines the iterate with a
//! damped Gauss-Newton solve on the `2N` squared-modulus equations.
//!
//! With `N`-point transforms the two modulus vectors do not pin `x` down to a
//! global phase: for generic `x` there are usually several solutions that are
//! not phase multiples of one another (for `N = 2`, `x` and `conj(x)` always
//! share both modulus vectors). [`restart_outcomes`] exposes every restart so
//! callers holding extra information can choose among them.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{check_order, Error, Result};
use crate::spectral::{dft, idft, roots_of_unity, ComplexVector, RealVector};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhaseRetrievalConfig {
    pub max_restarts: usize,
    /// Error-reduction iterations per restart.
    pub max_iterations: usize,
    pub residual_target: f64,
    /// Restart `r` is seeded with `seed + r`.
    pub seed: u64,
}

impl Default for PhaseRetrievalConfig {
    fn default() -> Self {
        Self {
            max_restarts: 50,
            max_iterations: 2000,
            residual_target: 1e-10,
            seed: 0,
        }
    }
}

impl PhaseRetrievalConfig {
    /// Restart budget used by orbit recovery, which has to search the
    /// solution set for the one consistent with the power invariant.
    pub const ORBIT_SEARCH_RESTARTS: usize = 5000;

    pub fn for_orbit_search(seed: u64) -> Self {
        Self {
            max_restarts: Self::ORBIT_SEARCH_RESTARTS,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_restarts == 0 || self.max_iterations == 0 {
            return Err(Error::InvalidInput("restart and iteration counts must be positive".into()));
        }
        if !(self.residual_target > 0.0 && self.residual_target.is_finite()) {
            return Err(Error::InvalidInput("residual_target must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub candidate: ComplexVector,
    pub residual: f64,
    pub restarts_used: usize,
    pub iterations_last: usize,
    pub success: bool,
}

/// Result of a single restart.
#[derive(Clone, Debug, PartialEq)]
pub struct RestartOutcome {
    pub restart: usize,
    pub candidate: ComplexVector,
    pub residual: f64,
    pub iterations: usize,
}

/// Validated problem data shared by all restarts.
struct Problem<'a> {
    y: &'a [f64],
    z: &'a [f64],
    y_sqrt: Vec<f64>,
    z_sqrt: Vec<f64>,
    roots: Vec<Complex64>,
}

impl<'a> Problem<'a> {
    fn new(y_mag: &'a RealVector, z_mag: &'a RealVector) -> Result<Self> {
        check_order(y_mag.len(), z_mag.len())?;
        let n = y_mag.len();
        if let Some(v) = y_mag.iter().chain(z_mag.iter()).find(|&&v| v < 0.0) {
            return Err(Error::InvalidInput(format!("squared modulus {v} is negative")));
        }
        let time: f64 = y_mag.iter().sum();
        let freq: f64 = z_mag.iter().sum::<f64>() / n as f64;
        if (time - freq).abs() > 1e-6 * time.max(freq).max(f64::MIN_POSITIVE) {
            return Err(Error::InconsistentMagnitudes { time, freq });
        }
        Ok(Self {
            y: y_mag.as_slice(),
            z: z_mag.as_slice(),
            y_sqrt: y_mag.iter().map(|v| v.sqrt()).collect(),
            z_sqrt: z_mag.iter().map(|v| v.sqrt()).collect(),
            roots: roots_of_unity(n),
        })
    }

    fn n(&self) -> usize {
        self.y.len()
    }

    fn residual(&self, x: &ComplexVector) -> f64 {
        modulus_mismatch(x, self.y, self.z)
    }

    fn initial_guess(&self, seed: u64) -> ComplexVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ComplexVector::from_vec_unchecked(
            self.y_sqrt
                .iter()
                .map(|&r| Complex64::from_polar(r, rng.random_range(0.0..TAU)))
                .collect(),
        )
    }

    /// One error-reduction step; returns the new iterate and the Fourier
    /// mismatch `‖|X| − √z‖₂` of the iterate that was projected.
    fn reduce(&self, x: &ComplexVector) -> (ComplexVector, f64) {
        let spectrum = dft(x);
        let mismatch = spectrum
            .iter()
            .zip(&self.z_sqrt)
            .map(|(c, &t)| (c.norm() - t).powi(2))
            .sum::<f64>()
            .sqrt();
        let projected = project_moduli(&spectrum, &self.z_sqrt);
        (project_moduli(&idft(&projected), &self.y_sqrt), mismatch)
    }

    fn run_restart(&self, restart: usize, cfg: &PhaseRetrievalConfig) -> RestartOutcome {
        const WINDOW: usize = 50;
        let mut x = self.initial_guess(cfg.seed.wrapping_add(restart as u64));
        let mut iterations = 0;
        let mut residual = self.residual(&x);
        let mut window_start = f64::INFINITY;
        while residual > cfg.residual_target && iterations < cfg.max_iterations {
            let (next, mismatch) = self.reduce(&x);
            x = next;
            iterations += 1;
            residual = self.residual(&x);
            if iterations % WINDOW == 1 {
                // stalled: less than 1% progress over the last window
                if mismatch > 0.99 * window_start {
                    break;
                }
                window_start = mismatch;
            }
        }
        let (refined, steps) = self.refine(&x);
        let refined_residual = self.residual(&refined);
        if refined_residual < residual {
            x = refined;
            residual = refined_residual;
        }
        RestartOutcome {
            restart,
            candidate: x,
            residual,
            iterations: iterations + steps,
        }
    }

    /// Residual vector `(|x_j|² − y_j, (|x̂_k|² − z_k)/N)` and its Jacobian
    /// with respect to `(Re x, Im x)`.
    fn linearize(&self, x: &[Complex64]) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.n();
        let scale = 1.0 / n as f64;
        let spectrum = dft(&ComplexVector::from_vec_unchecked(x.to_vec()));
        let mut r = DVector::zeros(2 * n);
        let mut jac = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            r[j] = x[j].norm_sqr() - self.y[j];
            jac[(j, j)] = 2.0 * x[j].re;
            jac[(j, n + j)] = 2.0 * x[j].im;
        }
        for k in 0..n {
            let xk = spectrum[k];
            r[n + k] = (xk.norm_sqr() - self.z[k]) * scale;
            for j in 0..n {
                // ∂X_k/∂Re x_j = w, ∂X_k/∂Im x_j = i w with w = exp(-2πi jk/N)
                let w = self.roots[(j * k) % n].conj();
                let t = xk.conj() * w;
                jac[(n + k, j)] = 2.0 * t.re * scale;
                jac[(n + k, n + j)] = -2.0 * t.im * scale;
            }
        }
        (r, jac)
    }

    /// Levenberg-Marquardt on the squared-modulus equations.
    fn refine(&self, start: &ComplexVector) -> (ComplexVector, usize) {
        const MAX_STEPS: usize = 100;
        let n = self.n();
        let unpack = |p: &DVector<f64>| -> Vec<Complex64> {
            (0..n).map(|j| Complex64::new(p[j], p[n + j])).collect()
        };
        let mut p = DVector::from_iterator(
            2 * n,
            start.iter().map(|c| c.re).chain(start.iter().map(|c| c.im)),
        );
        let (mut r, mut jac) = self.linearize(&unpack(&p));
        let mut cost = r.norm_squared();
        let mut damping = 1e-3;
        let mut steps = 0;
        while steps < MAX_STEPS && cost > 0.0 {
            steps += 1;
            let jt = jac.transpose();
            let normal = &jt * &jac;
            let gradient = &jt * &r;
            let diag_scale = normal.diagonal().max().max(f64::MIN_POSITIVE);
            let mut damped = normal.clone();
            for i in 0..2 * n {
                damped[(i, i)] += damping * diag_scale;
            }
            let Some(chol) = damped.cholesky() else {
                damping *= 10.0;
                continue;
            };
            let step = chol.solve(&(-gradient));
            let trial = &p + &step;
            let (trial_r, trial_jac) = self.linearize(&unpack(&trial));
            let trial_cost = trial_r.norm_squared();
            if trial_cost < cost {
                let converged = step.norm() <= 1e-15 * p.norm().max(1e-300)
                    || (cost - trial_cost) <= 1e-30 * cost;
                p = trial;
                r = trial_r;
                jac = trial_jac;
                cost = trial_cost;
                damping = (damping / 3.0).max(1e-15);
                if converged {
                    break;
                }
            } else {
                damping *= 4.0;
                if damping > 1e12 {
                    break;
                }
            }
        }
        (ComplexVector::from_vec_unchecked(unpack(&p)), steps)
    }
}

/// Rescales each entry to the target modulus; zero entries get phase 0.
fn project_moduli(v: &ComplexVector, moduli: &[f64]) -> ComplexVector {
    ComplexVector::from_vec_unchecked(
        v.iter()
            .zip(moduli)
            .map(|(c, &m)| {
                let a = c.norm();
                if a > 0.0 {
                    c * (m / a)
                } else {
                    Complex64::new(m, 0.0)
                }
            })
            .collect(),
    )
}

/// Largest relative mismatch of `|x_j|²` against `y` and `|x̂_k|²` against
/// `z`, each relative to `max(target, 1)`.
fn modulus_mismatch(x: &ComplexVector, y: &[f64], z: &[f64]) -> f64 {
    let rel = |value: f64, target: f64| (value - target).abs() / target.max(1.0);
    let time = x
        .iter()
        .zip(y)
        .map(|(c, &t)| rel(c.norm_sqr(), t))
        .fold(0.0, f64::max);
    let freq = dft(x)
        .iter()
        .zip(z)
        .map(|(c, &t)| rel(c.norm_sqr(), t))
        .fold(0.0, f64::max);
    time.max(freq)
}

/// Every restart of the search, in restart order, after validating the input.
pub fn restart_outcomes<'a>(
    y_mag: &'a RealVector,
    z_mag: &'a RealVector,
    cfg: &'a PhaseRetrievalConfig,
) -> Result<impl Iterator<Item = RestartOutcome> + 'a> {
    cfg.validate()?;
    let problem = Problem::new(y_mag, z_mag)?;
    Ok((0..cfg.max_restarts).map(move |r| problem.run_restart(r, cfg)))
}

/// Finds `x` with `|x_j|² = y_mag_j` and `|x̂_k|² = z_mag_k`.
///
/// Returns the first restart that reaches `cfg.residual_target`. When none
/// does, the error carries the best report (lowest residual, then lowest
/// restart index) with `success = false`.
pub fn retrieve_phase(
    y_mag: &RealVector,
    z_mag: &RealVector,
    cfg: &PhaseRetrievalConfig,
) -> Result<RecoveryReport> {
    let mut best: Option<RestartOutcome> = None;
    for outcome in restart_outcomes(y_mag, z_mag, cfg)? {
        if outcome.residual <= cfg.residual_target {
            return Ok(RecoveryReport {
                candidate: outcome.candidate,
                residual: outcome.residual,
                restarts_used: outcome.restart + 1,
                iterations_last: outcome.iterations,
                success: true,
            });
        }
        if best.as_ref().is_none_or(|b| outcome.residual < b.residual) {
            best = Some(outcome);
        }
    }
    let best = best.expect("at least one restart");
    Err(Error::NoConvergence(Box::new(RecoveryReport {
        candidate: best.candidate,
        residual: best.residual,
        restarts_used: cfg.max_restarts,
        iterations_last: best.iterations,
        success: false,
    })))
}

/// Fourier mismatch `‖|X_t| − √z‖₂` along `iterations` plain error-reduction
/// steps from `start`; entry `t` belongs to the `t`-th iterate.
pub fn error_reduction_trace(
    y_mag: &RealVector,
    z_mag: &RealVector,
    start: &ComplexVector,
    iterations: usize,
) -> Result<Vec<f64>> {
    check_order(start.len(), y_mag.len())?;
    let problem = Problem::new(y_mag, z_mag)?;
    let mut x = project_moduli(start, &problem.y_sqrt);
    let mut trace = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        let (next, mismatch) = problem.reduce(&x);
        trace.push(mismatch);
        x = next;
    }
    Ok(trace)
}

/// True iff `|x_j|² ≈ y_mag_j` and `|x̂_k|² ≈ z_mag_k` within `tol`,
/// relative to `max(target, 1)`.
pub fn magnitudes_match(x: &ComplexVector, y_mag: &RealVector, z_mag: &RealVector, tol: f64) -> bool {
    x.len() == y_mag.len()
        && x.len() == z_mag.len()
        && modulus_mismatch(x, y_mag.as_slice(), z_mag.as_slice()) <= tol
}

/// `λ = ⟨b, a⟩ / |⟨b, a⟩|` (1 when the inner product vanishes) and `‖λa − b‖`.
pub fn best_global_phase(a: &ComplexVector, b: &ComplexVector) -> Result<(Complex64, f64)> {
    check_order(a.len(), b.len())?;
    let inner = b.inner(a);
    let lambda = if inner.norm() > 0.0 {
        inner / inner.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    Ok((lambda, a.scale(lambda).distance(b)))
}
