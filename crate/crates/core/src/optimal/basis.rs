//! Search for the cloning basis maximising `A(S, B)`.
//!
//! `A(S, U) = sum_m sum_i |<u_i|psi_m>|^4` is a degree-4 polynomial on the
//! unitary group with several local maxima. Each restart runs Riemannian
//! gradient ascent in the chart `U -> U exp(K)`, `K` anti-Hermitian, with an
//! Armijo line search. Restarts begin at the member bases of the ensemble
//! (these are optimal for unbiased families) and at Haar-random unitaries.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::EigenstateEnsemble;
use crate::qmath::{expm_antihermitian, gram_schmidt, haar_unitary, ComplexMatrix, OrthonormalBasis};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisOptConfig {
    /// Haar-random restarts, in addition to one warm start per member basis.
    pub restarts: usize,
    pub max_iters: usize,
    /// A restart has converged once an accepted step is shorter than this,
    /// or once the gradient norm falls below its square root.
    pub step_tol: f64,
    pub value_tol: f64,
    pub seed: u64,
}

impl Default for BasisOptConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iters: 500,
            step_tol: 1e-10,
            value_tol: 1e-9,
            seed: 0,
        }
    }
}

impl BasisOptConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::InvalidInput("restarts must be >= 1".into()));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidInput("max_iters must be >= 1".into()));
        }
        if !(self.step_tol > 0.0 && self.value_tol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartPoint {
    /// Eigenbasis of the `l`-th observable.
    Member(usize),
    /// Haar-random unitary drawn with this seed.
    Haar(u64),
}

/// Outcome of one local search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    pub index: usize,
    pub start: StartPoint,
    pub initial_value: f64,
    pub value: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisOptimum {
    pub basis: OrthonormalBasis,
    pub a_opt: f64,
    /// False when no restart met the convergence criterion; the best point
    /// found is still returned.
    pub converged: bool,
    pub best_restart: usize,
    pub restarts: Vec<RestartRecord>,
}

/// Mixes the user seed with the restart index so neighbouring seeds do not
/// share streams.
fn restart_seed(seed: u64, k: usize) -> u64 {
    let mut z = seed ^ (k as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `A(S, U)` where the cloning basis is the columns of `u`.
pub fn participation_value(states: &[Vec<C64>], u: &ComplexMatrix) -> f64 {
    let d = u.rows();
    let mut total = 0.0;
    for psi in states {
        for i in 0..d {
            let c: C64 = (0..d).map(|k| u[(k, i)].conj() * psi[k]).sum();
            total += c.norm_sqr().powi(2);
        }
    }
    total
}

/// Value and Riemannian gradient of `A` in the chart `K -> U exp(K)`.
///
/// With `phi_m = U^dagger psi_m` and
/// `W_ij = sum_m |phi_mi|^2 conj(phi_mi) phi_mj` the directional derivative
/// along `K` is `-4 Re sum_ij K_ij W_ij`; the gradient is the anti-Hermitian
/// part of `-4 conj(W)`.
pub fn participation_gradient(states: &[Vec<C64>], u: &ComplexMatrix) -> (f64, ComplexMatrix) {
    let d = u.rows();
    let ud = u.dagger();
    let mut w = ComplexMatrix::zeros(d, d);
    let mut value = 0.0;
    for psi in states {
        let phi = ud.matvec(psi);
        for i in 0..d {
            let n2 = phi[i].norm_sqr();
            value += n2 * n2;
            let lead = phi[i].conj() * n2;
            for j in 0..d {
                w[(i, j)] += lead * phi[j];
            }
        }
    }
    let mut g = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            // X0 = -4 conj(W); gradient = (X0 - X0^dagger) / 2
            let x_ij = w[(i, j)].conj() * -4.0;
            let x_ji = w[(j, i)].conj() * -4.0;
            g[(i, j)] = (x_ij - x_ji.conj()) * 0.5;
        }
    }
    (value, g)
}

struct Ascent {
    u: ComplexMatrix,
    initial_value: f64,
    value: f64,
    iterations: usize,
    grad_norm: f64,
    converged: bool,
}

const ARMIJO: f64 = 1e-4;

fn ascend(states: &[Vec<C64>], u0: ComplexMatrix, cfg: &BasisOptConfig) -> Ascent {
    let mut u = u0;
    let (mut value, mut grad) = participation_gradient(states, &u);
    let initial_value = value;
    let mut eta = 0.1;
    let mut iterations = 0;
    let mut converged = false;
    let grad_tol = cfg.step_tol.sqrt();

    while iterations < cfg.max_iters {
        let gnorm = grad.frobenius_norm();
        if gnorm < grad_tol {
            converged = true;
            break;
        }
        iterations += 1;
        let g2 = gnorm * gnorm;
        let mut accepted = None;
        while eta * gnorm >= cfg.step_tol * 1e-3 {
            let trial = u.matmul(&expm_antihermitian(&grad.scale_real(eta)));
            let tv = participation_value(states, &trial);
            if tv >= value + ARMIJO * eta * g2 {
                accepted = Some((trial, tv));
                break;
            }
            eta *= 0.5;
        }
        let Some((trial, _)) = accepted else {
            // no ascent direction left at this resolution
            converged = true;
            break;
        };
        let step = eta * gnorm;
        u = trial;
        (value, grad) = participation_gradient(states, &u);
        if step < cfg.step_tol {
            converged = true;
            break;
        }
        eta *= 2.0;
    }
    Ascent {
        grad_norm: grad.frobenius_norm(),
        u,
        initial_value,
        value,
        iterations,
        converged,
    }
}

/// Multi-restart maximisation of `A(S, B)` over orthonormal bases.
pub fn optimize_basis(ensemble: &EigenstateEnsemble, cfg: &BasisOptConfig) -> Result<BasisOptimum> {
    cfg.validate()?;
    let d = ensemble.dim();
    let m = ensemble.len() as f64;
    let states: Vec<Vec<C64>> = ensemble.states().map(<[C64]>::to_vec).collect();

    let mut starts: Vec<StartPoint> = (0..ensemble.num_groups()).map(StartPoint::Member).collect();
    starts.extend((0..cfg.restarts).map(|k| StartPoint::Haar(restart_seed(cfg.seed, k))));

    let runs: Vec<(RestartRecord, ComplexMatrix)> = starts
        .par_iter()
        .enumerate()
        .map(|(index, start)| {
            let u0 = match *start {
                StartPoint::Member(l) => ensemble.groups()[l].to_unitary(),
                StartPoint::Haar(seed) => haar_unitary(d, seed).expect("d >= 1"),
            };
            let run = ascend(&states, u0, cfg);
            let record = RestartRecord {
                index,
                start: *start,
                initial_value: run.initial_value,
                value: run.value,
                iterations: run.iterations,
                grad_norm: run.grad_norm,
                converged: run.converged,
            };
            (record, run.u)
        })
        .collect();

    // best value wins; earlier restarts win ties
    let mut best = 0;
    for (k, (rec, _)) in runs.iter().enumerate() {
        if rec.value > runs[best].0.value {
            best = k;
        }
    }
    let converged = runs.iter().any(|(r, _)| r.converged);
    if !converged {
        log::warn!(
            "basis search: none of {} restarts converged within {} iterations",
            runs.len(),
            cfg.max_iters
        );
    }

    let u = &runs[best].1;
    let kets = gram_schmidt(&(0..d).map(|j| u.column(j)).collect::<Vec<_>>(), 1e-8);
    let basis = OrthonormalBasis::new(kets)?;
    let a_opt = participation_value(&states, &basis.to_unitary()).clamp(m / d as f64, m);

    Ok(BasisOptimum {
        basis,
        a_opt,
        converged,
        best_restart: best,
        restarts: runs.into_iter().map(|(r, _)| r).collect(),
    })
}
