//! Oracle suite behind `cloneq verify`.
//!
//! Every check compares a closed form against an independent computation
//! (explicit tripartite isometry, grid search, numerical basis search) and
//! reports the largest deviation seen.

use std::f64::consts::PI;

use cloneq::ensembles::{eigenstate_ensemble, mub_family, ObservableSet};
use cloneq::optimal::{
    mr_fidelity_bounds, optimal_cloning_fidelity, optimize_basis, sweep, BasisOptConfig, SweepMode,
    SweepPath,
};
use cloneq::qcm::{
    average_cloning_fidelity, clone_output_closed, clone_output_oracle_full,
    fidelity_from_participation, params_from_q, universal_params, CloneParams,
};
use cloneq::qmath::{haar_unitary, random_state, OrthonormalBasis};
use cloneq::qubit::{qubit_optimal_cloner, BlochPair};
use cloneq::{format::sig, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    Fast,
    Full,
}

/// Closed forms under test. Swappable so the suite can be checked against
/// deliberately broken implementations.
#[derive(Clone, Copy)]
pub struct Subject {
    pub q_optimal: fn(f64, usize, usize) -> Result<CloneParams>,
    pub universal_fidelity: fn(usize) -> Result<f64>,
}

impl Default for Subject {
    fn default() -> Self {
        Self {
            q_optimal: cloneq::optimal::q_optimal,
            universal_fidelity: |d| universal_params(d).map(|u| u.fidelity),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub note: String,
}

impl CheckResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {}: deviation {} (tol {}){}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            sig(self.deviation, 4),
            sig(self.tolerance, 2),
            if self.note.is_empty() { String::new() } else { format!("; {}", self.note) }
        )
    }
}

struct Plan {
    oracle_dims: Vec<usize>,
    oracle_triples: u64,
    grid_pairs: usize,
    grid_points: usize,
    mub_cases: Vec<(usize, usize)>,
    qubit_pairs: usize,
    cfg: BasisOptConfig,
}

impl Plan {
    fn new(level: Level, cfg: BasisOptConfig) -> Self {
        match level {
            Level::Fast => Plan {
                oracle_dims: vec![2, 3, 4],
                oracle_triples: 40,
                grid_pairs: 10,
                grid_points: 10_000,
                mub_cases: vec![(2, 2), (2, 3), (4, 3)],
                qubit_pairs: 10,
                cfg: BasisOptConfig { restarts: cfg.restarts.min(8), ..cfg },
            },
            Level::Full => Plan {
                oracle_dims: vec![2, 3, 4, 5, 6],
                oracle_triples: 200,
                grid_pairs: 50,
                grid_points: 100_000,
                mub_cases: vec![(2, 2), (3, 2), (2, 3), (4, 3), (2, 5), (3, 5)],
                qubit_pairs: 50,
                cfg,
            },
        }
    }
}

fn check(name: &'static str, deviation: f64, tolerance: f64, note: String) -> CheckResult {
    CheckResult {
        name,
        deviation,
        tolerance,
        passed: deviation <= tolerance,
        note,
    }
}

fn failed(name: &'static str, tolerance: f64, err: impl std::fmt::Display) -> CheckResult {
    CheckResult {
        name,
        deviation: f64::INFINITY,
        tolerance,
        passed: false,
        note: format!("error: {err}"),
    }
}

fn oracle_check(plan: &Plan, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dev = 0.0f64;
    for &d in &plan.oracle_dims {
        for k in 0..plan.oracle_triples {
            let s = seed ^ (d as u64 * 100_003 + k);
            let psi = random_state(d, s);
            let basis = OrthonormalBasis::from_unitary(&haar_unitary(d, s)?)?;
            let params = params_from_q(d, rng.gen_range(0.0..=CloneParams::q_max(d)))?;
            let closed = clone_output_closed(&psi, &basis, &params)?;
            let oracle = clone_output_oracle_full(&psi, &basis, &params)?;
            dev = dev
                .max(closed.clone.max_abs_diff(&oracle.a.clone))
                .max(oracle.asymmetry());
        }
    }
    Ok(dev)
}

fn universal_check(subject: &Subject, seed: u64) -> Result<f64> {
    let mut dev = 0.0f64;
    for d in 2..=8 {
        let claimed = (subject.universal_fidelity)(d)?;
        let params = universal_params(d)?.params;
        let basis = OrthonormalBasis::from_unitary(&haar_unitary(d, seed + d as u64)?)?;
        for k in 0..20 {
            let psi = random_state(d, seed * 31 + k);
            let f = clone_output_oracle_full(&psi, &basis, &params)?.a.fidelity;
            dev = dev.max((f - claimed).abs());
        }
    }
    Ok(dev)
}

/// Largest amount by which a grid point beats the claimed optimum.
fn grid_check(plan: &Plan, subject: &Subject, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut excess = 0.0f64;
    for k in 0..plan.grid_pairs {
        // always include the qubit MUB pair, then random admissible pairs
        let (ratio, d) = if k == 0 {
            (0.75, 2)
        } else {
            let d = rng.gen_range(2..=12usize);
            let lo = (1.0 / d as f64).max(2.0 / (d as f64 + 1.0));
            (rng.gen_range(lo..=1.0), d)
        };
        let m = 1usize << 20;
        let params = (subject.q_optimal)(ratio * m as f64, m, d)?;
        if !params.in_regime() || params.unitarity_defect().abs() > 1e-12 {
            return Ok(f64::INFINITY);
        }
        let claimed = fidelity_from_participation(ratio, &params);
        let q_b = CloneParams::q_regime(d);
        for j in 0..plan.grid_points {
            let q = q_b * j as f64 / (plan.grid_points - 1) as f64;
            let f = fidelity_from_participation(ratio, &params_from_q(d, q)?);
            excess = excess.max(f - claimed);
        }
    }
    Ok(excess)
}

fn mub_recovery_check(plan: &Plan) -> Result<f64> {
    let devs: Vec<Result<f64>> = plan
        .mub_cases
        .par_iter()
        .map(|&(n, d)| {
            let ens = eigenstate_ensemble(&mub_family(d, n)?, cloneq::DEFAULT_TOL)?;
            let opt = optimize_basis(&ens, &plan.cfg)?;
            Ok((opt.a_opt - (n + d - 1) as f64).abs())
        })
        .collect();
    devs.into_iter().try_fold(0.0f64, |acc, d| Ok(acc.max(d?)))
}

/// Closed-form MUB optimum, rebuilt from the subject's `q_optimal`, against
/// the numerical pipeline on constructed bases.
fn mub_pipeline_check(plan: &Plan, subject: &Subject) -> Result<f64> {
    let mut dev = 0.0f64;
    for &(n, d) in &plan.mub_cases {
        let m = n * d;
        let a = (n + d - 1) as f64;
        let params = (subject.q_optimal)(a, m, d)?;
        let closed = fidelity_from_participation(a / m as f64, &params);
        let ens = eigenstate_ensemble(&mub_family(d, n)?, cloneq::DEFAULT_TOL)?;
        let report = optimal_cloning_fidelity(&ens, &plan.cfg)?;
        dev = dev.max((closed - report.f_opt).abs());
    }
    Ok(dev)
}

fn full_set_check(subject: &Subject) -> Result<f64> {
    let mut dev = 0.0f64;
    for d in [2usize, 3, 5, 7] {
        let df = d as f64;
        let params = (subject.q_optimal)(2.0 * df, d * (d + 1), d)?;
        let f = fidelity_from_participation(2.0 / (df + 1.0), &params);
        dev = dev
            .max((params.q - 1.0 / (2.0 * (df + 1.0)).sqrt()).abs())
            .max((f - (df + 3.0) / (2.0 * (df + 1.0))).abs());
    }
    Ok(dev)
}

fn qubit_check(plan: &Plan, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dev = 0.0f64;
    for _ in 0..plan.qubit_pairs {
        let mut v = || {
            let z: f64 = rng.gen_range(-1.0..1.0);
            let phi: f64 = rng.gen_range(0.0..2.0 * PI);
            let s = (1.0 - z * z).sqrt();
            [s * phi.cos(), s * phi.sin(), z]
        };
        let pair = BlochPair::new(v(), v())?;
        let closed = qubit_optimal_cloner(&pair);
        let ens = eigenstate_ensemble(&pair.observables()?, cloneq::DEFAULT_TOL)?;
        let report = optimal_cloning_fidelity(&ens, &plan.cfg)?;
        dev = dev.max((closed.q_c - report.q_c).abs());
    }
    Ok(dev)
}

/// Largest violation of the sweep ordering claims; zero when they hold.
fn sweep_check() -> Result<f64> {
    let by_d = sweep(&SweepMode::VaryD { n: 2, dims: vec![2, 3, 5, 7, 11] }, &SweepPath::ClosedForm)?;
    let by_n = sweep(&SweepMode::VaryN { d: 11, counts: (2..=12).collect() }, &SweepPath::ClosedForm)?;
    let mut worst = 0.0f64;
    for rows in [&by_d, &by_n] {
        for w in rows.windows(2) {
            worst = worst.max(w[0].q_c - w[1].q_c);
        }
        for r in rows.iter() {
            worst = worst.max(r.q_c - r.q_bound);
        }
    }
    Ok(worst)
}

fn mr_check() -> Result<f64> {
    let mut dev = 0.0f64;
    for (n, d) in [(2usize, 2usize), (3, 2), (2, 3), (4, 3), (3, 5)] {
        let (f, _) = mr_fidelity_bounds(n, d)?;
        let ens = eigenstate_ensemble(&mub_family(d, n)?, cloneq::DEFAULT_TOL)?;
        let q0 = params_from_q(d, 0.0)?;
        for g in ens.groups() {
            dev = dev.max((average_cloning_fidelity(&ens, g, &q0)? - f).abs());
        }
    }
    Ok(dev)
}

fn commuting_check(seed: u64, plan: &Plan) -> Result<f64> {
    let mut worst = 0.0f64;
    for d in 2..=4 {
        let v = haar_unitary(d, seed + d as u64)?;
        let diag = |s: f64| {
            let spec: Vec<f64> = (0..d).map(|k| (k as f64 + 1.0) * s).collect();
            v.matmul(&cloneq::qmath::ComplexMatrix::diag_real(&spec)).matmul(&v.dagger())
        };
        let set = ObservableSet::new(vec![diag(1.0), diag(-0.5)], 1e-9)?;
        let ens = eigenstate_ensemble(&set, cloneq::DEFAULT_TOL)?;
        worst = worst.max(optimal_cloning_fidelity(&ens, &plan.cfg)?.q_c);
    }
    Ok(worst)
}

/// Runs the suite. Results come back in a fixed order whatever the thread
/// count.
pub fn run(level: Level, cfg: BasisOptConfig, subject: &Subject) -> Vec<CheckResult> {
    let plan = Plan::new(level, cfg);
    let seed = cfg.seed;
    type Job<'a> = Box<dyn Fn() -> CheckResult + Sync + Send + 'a>;
    let wrap = |name: &'static str, tol: f64, note: String, r: Result<f64>| match r {
        Ok(dev) => check(name, dev, tol, note),
        Err(e) => failed(name, tol, e),
    };
    let plan = &plan;
    let jobs: Vec<Job> = vec![
        Box::new(move || {
            let note = format!("d in {:?}, {} triples each", plan.oracle_dims, plan.oracle_triples);
            wrap("closed form vs tripartite oracle", 1e-10, note, oracle_check(plan, seed))
        }),
        Box::new(move || {
            wrap("universal fidelity", 1e-12, "d = 2..8".into(), universal_check(subject, seed))
        }),
        Box::new(move || {
            let note = format!("{} pairs x {} points", plan.grid_pairs, plan.grid_points);
            wrap("q_opt vs grid search", 1e-9, note, grid_check(plan, subject, seed))
        }),
        Box::new(move || {
            wrap("full MUB set", 1e-12, "d in [2, 3, 5, 7]".into(), full_set_check(subject))
        }),
        Box::new(move || {
            let note = format!("{:?}", plan.mub_cases);
            wrap("MUB A_opt recovery", 1e-4, note, mub_recovery_check(plan))
        }),
        Box::new(move || {
            wrap("MUB closed form vs pipeline", 1e-6, String::new(), mub_pipeline_check(plan, subject))
        }),
        Box::new(move || {
            let note = format!("{} random pairs", plan.qubit_pairs);
            wrap("qubit closed form vs pipeline", 1e-4, note, qubit_check(plan, seed))
        }),
        Box::new(move || {
            wrap("commuting sets have Q_c = 0", 1e-9, "d = 2..4".into(), commuting_check(seed, plan))
        }),
        Box::new(|| wrap("sweep ordering", 0.0, "violation of monotonicity or Q bound".into(), sweep_check().map(|v| v.max(0.0)))),
        Box::new(|| wrap("measure-and-reconstruct at q = 0", 1e-12, String::new(), mr_check())),
    ];
    jobs.par_iter().map(|job| job()).collect()
}
