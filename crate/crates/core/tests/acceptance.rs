//! Acceptance gate. Runs every criterion at its stated tolerance, prints one
//! line per criterion and exits nonzero if any fails.
//!
//! Build with `--release` for representative timings; the wall-clock limits
//! are only enforced in optimised builds.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cloneq::ensembles::{eigenstate_ensemble, mub_family, ObservableSet};
use cloneq::optimal::{
    fopt_mub, mr_fidelity_bounds, optimal_cloning_fidelity, optimize_basis, q_optimal, sweep,
    BasisOptConfig, SweepMode, SweepPath,
};
use cloneq::qcm::{
    average_cloning_fidelity, clone_output_closed, clone_output_oracle_full,
    fidelity_from_participation, params_from_q, universal_params, CloneParams,
};
use cloneq::qmath::{haar_unitary, random_hermitian, random_state, ComplexMatrix, OrthonormalBasis};
use cloneq::qubit::{qubit_optimal_cloner, BlochPair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within_budget(elapsed: Duration, limit_s: f64) -> bool {
    cfg!(debug_assertions) || elapsed.as_secs_f64() < limit_s
}

fn random_basis(d: usize, seed: u64) -> OrthonormalBasis {
    OrthonormalBasis::from_unitary(&haar_unitary(d, seed).unwrap()).unwrap()
}

fn ensemble(set: &ObservableSet) -> cloneq::ensembles::EigenstateEnsemble {
    eigenstate_ensemble(set, 1e-9).unwrap()
}

fn random_bloch(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let s = (1.0 - z * z).sqrt();
    let v = [s * phi.cos(), s * phi.sin(), z];
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut dev, mut asym) = (0.0f64, 0.0f64);
    for d in 2..=6 {
        for k in 0..200u64 {
            let seed = d as u64 * 1000 + k;
            let psi = random_state(d, seed);
            let basis = random_basis(d, seed);
            let q = rng.gen_range(0.0..=CloneParams::q_max(d));
            let params = params_from_q(d, q).unwrap();
            let closed = clone_output_closed(&psi, &basis, &params).unwrap();
            let oracle = clone_output_oracle_full(&psi, &basis, &params).unwrap();
            dev = dev
                .max(closed.clone.max_abs_diff(&oracle.a.clone))
                .max((closed.fidelity - oracle.a.fidelity).abs());
            asym = asym.max(oracle.asymmetry());
        }
    }
    let t = start.elapsed();
    outcome(
        dev <= 1e-10 && asym <= 1e-10 && within_budget(t, 60.0),
        format!("max deviation {dev:.2e}, max A/B asymmetry {asym:.2e}, {:.2} s", t.as_secs_f64()),
    )
}

fn universal_cloner() -> Outcome {
    let mut worst = 0.0f64;
    let mut spread = 0.0f64;
    for d in 2..=12 {
        let u = universal_params(d).unwrap();
        let expect = (d as f64 + 3.0) / (2.0 * (d as f64 + 1.0));
        worst = worst.max((u.fidelity - expect).abs());
        let basis = random_basis(d, 77 + d as u64);
        let fids: Vec<f64> = (0..100u64)
            .map(|k| clone_output_closed(&random_state(d, 5000 + k), &basis, &u.params).unwrap().fidelity)
            .collect();
        let lo = fids.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = fids.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max((hi - expect).abs()).max((lo - expect).abs());
        spread = spread.max(hi - lo);
    }
    let d2 = universal_params(2).unwrap().fidelity;
    outcome(
        worst <= 1e-12 && spread < 1e-10 && (d2 - 5.0 / 6.0).abs() <= 1e-12,
        format!("max |F - (d+3)/(2(d+1))| {worst:.2e}, state spread {spread:.2e}, F(2) = {d2}"),
    )
}

fn mub_closed_form() -> Outcome {
    let start = Instant::now();
    let cfg = BasisOptConfig::default();
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (n, d) in [(2, 2), (3, 2), (2, 3), (4, 3), (2, 5)] {
        let ens = ensemble(&mub_family(d, n).unwrap());
        let opt = optimize_basis(&ens, &cfg).unwrap();
        let dev = (opt.a_opt - (n + d - 1) as f64).abs();
        worst = worst.max(dev);
        parts.push(format!("({n},{d}) {dev:.1e}"));
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-4 && within_budget(t, 120.0),
        format!("|A_opt - (N+d-1)|: {}; {:.2} s", parts.join(", "), t.as_secs_f64()),
    )
}

fn full_mub_set() -> Outcome {
    let mut worst = 0.0f64;
    for d in [2, 3, 5] {
        let opt = fopt_mub(d + 1, d).unwrap();
        let df = d as f64;
        worst = worst
            .max((opt.q_opt() - 1.0 / (2.0 * (df + 1.0)).sqrt()).abs())
            .max((opt.f_opt - (df + 3.0) / (2.0 * (df + 1.0))).abs());
    }
    let q3 = fopt_mub(4, 3).unwrap().q_opt();
    let d3 = (q3 - 1.0 / (2.0 * 2f64.sqrt())).abs();
    outcome(
        worst <= 1e-12 && d3 <= 1e-12,
        format!("max deviation {worst:.2e}, d=3 |q - 1/(2 sqrt 2)| {d3:.2e}"),
    )
}

fn q_maximality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..50 {
        let d = rng.gen_range(2..=12usize);
        let lo = (1.0 / d as f64).max(2.0 / (d as f64 + 1.0));
        let ratio = rng.gen_range(lo..=1.0);
        let m = 1_000_000usize;
        let params = q_optimal(ratio * m as f64, m, d).unwrap();
        let best = fidelity_from_participation(ratio, &params);
        let q_b = CloneParams::q_regime(d);
        let points = 100_000;
        for k in 0..points {
            let q = q_b * k as f64 / (points - 1) as f64;
            let f = fidelity_from_participation(ratio, &params_from_q(d, q).unwrap());
            worst = worst.max(f - best);
        }
    }
    outcome(worst <= 1e-9, format!("max grid excess {worst:.2e} over 50 pairs"))
}

fn qubit_closed_form() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cfg = BasisOptConfig::default();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let pair = BlochPair::new(random_bloch(&mut rng), random_bloch(&mut rng)).unwrap();
        let closed = qubit_optimal_cloner(&pair);
        let r = optimal_cloning_fidelity(&ensemble(&pair.observables().unwrap()), &cfg).unwrap();
        worst = worst.max((closed.q_c - r.q_c).abs()).max((closed.a_opt - r.a_opt).abs());
    }
    let orth = qubit_optimal_cloner(&BlochPair::new([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]).unwrap());
    let para = qubit_optimal_cloner(&BlochPair::new([0.0, 0.6, 0.8], [0.0, 0.6, 0.8]).unwrap());
    let anti = qubit_optimal_cloner(&BlochPair::new([0.0, 0.6, 0.8], [0.0, -0.6, -0.8]).unwrap());
    let ok = worst <= 1e-4 && orth.a_opt / 4.0 == 0.75 && para.q_c <= 1e-9 && anti.q_c <= 1e-9;
    outcome(
        ok,
        format!(
            "max |closed - pipeline| {worst:.2e}; a.b=0: A/4 = {}; |a.b|=1: Q_c = {:.1e}, {:.1e}",
            orth.a_opt / 4.0,
            para.q_c,
            anti.q_c
        ),
    )
}

fn faithfulness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = BasisOptConfig::default();
    let mut max_commuting = 0.0f64;
    let mut min_noncommuting = f64::INFINITY;
    for k in 0..20u64 {
        let d = rng.gen_range(2..=5usize);
        let n = rng.gen_range(2..=4usize);
        let v = haar_unitary(d, 900 + k).unwrap();
        let obs: Vec<ComplexMatrix> = (0..n)
            .map(|_| {
                let spec: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                v.matmul(&ComplexMatrix::diag_real(&spec)).matmul(&v.dagger())
            })
            .collect();
        let set = ObservableSet::new(obs, 1e-9).unwrap();
        max_commuting = max_commuting.max(optimal_cloning_fidelity(&ensemble(&set), &cfg).unwrap().q_c);

        let obs: Vec<ComplexMatrix> = (0..n).map(|j| random_hermitian(d, 3000 + 10 * k + j as u64)).collect();
        let set = ObservableSet::new(obs, 1e-9).unwrap();
        min_noncommuting =
            min_noncommuting.min(optimal_cloning_fidelity(&ensemble(&set), &cfg).unwrap().q_c);
    }
    outcome(
        max_commuting <= 1e-6 && min_noncommuting >= 1e-4,
        format!("commuting max Q_c {max_commuting:.2e}, non-commuting min Q_c {min_noncommuting:.2e}"),
    )
}

fn figure_sweeps() -> Outcome {
    let start = Instant::now();
    let by_d = sweep(
        &SweepMode::VaryD { n: 2, dims: vec![2, 3, 5, 7, 11] },
        &SweepPath::ClosedForm,
    )
    .unwrap();
    let by_n = sweep(
        &SweepMode::VaryN { d: 11, counts: (2..=12).collect() },
        &SweepPath::ClosedForm,
    )
    .unwrap();
    let t = start.elapsed();
    let increasing = |rows: &[cloneq::optimal::SweepRow]| rows.windows(2).all(|w| w[1].q_c > w[0].q_c);
    let below = by_d.iter().chain(&by_n).all(|r| {
        let bound = (1.0 - 1.0 / r.n as f64) * (1.0 - 1.0 / r.d as f64);
        r.q_c < bound && (r.q_bound - bound).abs() < 1e-15
    });
    outcome(
        increasing(&by_d) && increasing(&by_n) && below && within_budget(t, 10.0),
        format!(
            "{} + {} rows, increasing: {} / {}, all below Q bound: {below}, {:.3} s",
            by_d.len(),
            by_n.len(),
            increasing(&by_d),
            increasing(&by_n),
            t.as_secs_f64()
        ),
    )
}

fn measure_and_reconstruct() -> Outcome {
    let mut exact = true;
    let mut worst = 0.0f64;
    for d in [2usize, 3, 5, 7] {
        for n in 1..=d + 1 {
            let (f, qb) = mr_fidelity_bounds(n, d).unwrap();
            exact &= f == (n + d - 1) as f64 / (n * d) as f64;
            exact &= qb == (1.0 - 1.0 / n as f64) * (1.0 - 1.0 / d as f64);
            let ens = ensemble(&mub_family(d, n).unwrap());
            let q0 = params_from_q(d, 0.0).unwrap();
            for member in ens.groups() {
                let favg = average_cloning_fidelity(&ens, member, &q0).unwrap();
                worst = worst.max((favg - f).abs());
            }
        }
    }
    outcome(
        exact && worst <= 1e-12,
        format!("closed forms exact: {exact}; max |F_avg(q=0) - F_mub| {worst:.2e}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("universal cloner", universal_cloner),
        ("MUB basis optimum", mub_closed_form),
        ("full MUB set is universal", full_mub_set),
        ("q_opt maximality", q_maximality),
        ("qubit closed form", qubit_closed_form),
        ("faithfulness", faithfulness),
        ("figure sweeps", figure_sweeps),
        ("measure-and-reconstruct", measure_and_reconstruct),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] AC{} {name}: {}", k + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
