//! Tables of `Q_c` against the measure-and-reconstruct bound over families
//! of mutually unbiased bases.

use rayon::prelude::*;
use serde::Serialize;

use super::basis::BasisOptConfig;
use super::closed::{fopt_mub, mr_fidelity_bounds};
use super::report::optimal_cloning_fidelity;
use crate::ensembles::{eigenstate_ensemble, mub_family};
use crate::format::sig12;
use crate::qcm::universal_params;
use crate::{Error, Result, DEFAULT_TOL};

/// Stable column order of [`render_csv`].
pub const CSV_HEADER: &str = "N,d,A_opt,q_opt,F_opt,Q_c,Q_bound";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SweepMode {
    /// Fixed number of bases, varying dimension.
    VaryD { n: usize, dims: Vec<usize> },
    /// Fixed dimension, varying number of bases.
    VaryN { d: usize, counts: Vec<usize> },
}

impl SweepMode {
    fn pairs(&self) -> Vec<(usize, usize)> {
        match self {
            SweepMode::VaryD { n, dims } => dims.iter().map(|&d| (*n, d)).collect(),
            SweepMode::VaryN { d, counts } => counts.iter().map(|&n| (n, *d)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepPath {
    /// Closed forms only; any `d >= 2`.
    ClosedForm,
    /// Build the MUB family (prime `d`) and run the basis search.
    Constructed(BasisOptConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub d: usize,
    /// Absent for `N > d+1`, where the row holds the universal-cloner bound.
    pub a_opt: Option<f64>,
    pub q_opt: f64,
    pub f_opt: f64,
    pub q_c: f64,
    pub q_bound: f64,
}

fn closed_row(n: usize, d: usize) -> Result<SweepRow> {
    let (_, q_bound) = mr_fidelity_bounds(n, d)?;
    if n > d + 1 {
        let u = universal_params(d)?;
        return Ok(SweepRow {
            n,
            d,
            a_opt: None,
            q_opt: u.params.q,
            f_opt: u.fidelity,
            q_c: 1.0 - u.fidelity,
            q_bound,
        });
    }
    let opt = fopt_mub(n, d)?;
    Ok(SweepRow {
        n,
        d,
        a_opt: Some(opt.a_opt),
        q_opt: opt.q_opt(),
        f_opt: opt.f_opt,
        q_c: opt.q_c(),
        q_bound,
    })
}

fn constructed_row(n: usize, d: usize, cfg: &BasisOptConfig) -> Result<SweepRow> {
    let ens = eigenstate_ensemble(&mub_family(d, n)?, DEFAULT_TOL)?;
    let r = optimal_cloning_fidelity(&ens, cfg)?;
    if !r.converged {
        log::warn!("sweep row N = {n}, d = {d}: basis search did not converge");
    }
    Ok(SweepRow {
        n,
        d,
        a_opt: Some(r.a_opt),
        q_opt: r.params_opt.q,
        f_opt: r.f_opt,
        q_c: r.q_c,
        q_bound: r.bound_q,
    })
}

/// Rows in input order. Rows are computed in parallel.
pub fn sweep(mode: &SweepMode, path: &SweepPath) -> Result<Vec<SweepRow>> {
    let pairs = mode.pairs();
    if pairs.is_empty() {
        return Err(Error::EmptySet);
    }
    pairs
        .par_iter()
        .map(|&(n, d)| match path {
            SweepPath::ClosedForm => closed_row(n, d),
            SweepPath::Constructed(cfg) => constructed_row(n, d, cfg),
        })
        .collect()
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let a = r.a_opt.map(sig12).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            r.d,
            a,
            sig12(r.q_opt),
            sig12(r.f_opt),
            sig12(r.q_c),
            sig12(r.q_bound)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_sweep_over_primes_increases() {
        let mode = SweepMode::VaryD { n: 2, dims: vec![2, 3, 5, 7, 11] };
        let rows = sweep(&mode, &SweepPath::ClosedForm).unwrap();
        assert_eq!(rows.len(), 5);
        for w in rows.windows(2) {
            assert!(w[1].q_c > w[0].q_c);
        }
        for r in &rows {
            assert!(r.q_c < r.q_bound);
        }
    }

    #[test]
    fn count_sweep_at_eleven() {
        let mode = SweepMode::VaryN { d: 11, counts: (2..=12).collect() };
        let rows = sweep(&mode, &SweepPath::ClosedForm).unwrap();
        assert_eq!(rows.len(), 11);
        for w in rows.windows(2) {
            assert!(w[1].q_c > w[0].q_c);
        }
        assert!((rows[10].f_opt - 14.0 / 24.0).abs() < 1e-12);
    }

    #[test]
    fn beyond_full_set_uses_universal_value() {
        let rows = sweep(&SweepMode::VaryN { d: 2, counts: vec![3, 4] }, &SweepPath::ClosedForm).unwrap();
        assert!((rows[0].q_c - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(rows[1].a_opt, None);
        assert!((rows[1].q_c - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn constructed_path_matches_closed_form() {
        let mode = SweepMode::VaryD { n: 2, dims: vec![2, 3] };
        let cfg = BasisOptConfig { restarts: 4, ..Default::default() };
        let a = sweep(&mode, &SweepPath::Constructed(cfg)).unwrap();
        let b = sweep(&mode, &SweepPath::ClosedForm).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.q_c - y.q_c).abs() < 1e-6);
        }
        let bad = SweepMode::VaryD { n: 2, dims: vec![4] };
        assert!(matches!(
            sweep(&bad, &SweepPath::Constructed(cfg)),
            Err(Error::NotPrime(4))
        ));
    }

    #[test]
    fn csv_layout() {
        let rows = sweep(&SweepMode::VaryN { d: 2, counts: vec![2, 4] }, &SweepPath::ClosedForm).unwrap();
        let csv = render_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "2,2,3,0.325057583672,0.841506350946,0.158493649054,0.25");
        assert!(lines[2].starts_with("4,2,,"));
    }
}
