use serde::Serialize;

use super::basis::{optimize_basis, BasisOptConfig, RestartRecord};
use super::closed::{g_function, mr_fidelity_bounds, q_optimal_detail, qc_upper_bound};
use crate::ensembles::{participation, EigenstateEnsemble};
use crate::qcm::{average_cloning_fidelity, fidelity_from_participation, params_from_q, CloneParams};
use crate::qmath::OrthonormalBasis;
use crate::Result;

/// Everything the pipeline learns about one ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CloneReport {
    /// Number of observables.
    pub n: usize,
    pub d: usize,
    /// Ensemble size `N d`.
    pub m: usize,
    pub a_opt: f64,
    pub basis_opt: OrthonormalBasis,
    pub params_opt: CloneParams,
    pub f_opt: f64,
    pub q_c: f64,
    /// Infinite when `A_opt = M/2`; serialised as `null`.
    pub g: f64,
    /// Upper bound on `Q_c` for any `N` observables in dimension `d`.
    pub bound_qc: f64,
    /// `(1 - 1/N)(1 - 1/d)`, the bound on the measure-and-reconstruct `Q`.
    pub bound_q: f64,
    /// Projective measure-and-reconstruct fidelity `A_opt / M` (the `q = 0`
    /// cloner).
    pub f_mr: f64,
    /// Fidelity at the regime boundary `p = 2q`.
    pub f_boundary: f64,
    pub q_stationary: f64,
    pub clamped: bool,
    pub converged: bool,
    pub diagnostics: Vec<RestartRecord>,
}

/// Search the cloning basis, then apply the closed-form `(p, q)`.
pub fn optimal_cloning_fidelity(
    ensemble: &EigenstateEnsemble,
    cfg: &BasisOptConfig,
) -> Result<CloneReport> {
    let opt = optimize_basis(ensemble, cfg)?;
    let mut report = report_from_basis(ensemble, opt.basis)?;
    report.converged = opt.converged;
    report.diagnostics = opt.restarts;
    Ok(report)
}

/// Report for a fixed cloning basis, skipping the search.
pub fn report_from_basis(
    ensemble: &EigenstateEnsemble,
    basis: OrthonormalBasis,
) -> Result<CloneReport> {
    let (n, d, m) = (ensemble.num_groups(), ensemble.dim(), ensemble.len());
    let a_opt = participation(ensemble, &basis)?.a.clamp(m as f64 / d as f64, m as f64);
    let qopt = q_optimal_detail(a_opt, m, d)?;
    let f_opt = average_cloning_fidelity(ensemble, &basis, &qopt.params)?.min(1.0);
    let ratio = a_opt / m as f64;
    let f_boundary = fidelity_from_participation(ratio, &params_from_q(d, CloneParams::q_regime(d))?);
    let (_, bound_q) = mr_fidelity_bounds(n, d)?;
    Ok(CloneReport {
        n,
        d,
        m,
        a_opt,
        basis_opt: basis,
        params_opt: qopt.params,
        f_opt,
        q_c: (1.0 - f_opt).max(0.0),
        g: g_function(a_opt, m, d),
        bound_qc: qc_upper_bound(n, d)?,
        bound_q,
        f_mr: ratio,
        f_boundary,
        q_stationary: qopt.q_stationary,
        clamped: qopt.clamped,
        converged: true,
        diagnostics: Vec::new(),
    })
}
