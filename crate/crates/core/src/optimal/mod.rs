//! Optimal cloning of eigenstate ensembles and the incompatibility `Q_c`.

mod basis;
mod closed;
mod report;
mod sweep;

pub use basis::{
    optimize_basis, participation_gradient, participation_value, BasisOptConfig, BasisOptimum,
    RestartRecord, StartPoint,
};
pub use closed::{
    fopt_mub, g_function, mr_fidelity_bounds, q_optimal, q_optimal_detail, q_unconstrained,
    qc_upper_bound, MubOptimum, QOptimum, G_SINGULAR_TOL,
};
pub use report::{optimal_cloning_fidelity, report_from_basis, CloneReport};
pub use sweep::{render_csv, sweep, SweepMode, SweepPath, SweepRow, CSV_HEADER};
