//! Small dense complex linear algebra.

mod eigen;
mod haar;
mod matrix;
mod trace;

pub use eigen::{expm_antihermitian, hermitian_eigensystem, Eigensystem};
pub use haar::{haar_unitary, random_hermitian, random_state};
pub use matrix::{
    basis_vector, gram_defect, gram_schmidt, inner, norm, normalized, require_unit,
    ComplexMatrix, OrthonormalBasis, ORTHONORMAL_TOL,
};
pub use trace::{
    partial_trace, partial_trace_pure, require_density, state_fidelity, Subsystem,
    TripartiteDims,
};
