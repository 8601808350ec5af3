use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::eigen::jacobi;
use super::matrix::{require_unit, ComplexMatrix, ZERO};
use crate::{Error, Result, DEFAULT_TOL};

/// Factor of a tripartite space `A ⊗ B ⊗ C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripartiteDims {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl TripartiteDims {
    pub fn new(a: usize, b: usize, c: usize) -> Self {
        Self { a, b, c }
    }

    pub fn total(&self) -> usize {
        self.a * self.b * self.c
    }

    fn kept(&self, keep: Subsystem) -> usize {
        match keep {
            Subsystem::A => self.a,
            Subsystem::B => self.b,
            Subsystem::C => self.c,
        }
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.b + j) * self.c + k
    }

    /// Splits a flat index into `(kept, traced)` where `traced` enumerates
    /// the two discarded factors in row-major order.
    fn split(&self, flat: usize, keep: Subsystem) -> (usize, usize) {
        let k = flat % self.c;
        let j = (flat / self.c) % self.b;
        let i = flat / (self.b * self.c);
        match keep {
            Subsystem::A => (i, j * self.c + k),
            Subsystem::B => (j, i * self.c + k),
            Subsystem::C => (k, i * self.b + j),
        }
    }
}

/// Validates `rho` as a density matrix: Hermitian, unit trace and positive
/// semidefinite, each to within `tol`.
pub fn require_density(rho: &ComplexMatrix, tol: f64) -> Result<()> {
    rho.require_hermitian(tol)?;
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::NotDensityMatrix(format!("trace = {tr}")));
    }
    let (vals, _) = jacobi(rho);
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -tol {
        return Err(Error::NotDensityMatrix(format!(
            "negative eigenvalue {min:e}"
        )));
    }
    Ok(())
}

/// `<psi|rho|psi>` for a density matrix `rho` and unit vector `psi`.
pub fn state_fidelity(rho: &ComplexMatrix, psi: &[C64]) -> Result<f64> {
    if rho.rows() != psi.len() {
        return Err(Error::DimensionMismatch {
            expected: rho.rows(),
            found: psi.len(),
        });
    }
    require_density(rho, DEFAULT_TOL)?;
    require_unit(psi, DEFAULT_TOL)?;
    let rpsi = rho.matvec(psi);
    let f: C64 = psi.iter().zip(&rpsi).map(|(a, b)| a.conj() * b).sum();
    debug_assert!(f.im.abs() < 1e-10, "fidelity has imaginary part {}", f.im);
    Ok(f.re)
}

/// Reduced operator on one factor of `A ⊗ B ⊗ C`. Linear in `state` and
/// trace preserving; no positivity check is made.
pub fn partial_trace(
    state: &ComplexMatrix,
    keep: Subsystem,
    dims: TripartiteDims,
) -> Result<ComplexMatrix> {
    state.require_square()?;
    if state.rows() != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            found: state.rows(),
        });
    }
    let n = dims.kept(keep);
    let mut out = ComplexMatrix::zeros(n, n);
    let total = dims.total();
    for r in 0..total {
        let (kr, tr) = dims.split(r, keep);
        for c in 0..total {
            let (kc, tc) = dims.split(c, keep);
            if tr == tc {
                out[(kr, kc)] += state[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Reduced density matrix of the pure state `|psi><psi|` without forming
/// the full projector.
pub fn partial_trace_pure(
    psi: &[C64],
    keep: Subsystem,
    dims: TripartiteDims,
) -> Result<ComplexMatrix> {
    if psi.len() != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            found: psi.len(),
        });
    }
    let n = dims.kept(keep);
    let traced = dims.total() / n.max(1);
    // reshape psi into an n x traced matrix M; the reduced state is M M^dagger
    let mut m = vec![ZERO; n * traced];
    for i in 0..dims.a {
        for j in 0..dims.b {
            for k in 0..dims.c {
                let (kr, tr) = dims.split(dims.index(i, j, k), keep);
                m[kr * traced + tr] = psi[dims.index(i, j, k)];
            }
        }
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            out[(r, c)] = (0..traced)
                .map(|t| m[r * traced + t] * m[c * traced + t].conj())
                .sum();
        }
    }
    Ok(out)
}
