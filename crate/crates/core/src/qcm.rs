//! The symmetric 1 -> 2 quantum cloning machine.
//!
//! In a cloning basis `{|i>}` the machine acts as
//!
//! ```text
//! |i>_A |0>_B |X>_C  ->  p |i>|i>|X_i> + q sum_{j != i} (|i>|j> + |j>|i>) |X_j>
//! ```
//!
//! with real `p, q >= 0` and `p^2 + 2(d-1) q^2 = 1`. The machine register
//! states `|X_i>` are the canonical basis of a `d`-dimensional register.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::ensembles::{participation, state_participation, EigenstateEnsemble};
use crate::qmath::{
    inner, partial_trace_pure, require_unit, ComplexMatrix, OrthonormalBasis, Subsystem,
    TripartiteDims,
};
use crate::{Error, Result, DEFAULT_TOL};

/// Largest dimension for which the tripartite oracle is built.
pub const ORACLE_MAX_DIM: usize = 16;

const UNITARITY_TOL: f64 = 1e-12;

/// `(p, q)` of a symmetric cloner in dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloneParams {
    pub dim: usize,
    pub p: f64,
    pub q: f64,
}

impl CloneParams {
    /// Largest admissible `q`, where `p = 0`.
    pub fn q_max(d: usize) -> f64 {
        (1.0 / (2.0 * (d as f64 - 1.0))).sqrt()
    }

    /// Regime boundary `p^2 = 2pq`, i.e. `q = 1/sqrt(2(d+1))`.
    pub fn q_regime(d: usize) -> f64 {
        (1.0 / (2.0 * (d as f64 + 1.0))).sqrt()
    }

    /// Validates explicit parameters against the unitarity constraint.
    pub fn new(dim: usize, p: f64, q: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let defect = p * p + 2.0 * (dim as f64 - 1.0) * q * q - 1.0;
        if p < 0.0 || q < 0.0 || defect.abs() > UNITARITY_TOL {
            return Err(Error::QOutOfRange {
                q,
                max: Self::q_max(dim),
            });
        }
        Ok(Self { dim, p, q })
    }

    /// `p^2 >= 2pq` (closed at the boundary).
    pub fn in_regime(&self) -> bool {
        self.p * self.p >= 2.0 * self.p * self.q - 1e-12
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.p * self.p + 2.0 * (self.dim as f64 - 1.0) * self.q * self.q - 1.0
    }

    /// Coefficient of `|A_psi|` terms: `p^2 + (d-2) q^2`.
    fn diag_coeff(&self) -> f64 {
        self.p * self.p + (self.dim as f64 - 2.0) * self.q * self.q
    }

    /// Coefficient of the coherences: `2pq + (d-2) q^2`.
    fn offdiag_coeff(&self) -> f64 {
        2.0 * self.p * self.q + (self.dim as f64 - 2.0) * self.q * self.q
    }
}

/// `p = +sqrt(1 - 2(d-1) q^2)` for `0 <= q <= 1/sqrt(2(d-1))`.
pub fn params_from_q(d: usize, q: f64) -> Result<CloneParams> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let max = CloneParams::q_max(d);
    if !(0.0..=max * (1.0 + 1e-14)).contains(&q) || q.is_nan() {
        return Err(Error::QOutOfRange { q, max });
    }
    let p = (1.0 - 2.0 * (d as f64 - 1.0) * q * q).max(0.0).sqrt();
    Ok(CloneParams { dim: d, p, q })
}

/// Universal cloner: `p = 2q`, `q = 1/sqrt(2(d+1))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniversalCloner {
    pub params: CloneParams,
    /// State-independent fidelity `(d+3) / (2(d+1))`.
    pub fidelity: f64,
}

pub fn universal_params(d: usize) -> Result<UniversalCloner> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let q = CloneParams::q_regime(d);
    let df = d as f64;
    Ok(UniversalCloner {
        params: CloneParams {
            dim: d,
            p: 2.0 * q,
            q,
        },
        fidelity: (df + 3.0) / (2.0 * (df + 1.0)),
    })
}

/// One clone's density matrix and its fidelity with the input.
#[derive(Debug, Clone, PartialEq)]
pub struct CloneOutput {
    pub clone: ComplexMatrix,
    pub fidelity: f64,
}

fn check_inputs(psi: &[C64], basis: &OrthonormalBasis, params: &CloneParams) -> Result<()> {
    let d = basis.dim();
    if psi.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: psi.len(),
        });
    }
    if params.dim != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: params.dim,
        });
    }
    require_unit(psi, DEFAULT_TOL)
}

/// Clone from the closed-form expression for the reduced output state.
pub fn clone_output_closed(
    psi: &[C64],
    basis: &OrthonormalBasis,
    params: &CloneParams,
) -> Result<CloneOutput> {
    check_inputs(psi, basis, params)?;
    let d = basis.dim();
    let alpha = basis.coefficients(psi);
    let diag = params.diag_coeff();
    let off = params.offdiag_coeff();
    let q2 = params.q * params.q;

    // coefficients in the cloning basis, then rotate back
    let mut c = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            c[(i, j)] = if i == j {
                C64::new(alpha[i].norm_sqr() * diag + q2, 0.0)
            } else {
                alpha[i] * alpha[j].conj() * off
            };
        }
    }
    let e = basis.to_unitary();
    let clone = e.matmul(&c).matmul(&e.dagger());

    let a_psi = state_participation(psi, basis);
    let fidelity = a_psi * diag + (1.0 - a_psi) * off + q2;
    Ok(CloneOutput { clone, fidelity })
}

/// Image of cloning-basis ket `i` on `A ⊗ B ⊗ C`, in cloning-basis
/// coordinates on `A` and `B` and canonical coordinates on `C`.
pub fn tripartite_image(i: usize, params: &CloneParams) -> Vec<C64> {
    let d = params.dim;
    let dims = TripartiteDims::new(d, d, d);
    let idx = |a: usize, b: usize, c: usize| (a * d + b) * d + c;
    let mut v = vec![C64::new(0.0, 0.0); dims.total()];
    v[idx(i, i, i)] = C64::new(params.p, 0.0);
    for j in (0..d).filter(|&j| j != i) {
        v[idx(i, j, j)] += params.q;
        v[idx(j, i, j)] += params.q;
    }
    v
}

/// Gram matrix of the `d` tripartite images; the identity exactly when the
/// map is an isometry.
pub fn image_gram(params: &CloneParams) -> ComplexMatrix {
    let d = params.dim;
    let images: Vec<Vec<C64>> = (0..d).map(|i| tripartite_image(i, params)).collect();
    let mut g = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            g[(i, j)] = inner(&images[i], &images[j]);
        }
    }
    g
}

/// Both clone marginals from the explicit tripartite output.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutput {
    pub a: CloneOutput,
    pub b: ComplexMatrix,
}

impl OracleOutput {
    /// Largest entrywise difference between the two clones.
    pub fn asymmetry(&self) -> f64 {
        self.a.clone.max_abs_diff(&self.b)
    }
}

/// Builds `sum_i alpha_i V_i` on `A ⊗ B ⊗ C`, traces out `B C` (and `A C`)
/// and rotates the marginals back to the computational basis.
pub fn clone_output_oracle_full(
    psi: &[C64],
    basis: &OrthonormalBasis,
    params: &CloneParams,
) -> Result<OracleOutput> {
    check_inputs(psi, basis, params)?;
    let d = basis.dim();
    if d > ORACLE_MAX_DIM {
        return Err(Error::InvalidDimension(d));
    }
    let alpha = basis.coefficients(psi);
    let dims = TripartiteDims::new(d, d, d);
    let mut out = vec![C64::new(0.0, 0.0); dims.total()];
    for (i, a) in alpha.iter().enumerate() {
        for (o, v) in out.iter_mut().zip(tripartite_image(i, params)) {
            *o += a * v;
        }
    }
    let e = basis.to_unitary();
    let rotate = |m: ComplexMatrix| e.matmul(&m).matmul(&e.dagger());
    let ra = rotate(partial_trace_pure(&out, Subsystem::A, dims)?);
    let rb = rotate(partial_trace_pure(&out, Subsystem::B, dims)?);
    let fidelity = ra
        .matvec(psi)
        .iter()
        .zip(psi)
        .map(|(x, y)| y.conj() * x)
        .sum::<C64>()
        .re;
    Ok(OracleOutput {
        a: CloneOutput {
            clone: ra,
            fidelity,
        },
        b: rb,
    })
}

/// Clone on `A` from the explicit tripartite construction.
pub fn clone_output_oracle(
    psi: &[C64],
    basis: &OrthonormalBasis,
    params: &CloneParams,
) -> Result<CloneOutput> {
    clone_output_oracle_full(psi, basis, params).map(|o| o.a)
}

/// `F_avg = (A/M)(p^2 - 2pq) + 2pq + (d-1) q^2` as a function of the
/// normalised participation `a = A/M`.
pub fn fidelity_from_participation(a: f64, params: &CloneParams) -> f64 {
    let (p, q) = (params.p, params.q);
    a * (p * p - 2.0 * p * q) + 2.0 * p * q + (params.dim as f64 - 1.0) * q * q
}

/// Average cloning fidelity of an ensemble through its participation `A`.
pub fn average_cloning_fidelity(
    ensemble: &EigenstateEnsemble,
    basis: &OrthonormalBasis,
    params: &CloneParams,
) -> Result<f64> {
    if params.dim != ensemble.dim() {
        return Err(Error::DimensionMismatch {
            expected: ensemble.dim(),
            found: params.dim,
        });
    }
    let rep = participation(ensemble, basis)?;
    Ok(fidelity_from_participation(
        rep.a / ensemble.len() as f64,
        params,
    ))
}

/// `(1/M) sum_m <psi_m| rho_out(psi_m) |psi_m>`, summing explicit clones in
/// ensemble order.
pub fn average_cloning_fidelity_direct(
    ensemble: &EigenstateEnsemble,
    basis: &OrthonormalBasis,
    params: &CloneParams,
) -> Result<f64> {
    let mut total = 0.0;
    for psi in ensemble.states() {
        let out = clone_output_closed(psi, basis, params)?;
        let rpsi = out.clone.matvec(psi);
        total += inner(psi, &rpsi).re;
    }
    Ok(total / ensemble.len() as f64)
}
