//! Hermitian eigensystems by cyclic complex Jacobi rotations.
//!
//! Jacobi is slow for large matrices but it is accurate to a few ulps in
//! the eigenvectors, which is what the cloning computations need at the
//! dimensions we care about (d <= 32).

use num_complex::Complex64 as C64;

use super::matrix::{basis_vector, gram_schmidt, inner, ComplexMatrix, OrthonormalBasis, ZERO};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order together with the matching eigenbasis.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub basis: OrthonormalBasis,
}

/// Raw Jacobi diagonalisation: returns unsorted eigenvalues and the unitary
/// whose columns are the eigenvectors. The input must be Hermitian.
pub(crate) fn jacobi(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = h.rows();
    let mut a = h.clone();
    // symmetrise so that rounding in the input cannot leak into the rotations
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // R = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane
                let r_pp = C64::new(c, 0.0);
                let r_pq = C64::new(s, 0.0);
                let r_qp = phase.conj() * (-s);
                let r_qq = phase.conj() * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * r_pp + akq * r_qp;
                    a[(k, q)] = akp * r_pq + akq * r_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = r_pp.conj() * apk + r_qp.conj() * aqk;
                    a[(q, k)] = r_pq.conj() * apk + r_qq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * r_pp + vkq * r_qp;
                    v[(k, q)] = vkp * r_pq + vkq * r_qq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)].re).collect(), v)
}

/// Rotates `v` by a global phase so that its first component of at least
/// half the maximal modulus is real and positive.
fn fix_phase(v: &mut [C64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(z) = v.iter().find(|z| z.norm() >= 0.5 * max).copied() {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are returned in descending order. Eigenvalues closer than
/// `tol` form a degenerate cluster; the cluster's eigenspace is re-spanned
/// by Gram-Schmidt on its projections of the canonical vectors `e_0, e_1,
/// ...` so that the basis does not depend on rotation order. Every ket is
/// phase-normalised (see [`Eigensystem`]).
pub fn hermitian_eigensystem(h: &ComplexMatrix, tol: f64) -> Result<Eigensystem> {
    h.require_hermitian(tol)?;
    let n = h.rows();
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let (vals, vecs) = jacobi(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]).then(i.cmp(&j)));

    let values: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let columns: Vec<Vec<C64>> = order.iter().map(|&i| vecs.column(i)).collect();

    let mut kets: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end - 1] - values[end] < tol {
            end += 1;
        }
        let cluster = &columns[start..end];
        if cluster.len() == 1 {
            kets.push(cluster[0].clone());
        } else {
            let projected: Vec<Vec<C64>> = (0..n)
                .map(|k| {
                    let e = basis_vector(n, k);
                    let mut w = vec![ZERO; n];
                    for c in cluster {
                        let coeff = inner(c, &e);
                        for (wi, ci) in w.iter_mut().zip(c) {
                            *wi += coeff * ci;
                        }
                    }
                    w
                })
                .collect();
            let mut span = gram_schmidt(&projected, 1e-6);
            span.truncate(cluster.len());
            debug_assert_eq!(span.len(), cluster.len());
            kets.extend(span);
        }
        start = end;
    }
    for k in &mut kets {
        fix_phase(k);
    }
    Ok(Eigensystem {
        values,
        basis: OrthonormalBasis::new(kets)?,
    })
}

/// `exp(K)` for anti-Hermitian `K`, computed through the eigensystem of the
/// Hermitian matrix `iK`. The result is unitary to rounding.
pub fn expm_antihermitian(k: &ComplexMatrix) -> ComplexMatrix {
    let n = k.rows();
    let h = k.scale(C64::new(0.0, 1.0));
    let (vals, v) = jacobi(&h);
    // K = -iH, so exp(K) = V diag(exp(-i lambda)) V^dagger
    let mut scaled = v.clone();
    for j in 0..n {
        let ph = C64::from_polar(1.0, -vals[j]);
        for i in 0..n {
            scaled[(i, j)] *= ph;
        }
    }
    scaled.matmul(&v.dagger())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::haar::random_hermitian;

    fn reconstruct(es: &Eigensystem) -> ComplexMatrix {
        let n = es.values.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (lam, v) in es.values.iter().zip(es.basis.kets()) {
            m = &m + &ComplexMatrix::projector(v).scale_real(*lam);
        }
        m
    }

    #[test]
    fn identity_gives_canonical_basis() {
        let es = hermitian_eigensystem(&ComplexMatrix::identity(2), 1e-9).unwrap();
        assert_eq!(es.values, vec![1.0, 1.0]);
        assert_eq!(es.basis, OrthonormalBasis::standard(2));
    }

    #[test]
    fn pauli_z() {
        let z = ComplexMatrix::diag_real(&[1.0, -1.0]);
        let es = hermitian_eigensystem(&z, 1e-9).unwrap();
        assert_eq!(es.values, vec![1.0, -1.0]);
        assert_eq!(es.basis, OrthonormalBasis::standard(2));
    }

    #[test]
    fn ascending_diagonal_is_reordered() {
        let m = ComplexMatrix::diag_real(&[-2.0, 0.5, 3.0]);
        let es = hermitian_eigensystem(&m, 1e-9).unwrap();
        assert_eq!(es.values, vec![3.0, 0.5, -2.0]);
        assert!((es.basis.ket(0)[2] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        for seed in 0..20 {
            for d in [2usize, 3, 4, 6, 8] {
                let h = random_hermitian(d, seed);
                let es = hermitian_eigensystem(&h, 1e-9).unwrap();
                assert!(reconstruct(&es).max_abs_diff(&h) < 1e-8);
                for (lam, v) in es.values.iter().zip(es.basis.kets()) {
                    let hv = h.matvec(v);
                    let err = hv
                        .iter()
                        .zip(v)
                        .map(|(a, b)| (a - b * lam).norm())
                        .fold(0.0, f64::max);
                    assert!(err < 1e-8);
                }
                assert!(es.values.windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }

    #[test]
    fn degenerate_cluster_is_deterministic() {
        // rotate diag(2, 1, 1) by a random unitary; the degenerate pair must
        // come out identical regardless of the rotation applied afterwards
        let u = crate::qmath::haar_unitary(3, 7).unwrap();
        let h = u
            .matmul(&ComplexMatrix::diag_real(&[2.0, 1.0, 1.0]))
            .matmul(&u.dagger());
        let a = hermitian_eigensystem(&h, 1e-9).unwrap();
        let b = hermitian_eigensystem(&h, 1e-9).unwrap();
        assert_eq!(a.basis, b.basis);
        // the first ket of the cluster is the normalised projection of e_0
        let p = &ComplexMatrix::identity(3) - &ComplexMatrix::projector(a.basis.ket(0));
        let e0 = p.column(0);
        let e0 = crate::qmath::normalized(&e0);
        assert!((inner(&e0, a.basis.ket(1)).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(
            hermitian_eigensystem(&m, 1e-9),
            Err(Error::NotHermitian { .. })
        ));
        let r = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            hermitian_eigensystem(&r, 1e-9),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn expm_matches_series() {
        let h = random_hermitian(4, 3).scale_real(0.3);
        let k = h.scale(C64::new(0.0, -1.0));
        let e = expm_antihermitian(&k);
        // truncated Taylor series as an independent route
        let mut term = ComplexMatrix::identity(4);
        let mut sum = ComplexMatrix::identity(4);
        for j in 1..40 {
            term = term.matmul(&k).scale_real(1.0 / j as f64);
            sum = &sum + &term;
        }
        assert!(e.max_abs_diff(&sum) < 1e-12);
        let uu = e.dagger().matmul(&e);
        assert!(uu.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-13);
    }
}
