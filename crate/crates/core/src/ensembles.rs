//! Observable sets, their eigenstate ensembles and the participation
//! quantities `A` and `B`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::qmath::{hermitian_eigensystem, inner, ComplexMatrix, OrthonormalBasis};
use crate::{Error, Result};

/// A set of `N >= 1` Hermitian `d x d` observables.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSet {
    dim: usize,
    observables: Vec<ComplexMatrix>,
    labels: Option<Vec<String>>,
}

/// On-disk form: each entry is a `[re, im]` pair.
#[derive(Debug, Serialize, Deserialize)]
struct ObservableSetFile {
    dim: usize,
    observables: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl ObservableSet {
    pub fn new(observables: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let first = observables.first().ok_or(Error::EmptySet)?;
        let dim = first.rows();
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        for x in &observables {
            x.require_square()?;
            if x.rows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: x.rows(),
                });
            }
            x.require_hermitian(tol)?;
        }
        Ok(Self {
            dim,
            observables,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.observables.len() {
            return Err(Error::InvalidInput(format!(
                "{} labels for {} observables",
                labels.len(),
                self.observables.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn observables(&self) -> &[ComplexMatrix] {
        &self.observables
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// True when every pair commutes to within `tol` (max-entry norm).
    pub fn pairwise_commuting(&self, tol: f64) -> bool {
        let xs = &self.observables;
        (0..xs.len()).all(|i| ((i + 1)..xs.len()).all(|j| xs[i].commutator(&xs[j]).max_abs() < tol))
    }

    /// Parses the JSON interchange format and validates Hermiticity.
    /// Errors name the offending field.
    pub fn from_json(text: &str, tol: f64) -> Result<Self> {
        let file: ObservableSetFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("malformed JSON: {e}")))?;
        let d = file.dim;
        if d == 0 {
            return Err(Error::InvalidInput("field `dim`: must be >= 1".into()));
        }
        if file.observables.is_empty() {
            return Err(Error::InvalidInput(
                "field `observables`: at least one observable is required".into(),
            ));
        }
        let mut mats = Vec::with_capacity(file.observables.len());
        for (k, rows) in file.observables.iter().enumerate() {
            if rows.len() != d {
                return Err(Error::InvalidInput(format!(
                    "observables[{k}]: {} rows, expected dim = {d}",
                    rows.len()
                )));
            }
            let mut data = Vec::with_capacity(d * d);
            for (r, row) in rows.iter().enumerate() {
                if row.len() != d {
                    return Err(Error::InvalidInput(format!(
                        "observables[{k}][{r}]: {} entries, expected dim = {d}",
                        row.len()
                    )));
                }
                data.extend(row.iter().map(|[re, im]| C64::new(*re, *im)));
            }
            let m = ComplexMatrix::from_vec(d, d, data)
                .map_err(|e| Error::InvalidInput(format!("observables[{k}]: {e}")))?;
            m.require_hermitian(tol)
                .map_err(|e| Error::InvalidInput(format!("observables[{k}]: {e}")))?;
            mats.push(m);
        }
        let set = Self::new(mats, tol)?;
        match file.labels {
            Some(labels) => set
                .with_labels(labels)
                .map_err(|e| Error::InvalidInput(format!("field `labels`: {e}"))),
            None => Ok(set),
        }
    }

    pub fn to_json(&self) -> String {
        let file = ObservableSetFile {
            dim: self.dim,
            observables: self
                .observables
                .iter()
                .map(|m| {
                    (0..self.dim)
                        .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
                        .collect()
                })
                .collect(),
            labels: self.labels.clone(),
        };
        serde_json::to_string_pretty(&file).expect("observable set serialises")
    }
}

/// Uniform ensemble of the `N * d` eigenvectors of an observable set,
/// grouped by source observable.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenstateEnsemble {
    dim: usize,
    groups: Vec<OrthonormalBasis>,
}

impl EigenstateEnsemble {
    /// Ensemble built directly from bases (one group per basis).
    pub fn from_bases(groups: Vec<OrthonormalBasis>) -> Result<Self> {
        let dim = groups.first().ok_or(Error::EmptySet)?.dim();
        if let Some(g) = groups.iter().find(|g| g.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: g.dim(),
            });
        }
        Ok(Self { dim, groups })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of source observables `N`.
    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    /// Number of states `M = N * d`.
    pub fn len(&self) -> usize {
        self.groups.len() * self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.len() as f64
    }

    pub fn groups(&self) -> &[OrthonormalBasis] {
        &self.groups
    }

    pub fn states(&self) -> impl Iterator<Item = &[C64]> + '_ {
        self.groups.iter().flat_map(|g| g.kets().iter().map(Vec::as_slice))
    }
}

/// Eigenvectors of each observable, in descending-eigenvalue order with the
/// deterministic degenerate tie-break of [`hermitian_eigensystem`].
pub fn eigenstate_ensemble(set: &ObservableSet, tol: f64) -> Result<EigenstateEnsemble> {
    let groups = set
        .observables()
        .iter()
        .map(|x| hermitian_eigensystem(x, tol).map(|es| es.basis))
        .collect::<Result<Vec<_>>>()?;
    EigenstateEnsemble::from_bases(groups)
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Basis `k` of the standard prime-dimension MUB construction.
///
/// `k = 0` is the computational basis. For `k >= 1` the kets are
/// `(1/sqrt d) sum_n w^{(k-1) n^2 + j n} |n>` with `w = exp(2 pi i / d)`;
/// for `d = 2` the quadratic phase is replaced by `i^{(k-1) n}`.
pub fn mub_basis(d: usize, k: usize) -> Result<OrthonormalBasis> {
    if !is_prime(d) {
        return Err(Error::NotPrime(d));
    }
    if k > d {
        return Err(Error::TooManyBases {
            n: k + 1,
            d,
            max: d + 1,
        });
    }
    if k == 0 {
        return Ok(OrthonormalBasis::standard(d));
    }
    let s = k - 1;
    let amp = 1.0 / (d as f64).sqrt();
    let kets = (0..d)
        .map(|j| {
            (0..d)
                .map(|n| {
                    let phase = if d == 2 {
                        // i^{s n} (-1)^{j n}
                        PI / 2.0 * (s * n) as f64 + PI * (j * n) as f64
                    } else {
                        2.0 * PI * ((s * n * n + j * n) % d) as f64 / d as f64
                    };
                    C64::from_polar(amp, phase)
                })
                .collect()
        })
        .collect();
    OrthonormalBasis::new(kets)
}

/// Observable `sum_j (d - j) |psi_j><psi_j|` with non-degenerate spectrum
/// `d, d-1, ..., 1` whose eigenbasis is `basis`.
pub fn observable_from_basis(basis: &OrthonormalBasis) -> ComplexMatrix {
    let d = basis.dim();
    let mut x = ComplexMatrix::zeros(d, d);
    for (j, ket) in basis.kets().iter().enumerate() {
        x = &x + &ComplexMatrix::projector(ket).scale_real((d - j) as f64);
    }
    x
}

/// The first `n` of the `d + 1` mutually unbiased bases for prime `d`,
/// encoded as observables.
pub fn mub_family(d: usize, n: usize) -> Result<ObservableSet> {
    if !is_prime(d) {
        return Err(Error::NotPrime(d));
    }
    if n == 0 {
        return Err(Error::EmptySet);
    }
    if n > d + 1 {
        return Err(Error::TooManyBases { n, d, max: d + 1 });
    }
    let obs = (0..n)
        .map(|k| mub_basis(d, k).map(|b| observable_from_basis(&b)))
        .collect::<Result<Vec<_>>>()?;
    let labels = (0..n).map(|k| format!("mub{k}")).collect();
    ObservableSet::new(obs, crate::DEFAULT_TOL)?.with_labels(labels)
}

/// True iff the eigenbases are internally orthonormal and every inter-basis
/// squared overlap equals `1/d`, both to within `tol`.
pub fn is_mutually_unbiased(set: &ObservableSet, tol: f64) -> bool {
    let Ok(ens) = eigenstate_ensemble(set, tol.max(crate::DEFAULT_TOL)) else {
        return false;
    };
    bases_mutually_unbiased(ens.groups(), tol)
}

pub fn bases_mutually_unbiased(groups: &[OrthonormalBasis], tol: f64) -> bool {
    let Some(d) = groups.first().map(OrthonormalBasis::dim) else {
        return false;
    };
    let target = 1.0 / d as f64;
    for (l, g) in groups.iter().enumerate() {
        for (lp, h) in groups.iter().enumerate() {
            for (i, u) in g.kets().iter().enumerate() {
                for (k, v) in h.kets().iter().enumerate() {
                    let ov = inner(u, v).norm_sqr();
                    let expect = if l == lp {
                        if i == k {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        target
                    };
                    if (ov - expect).abs() > tol {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Per-state and summed participation quantities of an ensemble in a
/// cloning basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipationReport {
    /// `A_m = sum_i |<e_i|psi_m>|^4`
    pub a_m: Vec<f64>,
    /// `B_m = 1 - A_m`
    pub b_m: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

/// `A_psi = sum_i |<e_i|psi>|^4` for a single state.
pub fn state_participation(psi: &[C64], basis: &OrthonormalBasis) -> f64 {
    basis
        .kets()
        .iter()
        .map(|e| inner(e, psi).norm_sqr().powi(2))
        .sum()
}

pub fn participation(
    ensemble: &EigenstateEnsemble,
    basis: &OrthonormalBasis,
) -> Result<ParticipationReport> {
    if ensemble.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: ensemble.dim(),
            found: basis.dim(),
        });
    }
    let a_m: Vec<f64> = ensemble
        .states()
        .map(|psi| state_participation(psi, basis))
        .collect();
    let b_m: Vec<f64> = a_m.iter().map(|a| 1.0 - a).collect();
    let a = a_m.iter().sum();
    let b = b_m.iter().sum();
    Ok(ParticipationReport { a_m, b_m, a, b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{haar_unitary, OrthonormalBasis};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub(crate) fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    pub(crate) fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::diag_real(&[1.0, -1.0])
    }

    fn close(u: &[C64], v: &[C64]) -> bool {
        // equal up to a global phase
        (inner(u, v).norm() - 1.0).abs() < 1e-12
    }

    #[test]
    fn z_ensemble() {
        let set = ObservableSet::new(vec![pauli_z()], 1e-9).unwrap();
        let ens = eigenstate_ensemble(&set, 1e-9).unwrap();
        assert_eq!(ens.len(), 2);
        assert_eq!(ens.weight(), 0.5);
        let states: Vec<_> = ens.states().collect();
        assert_eq!(states[0], &[c(1.0, 0.0), c(0.0, 0.0)][..]);
        assert_eq!(states[1], &[c(0.0, 0.0), c(1.0, 0.0)][..]);
    }

    #[test]
    fn zx_ensemble() {
        let set = ObservableSet::new(vec![pauli_z(), pauli_x()], 1e-9).unwrap();
        let ens = eigenstate_ensemble(&set, 1e-9).unwrap();
        assert_eq!(ens.len(), 4);
        assert_eq!(ens.weight(), 0.25);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let states: Vec<_> = ens.states().collect();
        assert!(close(states[2], &[c(s, 0.0), c(s, 0.0)]));
        assert!(close(states[3], &[c(s, 0.0), c(-s, 0.0)]));
    }

    #[test]
    fn near_degenerate_ordering_is_repeatable() {
        let x = &pauli_z() + &pauli_x().scale_real(1e-12);
        let set = ObservableSet::new(vec![pauli_z(), x], 1e-9).unwrap();
        let a = eigenstate_ensemble(&set, 1e-9).unwrap();
        let b = eigenstate_ensemble(&set, 1e-9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_and_mismatched_sets() {
        assert_eq!(ObservableSet::new(vec![], 1e-9), Err(Error::EmptySet));
        let r = ObservableSet::new(vec![pauli_z(), ComplexMatrix::identity(3)], 1e-9);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
        let nh = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(
            ObservableSet::new(vec![nh], 1e-9),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn qubit_mub_triple_is_z_x_y() {
        let set = mub_family(2, 3).unwrap();
        let ens = eigenstate_ensemble(&set, 1e-9).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let g = ens.groups();
        assert!(close(g[0].ket(0), &[c(1.0, 0.0), c(0.0, 0.0)]));
        assert!(close(g[1].ket(0), &[c(s, 0.0), c(s, 0.0)]));
        assert!(close(g[1].ket(1), &[c(s, 0.0), c(-s, 0.0)]));
        assert!(close(g[2].ket(0), &[c(s, 0.0), c(0.0, s)]));
        assert!(close(g[2].ket(1), &[c(s, 0.0), c(0.0, -s)]));
    }

    #[test]
    fn full_mub_sets_exhaustive_overlap() {
        for d in [2usize, 3, 5, 7] {
            let set = mub_family(d, d + 1).unwrap();
            assert!(is_mutually_unbiased(&set, 1e-9), "d = {d}");
            let ens = eigenstate_ensemble(&set, 1e-9).unwrap();
            let states: Vec<_> = ens.states().collect();
            for (x, u) in states.iter().enumerate() {
                for (y, v) in states.iter().enumerate() {
                    let ov = inner(u, v).norm_sqr();
                    if x / d != y / d {
                        assert!((ov - 1.0 / d as f64).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn mub_spectra_descending_integers() {
        let set = mub_family(3, 2).unwrap();
        for x in set.observables() {
            let es = hermitian_eigensystem(x, 1e-9).unwrap();
            for (v, expect) in es.values.iter().zip([3.0, 2.0, 1.0]) {
                assert!((v - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mub_family_errors() {
        assert_eq!(mub_family(4, 2).unwrap_err(), Error::NotPrime(4));
        assert_eq!(
            mub_family(3, 5).unwrap_err(),
            Error::TooManyBases { n: 5, d: 3, max: 4 }
        );
    }

    #[test]
    fn unbiasedness_negative_cases() {
        let zz = ObservableSet::new(vec![pauli_z(), pauli_z()], 1e-9).unwrap();
        assert!(!is_mutually_unbiased(&zz, 1e-9));
        let h = (&pauli_z() + &pauli_x()).scale_real(std::f64::consts::FRAC_1_SQRT_2);
        let zh = ObservableSet::new(vec![pauli_z(), h], 1e-9).unwrap();
        assert!(!is_mutually_unbiased(&zh, 1e-9));
        let zx = ObservableSet::new(vec![pauli_z(), pauli_x()], 1e-9).unwrap();
        assert!(is_mutually_unbiased(&zx, 1e-9));
    }

    #[test]
    fn basis_measures_itself() {
        let set = ObservableSet::new(vec![pauli_z()], 1e-9).unwrap();
        let ens = eigenstate_ensemble(&set, 1e-9).unwrap();
        let rep = participation(&ens, &OrthonormalBasis::standard(2)).unwrap();
        assert_eq!(rep.a_m, vec![1.0, 1.0]);
        assert_eq!(rep.a, 2.0);
    }

    #[test]
    fn mub_participation_in_member_basis() {
        for (n, d) in [(2usize, 2usize), (3, 2), (2, 3), (4, 3), (3, 5), (6, 5)] {
            let ens = eigenstate_ensemble(&mub_family(d, n).unwrap(), 1e-9).unwrap();
            for g in ens.groups() {
                let rep = participation(&ens, g).unwrap();
                assert!((rep.a - (n + d - 1) as f64).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn qubit_pair_participation_is_two_plus_projections() {
        let a = [0.0, 0.6, 0.8];
        let b = [1.0, 0.0, 0.0];
        let set = ObservableSet::new(
            vec![crate::qubit::bloch_to_observable(a).unwrap(), crate::qubit::bloch_to_observable(b).unwrap()],
            1e-9,
        )
        .unwrap();
        let ens = eigenstate_ensemble(&set, 1e-9).unwrap();
        let r = [0.48, 0.6, 0.64];
        let rb = crate::qubit::bloch_basis(r).unwrap();
        let rep = participation(&ens, &rb).unwrap();
        let dot = |x: [f64; 3], y: [f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
        let expect = 2.0 + dot(r, a).powi(2) + dot(r, b).powi(2);
        assert!((rep.a - expect).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_and_diagnostics() {
        let set = mub_family(3, 2).unwrap();
        let back = ObservableSet::from_json(&set.to_json(), 1e-9).unwrap();
        assert_eq!(back, set);

        let err = ObservableSet::from_json(r#"{"dim": 2, "observables": [[[[1,0],[0,0]],[[0,0]]]]}"#, 1e-9)
            .unwrap_err();
        assert!(err.to_string().contains("observables[0][1]"), "{err}");

        let err = ObservableSet::from_json(
            r#"{"dim": 2, "observables": [[[[1,0],[1,0]],[[0,0],[1,0]]]]}"#,
            1e-9,
        )
        .unwrap_err();
        assert!(err.to_string().contains("not Hermitian"), "{err}");

        let err = ObservableSet::from_json("{\"dim\": 2,\n \"observables\": [}", 1e-9).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    proptest! {
        #[test]
        fn participation_bounds_and_invariances(
            d in 2usize..6, n in 1usize..4, seed in 0u64..1000, perm_seed in 0u64..1000
        ) {
            let groups: Vec<_> = (0..n)
                .map(|k| OrthonormalBasis::from_unitary(&haar_unitary(d, seed * 7 + k as u64).unwrap()).unwrap())
                .collect();
            let ens = EigenstateEnsemble::from_bases(groups).unwrap();
            let basis = OrthonormalBasis::from_unitary(&haar_unitary(d, seed + 999).unwrap()).unwrap();
            let rep = participation(&ens, &basis).unwrap();
            for (a, b) in rep.a_m.iter().zip(&rep.b_m) {
                prop_assert!(*a >= 1.0 / d as f64 - 1e-12 && *a <= 1.0 + 1e-12);
                prop_assert!((a + b - 1.0).abs() < 1e-10);
            }
            prop_assert!((rep.a + rep.b - ens.len() as f64).abs() < 1e-10);

            // permute kets and attach phases
            let mut kets: Vec<Vec<C64>> = basis.kets().to_vec();
            kets.rotate_left((perm_seed as usize) % d);
            for (i, k) in kets.iter_mut().enumerate() {
                let ph = C64::from_polar(1.0, perm_seed as f64 * 0.37 + i as f64);
                k.iter_mut().for_each(|z| *z *= ph);
            }
            let moved = OrthonormalBasis::new(kets).unwrap();
            let rep2 = participation(&ens, &moved).unwrap();
            prop_assert!((rep.a - rep2.a).abs() < 1e-12);
        }
    }
}
