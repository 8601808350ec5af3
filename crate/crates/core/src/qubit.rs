//! Closed-form optimal cloner for a pair of qubit observables.
//!
//! A qubit observable `alpha_1 I + alpha_2 a.sigma` has eigenprojectors
//! `(I +- a.sigma)/2`, so only the unit Bloch vector `a` matters. For a
//! cloning basis with Bloch vector `r` the participation of the pair is
//! `A(r) = 2 + (r.a)^2 + (r.b)^2`, maximised by `r` along `a + b` or
//! `a - b`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::ensembles::ObservableSet;
use crate::optimal::q_optimal;
use crate::qcm::fidelity_from_participation;
use crate::qmath::{ComplexMatrix, OrthonormalBasis};
use crate::{Error, Result, DEFAULT_TOL};

pub type Bloch = [f64; 3];

/// Tolerance on `|v| = 1` for Bloch vectors.
pub const BLOCH_UNIT_TOL: f64 = 1e-12;

fn dot(x: Bloch, y: Bloch) -> f64 {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

fn vnorm(x: Bloch) -> f64 {
    dot(x, x).sqrt()
}

fn scaled(x: Bloch, s: f64) -> Bloch {
    [x[0] * s, x[1] * s, x[2] * s]
}

fn add(x: Bloch, y: Bloch, sign: f64) -> Bloch {
    [x[0] + sign * y[0], x[1] + sign * y[1], x[2] + sign * y[2]]
}

fn require_bloch(v: Bloch) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = vnorm(v);
    if (n - 1.0).abs() > BLOCH_UNIT_TOL {
        return Err(Error::NotUnit { norm: n });
    }
    Ok(())
}

/// `v.sigma` for a unit Bloch vector.
pub fn bloch_to_observable(v: Bloch) -> Result<ComplexMatrix> {
    require_bloch(v)?;
    let [x, y, z] = v;
    ComplexMatrix::from_rows(&[
        vec![C64::new(z, 0.0), C64::new(x, -y)],
        vec![C64::new(x, y), C64::new(-z, 0.0)],
    ])
}

/// Eigenbasis `{|v+>, |v->}` of `v.sigma`, with real first components.
pub fn bloch_basis(v: Bloch) -> Result<OrthonormalBasis> {
    require_bloch(v)?;
    let theta = v[2].clamp(-1.0, 1.0).acos();
    let phi = v[1].atan2(v[0]);
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = C64::from_polar(1.0, phi);
    let plus = vec![C64::new(c, 0.0), e * s];
    let minus = vec![C64::new(s, 0.0), -e * c];
    OrthonormalBasis::new(vec![plus, minus])
}

/// Bloch vectors of two qubit observables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochPair {
    a: Bloch,
    b: Bloch,
}

impl BlochPair {
    pub fn new(a: Bloch, b: Bloch) -> Result<Self> {
        require_bloch(a)?;
        require_bloch(b)?;
        Ok(Self { a, b })
    }

    /// Pair for `alpha[0] I + alpha[1] a.sigma` and `beta[0] I + beta[1]
    /// b.sigma`. The affine coefficients do not change the eigenprojectors
    /// and are dropped once checked.
    pub fn from_affine(alpha: [f64; 2], a: Bloch, beta: [f64; 2], b: Bloch) -> Result<Self> {
        if alpha[1] == 0.0 || beta[1] == 0.0 {
            return Err(Error::InvalidInput(
                "alpha_2 and beta_2 must be nonzero".into(),
            ));
        }
        if alpha.iter().chain(&beta).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Self::new(a, b)
    }

    pub fn a(&self) -> Bloch {
        self.a
    }

    pub fn b(&self) -> Bloch {
        self.b
    }

    /// `a.b` clamped to `[-1, 1]`.
    pub fn overlap(&self) -> f64 {
        dot(self.a, self.b).clamp(-1.0, 1.0)
    }

    /// Angle between the Bloch vectors.
    pub fn gamma(&self) -> f64 {
        self.overlap().acos()
    }

    pub fn observables(&self) -> Result<ObservableSet> {
        ObservableSet::new(
            vec![bloch_to_observable(self.a)?, bloch_to_observable(self.b)?],
            DEFAULT_TOL,
        )
    }

    /// `A(r) = 2 + (r.a)^2 + (r.b)^2` for the cloning basis of `r.sigma`.
    pub fn participation_at(&self, r: Bloch) -> f64 {
        2.0 + dot(r, self.a).powi(2) + dot(r, self.b).powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitCloneSolution {
    pub a_opt: f64,
    pub q_opt: f64,
    pub p_opt: f64,
    pub g: f64,
    /// `(a + b)/|a + b|`; absent when `b = -a`.
    pub r_plus: Option<Bloch>,
    /// `(a - b)/|a - b|`; absent when `b = a`.
    pub r_minus: Option<Bloch>,
    /// Bloch vector of an optimal cloning basis.
    pub r_opt: Bloch,
    /// Set when `a.b = 0`: every direction in the plane of `a` and `b` is
    /// optimal and `r_+-` are just representatives.
    pub degenerate_direction: bool,
    pub f_opt: f64,
    pub q_c: f64,
}

fn unit_or_none(v: Bloch) -> Option<Bloch> {
    let n = vnorm(v);
    (n > 1e-12).then(|| scaled(v, 1.0 / n))
}

pub fn qubit_optimal_cloner(pair: &BlochPair) -> QubitCloneSolution {
    let c = pair.overlap().abs();
    let a_opt = 3.0 + c;
    let g = 2f64.sqrt() * (1.0 - c) / (1.0 + c);
    let q_opt = 0.5 * (1.0 - 1.0 / (1.0 + g * g).sqrt()).max(0.0).sqrt();
    let p_opt = (1.0 - 2.0 * q_opt * q_opt).sqrt();

    let r_plus = unit_or_none(add(pair.a, pair.b, 1.0));
    let r_minus = unit_or_none(add(pair.a, pair.b, -1.0));
    // a + b and a - b cannot both vanish for unit a
    let r_opt = if pair.overlap() >= 0.0 {
        r_plus.unwrap_or(pair.a)
    } else {
        r_minus.unwrap_or(pair.a)
    };

    let params = crate::qcm::CloneParams {
        dim: 2,
        p: p_opt,
        q: q_opt,
    };
    let f_opt = fidelity_from_participation(a_opt / 4.0, &params);
    QubitCloneSolution {
        a_opt,
        q_opt,
        p_opt,
        g,
        r_plus,
        r_minus,
        r_opt,
        degenerate_direction: pair.overlap().abs() < 1e-12,
        f_opt,
        q_c: (1.0 - f_opt).max(0.0),
    }
}

/// Same optimum through the general `q_optimal` rule, used as a check.
pub fn qubit_optimal_via_general(pair: &BlochPair) -> Result<(f64, f64)> {
    let a_opt = 3.0 + pair.overlap().abs();
    let params = q_optimal(a_opt, 4, 2)?;
    Ok((params.q, fidelity_from_participation(a_opt / 4.0, &params)))
}

/// One row of the in-plane participation profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub theta: f64,
    pub a: f64,
}

/// `A` for the cloning bases `r(theta) = cos(theta) a + sin(theta) e`,
/// `theta in [0, pi)`, where `e` completes `a` to an orthonormal frame of
/// the plane containing `b`.
pub fn qubit_a_profile(pair: &BlochPair, theta_grid: usize) -> Result<Vec<ProfilePoint>> {
    if theta_grid < 2 {
        return Err(Error::InvalidInput("theta grid needs at least 2 points".into()));
    }
    let a = pair.a;
    let perp = add(pair.b, scaled(a, pair.overlap()), -1.0);
    let e = unit_or_none(perp).unwrap_or_else(|| any_perpendicular(a));
    Ok((0..theta_grid)
        .map(|k| {
            let theta = std::f64::consts::PI * k as f64 / theta_grid as f64;
            let r = add(scaled(a, theta.cos()), scaled(e, theta.sin()), 1.0);
            ProfilePoint {
                theta,
                a: pair.participation_at(r),
            }
        })
        .collect())
}

fn any_perpendicular(a: Bloch) -> Bloch {
    // cross with the axis least aligned to a
    let axis = if a[0].abs() <= a[1].abs() && a[0].abs() <= a[2].abs() {
        [1.0, 0.0, 0.0]
    } else if a[1].abs() <= a[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let c = [
        a[1] * axis[2] - a[2] * axis[1],
        a[2] * axis[0] - a[0] * axis[2],
        a[0] * axis[1] - a[1] * axis[0],
    ];
    scaled(c, 1.0 / vnorm(c))
}

/// Grid point with the largest `A`; the first one on ties.
pub fn profile_argmax(profile: &[ProfilePoint]) -> Option<ProfilePoint> {
    profile.iter().copied().fold(None, |best, p| match best {
        Some(b) if b.a >= p.a => Some(b),
        _ => Some(p),
    })
}
