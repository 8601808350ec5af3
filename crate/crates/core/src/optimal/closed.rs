//! Closed-form optimal cloner parameters and the incompatibility bounds.

use serde::{Deserialize, Serialize};

use crate::qcm::{fidelity_from_participation, params_from_q, universal_params, CloneParams};
use crate::{Error, Result};

/// `|M - 2 A_opt|` below which `G` is treated as infinite.
pub const G_SINGULAR_TOL: f64 = 1e-12;

/// `G = 4(A - M) / ((M - 2A) sqrt(2(d-1)))`.
///
/// Returns a signed infinity when `M = 2A` to within [`G_SINGULAR_TOL`];
/// the sign follows the numerator with the denominator taken as `+0`.
pub fn g_function(a_opt: f64, m: usize, d: usize) -> f64 {
    let m = m as f64;
    let num = 4.0 * (a_opt - m);
    let den = (m - 2.0 * a_opt) * (2.0 * (d as f64 - 1.0)).sqrt();
    if (m - 2.0 * a_opt).abs() < G_SINGULAR_TOL {
        f64::INFINITY.copysign(num)
    } else {
        num / den
    }
}

fn signum0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Stationary point of the average fidelity over the full range
/// `0 <= q <= 1/sqrt(2(d-1))`, before the regime restriction:
///
/// `q = 1/(2 sqrt(d-1)) * sqrt(1 - sgn(A/M - 1/2) / sqrt(1 + G^2))`.
pub fn q_unconstrained(a_opt: f64, m: usize, d: usize) -> f64 {
    let half_scale = 1.0 / (2.0 * (d as f64 - 1.0).sqrt());
    let ratio = a_opt / m as f64;
    if (ratio - 0.5).abs() < G_SINGULAR_TOL {
        return half_scale;
    }
    let g = g_function(a_opt, m, d);
    let damp = if g.is_infinite() {
        0.0
    } else {
        1.0 / (1.0 + g * g).sqrt()
    };
    half_scale * (1.0 - signum0(ratio - 0.5) * damp).max(0.0).sqrt()
}

/// Optimal parameters together with how they were reached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QOptimum {
    pub params: CloneParams,
    /// The stationary point before clamping.
    pub q_stationary: f64,
    /// True when the stationary point lay outside `[0, 1/sqrt(2(d+1))]`.
    pub clamped: bool,
}

/// Optimal `(p, q)` for a normalised participation `A_opt / M`, restricted
/// to the closed regime `q <= 1/sqrt(2(d+1))`.
pub fn q_optimal_detail(a_opt: f64, m: usize, d: usize) -> Result<QOptimum> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if m == 0 {
        return Err(Error::EmptySet);
    }
    let q_star = q_unconstrained(a_opt, m, d);
    let q_b = CloneParams::q_regime(d);
    // boundary hits (full MUB sets, A/M = 1/2 at d = 3) can land an ulp outside
    if q_star <= q_b * (1.0 + 1e-13) {
        return Ok(QOptimum {
            params: params_from_q(d, q_star.min(q_b))?,
            q_stationary: q_star,
            clamped: false,
        });
    }
    // the fidelity is unimodal in q, so the best admissible point is an
    // endpoint of the regime interval
    let ratio = a_opt / m as f64;
    let at_b = params_from_q(d, q_b)?;
    let at_0 = params_from_q(d, 0.0)?;
    let params = if fidelity_from_participation(ratio, &at_b)
        >= fidelity_from_participation(ratio, &at_0)
    {
        at_b
    } else {
        at_0
    };
    log::debug!(
        "stationary q = {q_star} outside regime [0, {q_b}] for A/M = {ratio}, d = {d}; clamped to {}",
        params.q
    );
    Ok(QOptimum {
        params,
        q_stationary: q_star,
        clamped: true,
    })
}

pub fn q_optimal(a_opt: f64, m: usize, d: usize) -> Result<CloneParams> {
    q_optimal_detail(a_opt, m, d).map(|o| o.params)
}

/// Closed-form optimum for `N` mutually unbiased bases in dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MubOptimum {
    pub n: usize,
    pub d: usize,
    /// `N + d - 1`
    pub a_opt: f64,
    pub params: CloneParams,
    pub f_opt: f64,
}

impl MubOptimum {
    pub fn q_opt(&self) -> f64 {
        self.params.q
    }

    pub fn q_c(&self) -> f64 {
        1.0 - self.f_opt
    }
}

pub fn fopt_mub(n: usize, d: usize) -> Result<MubOptimum> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if n == 0 {
        return Err(Error::EmptySet);
    }
    if n > d + 1 {
        return Err(Error::TooManyBases { n, d, max: d + 1 });
    }
    let m = n * d;
    let a_opt = (n + d - 1) as f64;
    let params = q_optimal(a_opt, m, d)?;
    let f_opt = fidelity_from_participation(a_opt / m as f64, &params);
    Ok(MubOptimum {
        n,
        d,
        a_opt,
        params,
        f_opt,
    })
}

/// Upper bound on `Q_c` for any `N` observables in dimension `d`: the MUB
/// value for `N <= d+1`, the universal-cloner value `(d-1)/(2(d+1))` above.
pub fn qc_upper_bound(n: usize, d: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptySet);
    }
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if n <= d + 1 {
        Ok(fopt_mub(n, d)?.q_c())
    } else {
        Ok(1.0 - universal_params(d)?.fidelity)
    }
}

/// Measure-and-reconstruct quantities for `N` MUBs: the projective
/// fidelity `(N+d-1)/(Nd)` and the bound `(1 - 1/N)(1 - 1/d)` on `Q`.
pub fn mr_fidelity_bounds(n: usize, d: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::EmptySet);
    }
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let (nf, df) = (n as f64, d as f64);
    Ok(((nf + df - 1.0) / (nf * df), (1.0 - 1.0 / nf) * (1.0 - 1.0 / df)))
}
