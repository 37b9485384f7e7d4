//! The `K` and `G` correction terms of the generalized Hardy identity.

use super::discrepancy::{cal_d_alpha, d_alpha_many, POINT_BUDGET};
use crate::error::{domain, Result};
use crate::radial::{coefficient_a, d_sharp, for_each_in_box, RadialParams, TorusPoint, EPS_CLASSIFY};
use crate::special::quad::QuadratureConfig;
use crate::special::{gamma, tails::psi_beta};
use crate::sum::Neumaier;
use std::f64::consts::PI;

/// `K(lambda^2:x) = sum_{j=0}^{d#} (-1)^j Delta_j(lambda^2:x) A^(j)(lambda^2)`.
pub fn k_term(p: &RadialParams, lambda: f64, x: &TorusPoint) -> Result<f64> {
    if !(lambda > 0.0) {
        return domain(format!("K needs lambda > 0, got {lambda}"));
    }
    if x.dim() != p.d {
        return domain("point dimension does not match the profile");
    }
    let s = lambda * lambda;
    let ds = d_sharp(p.d);
    let alphas: Vec<f64> = (0..=ds).map(|j| j as f64).collect();
    let lattice = d_alpha_many(&alphas, s, x, POINT_BUDGET)?;
    let mut acc = Neumaier::new();
    for j in 0..=ds {
        let delta = lattice[j] - cal_d_alpha(j as f64, s, x.coords())?;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(sign * delta * coefficient_a(p, j, s)?);
    }
    Ok(acc.value())
}

/// Truncated `G` with its remainder bound.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GTermResult {
    pub value: f64,
    /// Shifts with `|m|_inf <= m_cut` were summed.
    pub m_cut: u64,
    /// Bound on the absolute truncation error.
    pub bound: f64,
    /// Whether `bound` reached the requested tolerance within the budget.
    pub converged: bool,
}

/// Default truncation tolerance for [`g_term`].
pub const G_TOL: f64 = 1e-9;
/// Default cap on shifts summed by [`g_term`].
pub const G_MAX_POINTS: u64 = 20_000_000;

/// `G(lambda:x) = -(Gamma(beta+1)(2a)^beta/pi) sum_{m != 0} (a/R)^p psi_beta(lambda, a - R)`
/// with `R = |x - m|` and `p = (d+1)/2 + d#`. Shifts with `R = a` are left out.
///
/// The sign and the signed argument `a - R` are those for which
/// `S = u + (sigma - U) + G + K + ...` holds; for `beta = 0` this is the same
/// as `+ sum psi_0(lambda, |a - R|)`.
pub fn g_term(p: &RadialParams, lambda: f64, x: &TorusPoint) -> Result<GTermResult> {
    g_term_with(p, lambda, x, G_TOL, G_MAX_POINTS, &QuadratureConfig::default())
}

/// [`g_term`] with explicit tolerance, shift budget and quadrature settings.
///
/// The cube `|m|_inf <= M` starts at `M = 10` and doubles until the tail
/// bound `sum_{|m|_inf > M} C (a/R)^p 2 (2 pi lambda)^(-beta-1) / |a - R|`
/// drops below `tol` or the cube would exceed `max_points`.
pub fn g_term_with(
    p: &RadialParams,
    lambda: f64,
    x: &TorusPoint,
    tol: f64,
    max_points: u64,
    cfg: &QuadratureConfig,
) -> Result<GTermResult> {
    if !(lambda > 0.0) {
        return domain(format!("G needs lambda > 0, got {lambda}"));
    }
    if x.dim() != p.d {
        return domain("point dimension does not match the profile");
    }
    let d = p.d;
    let (a, beta) = (p.a, p.beta);
    let pw = 0.5 * (d as f64 + 1.0) + d_sharp(d) as f64;
    let c = gamma(beta + 1.0)? * (2.0 * a).powf(beta) / PI;
    let skip = EPS_CLASSIFY * a.max(1.0);
    let e = d as f64 - 2.0 - pw;
    let tail_bound = |m: u64| -> f64 {
        let mm = m as f64 - 0.5;
        if mm <= a {
            return f64::INFINITY;
        }
        c * 2.0 * (2.0 * PI * lambda).powf(-beta - 1.0)
            * 2.0
            * d as f64
            * (10.0f64 / 3.0).powi(d as i32 - 1)
            * a.powf(pw)
            / (1.0 - a / mm)
            * mm.powf(e + 1.0)
            / (-e - 1.0)
    };
    let cube = |m: u64| (2 * m + 1) as f64;
    let xs = x.coords();
    let mut acc = Neumaier::new();
    let mut err: Option<crate::Error> = None;
    let mut done: u64 = 0;
    let mut m_cut: u64 = 10;
    loop {
        let mi = m_cut as i64;
        for_each_in_box(&vec![-mi; d], &vec![mi; d], |m| {
            if err.is_some() {
                return;
            }
            if done > 0 && m.iter().all(|k| k.unsigned_abs() <= done) {
                return;
            }
            if m.iter().all(|&k| k == 0) {
                return;
            }
            let r = xs.iter().zip(m).map(|(xi, &mi)| (xi - mi as f64).powi(2)).sum::<f64>().sqrt();
            if (r - a).abs() <= skip {
                return;
            }
            match psi_beta(beta, lambda, a - r, cfg) {
                Ok(v) => acc.add((a / r).powf(pw) * v),
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        done = m_cut;
        let bound = tail_bound(m_cut);
        if bound <= tol {
            return Ok(GTermResult { value: -c * acc.value(), m_cut, bound, converged: true });
        }
        if cube(2 * m_cut).powi(d as i32) > max_points as f64 {
            return Ok(GTermResult { value: -c * acc.value(), m_cut, bound, converged: false });
        }
        m_cut *= 2;
    }
}
