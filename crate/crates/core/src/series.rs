//! Spherical partial sums `S_lambda(u)(x) = sum_{|m| < lambda} u^(m) e^{2 pi i m.x}`
//! and the decomposition of `S_lambda - u` into the terms of the
//! generalized Hardy identity.

use crate::error::{domain, Error, Result};
use crate::inversion::u_d_lambda;
use crate::lattice::shells::{build_shell_table, last_shell_below, ShellMode, ShellWeights};
use crate::lattice::{g_term_with, k_term, G_MAX_POINTS, G_TOL, POINT_BUDGET};
use crate::radial::{
    classify_point, coefficient_a, l_constant, periodization_u, profile_phi, RadialParams, TorusPoint, EPS_CLASSIFY,
};
use crate::special::QuadratureConfig;
use crate::sum::Neumaier;
use rayon::prelude::*;
use std::f64::consts::PI;

/// `u^(m) = A(|m|^2)`.
pub fn fourier_coefficient(p: &RadialParams, m: &[i64]) -> Result<f64> {
    if m.len() != p.d {
        return domain("lattice vector dimension does not match the profile");
    }
    let n: f64 = m.iter().map(|&k| (k as f64) * (k as f64)).sum();
    coefficient_a(p, 0, n)
}

/// `A(n)` for `0 <= n <= top`, evaluated in parallel and returned in order.
pub fn shell_coefficients(p: &RadialParams, top: u64) -> Result<Vec<f64>> {
    (0..=top).into_par_iter().map(|n| coefficient_a(p, 0, n as f64)).collect()
}

fn check(p: &RadialParams, x: &TorusPoint, lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("partial sum needs lambda > 0, got {lambda}"));
    }
    if x.dim() != p.d {
        return domain("point dimension does not match the profile");
    }
    Ok(())
}

/// `S_lambda(u)(x)` by enumerating every `m` with `|m| < lambda`.
pub fn partial_sum_direct(p: &RadialParams, x: &TorusPoint, lambda: f64) -> Result<f64> {
    check(p, x, lambda)?;
    let s = lambda * lambda;
    let Some(top) = last_shell_below(s) else {
        return Ok(0.0);
    };
    let side = 2.0 * lambda.ceil() + 1.0;
    if side.powi(p.d as i32) > POINT_BUDGET as f64 {
        return Err(Error::Resource(format!("(2 lambda)^d = {:.3e} exceeds the point budget", side.powi(p.d as i32))));
    }
    let coef = shell_coefficients(p, top)?;
    let r = (top as f64).sqrt() as i64;
    let mut acc = Neumaier::new();
    crate::radial::for_each_in_box(&vec![-r; p.d], &vec![r; p.d], |m| {
        let n: i64 = m.iter().map(|k| k * k).sum();
        if n as u64 <= top {
            let phase: f64 = m.iter().zip(x.coords()).map(|(&k, &c)| k as f64 * c).sum();
            acc.add(coef[n as usize] * (2.0 * PI * phase).cos());
        }
    });
    Ok(acc.value())
}

/// `S_lambda(u)(x) = sum_{n < lambda^2} A(n) E(n, x)` with weights built under `mode`.
pub fn partial_sum_shells(p: &RadialParams, x: &TorusPoint, lambda: f64, mode: ShellMode) -> Result<f64> {
    check(p, x, lambda)?;
    let Some(top) = last_shell_below(lambda * lambda) else {
        return Ok(0.0);
    };
    let w = ShellWeights::build(x.coords(), top, mode)?;
    let coef = shell_coefficients(p, top)?;
    Ok(shell_sum(&coef, &w.values, top))
}

fn shell_sum(coef: &[f64], weights: &[f64], top: u64) -> f64 {
    let mut acc = Neumaier::new();
    for n in 0..=top as usize {
        if weights[n] != 0.0 {
            acc.add(coef[n] * weights[n]);
        }
    }
    acc.value()
}

/// `S_lambda(u)(x)` through the cheapest applicable shell mode.
pub fn partial_sum(p: &RadialParams, x: &TorusPoint, lambda: f64) -> Result<f64> {
    partial_sum_shells(p, x, lambda, ShellMode::detect(x.coords()))
}

/// `S_lambda(u)(x)` at several points, sharing the coefficients.
pub fn partial_sum_points(p: &RadialParams, xs: &[TorusPoint], lambda: f64) -> Result<Vec<f64>> {
    if let Some(x) = xs.first() {
        check(p, x, lambda)?;
    }
    let Some(top) = last_shell_below(lambda * lambda) else {
        return Ok(vec![0.0; xs.len()]);
    };
    let coef = shell_coefficients(p, top)?;
    xs.par_iter()
        .map(|x| {
            if x.dim() != p.d {
                return domain("point dimension does not match the profile");
            }
            let w = ShellWeights::build(x.coords(), top, ShellMode::detect(x.coords()))?;
            Ok(shell_sum(&coef, &w.values, top))
        })
        .collect()
}

/// `S_lambda(u)(x)` at several radii from one set of weights.
pub fn partial_sums(p: &RadialParams, x: &TorusPoint, lambdas: &[f64]) -> Result<Vec<f64>> {
    let Some(max) = lambdas.iter().cloned().reduce(f64::max) else {
        return Ok(vec![]);
    };
    check(p, x, max)?;
    if lambdas.iter().any(|&l| !(l > 0.0)) {
        return domain("partial sums need lambda > 0");
    }
    let Some(top) = last_shell_below(max * max) else {
        return Ok(vec![0.0; lambdas.len()]);
    };
    let w = ShellWeights::build(x.coords(), top, ShellMode::detect(x.coords()))?;
    let coef = shell_coefficients(p, top)?;
    let cum: Vec<f64> = {
        let mut acc = Neumaier::new();
        (0..=top as usize)
            .map(|n| {
                acc.add(coef[n] * w.values[n]);
                acc.value()
            })
            .collect()
    };
    Ok(lambdas
        .iter()
        .map(|&l| last_shell_below(l * l).map_or(0.0, |k| cum[k as usize]))
        .collect())
}

/// The terms of `S = u + (sigma - U) + G + r~ L lambda^-beta + K + residual`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct HardyDecomposition {
    pub u_val: f64,
    pub inversion_gap: f64,
    pub g_term: f64,
    pub l_term: f64,
    pub k_term: f64,
    pub s_lambda: f64,
    pub residual: f64,
    /// Truncation bound on `g_term`.
    pub g_bound: f64,
}

/// [`hardy_decomposition_with`] at the default `G` tolerance and budget.
pub fn hardy_decomposition(p: &RadialParams, x: &TorusPoint, lambda: f64) -> Result<HardyDecomposition> {
    hardy_decomposition_with(p, x, lambda, G_TOL, G_MAX_POINTS)
}

/// Each term of the identity from its own module; `S_lambda` through the shell weights.
pub fn hardy_decomposition_with(
    p: &RadialParams,
    x: &TorusPoint,
    lambda: f64,
    g_tol: f64,
    g_points: u64,
) -> Result<HardyDecomposition> {
    check(p, x, lambda)?;
    let cls = classify_point(p, x)?;
    if p.beta <= 0.0 && cls.r_count > 0 {
        return Err(Error::Singular(format!("x is on the sphere set and beta = {} <= 0", p.beta)));
    }
    let cfg = QuadratureConfig::default();
    let u_val = periodization_u(p, x)?;
    let t = x.norm();
    let big_u = profile_phi(p, t)?;
    let sigma = u_d_lambda(p, t, lambda, &cfg)?.value;
    let g = g_term_with(p, lambda, x, g_tol, g_points, &cfg)?;
    let l_term = cls.r_tilde as f64 * l_constant(p)? * lambda.powf(-p.beta);
    let k = k_term(p, lambda, x)?;
    let s_lambda = partial_sum(p, x, lambda)?;
    let inversion_gap = sigma - big_u;
    let residual = s_lambda - (u_val + inversion_gap + g.value + l_term + k);
    Ok(HardyDecomposition { u_val, inversion_gap, g_term: g.value, l_term, k_term: k, s_lambda, residual, g_bound: g.bound })
}

fn circle_rhs(a: f64) -> f64 {
    let a2 = a * a;
    let tol = EPS_CLASSIFY * a2.max(1.0);
    let r = a.ceil() as i64;
    let (mut inside, mut on) = (0u64, 0u64);
    crate::radial::for_each_in_box(&[-r, -r], &[r, r], |m| {
        let n = (m[0] * m[0] + m[1] * m[1]) as f64;
        if (n - a2).abs() < tol {
            on += 1;
        } else if n < a2 {
            inside += 1;
        }
    });
    inside as f64 + 0.5 * on as f64
}

/// `pi a^2 + a sum_{0 < |m| < lambda} J_1(2 pi a |m|)/|m|` and
/// `#{|m| < a} + #{|m| = a}/2`.
pub fn hardy_circle_sum(a: f64, lambda: f64) -> Result<(f64, f64)> {
    let p = RadialParams::new(2, 0.0, a)?;
    if !(lambda > 0.0) {
        return domain(format!("need lambda > 0, got {lambda}"));
    }
    let rhs = circle_rhs(a);
    let Some(top) = last_shell_below(lambda * lambda) else {
        return Ok((0.0, rhs));
    };
    let table = build_shell_table(2, top)?;
    let coef = shell_coefficients(&p, top)?;
    let w: Vec<f64> = table.counts.iter().map(|&c| c as f64).collect();
    Ok((shell_sum(&coef, &w, top), rhs))
}

/// Mean of the left side of [`hardy_circle_sum`] over `lambda` in `[lo, hi]`,
/// integrated exactly since it is constant on each `(sqrt(n), sqrt(n+1)]`.
pub fn hardy_circle_window_mean(a: f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
    if !(lo > 0.0 && hi > lo) {
        return domain(format!("need 0 < lo < hi, got [{lo}, {hi}]"));
    }
    let p = RadialParams::new(2, 0.0, a)?;
    let top = last_shell_below(hi * hi).unwrap_or(0);
    let table = build_shell_table(2, top)?;
    let coef = shell_coefficients(&p, top)?;
    let mut value = Neumaier::new();
    let mut integral = Neumaier::new();
    for n in 0..=top {
        value.add(coef[n as usize] * table.counts[n as usize] as f64);
        // shells 0..=n are included for lambda in (sqrt(n), sqrt(n+1)]
        let (l0, l1) = ((n as f64).sqrt().max(lo), ((n + 1) as f64).sqrt().min(hi));
        if l1 > l0 {
            integral.add(value.value() * (l1 - l0));
        }
    }
    Ok((integral.value() / (hi - lo), circle_rhs(a)))
}

/// `#{m : |x+m| < a} + #{m : |x+m| = a}/2`, the limit of `S_lambda(u)(x)` for `d = 2`, `beta = 0`.
pub fn pointwise_limit_expected(p: &RadialParams, x: &TorusPoint) -> Result<f64> {
    if p.d != 2 || p.beta != 0.0 {
        return domain("the counting limit is for d = 2 and beta = 0");
    }
    if x.dim() != 2 {
        return domain("point dimension must be 2");
    }
    let on = classify_point(p, x)?.r_count;
    let a2 = p.a * p.a;
    let tol = EPS_CLASSIFY * a2.max(1.0);
    let r = (p.a + 1.0).ceil() as i64;
    let mut close = 0usize;
    crate::radial::for_each_in_box(&[-r, -r], &[r, r], |m| {
        let s: f64 = x.coords().iter().zip(m).map(|(c, &k)| (c + k as f64).powi(2)).sum();
        if s < a2 + tol {
            close += 1;
        }
    });
    Ok((close - on) as f64 + 0.5 * on as f64)
}
