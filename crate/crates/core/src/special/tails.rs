//! Oscillatory tails and improper Bessel integrals.
//!
//! `int_v^inf cos(s - theta) s^-(beta+1) ds` is integrated on panels of
//! length `pi` up to a point `V` where the integration-by-parts expansion
//!
//! `int_V^inf e^{is} s^-p ds = i e^{iV} sum_k (-i)^k (p)_k V^(-p-k)`
//!
//! is accurate to `abs_tol`; the remainder after `K` terms is bounded by
//! `2 (p)_K V^(-p-K)`. Bessel tails use the Hankel expansion of each factor
//! and integrate the resulting `s^-q cos(omega s - theta)` terms with it.

use super::bessel::{bessel_j_reduced, hankel_coefficients};
use super::gamma::gamma;
use super::quad::{graded_breakpoints, integrate_breakpoints, uniform_breakpoints, QuadratureConfig};
use crate::error::{domain, Error, Result};
use crate::sum::Neumaier;
use std::f64::consts::{FRAC_PI_2, PI};

/// Sum of the expansion at `v` if it reaches `target` with at least
/// `min_order` terms before the terms start to grow.
fn ibp_expansion(p: f64, v: f64, theta: f64, min_order: usize, target: f64) -> Option<f64> {
    let mut sr = 0.0;
    let mut si = 0.0;
    let mut mag = v.powf(-p);
    for k in 0..400usize {
        if k >= min_order && 2.0 * mag < target {
            let phi = v - theta;
            return Some(-(phi.cos() * si + phi.sin() * sr));
        }
        match k % 4 {
            0 => sr += mag,
            1 => si -= mag,
            2 => sr -= mag,
            _ => si += mag,
        }
        let next = mag * (p + k as f64) / v;
        if next > mag && k >= min_order {
            return None;
        }
        mag = next;
    }
    None
}

/// `int_v^inf cos(s - theta) / s^(beta+1) ds` for `beta > -1`, `v > 0`.
pub fn osc_tail_cos(beta: f64, v: f64, theta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(beta > -1.0) || !beta.is_finite() {
        return domain(format!("oscillatory tail needs beta > -1, got {beta}"));
    }
    if !(v > 0.0) || !v.is_finite() || !theta.is_finite() {
        return domain(format!("oscillatory tail needs finite v > 0, got {v}"));
    }
    let p = beta + 1.0;
    let target = cfg.abs_tol;
    if let Some(val) = ibp_expansion(p, v, theta, cfg.tail_order, target) {
        return Ok(val);
    }
    let mut k = 1.0;
    let (big, tail) = loop {
        let big = v + k * PI;
        if let Some(t) = ibp_expansion(p, big, theta, cfg.tail_order, target) {
            break (big, t);
        }
        k *= 2.0;
        if k > 1e7 {
            return Err(Error::Accuracy(format!(
                "no usable tail expansion for beta={beta}, v={v}"
            )));
        }
    };
    let mut pts = if v < PI {
        graded_breakpoints(v, PI)
    } else {
        vec![v]
    };
    let start = *pts.last().unwrap();
    pts.extend(uniform_breakpoints(start, big, PI).into_iter().skip(1));
    let (body, _) = integrate_breakpoints(|s| Ok((s - theta).cos() * s.powf(-p)), &pts, cfg)?;
    Ok(body + tail)
}

/// `psi_beta(lambda, r) = |r|^beta int_{2 pi |r| lambda}^inf
/// cos(s - sign(r) (beta+1) pi/2) / s^(beta+1) ds`, `r != 0`.
pub fn psi_beta(beta: f64, lambda: f64, r: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if r == 0.0 || !r.is_finite() {
        return Err(Error::Singular(format!("psi_beta at r = {r}")));
    }
    if !(lambda > 0.0) {
        return domain(format!("psi_beta needs lambda > 0, got {lambda}"));
    }
    let theta = r.signum() * (beta + 1.0) * FRAC_PI_2;
    Ok(r.abs().powf(beta) * osc_tail_cos(beta, 2.0 * PI * r.abs() * lambda, theta, cfg)?)
}

/// Which side of the sphere a Gibbs quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Side {
    /// Inside, evaluated at radius `a - (2 + beta)/(4 lambda)`.
    Plus,
    /// Outside, evaluated at radius `a + (2 - beta)/(4 lambda)`.
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// `int_pi^inf sin(s) / (s +- beta pi/2)^(beta+1) ds` for `-1 < beta <= 0`.
pub fn gibbs_tail(beta: f64, side: Side, cfg: &QuadratureConfig) -> Result<f64> {
    if !(beta > -1.0 && beta <= 0.0) {
        return domain(format!("gibbs_tail needs -1 < beta <= 0, got {beta}"));
    }
    let shift = side.sign() * beta * FRAC_PI_2;
    osc_tail_cos(beta, PI + shift, shift + FRAC_PI_2, cfg)
}

/// `int_v^inf cos(omega s - theta) s^-q ds`, `omega >= 0`.
pub fn cos_power_tail(omega: f64, q: f64, v: f64, theta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if omega > 0.0 {
        return Ok(omega.powf(q - 1.0) * osc_tail_cos(q - 1.0, omega * v, theta, cfg)?);
    }
    if q > 1.0 {
        return Ok(theta.cos() * v.powf(1.0 - q) / (q - 1.0));
    }
    if theta.cos().abs() < 1e-14 {
        return Ok(0.0);
    }
    domain(format!("non-oscillatory tail s^-{q} diverges"))
}

fn hankel_phase(nu: f64) -> f64 {
    (0.5 * nu + 0.25) * PI
}

/// `int_V^inf J_nu(A s) s^-kappa ds` from the Hankel expansion, `n` terms.
pub fn bessel_power_tail(
    nu: f64,
    a: f64,
    kappa: f64,
    v: f64,
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let coef = hankel_coefficients(nu, n);
    let pre = (2.0 / (PI * a)).sqrt();
    let mut acc = Neumaier::new();
    for (k, &c) in coef.iter().enumerate() {
        if c == 0.0 {
            break;
        }
        let theta = hankel_phase(nu) - k as f64 * FRAC_PI_2;
        let q = kappa + 0.5 + k as f64;
        acc.add(pre * c * a.powi(-(k as i32)) * cos_power_tail(a, q, v, theta, cfg)?);
    }
    Ok(acc.value())
}

/// `int_V^inf J_nu(A s) J_mu(B s) s^-kappa ds` from the product of the two
/// Hankel expansions, keeping terms of combined order `<= n`.
#[allow(clippy::too_many_arguments)]
pub fn bessel_product_tail(
    nu: f64,
    a: f64,
    mu: f64,
    b: f64,
    kappa: f64,
    v: f64,
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let ca = hankel_coefficients(nu, n);
    let cb = hankel_coefficients(mu, n);
    let pre = 1.0 / (PI * (a * b).sqrt());
    let (pn, pm) = (hankel_phase(nu), hankel_phase(mu));
    let diff = a - b;
    let mut acc = Neumaier::new();
    for k in 0..=n {
        for l in 0..=(n - k) {
            let c = ca[k] * cb[l] * a.powi(-(k as i32)) * b.powi(-(l as i32));
            if c == 0.0 {
                continue;
            }
            let q = 1.0 + kappa + (k + l) as f64;
            let th_minus = pn - pm - (k as f64 - l as f64) * FRAC_PI_2;
            let th_plus = pn + pm - (k + l) as f64 * FRAC_PI_2;
            let slow = if diff >= 0.0 {
                cos_power_tail(diff, q, v, th_minus, cfg)?
            } else {
                cos_power_tail(-diff, q, v, -th_minus, cfg)?
            };
            let fast = cos_power_tail(a + b, q, v, th_plus, cfg)?;
            acc.add(pre * c * (slow + fast));
        }
    }
    Ok(acc.value())
}

const TAIL_TERMS: usize = 10;

/// Breakpoints on `[0, big]`: graded towards zero on the first panel, then
/// uniform of length `h`.
fn body_breakpoints(h: f64, big: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..40).rev().map(|k| h * 0.5f64.powi(k)).collect();
    pts.insert(0, 0.0);
    pts.extend(uniform_breakpoints(h, big, h).into_iter().skip(1));
    pts
}

fn split_point(orders: &[f64], min_freq: f64, h: f64) -> f64 {
    let nu2 = orders.iter().map(|n| n * n).fold(0.0, f64::max);
    let big = (60.0 + 2.0 * nu2) / min_freq;
    h * (big / h).ceil()
}

/// `int_0^inf J_nu(A s) s^-kappa ds`; needs `nu - kappa > -1` and `kappa > -1/2`.
pub fn power_integral(nu: f64, a: f64, kappa: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(nu - kappa > -1.0) || !(kappa > -0.5) || !(a > 0.0) {
        return domain(format!("power integral diverges for nu={nu}, kappa={kappa}"));
    }
    let h = PI / a;
    let big = split_point(&[nu], a, h);
    let pts = body_breakpoints(h, big);
    let scale = a.powf(nu);
    let (body, _) = integrate_breakpoints(
        |s| Ok(scale * s.powf(nu - kappa) * bessel_j_reduced(nu, a * s)?),
        &pts,
        cfg,
    )?;
    Ok(body + bessel_power_tail(nu, a, kappa, big, TAIL_TERMS, cfg)?)
}

/// `int_0^inf J_nu(A s) J_mu(B s) s^-kappa ds`; needs `nu + mu - kappa > -1`
/// and convergence at infinity.
pub fn product_integral(
    nu: f64,
    a: f64,
    mu: f64,
    b: f64,
    kappa: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(nu + mu - kappa > -1.0) || !(a > 0.0) || !(b > 0.0) {
        return domain(format!(
            "product integral diverges at 0 for nu={nu}, mu={mu}, kappa={kappa}"
        ));
    }
    if !(kappa > -1.0) {
        return domain(format!("product integral diverges at infinity for kappa={kappa}"));
    }
    let h = PI / (a + b);
    let big = split_point(&[nu, mu], a.min(b), h);
    let pts = body_breakpoints(h, big);
    let scale = a.powf(nu) * b.powf(mu);
    let (body, _) = integrate_breakpoints(
        |s| {
            Ok(scale
                * s.powf(nu + mu - kappa)
                * bessel_j_reduced(nu, a * s)?
                * bessel_j_reduced(mu, b * s)?)
        },
        &pts,
        cfg,
    )?;
    Ok(body + bessel_product_tail(nu, a, mu, b, kappa, big, TAIL_TERMS, cfg)?)
}

/// `2^beta Gamma(beta+1) a^(2 beta) int_0^inf J_mu(t s / a) J_{mu+beta+1}(s)
/// / ((t/a)^mu s^beta) ds`, which equals `(a^2 - t^2)^beta` for `t < a` and
/// `0` for `t > a`.
pub fn step_integral(mu: f64, beta: f64, a: f64, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(t > 0.0) || t == a {
        return Err(Error::Singular(format!("step integral at t = {t}, a = {a}")));
    }
    let r = t / a;
    let pre = 2f64.powf(beta) * gamma(beta + 1.0)? * a.powf(2.0 * beta) / r.powf(mu);
    Ok(pre * product_integral(mu, r, mu + beta + 1.0, 1.0, beta, cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::sine_integral;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    // brute force: Simpson on each pi-panel, then averaged partial sums
    fn brute_tail(beta: f64, v: f64, theta: f64) -> f64 {
        let panel = |a: f64, b: f64| {
            let n = 2000;
            let h = (b - a) / n as f64;
            let f = |s: f64| (s - theta).cos() * s.powf(-beta - 1.0);
            let mut acc = f(a) + f(b);
            for i in 1..n {
                acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
            }
            acc * h / 3.0
        };
        // start the alternating panels at a zero of the cosine
        let z0 = theta + FRAC_PI_2 + PI * ((v - theta - FRAC_PI_2) / PI).ceil();
        let head = panel(v, z0);
        let mut partial = vec![];
        let mut acc = 0.0;
        for k in 0..4000 {
            let a = z0 + k as f64 * PI;
            acc += panel(a, a + PI);
            partial.push(acc);
        }
        // repeated averaging of the last partial sums
        let mut s: Vec<f64> = partial[partial.len() - 12..].to_vec();
        while s.len() > 1 {
            s = s.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        }
        head + s[0]
    }

    #[test]
    fn tail_matches_brute_force() {
        for &(beta, v, theta) in &[(0.0, 10.0, 0.3), (-0.5, 2.0, 1.0), (0.5, 0.3, -2.0), (1.0, 50.0, 0.0)] {
            let got = osc_tail_cos(beta, v, theta, &cfg()).unwrap();
            let want = brute_tail(beta, v, theta);
            assert!((got - want).abs() < 1e-9, "beta={beta} v={v}: {got} vs {want}");
        }
    }

    #[test]
    fn sine_tail_via_si() {
        // int_v^inf sin(s)/s ds = pi/2 - Si(v)
        for &v in &[0.5, 3.0, 17.0, 400.0] {
            let got = osc_tail_cos(0.0, v, FRAC_PI_2, &cfg()).unwrap();
            let want = FRAC_PI_2 - sine_integral(v).unwrap();
            assert!((got - want).abs() < 1e-12, "v={v}");
        }
    }

    #[test]
    fn gibbs_tail_zero_beta() {
        let got = gibbs_tail(0.0, Side::Plus, &cfg()).unwrap();
        let want = FRAC_PI_2 - sine_integral(PI).unwrap();
        assert!((got - want).abs() < 1e-12);
        assert!((got - gibbs_tail(0.0, Side::Minus, &cfg()).unwrap()).abs() < 1e-15);
        assert!(gibbs_tail(0.2, Side::Plus, &cfg()).is_err());
    }

    #[test]
    fn psi_sign_and_scaling() {
        // beta = 0 flips the phase by pi, so psi(-r) = -psi(r)
        let c = cfg();
        let p = psi_beta(0.0, 10.0, 0.3, &c).unwrap();
        let m = psi_beta(0.0, 10.0, -0.3, &c).unwrap();
        assert!((p + m).abs() < 1e-13);
        assert!(psi_beta(0.0, 10.0, 0.0, &c).is_err());
    }

    #[test]
    fn weighted_integral_half_order() {
        // int_0^inf J_{1/2}(s) / s^{1/2} ds = sqrt(2/pi) int_0^inf sin(s)/s ds
        let got = power_integral(0.5, 1.0, 0.5, &cfg()).unwrap();
        assert!((got - (2.0 / PI).sqrt() * FRAC_PI_2).abs() < 1e-10);
    }
}
