//! The truncated Euclidean inversion `sigma_lambda(U)(x) = U^[d](|x|)`,
//!
//! `U^[d](t) = 2^beta Gamma(beta+1) a^(2 beta) int_0^(2 pi a lambda)
//! J_{d/2-1}(t s / a) J_{d/2+beta}(s) / ((t/a)^(d/2-1) s^beta) ds`.
//!
//! For `d >= 3` the integral reduces to the `d = 1` or `d = 2` integral with
//! the same `beta` plus the boundary sum [`pinsky_correction`].

use crate::error::{domain, Result};
use crate::radial::{d_sharp, pinsky_constant, RadialParams};
use crate::special::quad::integrate_breakpoints;
use crate::special::{bessel_j, bessel_j_reduced, gamma, mcmahon_zero, QuadratureConfig};
use crate::sum::Neumaier;
use std::f64::consts::PI;

/// How an [`InversionResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Method {
    /// Panels between zeros of the faster Bessel factor.
    Quadrature,
    /// The `d = 1` or `d = 2` integral plus the Pinsky correction.
    ReducedBase,
    /// `d = 2`, `t = 0`: `a^(2 beta) (1 - Gamma(beta+1) J_beta(2 pi a lambda) / (pi a lambda)^beta)`.
    ClosedFormD2,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct InversionResult {
    pub value: f64,
    pub method: Method,
    pub est_error: f64,
}

fn check(p: &RadialParams, t: f64, lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("inversion needs lambda > 0, got {lambda}"));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!("inversion needs t >= 0, got {t}"));
    }
    let _ = p;
    Ok(())
}

/// Breakpoints at the approximate zeros of `J_nu(omega s)` on `[0, end]`.
fn zero_panels(nu: f64, omega: f64, end: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    let spacing = PI / omega;
    let mut k = 1;
    loop {
        let z = mcmahon_zero(nu.abs(), k) / omega;
        k += 1;
        if z >= end {
            break;
        }
        let last = *pts.last().unwrap();
        if z > last + 0.25 * spacing {
            // the first McMahon values can be far off for larger orders
            while z - *pts.last().unwrap() > 1.5 * spacing {
                let next = *pts.last().unwrap() + spacing;
                pts.push(next);
            }
            pts.push(z);
        }
    }
    if end > *pts.last().unwrap() {
        pts.push(end);
    }
    pts
}

/// The Bessel integral of `U^[dim]` (without the prefactor) for profile
/// exponent `beta`, in reduced form
/// `s^(dim-1) J_{dim/2+beta}(s)/s^(dim/2+beta) J_{dim/2-1}(tau s)/(tau s)^(dim/2-1)`.
fn bessel_integral(dim: usize, beta: f64, tau: f64, end: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let h = 0.5 * dim as f64;
    let (nu, mu) = (h + beta, h - 1.0);
    let pts = if tau > 1.0 { zero_panels(mu, tau, end) } else { zero_panels(nu, 1.0, end) };
    let pow = dim as i32 - 1;
    integrate_breakpoints(
        |s| Ok(s.powi(pow) * bessel_j_reduced(nu, s)? * bessel_j_reduced(mu, tau * s)?),
        &pts,
        cfg,
    )
}

fn prefactor(p: &RadialParams) -> Result<f64> {
    Ok(2f64.powf(p.beta) * gamma(p.beta + 1.0)? * p.a.powf(2.0 * p.beta))
}

/// `U^[d](t)` by direct panel quadrature, or in closed form for `d = 2`, `t = 0`.
pub fn u_d_lambda(p: &RadialParams, t: f64, lambda: f64, cfg: &QuadratureConfig) -> Result<InversionResult> {
    check(p, t, lambda)?;
    if p.d == 2 && t == 0.0 {
        return closed_form_d2(p, lambda);
    }
    u_d_lambda_quadrature(p, t, lambda, cfg)
}

/// `U^[d](t)` by panel quadrature of the defining integral.
pub fn u_d_lambda_quadrature(p: &RadialParams, t: f64, lambda: f64, cfg: &QuadratureConfig) -> Result<InversionResult> {
    check(p, t, lambda)?;
    let (v, e) = bessel_integral(p.d, p.beta, t / p.a, 2.0 * PI * p.a * lambda, cfg)?;
    let c = prefactor(p)?;
    Ok(InversionResult { value: c * v, method: Method::Quadrature, est_error: c.abs() * e })
}

/// `U^[d](t) = U^[1 or 2](t) + P^[d](t)` for `d >= 3`.
pub fn u_d_lambda_reduced(p: &RadialParams, t: f64, lambda: f64, cfg: &QuadratureConfig) -> Result<InversionResult> {
    check(p, t, lambda)?;
    if p.d < 3 {
        return domain(format!("the reduction needs d >= 3, got {}", p.d));
    }
    let base = RadialParams { d: if p.d % 2 == 1 { 1 } else { 2 }, ..*p };
    let b = if base.d == 2 && t == 0.0 {
        closed_form_d2(&base, lambda)?
    } else {
        u_d_lambda_quadrature(&base, t, lambda, cfg)?
    };
    let corr = pinsky_correction(p, t, lambda)?;
    Ok(InversionResult {
        value: b.value + corr,
        method: Method::ReducedBase,
        est_error: b.est_error + 1e-15 * corr.abs(),
    })
}

/// `U^[2](0) = a^(2 beta) - a^(2 beta) Gamma(beta+1) J_beta(2 pi a lambda) / (pi a lambda)^beta`.
pub fn closed_form_d2(p: &RadialParams, lambda: f64) -> Result<InversionResult> {
    check(p, 0.0, lambda)?;
    if p.d != 2 {
        return domain(format!("closed form is for d = 2, got {}", p.d));
    }
    let z = 2.0 * PI * p.a * lambda;
    let b = p.beta;
    let value = p.a.powf(2.0 * b) * (1.0 - 2f64.powf(b) * gamma(b + 1.0)? * bessel_j_reduced(b, z)?);
    Ok(InversionResult { value, method: Method::ClosedFormD2, est_error: 1e-15 * value.abs().max(1.0) })
}

/// `sigma_lambda(U)(x) = U^[d](|x|)` for `x` in `R^d`.
pub fn sigma_partial_integral(p: &RadialParams, x: &[f64], lambda: f64) -> Result<InversionResult> {
    if x.len() != p.d {
        return domain("point dimension does not match the profile");
    }
    let t = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    u_d_lambda(p, t, lambda, &QuadratureConfig::default())
}

/// `P^[d](t) = -Gamma(beta+1) a^beta (pi lambda)^-beta sum_{l=1}^{d#-1}
/// J_{d/2-l+beta}(2 pi a lambda) J_{d/2-l}(2 pi t lambda) / (t/a)^(d/2-l)`, `d >= 3`.
pub fn pinsky_correction(p: &RadialParams, t: f64, lambda: f64) -> Result<f64> {
    check(p, t, lambda)?;
    if p.d <= 2 {
        return domain(format!("the Pinsky correction needs d >= 3, got {}", p.d));
    }
    let h = 0.5 * p.d as f64;
    let (za, zt) = (2.0 * PI * p.a * lambda, 2.0 * PI * t * lambda);
    let mut acc = Neumaier::new();
    for l in 1..d_sharp(p.d) {
        let mu = h - l as f64;
        // J_mu(2 pi t lambda) / (t/a)^mu = (2 pi a lambda)^mu J_mu(z)/z^mu
        acc.add(bessel_j(mu + p.beta, za)? * za.powf(mu) * bessel_j_reduced(mu, zt)?);
    }
    Ok(-gamma(p.beta + 1.0)? * p.a.powf(p.beta) * (PI * lambda).powf(-p.beta) * acc.value())
}

/// Smallest `lambda` accepted by [`sigma_origin_asymptotic`].
pub const LAMBDA_MIN: f64 = 10.0;

/// `U(0) - P cos(2 pi a lambda - (d-1+2 beta) pi/4) lambda^((d-3)/2-beta)`.
pub fn sigma_origin_asymptotic(p: &RadialParams, lambda: f64) -> Result<f64> {
    if !(lambda >= LAMBDA_MIN) {
        return domain(format!("asymptotic model needs lambda >= {LAMBDA_MIN}, got {lambda}"));
    }
    let d = p.d as f64;
    let phase = 2.0 * PI * p.a * lambda - (d - 1.0 + 2.0 * p.beta) * PI / 4.0;
    Ok(p.a.powf(2.0 * p.beta) - pinsky_constant(p)? * phase.cos() * lambda.powf(0.5 * (d - 3.0) - p.beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{gibbs_constant, l_constant};
    use crate::special::tails::Side;

    fn params(d: usize, beta: f64, a: f64) -> RadialParams {
        RadialParams::new(d, beta, a).unwrap()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn slope(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        sxy / sxx
    }

    #[test]
    fn closed_form_d2_matches_quadrature() {
        for &beta in &[-0.5, 0.0, 1.0] {
            for &lam in &[5.0, 20.0, 80.0] {
                let p = params(2, beta, 0.25);
                let q = u_d_lambda_quadrature(&p, 0.0, lam, &cfg()).unwrap();
                let c = closed_form_d2(&p, lam).unwrap();
                assert!((q.value - c.value).abs() < 1e-10, "beta={beta} lam={lam}: {} {}", q.value, c.value);
            }
        }
    }

    #[test]
    fn d1_origin_converges() {
        let p = params(1, 0.0, 0.25);
        let mut worst: f64 = 0.0;
        for i in 0..30 {
            let lam = 10.0 + 3.0 * i as f64 + 0.1;
            let v = u_d_lambda(&p, 0.0, lam, &cfg()).unwrap().value;
            worst = worst.max((v - 1.0).abs() * lam);
        }
        assert!(worst < 1.0, "{worst}");
    }

    #[test]
    fn half_order_pinsky_amplitude() {
        let p = params(2, -0.5, 0.25);
        for i in 0..20 {
            let lam = 40.0 + 7.3 * i as f64;
            let v = u_d_lambda(&p, 0.0, lam, &cfg()).unwrap().value;
            let model = (1.0 - (2.0 * PI * 0.25 * lam).cos()) / 0.25;
            assert!((v - model).abs() * lam < 2.0, "lam={lam}: {v} {model}");
        }
    }

    #[test]
    fn reduction_identity() {
        let p = params(3, 0.0, 0.25);
        let q = u_d_lambda_quadrature(&p, 0.3, 20.0, &cfg()).unwrap();
        let r = u_d_lambda_reduced(&p, 0.3, 20.0, &cfg()).unwrap();
        assert!((q.value - r.value).abs() < 1e-7);
        for d in 3..=5 {
            for &beta in &[-0.5, 0.0, 0.7] {
                for &t in &[0.0, 0.1, 0.25, 0.6] {
                    for &lam in &[3.0, 17.0, 60.0] {
                        let p = params(d, beta, 0.25);
                        let q = u_d_lambda_quadrature(&p, t, lam, &cfg()).unwrap();
                        let r = u_d_lambda_reduced(&p, t, lam, &cfg()).unwrap();
                        let tol = 1e-7f64.max(q.est_error + r.est_error);
                        assert!(
                            (q.value - r.value).abs() <= tol * q.value.abs().max(1.0),
                            "d={d} beta={beta} t={t} lam={lam}: {} {}",
                            q.value,
                            r.value
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn regular_points_decay() {
        let beta = 0.5;
        let p = params(2, beta, 0.25);
        let u = (0.0625f64 - 0.01).powf(beta);
        let (mut xs, mut ys) = (vec![], vec![]);
        for k in 0..6 {
            let lam0 = 20.0 * 2f64.powi(k);
            let mut m: f64 = 0.0;
            for i in 0..40 {
                let lam = lam0 * (1.0 + 0.5 * i as f64 / 40.0);
                m = m.max((sigma_partial_integral(&p, &[0.1, 0.0], lam).unwrap().value - u).abs());
            }
            xs.push(lam0.ln());
            ys.push(m.ln());
        }
        let sl = slope(&xs, &ys);
        assert!(sl <= -beta - 0.8, "{sl}");
    }

    #[test]
    fn sphere_limit() {
        let p = params(2, 0.0, 0.25);
        let v = sigma_partial_integral(&p, &[0.25, 0.0], 500.0).unwrap().value;
        let l = l_constant(&p).unwrap();
        assert!((v - l).abs() < 0.05 * l, "{v} {l}");
    }

    #[test]
    fn smooth_origin_converges() {
        let p = params(2, 1.0, 0.25);
        let v = u_d_lambda(&p, 0.0, 400.0, &cfg()).unwrap().value;
        assert!((v - 0.0625).abs() < 1e-3);
    }

    #[test]
    fn correction_decays_off_origin() {
        let beta = 0.0;
        let p = params(3, beta, 0.25);
        let mut worst: f64 = 0.0;
        for i in 0..40 {
            let lam = 50.0 + 10.0 * i as f64;
            worst = worst.max(pinsky_correction(&p, 0.3, lam).unwrap().abs() * lam.powf(beta + 1.0));
        }
        assert!(worst < 1.0, "{worst}");
        assert!(pinsky_correction(&params(2, 0.0, 0.25), 0.0, 1.0).is_err());
    }

    #[test]
    fn correction_envelope_at_origin() {
        let p = params(5, 0.0, 0.25);
        let big = pinsky_constant(&p).unwrap();
        let e = 0.5 * (5.0 - 3.0) - p.beta;
        let mut m: f64 = 0.0;
        for i in 0..400 {
            let lam = 300.0 + 0.01 * i as f64;
            m = m.max(pinsky_correction(&p, 0.0, lam).unwrap().abs() / lam.powf(e));
        }
        assert!((m - big).abs() < 0.1 * big, "{m} {big}");
    }

    #[test]
    fn origin_model() {
        // for beta = -1/2 the model is exact
        let p = params(2, -0.5, 0.25);
        for i in 0..50 {
            let lam = 50.0 + 7.0 * i as f64;
            let v = u_d_lambda(&p, 0.0, lam, &cfg()).unwrap().value;
            assert!((v - sigma_origin_asymptotic(&p, lam).unwrap()).abs() < 1e-12);
        }
        let p = params(2, 0.0, 0.25);
        let (mut xs, mut ys) = (vec![], vec![]);
        for k in 0..4 {
            let lam0 = 50.0 * 2f64.powi(k);
            let mut m: f64 = 0.0;
            for i in 0..50 {
                let lam = lam0 * (1.0 + 0.3 * i as f64 / 50.0);
                let v = u_d_lambda(&p, 0.0, lam, &cfg()).unwrap().value;
                m = m.max((v - sigma_origin_asymptotic(&p, lam).unwrap()).abs());
            }
            xs.push(lam0.ln());
            ys.push(m.ln());
        }
        let sl = slope(&xs, &ys);
        assert!((sl + 1.5).abs() < 0.2, "{sl}");
        // cos(2 pi a lambda) = 0 at lambda = 2k + 1 for a = 1/4 and phase 0
        let q = params(2, -0.5, 0.25);
        let v = sigma_origin_asymptotic(&q, 41.0).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
        assert!(sigma_origin_asymptotic(&q, 5.0).is_err());
        let c = pinsky_constant(&params(3, 0.0, 0.25)).unwrap();
        assert!((c - 2.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn gibbs_asymmetry() {
        let p = params(2, 0.0, 0.25);
        let lam = 300.0;
        for side in [Side::Plus, Side::Minus] {
            let s = side.sign();
            let r = 0.25 - s * (2.0 + s * p.beta) / (4.0 * lam);
            let u = if r < 0.25 { 1.0 } else { 0.0 };
            let v = sigma_partial_integral(&p, &[r, 0.0], lam).unwrap().value;
            let g = gibbs_constant(&p, side, &cfg()).unwrap();
            assert!((v - u - g).abs() < 0.01, "{side:?}: {} vs {g}", v - u);
        }
    }

    #[test]
    fn no_gibbs_for_positive_beta() {
        let p = params(2, 0.5, 0.25);
        let sup = |lam: f64| {
            let mut m: f64 = 0.0;
            for i in 0..=80 {
                let t = 0.15 + 0.2 * i as f64 / 80.0;
                let u = if t < 0.25 { (0.0625 - t * t).sqrt() } else { 0.0 };
                m = m.max((u_d_lambda(&p, t, lam, &cfg()).unwrap().value - u).abs());
            }
            m
        };
        let v: Vec<f64> = [25.0, 50.0, 100.0, 200.0].iter().map(|&l| sup(l)).collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]), "{v:?}");
    }

    #[test]
    fn inputs_checked() {
        let p = params(2, 0.0, 0.25);
        assert!(u_d_lambda(&p, 0.0, 0.0, &cfg()).is_err());
        assert!(u_d_lambda(&p, -1.0, 1.0, &cfg()).is_err());
        assert!(u_d_lambda_reduced(&p, 0.0, 1.0, &cfg()).is_err());
        let r = u_d_lambda(&p, 0.1, 10.0, &cfg()).unwrap();
        assert!(r.est_error >= 0.0);
        assert_eq!(r.method, Method::Quadrature);
    }
}
