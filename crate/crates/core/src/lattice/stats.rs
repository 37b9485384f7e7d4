//! Growth exponents and mean squares of lattice discrepancies.

use super::discrepancy::{cal_d_alpha, unit_ball_volume, DeltaSeries};
use super::shells::{build_shell_table, ShellMode, ShellWeights};
use crate::error::{domain, Error, Result};
use crate::radial::TorusPoint;
use crate::special::quad::gauss_legendre;
use crate::special::{gamma, riemann_zeta};
use crate::sum::Neumaier;
use statrs::distribution::{ContinuousCDF, StudentsT};
use std::f64::consts::PI;

/// Least-squares growth exponent with its 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ExponentFit {
    pub theta: f64,
    pub ci: f64,
    /// Number of dyadic blocks in the regression.
    pub blocks: usize,
}

/// Slope of `log(running max |value|)` against `log s`, one point per
/// dyadic block `[2^k, 2^(k+1))` placed at the block's largest `s`.
pub fn exponent_fit(series: &DeltaSeries) -> Result<ExponentFit> {
    let samples = &series.samples;
    if samples.len() < 20 {
        return Err(Error::InsufficientData(format!("{} samples, need 20", samples.len())));
    }
    let (lo, hi) = (samples[0].0, samples[samples.len() - 1].0);
    if hi / lo < 1e3 {
        return Err(Error::InsufficientData(format!("samples span {:.2} decades, need 3", (hi / lo).log10())));
    }
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut running: f64 = 0.0;
    let mut block = i64::MIN;
    for &(s, v) in samples {
        let k = s.log2().floor() as i64;
        running = running.max(v.abs());
        if k != block {
            block = k;
            points.push((s, running));
        } else {
            let last = points.last_mut().unwrap();
            *last = (s, running);
        }
    }
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.1 > 0.0).map(|&(s, m)| (s.ln(), m.ln())).collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData("fewer than 3 nonzero dyadic blocks".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let theta = sxy / sxx;
    let rss: f64 = pts.iter().map(|p| (p.1 - my - theta * (p.0 - mx)).powi(2)).sum();
    let se = (rss / (n - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, n - 2.0)
        .map_err(|e| Error::InsufficientData(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(ExponentFit { theta, ci: t * se, blocks: pts.len() })
}

/// `(1/t) int_0^t f(n, s)^2 ds`, where `f(n, .)` is smooth on each `(n, n+1]`,
/// with an `nodes`-point Gauss rule per unit interval.
pub fn mean_square_piecewise<F>(t: f64, nodes: usize, mut f: F) -> Result<f64>
where
    F: FnMut(u64, f64) -> Result<f64>,
{
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("mean square needs t > 0, got {t}"));
    }
    let (xs, ws) = gauss_legendre(nodes.max(1));
    let mut acc = Neumaier::new();
    let mut n = 0u64;
    while (n as f64) < t {
        let (lo, hi) = (n as f64, ((n + 1) as f64).min(t));
        let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for (x, w) in xs.iter().zip(&ws) {
            let v = f(n, c + h * x)?;
            acc.add(w * h * v * v);
        }
        n += 1;
    }
    Ok(acc.value() / t)
}

/// Largest shell range accepted by [`mean_square`].
const MEAN_SQUARE_WORK: f64 = 1e11;

/// `(1/t) int_0^t |Delta_0(s:x)|^2 ds`.
///
/// `D_0(.:x)` is constant on each `(n, n+1]`. At `x = 0` the integral on each
/// piece is done in closed form, elsewhere with `n_samples` Gauss nodes.
pub fn mean_square(d: usize, x: &TorusPoint, t: f64, n_samples: usize) -> Result<f64> {
    if !(t > 1.0) || !t.is_finite() {
        return domain(format!("mean square needs t > 1, got {t}"));
    }
    if x.dim() != d {
        return domain("point dimension does not match d");
    }
    let n_max = t.ceil() as u64;
    if d as f64 * n_max as f64 * (n_max as f64).sqrt() > MEAN_SQUARE_WORK {
        return Err(Error::Resource(format!("mean square for d={d}, t={t} is too large")));
    }
    let weights = if x.is_origin() {
        ShellWeights::from_table(&build_shell_table(d, n_max)?)
    } else {
        ShellWeights::build(x.coords(), n_max, ShellMode::detect(x.coords()))?
    };
    let cum = weights.cumulative();
    if x.is_origin() {
        // int (C - v s^h)^2 = C^2 L - 2 C v [s^(h+1)/(h+1)] + v^2 [s^(2h+1)/(2h+1)]
        let h = 0.5 * d as f64;
        let v = unit_ball_volume(d);
        let mut acc = Neumaier::new();
        let mut n = 0u64;
        while (n as f64) < t {
            let (lo, hi) = (n as f64, ((n + 1) as f64).min(t));
            let c = cum[n as usize];
            let i1 = (hi.powf(h + 1.0) - lo.powf(h + 1.0)) / (h + 1.0);
            let i2 = (hi.powf(2.0 * h + 1.0) - lo.powf(2.0 * h + 1.0)) / (2.0 * h + 1.0);
            acc.add(c * c * (hi - lo) - 2.0 * c * v * i1 + v * v * i2);
            n += 1;
        }
        return Ok(acc.value() / t);
    }
    mean_square_piecewise(t, n_samples, |n, s| Ok(cum[n as usize] - cal_d_alpha(0.0, s, x.coords())?))
}

/// `K_d(0) = pi^d (2^d + 8) zeta(d-2) / (12 (d-1) (2^d - 1) zeta(d) Gamma(d/2)^2)`, `d >= 4`.
pub fn novak_constant_origin(d: usize) -> Result<f64> {
    if d < 4 {
        return domain(format!("K_d(0) is given for d >= 4, got {d}"));
    }
    let df = d as f64;
    let p2 = 2f64.powi(d as i32);
    let g = gamma(0.5 * df)?;
    Ok(PI.powi(d as i32) * (p2 + 8.0) * riemann_zeta(df - 2.0)?
        / (12.0 * (df - 1.0) * (p2 - 1.0) * riemann_zeta(df)? * g * g))
}
