//! Gauss-Legendre panel quadrature.

use crate::error::{Error, Result};
use crate::sum::Neumaier;
use std::sync::OnceLock;

/// Tolerances shared by the quadrature routines.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Minimum number of integration-by-parts terms used for tails.
    pub tail_order: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_panels: 1_000_000,
            tail_order: 3,
        }
    }
}

/// Nodes and weights of the `n`-point rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = z;
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

struct Rules {
    g16: (Vec<f64>, Vec<f64>),
    g8: (Vec<f64>, Vec<f64>),
}

fn rules() -> &'static Rules {
    static R: OnceLock<Rules> = OnceLock::new();
    R.get_or_init(|| Rules {
        g16: gauss_legendre(16),
        g8: gauss_legendre(8),
    })
}

/// 16-point rule on `[a, b]`.
pub fn gl16<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let (x, w) = &rules().g16;
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..16 {
        acc += w[i] * f(c + h * x[i]);
    }
    acc * h
}

fn panel<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)> {
    let r = rules();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut hi = 0.0;
    for i in 0..16 {
        hi += r.g16.1[i] * f(c + h * r.g16.0[i])?;
    }
    let mut lo = 0.0;
    for i in 0..8 {
        lo += r.g8.1[i] * f(c + h * r.g8.0[i])?;
    }
    Ok((hi * h, (hi - lo).abs() * h))
}

/// Integral over consecutive breakpoints with the 16-point rule on each
/// panel. The error estimate is the summed difference to the 8-point rule.
pub fn integrate_breakpoints<F>(mut f: F, points: &[f64], cfg: &QuadratureConfig) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if points.len() > cfg.max_panels + 1 {
        return Err(Error::Accuracy(format!(
            "{} panels requested, budget is {}",
            points.len() - 1,
            cfg.max_panels
        )));
    }
    let mut acc = Neumaier::new();
    let mut err = 0.0;
    for win in points.windows(2) {
        if win[1] > win[0] {
            let (v, e) = panel(&mut f, win[0], win[1])?;
            acc.add(v);
            err += e;
        }
    }
    Ok((acc.value(), err))
}

/// Uniform panels of length at most `h` on `[a, b]`.
pub fn uniform_breakpoints(a: f64, b: f64, h: f64) -> Vec<f64> {
    let n = ((b - a) / h).ceil().max(1.0) as usize;
    (0..=n)
        .map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
        .collect()
}

/// Breakpoints `v, 2v, 4v, ...` up to `c`, for integrands singular at zero.
pub fn graded_breakpoints(v: f64, c: f64) -> Vec<f64> {
    let mut pts = vec![v];
    let mut x = v;
    while 2.0 * x < c {
        x *= 2.0;
        pts.push(x);
    }
    if c > v {
        pts.push(c);
    }
    pts
}
