//! Radial profiles `U(x) = (a^2 - |x|^2)^beta` on `|x| < a`, their
//! periodization over `Z^d`, point classification on the torus and the
//! closed-form constants that appear in the asymptotics.

use crate::error::{domain, Error, Result};
use crate::special::tails::Side;
use crate::special::{gamma, gibbs_tail, lambda_nu, QuadratureConfig};
use num_rational::Ratio;
use std::f64::consts::PI;

/// Sphere-membership tolerance on `| |x-m|^2 - a^2 |` in floating mode.
pub const EPS_CLASSIFY: f64 = 1e-9;

/// Dimension, exponent and radius of the profile.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RadialParams {
    pub d: usize,
    pub beta: f64,
    pub a: f64,
}

impl RadialParams {
    pub fn new(d: usize, beta: f64, a: f64) -> Result<Self> {
        if d == 0 {
            return domain("dimension must be >= 1");
        }
        if !(beta > -1.0) || !beta.is_finite() {
            return domain(format!("beta must be finite and > -1, got {beta}"));
        }
        if !(a > 0.0) || !a.is_finite() {
            return domain(format!("radius must be finite and > 0, got {a}"));
        }
        Ok(Self { d, beta, a })
    }

    /// `d/2 + beta`, the Bessel order of the Fourier transform.
    pub fn order(&self) -> f64 {
        0.5 * self.d as f64 + self.beta
    }
}

/// A point of `T^d = (-1/2, 1/2]^d`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

fn canonical(x: f64) -> f64 {
    let y = x - (x - 0.5).ceil();
    // guard against rounding pushing the value onto -1/2
    if y <= -0.5 {
        y + 1.0
    } else {
        y
    }
}

impl TorusPoint {
    /// Reduces each coordinate modulo 1 into `(-1/2, 1/2]`.
    pub fn new(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() {
            return domain("a torus point needs at least one coordinate");
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return domain("torus coordinates must be finite");
        }
        Ok(Self {
            coords: coords.iter().map(|&c| canonical(c)).collect(),
        })
    }

    pub fn origin(d: usize) -> Self {
        Self { coords: vec![0.0; d] }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }
}

/// `(a^2 - t^2)^beta` for `t < a`, zero for `t >= a`. Raises at `t = a` when
/// `beta < 0`.
pub fn profile_phi(p: &RadialParams, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return domain(format!("profile radius must be >= 0, got {t}"));
    }
    if t < p.a {
        Ok((p.a * p.a - t * t).powf(p.beta))
    } else if t == p.a && p.beta < 0.0 {
        Err(Error::Singular(format!("profile with beta = {} at t = a", p.beta)))
    } else {
        Ok(0.0)
    }
}

fn check_dim(p: &RadialParams, x: &TorusPoint) -> Result<()> {
    if x.dim() != p.d {
        return domain(format!("point has dimension {}, parameters {}", x.dim(), p.d));
    }
    Ok(())
}

/// Calls `f` on every integer vector in the box `lo[i] <= m[i] <= hi[i]`.
pub(crate) fn for_each_in_box(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64])) {
    let d = lo.len();
    if lo.iter().zip(hi).any(|(l, h)| l > h) {
        return;
    }
    let mut m = lo.to_vec();
    loop {
        f(&m);
        let mut i = 0;
        loop {
            if i == d {
                return;
            }
            if m[i] < hi[i] {
                m[i] += 1;
                break;
            }
            m[i] = lo[i];
            i += 1;
        }
    }
}

/// Periodization `u(x) = sum_m U(x + m)`.
pub fn periodization_u(p: &RadialParams, x: &TorusPoint) -> Result<f64> {
    check_dim(p, x)?;
    if p.beta <= 0.0 {
        let cls = classify_point(p, x)?;
        if cls.r_count > 0 {
            return Err(Error::Singular(format!(
                "u is undefined on the sphere set for beta = {}",
                p.beta
            )));
        }
    }
    let r = (p.a + 0.5).ceil() as i64;
    let lo = vec![-r; p.d];
    let hi = vec![r; p.d];
    let a2 = p.a * p.a;
    let mut terms = Vec::new();
    for_each_in_box(&lo, &hi, |m| {
        let n2: f64 = x
            .coords()
            .iter()
            .zip(m)
            .map(|(c, &k)| (c + k as f64).powi(2))
            .sum();
        if n2 < a2 {
            terms.push((a2 - n2).powf(p.beta));
        }
    });
    Ok(crate::sum::sum(terms))
}

/// Position of a torus point relative to the spheres `|x - m| = a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum PointKind {
    Origin,
    SphereSet,
    Regular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct PointClass {
    pub kind: PointKind,
    /// `#{m : |x - m| = a}`.
    pub r_count: usize,
    /// Same count with `m = 0` excluded.
    pub r_tilde: usize,
    /// Counts were obtained in exact rational arithmetic.
    pub exact: bool,
    /// Some `| |x-m|^2 - a^2 |` lies just outside the tolerance band.
    pub ambiguous: bool,
}

/// Rational `p/q` with `q <= qmax` whose quotient rounds exactly to `x`.
pub fn as_rational(x: f64, qmax: i64) -> Option<(i64, i64)> {
    if !x.is_finite() || x.abs() > 1e12 {
        return None;
    }
    // continued-fraction convergents
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        let ai = a as i64;
        let p2 = ai.checked_mul(p1)?.checked_add(p0)?;
        let q2 = ai.checked_mul(q1)?.checked_add(q0)?;
        if q2 > qmax {
            return None;
        }
        if p2 as f64 / q2 as f64 == x {
            return Some((p2, q2));
        }
        let frac = y - a;
        if frac == 0.0 {
            return None;
        }
        y = 1.0 / frac;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Rational coordinates `x_i = num_i / den` over a common denominator.
pub(crate) fn rational_point(coords: &[f64], qmax: i64) -> Option<(Vec<i64>, i64)> {
    let mut parts = Vec::with_capacity(coords.len());
    let mut den = 1i64;
    for &c in coords {
        let (p, q) = as_rational(c, qmax)?;
        den = den.checked_mul(q / gcd(den, q))?;
        if den > qmax {
            return None;
        }
        parts.push((p, q));
    }
    Some((parts.iter().map(|&(p, q)| p * (den / q)).collect(), den))
}

/// Counts `r_d(a:x)` and `r~_d(a:x)`.
pub fn classify_point(p: &RadialParams, x: &TorusPoint) -> Result<PointClass> {
    check_dim(p, x)?;
    let c = x.coords();
    let slack = 1e-6;
    let lo: Vec<i64> = c.iter().map(|&v| (v - p.a - slack).ceil() as i64).collect();
    let hi: Vec<i64> = c.iter().map(|&v| (v + p.a + slack).floor() as i64).collect();
    let a2 = p.a * p.a;
    let exact_parts = rational_point(c, 1 << 20).zip(as_rational(a2, 1 << 20));
    let mut r_count = 0;
    let mut r_tilde = 0;
    let mut ambiguous = false;
    let exact = exact_parts.is_some();
    match exact_parts {
        Some(((num, den), (ap, aq))) => {
            // aq * sum (num_i - m_i den)^2 == ap * den^2
            let rhs = ap as i128 * (den as i128).pow(2);
            for_each_in_box(&lo, &hi, |m| {
                let s: i128 = num
                    .iter()
                    .zip(m)
                    .map(|(&n, &k)| (n as i128 - k as i128 * den as i128).pow(2))
                    .sum();
                if aq as i128 * s == rhs {
                    r_count += 1;
                    if m.iter().any(|&k| k != 0) {
                        r_tilde += 1;
                    }
                }
            });
        }
        None => {
            let tol = EPS_CLASSIFY * a2.max(1.0);
            for_each_in_box(&lo, &hi, |m| {
                let s: f64 = c.iter().zip(m).map(|(v, &k)| (v - k as f64).powi(2)).sum();
                let gap = (s - a2).abs();
                if gap < tol {
                    r_count += 1;
                    if m.iter().any(|&k| k != 0) {
                        r_tilde += 1;
                    }
                } else if gap < 1e3 * tol {
                    ambiguous = true;
                }
            });
        }
    }
    let kind = if x.is_origin() {
        PointKind::Origin
    } else if r_count > 0 {
        PointKind::SphereSet
    } else {
        PointKind::Regular
    };
    Ok(PointClass {
        kind,
        r_count,
        r_tilde,
        exact,
        ambiguous,
    })
}

/// `A^(j)(s) = (-1)^j Gamma(beta+1) pi^(j-beta) a^(d/2+beta+j) Lambda_{d/2+beta+j}(a:s)`,
/// the `j`-th derivative in `s` of the profile's Fourier transform as a
/// function of `s = |xi|^2`.
pub fn coefficient_a(p: &RadialParams, j: usize, s: f64) -> Result<f64> {
    let jf = j as f64;
    let nu = p.order() + jf;
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * gamma(p.beta + 1.0)? * PI.powf(jf - p.beta) * p.a.powf(nu) * lambda_nu(nu, p.a, s)?)
}

/// `P = Gamma(beta+1)/Gamma(d/2) a^((d-3)/2+beta) pi^((d-4)/2-beta)`.
pub fn pinsky_constant(p: &RadialParams) -> Result<f64> {
    let d = p.d as f64;
    Ok(gamma(p.beta + 1.0)? / gamma(0.5 * d)?
        * p.a.powf(0.5 * (d - 3.0) + p.beta)
        * PI.powf(0.5 * (d - 4.0) - p.beta))
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `L = (Gamma(beta+1)/2) (a/pi)^beta sinc(beta pi / 2)`.
pub fn l_constant(p: &RadialParams) -> Result<f64> {
    Ok(0.5 * gamma(p.beta + 1.0)? * (p.a / PI).powf(p.beta) * sinc(0.5 * p.beta * PI))
}

/// `G^+-` for `-1 < beta <= 0`.
pub fn gibbs_constant(p: &RadialParams, side: Side, cfg: &QuadratureConfig) -> Result<f64> {
    if p.beta > 0.0 {
        return domain(format!("no Gibbs constant for beta = {} > 0", p.beta));
    }
    let s = side.sign();
    let b = p.beta;
    let pre = gamma(b + 1.0)? * p.a.powf(b) * (2.0 + s * b).powf(b) / (PI * 2f64.powf(b));
    Ok(-s * pre * gibbs_tail(b, side, cfg)?)
}

/// `c(d) = (d(d-4) - 1) / (2(d+1))`.
pub fn c_exponent(d: usize) -> Result<Ratio<i64>> {
    if d == 0 {
        return domain("dimension must be >= 1");
    }
    let d = d as i64;
    Ok(Ratio::new(d * (d - 4) - 1, 2 * (d + 1)))
}

/// `floor((d-1)/2) + 1`.
pub fn d_sharp(d: usize) -> usize {
    (d.max(1) - 1) / 2 + 1
}
