//! Bessel functions of the first kind of real order `nu > -1`.
//!
//! Three branches: the power series for `x <= SERIES_MAX`, Steed's
//! continued fractions in the middle and the Hankel expansion for
//! `x >= max(HANKEL_MIN, 2 nu^2)`. Negative orders in the Steed range go
//! through `J_{-mu} = cos(mu pi) J_mu - sin(mu pi) Y_mu`.

use super::gamma::gamma;
use crate::error::{domain, Error, Result};
use std::f64::consts::PI;

/// Largest argument handled by the power series.
pub const SERIES_MAX: f64 = 5.0;
/// Smallest argument handled by the Hankel expansion.
pub const HANKEL_MIN: f64 = 25.0;

fn hankel_threshold(nu: f64) -> f64 {
    HANKEL_MIN.max(2.0 * nu * nu)
}

fn check_order(nu: f64) -> Result<()> {
    if !(nu > -1.0) || !nu.is_finite() {
        return domain(format!("Bessel order {nu} must be finite and > -1"));
    }
    Ok(())
}

/// `sum_k (-x^2/4)^k / (k! Gamma(nu + k + 1))`, i.e. `J_nu(x) / (x/2)^nu`.
fn series_core(nu: f64, x: f64) -> Result<f64> {
    let q = -0.25 * x * x;
    let mut term = 1.0 / gamma(nu + 1.0)?;
    let mut acc = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (nu + k));
        acc += term;
        if term.abs() <= 1e-17 * acc.abs() || k > 500.0 {
            break;
        }
        k += 1.0;
    }
    Ok(acc)
}

/// Hankel coefficients `a_k(nu) = prod_{j<=k} (4 nu^2 - (2j-1)^2) / (k! 8^k)`.
pub fn hankel_coefficients(nu: f64, n: usize) -> Vec<f64> {
    let mu = 4.0 * nu * nu;
    let mut a = Vec::with_capacity(n + 1);
    a.push(1.0);
    for k in 1..=n {
        let j = (2 * k - 1) as f64;
        let prev = a[k - 1];
        a.push(prev * (mu - j * j) / (8.0 * k as f64));
    }
    a
}

fn hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let j = (2 * k - 1) as f64;
        let next = term * (mu - j * j) / (8.0 * k as f64 * x);
        if next == 0.0 {
            break;
        }
        if next.abs() > last && k as f64 > nu.abs() {
            break;
        }
        last = next.abs();
        term = next;
        // i^k: real part on even k, imaginary part on odd k
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < 1e-17 * (p.abs() + q.abs()) {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Steed's method (CF1 + CF2) for `nu >= 0`, `x >= 2`. Returns `(J_nu, Y_nu)`.
fn steed_jy(nu: f64, x: f64) -> Result<(f64, f64)> {
    const EPS: f64 = f64::EPSILON;
    const FPMIN: f64 = 1e-300;
    const MAXIT: usize = 100_000;

    let nl = (nu - x + 1.5).max(0.0) as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: J'_nu / J_nu
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Accuracy(format!("CF1 did not converge for J_{nu}({x})")));
    }
    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let t = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * t - rjl;
        rjl = t;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    // CF2: p + iq
    let mut a = 0.25 - xmu2;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fct = a * xi / (p * p + q * q);
    let mut cr = br + q * fct;
    let mut ci = bi + p * fct;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut t = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = t;
    converged = false;
    for i in 2..MAXIT {
        a += 2.0 * (i as f64 - 1.0);
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        fct = a / (cr * cr + ci * ci);
        cr = br + cr * fct;
        ci = bi - ci * fct;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di /= -den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        t = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = t;
        if (dlr - 1.0).abs() + dli.abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Accuracy(format!("CF2 did not converge for J_{nu}({x})")));
    }
    let gam = (p - f) / q;
    let rjmu = (w / ((p - f) * gam + q)).sqrt().copysign(rjl);
    let mut rymu = rjmu * gam;
    let rymup = rymu * (p + q / gam);
    let mut ry1 = xmu * xi * rymu - rymup;
    let rj = rjl1 * (rjmu / rjl);
    for i in 1..=nl {
        let t = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = t;
    }
    Ok((rj, rymu))
}

fn steed(nu: f64, x: f64) -> Result<f64> {
    if nu >= 0.0 {
        return Ok(steed_jy(nu, x)?.0);
    }
    let mu = -nu;
    let (j, y) = steed_jy(mu, x)?;
    Ok((mu * PI).cos() * j - (mu * PI).sin() * y)
}

/// `J_nu(x)` for `nu > -1`, `x >= 0`.
///
/// At `x = 0` the value is `1` for `nu = 0`, `0` for `nu > 0` and `+inf` for
/// `-1 < nu < 0`. Absolute accuracy is around `1e-13` for `nu <= 10`.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    check_order(nu)?;
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("Bessel argument {x} must be finite and >= 0"));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    if x <= SERIES_MAX {
        Ok((0.5 * x).powf(nu) * series_core(nu, x)?)
    } else if x >= hankel_threshold(nu) {
        Ok(hankel(nu, x))
    } else {
        steed(nu, x)
    }
}

/// `J_nu(z) / z^nu`, continuous at `z = 0` with value `1 / (2^nu Gamma(nu + 1))`.
pub fn bessel_j_reduced(nu: f64, z: f64) -> Result<f64> {
    check_order(nu)?;
    if !(z >= 0.0) || !z.is_finite() {
        return domain(format!("Bessel argument {z} must be finite and >= 0"));
    }
    if z <= SERIES_MAX {
        Ok(2f64.powf(-nu) * series_core(nu, z)?)
    } else {
        Ok(bessel_j(nu, z)? / z.powf(nu))
    }
}

/// `Lambda_nu(t : s) = J_nu(2 pi t sqrt(s)) / s^(nu/2)`, `s >= 0`.
///
/// At `s = 0` this is `(pi t)^nu / Gamma(nu + 1)`.
pub fn lambda_nu(nu: f64, t: f64, s: f64) -> Result<f64> {
    if !(s >= 0.0) || !(t >= 0.0) {
        return domain(format!("lambda_nu needs t >= 0 and s >= 0, got t={t}, s={s}"));
    }
    let z = 2.0 * PI * t * s.sqrt();
    Ok((2.0 * PI * t).powf(nu) * bessel_j_reduced(nu, z)?)
}

/// McMahon's approximation to the `k`-th positive zero of `J_nu`, `k >= 1`.
pub fn mcmahon_zero(nu: f64, k: usize) -> f64 {
    let b = (k as f64 + 0.5 * nu - 0.25) * PI;
    let mu = 4.0 * nu * nu;
    let e = 1.0 / (8.0 * b);
    b - (mu - 1.0) * e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) * e.powi(3) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    // spherical Bessel closed forms: J_{n+1/2}(x) = sqrt(2x/pi) j_n(x)
    fn half_integer(n: i32, x: f64) -> f64 {
        let (s, c) = x.sin_cos();
        let j = match n {
            -1 => c / x,
            0 => s / x,
            1 => s / (x * x) - c / x,
            2 => (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x),
            3 => (15.0 / x.powi(3) - 6.0 / x) * s / x - (15.0 / (x * x) - 1.0) * c / x,
            _ => unreachable!(),
        };
        (2.0 * x / PI).sqrt() * j
    }

    // Bessel's integral for integer order, trapezoid rule on a periodic integrand
    fn integer_order(n: i32, x: f64) -> f64 {
        let m = 4000;
        let h = PI / m as f64;
        let mut acc = 0.0;
        for i in 0..=m {
            let tau = i as f64 * h;
            let w = if i == 0 || i == m { 0.5 } else { 1.0 };
            acc += w * (n as f64 * tau - x * tau.sin()).cos();
        }
        acc * h / PI
    }

    #[test]
    fn half_integer_orders() {
        for n in -1..=3 {
            let nu = n as f64 + 0.5;
            for &x in &[0.3, 1.0, 5.5, 11.9, 12.1, 17.0, 24.9, 25.1, 40.0, 333.3] {
                let got = bessel_j(nu, x).unwrap();
                let want = half_integer(n, x);
                assert!((got - want).abs() < 1e-13, "nu={nu} x={x}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn integer_orders() {
        for n in 0..=6 {
            for &x in &[0.5, 3.0, 9.7, 13.0, 20.0, 30.0, 60.0, 99.0] {
                let got = bessel_j(n as f64, x).unwrap();
                let want = integer_order(n, x);
                assert!((got - want).abs() < 1e-13, "n={n} x={x}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn zero_argument() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1.3, 0.0).unwrap(), 0.0);
        assert!(bessel_j(-0.5, 0.0).unwrap().is_infinite());
        let r = bessel_j_reduced(1.5, 0.0).unwrap();
        assert!((r - 1.0 / (2f64.powf(1.5) * gamma(2.5).unwrap())).abs() < 1e-15);
        assert!(bessel_j(-1.0, 1.0).is_err());
    }

    #[test]
    fn recurrence_non_integer() {
        // J_nu + J_{nu+2} = (2 (nu+1) / x) J_{nu+1}
        for &nu in &[-0.3, 0.25, 1.7, 3.4, 6.2] {
            for &x in &[2.0, 11.0, 13.5, 19.0, 26.0, 57.0, 140.0] {
                let mid = bessel_j(nu + 1.0, x).unwrap();
                let outer = bessel_j(nu + 2.0, x).unwrap() + bessel_j(nu, x).unwrap();
                assert!((outer - 2.0 * (nu + 1.0) / x * mid).abs() < 2e-13, "nu={nu} x={x}");
            }
        }
    }

    #[test]
    fn branch_overlap() {
        for &nu in &[-0.75, -0.5, 0.0, 0.5, 1.0, 2.5, 3.5, 5.0, 7.5] {
            for i in 0..=40 {
                let x = SERIES_MAX - 2.0 + 0.1 * i as f64;
                let s = (0.5 * x).powf(nu) * series_core(nu, x).unwrap();
                let m = steed(nu, x).unwrap();
                assert!((s - m).abs() < 1e-9, "series/steed nu={nu} x={x}: {s} vs {m}");
            }
            let xh = hankel_threshold(nu);
            for i in 0..=40 {
                let x = xh - 4.0 + 0.2 * i as f64;
                let h = hankel(nu, x);
                let m = steed(nu, x).unwrap();
                assert!((h - m).abs() < 1e-9, "hankel/steed nu={nu} x={x}: {h} vs {m}");
            }
        }
    }

    #[test]
    fn lambda_limits() {
        let v = lambda_nu(2.5, 0.25, 0.0).unwrap();
        let want = (PI * 0.25f64).powf(2.5) / gamma(3.5).unwrap();
        assert!((v - want).abs() < 1e-15);
        // Lambda_nu(t:s) = J_nu(2 pi t sqrt s) / s^(nu/2)
        let s: f64 = 37.0;
        let direct = bessel_j(1.5, 2.0 * PI * 0.25 * s.sqrt()).unwrap() / s.powf(0.75);
        assert!((lambda_nu(1.5, 0.25, s).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn mcmahon_close_to_zeros() {
        for &nu in &[0.0, 0.5, 1.5] {
            for k in 2..30 {
                let z = mcmahon_zero(nu, k);
                assert!(bessel_j(nu, z).unwrap().abs() < 1e-3, "nu={nu} k={k}");
            }
        }
    }
}
