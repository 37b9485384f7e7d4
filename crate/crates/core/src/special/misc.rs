use crate::error::{domain, Result};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

/// Sine integral `Si(x) = int_0^x sin(t)/t dt`.
pub fn sine_integral(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("sine integral argument {x} is not finite"));
    }
    if x < 0.0 {
        return Ok(-sine_integral(-x)?);
    }
    if x <= 4.0 {
        // sum (-1)^k x^(2k+1) / ((2k+1) (2k+1)!)
        let x2 = x * x;
        let mut fact_term = x;
        let mut acc = x;
        let mut k = 1.0;
        loop {
            fact_term *= -x2 / ((2.0 * k) * (2.0 * k + 1.0));
            let term = fact_term / (2.0 * k + 1.0);
            acc += term;
            if term.abs() < 1e-17 * acc.abs() {
                break;
            }
            k += 1.0;
        }
        return Ok(acc);
    }
    // Lentz on the continued fraction of E1(ix)
    let one = Complex64::new(1.0, 0.0);
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1e300, 0.0);
    let mut d = one / b;
    let mut h = d;
    for i in 2..10_000 {
        let a = -((i - 1) as f64).powi(2);
        b += 2.0;
        d = one / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < 1e-16 {
            break;
        }
    }
    let h = Complex64::new(x.cos(), -x.sin()) * h;
    Ok(FRAC_PI_2 + h.im)
}

// B_2k / (2k)!
const BERNOULLI_OVER_FACT: [f64; 10] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40_320.0,
    5.0 / 66.0 / 3_628_800.0,
    -691.0 / 2730.0 / 479_001_600.0,
    7.0 / 6.0 / 87_178_291_200.0,
    -3617.0 / 510.0 / 20_922_789_888_000.0,
    43_867.0 / 798.0 / 6_402_373_705_728_000.0,
    -174_611.0 / 330.0 / 2_432_902_008_176_640_000.0,
];

/// Riemann zeta function for real `s > 1`.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return domain(format!("zeta needs finite s > 1, got {s}"));
    }
    const N: usize = 16;
    let n = N as f64;
    let mut acc = 0.0;
    for k in (1..N).rev() {
        acc += (k as f64).powf(-s);
    }
    acc += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // s (s+1) ... (s+2k-2) N^(-s-2k+1)
    let mut rising = s;
    let mut pow = n.powf(-s - 1.0);
    for (k, &c) in BERNOULLI_OVER_FACT.iter().enumerate() {
        if k > 0 {
            let j = 2.0 * k as f64;
            rising *= (s + j - 1.0) * (s + j);
            pow /= n * n;
        }
        acc += c * rising * pow;
    }
    Ok(acc)
}
