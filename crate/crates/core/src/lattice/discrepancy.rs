//! Lattice sums `D_alpha`, ball integrals `calD_alpha` and their differences.

use super::shells::{build_shell_table, last_shell_below, ShellMode, ShellTable, ShellWeights};
use crate::error::{domain, Error, Result};
use crate::radial::TorusPoint;
use crate::special::{bessel_j_reduced, gamma};
use crate::sum::Neumaier;
use std::f64::consts::PI;

/// Default cap on lattice points visited by direct enumeration.
pub const POINT_BUDGET: u64 = 100_000_000;

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    let h = 0.5 * d as f64;
    PI.powf(h) / gamma(h + 1.0).expect("positive argument")
}

fn ball_point_estimate(d: usize, s: f64) -> f64 {
    unit_ball_volume(d) * (s.sqrt() + 0.5 * (d as f64).sqrt()).powi(d as i32)
}

/// `sum_{|m|^2 < s} (s - |m|^2)^alpha_j e^{2 pi i m.x}` for several `alpha_j`
/// by direct enumeration; returns `(re, im)` per exponent, without the
/// `1/Gamma` factors.
pub fn lattice_sum_direct(alphas: &[f64], s: f64, x: &[f64], budget: u64) -> Result<Vec<(f64, f64)>> {
    let d = x.len();
    if d == 0 {
        return domain("empty point");
    }
    if !(s >= 0.0) {
        return domain(format!("lattice sum needs s >= 0, got {s}"));
    }
    let Some(top) = last_shell_below(s) else {
        return Ok(vec![(0.0, 0.0); alphas.len()]);
    };
    if ball_point_estimate(d, s) > budget as f64 {
        return Err(Error::Resource(format!(
            "about {:.3e} lattice points in dimension {d}, budget {budget}",
            ball_point_estimate(d, s)
        )));
    }
    let top = top as i64;
    let mut acc: Vec<(Neumaier, Neumaier)> = vec![(Neumaier::new(), Neumaier::new()); alphas.len()];
    let int_alpha: Vec<Option<i32>> = alphas
        .iter()
        .map(|&a| (a.fract() == 0.0 && a <= 64.0).then_some(a as i32))
        .collect();
    // depth-first over coordinates, bounded by the remaining radius; the
    // last coordinate advances the phase by a fixed rotation
    #[allow(clippy::too_many_arguments)]
    fn walk(
        i: usize,
        used: i64,
        phase: f64,
        top: i64,
        x: &[f64],
        s: f64,
        alphas: &[f64],
        int_alpha: &[Option<i32>],
        acc: &mut [(Neumaier, Neumaier)],
    ) {
        let d = x.len();
        let r = ((top - used) as f64).sqrt() as i64 + 1;
        if i + 1 < d {
            for k in -r..=r {
                let n = used + k * k;
                if n <= top {
                    walk(i + 1, n, phase + k as f64 * x[i], top, x, s, alphas, int_alpha, acc);
                }
            }
            return;
        }
        let (ss, cs) = (2.0 * PI * x[i]).sin_cos();
        let mut k = -r;
        while used + k * k > top {
            k += 1;
        }
        let (mut zs, mut zc) = (2.0 * PI * (phase + k as f64 * x[i])).sin_cos();
        while k <= r {
            let n = used + k * k;
            if n > top {
                break;
            }
            let rem = s - n as f64;
            for (j, &al) in alphas.iter().enumerate() {
                let w = match int_alpha[j] {
                    Some(0) => 1.0,
                    Some(q) => rem.powi(q),
                    None => rem.powf(al),
                };
                acc[j].0.add(w * zc);
                acc[j].1.add(w * zs);
            }
            let nc = zc * cs - zs * ss;
            zs = zs * cs + zc * ss;
            zc = nc;
            k += 1;
        }
    }
    walk(0, 0, 0.0, top, x, s, alphas, &int_alpha, &mut acc);
    Ok(acc.iter().map(|(r, i)| (r.value(), i.value())).collect())
}

/// Shell count above which `d >= 3` sums go through per-shell weights.
const WEIGHTS_FROM: u64 = 4096;

/// `D_alpha(s:x)` for several exponents at once. Uses the shell table at
/// `x = 0`, per-shell weights for large balls in `d >= 3` or beyond the point
/// budget, and direct enumeration otherwise.
pub fn d_alpha_many(alphas: &[f64], s: f64, x: &TorusPoint, budget: u64) -> Result<Vec<f64>> {
    if !(s >= 0.0) {
        return domain(format!("D_alpha needs s >= 0, got {s}"));
    }
    if alphas.iter().any(|&a| !(a > -1.0)) {
        return domain("D_alpha needs alpha > -1");
    }
    let Some(top) = last_shell_below(s) else {
        return Ok(vec![0.0; alphas.len()]);
    };
    let weights = if x.is_origin() {
        Some(ShellWeights::from_table(&build_shell_table(x.dim(), top)?))
    } else if ball_point_estimate(x.dim(), s) > budget as f64 || (x.dim() >= 3 && top >= WEIGHTS_FROM) {
        Some(ShellWeights::build(x.coords(), top, ShellMode::detect(x.coords()))?)
    } else {
        None
    };
    match weights {
        Some(w) => alphas.iter().map(|&a| w.d_alpha(a, s)).collect(),
        None => {
            let sums = lattice_sum_direct(alphas, s, x.coords(), budget)?;
            alphas
                .iter()
                .zip(sums)
                .map(|(&a, (re, _))| Ok(re / gamma(a + 1.0)?))
                .collect()
        }
    }
}

/// `D_alpha(s:x) = (1/Gamma(alpha+1)) sum_{|m|^2 < s} (s - |m|^2)^alpha cos(2 pi m.x)`.
pub fn d_alpha(alpha: f64, s: f64, x: &TorusPoint) -> Result<f64> {
    Ok(d_alpha_many(&[alpha], s, x, POINT_BUDGET)?[0])
}

/// `calD_alpha(s:x) = s^(d/2+alpha) pi^-alpha J_{d/2+alpha}(2 pi sqrt(s)|x|) / (sqrt(s)|x|)^(d/2+alpha)`,
/// the Fourier transform of `(s - |xi|^2)_+^alpha / Gamma(alpha+1)`.
pub fn cal_d_alpha(alpha: f64, s: f64, x: &[f64]) -> Result<f64> {
    if !(s >= 0.0) {
        return domain(format!("calD_alpha needs s >= 0, got {s}"));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let nu = 0.5 * x.len() as f64 + alpha;
    let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    let z = 2.0 * PI * s.sqrt() * r;
    Ok(s.powf(nu) * PI.powf(-alpha) * (2.0 * PI).powf(nu) * bessel_j_reduced(nu, z)?)
}

/// `Delta_alpha = D_alpha - calD_alpha`.
pub fn delta_alpha(alpha: f64, s: f64, x: &TorusPoint) -> Result<f64> {
    Ok(d_alpha(alpha, s, x)? - cal_d_alpha(alpha, s, x.coords())?)
}

/// `P_alpha = D_alpha - pi^(d/2) s^(d/2+alpha) delta(x) / Gamma(d/2+alpha+1)`;
/// on the torus `delta(x)` is nonzero only at the origin.
pub fn p_alpha(alpha: f64, s: f64, x: &TorusPoint) -> Result<f64> {
    let dv = d_alpha(alpha, s, x)?;
    if !x.is_origin() {
        return Ok(dv);
    }
    let h = 0.5 * x.dim() as f64;
    Ok(dv - PI.powf(h) * s.powf(h + alpha) / gamma(h + alpha + 1.0)?)
}

/// `Delta_0(s:x)` in dimension one:
/// `sin(2 pi (N + 1/2) x) / sin(pi x) - sin(2 pi sqrt(s) x) / (pi x)`, `N < sqrt(s) <= N+1`.
pub fn delta0_d1_closed(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0) {
        return domain(format!("need s > 0, got {s}"));
    }
    if x == 0.0 || !(x.abs() <= 0.5) {
        return domain(format!("need 0 < |x| <= 1/2, got {x}"));
    }
    let n = s.sqrt().ceil() - 1.0;
    Ok((2.0 * PI * (n + 0.5) * x).sin() / (PI * x).sin() - (2.0 * PI * s.sqrt() * x).sin() / (PI * x))
}

/// Samples `(s, Delta_alpha(s:x))` sorted by `s`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DeltaSeries {
    pub alpha: f64,
    pub x: TorusPoint,
    pub samples: Vec<(f64, f64)>,
}

impl DeltaSeries {
    pub fn new(alpha: f64, x: TorusPoint, mut samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.iter().any(|(s, v)| !(*s > 0.0) || !v.is_finite()) {
            return domain("series samples need s > 0 and finite values");
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { alpha, x, samples })
    }

    /// Per-unit-interval suprema of `|Delta_0(.:x)|` on `(0, s_max]`, reduced
    /// to one sample per dyadic block `[2^k, 2^(k+1))`.
    ///
    /// On `(n, n+1]` the lattice sum is the constant `C(n)` and the ball
    /// integral is monotone at `x = 0`, so the supremum sits at an endpoint.
    pub fn origin_block_suprema(d: usize, s_max: u64) -> Result<Self> {
        Self::origin_block_suprema_from(&build_shell_table(d, s_max)?, s_max)
    }

    /// [`Self::origin_block_suprema`] from a prebuilt table covering `s_max`.
    pub fn origin_block_suprema_from(table: &ShellTable, s_max: u64) -> Result<Self> {
        if table.n_max < s_max {
            return domain(format!("table covers n <= {}, need {s_max}", table.n_max));
        }
        let d = table.d;
        let v = unit_ball_volume(d);
        let h = 0.5 * d as f64;
        let mut blocks: Vec<(f64, f64)> = Vec::new();
        let mut c: u64 = 0;
        let mut block = 0u32;
        let mut best = (0.0f64, 0.0f64);
        for n in 0..s_max {
            c += table.counts[n as usize];
            let cf = c as f64;
            for s in [n as f64, (n + 1) as f64] {
                if s <= 0.0 {
                    continue;
                }
                let val = cf - v * s.powf(h);
                let k = (s.log2().floor()) as u32;
                if k != block && best.0 > 0.0 {
                    blocks.push(best);
                    best = (0.0, 0.0);
                }
                block = k;
                if best.0 == 0.0 || val.abs() > best.1.abs() {
                    best = (s, val);
                }
            }
        }
        if best.0 > 0.0 {
            blocks.push(best);
        }
        Self::new(0.0, TorusPoint::origin(d), blocks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(c: &[f64]) -> TorusPoint {
        TorusPoint::new(c).unwrap()
    }

    #[test]
    fn small_sums() {
        let o = TorusPoint::origin(2);
        assert_eq!(d_alpha(0.0, 0.5, &o).unwrap(), 1.0);
        assert_eq!(d_alpha(0.0, 2.0, &o).unwrap(), 5.0);
        assert_eq!(d_alpha(1.0, 2.0, &o).unwrap(), 6.0);
        assert_eq!(d_alpha(0.0, 0.0, &o).unwrap(), 0.0);
        assert!((delta_alpha(0.0, 2.0, &o).unwrap() - (5.0 - 2.0 * PI)).abs() < 1e-14);
        assert!((p_alpha(0.0, 2.0, &o).unwrap() - (5.0 - 2.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn ball_integrals_at_origin() {
        let s = 7.3f64;
        assert!((cal_d_alpha(0.0, s, &[0.0, 0.0]).unwrap() - PI * s).abs() < 1e-13);
        let v3 = 4.0 * PI / 3.0 * s.powf(1.5);
        assert!((cal_d_alpha(0.0, s, &[0.0; 3]).unwrap() - v3).abs() < 1e-12);
        assert_eq!(cal_d_alpha(1.0, 0.0, &[0.2, 0.1]).unwrap(), 0.0);
    }

    #[test]
    fn ball_integral_tensor_grid() {
        // int_{|xi|<1} (1 - |xi|^2) e^{2 pi i xi.x} dxi in polar coordinates
        let x = [0.3, 0.2];
        let r0 = (0.13f64).sqrt();
        let (nr, nt) = (400, 400);
        let mut acc = 0.0;
        for i in 0..nr {
            let r = (i as f64 + 0.5) / nr as f64;
            for j in 0..nt {
                let th = 2.0 * PI * (j as f64 + 0.5) / nt as f64;
                acc += (1.0 - r * r) * (2.0 * PI * r * r0 * th.cos()).cos() * r;
            }
        }
        acc *= (1.0 / nr as f64) * (2.0 * PI / nt as f64);
        let got = cal_d_alpha(1.0, 1.0, &x).unwrap();
        assert!((got - acc).abs() < 1e-5, "{got} vs {acc}");
    }

    #[test]
    fn imaginary_parts_cancel() {
        let x = [0.137, -0.29, 0.411];
        for &s in &[3.7, 40.2, 150.5] {
            for (re, im) in lattice_sum_direct(&[0.0, 1.0, 2.0], s, &x, POINT_BUDGET).unwrap() {
                assert!(im.abs() <= 1e-12 * re.abs().max(1.0), "s={s}: {im}");
            }
        }
    }

    #[test]
    fn weights_match_direct() {
        let x = [0.137, -0.29, 0.411];
        let s = 90.5;
        let w = ShellWeights::build(&x, 90, ShellMode::Generic).unwrap();
        let direct = lattice_sum_direct(&[0.0, 1.5], s, &x, POINT_BUDGET).unwrap();
        assert!((w.d_alpha(0.0, s).unwrap() - direct[0].0).abs() < 1e-10);
        let g = gamma(2.5).unwrap();
        assert!((w.d_alpha(1.5, s).unwrap() - direct[1].0 / g).abs() < 1e-9);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            lattice_sum_direct(&[0.0], 1e6, &[0.1, 0.2, 0.3], 1000),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn d1_closed_form() {
        let want = 1.0 - (0.3 * PI).sin() / (0.3 * PI);
        assert!((delta0_d1_closed(0.25, 0.3).unwrap() - want).abs() < 1e-15);
        let direct = delta_alpha(0.0, 50.5, &pt(&[0.1])).unwrap();
        assert!((delta0_d1_closed(50.5, 0.1).unwrap() - direct).abs() < 1e-12);
        assert!(delta0_d1_closed(1.0, 0.0).is_err());
        // bounded, as an elementary consequence of the closed form
        let mut worst: f64 = 0.0;
        for i in 0..2000 {
            let s = 1.0 + i as f64 * 500.0 + 0.37;
            for &x in &[0.5, 0.31, 0.0137, 0.2222] {
                worst = worst.max(delta0_d1_closed(s, x).unwrap().abs());
            }
        }
        assert!(worst <= 3.0, "{worst}");
    }

    #[test]
    fn jumps_and_continuity() {
        let o = TorusPoint::origin(2);
        let eps = 1e-9;
        // r_2(25) = 12
        let jump = d_alpha(0.0, 25.0 + eps, &o).unwrap() - d_alpha(0.0, 25.0 - eps, &o).unwrap();
        assert_eq!(jump, 12.0);
        let x = pt(&[0.21, -0.1]);
        for &a in &[1.0, 2.0] {
            let gap = delta_alpha(a, 25.0 + eps, &x).unwrap() - delta_alpha(a, 25.0 - eps, &x).unwrap();
            assert!(gap.abs() < 1e-6, "alpha={a}: {gap}");
        }
    }

    #[test]
    fn integral_recurrence() {
        // int_0^t D_0 = D_1(t): D_0 is piecewise constant
        let x = pt(&[0.3, 0.15]);
        let t = 17.6f64;
        let mut acc = 0.0;
        let mut lo = 0.0;
        while lo < t {
            let hi = (lo + 1.0f64).floor().min(t);
            acc += d_alpha(0.0, 0.5 * (lo + hi), &x).unwrap() * (hi - lo);
            lo = hi;
        }
        assert!((acc - d_alpha(1.0, t, &x).unwrap()).abs() < 1e-10);
        // int_0^t D_1 = D_2(t): D_1 is piecewise linear, Simpson per unit piece is exact
        let mut acc2 = 0.0;
        let mut lo = 0.0;
        while lo < t {
            let hi = (lo + 1.0f64).floor().min(t);
            let f = |s: f64| d_alpha(1.0, s, &x).unwrap();
            acc2 += (hi - lo) / 6.0 * (f(lo + 1e-12) + 4.0 * f(0.5 * (lo + hi)) + f(hi - 1e-12));
            lo = hi;
        }
        assert!((acc2 - d_alpha(2.0, t, &x).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn p_alpha_away_from_origin() {
        let x = pt(&[0.25, 0.1]);
        let s = 33.3;
        let diff = p_alpha(0.0, s, &x).unwrap() - delta_alpha(0.0, s, &x).unwrap();
        assert!((diff - cal_d_alpha(0.0, s, x.coords()).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn uniform_bound_shape() {
        // sup over an x-grid of |Delta_0| / s^(d/2 - d/(d+1)) stays bounded
        for &d in &[2usize, 3] {
            let grid: Vec<TorusPoint> = (0..4)
                .map(|i| {
                    let c = 0.07 + 0.1 * i as f64;
                    TorusPoint::new(&vec![c; d]).unwrap()
                })
                .collect();
            let e = 0.5 * d as f64 - d as f64 / (d as f64 + 1.0);
            let mut ratios = vec![];
            let mut s = 100.0;
            while s <= if d == 2 { 1e5 } else { 1e4 } {
                let sup = grid
                    .iter()
                    .map(|x| delta_alpha(0.0, s + 0.5, x).unwrap().abs())
                    .fold(0.0, f64::max);
                ratios.push(sup / s.powf(e));
                s *= 2.0;
            }
            let max = ratios.iter().cloned().fold(0.0, f64::max);
            assert!(max < 10.0, "d={d}: {ratios:?}");
        }
    }

    #[test]
    fn block_suprema_series() {
        let s = DeltaSeries::origin_block_suprema(2, 1 << 12).unwrap();
        assert_eq!(s.samples.len(), 13);
        // brute force over the last block
        let o = TorusPoint::origin(2);
        let mut best: f64 = 0.0;
        for n in 2047..4096u64 {
            for s in [n as f64 + 1e-9, (n + 1) as f64] {
                if (2048.0..4096.0).contains(&s) {
                    best = best.max(delta_alpha(0.0, s, &o).unwrap().abs());
                }
            }
        }
        let got = s.samples[11].1.abs();
        assert!((got - best).abs() < 1e-6, "{got} vs {best}");
    }

    proptest! {
        #[test]
        fn table_count_matches_enumeration(d in 1usize..=4, s in 0.1f64..300.0) {
            let table = build_shell_table(d, 300).unwrap();
            let direct = lattice_sum_direct(&[0.0], s, &vec![0.0; d], POINT_BUDGET).unwrap()[0].0;
            prop_assert_eq!(table.count_below(s).unwrap() as f64, direct);
        }

        #[test]
        fn d1_closed_matches_direct(s in 0.01f64..2000.0, x in 0.001f64..0.5) {
            let direct = delta_alpha(0.0, s, &TorusPoint::new(&[x]).unwrap()).unwrap();
            let closed = delta0_d1_closed(s, x).unwrap();
            prop_assert!((direct - closed).abs() < 1e-12 * (1.0 + s.sqrt()));
        }
    }
}
