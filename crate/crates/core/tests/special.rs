use lattice_fourier::special::tails::{power_integral, product_integral, step_integral};
use lattice_fourier::special::{bessel_j, gamma, lambda_nu, QuadratureConfig};
use std::f64::consts::PI;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

#[test]
fn product_of_adjacent_orders_integrates_to_half() {
    for nu in [1.0, 1.5, 2.0] {
        let v = product_integral(nu, 1.0, nu - 1.0, 1.0, 0.0, &cfg()).unwrap();
        assert!((v - 0.5).abs() < 1e-6, "nu={nu}: {v}");
    }
}

#[test]
fn weighted_single_bessel_closed_value() {
    for beta in [-0.5, 0.0, 0.5, 1.0] {
        let nu = 0.5 + beta;
        let v = power_integral(nu, 1.0, nu, &cfg()).unwrap();
        let closed = (PI / 2.0).sqrt() / (2f64.powf(beta) * gamma(1.0 + beta).unwrap());
        assert!((v - closed).abs() < 1e-6, "beta={beta}: {v} vs {closed}");
    }
}

#[test]
fn step_function_identity() {
    let (beta, a) = (-0.5, 0.25);
    for t in [0.3, 0.4] {
        let v = step_integral(0.0, beta, a, t, &cfg()).unwrap();
        assert!(v.abs() < 1e-3, "t={t}: {v}");
    }
    for t in [0.1, 0.2] {
        let v = step_integral(0.0, beta, a, t, &cfg()).unwrap();
        let want = (a * a - t * t).powf(beta);
        assert!((v - want).abs() < 1e-3, "t={t}: {v} vs {want}");
    }
    assert!(step_integral(0.0, beta, a, a, &cfg()).is_err());
}

#[test]
fn step_identity_other_orders() {
    for (mu, beta) in [(0.5, 0.0), (1.0, 0.5), (0.5, 1.0)] {
        let v = step_integral(mu, beta, 0.25, 0.15, &cfg()).unwrap();
        let want = (0.0625f64 - 0.0225).powf(beta);
        assert!((v - want).abs() < 1e-6, "mu={mu} beta={beta}: {v} vs {want}");
        let out = step_integral(mu, beta, 0.25, 0.35, &cfg()).unwrap();
        assert!(out.abs() < 1e-6);
    }
}

#[test]
fn lambda_is_reduced_bessel() {
    let (nu, t, s): (f64, f64, f64) = (1.5, 0.3, 40.0);
    let want = bessel_j(nu, 2.0 * PI * t * s.sqrt()).unwrap() / s.powf(nu / 2.0);
    assert!((lambda_nu(nu, t, s).unwrap() - want).abs() < 1e-14);
}

#[test]
fn gibbs_constant_signs() {
    use lattice_fourier::radial::{gibbs_constant, RadialParams};
    use lattice_fourier::special::tails::Side;
    for beta in [-0.5, -0.25, 0.0] {
        let p = RadialParams::new(2, beta, 0.25).unwrap();
        assert!(gibbs_constant(&p, Side::Plus, &cfg()).unwrap() > 0.0);
        assert!(gibbs_constant(&p, Side::Minus, &cfg()).unwrap() < 0.0);
    }
}
