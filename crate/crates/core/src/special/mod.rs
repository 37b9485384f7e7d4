//! Special functions.
//!
//! | function              | branch / method                                   |
//! |-----------------------|---------------------------------------------------|
//! | [`gamma`]             | Lanczos (g = 7, n = 9) with reflection            |
//! | [`bessel_j`]          | series, Steed continued fractions, Hankel         |
//! | [`sine_integral`]     | series, then the continued fraction for `E1(ix)`  |
//! | [`riemann_zeta`]      | Euler-Maclaurin with ten Bernoulli corrections    |
//! | [`osc_tail_cos`]      | panels between multiples of `pi`, then asymptotic |
//!
//! Oscillatory tails of Bessel integrals are handled in [`tails`] by
//! integrating the Hankel expansions term by term.

mod bessel;
mod gamma;
mod misc;
pub mod quad;
pub mod tails;

pub use bessel::{
    bessel_j, bessel_j_reduced, hankel_coefficients, lambda_nu, mcmahon_zero, HANKEL_MIN,
    SERIES_MAX,
};
pub use gamma::{gamma, ln_gamma};
pub use misc::{riemann_zeta, sine_integral};
pub use quad::QuadratureConfig;
pub use tails::{gibbs_tail, osc_tail_cos, psi_beta};
