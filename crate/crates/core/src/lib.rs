//! Spherical partial sums of Fourier series of periodized radial profiles.
//!
//! The profile `U(x) = (a^2 - |x|^2)^beta` on the ball of radius `a` is
//! periodized over `Z^d` and its Fourier series is summed over the balls
//! `|m| < lambda`. The crate evaluates those sums, the Euclidean inversion
//! integral they are compared against, the lattice discrepancies that drive
//! the difference, and probes for the convergence phenomena.
//!
//! | module        | contents                                               |
//! |---------------|--------------------------------------------------------|
//! | [`special`]   | gamma, Bessel `J_nu`, sine integral, zeta, tails       |
//! | [`radial`]    | profile parameters, coefficients, constants            |
//! | [`lattice`]   | shell tables, lattice sums, discrepancies, statistics  |
//! | [`inversion`] | the truncated Euclidean inversion integral             |
//! | [`series`]    | partial sums and the decomposition of the error        |
//! | [`phenomena`] | probes for Pinsky, Gibbs and related effects           |

pub mod error;
pub mod inversion;
pub mod lattice;
pub mod phenomena;
pub mod radial;
pub mod series;
pub mod special;
pub mod sum;

pub use error::{Error, Result};
