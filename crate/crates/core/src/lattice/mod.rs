//! Lattice sums over `Z^d`, their ball-integral counterparts, shell tables and
//! the correction terms of the generalized Hardy identity.

pub mod corrections;
pub mod discrepancy;
pub mod shells;
pub mod stats;

pub use corrections::{g_term, g_term_with, k_term, GTermResult, G_MAX_POINTS, G_TOL};
pub use discrepancy::{
    cal_d_alpha, d_alpha, d_alpha_many, delta0_d1_closed, delta_alpha, lattice_sum_direct, p_alpha,
    unit_ball_volume, DeltaSeries, POINT_BUDGET,
};
pub use shells::{
    build_shell_table, last_shell_below, read_table, write_table, ShellCache, ShellMode, ShellTable,
    ShellWeights, RATIONAL_Q_MAX,
};
pub use stats::{exponent_fit, mean_square, mean_square_piecewise, novak_constant_origin, ExponentFit};
