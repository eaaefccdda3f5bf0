//! Birkhoff-type solutions of `Y' = rho A(x, rho) Y` built from the formal
//! series `U` and an integral equation for the correction.

mod solve;
mod uv;

pub use solve::{
    kernel_norm_branch, prepare, rho_star, solve_general_a0, solve_prepared, solve_system_all,
    solve_system_fss, Prepared, SystemFssResult, SystemOptions,
};
pub use uv::{build_uv, UVFrame};
