//! Birkhoff-type fundamental systems for `y^(n) + sum_{m<=n-2} p_m y^(m) = rho^n y`.
//!
//! Each branch `y_k ~ exp(rho R_k x)` is the solution of a system of linear
//! integral equations for `z_{nu k} = (rho R_k)^{-nu} exp(-rho R_k x) y_k^(nu)`
//! whose kernel only carries exponentials `exp(rho (R_j - R_k)(x - t))` of
//! nonpositive real part, so no intermediate quantity overflows.

mod fss;
mod kernel;
mod solve;

pub use fss::{assemble_fss, solve_fss, wronskian, Wronskian};
pub use kernel::{kernel_a, kernel_norm, kernel_norm_all, rho_threshold, root_sum};
pub use solve::{solve_z, AnchorConfig, AnchorMode, FssResult, SolveOptions};
