//! Independent oracles and log-log fits that turn the asymptotic claims into
//! pass/fail checks.

mod compare;
mod fit;
mod identity;
mod ivp;
mod suite;
mod sweeps;

pub use compare::{compare_nth_branch, compare_states, compare_system_branch, SEGMENT_GROWTH};
pub use fit::{dyadic, slope_fit, SweepReport};
pub use identity::{identity_suite, IdentityReport};
pub use ivp::{ivp_oracle, trajectory, LinearOde, RTOL};
pub use suite::{run_all, run_criterion, tol, CriterionResult, CRITERIA, SWEEP_CELLS};
pub use sweeps::{
    expansion_errors, oracle_errors, system_oracle_errors, system_remainders, wronskian_errors,
    WINDOW_FRACTION,
};
