use crate::coeffs::ProblemSpecN;
use crate::coeffs::SystemSpec;
use crate::nth::FssResult;
use crate::system::SystemFssResult;
use crate::verify::ivp::{trajectory, LinearOde};
use crate::{CVector, Result, C64};

/// Allowed growth of a parasitic solution over one oracle segment.
pub const SEGMENT_GROWTH: f64 = 1e4;
/// Number of checkpoints across the compared interval.
const CHECKPOINTS: usize = 64;

/// Direction and reach of each oracle segment for a branch whose renormalized
/// companions grow like `exp(rate x)` forward or `exp(rate (-x))` backward.
#[derive(Debug, Clone, Copy)]
struct Plan {
    forward: bool,
    reach: f64,
}

fn plan(roots: &[C64], k: usize, rho: C64, span: f64) -> Plan {
    let rk = rho * roots[k];
    let fwd = roots.iter().map(|&r| (rho * r - rk).re).fold(0.0, f64::max);
    let bwd = roots.iter().map(|&r| (rk - rho * r).re).fold(0.0, f64::max);
    let rate = fwd.min(bwd);
    let reach = if rate > 0.0 {
        SEGMENT_GROWTH.ln() / rate
    } else {
        span
    };
    Plan {
        forward: fwd <= bwd,
        reach: reach.min(span),
    }
}

/// Maximum relative discrepancy between the oracle and the supplied
/// renormalized states `u[i]` at `xs[i]`, reseeding from `u` whenever the
/// segment would exceed the allowed parasitic growth.
pub fn compare_states(
    ode: &LinearOde,
    shift: C64,
    xs: &[f64],
    u: &[CVector],
    roots: &[C64],
    k: usize,
    rho: C64,
) -> Result<f64> {
    if xs.len() < 2 {
        return Ok(0.0);
    }
    let span = xs[xs.len() - 1] - xs[0];
    let p = plan(roots, k, rho, span);
    let stride = (xs.len() / CHECKPOINTS).max(1);
    let mut idx: Vec<usize> = (0..xs.len()).step_by(stride).collect();
    if *idx.last().unwrap() != xs.len() - 1 {
        idx.push(xs.len() - 1);
    }
    if !p.forward {
        idx.reverse();
    }
    let mut worst: f64 = 0.0;
    let mut seed_at = 0;
    while seed_at + 1 < idx.len() {
        let s = idx[seed_at];
        let mut end = seed_at + 1;
        while end + 1 < idx.len() && (xs[idx[end + 1]] - xs[s]).abs() <= p.reach {
            end += 1;
        }
        let targets: Vec<f64> = idx[seed_at + 1..=end].iter().map(|&i| xs[i]).collect();
        let traj = trajectory(ode, shift, xs[s], &u[s], &targets)?;
        for (v, &i) in traj.iter().zip(&idx[seed_at + 1..=end]) {
            let scale = u[i].camax().max(f64::MIN_POSITIVE);
            worst = worst.max((v - &u[i]).camax() / scale);
        }
        seed_at = end;
    }
    Ok(worst)
}

/// Oracle check of one branch of the n-th order system over all its nodes.
pub fn compare_nth_branch(spec: &ProblemSpecN, branch: &FssResult) -> Result<f64> {
    let n = spec.n;
    let rk = branch.root();
    let u: Vec<CVector> = (0..branch.nodes.len())
        .map(|i| CVector::from_iterator(n, (0..n).map(|nu| rk.powu(nu as u32) * branch.z[nu][i])))
        .collect();
    let ode = LinearOde::nth(spec, branch.rho);
    compare_states(
        &ode,
        branch.rho * rk,
        &branch.nodes,
        &u,
        &branch.roots,
        branch.k,
        branch.rho,
    )
}

/// Oracle check of one system branch, comparing `W_k = exp(-rho R_k x) Y_k`.
pub fn compare_system_branch(spec: &SystemSpec, branch: &SystemFssResult) -> Result<f64> {
    let ode = LinearOde::system(spec, branch.rho);
    compare_states(
        &ode,
        branch.rho * branch.root(),
        &branch.nodes,
        &branch.w,
        &branch.roots,
        branch.k,
        branch.rho,
    )
}
