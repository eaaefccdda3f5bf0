use crate::coeffs::ProblemSpecN;
use crate::nth::{solve_z, FssResult, SolveOptions};
use crate::par::Execution;
use crate::spectra::SectorFrame;
use crate::{CMatrix, Error, Result, C64};

/// Solves every branch `k = 1..n` at one `rho`.
pub fn solve_fss(
    spec: &ProblemSpecN,
    frame: &SectorFrame,
    rho: C64,
    opts: &SolveOptions,
    exec: Execution,
) -> Result<Vec<FssResult>> {
    let ks: Vec<usize> = (0..spec.n).collect();
    exec.try_map(&ks, |&k| solve_z(spec, frame, k, rho, opts))
}

/// `[y_k^(nu)(x_i)]` as one `n x n` matrix (row `nu`, column `k`) per node.
pub fn assemble_fss(branches: &[FssResult]) -> Result<Vec<CMatrix>> {
    let first = check_consistent(branches)?;
    let n = branches.len();
    Ok((0..first.nodes.len())
        .map(|i| CMatrix::from_fn(n, n, |nu, k| branches[k].y(nu, i)))
        .collect())
}

/// Wronskian data at one node.
#[derive(Debug, Clone, Copy)]
pub struct Wronskian {
    /// `det[y_k^(nu-1)(x)]`.
    pub det: C64,
    /// `rho^{n(n-1)/2} det[R_k^{nu-1}]`.
    pub leading: C64,
    /// `det / leading`, formed without the exponential factors.
    pub ratio: C64,
}

/// Wronskian of the branches at node `i`.
///
/// `det[y_k^(nu-1)] = exp(rho x sum R_k) rho^{n(n-1)/2} det[R_k^{nu-1} z_{nu-1,k}]`,
/// so the ratio is evaluated from the stripped matrix.
pub fn wronskian(branches: &[FssResult], i: usize) -> Result<Wronskian> {
    let first = check_consistent(branches)?;
    let n = branches.len();
    let rho = first.rho;
    let roots = &first.roots;
    let x = first.nodes[i];
    let vander = CMatrix::from_fn(n, n, |nu, k| roots[k].powu(nu as u32)).determinant();
    let stripped = CMatrix::from_fn(n, n, |nu, k| {
        roots[k].powu(nu as u32) * branches[k].z[nu][i]
    })
    .determinant();
    let sum: C64 = roots.iter().sum();
    let leading = rho.powu((n * (n - 1) / 2) as u32) * vander;
    let det = (rho * x * sum).exp() * rho.powu((n * (n - 1) / 2) as u32) * stripped;
    if !det.is_finite() || stripped.norm() == 0.0 {
        return Err(Error::Singular(format!(
            "Wronskian vanishes or overflows at x = {x}"
        )));
    }
    Ok(Wronskian {
        det,
        leading,
        ratio: (rho * x * sum).exp() * stripped / vander,
    })
}

fn check_consistent(branches: &[FssResult]) -> Result<&FssResult> {
    let first = branches
        .first()
        .ok_or_else(|| Error::Mismatch("no branches".into()))?;
    let n = first.roots.len();
    if branches.len() != n {
        return Err(Error::Mismatch(format!(
            "need {n} branches, got {}",
            branches.len()
        )));
    }
    for (idx, b) in branches.iter().enumerate() {
        if b.k != idx {
            return Err(Error::Mismatch(format!(
                "branch at position {idx} has k = {}",
                b.k
            )));
        }
        if b.rho != first.rho || b.sector_index != first.sector_index {
            return Err(Error::Mismatch(
                "branches were solved at different rho or sectors".into(),
            ));
        }
        if b.nodes != first.nodes {
            return Err(Error::Mismatch("branches use different grids".into()));
        }
    }
    Ok(first)
}
