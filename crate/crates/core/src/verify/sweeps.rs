use crate::coeffs::{BetaNormalization, BetaTable, ProblemSpecN, SystemSpec};
use crate::funcspace::PiecewisePoly;
use crate::nth::{solve_fss, wronskian, AnchorMode, SolveOptions};
use crate::par::Execution;
use crate::spectra::SectorFrame;
use crate::system::{solve_system_all, SystemOptions};
use crate::verify::compare::{compare_nth_branch, compare_system_branch};
use crate::{Result, C64};

/// Interior window `[alpha + f (T - alpha), T - f (T - alpha)]` used for the
/// expansion claims; excludes the endpoint layers.
pub const WINDOW_FRACTION: f64 = 0.1;

/// `max |z_nu - (1 + sum_{s=1}^{terms} beta_{s nu} / (rho R_k)^s)|` over branches,
/// `nu` and the interior window, at each modulus on the frame's mid ray.
pub fn expansion_errors(
    spec: &ProblemSpecN,
    frame: &SectorFrame,
    moduli: &[f64],
    terms: usize,
    anchors: AnchorMode,
    cells: usize,
    exec: Execution,
) -> Result<Vec<f64>> {
    let table = BetaTable::with_count(spec, terms, BetaNormalization::Anchored)?;
    let n = spec.n;
    // beta_{s nu} for s = 1..=terms
    let coeffs: Vec<Vec<PiecewisePoly>> = (0..n)
        .map(|nu| (1..=terms).map(|s| table.beta_nu(s, nu)).collect())
        .collect::<Result<_>>()?;
    let opts = SolveOptions {
        anchors,
        cells,
        ..SolveOptions::default()
    };
    exec.try_map(moduli, |&m| {
        let rho = frame.rho(m);
        let fss = solve_fss(spec, frame, rho, &opts, Execution::Sequential)?;
        let mut worst: f64 = 0.0;
        for b in &fss {
            let inv = (rho * b.root()).inv();
            for i in b.interior(WINDOW_FRACTION) {
                let x = b.nodes[i];
                for (nu, row) in coeffs.iter().enumerate() {
                    let mut approx = C64::new(1.0, 0.0);
                    let mut pw = inv;
                    for c in row {
                        approx += c.value(x) * pw;
                        pw *= inv;
                    }
                    worst = worst.max((b.z[nu][i] - approx).norm());
                }
            }
        }
        Ok(worst)
    })
}

/// `max_x |W(x) / (rho^{n(n-1)/2} V) - 1|` over the solve nodes in `[alpha, T]`.
pub fn wronskian_errors(
    spec: &ProblemSpecN,
    frame: &SectorFrame,
    moduli: &[f64],
    anchors: AnchorMode,
    cells: usize,
    exec: Execution,
) -> Result<Vec<f64>> {
    let opts = SolveOptions {
        anchors,
        cells,
        ..SolveOptions::default()
    };
    exec.try_map(moduli, |&m| {
        let fss = solve_fss(spec, frame, frame.rho(m), &opts, Execution::Sequential)?;
        let mut worst: f64 = 0.0;
        for i in fss[0].main_start..fss[0].nodes.len() {
            worst = worst.max((wronskian(&fss, i)?.ratio - 1.0).norm());
        }
        Ok(worst)
    })
}

/// Largest oracle discrepancy over all branches at each modulus.
pub fn oracle_errors(
    spec: &ProblemSpecN,
    frame: &SectorFrame,
    moduli: &[f64],
    cells: usize,
    exec: Execution,
) -> Result<Vec<f64>> {
    let opts = SolveOptions {
        cells,
        ..SolveOptions::default()
    };
    exec.try_map(moduli, |&m| {
        let fss = solve_fss(spec, frame, frame.rho(m), &opts, Execution::Sequential)?;
        fss.iter()
            .map(|b| compare_nth_branch(spec, b))
            .try_fold(0.0f64, |acc, e| Ok(acc.max(e?)))
    })
}

/// `max_k max_x |W_k - W_k^0|` at each modulus.
pub fn system_remainders(
    spec: &SystemSpec,
    frame: &SectorFrame,
    moduli: &[f64],
    cells: usize,
    exec: Execution,
) -> Result<Vec<f64>> {
    let opts = SystemOptions {
        cells,
        ..SystemOptions::default()
    };
    exec.try_map(moduli, |&m| {
        let fss = solve_system_all(spec, frame, frame.rho(m), &opts, Execution::Sequential)?;
        Ok(fss.iter().map(|b| b.max_remainder()).fold(0.0, f64::max))
    })
}

/// Largest oracle discrepancy over all system branches at each modulus.
pub fn system_oracle_errors(
    spec: &SystemSpec,
    frame: &SectorFrame,
    moduli: &[f64],
    cells: usize,
    exec: Execution,
) -> Result<Vec<f64>> {
    let opts = SystemOptions {
        cells,
        ..SystemOptions::default()
    };
    exec.try_map(moduli, |&m| {
        let fss = solve_system_all(spec, frame, frame.rho(m), &opts, Execution::Sequential)?;
        fss.iter()
            .map(|b| compare_system_branch(spec, b))
            .try_fold(0.0f64, |acc, e| Ok(acc.max(e?)))
    })
}
