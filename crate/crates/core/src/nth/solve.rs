use crate::coeffs::ProblemSpecN;
use crate::funcspace::{ExpConvolution, Grid};
use crate::nth::kernel::{kernel_norm, rho_threshold};
use crate::par::Execution;
use crate::spectra::{roots_of_unity, SectorFrame};
use crate::{Error, Result, C64};

/// Which integral equation defines the branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnchorMode {
    /// `C_j = delta_jk`; anchors `gamma_j = alpha` for `j <= k`, `T` otherwise.
    #[default]
    Plain,
    /// Constants chosen to cancel the endpoint exponentials at order `rho^-2`.
    Anchored,
}

/// Constants of the general solution `sum_j C_j exp(rho R_j x) + ...`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnchorConfig {
    pub mode: AnchorMode,
}

impl AnchorConfig {
    /// Per root `j`: `(a_j, gamma_j)` with
    /// `C_j exp(rho R_j x) = a_j exp(rho R_k x) exp(rho (R_j - R_k)(x - gamma_j))`.
    ///
    /// Plain: `a_j = delta_jk`. Anchored: `a_j = -p_{n-2}(gamma_j) R_j / (n (rho R_k)^2 (R_k - R_j))`.
    pub fn coefficients(
        &self,
        spec: &ProblemSpecN,
        roots: &[C64],
        k: usize,
        rho: C64,
    ) -> Vec<(C64, f64)> {
        let n = spec.n;
        let rk = roots[k];
        (0..n)
            .map(|j| {
                let gamma = if j <= k { spec.alpha } else { spec.t };
                if j == k {
                    (C64::new(1.0, 0.0), gamma)
                } else if self.mode == AnchorMode::Plain {
                    (C64::default(), gamma)
                } else {
                    let p = spec.p[n - 2].value(gamma);
                    let rj = roots[j];
                    (-p * rj / ((rho * rk).powu(2) * (rk - rj) * n as f64), gamma)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub cells: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub anchors: AnchorMode,
    /// Permit `|rho| < rho_alpha`; the measured contraction must then be <= 0.95.
    pub allow_below_threshold: bool,
    /// Compute the discretized operator norm and report it.
    pub certify: bool,
    /// Continue the solution to `[0, alpha)` when `alpha > 0`.
    pub continue_left: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            cells: 512,
            tol: 1e-13,
            max_iter: 200,
            anchors: AnchorMode::Plain,
            allow_below_threshold: false,
            certify: false,
            continue_left: true,
        }
    }
}

/// One branch `y_k` at fixed `rho`, as `z_{nu k} = (rho R_k)^{-nu} exp(-rho R_k x) y_k^(nu)`.
#[derive(Debug, Clone)]
pub struct FssResult {
    pub rho: C64,
    pub k: usize,
    pub sector_index: usize,
    /// All `R_j` in sector order.
    pub roots: Vec<C64>,
    pub nodes: Vec<f64>,
    /// `z[nu][i]`.
    pub z: Vec<Vec<C64>>,
    /// Index of the first node in `[alpha, T]`; earlier nodes come from the continuation.
    pub main_start: usize,
    pub iterations: usize,
    pub final_update_norm: f64,
    /// Ratio of the last two Picard corrections.
    pub observed_ratio: f64,
    /// Discretized operator norm, when requested.
    pub contraction_estimate: Option<f64>,
}

impl FssResult {
    pub fn root(&self) -> C64 {
        self.roots[self.k]
    }

    /// `y_k^(nu)(x_i) = (rho R_k)^nu exp(rho R_k x_i) z_{nu k}(x_i)`.
    pub fn y(&self, nu: usize, i: usize) -> C64 {
        let rr = self.rho * self.root();
        rr.powu(nu as u32) * (rr * self.nodes[i]).exp() * self.z[nu][i]
    }

    /// `y[nu][i]` for every node.
    pub fn y_table(&self) -> Vec<Vec<C64>> {
        (0..self.z.len())
            .map(|nu| (0..self.nodes.len()).map(|i| self.y(nu, i)).collect())
            .collect()
    }

    /// Node indices of `[alpha + f (T - alpha), T - f (T - alpha)]`.
    pub fn interior(&self, fraction: f64) -> Vec<usize> {
        let a = self.nodes[self.main_start];
        let b = *self.nodes.last().unwrap();
        let span = b - a;
        (self.main_start..self.nodes.len())
            .filter(|&i| {
                self.nodes[i] >= a + fraction * span && self.nodes[i] <= b - fraction * span
            })
            .collect()
    }
}

/// Solves the integral system for branch `k` (0-based, sector order) by
/// successive approximations.
pub fn solve_z(
    spec: &ProblemSpecN,
    frame: &SectorFrame,
    k: usize,
    rho: C64,
    opts: &SolveOptions,
) -> Result<FssResult> {
    let n = spec.n;
    if k >= n {
        return Err(Error::InvalidSpec(format!(
            "branch k = {} out of range 1..={n}",
            k + 1
        )));
    }
    if frame.n != n {
        return Err(Error::Mismatch(format!(
            "sector frame is for n = {}, problem has n = {n}",
            frame.n
        )));
    }
    let roots = frame.ordered(&roots_of_unity(n)?);
    frame.check(&roots, rho)?;
    let threshold = rho_threshold(spec, spec.alpha)?;
    let mut contraction = None;
    if rho.norm() < threshold {
        if !opts.allow_below_threshold {
            return Err(Error::BelowThreshold {
                modulus: rho.norm(),
                threshold,
            });
        }
        let norm = kernel_norm(spec, &roots, k, rho, 128, Execution::default());
        if norm > 0.95 {
            return Err(Error::NotContractive(norm));
        }
        contraction = Some(norm);
    }
    if opts.certify && contraction.is_none() {
        contraction = Some(kernel_norm(spec, &roots, k, rho, 128, Execution::default()));
    }
    let grid = Grid::with_breaks(spec.alpha, spec.t, opts.cells, &spec.breaks())?;
    let main = MainSolve::run(spec, &roots, k, rho, &grid, opts)?;

    let mut nodes = grid.nodes().to_vec();
    let mut z = main.z.clone();
    let mut main_start = 0;
    if spec.alpha > 0.0 && opts.continue_left {
        let (left_nodes, left_z) = continue_left(spec, &roots, k, rho, opts, &main)?;
        main_start = left_nodes.len();
        nodes = [left_nodes, nodes].concat();
        for (nu, col) in z.iter_mut().enumerate() {
            *col = [left_z[nu].clone(), col.clone()].concat();
        }
    }
    Ok(FssResult {
        rho,
        k,
        sector_index: frame.sector_index,
        roots,
        nodes,
        z,
        main_start,
        iterations: main.iterations,
        final_update_norm: main.update,
        observed_ratio: main.ratio,
        contraction_estimate: contraction,
    })
}

struct MainSolve {
    z: Vec<Vec<C64>>,
    /// `int_alpha^T exp(lambda_j (alpha - t)) f(t) dt` for `j > k`, for the continuation.
    tails: Vec<C64>,
    iterations: usize,
    update: f64,
    ratio: f64,
}

/// Weights `R_j^{nu+1} R_k^{-nu}`.
fn weights(roots: &[C64], k: usize) -> Vec<Vec<C64>> {
    let n = roots.len();
    (0..n)
        .map(|nu| {
            (0..n)
                .map(|j| roots[j].powu(nu as u32 + 1) * roots[k].powi(-(nu as i32)))
                .collect()
        })
        .collect()
}

/// `p_m(x_i) (rho R_k)^m / (n rho^{n-1})` so that `f = sum_m scale[m] z_m`.
fn f_scale(spec: &ProblemSpecN, nodes: &[f64], rk: C64, rho: C64) -> Vec<Vec<C64>> {
    let n = spec.n;
    let denom = rho.powu(n as u32 - 1) * n as f64;
    spec.p
        .iter()
        .enumerate()
        .map(|(m, p)| {
            let c = (rho * rk).powu(m as u32) / denom;
            nodes.iter().map(|&x| p.value(x) * c).collect()
        })
        .collect()
}

fn inhomogeneous(
    spec: &ProblemSpecN,
    roots: &[C64],
    k: usize,
    rho: C64,
    mode: AnchorMode,
    nodes: &[f64],
) -> Vec<Vec<C64>> {
    let n = spec.n;
    let coeffs = AnchorConfig { mode }.coefficients(spec, roots, k, rho);
    let rk = roots[k];
    (0..n)
        .map(|nu| {
            nodes
                .iter()
                .map(|&x| {
                    let mut acc = C64::new(1.0, 0.0);
                    for (j, &(a, gamma)) in coeffs.iter().enumerate() {
                        if j == k || a.norm() == 0.0 {
                            continue;
                        }
                        let rj = roots[j];
                        acc +=
                            a * (rj / rk).powu(nu as u32) * (rho * (rj - rk) * (x - gamma)).exp();
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

impl MainSolve {
    fn run(
        spec: &ProblemSpecN,
        roots: &[C64],
        k: usize,
        rho: C64,
        grid: &Grid,
        opts: &SolveOptions,
    ) -> Result<Self> {
        let n = spec.n;
        let len = grid.len();
        let rk = roots[k];
        let w = weights(roots, k);
        let scale = f_scale(spec, grid.nodes(), rk, rho);
        let inhom = inhomogeneous(spec, roots, k, rho, opts.anchors, grid.nodes());
        let convs: Vec<ExpConvolution> = (0..n)
            .map(|j| ExpConvolution::new(grid, rho * (roots[j] - rk)))
            .collect();

        let mut z: Vec<Vec<C64>> = inhom.clone();
        let mut f = vec![C64::default(); len];
        let mut out = vec![vec![C64::default(); len]; n];
        let mut tails = vec![C64::default(); n];
        let free = spec.is_free();
        let (mut iterations, mut prev_update, mut ratio) = (0, f64::NAN, 0.0);
        let mut update;
        loop {
            // f = sum_m p_m (rho R_k)^m z_m / (n rho^{n-1})
            for (i, fi) in f.iter_mut().enumerate() {
                *fi = (0..n - 1).map(|m| scale[m][i] * z[m][i]).sum();
            }
            for j in 0..n {
                if j <= k {
                    convs[j].forward(&f, &mut out[j]);
                } else {
                    tails[j] = convs[j].backward(&f, &mut out[j]);
                }
            }
            let mut next = inhom.clone();
            for (nu, row) in next.iter_mut().enumerate() {
                for j in 0..n {
                    let c = if j <= k { -w[nu][j] } else { w[nu][j] };
                    for (v, o) in row.iter_mut().zip(&out[j]) {
                        *v += c * o;
                    }
                }
            }
            iterations += 1;
            update = (0..n)
                .flat_map(|nu| next[nu].iter().zip(&z[nu]).map(|(a, b)| (a - b).norm()))
                .fold(0.0, f64::max);
            if prev_update.is_finite() && prev_update > 0.0 {
                ratio = update / prev_update;
            }
            prev_update = update;
            z = next;
            if update < opts.tol || free {
                break;
            }
            if iterations >= opts.max_iter || !update.is_finite() {
                return Err(Error::NoConvergence {
                    iterations,
                    last_update: update,
                });
            }
        }
        Ok(MainSolve {
            z,
            tails,
            iterations,
            update,
            ratio,
        })
    }
}

/// Extends `z` to `[0, alpha]` through the same integral equation: the
/// integrals from `alpha` become integrals over `[x, alpha]`, a Volterra
/// system solved by successive approximations. The `j > k` terms pick up the
/// already known tail over `[alpha, T]`.
fn continue_left(
    spec: &ProblemSpecN,
    roots: &[C64],
    k: usize,
    rho: C64,
    opts: &SolveOptions,
    main: &MainSolve,
) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    let n = spec.n;
    let alpha = spec.alpha;
    let cells = ((opts.cells as f64 * alpha / (spec.t - alpha)).ceil() as usize).max(8);
    let grid = Grid::with_breaks(0.0, alpha, cells, &spec.breaks())?;
    let len = grid.len();
    let rk = roots[k];
    let w = weights(roots, k);
    let scale = f_scale(spec, grid.nodes(), rk, rho);
    let inhom = inhomogeneous(spec, roots, k, rho, opts.anchors, grid.nodes());
    let lambdas: Vec<C64> = (0..n).map(|j| rho * (roots[j] - rk)).collect();
    let convs: Vec<ExpConvolution> = lambdas
        .iter()
        .map(|&l| ExpConvolution::new(&grid, l))
        .collect();
    // fixed part: j > k tails carried in from [alpha, T]
    let mut base = inhom;
    for (nu, row) in base.iter_mut().enumerate() {
        for j in k + 1..n {
            for (v, &x) in row.iter_mut().zip(grid.nodes()) {
                *v += w[nu][j] * (lambdas[j] * (x - alpha)).exp() * main.tails[j];
            }
        }
    }
    let mut z = base.clone();
    let mut f = vec![C64::default(); len];
    let mut out = vec![C64::default(); len];
    let mut iterations = 0;
    loop {
        for (i, fi) in f.iter_mut().enumerate() {
            *fi = (0..n - 1).map(|m| scale[m][i] * z[m][i]).sum();
        }
        let mut next = base.clone();
        for j in 0..n {
            convs[j].backward(&f, &mut out);
            // -int_alpha^x = +int_x^alpha for j <= k; +int_x^alpha for j > k
            for (nu, row) in next.iter_mut().enumerate() {
                for (v, o) in row.iter_mut().zip(&out) {
                    *v += w[nu][j] * o;
                }
            }
        }
        iterations += 1;
        let scale_z = z.iter().flatten().map(|v| v.norm()).fold(1.0, f64::max);
        let update = (0..n)
            .flat_map(|nu| next[nu].iter().zip(&z[nu]).map(|(a, b)| (a - b).norm()))
            .fold(0.0, f64::max);
        z = next;
        if update < opts.tol * scale_z {
            break;
        }
        if iterations >= opts.max_iter || !update.is_finite() {
            return Err(Error::NoConvergence {
                iterations,
                last_update: update,
            });
        }
    }
    Ok((grid.nodes().to_vec(), z))
}
