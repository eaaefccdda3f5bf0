use crate::coeffs::{GTable, SystemSpec};
use crate::funcspace::{ExpConvolution, Grid};
use crate::par::Execution;
use crate::spectra::SectorFrame;
use crate::system::uv::{build_uv, UVFrame};
use crate::{CMatrix, CVector, Error, Result, C64};

#[derive(Debug, Clone, Copy)]
pub struct SystemOptions {
    pub cells: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Refuse to iterate when the measured kernel norm exceeds this (`N >= 1`).
    pub max_kernel_norm: f64,
}

impl Default for SystemOptions {
    fn default() -> Self {
        SystemOptions {
            cells: 512,
            tol: 1e-13,
            max_iter: 200,
            max_kernel_norm: 0.95,
        }
    }
}

/// One branch `Y_k = exp(rho R_k x) W_k` of the system.
#[derive(Debug, Clone)]
pub struct SystemFssResult {
    pub rho: C64,
    pub k: usize,
    /// `R_j` in sector order.
    pub roots: Vec<C64>,
    pub nodes: Vec<f64>,
    /// `W_k(x_i)`
    pub w: Vec<CVector>,
    /// `W_k^0(x_i) = sum_{mu<=N} g_(mu)k / rho^mu`, mapped back by `Omega`
    pub w0: Vec<CVector>,
    pub iterations: usize,
    pub final_update_norm: f64,
    /// Discretized norm of the integral operator.
    pub kernel_norm: f64,
}

impl SystemFssResult {
    pub fn root(&self) -> C64 {
        self.roots[self.k]
    }

    /// `Y_k(x_i)`.
    pub fn y(&self, i: usize) -> CVector {
        &self.w[i] * (self.rho * self.root() * self.nodes[i]).exp()
    }

    /// `W_k - W_k^0` at every node.
    pub fn remainder(&self) -> Vec<CVector> {
        self.w.iter().zip(&self.w0).map(|(a, b)| a - b).collect()
    }

    /// `max_x |W_k - W_k^0|`.
    pub fn max_remainder(&self) -> f64 {
        self.remainder()
            .iter()
            .map(|r| r.norm())
            .fold(0.0, f64::max)
    }
}

/// A system in sector order together with the matrix mapping it back.
#[derive(Debug, Clone)]
pub struct Prepared {
    /// Diagonal system with `A_(0) = diag(R_1, ..., R_n)` in sector order.
    pub diagonal: SystemSpec,
    /// Ordered eigenvector matrix: `Y = Omega Y~`.
    pub omega: CMatrix,
    pub gtable: GTable,
}

/// Conjugates by the ordered eigenvector matrix (a permutation when `A_(0)`
/// is already diagonal) and builds the `g` tables.
pub fn prepare(spec: &SystemSpec, frame: &SectorFrame) -> Result<Prepared> {
    if frame.n != spec.n {
        return Err(Error::Mismatch(format!(
            "sector frame is for n = {}, system has n = {}",
            frame.n, spec.n
        )));
    }
    let omega = if spec.is_diagonal() && spec.roots.is_none() {
        CMatrix::from_fn(spec.n, spec.n, |r, c| {
            if frame.ordering[c] == r {
                C64::new(1.0, 0.0)
            } else {
                C64::default()
            }
        })
    } else {
        spec.root_system()?
            .ordered(frame)
            .eigenvectors
            .ok_or_else(|| Error::InvalidSpec("non-diagonal A_(0) without eigenvectors".into()))?
    };
    let diagonal = spec.conjugated(&omega)?;
    let gtable = GTable::new(&diagonal)?;
    Ok(Prepared {
        diagonal,
        omega,
        gtable,
    })
}

fn grid_for(spec: &SystemSpec, cells: usize) -> Result<Grid> {
    Grid::with_breaks(0.0, spec.t, cells, &spec.breaks())
}

/// `ln |exp(rho (R_j - R_k) (x - t))| = Re(rho (R_j - R_k)) (x - t)`.
fn lambdas(roots: &[C64], k: usize, rho: C64) -> Vec<C64> {
    roots.iter().map(|&r| rho * (r - roots[k])).collect()
}

/// Sup-norm bound of the integral operator for branch `k`:
/// `max_j max_x int |rho exp(lambda_j (x - t))| sum_l |K_jl(t)| dt` over the
/// branch's integration range.
pub fn kernel_norm_branch(uv: &UVFrame, grid: &Grid, roots: &[C64], k: usize) -> f64 {
    let n = roots.len();
    let rho = uv.rho;
    let lam = lambdas(roots, k, rho);
    let len = uv.nodes.len();
    let kern: Vec<CMatrix> = (0..len).map(|i| uv.kernel(i)).collect();
    let mut out = vec![C64::default(); len];
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let f: Vec<C64> = kern
            .iter()
            .map(|m| {
                C64::new(
                    rho.norm() * (0..n).map(|l| m[(j, l)].norm()).sum::<f64>(),
                    0.0,
                )
            })
            .collect();
        let conv = ExpConvolution::new(grid, C64::new(lam[j].re, 0.0));
        if j <= k {
            conv.forward(&f, &mut out);
        } else {
            conv.backward(&f, &mut out);
        }
        worst = worst.max(out.iter().map(|v| v.re).fold(0.0, f64::max));
    }
    worst
}

/// Successive approximations for `v` in `W~_k = U~ v`:
/// `v_j = delta_jk + rho int_0^x exp(lambda_j (x - t)) (K v)_j` for `j <= k`,
/// `v_j = -rho int_x^T exp(lambda_j (x - t)) (K v)_j` for `j > k`.
fn iterate(
    uv: &UVFrame,
    grid: &Grid,
    roots: &[C64],
    k: usize,
    opts: &SystemOptions,
) -> Result<(Vec<CVector>, usize, f64)> {
    let n = roots.len();
    let rho = uv.rho;
    let len = uv.nodes.len();
    let lam = lambdas(roots, k, rho);
    let convs: Vec<ExpConvolution> = lam.iter().map(|&l| ExpConvolution::new(grid, l)).collect();
    let kern: Vec<CMatrix> = (0..len).map(|i| uv.kernel(i) * rho).collect();
    let mut v: Vec<CVector> = vec![
        CVector::from_fn(n, |j, _| if j == k {
            C64::new(1.0, 0.0)
        } else {
            C64::default()
        });
        len
    ];
    let zero_kernel = kern.iter().all(|m| m.iter().all(|c| *c == C64::default()));
    let mut f = vec![C64::default(); len];
    let mut out = vec![C64::default(); len];
    let mut iterations = 0;
    loop {
        let kv: Vec<CVector> = kern.iter().zip(&v).map(|(m, x)| m * x).collect();
        let mut next = v.clone();
        for j in 0..n {
            for (fi, r) in f.iter_mut().zip(&kv) {
                *fi = r[j];
            }
            if j <= k {
                convs[j].forward(&f, &mut out);
            } else {
                convs[j].backward(&f, &mut out);
            }
            let (base, sign) = if j == k {
                (C64::new(1.0, 0.0), 1.0)
            } else if j < k {
                (C64::default(), 1.0)
            } else {
                (C64::default(), -1.0)
            };
            for (nx, o) in next.iter_mut().zip(&out) {
                nx[j] = base + o * sign;
            }
        }
        iterations += 1;
        let update = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).amax_norm())
            .fold(0.0, f64::max);
        v = next;
        if update < opts.tol || zero_kernel {
            return Ok((v, iterations, update));
        }
        if iterations >= opts.max_iter || !update.is_finite() {
            return Err(Error::NoConvergence {
                iterations,
                last_update: update,
            });
        }
    }
}

trait AmaxNorm {
    fn amax_norm(&self) -> f64;
}

impl AmaxNorm for CVector {
    fn amax_norm(&self) -> f64 {
        self.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Solves branch `k` (sector order) of a system with diagonal `A_(0)`.
pub fn solve_system_fss(
    spec: &SystemSpec,
    frame: &SectorFrame,
    k: usize,
    rho: C64,
    opts: &SystemOptions,
) -> Result<SystemFssResult> {
    if !spec.is_diagonal() {
        return Err(Error::InvalidSpec(
            "A_(0) is not diagonal; use solve_general_a0".into(),
        ));
    }
    solve_prepared(
        &prepare(spec, frame)?,
        frame,
        k,
        rho,
        opts,
        Execution::default(),
    )
}

/// Solves branch `k` for any `A_(0)` with simple eigenvalues through
/// `Y = Omega Y~`, where `Omega^{-1} A_(0) Omega` is diagonal.
pub fn solve_general_a0(
    spec: &SystemSpec,
    frame: &SectorFrame,
    k: usize,
    rho: C64,
    opts: &SystemOptions,
) -> Result<SystemFssResult> {
    solve_prepared(
        &prepare(spec, frame)?,
        frame,
        k,
        rho,
        opts,
        Execution::default(),
    )
}

/// All `n` branches, sharing one `U`/`V` assembly.
pub fn solve_system_all(
    spec: &SystemSpec,
    frame: &SectorFrame,
    rho: C64,
    opts: &SystemOptions,
    exec: Execution,
) -> Result<Vec<SystemFssResult>> {
    let prep = prepare(spec, frame)?;
    let grid = grid_for(&prep.diagonal, opts.cells)?;
    let uv = build_uv(&prep.diagonal, &prep.gtable, rho, grid.nodes(), exec)?;
    let ks: Vec<usize> = (0..spec.n).collect();
    exec.try_map(&ks, |&k| finish(&prep, frame, &grid, &uv, k, opts))
}

pub fn solve_prepared(
    prep: &Prepared,
    frame: &SectorFrame,
    k: usize,
    rho: C64,
    opts: &SystemOptions,
    exec: Execution,
) -> Result<SystemFssResult> {
    if k >= prep.diagonal.n {
        return Err(Error::InvalidSpec(format!(
            "branch k = {} out of range 1..={}",
            k + 1,
            prep.diagonal.n
        )));
    }
    let grid = grid_for(&prep.diagonal, opts.cells)?;
    let uv = build_uv(&prep.diagonal, &prep.gtable, rho, grid.nodes(), exec)?;
    finish(prep, frame, &grid, &uv, k, opts)
}

fn finish(
    prep: &Prepared,
    frame: &SectorFrame,
    grid: &Grid,
    uv: &UVFrame,
    k: usize,
    opts: &SystemOptions,
) -> Result<SystemFssResult> {
    let roots: Vec<C64> = prep.diagonal.a0.diagonal().iter().copied().collect();
    frame.check(&roots, uv.rho)?;
    let norm = kernel_norm_branch(uv, grid, &roots, k);
    // For N = 0 the sup-norm bound stays O(1) (the diagonal row integrates the
    // O(1) off-diagonal A_(1) terms against components that are themselves
    // O(1/rho)), so the measured norm is reported but not enforced.
    if prep.diagonal.big_n >= 1 && norm > opts.max_kernel_norm {
        return Err(Error::NotContractive(norm));
    }
    let (v, iterations, update) = iterate(uv, grid, &roots, k, opts)?;
    let w = v
        .iter()
        .zip(&uv.u)
        .map(|(vi, u)| &prep.omega * (u * vi))
        .collect();
    let w0 = uv.u.iter().map(|u| &prep.omega * u.column(k)).collect();
    Ok(SystemFssResult {
        rho: uv.rho,
        k,
        roots,
        nodes: uv.nodes.clone(),
        w,
        w0,
        iterations,
        final_update_norm: update,
        kernel_norm: norm,
    })
}

/// Measured contraction threshold: doubles `|rho|` along the sector's ray
/// from `seed` until every branch's kernel norm is at most `0.5`.
/// Returns `(|rho_*|, norm at rho_*)`.
pub fn rho_star(
    spec: &SystemSpec,
    frame: &SectorFrame,
    seed: f64,
    cells: usize,
    exec: Execution,
) -> Result<(f64, f64)> {
    if !(seed > 0.0 && seed.is_finite()) {
        return Err(Error::InvalidSpec(format!(
            "seed modulus {seed} must be positive"
        )));
    }
    let prep = prepare(spec, frame)?;
    let grid = grid_for(&prep.diagonal, cells)?;
    let roots: Vec<C64> = prep.diagonal.a0.diagonal().iter().copied().collect();
    let mut modulus = seed;
    let mut last = f64::NAN;
    for _ in 0..40 {
        let rho = frame.rho(modulus);
        if let Ok(uv) = build_uv(&prep.diagonal, &prep.gtable, rho, grid.nodes(), exec) {
            last = (0..spec.n)
                .map(|k| kernel_norm_branch(&uv, &grid, &roots, k))
                .fold(0.0, f64::max);
            if last <= 0.5 {
                return Ok((modulus, last));
            }
        }
        modulus *= 2.0;
    }
    Err(Error::NotContractive(last))
}
