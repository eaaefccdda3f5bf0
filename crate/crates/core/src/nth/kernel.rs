use crate::coeffs::ProblemSpecN;
use crate::funcspace::quad::gauss_legendre;
use crate::par::Execution;
use crate::spectra::SectorFrame;
use crate::{Error, Result, C64};

/// `rho_alpha = max_m (2 int_alpha^T |p_m|)^{1/(n-1-m)}`.
///
/// Above this modulus the integral operator is a contraction with ratio 1/2.
pub fn rho_threshold(spec: &ProblemSpecN, alpha: f64) -> Result<f64> {
    if !(0.0..spec.t).contains(&alpha) {
        return Err(Error::InvalidSpec(format!(
            "alpha = {alpha} must lie in [0, {})",
            spec.t
        )));
    }
    let mut best = 0.0f64;
    for (m, p) in spec.p.iter().enumerate() {
        let l1 = p.l1_norm(alpha, spec.t)?;
        best = best.max((2.0 * l1).powf(1.0 / (spec.n - 1 - m) as f64));
    }
    Ok(best)
}

/// The kernel `A_{nu m k}(x, t, rho)` of the integral system for `z`.
///
/// `roots` are in sector order and `k` is 0-based. For `x >= t` the sum runs
/// over `j <= k` with sign `-1`, for `x < t` over `j > k` with sign `+1`.
#[allow(clippy::too_many_arguments)]
pub fn kernel_a(
    spec: &ProblemSpecN,
    roots: &[C64],
    k: usize,
    nu: usize,
    m: usize,
    x: f64,
    t: f64,
    rho: C64,
) -> C64 {
    let p = spec.p[m].value(t);
    kernel_factor(spec.n, roots, k, nu, m, x, t, rho) * p
}

#[allow(clippy::too_many_arguments)]
fn kernel_factor(
    n: usize,
    roots: &[C64],
    k: usize,
    nu: usize,
    m: usize,
    x: f64,
    t: f64,
    rho: C64,
) -> C64 {
    let rk = roots[k];
    let pre = rk.powi(m as i32 - nu as i32) / (rho.powu((n - 1 - m) as u32) * n as f64);
    let (range, sign) = if x >= t {
        (0..k + 1, -1.0)
    } else {
        (k + 1..n, 1.0)
    };
    let mut acc = C64::default();
    for j in range {
        let rj = roots[j];
        acc += rj.powu(nu as u32 + 1) * (rho * (rj - rk) * (x - t)).exp();
    }
    acc * pre * sign
}

/// Measured operator norm `max_nu sum_m max_x int_alpha^T |A_{nu m k}(x,t)| dt`.
///
/// `x` runs over `samples + 1` equispaced points; each integral is split at
/// `x` and at the coefficient breakpoints and evaluated by composite
/// Gauss-Legendre with panels resolving the exponentials.
pub fn kernel_norm(
    spec: &ProblemSpecN,
    roots: &[C64],
    k: usize,
    rho: C64,
    samples: usize,
    exec: Execution,
) -> f64 {
    let n = spec.n;
    let (a, b) = (spec.alpha, spec.t);
    let xs: Vec<f64> = (0..=samples)
        .map(|i| a + (b - a) * i as f64 / samples as f64)
        .collect();
    let spread = roots
        .iter()
        .map(|r| (r - roots[k]).norm())
        .fold(0.0, f64::max)
        * rho.norm();
    let mut breaks = spec.breaks();
    breaks.retain(|&x| x > a && x < b);
    // per x: table [nu][m] of integrals
    let per_x: Vec<Vec<Vec<f64>>> = exec.map(&xs, |&x| {
        let mut cuts = vec![a, x, b];
        cuts.extend(&breaks);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut out = vec![vec![0.0; n - 1]; n];
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi <= lo {
                continue;
            }
            let panels = ((spread * (hi - lo) / 2.0).ceil() as usize).clamp(1, 100_000);
            let ph = (hi - lo) / panels as f64;
            for q in 0..panels {
                let p0 = lo + q as f64 * ph;
                for &(xi, wq) in gauss_legendre(8) {
                    let t = p0 + 0.5 * ph * (xi + 1.0);
                    let wt = 0.5 * ph * wq;
                    for (m, p) in spec.p.iter().enumerate() {
                        let pv = p.value(t).norm();
                        if pv == 0.0 {
                            continue;
                        }
                        for (nu, row) in out.iter_mut().enumerate() {
                            row[m] += wt * pv * kernel_factor(n, roots, k, nu, m, x, t, rho).norm();
                        }
                    }
                }
            }
        }
        out
    });
    (0..n)
        .map(|nu| {
            (0..n - 1)
                .map(|m| per_x.iter().map(|tab| tab[nu][m]).fold(0.0, f64::max))
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// [`kernel_norm`] maximized over every branch `k`.
pub fn kernel_norm_all(
    spec: &ProblemSpecN,
    frame: &SectorFrame,
    rho: C64,
    samples: usize,
    exec: Execution,
) -> Result<f64> {
    let roots = frame.ordered(&crate::spectra::roots_of_unity(spec.n)?);
    Ok((0..spec.n)
        .map(|k| kernel_norm(spec, &roots, k, rho, samples, exec))
        .fold(0.0, f64::max))
}

/// `sum_{j != k} R_j^{nu+1} R_k^{-nu} / (R_k - R_j)`, which equals
/// `nu - (n-1)/2` for the n-th roots of unity.
///
/// No `1/n` prefactor: with it the value would be `(nu - (n-1)/2) / n`, and
/// only the unscaled sum turns the `rho^-2` coefficient of `z` into
/// `beta_2 + nu beta_1'`.
pub fn root_sum(roots: &[C64], k: usize, nu: usize) -> C64 {
    let rk = roots[k];
    let mut acc = C64::default();
    for (j, &rj) in roots.iter().enumerate() {
        if j != k {
            acc += rj.powu(nu as u32 + 1) * rk.powi(-(nu as i32)) / (rk - rj);
        }
    }
    acc
}
