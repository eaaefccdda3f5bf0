use nalgebra::DMatrix;

use crate::funcspace::{fmt_class, PiecewisePoly};
use crate::spectra::{char_poly_roots, companion, eigen_system, RootSystem};
use crate::{CMatrix, Error, Result, C64};

/// Matrix of coefficient functions, row-major.
pub type PolyMatrix = Vec<Vec<PiecewisePoly>>;

/// `y^(n) + sum_{m=0}^{n-2} p_m(x) y^(m) = rho^n y` on `[0, T]`, anchored at `alpha`.
///
/// `big_n` is the smoothness level: `p_m` must lie in `W_{N+m-n+2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpecN {
    pub n: usize,
    pub t: f64,
    pub alpha: f64,
    pub big_n: usize,
    pub p: Vec<PiecewisePoly>,
}

impl ProblemSpecN {
    pub fn new(n: usize, t: f64, alpha: f64, big_n: usize, p: Vec<PiecewisePoly>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSpec(format!(
                "order n = {n} must be at least 2"
            )));
        }
        check_interval(t)?;
        if !(0.0..t).contains(&alpha) {
            return Err(Error::InvalidSpec(format!(
                "alpha = {alpha} must lie in [0, {t})"
            )));
        }
        if p.len() != n - 1 {
            return Err(Error::InvalidSpec(format!(
                "expected {} coefficients p_0..p_{}, got {}",
                n - 1,
                n - 2,
                p.len()
            )));
        }
        for (m, f) in p.iter().enumerate() {
            check_domain(f, t, &format!("p_{m}"))?;
            let need = (big_n + m + 2).saturating_sub(n);
            check_class(f, need, &format!("p_{m}"))?;
        }
        Ok(ProblemSpecN {
            n,
            t,
            alpha,
            big_n,
            p,
        })
    }

    /// All coefficients vanish: the free equation `y^(n) = rho^n y`.
    pub fn free(n: usize, t: f64) -> Result<Self> {
        let p = (0..n.saturating_sub(1))
            .map(|_| PiecewisePoly::zero(0.0, t))
            .collect::<Result<_>>()?;
        Self::new(n, t, 0.0, 0, p)
    }

    pub fn is_free(&self) -> bool {
        self.p.iter().all(|f| f.is_zero())
    }

    /// Same problem, different anchor.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.n, self.t, alpha, self.big_n, self.p.clone())
    }

    /// Every interior breakpoint of the coefficients.
    pub fn breaks(&self) -> Vec<f64> {
        collect_breaks(self.p.iter())
    }
}

/// `(1/rho) Y' = (A_(0) + sum_{mu=1}^M A_(mu)(x) / rho^mu) Y` on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub n: usize,
    pub t: f64,
    pub big_n: usize,
    pub a0: CMatrix,
    /// `a[mu - 1]` is `A_(mu)`; padded with zeros to at least `N + 1` terms.
    pub a: Vec<PolyMatrix>,
    /// Roots and eigenvectors to use instead of those from [`eigen_system`]
    /// (the companion reduction supplies the Vandermonde matrix).
    pub roots: Option<RootSystem>,
}

impl SystemSpec {
    pub fn new(t: f64, big_n: usize, a0: CMatrix, mut a: Vec<PolyMatrix>) -> Result<Self> {
        check_interval(t)?;
        let n = a0.nrows();
        eigen_system(&a0)?;
        for (i, m) in a.iter().enumerate() {
            let mu = i + 1;
            if m.len() != n || m.iter().any(|row| row.len() != n) {
                return Err(Error::InvalidSpec(format!("A_({mu}) must be {n}x{n}")));
            }
            for (r, row) in m.iter().enumerate() {
                for (c, f) in row.iter().enumerate() {
                    let name = format!("a_({mu}){}{}", r + 1, c + 1);
                    check_domain(f, t, &name)?;
                    if mu <= big_n {
                        check_class(f, big_n - mu + 1, &name)?;
                    }
                }
            }
        }
        while a.len() < big_n + 1 {
            a.push(zero_matrix(n, t)?);
        }
        Ok(SystemSpec {
            n,
            t,
            big_n,
            a0,
            a,
            roots: None,
        })
    }

    /// The series truncation order `M`.
    pub fn order(&self) -> usize {
        self.a.len()
    }

    pub fn with_big_n(&self, big_n: usize) -> Result<Self> {
        let mut s = Self::new(self.t, big_n, self.a0.clone(), self.a.clone())?;
        s.roots = self.roots.clone();
        Ok(s)
    }

    /// Eigenvalues of `A_(0)` with the eigenvector matrix in use.
    pub fn root_system(&self) -> Result<RootSystem> {
        match &self.roots {
            Some(rs) => Ok(rs.clone()),
            None => eigen_system(&self.a0),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.a0[(i, j)].norm() == 0.0))
    }

    /// `A_(mu)(x)` as a numeric matrix, zero beyond the truncation.
    pub fn a_at(&self, mu: usize, x: f64) -> CMatrix {
        match self.a.get(mu.wrapping_sub(1)) {
            Some(m) if mu >= 1 => eval_matrix(m, x),
            _ => CMatrix::zeros(self.n, self.n),
        }
    }

    /// `A(x, rho)` including `A_(0)`.
    pub fn a_full(&self, x: f64, rho: C64) -> CMatrix {
        let mut acc = self.a0.clone();
        let inv = rho.inv();
        let mut pw = inv;
        for m in &self.a {
            acc += eval_matrix(m, x) * pw;
            pw *= inv;
        }
        acc
    }

    /// `Omega^{-1} A Omega` for every term; `A_(0)` becomes `diag(R_k)`.
    pub fn conjugated(&self, omega: &CMatrix) -> Result<SystemSpec> {
        let inv = omega
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular("eigenvector matrix is singular".into()))?;
        let a0 = &inv * &self.a0 * omega;
        let n = self.n;
        let mut diag = CMatrix::zeros(n, n);
        for k in 0..n {
            diag[(k, k)] = a0[(k, k)];
        }
        let mut a = Vec::with_capacity(self.a.len());
        for m in &self.a {
            let mut out = Vec::with_capacity(n);
            for r in 0..n {
                let mut row = Vec::with_capacity(n);
                for c in 0..n {
                    let mut terms = Vec::new();
                    for i in 0..n {
                        for j in 0..n {
                            let w = inv[(r, i)] * omega[(j, c)];
                            if w.norm() > 0.0 && !m[i][j].is_zero() {
                                terms.push((w, &m[i][j]));
                            }
                        }
                    }
                    row.push(if terms.is_empty() {
                        PiecewisePoly::zero(0.0, self.t)?
                    } else {
                        PiecewisePoly::linear_combination(&terms)?
                    });
                }
                out.push(row);
            }
            a.push(out);
        }
        Ok(SystemSpec {
            n,
            t: self.t,
            big_n: self.big_n,
            a0: diag,
            a,
            roots: None,
        })
    }

    pub fn breaks(&self) -> Vec<f64> {
        collect_breaks(self.a.iter().flatten().flatten())
    }
}

/// `y^(n) + sum_k P_k(x, rho) y^(k) = 0` with
/// `P_k = rho^{n-k} p_kk + rho^{n-k-1} p_{k,k+1}(x) + ... + p_kn(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub n: usize,
    pub t: f64,
    pub big_n: usize,
    /// Constants `p_00, ..., p_{n-1,n-1}`.
    pub p_diag: Vec<C64>,
    /// `p[k][j - 1] = p_{k,k+j}(x)`, `j = 1..=n-k`.
    pub p: Vec<Vec<PiecewisePoly>>,
}

impl ParamSpec {
    pub fn new(
        t: f64,
        big_n: usize,
        p_diag: Vec<C64>,
        mut p: Vec<Vec<PiecewisePoly>>,
    ) -> Result<Self> {
        check_interval(t)?;
        let n = p_diag.len();
        if n < 2 {
            return Err(Error::InvalidSpec(format!(
                "order n = {n} must be at least 2"
            )));
        }
        if p_diag[0].norm() == 0.0 {
            return Err(Error::ConditionI1("p_00 = 0".into()));
        }
        char_poly_roots(&p_diag)?;
        if p.len() > n {
            return Err(Error::InvalidSpec(format!(
                "p has {} rows, at most {n} allowed",
                p.len()
            )));
        }
        p.resize(n, Vec::new());
        for (k, row) in p.iter_mut().enumerate() {
            if row.len() > n - k {
                return Err(Error::InvalidSpec(format!(
                    "row {k} of p lists {} functions, at most {} allowed",
                    row.len(),
                    n - k
                )));
            }
            while row.len() < n - k {
                row.push(PiecewisePoly::zero(0.0, t)?);
            }
            for (i, f) in row.iter().enumerate() {
                let j = i + 1;
                let name = format!("p_{},{}", k, k + j);
                check_domain(f, t, &name)?;
                if j <= big_n {
                    check_class(f, big_n - j + 1, &name)?;
                }
            }
        }
        Ok(ParamSpec {
            n,
            t,
            big_n,
            p_diag,
            p,
        })
    }

    /// `p_{k,k+j}`, zero when out of range.
    pub fn coeff(&self, k: usize, j: usize) -> Option<&PiecewisePoly> {
        self.p.get(k).and_then(|row| row.get(j.wrapping_sub(1)))
    }

    pub fn root_system(&self) -> Result<RootSystem> {
        char_poly_roots(&self.p_diag)
    }

    /// Embeds `y^(n) + sum p_m y^(m) = rho^n y`: `p_00 = -1`, `p_{m,n} = p_m`.
    pub fn from_nth(spec: &ProblemSpecN) -> Result<Self> {
        let n = spec.n;
        let mut p_diag = vec![C64::default(); n];
        p_diag[0] = C64::new(-1.0, 0.0);
        let mut p = Vec::with_capacity(n);
        for k in 0..n {
            let mut row = Vec::with_capacity(n - k);
            for j in 1..=n - k {
                row.push(if j == n - k && k + 2 <= n {
                    spec.p[k].clone()
                } else {
                    PiecewisePoly::zero(0.0, spec.t)?
                });
            }
            p.push(row);
        }
        Self::new(spec.t, spec.big_n, p_diag, p)
    }

    /// The equivalent first-order system for `(y, y'/rho, ..., y^(n-1)/rho^{n-1})`.
    ///
    /// `A_(0)` is the companion matrix of `F`; `A_(mu)` has only its last row,
    /// `-p_{k,k+mu}` in column `k`. The Vandermonde eigenvectors `[R_k^{nu-1}]`
    /// are attached.
    pub fn companion_reduce(&self) -> Result<SystemSpec> {
        let n = self.n;
        let a0 = companion(&self.p_diag);
        let order = n.max(self.big_n + 1);
        let mut a = Vec::with_capacity(order);
        for mu in 1..=order {
            let mut m = zero_matrix(n, self.t)?;
            for k in 0..n {
                if let Some(f) = self.coeff(k, mu) {
                    m[n - 1][k] = f.scale(C64::new(-1.0, 0.0));
                }
            }
            a.push(m);
        }
        let mut rs = self.root_system()?;
        rs.eigenvectors = Some(vandermonde(&rs.roots));
        let mut spec = SystemSpec::new(self.t, self.big_n, a0, a)?;
        spec.roots = Some(rs);
        Ok(spec)
    }
}

/// `[R_k^{nu-1}]`: row `nu`, column `k`.
pub fn vandermonde(roots: &[C64]) -> CMatrix {
    let n = roots.len();
    DMatrix::from_fn(n, n, |nu, k| roots[k].powu(nu as u32))
}

pub fn zero_matrix(n: usize, t: f64) -> Result<PolyMatrix> {
    (0..n)
        .map(|_| (0..n).map(|_| PiecewisePoly::zero(0.0, t)).collect())
        .collect()
}

pub fn eval_matrix(m: &PolyMatrix, x: f64) -> CMatrix {
    let n = m.len();
    DMatrix::from_fn(n, n, |r, c| m[r][c].value(x))
}

fn collect_breaks<'a>(fs: impl Iterator<Item = &'a PiecewisePoly>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for f in fs {
        let b = f.breakpoints();
        out.extend_from_slice(&b[1..b.len() - 1]);
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
    out
}

fn check_interval(t: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "T = {t} must be finite and positive"
        )));
    }
    Ok(())
}

fn check_domain(f: &PiecewisePoly, t: f64, name: &str) -> Result<()> {
    let (a, b) = f.domain();
    if a != 0.0 || (b - t).abs() > 1e-12 * t {
        return Err(Error::InvalidSpec(format!(
            "{name} is defined on [{a}, {b}], expected [0, {t}]"
        )));
    }
    Ok(())
}

fn check_class(f: &PiecewisePoly, need: usize, name: &str) -> Result<()> {
    if (f.smoothness() as u64) < need as u64 {
        return Err(Error::Smoothness(format!(
            "{name} is in W_{} but W_{need} is required",
            fmt_class(f.smoothness())
        )));
    }
    Ok(())
}
