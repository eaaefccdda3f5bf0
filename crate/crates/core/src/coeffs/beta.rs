use crate::coeffs::ProblemSpecN;
use crate::funcspace::PiecewisePoly;
use crate::{Error, Result, C64};

/// Binomial coefficient as an exact integer.
pub fn binomial(n: usize, r: usize) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// How the integration constant of each `beta_s` is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BetaNormalization {
    /// Integrate only the coefficient term from `alpha`; the derivative terms
    /// are integrated exactly, so `beta_2 = -(1/n) int (p_{n-3} + p_{n-2} beta_1)
    /// - (n-1)/2 beta_1'`. This is the form that appears in the sharpened
    /// asymptotics of `z` for the anchored integral equation.
    #[default]
    Anchored,
    /// `beta_s(alpha) = 0` for every `s >= 1`.
    ZeroAtAnchor,
}

/// `beta_0 = 1, beta_1, ..., beta_{S}` for an n-th order problem.
///
/// With `y = exp(rho R x) sum_s beta_s (rho R)^{-s}`, matching powers of
/// `rho` in the equation gives
/// `n beta_s' = -sum_{r=2}^n C(n,r) beta_{s+1-r}^(r) - sum_m p_m beta_{s-n+m+1, m}`
/// with `beta_{s nu} = sum_{r=0}^{nu} C(nu,r) beta_{s-r}^(r)`.
#[derive(Debug, Clone)]
pub struct BetaTable {
    pub n: usize,
    pub alpha: f64,
    pub normalization: BetaNormalization,
    beta: Vec<PiecewisePoly>,
}

impl BetaTable {
    /// Coefficients `beta_1..beta_{N+1}` using the spec's smoothness level.
    pub fn new(spec: &ProblemSpecN, normalization: BetaNormalization) -> Result<Self> {
        Self::with_count(spec, spec.big_n + 1, normalization)
    }

    pub fn with_count(
        spec: &ProblemSpecN,
        count: usize,
        normalization: BetaNormalization,
    ) -> Result<Self> {
        let n = spec.n;
        let mut table = BetaTable {
            n,
            alpha: spec.alpha,
            normalization,
            beta: vec![PiecewisePoly::constant(C64::new(1.0, 0.0), 0.0, spec.t)?],
        };
        let scale = C64::new(-1.0 / n as f64, 0.0);
        for s in 1..=count {
            // coefficient terms, integrated from alpha
            let mut rhs = PiecewisePoly::zero(0.0, spec.t)?;
            for (m, p) in spec.p.iter().enumerate() {
                let idx = s as isize - n as isize + m as isize + 1;
                if idx < 0 || p.is_zero() {
                    continue;
                }
                let b = table.beta_nu(idx as usize, m)?;
                rhs = rhs.add(&p.mul(&b)?)?;
            }
            let mut beta_s = rhs.antiderivative(spec.alpha)?;
            // derivative terms C(n,r) beta_{s+1-r}^(r), r >= 2
            let mut deriv = PiecewisePoly::zero(0.0, spec.t)?;
            for r in 2..=n {
                if r > s {
                    break;
                }
                let j = s + 1 - r;
                if j == 0 {
                    continue;
                }
                let d = table.beta[j].nth_derivative(r - 1)?;
                deriv = deriv.add(&d.scale(C64::new(binomial(n, r) as f64, 0.0)))?;
            }
            match normalization {
                BetaNormalization::Anchored => beta_s = beta_s.add(&deriv)?,
                BetaNormalization::ZeroAtAnchor => {
                    let shift = deriv.value(spec.alpha);
                    beta_s = beta_s.add(&deriv.add_constant(-shift))?;
                }
            }
            table.beta.push(beta_s.scale(scale));
        }
        Ok(table)
    }

    /// Highest index `S` available.
    pub fn count(&self) -> usize {
        self.beta.len() - 1
    }

    /// `beta_s`; `beta_0 = 1`.
    pub fn beta(&self, s: usize) -> &PiecewisePoly {
        &self.beta[s]
    }

    /// `beta_{s nu} = sum_{r=0}^{nu} C(nu,r) beta_{s-r}^(r)`.
    pub fn beta_nu(&self, s: usize, nu: usize) -> Result<PiecewisePoly> {
        if s >= self.beta.len() {
            return Err(Error::InvalidSpec(format!(
                "beta_{s} requested but only beta_0..beta_{} are computed",
                self.count()
            )));
        }
        let mut acc = self.beta[s].clone();
        for r in 1..=nu.min(s) {
            let j = s - r;
            if j == 0 {
                continue; // beta_0 is constant
            }
            let d = self.beta[j].nth_derivative(r)?;
            acc = acc.add(&d.scale(C64::new(binomial(nu, r) as f64, 0.0)))?;
        }
        Ok(acc)
    }

    /// `1 + sum_{s=1}^{S} beta_{s nu}(x) / (rho R)^s`.
    pub fn partial_sum(&self, nu: usize, x: f64, rho_r: C64, terms: usize) -> Result<C64> {
        let inv = rho_r.inv();
        let mut acc = C64::new(1.0, 0.0);
        let mut pw = inv;
        for s in 1..=terms.min(self.count()) {
            acc += self.beta_nu(s, nu)?.value(x) * pw;
            pw *= inv;
        }
        Ok(acc)
    }
}

/// Coefficients of `(rho R)^{n-q}`, `q = 0..`, in
/// `exp(-rho R x) (y^(n) + sum p_m y^(m) - rho^n y)` for the truncated series
/// `y = exp(rho R x) sum_{s<=S} beta_s (rho R)^{-s}`.
///
/// Built by differentiating the series term by term, independently of the
/// recurrence, so it can certify it.
pub fn series_residual(spec: &ProblemSpecN, table: &BetaTable) -> Result<Vec<PiecewisePoly>> {
    let n = spec.n;
    let s_max = table.count();
    // derivs[m][q]: coefficient of (rho R)^{m-q} in exp(-rho R x) y^(m)
    let len = s_max + n + 1;
    let zero = PiecewisePoly::zero(0.0, spec.t)?;
    let mut current: Vec<PiecewisePoly> = (0..len)
        .map(|q| {
            if q <= s_max {
                table.beta(q).clone()
            } else {
                zero.clone()
            }
        })
        .collect();
    let mut derivs = vec![current.clone()];
    for _ in 1..=n {
        // (e^{rho R x} sum c_q (rho R)^{m-q})' = e^{..} sum (c_q + c_{q-1}') (rho R)^{m+1-q}
        let mut next = Vec::with_capacity(len);
        for q in 0..len {
            let mut v = current[q].clone();
            if q >= 1 && !current[q - 1].is_zero() {
                v = v.add(&current[q - 1].derivative()?)?;
            }
            next.push(v);
        }
        current = next;
        derivs.push(current.clone());
    }
    let mut out = Vec::with_capacity(len);
    for q in 0..len {
        // rho^n y contributes beta_q at (rho R)^{n-q} because (rho R)^n = rho^n
        let mut c = derivs[n][q].sub(&derivs[0][q])?;
        for (m, p) in spec.p.iter().enumerate() {
            // p_m y^(m) has (rho R)^{m-q'}; it lands at (rho R)^{n-q} for q' = q - (n - m)
            if let Some(qq) = q.checked_sub(n - m) {
                c = c.add(&p.mul(&derivs[m][qq])?)?;
            }
        }
        out.push(c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn constant_potential(cst: f64, big_n: usize) -> ProblemSpecN {
        let p0 = PiecewisePoly::constant(c(cst), 0.0, 1.0).unwrap();
        ProblemSpecN::new(2, 1.0, 0.0, big_n, vec![p0]).unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(7, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(30, 15), 155117520);
    }

    #[test]
    fn free_problem_has_no_corrections() {
        let spec = ProblemSpecN::free(3, 1.0).unwrap();
        let t = BetaTable::with_count(&spec, 4, BetaNormalization::Anchored).unwrap();
        for s in 1..=4 {
            assert!(t.beta(s).is_zero());
        }
    }

    #[test]
    fn constant_potential_n2() {
        let cst = 1.7;
        let spec = constant_potential(cst, 1);
        let zero = BetaTable::new(&spec, BetaNormalization::ZeroAtAnchor).unwrap();
        let anch = BetaTable::new(&spec, BetaNormalization::Anchored).unwrap();
        for x in [0.0, 0.3, 1.0] {
            assert!((zero.beta(1).value(x) - c(-cst * x / 2.0)).norm() < 1e-14);
            assert!((zero.beta(2).value(x) - c(cst * cst * x * x / 8.0)).norm() < 1e-14);
            // anchored form carries -(n-1)/2 beta_1' = c/4
            assert!(
                (anch.beta(2).value(x) - c(cst * cst * x * x / 8.0 + cst / 4.0)).norm() < 1e-14
            );
        }
    }

    #[test]
    fn matches_expansion_of_exact_exponent() {
        // y = exp(x sqrt(rho^2 - c)) = exp(rho x) (1 - c x/(2 rho) + (c^2 x^2/8 - c x/(8 rho)...)
        // so exp(x (sqrt(rho^2 - c) - rho)) has rho^{-2} coefficient c^2 x^2 / 8 for R = 1
        let cst = 0.9;
        let spec = constant_potential(cst, 1);
        let t = BetaTable::new(&spec, BetaNormalization::ZeroAtAnchor).unwrap();
        let x = 0.7;
        for rho in [1e3f64, 2e3] {
            let exact = (x * ((rho * rho - cst).sqrt() - rho)).exp();
            let approx = 1.0 + t.beta(1).value(x).re / rho + t.beta(2).value(x).re / (rho * rho);
            assert!((exact - approx).abs() < 2.0 / rho.powi(3));
        }
    }

    #[test]
    fn nu_shift_and_first_term() {
        let p1 = PiecewisePoly::real(&[1.0, 1.0], 0.0, 1.0).unwrap();
        let p0 = PiecewisePoly::real(&[0.0, 0.0, 1.0], 0.0, 1.0).unwrap();
        let spec = ProblemSpecN::new(3, 1.0, 0.2, 2, vec![p0, p1.clone()]).unwrap();
        let t = BetaTable::new(&spec, BetaNormalization::Anchored).unwrap();
        let d1 = t.beta(1).derivative().unwrap();
        for x in [0.2, 0.5, 0.9] {
            assert!((d1.value(x) + p1.value(x) / 3.0).norm() < 1e-14);
            for nu in 0..3 {
                assert_eq!(t.beta_nu(1, nu).unwrap().value(x), t.beta(1).value(x));
                let b2 = t.beta_nu(2, nu).unwrap().value(x);
                let expect = t.beta(2).value(x) + d1.value(x) * nu as f64;
                assert!((b2 - expect).norm() < 1e-14);
            }
            assert_eq!(t.beta_nu(3, 0).unwrap().value(x), t.beta(3).value(x));
        }
        assert!(t.beta(1).value(0.2).norm() < 1e-15);
    }

    #[test]
    fn recurrence_kills_leading_residual_powers() {
        let p1 = PiecewisePoly::real(&[1.0, -0.5, 0.25], 0.0, 1.0).unwrap();
        let p0 = PiecewisePoly::real(&[0.3, 0.0, 1.0], 0.0, 1.0).unwrap();
        for (n, p) in [(2, vec![p0.clone()]), (3, vec![p0, p1])] {
            for big_n in 0..=2 {
                let spec = ProblemSpecN::new(n, 1.0, 0.0, big_n, p.clone()).unwrap();
                for norm in [BetaNormalization::Anchored, BetaNormalization::ZeroAtAnchor] {
                    let t = BetaTable::new(&spec, norm).unwrap();
                    let res = series_residual(&spec, &t).unwrap();
                    for (q, r) in res.iter().enumerate().take(big_n + 3) {
                        for x in [0.0, 0.31, 0.77, 1.0] {
                            assert!(r.value(x).norm() < 1e-10, "n={n} N={big_n} q={q}");
                        }
                    }
                    // the first uncancelled power is generically nonzero
                    assert!(res[big_n + 3].value(0.5).norm() > 1e-6);
                }
            }
        }
    }
}
