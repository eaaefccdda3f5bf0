use crate::coeffs::SystemSpec;
use crate::funcspace::{ExpPoly, PiecewisePoly};
use crate::{CVector, Error, Result, C64};

/// Formal-series coefficients `g_(mu)k`, `mu = 0..=N`, for a system whose
/// `A_(0) = diag(R_k)`.
///
/// Stored as `g_(mu)k = exp(phi_k) h_(mu)k` with `phi_k = int_0^x a_(1)kk`, so
/// `Q_k = exp(phi_k)` and `h_(0)k = e_k`. For `mu >= 1` the off-diagonal rows
/// of the recurrence are solved algebraically and the diagonal row is
/// integrated from `x = 0` with `h_(mu)kk(0) = 0`.
#[derive(Debug, Clone)]
pub struct GTable {
    pub n: usize,
    pub big_n: usize,
    pub roots: Vec<C64>,
    phi: Vec<PiecewisePoly>,
    dphi: Vec<PiecewisePoly>,
    /// `h[mu][k][nu]`
    h: Vec<Vec<Vec<PiecewisePoly>>>,
    /// exact `x`-derivatives of `h`
    dh: Vec<Vec<Vec<PiecewisePoly>>>,
}

impl GTable {
    pub fn new(spec: &SystemSpec) -> Result<Self> {
        Self::with_order(spec, spec.big_n)
    }

    /// Coefficients up to `mu = order`; `A_(i)` beyond the truncation count as zero.
    pub fn with_order(spec: &SystemSpec, order: usize) -> Result<Self> {
        if !spec.is_diagonal() {
            return Err(Error::InvalidSpec(
                "g table needs a diagonal A_(0); conjugate first".into(),
            ));
        }
        let n = spec.n;
        let t = spec.t;
        let roots: Vec<C64> = (0..n).map(|k| spec.a0[(k, k)]).collect();
        let zero = PiecewisePoly::zero(0.0, t)?;
        let a = |i: usize, r: usize, c: usize| -> Option<&PiecewisePoly> {
            spec.a
                .get(i.wrapping_sub(1))
                .filter(|_| i >= 1)
                .map(|m| &m[r][c])
                .filter(|f| !f.is_zero())
        };
        let mut phi = Vec::with_capacity(n);
        for k in 0..n {
            phi.push(match a(1, k, k) {
                Some(f) => f.antiderivative(0.0)?,
                None => zero.clone(),
            });
        }
        let mut h: Vec<Vec<Vec<PiecewisePoly>>> = vec![(0..n)
            .map(|k| {
                (0..n)
                    .map(|nu| {
                        if nu == k {
                            zero.add_constant(C64::new(1.0, 0.0))
                        } else {
                            zero.clone()
                        }
                    })
                    .collect()
            })
            .collect()];
        for mu in 1..=order {
            let mut level = Vec::with_capacity(n);
            for k in 0..n {
                let akk = a(1, k, k);
                // sum_{i=1}^{mu} (A_i h_{mu-i})_nu
                let forcing =
                    |nu: usize, h: &Vec<Vec<Vec<PiecewisePoly>>>| -> Result<PiecewisePoly> {
                        let mut acc = zero.clone();
                        for i in 1..=mu {
                            for j in 0..n {
                                if let Some(f) = a(i, nu, j) {
                                    let hj = &h[mu - i][k][j];
                                    if !hj.is_zero() {
                                        acc = acc.add(&f.mul(hj)?)?;
                                    }
                                }
                            }
                        }
                        Ok(acc)
                    };
                let mut col = vec![zero.clone(); n];
                for nu in (0..n).filter(|&nu| nu != k) {
                    let prev = &h[mu - 1][k][nu];
                    let mut v = if prev.is_zero() {
                        zero.clone()
                    } else {
                        prev.derivative()?
                    };
                    if let Some(f) = akk {
                        v = v.add(&f.mul(prev)?)?;
                    }
                    v = v.sub(&forcing(nu, &h)?)?;
                    let denom = roots[nu] - roots[k];
                    col[nu] = v.scale(denom.inv());
                }
                // h_mu,k' = sum_{j != k} a_(1)kj h_mu,j + sum_{i=2}^{mu+1} (A_i h_{mu+1-i})_k
                let mut dk = zero.clone();
                for j in (0..n).filter(|&j| j != k) {
                    if let Some(f) = a(1, k, j) {
                        dk = dk.add(&f.mul(&col[j])?)?;
                    }
                }
                for i in 2..=mu + 1 {
                    for j in 0..n {
                        if let Some(f) = a(i, k, j) {
                            let hj = &h[mu + 1 - i][k][j];
                            if !hj.is_zero() {
                                dk = dk.add(&f.mul(hj)?)?;
                            }
                        }
                    }
                }
                col[k] = dk.antiderivative(0.0)?;
                level.push(col);
            }
            h.push(level);
        }
        let dh = h
            .iter()
            .map(|lvl| {
                lvl.iter()
                    .map(|col| {
                        col.iter()
                            .map(|f| {
                                if f.is_zero() {
                                    Ok(zero.clone())
                                } else {
                                    f.derivative()
                                }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let dphi = (0..n)
            .map(|k| a(1, k, k).cloned().unwrap_or_else(|| zero.clone()))
            .collect();
        Ok(GTable {
            n,
            big_n: order,
            roots,
            phi,
            dphi,
            h,
            dh,
        })
    }

    /// `Q_k = exp(int_0^x a_(1)kk)` as an exponential-polynomial.
    pub fn q(&self, k: usize) -> ExpPoly {
        let one = self.phi[k]
            .scale(C64::default())
            .add_constant(C64::new(1.0, 0.0));
        ExpPoly::new(self.phi[k].clone(), one)
    }

    /// Component `nu` of `g_(mu)k`.
    pub fn g(&self, mu: usize, k: usize, nu: usize) -> ExpPoly {
        ExpPoly::new(self.phi[k].clone(), self.h[mu][k][nu].clone())
    }

    /// `g_(mu)k(x)`.
    pub fn value(&self, mu: usize, k: usize, x: f64) -> CVector {
        let e = self.phi[k].value(x).exp();
        CVector::from_iterator(self.n, self.h[mu][k].iter().map(|f| e * f.value(x)))
    }

    /// `g_(mu)k'(x)` from the exact derivative `exp(phi)(h' + phi' h)`.
    pub fn derivative(&self, mu: usize, k: usize, x: f64) -> CVector {
        let e = self.phi[k].value(x).exp();
        let a1kk = self.dphi[k].value(x);
        CVector::from_iterator(
            self.n,
            self.h[mu][k]
                .iter()
                .zip(&self.dh[mu][k])
                .map(|(f, df)| e * (df.value(x) + a1kk * f.value(x))),
        )
    }

    /// `sum_{mu=0}^{N} g_(mu)k(x) / rho^mu`.
    pub fn partial_sum(&self, k: usize, x: f64, rho: C64) -> CVector {
        let inv = rho.inv();
        let mut pw = C64::new(1.0, 0.0);
        let mut acc = CVector::zeros(self.n);
        for mu in 0..=self.big_n {
            acc += self.value(mu, k, x) * pw;
            pw *= inv;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::zero_matrix;
    use crate::CMatrix;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn diag(r: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(r.len(), r.iter().map(|&v| c(v))))
    }

    fn sample_system(big_n: usize) -> SystemSpec {
        let t = 1.0;
        let mut a1 = zero_matrix(3, t).unwrap();
        a1[0][0] = PiecewisePoly::real(&[0.5, 1.0], 0.0, t).unwrap();
        a1[0][1] = PiecewisePoly::real(&[1.0, 0.0, -1.0], 0.0, t).unwrap();
        a1[1][2] = PiecewisePoly::polynomial(vec![C64::new(0.0, 1.0), c(0.5)], 0.0, t).unwrap();
        a1[2][0] = PiecewisePoly::real(&[-0.25, 2.0], 0.0, t).unwrap();
        a1[2][2] = PiecewisePoly::real(&[0.0, 0.0, 1.0], 0.0, t).unwrap();
        let mut a2 = zero_matrix(3, t).unwrap();
        a2[1][1] = PiecewisePoly::real(&[1.0, 1.0], 0.0, t).unwrap();
        a2[0][2] = PiecewisePoly::real(&[0.3], 0.0, t).unwrap();
        let mut a3 = zero_matrix(3, t).unwrap();
        a3[2][1] = PiecewisePoly::real(&[0.0, 0.7], 0.0, t).unwrap();
        let a0 = CMatrix::from_diagonal(&CVector::from_vec(vec![
            c(1.0),
            C64::new(-0.5, 0.8),
            C64::new(-0.5, -0.8),
        ]));
        SystemSpec::new(t, big_n, a0, vec![a1, a2, a3]).unwrap()
    }

    #[test]
    fn unperturbed_system() {
        let spec = SystemSpec::new(1.0, 2, diag(&[1.0, -1.0]), vec![]).unwrap();
        let g = GTable::new(&spec).unwrap();
        for k in 0..2 {
            assert!((g.q(k).value(0.6) - c(1.0)).norm() < 1e-15);
            for mu in 1..=2 {
                assert!(g.value(mu, k, 0.6).norm() == 0.0);
            }
        }
    }

    #[test]
    fn constant_diagonal_gives_exponential() {
        let mut a1 = zero_matrix(2, 1.0).unwrap();
        a1[0][0] = PiecewisePoly::constant(c(0.8), 0.0, 1.0).unwrap();
        let spec = SystemSpec::new(1.0, 0, diag(&[1.0, -1.0]), vec![a1]).unwrap();
        let g = GTable::new(&spec).unwrap();
        assert!((g.q(0).value(0.5) - c((0.4f64).exp())).norm() < 1e-15);
    }

    #[test]
    fn first_order_off_diagonal_formula() {
        let spec = sample_system(1);
        let g = GTable::new(&spec).unwrap();
        for k in 0..3 {
            for nu in (0..3).filter(|&nu| nu != k) {
                for x in [0.1, 0.5, 0.9] {
                    let expect =
                        spec.a_at(1, x)[(nu, k)] * g.q(k).value(x) / (g.roots[k] - g.roots[nu]);
                    assert!((g.value(1, k, x)[nu] - expect).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn recurrence_residual_vanishes() {
        let spec = sample_system(3);
        let g = GTable::new(&spec).unwrap();
        for k in 0..3 {
            for x in [0.0, 0.2, 0.65, 1.0] {
                for mu in 0..=3 {
                    // (A0 - R_k) g_mu - g'_{mu-1} + sum_i A_i g_{mu-i} = 0
                    let mut r =
                        (&spec.a0 - CMatrix::identity(3, 3) * g.roots[k]) * g.value(mu, k, x);
                    if mu >= 1 {
                        r -= g.derivative(mu - 1, k, x);
                        for i in 1..=mu {
                            r += spec.a_at(i, x) * g.value(mu - i, k, x);
                        }
                    }
                    assert!(r.norm() < 1e-10, "k={k} mu={mu} x={x}: {}", r.norm());
                }
                // and the diagonal row at the next order (its solvability condition)
                let mut r = -g.derivative(3, k, x)[k];
                for i in 1..=4 {
                    r += (spec.a_at(i, x) * g.value(4 - i, k, x))[k];
                }
                assert!(r.norm() < 1e-10);
            }
            for mu in 1..=3 {
                assert!(g.value(mu, k, 0.0)[k].norm() < 1e-15);
            }
        }
    }

    #[test]
    fn derivative_is_exact() {
        let spec = sample_system(2);
        let g = GTable::new(&spec).unwrap();
        let (x, eps) = (0.4, 1e-6);
        let fd = (g.value(2, 2, x + eps) - g.value(2, 2, x - eps)) / c(2.0 * eps);
        assert!((fd - g.derivative(2, 2, x)).norm() < 1e-7);
    }
}
