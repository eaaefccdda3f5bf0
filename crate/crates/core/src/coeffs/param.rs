use crate::coeffs::{binomial, GTable, ParamSpec};
use crate::funcspace::{ExpPoly, PiecewisePoly};
use crate::{Result, C64};

/// Expansion coefficients for parameter-polynomial n-th order equations.
///
/// `y_k^(nu-1) = (rho R_k)^{nu-1} exp(rho R_k x) (sum_mu G_(mu)nu k / rho^mu + ...)`
/// with `G_(mu)0k` the first component of `Omega g~_(mu)k` for the companion
/// system conjugated by the Vandermonde matrix, and
/// `G_(mu)nu k = sum_{j=0}^{nu-1} C(nu-1, j) R_k^{-j} G_(mu-j)0k^(j)`.
#[derive(Debug, Clone)]
pub struct ParamCoeffs {
    pub roots: Vec<C64>,
    pub fprime: Vec<C64>,
    omega: Vec<PiecewisePoly>,
    first: Vec<Vec<ExpPoly>>,
}

impl ParamCoeffs {
    pub fn new(spec: &ParamSpec) -> Result<Self> {
        let rs = spec.root_system()?;
        let fprime = rs
            .derivative_values
            .clone()
            .expect("char_poly_roots fills F'");
        let n = spec.n;
        let zero = PiecewisePoly::zero(0.0, spec.t)?;
        let mut omega = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = zero.clone();
            for j in 0..n {
                if let Some(f) = spec.coeff(j, 1) {
                    acc = acc.add(&f.scale(rs.roots[k].powu(j as u32)))?;
                }
            }
            omega.push(acc.scale(-fprime[k].inv()));
        }
        let sys = spec.companion_reduce()?;
        let vander = sys
            .root_system()?
            .eigenvectors
            .expect("companion attaches eigenvectors");
        let g = GTable::new(&sys.conjugated(&vander)?)?;
        // first row of the Vandermonde matrix is all ones
        let first = (0..=spec.big_n)
            .map(|mu| {
                (0..n)
                    .map(|k| {
                        let parts: Vec<ExpPoly> = (0..n).map(|i| g.g(mu, k, i)).collect();
                        let factors: Vec<(C64, &PiecewisePoly)> = parts
                            .iter()
                            .map(|p| (C64::new(1.0, 0.0), &p.factor))
                            .collect();
                        Ok(ExpPoly::new(
                            parts[0].exponent.clone(),
                            PiecewisePoly::linear_combination(&factors)?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ParamCoeffs {
            roots: rs.roots,
            fprime,
            omega,
            first,
        })
    }

    /// `omega_k = -(1/F'(R_k)) sum_j p_{j,j+1} R_k^j`.
    pub fn omega(&self, k: usize) -> &PiecewisePoly {
        &self.omega[k]
    }

    /// `G_(0)k = exp(int_0^x omega_k)`.
    pub fn g0(&self, k: usize) -> Result<ExpPoly> {
        let phi = self.omega[k].antiderivative(0.0)?;
        let one = phi.scale(C64::default()).add_constant(C64::new(1.0, 0.0));
        Ok(ExpPoly::new(phi, one))
    }

    /// `G_(mu)0k`, the coefficients of `y_k` itself.
    pub fn first_component(&self, mu: usize, k: usize) -> &ExpPoly {
        &self.first[mu][k]
    }

    /// `G_(mu)nu k(x)` for `nu = 1..=n`.
    pub fn big_g(&self, mu: usize, nu: usize, k: usize, x: f64) -> Result<C64> {
        let r = self.roots[k];
        let mut acc = C64::default();
        for j in 0..nu.min(mu + 1) {
            let d = self.first[mu - j][k].nth_derivative(j)?;
            acc += d.value(x) * binomial(nu - 1, j) as f64 * r.powi(-(j as i32));
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{vandermonde, ProblemSpecN};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn zero_coefficients() {
        let spec = ParamSpec::new(1.0, 1, vec![c(-1.0), c(0.0), c(0.0)], vec![]).unwrap();
        let pc = ParamCoeffs::new(&spec).unwrap();
        for k in 0..3 {
            assert!(pc.omega(k).is_zero());
            assert!((pc.g0(k).unwrap().value(0.7) - c(1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn omega_for_n2() {
        let q = PiecewisePoly::real(&[0.5, 1.0, -2.0], 0.0, 1.0).unwrap();
        let spec = ParamSpec::new(1.0, 1, vec![c(-1.0), c(0.0)], vec![vec![q.clone()]]).unwrap();
        let pc = ParamCoeffs::new(&spec).unwrap();
        for k in 0..2 {
            let x = 0.3;
            let expect = -q.value(x) / (2.0 * pc.roots[k]);
            assert!((pc.omega(k).value(x) - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn omega_is_conjugated_diagonal_and_g_matches_rows() {
        let t = 1.0;
        let p = vec![
            vec![
                PiecewisePoly::real(&[1.0, 0.5], 0.0, t).unwrap(),
                PiecewisePoly::real(&[0.0, 0.0, 1.0], 0.0, t).unwrap(),
                PiecewisePoly::real(&[2.0], 0.0, t).unwrap(),
            ],
            vec![PiecewisePoly::real(&[0.0, 1.0], 0.0, t).unwrap()],
            vec![PiecewisePoly::real(&[-0.3, 0.2], 0.0, t).unwrap()],
        ];
        let spec = ParamSpec::new(t, 2, vec![c(-1.0), c(0.5), c(0.25)], p).unwrap();
        let pc = ParamCoeffs::new(&spec).unwrap();
        let sys = spec.companion_reduce().unwrap();
        let om = vandermonde(&pc.roots);
        let conj = sys.conjugated(&om).unwrap();
        let g = GTable::new(&conj).unwrap();
        for x in [0.0, 0.4, 1.0] {
            for k in 0..3 {
                assert!((pc.omega(k).value(x) - conj.a_at(1, x)[(k, k)]).norm() < 1e-12);
                assert!((pc.g0(k).unwrap().value(x) - g.q(k).value(x)).norm() < 1e-12);
                for mu in 0..=2 {
                    let row = &om * g.value(mu, k, x);
                    for nu in 1..=3 {
                        let expect = row[nu - 1] * pc.roots[k].powi(-(nu as i32 - 1));
                        let got = pc.big_g(mu, nu, k, x).unwrap();
                        assert!((got - expect).norm() < 1e-10, "mu={mu} nu={nu} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn sturm_liouville_first_component() {
        let q = PiecewisePoly::real(&[1.0, -1.0], 0.0, 1.0).unwrap();
        let nth = ProblemSpecN::new(2, 1.0, 0.0, 1, vec![q]).unwrap();
        let pc = ParamCoeffs::new(&ParamSpec::from_nth(&nth).unwrap()).unwrap();
        // no rho^1 coefficient: omega vanishes and G_(0) = 1
        for k in 0..2 {
            assert!(pc.omega(k).is_zero());
            assert!((pc.first_component(0, k).value(0.5) - c(1.0)).norm() < 1e-14);
        }
    }
}
