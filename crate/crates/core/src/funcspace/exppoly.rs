use crate::funcspace::PiecewisePoly;
use crate::{Result, C64};

/// `exp(exponent(x)) * factor(x)` with both parts piecewise polynomial.
///
/// Closed under differentiation: `(e^phi h)' = e^phi (h' + phi' h)`, which is
/// what the expansion coefficients of first-order systems need, since their
/// leading term `Q_k = exp(int a_kk)` is not itself a polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPoly {
    pub exponent: PiecewisePoly,
    pub factor: PiecewisePoly,
}

impl ExpPoly {
    pub fn new(exponent: PiecewisePoly, factor: PiecewisePoly) -> Self {
        ExpPoly { exponent, factor }
    }

    pub fn value(&self, x: f64) -> C64 {
        self.exponent.value(x).exp() * self.factor.value(x)
    }

    pub fn derivative(&self) -> Result<Self> {
        let dphi = self.exponent.derivative()?;
        let factor = self.factor.derivative()?.add(&dphi.mul(&self.factor)?)?;
        Ok(ExpPoly::new(self.exponent.clone(), factor))
    }

    pub fn nth_derivative(&self, order: usize) -> Result<Self> {
        let mut d = self.clone();
        for _ in 0..order {
            d = d.derivative()?;
        }
        Ok(d)
    }

    pub fn scale(&self, c: C64) -> Self {
        ExpPoly::new(self.exponent.clone(), self.factor.scale(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_matches_finite_difference() {
        let phi = PiecewisePoly::real(&[0.0, 0.5, -0.25], 0.0, 1.0).unwrap();
        let h = PiecewisePoly::polynomial(vec![C64::new(1.0, 1.0), C64::new(0.0, 2.0)], 0.0, 1.0)
            .unwrap();
        let g = ExpPoly::new(phi, h);
        let d = g.derivative().unwrap();
        let x = 0.4;
        let eps = 1e-6;
        let fd = (g.value(x + eps) - g.value(x - eps)) / (2.0 * eps);
        assert!((fd - d.value(x)).norm() < 1e-8);
    }
}
