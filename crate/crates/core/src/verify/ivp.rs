use ode_solvers::{DVector, Dop853, OutputType, System};

use crate::coeffs::{ProblemSpecN, SystemSpec};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Relative tolerance of the reference integrator.
pub const RTOL: f64 = 1e-10;
const ATOL: f64 = 1e-13;

/// `w' = M(x) w` for a complex vector `w`.
pub struct LinearOde {
    pub dim: usize,
    matrix: Box<dyn Fn(f64) -> CMatrix + Send + Sync>,
}

impl LinearOde {
    pub fn new(dim: usize, matrix: impl Fn(f64) -> CMatrix + Send + Sync + 'static) -> Self {
        LinearOde {
            dim,
            matrix: Box::new(matrix),
        }
    }

    /// The n-th order equation in the scaled variables `w_nu = y^(nu) / rho^nu`:
    /// `w_nu' = rho w_{nu+1}` and `w_{n-1}' = rho w_0 - sum_m p_m rho^{m+1-n} w_m`.
    pub fn nth(spec: &ProblemSpecN, rho: C64) -> Self {
        let n = spec.n;
        let p = spec.p.clone();
        LinearOde::new(n, move |x| {
            let mut m = CMatrix::zeros(n, n);
            for nu in 0..n - 1 {
                m[(nu, nu + 1)] = rho;
            }
            m[(n - 1, 0)] = rho;
            for (j, pj) in p.iter().enumerate() {
                m[(n - 1, j)] -= pj.value(x) * rho.powi(j as i32 + 1 - n as i32);
            }
            m
        })
    }

    /// `Y' = rho A(x, rho) Y`.
    pub fn system(spec: &SystemSpec, rho: C64) -> Self {
        let spec = spec.clone();
        LinearOde::new(spec.n, move |x| spec.a_full(x, rho) * rho)
    }

    pub fn matrix(&self, x: f64) -> CMatrix {
        (self.matrix)(x)
    }
}

struct Shifted<'a> {
    ode: &'a LinearOde,
    shift: C64,
}

// The independent variable rides along as the last state component: the
// stepper's stage abscissae are not reliable for non-autonomous systems.
impl System<f64, DVector<f64>> for Shifted<'_> {
    fn system(&self, _x: f64, y: &DVector<f64>, dy: &mut DVector<f64>) {
        let n = self.ode.dim;
        let x = y[2 * n];
        dy[2 * n] = 1.0;
        let u = CVector::from_iterator(n, (0..n).map(|i| C64::new(y[2 * i], y[2 * i + 1])));
        let m = self.ode.matrix(x);
        let du = m * &u - u * self.shift;
        for i in 0..n {
            dy[2 * i] = du[i].re;
            dy[2 * i + 1] = du[i].im;
        }
    }
}

/// Integrates the renormalized solution `u = exp(-shift x) w` from `x0` to `x1`
/// (either direction) with an adaptive 8th-order Runge-Kutta method.
pub fn ivp_oracle(
    ode: &LinearOde,
    shift: C64,
    x0: f64,
    seed: &CVector,
    x1: f64,
) -> Result<CVector> {
    let n = ode.dim;
    if seed.len() != n || seed.iter().any(|c| !c.is_finite()) {
        return Err(Error::Integrator(
            "seed must be finite with one entry per unknown".into(),
        ));
    }
    if x0 == x1 {
        return Ok(seed.clone());
    }
    let y0 = DVector::from_iterator(
        2 * n + 1,
        seed.iter()
            .flat_map(|c| [c.re, c.im])
            .chain(std::iter::once(x0)),
    );
    // stiffness detection off: the renormalized systems are mildly stiff by design
    let span = (x1 - x0).abs();
    let mut stepper = Dop853::from_param(
        Shifted { ode, shift },
        x0,
        x1,
        span,
        y0,
        RTOL,
        ATOL,
        0.9,
        0.0,
        0.333,
        6.0,
        span,
        0.0,
        2_000_000,
        u32::MAX,
        OutputType::Sparse,
    );
    stepper
        .integrate()
        .map_err(|e| Error::Integrator(format!("{e:?} between x = {x0} and x = {x1}")))?;
    let last = stepper
        .y_out()
        .last()
        .ok_or_else(|| Error::Integrator("integrator produced no output".into()))?;
    Ok(CVector::from_iterator(
        n,
        (0..n).map(|i| C64::new(last[2 * i], last[2 * i + 1])),
    ))
}

/// Values at each point of `xs` (monotone, starting the walk from `x0`).
pub fn trajectory(
    ode: &LinearOde,
    shift: C64,
    x0: f64,
    seed: &CVector,
    xs: &[f64],
) -> Result<Vec<CVector>> {
    let mut out = Vec::with_capacity(xs.len());
    let (mut x, mut u) = (x0, seed.clone());
    for &target in xs {
        u = ivp_oracle(ode, shift, x, &u, target)?;
        x = target;
        out.push(u.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::PiecewisePoly;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn free_exponential() {
        let spec = ProblemSpecN::free(3, 1.0).unwrap();
        let rho = c(10.0, 4.0);
        // the dominant root on this ray, so forward integration is stable
        let r = c(1.0, 0.0);
        let ode = LinearOde::nth(&spec, rho);
        // scaled seed w_nu = R^nu at x = 0, renormalized by exp(rho R x)
        let seed = CVector::from_iterator(3, (0..3).map(|nu| r.powu(nu)));
        let u = ivp_oracle(&ode, rho * r, 0.0, &seed, 1.0).unwrap();
        for nu in 0..3 {
            assert!((u[nu] - r.powu(nu as u32)).norm() < 1e-9);
        }
    }

    #[test]
    fn constant_potential_closed_form() {
        let p0 = PiecewisePoly::constant(c(1.0, 0.0), 0.0, 1.0).unwrap();
        let spec = ProblemSpecN::new(2, 1.0, 0.0, 0, vec![p0]).unwrap();
        let rho = C64::from_polar(20.0, std::f64::consts::FRAC_PI_4);
        let s = (rho * rho - 1.0).sqrt();
        let ode = LinearOde::nth(&spec, rho);
        let seed = CVector::from_vec(vec![c(1.0, 0.0), s / rho]);
        let xs = [0.25, 0.5, 1.0];
        let traj = trajectory(&ode, s, 0.0, &seed, &xs).unwrap();
        for u in &traj {
            // exp(-s x) * exp(s x) = 1
            assert!((u[0] - 1.0).norm() < 1e-8);
            assert!((u[1] - s / rho).norm() < 1e-8);
        }
        // the recessive solution is stable backward
        let seed = CVector::from_vec(vec![c(1.0, 0.0), -s / rho]);
        let back = ivp_oracle(&ode, -s, 1.0, &seed, 0.0).unwrap();
        assert!((back[0] - 1.0).norm() < 1e-8);
        assert!((back[1] + s / rho).norm() < 1e-8);
    }

    #[test]
    fn superposition() {
        let p0 = PiecewisePoly::real(&[0.3, 1.0, -1.0], 0.0, 1.0).unwrap();
        let spec = ProblemSpecN::new(2, 1.0, 0.0, 0, vec![p0]).unwrap();
        let rho = c(3.0, 2.0);
        let ode = LinearOde::nth(&spec, rho);
        let u = CVector::from_vec(vec![c(1.0, 0.5), c(-0.2, 0.0)]);
        let v = CVector::from_vec(vec![c(0.0, 1.0), c(2.0, 1.0)]);
        let (a, b) = (c(0.7, -0.1), c(-1.5, 0.4));
        let fu = ivp_oracle(&ode, rho, 0.0, &u, 1.0).unwrap();
        let fv = ivp_oracle(&ode, rho, 0.0, &v, 1.0).unwrap();
        let fw = ivp_oracle(&ode, rho, 0.0, &(&u * a + &v * b), 1.0).unwrap();
        let err = (&fw - (fu * a + fv * b)).norm() / fw.norm();
        assert!(err < 1e-8, "{err}");
    }
}
