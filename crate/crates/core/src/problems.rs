//! The example problems shipped under `specs/`, also available in code.

use crate::coeffs::{ParamSpec, PolyMatrix, ProblemSpecN, SystemSpec};
use crate::funcspace::PiecewisePoly;
use crate::io::LoadedSpec;
use crate::{CMatrix, CVector, Error, Result, C64};

/// Names accepted by [`builtin`], matching `specs/<name>.json`.
pub const NAMES: &[&str] = &[
    "free_n2",
    "constant_potential_n2",
    "smooth_n3",
    "hat_n2",
    "diag_system_2x2",
    "sturm_liouville_param",
    "damped_param_n2",
];

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn poly(coeffs: &[f64]) -> PiecewisePoly {
    PiecewisePoly::real(coeffs, 0.0, 1.0).expect("valid polynomial")
}

/// `y'' = rho^2 y` on `[0, 1]`.
pub fn free_n2() -> ProblemSpecN {
    ProblemSpecN::free(2, 1.0).expect("valid")
}

/// `y'' + y = rho^2 y` on `[0, 1]`; `rho_alpha = 2`.
pub fn constant_potential_n2() -> ProblemSpecN {
    ProblemSpecN::new(2, 1.0, 0.0, 1, vec![poly(&[1.0])]).expect("valid")
}

/// `y''' + (1 + x) y' + x^2 y = rho^3 y` on `[0, 1]`.
pub fn smooth_n3() -> ProblemSpecN {
    ProblemSpecN::new(
        3,
        1.0,
        0.0,
        1,
        vec![poly(&[0.0, 0.0, 1.0]), poly(&[1.0, 1.0])],
    )
    .expect("valid")
}

/// Hat potential peaking at `x = 1/2` (in `W_1` but not `W_2`), anchored at `alpha = 1/4`.
pub fn hat_n2() -> ProblemSpecN {
    let hat = PiecewisePoly::new(
        vec![0.0, 0.5, 1.0],
        vec![vec![re(0.0), re(2.0)], vec![re(2.0), re(-2.0)]],
    )
    .expect("valid");
    ProblemSpecN::new(2, 1.0, 0.25, 1, vec![hat]).expect("valid")
}

/// `A_(0) = diag(1, -1)`, constant `A_(1)` with zero diagonal.
pub fn diag_system_2x2(big_n: usize) -> SystemSpec {
    let a0 = CMatrix::from_diagonal(&CVector::from_vec(vec![re(1.0), re(-1.0)]));
    let a1: PolyMatrix = vec![
        vec![poly(&[0.0]), poly(&[1.0])],
        vec![poly(&[2.0]), poly(&[0.0])],
    ];
    SystemSpec::new(1.0, big_n, a0, vec![a1]).expect("valid")
}

/// `y'' + (1 - x + 3 x^2) y = rho^2 y` in the parameterized form.
pub fn sturm_liouville_param() -> ParamSpec {
    let q = ProblemSpecN::new(2, 1.0, 0.0, 0, vec![poly(&[1.0, -1.0, 3.0])]).expect("valid");
    ParamSpec::from_nth(&q).expect("valid")
}

/// The same potential as an n-th order problem.
pub fn sturm_liouville_nth() -> ProblemSpecN {
    ProblemSpecN::new(2, 1.0, 0.0, 0, vec![poly(&[1.0, -1.0, 3.0])]).expect("valid")
}

/// `y'' + (rho/2 + x) y' + (-rho^2 + (1 + x) rho + x^2) y = 0`.
pub fn damped_param_n2() -> ParamSpec {
    ParamSpec::new(
        1.0,
        1,
        vec![re(-1.0), re(0.5)],
        vec![
            vec![poly(&[1.0, 1.0]), poly(&[0.0, 0.0, 1.0])],
            vec![poly(&[0.0, 1.0])],
        ],
    )
    .expect("valid")
}

pub fn builtin(name: &str) -> Result<LoadedSpec> {
    Ok(match name {
        "free_n2" => LoadedSpec::Nth(free_n2()),
        "constant_potential_n2" => LoadedSpec::Nth(constant_potential_n2()),
        "smooth_n3" => LoadedSpec::Nth(smooth_n3()),
        "hat_n2" => LoadedSpec::Nth(hat_n2()),
        "diag_system_2x2" => LoadedSpec::System(diag_system_2x2(1)),
        "sturm_liouville_param" => LoadedSpec::Param(sturm_liouville_param()),
        "damped_param_n2" => LoadedSpec::Param(damped_param_n2()),
        _ => {
            return Err(Error::InvalidSpec(format!(
                "unknown example problem '{name}'"
            )))
        }
    })
}
