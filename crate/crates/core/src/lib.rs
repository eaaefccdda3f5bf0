//! Birkhoff-type fundamental systems of solutions for linear ordinary
//! differential equations with a large spectral parameter.
//!
//! Two problem families are covered:
//!
//! - n-th order equations `y^(n) + sum_{m<=n-2} p_m(x) y^(m) = rho^n y` on `[0, T]`,
//!   solved through an equivalent system of Volterra/Fredholm integral equations
//!   ([`nth`]);
//! - first-order systems `(1/rho) Y' = A(x, rho) Y` with
//!   `A = A_(0) + sum_mu A_(mu)(x) / rho^mu` ([`system`]), including the
//!   companion reduction of parameter-polynomial n-th order equations.
//!
//! Coefficient functions are piecewise polynomials ([`funcspace`]) so the
//! asymptotic expansion coefficients ([`coeffs`]) are computed with exact
//! derivatives and antiderivatives. The [`verify`] module holds independent
//! oracles (an adaptive IVP integrator, brute-force identities, log-log slope
//! fits) used to check the solvers against their asymptotic formulas.

pub mod coeffs;
pub mod error;
pub mod funcspace;
pub mod io;
pub mod nth;
pub mod par;
pub mod problems;
pub mod spectra;
pub mod system;
pub mod verify;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;
