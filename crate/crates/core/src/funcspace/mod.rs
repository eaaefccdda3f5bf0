//! Coefficient functions and their calculus, plus the discretization used by
//! every integral operator in the crate.

mod convolve;
mod exppoly;
mod grid;
mod piecewise;
pub mod quad;

pub use convolve::ExpConvolution;
pub use exppoly::ExpPoly;
pub use grid::{Grid, NODES_PER_CELL};
pub use piecewise::{fmt_class, PiecewisePoly, INFINITE_SMOOTHNESS};
