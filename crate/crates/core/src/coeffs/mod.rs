//! Problem descriptions and the recurrences for their asymptotic expansion
//! coefficients.

mod beta;
mod gtable;
mod param;
mod problem;

pub use beta::{binomial, series_residual, BetaNormalization, BetaTable};
pub use gtable::GTable;
pub use param::ParamCoeffs;
pub use problem::{
    eval_matrix, vandermonde, zero_matrix, ParamSpec, PolyMatrix, ProblemSpecN, SystemSpec,
};
