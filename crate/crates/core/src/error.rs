use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("point {x} outside the domain [{a}, {b}]")]
    OutOfDomain { x: f64, a: f64, b: f64 },

    #[error("insufficient smoothness: {0}")]
    Smoothness(String),

    #[error("invalid problem: {0}")]
    InvalidSpec(String),

    #[error("condition (i1) violated: {0}")]
    ConditionI1(String),

    #[error("degenerate sector: {0}")]
    DegenerateSector(String),

    #[error("linear algebra failure: {0}")]
    Singular(String),

    #[error("|rho| = {modulus} is below the threshold {threshold}")]
    BelowThreshold { modulus: f64, threshold: f64 },

    #[error("no convergence after {iterations} iterations (last update {last_update:e})")]
    NoConvergence { iterations: usize, last_update: f64 },

    #[error("measured contraction {0} is too large for successive approximations")]
    NotContractive(f64),

    #[error("integrator failure: {0}")]
    Integrator(String),

    #[error("inconsistent inputs: {0}")]
    Mismatch(String),

    #[error("fit failure: {0}")]
    Fit(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Whether the error comes from validating a problem description.
    pub fn is_spec_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidFunction(_)
                | Error::Smoothness(_)
                | Error::InvalidSpec(_)
                | Error::ConditionI1(_)
                | Error::DegenerateSector(_)
                | Error::Json(_)
        )
    }

    /// Whether the error signals a solver that failed to converge.
    pub fn is_convergence_error(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::NotContractive(_)
                | Error::BelowThreshold { .. }
                | Error::Singular(_)
                | Error::Integrator(_)
        )
    }
}
