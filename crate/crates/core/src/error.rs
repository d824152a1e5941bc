use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("m must be odd")]
    EvenOrder { m: u32 },

    #[error("m must be at least 1")]
    ZeroOrder,

    #[error("N must be at least 1")]
    NoIntervals,

    #[error("N+1 >= m is required for solvability (m = {m}, N = {n})")]
    TooFewNodes { m: u32, n: usize },

    #[error("no feasible perturbation directions: N+1 = m leaves the weights fully constrained (m = {m}, N = {n})")]
    NoFeasibleDirections { m: u32, n: usize },

    #[error("step h = {h} is outside (0, 1]")]
    InvalidStep { h: f64 },

    #[error("{0} is empty")]
    EmptyInput(&'static str),

    #[error("expected {expected} values, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("closed-form weights exist only for m = 1 and m = 3 (got m = {m})")]
    NoClosedForm { m: u32 },

    #[error("matrix is numerically singular (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("root modulus {modulus} lies within 1e-8 of the unit circle")]
    DegenerateStep { modulus: f64 },

    #[error("found {inside} roots inside the unit disk, expected {expected}")]
    RootPairing { inside: usize, expected: usize },

    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error("closed form is unstable: |tau{index}| = {modulus} >= 1")]
    Unstable { index: usize, modulus: f64 },

    #[error("weights violate the exactness constraints by {residual:e}")]
    Precondition { residual: f64 },

    #[error("perturbation {trial} decreased the error norm by {decrease:e}")]
    OptimalityViolation { trial: usize, decrease: f64 },
}

impl Error {
    /// True for failures that come from the numerics rather than the inputs.
    pub fn is_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. }
                | Error::DegenerateStep { .. }
                | Error::RootPairing { .. }
                | Error::Integrity(_)
                | Error::Unstable { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
