pub mod analysis;
pub mod cli;
pub mod closed_form;
pub mod dense;
pub mod error;
pub mod kernel;
mod linalg;
pub mod operator;
pub mod poly;
pub mod real;
pub mod rule;
pub mod sobolev;

pub use error::{Error, Result};
pub use kernel::ProblemConfig;
pub use rule::{Method, MultiplierSet, QuadratureRule};

/// Optimal weights by the chosen route.
pub fn compute_rule(config: &ProblemConfig, method: Method) -> Result<QuadratureRule> {
    match method {
        Method::Dense => Ok(dense::solve_config(config)?.rule),
        Method::Sobolev => Ok(sobolev::solve_config(config)?.rule),
        Method::ClosedFormM1 => closed_form::weights_m1_config(config),
        Method::ClosedFormM3 => Ok(closed_form::weights_m3_config(config)?.0),
        Method::TrapezoidProjected => analysis::projected_trapezoid(config),
    }
}
