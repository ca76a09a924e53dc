use stieltjes_core::algebra::AlgebraError;
use stieltjes_core::expr::{EvalError, ExprError};
use stieltjes_core::integrator::IntegratorError;
use stieltjes_core::measure::MeasureError;
use stieltjes_core::region::RegionError;
use stieltjes_core::step::StepError;
use stieltjes_core::transport::TransportError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: line {line}: {msg}")]
    Scenario {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("{0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

pub type Result<T> = std::result::Result<T, CliError>;
