use alloc::string::String;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid Lévy parameters: {0}")]
    InvalidSpec(String),
    #[error("degenerate model: {0}")]
    DegenerateModel(String),
    #[error("root finding failed: {0}")]
    RootFindingFailure(String),
    #[error("no convergence after {iterations} iterations: {what}")]
    NonConvergence { what: String, iterations: usize },
    #[error("step too large at u = {node}: stability bracket {bracket} < 1/2")]
    StepTooLarge { node: f64, bracket: f64 },
    #[error("invalid problem data: {0}")]
    InvalidProblem(String),
    #[error("non-finite value at u = {node}")]
    NonFinite { node: f64 },
    #[error("{value} is outside the state interval {interval}")]
    DomainError { value: f64, interval: String },
    #[error("degenerate interval: lower = {lower}, anchor = {anchor}")]
    DegenerateInterval { lower: f64, anchor: f64 },
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = core::result::Result<T, Error>;
