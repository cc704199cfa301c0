use std::io;

use scalefn_core::Error as CoreError;

/// Exit code for a failed Monte Carlo comparison.
pub const EXIT_VALIDATION_FAIL: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_BAD_INPUT: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum JobError {
    #[error("bad input: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl JobError {
    pub(crate) fn bad(key: &str, value: &str) -> Self {
        JobError::Input(format!("invalid value '{value}' for {key}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            JobError::Input(_) => EXIT_BAD_INPUT,
            JobError::Core(e) => match e {
                CoreError::RootFindingFailure(_)
                | CoreError::NonConvergence { .. }
                | CoreError::StepTooLarge { .. }
                | CoreError::NonFinite { .. }
                | CoreError::DivisionByZero(_) => EXIT_NUMERICAL,
                CoreError::InvalidSpec(_)
                | CoreError::DegenerateModel(_)
                | CoreError::InvalidProblem(_)
                | CoreError::DomainError { .. }
                | CoreError::DegenerateInterval { .. }
                | CoreError::Config(_) => EXIT_BAD_INPUT,
            },
            JobError::Io(_) | JobError::Json(_) => 1,
        }
    }
}

pub type JobResult<T> = Result<T, JobError>;
