use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{0}")]
    NonConvergence(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::NonConvergence(_) => 4,
        }
    }
}

impl From<thinning::Error> for CliError {
    fn from(e: thinning::Error) -> Self {
        use thinning::Error as E;
        match e {
            E::Parse(_) => CliError::Input(e.to_string()),
            E::NonConvergence { .. } => CliError::NonConvergence(e.to_string()),
            E::InvalidArgument(_) | E::ShapeMismatch(_) | E::CapExceeded { .. } => {
                CliError::Precondition(e.to_string())
            }
        }
    }
}
