use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Invalid(tailsum_core::Error),
    #[error("numerical failure: {0}")]
    Numeric(tailsum_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// 1 for configuration and validation problems, 2 for everything that
    /// fails after the inputs were accepted.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Invalid(_) => 1,
            CliError::Numeric(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<tailsum_core::Error> for CliError {
    fn from(e: tailsum_core::Error) -> Self {
        use tailsum_core::Error as E;
        match e {
            E::InvalidModel(_) | E::InvalidParams(_) | E::EmptyInput(_) | E::WrongRadialLaw { .. } => {
                CliError::Invalid(e)
            }
            other => CliError::Numeric(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
