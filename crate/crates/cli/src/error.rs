use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A flag's value is unusable.
    #[error("{flag}: {message}")]
    Usage { flag: &'static str, message: String },
    /// A file named by a flag could not be read or parsed.
    #[error("{flag}: {source}")]
    Input {
        flag: &'static str,
        #[source]
        source: dtkmeans::Error,
    },
    #[error(transparent)]
    Run(#[from] dtkmeans::Error),
    #[error("writing {path}: {source}")]
    Output { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage { .. } => 2,
            _ => 1,
        }
    }
}
