use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("invalid spec: {0}")]
    Validation(String),

    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: specgap::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn core(context: impl Into<String>) -> impl FnOnce(specgap::Error) -> Self {
        let context = context.into();
        move |source| Self::Core { context, source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
