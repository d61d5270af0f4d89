use thiserror::Error;

#[derive(Debug, Error)]
pub enum WorkbenchError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("scenario parse error at `{path}` (line {line}, column {column}): {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Engine(#[from] recollement_core::Error),
}

impl WorkbenchError {
    /// 3 for anything wrong with the input, 2 when the engine could not
    /// decide (window or representability limits), 1 for failed constructions.
    pub fn exit_code(&self) -> i32 {
        use recollement_core::Error as E;
        match self {
            WorkbenchError::Engine(E::Window { .. } | E::Unrepresentable(_) | E::CertificateRequired(_)) => 2,
            WorkbenchError::Engine(E::Construction(_)) => 1,
            _ => 3,
        }
    }
}
