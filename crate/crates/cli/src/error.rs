use thiserror::Error;

/// Failures surfaced by `ppw`, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] witness_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 config, 3 numerical instability, 4 truncation or resolution, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use witness_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                E::Instability { .. } => 3,
                E::Truncation { .. } | E::Resolution { .. } => 4,
                E::InvalidParameter { .. }
                | E::Range { .. }
                | E::FrequencyRange { .. }
                | E::Window(_)
                | E::EmptySpectrum
                | E::Sampling { .. } => 2,
            },
            CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use witness_core::Error as E;

    #[test]
    fn exit_codes_follow_error_class() {
        let core = |e: E| CliError::Core(e).exit_code();
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(core(E::Instability { time: 1.0, reason: "nan".into() }), 3);
        assert_eq!(core(E::Truncation { defect: 0.1, limit: 1e-3 }), 4);
        assert_eq!(core(E::Resolution { requested: 9, reason: "grid".into() }), 4);
        assert_eq!(core(E::EmptySpectrum), 2);
    }
}
