use stlkit::encode::EncodeError;
use stlkit::ops::BatchError;
use stlkit::syntax::SyntaxError;
use stlkit::synthesis::SynthError;
use stlkit::OpsError;
use stlkit_milp::SolveStatus;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Already rendered against the source text.
    #[error("{0}")]
    Syntax(String),
    #[error("{0}")]
    Semantic(String),
    #[error("status: {}", .0.as_str())]
    NoSolution(SolveStatus),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Syntax(_) => 1,
            CliError::Semantic(_) => 2,
            CliError::NoSolution(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn syntax(e: &SyntaxError, source: &str) -> Self {
        if e.is_grammar() {
            CliError::Syntax(e.render(source))
        } else {
            CliError::Semantic(e.render(source))
        }
    }

    pub fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

macro_rules! semantic {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Semantic(e.to_string())
            }
        }
    )*};
}

semantic!(OpsError, EncodeError, BatchError, stlkit::trace::TraceError, stlkit::weights::InvalidWeight);

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::Encode(EncodeError::NotOptimal(s)) => CliError::NoSolution(s),
            e => CliError::Semantic(e.to_string()),
        }
    }
}

impl From<stlkit_milp::ModelError> for CliError {
    fn from(e: stlkit_milp::ModelError) -> Self {
        CliError::Semantic(e.to_string())
    }
}
