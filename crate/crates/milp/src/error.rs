use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("invalid bounds [{lower}, {upper}] for `{name}`")]
    BadBounds { name: String, lower: f64, upper: f64 },
    #[error("unknown variable id {0}")]
    UnknownVar(usize),
    #[error("absolute-value source `{0}` must have finite bounds")]
    UnboundedSource(String),
    #[error("model has no objective")]
    NoObjective,
    #[error("non-finite coefficient")]
    NonFinite,
}
