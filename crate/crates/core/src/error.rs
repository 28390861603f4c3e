use thiserror::Error;

/// Every failure the library reports. Variants mirror the error names used by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("outside domain: {0}")]
    Domain(String),
    #[error("label conflict: {0}")]
    LabelConflict(String),
    #[error("not a cylinder: {0}")]
    NotACylinder(String),
    #[error("epsilon mismatch: {0}")]
    Epsilon(String),
    #[error("not a twist: {0}")]
    NotATwist(String),
    #[error("not coherent: {0}")]
    NotCoherent(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("bad label: {0}")]
    Label(String),
    #[error("symmetry required: {0}")]
    Symmetry(String),
    #[error("underdetermined: {0}")]
    Underdetermined(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
}

impl Error {
    /// Stable machine-readable kind, used in CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Degree(_) => "DegreeError",
            Error::Schema(_) => "SchemaError",
            Error::Domain(_) => "DomainError",
            Error::LabelConflict(_) => "LabelConflict",
            Error::NotACylinder(_) => "NotACylinder",
            Error::Epsilon(_) => "EpsilonError",
            Error::NotATwist(_) => "NotATwist",
            Error::NotCoherent(_) => "NotCoherent",
            Error::Usage(_) => "UsageError",
            Error::Label(_) => "LabelError",
            Error::Symmetry(_) => "SymmetryError",
            Error::Underdetermined(_) => "Underdetermined",
            Error::ResourceLimit(_) => "ResourceLimit",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
