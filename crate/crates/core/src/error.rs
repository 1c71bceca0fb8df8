use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not symmetric")]
    NonSymmetric,
    #[error("malformed rational {0:?}")]
    ParseScalar(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty point set")]
    EmptyPointSet,
    #[error("cell is not full-dimensional")]
    DegenerateCell,
    #[error("quadratic form is not positive definite")]
    NotPositiveDefinite,
    #[error("window unstable: {0}")]
    WindowUnstable(String),
    #[error("cell vertices are not co-spherical")]
    NoCircumsphere,
    #[error("sphere is not empty: {witness:?} lies strictly inside")]
    SphereNotEmpty { witness: Vec<i64> },
    #[error("decomposition has no walls")]
    MissingWalls,
    #[error("decomposition is a pullback with fiber rank {0}")]
    NotPolytopal(usize),
    #[error("maximal cell {0} has a proper face that is not a simplex")]
    HypothesisViolated(usize),
    #[error("decomposition is not face-fitting: {0}")]
    NotFaceFitting(String),
    #[error("decomposition is not Delaunay for any form")]
    NotDelaunay,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("unknown catalog entry {0:?}")]
    UnknownName(String),
    #[error("moment support is empty")]
    EmptySupport,
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("certification failed: {0}")]
    CertificationFailed(String),
    #[error("catalog invariant violated: {0}")]
    CatalogInvariant(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonSymmetric => "NonSymmetric",
            Error::ParseScalar(_) => "ParseScalar",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::EmptyPointSet => "EmptyPointSet",
            Error::DegenerateCell => "DegenerateCell",
            Error::NotPositiveDefinite => "NotPositiveDefinite",
            Error::WindowUnstable(_) => "WindowUnstable",
            Error::NoCircumsphere => "NoCircumsphere",
            Error::SphereNotEmpty { .. } => "SphereNotEmpty",
            Error::MissingWalls => "MissingWalls",
            Error::NotPolytopal(_) => "NotPolytopal",
            Error::HypothesisViolated(_) => "HypothesisViolated",
            Error::NotFaceFitting(_) => "NotFaceFitting",
            Error::NotDelaunay => "NotDelaunay",
            Error::Disconnected => "Disconnected",
            Error::UnknownName(_) => "UnknownName",
            Error::EmptySupport => "EmptySupport",
            Error::Overflow(_) => "Overflow",
            Error::CertificationFailed(_) => "CertificationFailed",
            Error::CatalogInvariant(_) => "CatalogInvariant",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}
