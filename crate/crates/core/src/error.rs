use thiserror::Error;

/// Every fallible operation in the crate returns this error.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("conductor mismatch: {0} vs {1}")]
    ConductorMismatch(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("value is not in the real subfield")]
    NotReal,
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("map is not invertible")]
    NotInvertible,
    #[error("point lies outside the domain of {0}")]
    PointOutsideDomain(String),
    #[error("point lies outside the unit space")]
    PointOutsideUnitSpace,
    #[error("no conjugator: {0}")]
    NoConjugator(String),
    #[error("conjugator not unique: {0}")]
    NotUnique(String),
    #[error("oracle refused to identify the points: {0}")]
    OracleRefused(String),
    #[error("arrows are not composable")]
    NotComposable,
    #[error("atlas mismatch: {0}")]
    AtlasMismatch(String),
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("ill-typed diagram: {0}")]
    IllTypedDiagram(String),
    #[error("invalid atlas: {0}")]
    InvalidAtlas(String),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("invalid compatible system: {0}")]
    InvalidSystem(String),
    #[error("invalid 2-cell: {0}")]
    InvalidCell(String),
    #[error("not a sub-atlas: {0}")]
    NotASubAtlas(String),
    #[error("witness invalid: {0}")]
    WitnessInvalid(String),
    #[error("atlases are not equivalent: {0}")]
    NotEquivalent(String),
    #[error("invalid relabeling: {0}")]
    InvalidRelabeling(String),
    #[error("unsupported presentation: {0}")]
    UnsupportedPresentation(String),
    #[error("unsupported parameters: {0}")]
    UnsupportedParams(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
