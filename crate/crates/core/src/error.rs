use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure class, used by the CLI for exit codes and by the service
/// for HTTP status mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input or usage.
    Input,
    /// A name already exists in a store.
    Conflict,
    /// Constraints cannot be satisfied.
    Infeasible,
    /// I/O or other unexpected failure.
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("series has no valid (non-missing) values")]
    EmptySeries,
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error("extents must have at least two strictly increasing entries")]
    NonMonotoneExtents,
    #[error("invalid bin count {0}: must be between 1 and 1000")]
    InvalidBinCount(usize),
    #[error("invalid interval size {0}: must be a positive finite number")]
    InvalidIntervalSize(f64),
    #[error("defined interval would produce {0} bins (limit 1000)")]
    TooManyBins(usize),
    #[error("invalid growth factor {0}: must be greater than 1")]
    InvalidGrowth(f64),
    #[error("invalid IQR factor {0}: must be positive")]
    InvalidIqrFactor(f64),
    #[error("invalid head/tail threshold {0}: must lie in (0, 1)")]
    InvalidThreshold(f64),
    #[error("need at least {needed} distinct values, found {found}")]
    NotEnoughDistinctValues { needed: usize, found: usize },
    #[error("bin count {k} exceeds the number of distinct values ({distinct})")]
    KExceedsDistinct { k: usize, distinct: usize },
    #[error("manual breaks must be finite and strictly increasing")]
    NonMonotoneBreaks,
    #[error("method {method} produced {actual} bins, expected {expected}")]
    BinCountMismatch {
        method: String,
        expected: usize,
        actual: usize,
    },
    #[error("consensus needs at least two member methods, got {0}")]
    TooFewMethods(usize),
    #[error("unknown method '{0}'")]
    UnknownMethod(String),
    #[error("result was not derived from this series: {0}")]
    MismatchedInputs(String),
    #[error("palette has {available} colors, {needed} needed")]
    PaletteTooSmall { needed: usize, available: usize },
    #[error("edit would leave extents non-increasing")]
    NonMonotoneResult,
    #[error("the outer extents cannot be removed")]
    CannotRemoveOuterExtent,
    #[error("extent index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("infeasible constraints: {0}")]
    InfeasibleConstraints(String),
    #[error("conflicting constraints: {0}")]
    ConflictingConstraints(String),
    #[error("unknown feature '{0}'")]
    UnknownFeature(String),
    #[error("target bin {target} outside 1..={bins}")]
    TargetOutOfRange { target: usize, bins: usize },
    #[error("name '{0}' already exists")]
    DuplicateName(String),
    #[error("invalid name: {0}")]
    InvalidName(String),
    #[error("invalid extents: {0}")]
    InvalidExtents(String),
    #[error("invalid hex color '{0}'")]
    InvalidHex(String),
    #[error("palette '{palette}' supports at most {capacity} colors, {requested} requested")]
    BinCountExceedsPalette {
        palette: String,
        requested: usize,
        capacity: usize,
    },
    #[error("unknown palette '{0}'")]
    UnknownPalette(String),
    #[error("missing column '{0}'")]
    MissingColumn(String),
    #[error("unparseable row at line {line}: {message}")]
    UnparseableRow { line: u64, message: String },
    #[error("duplicate feature id '{0}'")]
    DuplicateId(String),
    #[error("invalid GeoJSON: {0}")]
    InvalidGeoJson(String),
    #[error("feature {index} has no '{property}' id property")]
    MissingIdProperty { index: usize, property: String },
    #[error("no geometry feature matched an attribute row")]
    EmptyJoin,
    #[error("unsupported export target '{0}'")]
    UnsupportedTarget(String),
    #[error("unknown dataset '{0}'")]
    UnknownDataset(String),
    #[error("unknown attribute '{0}'")]
    UnknownAttribute(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptySeries => "EmptySeries",
            Error::InvalidSeries(_) => "InvalidSeries",
            Error::NonMonotoneExtents => "NonMonotoneExtents",
            Error::InvalidBinCount(_) => "InvalidBinCount",
            Error::InvalidIntervalSize(_) => "InvalidIntervalSize",
            Error::TooManyBins(_) => "TooManyBins",
            Error::InvalidGrowth(_) => "InvalidGrowth",
            Error::InvalidIqrFactor(_) => "InvalidIqrFactor",
            Error::InvalidThreshold(_) => "InvalidThreshold",
            Error::NotEnoughDistinctValues { .. } => "NotEnoughDistinctValues",
            Error::KExceedsDistinct { .. } => "KExceedsDistinct",
            Error::NonMonotoneBreaks => "NonMonotoneBreaks",
            Error::BinCountMismatch { .. } => "BinCountMismatch",
            Error::TooFewMethods(_) => "TooFewMethods",
            Error::UnknownMethod(_) => "UnknownMethod",
            Error::MismatchedInputs(_) => "MismatchedInputs",
            Error::PaletteTooSmall { .. } => "PaletteTooSmall",
            Error::NonMonotoneResult => "NonMonotoneResult",
            Error::CannotRemoveOuterExtent => "CannotRemoveOuterExtent",
            Error::IndexOutOfRange(_) => "IndexOutOfRange",
            Error::InfeasibleConstraints(_) => "InfeasibleConstraints",
            Error::ConflictingConstraints(_) => "ConflictingConstraints",
            Error::UnknownFeature(_) => "UnknownFeature",
            Error::TargetOutOfRange { .. } => "TargetOutOfRange",
            Error::DuplicateName(_) => "DuplicateName",
            Error::InvalidName(_) => "InvalidName",
            Error::InvalidExtents(_) => "InvalidExtents",
            Error::InvalidHex(_) => "InvalidHex",
            Error::BinCountExceedsPalette { .. } => "BinCountExceedsPalette",
            Error::UnknownPalette(_) => "UnknownPalette",
            Error::MissingColumn(_) => "MissingColumn",
            Error::UnparseableRow { .. } => "UnparseableRow",
            Error::DuplicateId(_) => "DuplicateId",
            Error::InvalidGeoJson(_) => "InvalidGeoJson",
            Error::MissingIdProperty { .. } => "MissingIdProperty",
            Error::EmptyJoin => "EmptyJoin",
            Error::UnsupportedTarget(_) => "UnsupportedTarget",
            Error::UnknownDataset(_) => "UnknownDataset",
            Error::UnknownAttribute(_) => "UnknownAttribute",
            Error::InvalidRequest(_) => "InvalidRequest",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::DuplicateName(_) => ErrorKind::Conflict,
            Error::InfeasibleConstraints(_) | Error::ConflictingConstraints(_) => {
                ErrorKind::Infeasible
            }
            Error::Io(_) => ErrorKind::Internal,
            _ => ErrorKind::Input,
        }
    }
}
