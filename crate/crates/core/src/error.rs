use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("malformed document: {0}")]
    Document(String),
    #[error("not a number: {0:?}")]
    Number(String),
    #[error("map {index}: ratio {ratio} outside (0, 1)")]
    RatioOutOfRange { index: usize, ratio: String },
    #[error("map {index}: cos^2 + sin^2 = {norm} is not 1")]
    NotOrthogonal { index: usize, norm: String },
    #[error("map {index}: {message}")]
    Map { index: usize, message: String },
    #[error("the map list is empty")]
    EmptyMaps,
    #[error("polygon: {0}")]
    Polygon(String),
    #[error("unknown example id {0:?}")]
    UnknownExample(String),
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("rotation group exceeds cap {0}; projections have measure zero")]
    InfiniteRotationGroup(usize),
    #[error("work budget exceeded: {0}")]
    Budget(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}
