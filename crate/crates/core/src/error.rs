//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("invalid grid config: {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("degenerate beam: origin equals endpoint")]
    DegenerateBeam,
    #[error("hit beam carries an empty error region")]
    EmptyErrorRegion,
    #[error("explicit error region does not contain the endpoint cell")]
    RegionMissesEndpoint,
    #[error("membership probability {0} outside [0, 1]")]
    MembershipOutOfRange(f64),
    #[error("hit beam with zero total membership probability")]
    NoMembershipMass,
    #[error("sensor trust probabilities must lie in (0, 1]")]
    InvalidTrust,
}

#[derive(Debug, Error, PartialEq)]
pub enum RiskError {
    #[error("path group abscissae must be strictly increasing")]
    NonIncreasingAbscissa,
    #[error("cell ({0}, {1}) appears more than once in the trace")]
    DuplicateCell(i32, i32),
    #[error("robot width must be positive")]
    NonPositiveWidth,
    #[error("mass pdf: {0}")]
    InvalidMassPdf(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum BaselineError {
    #[error("occupancy {0} outside [0, 1]")]
    OccupancyOutOfRange(f64),
    #[error("recall over an empty patch list")]
    EmptyPatchList,
    #[error("log-odds model must satisfy l_occ > 0 > l_free")]
    UninformativeModel,
}

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("world file: {0}")]
    Io(#[from] std::io::Error),
    #[error("world file line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario field `{field}`: {reason}")]
    Field { field: String, reason: String },
    #[error("scenario file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    World(#[from] WorldError),
}

impl ScenarioError {
    pub fn field(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ScenarioError::Field {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
