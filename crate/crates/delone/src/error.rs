use crate::geometry::Point;
use thiserror::Error;

pub type Result<T, E = DeloneError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum DeloneError {
    #[error("points {a} and {b} are closer than the identity tolerance {tol:e}")]
    DuplicatePoints { a: Point, b: Point, tol: f64 },

    #[error("point {point} lies outside the window of radius {window}")]
    PointOutsideWindow { point: Point, window: f64 },

    #[error("unsupported dimension {0} (supported: 1, 2)")]
    UnsupportedDimension(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("ball of radius {radius} at {center} exits the window of radius {window}")]
    InsufficientWindow { center: Point, radius: f64, window: f64 },

    #[error("patch has no points")]
    EmptyPatch,

    #[error("lattice basis is singular")]
    SingularBasis,

    #[error("substitution rule is not primitive")]
    NonPrimitiveRule,

    #[error("lattice enumeration needs about {estimate:.3e} candidates (limit {limit:.3e})")]
    InfeasibleEnumeration { estimate: f64, limit: f64 },

    #[error("generated point set is empty")]
    EmptySet,

    #[error("no rule entry for patch class with offsets {offsets:?}")]
    UnknownPatchClass { offsets: Vec<Point>, labels: Option<Vec<u32>> },

    #[error("patch class has no occurrence in the valid region")]
    NoOccurrenceNearOrigin,

    #[error("input is periodic on the window (period {period})")]
    PeriodicInput { period: Point },

    #[error("Voronoi cell of {site} is unbounded within cutoff {cutoff}")]
    UnboundedCell { site: Point, cutoff: f64 },

    #[error("no return vectors found for the cell cloud")]
    NoReturnVectorsFound,

    #[error("covering radius needs at least one site")]
    EmptySites,

    #[error("every patch in the grid is a single point; diameter is zero")]
    DegenerateDiameter,

    #[error("derived point set is not Delone: {0}")]
    OutputNotDelone(String),

    #[error("relation matrices are not over the same family")]
    FamilyMismatch,

    #[error("family member {0} has no occurrence in the window")]
    NoOccurrence(usize),

    #[error("n = {n} violates L^n - 1 - 12L - 176L^2 > 1 for L = {l} (value {value:.3}); pass the override flag for exploratory runs")]
    ExponentTooSmall { n: u32, l: f64, value: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for DeloneError {
    fn from(e: serde_json::Error) -> Self {
        DeloneError::Parse(e.to_string())
    }
}
