use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("not a rational number: {0:?}")]
    Rational(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("a polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertex {0} is repeated")]
    DuplicateVertex(usize),
    #[error("vertices around index {0} are collinear")]
    CollinearVertices(usize),
    #[error("polygon is not convex at vertex {0}")]
    NotConvex(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhaseError {
    #[error("side index {0} out of range for a {1}-gon")]
    SideOutOfRange(usize, usize),
    #[error("tail and head lie on the same side {0}")]
    SameSide(usize),
    #[error("side fraction {0} is not strictly inside (0, 1)")]
    FractionOutOfRange(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("edge vectors do not close up: {0}")]
    ClosureViolated(String),
    #[error("constructed polygon is invalid: {0}")]
    NotConvex(GeometryError),
    #[error("perturbed polygon is invalid: {0}")]
    NotConvexAfterPerturbation(GeometryError),
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TilingError {
    #[error("degenerate rectangle: {0}")]
    DegenerateRect(String),
    #[error("rectangle orbit does not close: {0}")]
    NotClosed(String),
    #[error("orbit halts within the requested depth ({0:?})")]
    HaltEncountered(crate::billiard::HaltReason),
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StabilityError {
    #[error("phase point is not periodic: {0}")]
    NotPeriodic(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PortraitError {
    #[error("unsupported output format {0:?}")]
    UnsupportedFormat(String),
    #[error("resolution must be at least 2x2, got {0}x{1}")]
    Resolution(usize, usize),
    #[error("encoding failed: {0}")]
    Encode(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
