use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum FlowError {
    #[error("segment {segment} of curve {curve} has zero length")]
    DegenerateSegment { curve: usize, segment: usize },
    #[error("topology: {0}")]
    Topology(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("mesh: {0}")]
    Mesh(String),
    #[error("point ({x}, {y}) lies outside the domain")]
    OutOfDomain { x: f64, y: f64 },
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("space: {0}")]
    Space(String),
    #[error("missing context: {0}")]
    Context(String),
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("solver: {0}")]
    Solver(String),
    #[error("picard iteration stalled after {iterations} iterations (last update {last_update:e})")]
    PicardDiverged { iterations: usize, last_update: f64 },
    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<FlowError>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, FlowError>;
