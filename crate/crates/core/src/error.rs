use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("cell size must be positive, got {0}")]
    NonPositiveSize(f64),
    #[error("degenerate domain [{x0}, {x1}] x [{y0}, {y1}]")]
    DegenerateDomain { x0: f64, x1: f64, y0: f64, y1: f64 },
    #[error("refined box is not contained in the domain")]
    BoxOutsideDomain,
    #[error("stretching ratio {0} outside (1, 1.3]")]
    BadRatio(f64),
    #[error("face coordinates must be strictly increasing (axis {axis}, index {index})")]
    NonMonotone { axis: char, index: usize },
    #[error("axis needs at least one cell")]
    Empty,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("pressure solve did not reach tolerance {tol:e}; residual history {residuals:?}")]
    PressureNotConverged { tol: f64, residuals: Vec<f64> },
    #[error("momentum solve did not reach tolerance {tol:e} after {sweeps} sweeps (residual {residual:e})")]
    MomentumNotConverged { tol: f64, sweeps: usize, residual: f64 },
    #[error("non-finite state at t = {t}: max |u| = {max_velocity}, CFL = {cfl}")]
    NonFinite { t: f64, max_velocity: f64, cfl: f64 },
    #[error("blow-up at t = {t}: max |u| = {max_velocity} exceeds {limit}")]
    BlowUp { t: f64, max_velocity: f64, limit: f64 },
    #[error("post-step divergence {divergence:e} exceeds tolerance {tol:e}")]
    Divergence { divergence: f64, tol: f64 },
    #[error("invalid solver configuration: {0}")]
    Config(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IbmError {
    #[error("marker {marker} at ({x}, {y}) is closer than two cells to the domain boundary")]
    MarkerNearBoundary { marker: usize, x: f64, y: f64 },
    #[error("kernel support of marker {marker} at ({x}, {y}) leaves the uniformly refined region")]
    NonUniformSupport { marker: usize, x: f64, y: f64 },
    #[error("a Lagrangian boundary needs at least 4 markers, got {0}")]
    TooFewMarkers(usize),
    #[error("marker spacing is not uniform (relative deviation {0:e})")]
    NonUniformSpacing(f64),
    #[error("marker count mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeamError {
    #[error("beam property {name} must be positive, got {value}")]
    InvalidProperty { name: &'static str, value: f64 },
    #[error("beam needs at least 2 cells, got {0}")]
    TooFewCells(usize),
    #[error("beam displacement {max} exceeds blow-up limit {limit} at t = {t}")]
    BlowUp { t: f64, max: f64, limit: f64 },
    #[error("explicit beam step dt = {dt:e} exceeds the stability bound {bound:e}")]
    ExplicitUnstable { dt: f64, bound: f64 },
    #[error("load vector has {got} entries, expected {expected}")]
    LoadLength { expected: usize, got: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Ibm(#[from] IbmError),
    #[error(transparent)]
    Beam(#[from] BeamError),
    #[error("no spectral peak above the noise floor in {samples} samples")]
    NoSpectralPeak { samples: usize },
    #[error("configuration error: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn at_stage(stage: &'static str, source: impl Into<Error>) -> Self {
        Error::Stage { stage, source: Box::new(source.into()) }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
