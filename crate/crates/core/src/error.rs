use thiserror::Error;

/// Unified error type for map construction, assembly, solves and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate Jacobian: |det| = {det:.3e} below 1e-14")]
    DegenerateJacobian { det: f64 },

    #[error("ellipticity violation: {0}")]
    Ellipticity(String),

    #[error("grid does not cover the required region: {0}")]
    GridCoverage(String),

    #[error("singular assembly: {0}")]
    SingularAssembly(String),

    #[error("solver failed to converge: {context} (relative residual {residual:.3e} after {iterations} iterations)")]
    SolverDiverged {
        context: String,
        residual: f64,
        iterations: usize,
    },

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("empty region for norm evaluation")]
    EmptyRegion,

    #[error("mismatched grids: {0}")]
    GridMismatch(String),

    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),

    #[error("frequency-grid truncation error estimate {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    TruncationError { estimate: f64, tolerance: f64 },

    #[error("branch cut: argument on the negative real axis")]
    BranchCut,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
