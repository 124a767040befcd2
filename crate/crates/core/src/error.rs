//! Crate-wide error type.

use thiserror::Error;

/// Errors produced anywhere in the analysis chain.
///
/// Variants are grouped so the CLI can map them onto exit codes: configuration
/// problems, numeric failures (instability, non-convergence, rank issues) and
/// indeterminate classifications are distinguishable without string matching.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid experiment configuration or component description.
    #[error("config error: {0}")]
    Config(String),

    /// A block graph violates structural rules (algebraic loop, bad tag, ...).
    #[error("graph error: {0}")]
    Graph(String),

    /// DC operating-point solve failed to converge.
    #[error("setpoint solve failed at r_dc={r_dc}: {detail}")]
    SetpointNoConvergence { r_dc: f64, detail: String },

    /// A simulated trajectory exceeded the overflow guard: the closed loop is
    /// unstable at this setpoint/amplitude.
    #[error("unstable trajectory at sample {sample} (|{value:.3e}| > {guard:.1e})")]
    UnstableTrajectory { sample: usize, value: f64, guard: f64 },

    /// Linearization is undefined: a nonlinearity is not smooth at its
    /// operating point.
    #[error("linearization invalid: {0}")]
    LinearizationInvalid(String),

    /// Signal generation / scaling errors.
    #[error("signal error: {0}")]
    Signal(String),

    /// FRF estimation errors (degenerate input spectrum, mismatched records).
    #[error("estimation error: {0}")]
    Estimation(String),

    /// Rational fit failed (rank-deficient equations, non-finite residual).
    #[error("fit error: {0}")]
    Fit(String),

    /// Root-locus classification could not decide: all tracks ambiguous.
    #[error("indeterminate classification: {0}")]
    Indeterminate(String),

    /// A pipeline stage failed at a specific setpoint.
    #[error("setpoint {index} (r_dc={r_dc}): {source}")]
    AtSetpoint {
        index: usize,
        r_dc: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Wrap an error with the setpoint it occurred at.
    pub fn at_setpoint(self, index: usize, r_dc: f64) -> Error {
        Error::AtSetpoint { index, r_dc, source: Box::new(self) }
    }
}
