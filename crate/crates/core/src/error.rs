use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operands disagree on the number of sites or on matrix dimension.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    /// An input lies outside the supported envelope (basis weight, lattice size, state kind).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Malformed user input such as an unparsable Pauli word or inconsistent config.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Matrix handed to the Hermitian kernels is not Hermitian within tolerance.
    #[error("matrix is not Hermitian (relative asymmetry {0:e})")]
    NotHermitian(f64),

    /// `lambda_min + eps <= 0`: the log-barrier is undefined at this iterate.
    #[error("barrier domain violated: lambda_min {lambda_min:e} with shift {eps:e}")]
    BarrierDomain { lambda_min: f64, eps: f64 },

    #[error("pre-optimization did not reach the target floor within {steps} steps (lambda_min {lambda_min:e}, target {target:e})")]
    PreoptNonConvergence { steps: usize, lambda_min: f64, target: f64 },

    /// The learning-rate backoff exhausted its retry budget within one epoch.
    #[error("optimization stalled at epoch {epoch} after {retries} backoff retries")]
    Stalled {
        epoch: usize,
        retries: usize,
        history: Vec<crate::optimizer::EpochRecord>,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("amplitude factor undefined: energy estimate is zero")]
    ZeroEnergy,

    #[error("eigen-floor fit is rank deficient: {0}")]
    RankDeficient(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics themselves (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::BarrierDomain { .. }
                | Error::PreoptNonConvergence { .. }
                | Error::Stalled { .. }
                | Error::Numerical(_)
                | Error::ZeroEnergy
                | Error::RankDeficient(_)
        )
    }
}
