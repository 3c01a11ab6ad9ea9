use thiserror::Error;

/// Errors produced by the numerical modules and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precision error: {0}")]
    Precision(String),

    #[error("no sign change of the dispersion function over [{lo}, {hi}] (values {f_lo:e}, {f_hi:e})")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("complex branch: {0}")]
    ComplexBranch(String),

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("lambda = {lambda} is not a root of the dispersion relation (residual {residual:e})")]
    NotARoot { lambda: f64, residual: f64 },

    #[error("mode-2 dispersion denominator too close to zero ({0:e})")]
    DenominatorNearZero(f64),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("time step too large at t = {t}: relative growth {growth:e} per step")]
    CflViolation { t: f64, growth: f64 },

    #[error("no saturation before t_end = {t_end} (final |phi_1| = {final_amplitude:e}, {trend})")]
    NoSaturation {
        t_end: f64,
        final_amplitude: f64,
        trend: String,
    },

    #[error("under-resolved Hermite tail at t = {t}: ratio {tail_ratio:e}")]
    UnderResolved { t: f64, tail_ratio: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the `vfp` binary for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_)
            | Error::NoSignChange { .. }
            | Error::NotARoot { .. }
            | Error::DegenerateInput(_)
            | Error::Config(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_) => 2,
            Error::Precision(_)
            | Error::SingularSystem(_)
            | Error::DenominatorNearZero(_)
            | Error::CflViolation { .. } => 3,
            Error::ComplexBranch(_) => 4,
            Error::NoSaturation { .. } => 5,
            Error::UnderResolved { .. } => 6,
        }
    }
}
