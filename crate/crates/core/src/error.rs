use thiserror::Error;

/// Errors raised by the analysis toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("complex dimension must satisfy n >= 2, got {0}")]
    InvalidDimension(u32),

    #[error("inadmissible: 1+x+y ≤ 0 at ({x}, {y})")]
    Inadmissible { x: f64, y: f64 },

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("level function is undefined at the origin")]
    UndefinedAtOrigin,

    #[error("t = {t} lies outside the profile span ({lo}, {hi})")]
    OutOfSpan { t: f64, lo: f64, hi: f64 },

    #[error("target {target} is not reachable on the branch through {start}")]
    Unreachable { start: f64, target: f64 },

    #[error("integrand is singular inside the integration interval at {at}")]
    SingularIntegrand { at: f64 },

    #[error("quadrature failed to converge (estimate {estimate}, error {error})")]
    QuadratureFailed { estimate: f64, error: f64 },

    #[error("root bracket [{a}, {b}] does not contain a sign change")]
    NoBracket { a: f64, b: f64 },

    #[error("u_tt <= 0 or v_t <= 0 at t = {t}")]
    NonPositive { t: f64 },

    #[error("profile has no asymptotically Euclidean end")]
    NoAsymptoticEnd,

    #[error("limit extrapolation did not converge: estimates {0:?}")]
    NonConvergent(Vec<f64>),

    #[error("lower end of the profile span is not determinable")]
    LowerEndUndetermined,

    #[error("seed not minimal: residual {residual}")]
    NotMinimal { residual: f64 },

    #[error("x0 = {x0} outside the stable window ({lo}, {hi}]")]
    OutsideStableWindow { x0: f64, lo: f64, hi: f64 },

    #[error("seed is not on the critical level (F = {level}, expected {critical})")]
    NotCriticalLevel { level: f64, critical: f64 },

    #[error("volume must be positive, got {0}")]
    NonPositiveVolume(f64),

    #[error("step size underflow at t = {0}")]
    StepSizeUnderflow(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Domain errors map to exit code 1, everything else is treated as a usage problem.
    pub fn is_domain(&self) -> bool {
        !matches!(
            self,
            Error::InvalidDimension(_) | Error::NonFinite(_) | Error::InvalidArgument(_)
        )
    }
}
