use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Error type shared by the whole crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its domain constraint.
    InvalidParams(&'static str),
    /// A market state left the simplex `n1 + n2 <= 1` beyond the allowed slack.
    InvalidState { n1: f64, n2: f64 },
    /// An RK4 substep overshot saturation by more than 1%; the step size must shrink.
    StepTooLarge { t: f64 },
    /// The perturbation change of variables requires `b != 0` and `a + b != 0`.
    DegenerateLinearization,
    /// An iterative solver exhausted its iteration budget.
    NoConvergence { iterations: usize },
    /// An ABM configuration field is out of range.
    InvalidConfig(&'static str),
    /// Local shares are undefined for an agent without neighbors.
    IsolatedAgent { agent: usize },
    /// Two curves were compared on different time grids.
    GridMismatch,
    /// R^2 is undefined for a constant target curve.
    ZeroVarianceTarget,
    /// The area-difference denominator vanished.
    ZeroAreaTarget,
    /// No sign change was found in the root-finding interval.
    NoBracket,
}

impl core::error::Error for Error {}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams(what) => write!(f, "invalid parameters: {what}"),
            Error::InvalidState { n1, n2 } => {
                write!(f, "state outside simplex: n1={n1}, n2={n2}, n1+n2={}", n1 + n2)
            }
            Error::StepTooLarge { t } => {
                write!(f, "integration step too large near t={t}; reduce dt")
            }
            Error::DegenerateLinearization => {
                write!(f, "degenerate linearization: requires b != 0 and a + b != 0")
            }
            Error::NoConvergence { iterations } => {
                write!(f, "no convergence after {iterations} iterations")
            }
            Error::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
            Error::IsolatedAgent { agent } => {
                write!(f, "agent {agent} has no neighbors; local shares undefined")
            }
            Error::GridMismatch => write!(f, "curves are sampled on different time grids"),
            Error::ZeroVarianceTarget => write!(f, "target curve has zero variance"),
            Error::ZeroAreaTarget => write!(f, "target curves have zero area"),
            Error::NoBracket => write!(f, "root not bracketed in the search interval"),
        }
    }
}
