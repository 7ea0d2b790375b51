use thiserror::Error;

/// Errors raised by every module in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A query fell outside the range covered by a grid, clock or table.
    #[error("out of range: {what} = {value} not in [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// The deterministic base stops existing at clock time `base_time`; `hitting_time`
    /// is the first path time at which the random clock reaches it, when known.
    #[error("blow-up: base solution ends at clock time {base_time}, reached at t = {hitting_time:?}")]
    BlowUp {
        base_time: f64,
        hitting_time: Option<f64>,
    },

    #[error("unstable time step: dt = {dt} exceeds bound {bound}")]
    Stability { dt: f64, bound: f64 },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("fields are driven by different clocks")]
    ClockMismatch,

    /// Compactly supported data reached the zero-flux boundary of the truncated domain.
    #[error("solution reached the domain boundary at t = {time}; enlarge the domain")]
    Truncation { time: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
