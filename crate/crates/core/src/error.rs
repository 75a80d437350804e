use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Variants are split between input problems ([`Error::is_numerical`] is
/// false) and numerical breakdowns; the CLI maps them to different exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("non-finite value in {what} at position {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("invalid parameter {name} = {value}: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("integration diverged at output level y = {y} (grid point {index})")]
    Divergence { y: f64, index: usize },

    #[error("output level {y} outside the trajectory range [0, {max}]")]
    OutOfRange { y: f64, max: f64 },

    #[error(
        "no interior optimum (price below startup marginal cost): price {price} <= marginal cost {marginal} at y = 0"
    )]
    NoInteriorOptimum { price: f64, marginal: f64 },

    #[error(
        "non-monotone marginal cost: singleness assumption violated between y = {y_lo} and y = {y_hi}"
    )]
    NonMonotoneMarginal { y_lo: f64, y_hi: f64 },

    #[error("bracket exhausted: marginal cost {marginal} at y_max = {y_max} is still below price {price}")]
    BracketExhausted {
        y_max: f64,
        marginal: f64,
        price: f64,
    },

    #[error("anchor point lies outside the feasible region")]
    AnchorOutsideRegion,

    #[error("observation lies outside the feasible region")]
    OutsideRegion,

    #[error("unbounded ray: the direction never leaves the feasible region")]
    UnboundedRay,

    #[error("degenerate ray direction: observation coincides with the anchor")]
    DegenerateDirection,

    #[error("invalid region: {0}")]
    Region(String),

    #[error("observation beyond the worst point: d_j = {d_j} > d_w = {d_w}")]
    BeyondWorstPoint { d_j: f64, d_w: f64 },

    #[error("sample not strictly increasing in output at row {row} (y = {y})")]
    Ordering { row: usize, y: f64 },

    #[error("sample too small: need at least {needed} observations, got {got}")]
    SampleSize { needed: usize, got: usize },

    #[error("collinear design: columns {columns:?} are linearly dependent (condition number {condition:.3e})")]
    Collinear {
        columns: Vec<String>,
        condition: f64,
    },
}

impl Error {
    /// True for failures of the numerics (divergence, bracketing, ray casting,
    /// rank) as opposed to malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Divergence { .. }
                | Error::NoInteriorOptimum { .. }
                | Error::NonMonotoneMarginal { .. }
                | Error::BracketExhausted { .. }
                | Error::UnboundedRay
                | Error::DegenerateDirection
                | Error::BeyondWorstPoint { .. }
                | Error::Collinear { .. }
        )
    }

    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Parameter {
            name,
            value,
            reason,
        }
    }
}

pub(crate) fn check_dim(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension {
            what,
            expected,
            got,
        })
    }
}

pub(crate) fn check_finite(what: &'static str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { what, index }),
        None => Ok(()),
    }
}
