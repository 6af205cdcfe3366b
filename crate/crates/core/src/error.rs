use thiserror::Error;

/// Errors raised by the algebra layers.
///
/// The variants split into two families that the CLI maps onto distinct
/// exit codes: budget problems (precision, degree, jet order, stage) and
/// mathematical failures (a divisibility or integrality statement that is
/// false at the working precision).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not divisible by p^{k} at this precision (valuation {val})")]
    NotDivisible { val: i64, k: i64 },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("element is not a unit: {0}")]
    NotUnit(String),
    #[error("jet order budget exceeded: need {need}, budget {budget}")]
    JetOrder { need: usize, budget: usize },
    #[error("stage budget exceeded: need {need}, budget {budget}")]
    Stage { need: u32, budget: u32 },
    #[error("degree budget too small: {0}")]
    Degree(String),
    #[error("outside the convergence domain: {0}")]
    Convergence(String),
    #[error("bad reduction: {0}")]
    BadReduction(String),
    #[error("valuation floor violated: {0}")]
    ValuationFloor(String),
    #[error("integrality violated: {0}")]
    Integrality(String),
    #[error("shape violation: {0}")]
    Shape(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

impl Error {
    /// True for errors caused by an insufficient budget rather than by a
    /// false mathematical statement.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted(_)
                | Error::JetOrder { .. }
                | Error::Stage { .. }
                | Error::Degree(_)
        )
    }

    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Invalid(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
