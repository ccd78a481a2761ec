use thiserror::Error;

/// Location-tagged syntax error from the expression and problem-file parsers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),

    #[error("invalid variable declaration: {0}")]
    InvalidSpace(String),

    #[error("expected a horizontal form, found {0} term(s) with contact factors")]
    NotHorizontal(usize),

    #[error("expected a form of degree {expected}, found degree {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("expression is not linear in the {0} arguments")]
    NotLinear(&'static str),

    #[error("invalid equation system: {0}")]
    InvalidSystem(String),

    #[error("reduction exceeded the derivative-order bound {max} (reached order {order}); system is not orthonomic for this bound")]
    OrderBound { order: u32, max: u32 },

    #[error("reduction of {0} does not terminate; system is not orthonomic")]
    NonTerminating(String),

    #[error("operator is not d_h-closed: {0} term(s) survive normalization")]
    NotClosed(usize),

    #[error("Euler-Lagrange expression does not vanish on the equation: {0}")]
    EulerNonvanishing(String),

    #[error("form is not an internal Lagrangian; contact-degree < 2 residue: {0}")]
    NotInternal(String),

    #[error("{0}")]
    Problem(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
