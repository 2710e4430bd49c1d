use thiserror::Error;

use crate::dimacs::ParseError;
use crate::literal::Var;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which resource limit stopped a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Budget {
    Nodes,
    Time,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("tautological clause on variable {0}")]
    Tautology(Var),
    #[error("invalid literal {0}")]
    BadLiteral(i64),
    #[error("variable {var} outside the order domain 1..={nvars}")]
    VarOutOfRange { var: Var, nvars: u32 },
    #[error("{0} count exceeds the supported integer range")]
    Overflow(&'static str),
    #[error("{} budget exceeded", match .0 { Budget::Nodes => "node", Budget::Time => "time" })]
    BudgetExceeded(Budget),
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded(_))
    }
}
