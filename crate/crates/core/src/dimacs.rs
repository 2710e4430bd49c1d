//! DIMACS CNF reading and writing, and the pigeonhole instance generator.

use std::fmt::Write as _;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::literal::{Clause, Literal, Var};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: missing `p cnf` header")]
    MissingHeader { line: usize },
    #[error("line {line}: malformed header `{text}`")]
    MalformedHeader { line: usize, text: String },
    #[error("line {line}: literal out of declared range ({lit} with {nvars} variables)")]
    LiteralOutOfRange { line: usize, lit: i64, nvars: u32 },
    #[error("line {line}: final clause not terminated by 0")]
    Unterminated { line: usize },
    #[error("line {line}: expected an integer, found `{token}`")]
    BadToken { line: usize, token: String },
}

/// A CNF over variables `1..=nvars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfInstance {
    pub nvars: u32,
    pub clauses: Vec<Clause>,
}

impl CnfInstance {
    pub fn new(nvars: u32, clauses: Vec<Clause>) -> Result<Self> {
        if let Some(c) = clauses.iter().find(|c| c.max_var() > nvars) {
            return Err(Error::VarOutOfRange {
                var: c.max_var(),
                nvars,
            });
        }
        Ok(CnfInstance { nvars, clauses })
    }

    /// Builds an instance from signed-integer clauses, sizing it to the
    /// largest variable.
    pub fn from_dimacs(clauses: &[Vec<i64>]) -> Result<Self> {
        let clauses = clauses
            .iter()
            .map(|c| Clause::from_dimacs(c))
            .collect::<Result<Vec<_>>>()?;
        let nvars = clauses.iter().map(Clause::max_var).max().unwrap_or(0);
        Ok(CnfInstance { nvars, clauses })
    }

    pub fn literal_count(&self) -> usize {
        self.clauses.iter().map(Clause::len).sum()
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
    }

    /// Variables in order of first occurrence, clause by clause; variables
    /// first seen in the same clause are ordered by index. Unused variables
    /// are left out.
    pub fn occurrence_order(&self) -> Vec<Var> {
        let mut seen = vec![false; self.nvars as usize + 1];
        let mut out = Vec::new();
        for c in &self.clauses {
            for l in c.literals() {
                let v = l.var();
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    out.push(v);
                }
            }
        }
        out
    }
}

/// Result of [`parse`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parsed {
    pub instance: CnfInstance,
    /// declared clause count from the header
    pub declared_clauses: usize,
    /// tautological clauses that were dropped
    pub tautologies: usize,
}

pub fn parse(text: &str) -> Result<Parsed, ParseError> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut tautologies = 0;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed == "%" {
            break;
        }
        if trimmed.starts_with('p') {
            let parts: Vec<&str> = trimmed.split_ascii_whitespace().collect();
            let parsed = match parts.as_slice() {
                ["p", "cnf", v, c] if header.is_none() => v.parse().ok().zip(c.parse().ok()),
                _ => None,
            };
            match parsed {
                Some(h) => header = Some(h),
                None => {
                    return Err(ParseError::MalformedHeader {
                        line,
                        text: trimmed.to_string(),
                    })
                }
            }
            continue;
        }
        let Some((nvars, _)) = header else {
            return Err(ParseError::MissingHeader { line });
        };
        for token in trimmed.split_ascii_whitespace() {
            let lit: i64 = token.parse().map_err(|_| ParseError::BadToken {
                line,
                token: token.to_string(),
            })?;
            if lit == 0 {
                match Clause::from_dimacs(&current) {
                    Ok(c) => clauses.push(c),
                    Err(_) => {
                        log::warn!("line {line}: dropping tautological clause {current:?}");
                        tautologies += 1;
                    }
                }
                current.clear();
            } else if lit.unsigned_abs() > u64::from(nvars) {
                return Err(ParseError::LiteralOutOfRange { line, lit, nvars });
            } else {
                current.push(lit);
            }
        }
    }
    let Some((nvars, declared)) = header else {
        return Err(ParseError::MissingHeader {
            line: last_line.max(1),
        });
    };
    if !current.is_empty() {
        return Err(ParseError::Unterminated { line: last_line });
    }
    if clauses.len() + tautologies != declared {
        log::warn!(
            "header declares {declared} clauses, found {}",
            clauses.len() + tautologies
        );
    }
    Ok(Parsed {
        instance: CnfInstance { nvars, clauses },
        declared_clauses: declared,
        tautologies,
    })
}

/// Canonical DIMACS text: header, then one clause per line.
pub fn write(cnf: &CnfInstance) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.nvars, cnf.clauses.len());
    for c in &cnf.clauses {
        for l in c.literals() {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
    out
}

/// Variable for pigeon `i` in hole `j` (both 1-based) with `n` holes.
pub fn pigeon_var(n: u32, i: u32, j: u32) -> Var {
    (i - 1) * n + j
}

/// `n + 1` pigeons into `n` holes: every pigeon sits in some hole and no
/// hole holds two pigeons.
pub fn gen_pigeonhole(n: u32) -> Result<CnfInstance> {
    if n < 1 {
        return Err(Error::Usage("pigeonhole needs at least one hole".into()));
    }
    let mut clauses = Vec::new();
    for i in 1..=n + 1 {
        clauses.push(Clause::new((1..=n).map(|j| Literal::pos(pigeon_var(n, i, j))))?);
    }
    for j in 1..=n {
        for i in 1..=n + 1 {
            for k in i + 1..=n + 1 {
                clauses.push(Clause::new([
                    Literal::neg(pigeon_var(n, i, j)),
                    Literal::neg(pigeon_var(n, k, j)),
                ])?);
            }
        }
    }
    CnfInstance::new(n * (n + 1), clauses)
}
