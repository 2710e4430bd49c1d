//! Literals, clauses and the literal order used to label ZDD nodes.

use std::fmt;

use crate::error::{Error, Result};

/// SAT variable, 1-based as in DIMACS.
pub type Var = u32;

/// A signed occurrence of a variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: Var,
    negative: bool,
}

impl Literal {
    pub fn new(var: Var, positive: bool) -> Self {
        assert!(var >= 1, "variable indices start at 1");
        Literal {
            var,
            negative: !positive,
        }
    }

    pub fn pos(var: Var) -> Self {
        Literal::new(var, true)
    }

    pub fn neg(var: Var) -> Self {
        Literal::new(var, false)
    }

    /// Decodes a non-zero DIMACS integer.
    pub fn from_dimacs(lit: i64) -> Option<Self> {
        if lit == 0 || lit.unsigned_abs() > u64::from(Var::MAX) {
            return None;
        }
        Some(Literal::new(lit.unsigned_abs() as Var, lit > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        if self.negative {
            -i64::from(self.var)
        } else {
            i64::from(self.var)
        }
    }

    pub fn var(self) -> Var {
        self.var
    }

    pub fn is_positive(self) -> bool {
        !self.negative
    }

    pub fn negate(self) -> Self {
        Literal {
            var: self.var,
            negative: !self.negative,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A non-tautological set of literals, kept sorted by `(var, sign)` with the
/// positive literal first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Clause(Vec<Literal>);

impl Clause {
    /// Builds a clause, collapsing repeated literals. Fails on `v ∨ ¬v`.
    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Result<Self> {
        let mut lits: Vec<Literal> = lits.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        if let Some(w) = lits.windows(2).find(|w| w[0].var == w[1].var) {
            return Err(Error::Tautology(w[0].var));
        }
        Ok(Clause(lits))
    }

    pub fn from_dimacs(lits: &[i64]) -> Result<Self> {
        let lits = lits
            .iter()
            .map(|&l| Literal::from_dimacs(l).ok_or(Error::BadLiteral(l)))
            .collect::<Result<Vec<_>>>()?;
        Clause::new(lits)
    }

    pub fn empty() -> Self {
        Clause(Vec::new())
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.0.binary_search(&lit).is_ok()
    }

    pub fn max_var(&self) -> Var {
        self.0.iter().map(|l| l.var).max().unwrap_or(0)
    }

    pub fn to_dimacs(&self) -> Vec<i64> {
        self.0.iter().map(|l| l.to_dimacs()).collect()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

/// Total order on literals: `[v1, ¬v1, v2, ¬v2, …]` over a permutation of the
/// variables. Node labels are stored as ranks in this order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiteralOrder {
    /// position of variable `v` at index `v - 1`
    position: Vec<u32>,
    /// variable at each position
    vars: Vec<Var>,
}

impl LiteralOrder {
    /// Ascending variable index: `rank(+v) = 2(v-1)`, `rank(¬v) = 2(v-1)+1`.
    pub fn ascending(nvars: u32) -> Self {
        LiteralOrder {
            position: (0..nvars).collect(),
            vars: (1..=nvars).collect(),
        }
    }

    /// Order the variables as listed. `vars` must be a permutation of `1..=n`.
    pub fn from_vars(vars: Vec<Var>) -> Result<Self> {
        let n = vars.len();
        let mut position = vec![u32::MAX; n];
        for (pos, &v) in vars.iter().enumerate() {
            let slot = (v as usize)
                .checked_sub(1)
                .and_then(|i| position.get_mut(i))
                .ok_or(Error::VarOutOfRange { var: v, nvars: n as u32 })?;
            if *slot != u32::MAX {
                return Err(Error::Usage(format!("variable {v} listed twice in order")));
            }
            *slot = pos as u32;
        }
        Ok(LiteralOrder { position, vars })
    }

    pub fn nvars(&self) -> u32 {
        self.vars.len() as u32
    }

    pub fn contains(&self, var: Var) -> bool {
        var >= 1 && var as usize <= self.vars.len()
    }

    /// Position of `var` in the variable order.
    pub fn position(&self, var: Var) -> u32 {
        self.position[var as usize - 1]
    }

    pub fn var_at(&self, position: u32) -> Var {
        self.vars[position as usize]
    }

    pub fn rank(&self, lit: Literal) -> u32 {
        2 * self.position(lit.var) + u32::from(lit.negative)
    }

    pub fn literal(&self, rank: u32) -> Literal {
        Literal::new(self.var_at(rank / 2), rank.is_multiple_of(2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_round_trip() {
        for x in [-7i64, -1, 1, 42] {
            assert_eq!(Literal::from_dimacs(x).unwrap().to_dimacs(), x);
        }
        assert!(Literal::from_dimacs(0).is_none());
    }

    #[test]
    fn clause_hygiene() {
        let c = Clause::from_dimacs(&[2, 1, 2]).unwrap();
        assert_eq!(c.to_dimacs(), vec![1, 2]);
        assert!(matches!(
            Clause::from_dimacs(&[1, -1]),
            Err(Error::Tautology(1))
        ));
    }

    #[test]
    fn ascending_ranks_interleave() {
        let o = LiteralOrder::ascending(3);
        let ranks: Vec<u32> = [1, -1, 2, -2, 3, -3]
            .iter()
            .map(|&l| o.rank(Literal::from_dimacs(l).unwrap()))
            .collect();
        assert_eq!(ranks, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(o.literal(3), Literal::neg(2));
    }

    #[test]
    fn permuted_order() {
        let o = LiteralOrder::from_vars(vec![3, 1, 2]).unwrap();
        assert_eq!(o.rank(Literal::pos(3)), 0);
        assert_eq!(o.rank(Literal::neg(2)), 5);
        assert!(LiteralOrder::from_vars(vec![1, 1]).is_err());
        assert!(LiteralOrder::from_vars(vec![1, 3]).is_err());
    }
}
