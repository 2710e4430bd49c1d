//! Brute-force reference implementations used to check the engine.
//!
//! Nothing here touches the decision-diagram code: clauses are plain sets of
//! signed DIMACS integers and formulas are evaluated by enumerating every
//! assignment.

use std::collections::{BTreeSet, HashMap, HashSet};

/// A clause as a set of non-zero signed integers.
pub type RefClause = BTreeSet<i64>;
/// A clause set with no sharing.
pub type ExplicitClauseSet = BTreeSet<RefClause>;

/// Largest instance [`tt_sat`] will enumerate.
pub const TT_MAX_VARS: u32 = 20;

pub fn clause(lits: &[i64]) -> RefClause {
    lits.iter().copied().collect()
}

pub fn clause_set(clauses: &[&[i64]]) -> ExplicitClauseSet {
    clauses.iter().map(|c| clause(c)).collect()
}

pub fn is_tautology(c: &RefClause) -> bool {
    c.iter().any(|&l| c.contains(&-l))
}

fn satisfies(assignment: u32, c: &RefClause) -> bool {
    c.iter().any(|&l| {
        let value = assignment >> (l.unsigned_abs() - 1) & 1 == 1;
        value == (l > 0)
    })
}

/// All models of `clauses` over `nvars` variables as bitmasks (bit `v-1`
/// holds variable `v`).
pub fn models<'a>(nvars: u32, clauses: impl IntoIterator<Item = &'a RefClause> + Clone) -> Result<Vec<u32>, String> {
    if nvars > TT_MAX_VARS {
        return Err(format!("truth table over {nvars} variables exceeds {TT_MAX_VARS}"));
    }
    Ok((0..1u32 << nvars)
        .filter(|&a| clauses.clone().into_iter().all(|c| satisfies(a, c)))
        .collect())
}

/// Satisfiability and model count by truth table.
pub fn tt_sat<'a>(nvars: u32, clauses: impl IntoIterator<Item = &'a RefClause> + Clone) -> Result<(bool, u64), String> {
    let n = models(nvars, clauses)?.len() as u64;
    Ok((n > 0, n))
}

/// Drops every clause that strictly contains another one.
pub fn ref_minimal(s: &ExplicitClauseSet) -> ExplicitClauseSet {
    s.iter()
        .filter(|c| !s.iter().any(|d| d != *c && d.is_subset(c)))
        .cloned()
        .collect()
}

/// `{ c ∈ A : no d ∈ B with d ⊆ c }`.
pub fn ref_subdiff(a: &ExplicitClauseSet, b: &ExplicitClauseSet) -> ExplicitClauseSet {
    a.iter()
        .filter(|c| !b.iter().any(|d| d.is_subset(c)))
        .cloned()
        .collect()
}

/// Minimal clauses of the non-tautological pairwise unions.
pub fn ref_distribute(a: &ExplicitClauseSet, b: &ExplicitClauseSet) -> ExplicitClauseSet {
    let mut out = ExplicitClauseSet::new();
    for x in a {
        for y in b {
            let u: RefClause = x.union(y).copied().collect();
            if !is_tautology(&u) {
                out.insert(u);
            }
        }
    }
    ref_minimal(&out)
}

/// `(plus, minus, rest)` of `c` with respect to variable `v`.
pub fn ref_extract(
    c: &ExplicitClauseSet,
    v: i64,
) -> (ExplicitClauseSet, ExplicitClauseSet, ExplicitClauseSet) {
    let strip = |lit: i64| -> ExplicitClauseSet {
        c.iter()
            .filter(|cl| cl.contains(&lit))
            .map(|cl| cl.iter().copied().filter(|&l| l != lit).collect())
            .collect()
    };
    let rest = c
        .iter()
        .filter(|cl| !cl.contains(&v) && !cl.contains(&-v))
        .cloned()
        .collect();
    (strip(v), strip(-v), rest)
}

/// All resolvents on `v` plus the clauses without `v`, minimised.
pub fn ref_eliminate(c: &ExplicitClauseSet, v: i64) -> ExplicitClauseSet {
    let (plus, minus, rest) = ref_extract(c, v);
    let mut out = ref_distribute(&plus, &minus);
    out.extend(rest);
    ref_minimal(&out)
}

/// Internal nodes reachable from `root` in a text dump with lines
/// `id label then_id else_id`; ids `0` and `1` are the sinks.
pub fn dump_reachable(dump: &str, root: u32) -> usize {
    let edges: HashMap<u32, (u32, u32)> = dump
        .lines()
        .filter_map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            Some((f[0].parse().ok()?, (f[2].parse().ok()?, f[3].parse().ok()?)))
        })
        .collect();
    let mut seen = HashSet::new();
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        if id < 2 || !seen.insert(id) {
            continue;
        }
        let (t, e) = edges[&id];
        stack.push(t);
        stack.push(e);
    }
    seen.len()
}
