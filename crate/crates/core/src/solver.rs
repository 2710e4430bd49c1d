//! Davis-Putnam variable elimination on clause-set ZDDs, plus the BDD-based
//! solving routes.
//!
//! One elimination step on `v` splits the clause set into the clauses with
//! `+v`, those with `¬v` and the rest, distributes the first two (all
//! resolvents on `v`) and merges the resolvents back into the rest with
//! subsumption removal. The formula is unsatisfiable once the empty clause
//! appears and satisfiable once no clause is left.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::bdd::{Assignment, BddHandle, BddManager};
use crate::dimacs::CnfInstance;
use crate::error::{Error, Result};
use crate::literal::{LiteralOrder, Var};
use crate::par::Parallelism;
use crate::store::{Limits, ZddHandle, ZddStore};

/// Variable-selection rule for the elimination loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    /// first remaining variable in order of first occurrence
    Original,
    /// first variable whose elimination keeps the node count within the bound
    NodeBound,
    /// first variable whose elimination keeps the clause count within the bound
    ClauseBound,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [
        StrategyKind::Original,
        StrategyKind::NodeBound,
        StrategyKind::ClauseBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Original => "original",
            StrategyKind::NodeBound => "node",
            StrategyKind::ClauseBound => "clause",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(StrategyKind::Original),
            "node" => Ok(StrategyKind::NodeBound),
            "clause" => Ok(StrategyKind::ClauseBound),
            _ => Err(Error::Usage(format!("unknown strategy `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub kind: StrategyKind,
    /// allowed growth over the current size; unused by `Original`
    pub bound: u64,
}

impl Strategy {
    pub fn new(kind: StrategyKind) -> Self {
        Strategy { kind, bound: 0 }
    }

    pub fn with_bound(mut self, bound: u64) -> Self {
        self.bound = bound;
        self
    }
}

/// How to decide an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// variable elimination on the clause-set ZDD
    Dp,
    /// conjunction of clause BDDs in file order
    BddDirect,
    /// CNF to ZDD, then ZDD to BDD
    BddViaZdd,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Dp, Method::BddDirect, Method::BddViaZdd];

    pub fn name(self) -> &'static str {
        match self {
            Method::Dp => "dp",
            Method::BddDirect => "bdd-direct",
            Method::BddViaZdd => "bdd-zdd",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dp" => Ok(Method::Dp),
            "bdd-direct" => Ok(Method::BddDirect),
            "bdd-zdd" | "bdd-via-zdd" => Ok(Method::BddViaZdd),
            _ => Err(Error::Usage(format!("unknown method `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat,
    Unsat,
}

/// One performed elimination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub var: Var,
    /// kept within the bound (always true for `Original`); false when taken
    /// by the lowest-increase fallback
    pub accepted: bool,
    /// speculative eliminations discarded before this one
    pub rejected: usize,
    pub nodes_before: usize,
    pub nodes_after: usize,
    pub clauses_before: u64,
    pub clauses_after: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub method: Method,
    pub verdict: Verdict,
    /// witness from the BDD routes; DP does not keep one
    pub model: Option<Assignment>,
    pub steps: Vec<Step>,
    pub initial_nodes: usize,
    pub initial_literals: u64,
    pub initial_clauses: u64,
    /// nodes of the BDD of all models (BDD routes)
    pub bdd_nodes: Option<usize>,
    pub elapsed: Duration,
}

impl SolveReport {
    /// Initial ZDD nodes per literal of the input clause set.
    pub fn compression_ratio(&self) -> f64 {
        if self.initial_literals == 0 {
            0.0
        } else {
            self.initial_nodes as f64 / self.initial_literals as f64
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub method: Method,
    pub strategy: Strategy,
    pub parallelism: Parallelism,
    pub max_nodes: Option<usize>,
    pub max_time: Option<Duration>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            method: Method::Dp,
            strategy: Strategy::new(StrategyKind::NodeBound),
            parallelism: Parallelism::sequential(),
            max_nodes: None,
            max_time: None,
        }
    }
}

impl SolveOptions {
    pub fn dp(kind: StrategyKind) -> Self {
        SolveOptions {
            strategy: Strategy::new(kind),
            ..Default::default()
        }
    }

    pub fn method(method: Method) -> Self {
        SolveOptions {
            method,
            ..Default::default()
        }
    }

    fn limits(&self, start: Instant) -> Limits {
        Limits {
            max_nodes: self.max_nodes,
            deadline: self.max_time.map(|t| start + t),
        }
    }
}

/// Resolves away `v`: `Rest ⊔_S (A⁺ ×_S A⁻)`.
pub fn eliminate_variable(store: &ZddStore, c: ZddHandle, v: Var) -> Result<ZddHandle> {
    let parts = store.extract(c, v)?;
    let resolvents = store.distribute(parts.plus, parts.minus)?;
    store.union_subsuming(parts.rest, resolvents)
}

/// Outcome of one selection round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Selection {
    pub var: Var,
    pub result: ZddHandle,
    pub accepted: bool,
    pub rejected: usize,
}

fn measure(store: &ZddStore, kind: StrategyKind, h: ZddHandle) -> u64 {
    match kind {
        StrategyKind::ClauseBound => store.clause_count(h).unwrap_or(u64::MAX),
        _ => store.node_count(h) as u64,
    }
}

/// Picks and eliminates the next variable from `remaining`.
///
/// Bounded strategies try candidates in order and take the first whose
/// result has size at most `size(c) + bound`; if none does, the first
/// candidate with the smallest result is taken.
pub fn select_and_eliminate(
    store: &ZddStore,
    c: ZddHandle,
    remaining: &[Var],
    strategy: Strategy,
) -> Result<Selection> {
    let first = *remaining
        .first()
        .ok_or_else(|| Error::Usage("no variable left to eliminate".into()))?;
    if strategy.kind == StrategyKind::Original {
        return Ok(Selection {
            var: first,
            result: eliminate_variable(store, c, first)?,
            accepted: true,
            rejected: 0,
        });
    }
    let limit = measure(store, strategy.kind, c).saturating_add(strategy.bound);
    let mut best: Option<(u64, Var, ZddHandle)> = None;
    for (i, &v) in remaining.iter().enumerate() {
        let result = eliminate_variable(store, c, v)?;
        let size = measure(store, strategy.kind, result);
        if size <= limit {
            return Ok(Selection {
                var: v,
                result,
                accepted: true,
                rejected: i,
            });
        }
        if best.is_none_or(|(s, _, _)| size < s) {
            best = Some((size, v, result));
        }
        store.trim_cache();
        store.check_deadline()?;
    }
    let (_, var, result) = best.expect("at least one candidate was evaluated");
    Ok(Selection {
        var,
        result,
        accepted: false,
        rejected: remaining.len(),
    })
}

/// Decides `cnf` with the method in `options`.
pub fn solve(cnf: &CnfInstance, options: &SolveOptions) -> Result<SolveReport> {
    options.parallelism.install(|| match options.method {
        Method::Dp => dp_solve(cnf, options),
        Method::BddDirect | Method::BddViaZdd => bdd_solve(cnf, options),
    })
}

struct Initial {
    root: ZddHandle,
    nodes: usize,
    literals: u64,
    clauses: u64,
}

fn encode(store: &ZddStore, cnf: &CnfInstance) -> Result<Initial> {
    let root = store.build_from_clauses(&cnf.clauses)?;
    Ok(Initial {
        root,
        nodes: store.node_count(root),
        literals: store.literal_count(root)?,
        clauses: store.clause_count(root)?,
    })
}

/// Variable elimination until the empty clause appears or no clause is left.
pub fn dp_solve(cnf: &CnfInstance, options: &SolveOptions) -> Result<SolveReport> {
    let start = Instant::now();
    let store = ZddStore::new(LiteralOrder::ascending(cnf.nvars))
        .with_parallelism(options.parallelism)
        .with_limits(options.limits(start));
    store.check_deadline()?;
    let init = encode(&store, cnf)?;
    let mut report = SolveReport {
        method: Method::Dp,
        verdict: Verdict::Unsat,
        model: None,
        steps: Vec::new(),
        initial_nodes: init.nodes,
        initial_literals: init.literals,
        initial_clauses: init.clauses,
        bdd_nodes: None,
        elapsed: Duration::ZERO,
    };
    let occurrence = cnf.occurrence_order();
    let strategy = options.strategy;
    let mut root = if cnf.has_empty_clause() {
        ZddHandle::ONE
    } else {
        store.subsumption_free(init.root)?
    };
    let verdict = loop {
        if store.has_empty_clause(root) {
            break Verdict::Unsat;
        }
        if root == ZddHandle::ZERO {
            break Verdict::Sat;
        }
        store.check_deadline()?;
        let support = store.support(root);
        let remaining: Vec<Var> = occurrence
            .iter()
            .copied()
            .filter(|v| support.contains(v))
            .collect();
        let nodes_before = store.node_count(root);
        let clauses_before = store.clause_count(root).unwrap_or(u64::MAX);
        let sel = select_and_eliminate(&store, root, &remaining, strategy)?;
        debug_assert!(!store.support(sel.result).contains(&sel.var));
        root = sel.result;
        let step = Step {
            var: sel.var,
            accepted: sel.accepted,
            rejected: sel.rejected,
            nodes_before,
            nodes_after: store.node_count(root),
            clauses_before,
            clauses_after: store.clause_count(root).unwrap_or(u64::MAX),
        };
        log::debug!("{step:?}");
        report.steps.push(step);
        store.trim_cache();
    };
    report.verdict = verdict;
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Builds the BDD of all models and reads the verdict off it.
pub fn bdd_solve(cnf: &CnfInstance, options: &SolveOptions) -> Result<SolveReport> {
    let order = LiteralOrder::ascending(cnf.nvars);
    let start = Instant::now();
    let limits = options.limits(start);
    let store = ZddStore::new(order.clone())
        .with_parallelism(options.parallelism)
        .with_limits(limits);
    let mgr = BddManager::new(order)
        .with_parallelism(options.parallelism)
        .with_limits(limits);
    store.check_deadline()?;
    let (f, init) = match options.method {
        Method::BddDirect => {
            let f = mgr.conjoin_direct(cnf)?;
            (f, None)
        }
        _ => {
            let init = encode(&store, cnf)?;
            (mgr.zdd_to_bdd(&store, init.root)?, Some(init))
        }
    };
    let elapsed = start.elapsed();
    let init = match init {
        Some(i) => i,
        None => encode(&store, cnf)?,
    };
    let model = mgr.any_model(f);
    Ok(SolveReport {
        method: options.method,
        verdict: if f == BddHandle::FALSE {
            Verdict::Unsat
        } else {
            Verdict::Sat
        },
        model,
        steps: Vec::new(),
        initial_nodes: init.nodes,
        initial_literals: init.literals,
        initial_clauses: init.clauses,
        bdd_nodes: Some(mgr.reachable_count(f)),
        elapsed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimacs::gen_pigeonhole;
    use crate::literal::Clause;

    fn cnf(clauses: &[&[i64]]) -> CnfInstance {
        CnfInstance::from_dimacs(&clauses.iter().map(|c| c.to_vec()).collect::<Vec<_>>())
            .unwrap()
    }

    fn store_for(c: &CnfInstance) -> (ZddStore, ZddHandle) {
        let s = ZddStore::new(LiteralOrder::ascending(c.nvars));
        let root = s.build_from_clauses(&c.clauses).unwrap();
        (s, root)
    }

    fn show(s: &ZddStore, h: ZddHandle) -> Vec<Vec<i64>> {
        s.enumerate(h).iter().map(Clause::to_dimacs).collect()
    }

    #[test]
    fn elimination_examples() {
        let (s, c) = store_for(&cnf(&[&[1, 2], &[-1, 3], &[4]]));
        let r = eliminate_variable(&s, c, 1).unwrap();
        assert_eq!(show(&s, r), vec![vec![4], vec![2, 3]]);
        assert!(!s.support(r).contains(&1));

        let (s, c) = store_for(&cnf(&[&[1], &[-1]]));
        assert_eq!(eliminate_variable(&s, c, 1).unwrap(), ZddHandle::ONE);

        let (s, c) = store_for(&cnf(&[&[1, 2]]));
        assert_eq!(eliminate_variable(&s, c, 1).unwrap(), ZddHandle::ZERO);
    }

    #[test]
    fn original_takes_first_listed() {
        let (s, c) = store_for(&cnf(&[&[1, 2], &[-2]]));
        let sel = select_and_eliminate(&s, c, &[2, 1], Strategy::new(StrategyKind::Original))
            .unwrap();
        assert_eq!(sel.var, 2);
        assert!(sel.accepted);
    }

    #[test]
    fn node_bound_accepts_shrinking_step() {
        let (s, c) = store_for(&cnf(&[&[1], &[-1, 2]]));
        // +1 → ¬1 → +2 chain, counted independently from the text dump
        assert_eq!(crate::oracle::dump_reachable(&s.dump(c), c.id()), 3);
        assert_eq!(s.node_count(c), 3);
        let sel =
            select_and_eliminate(&s, c, &[1, 2], Strategy::new(StrategyKind::NodeBound)).unwrap();
        assert_eq!(sel.var, 1);
        assert!(sel.accepted);
        assert_eq!(s.node_count(sel.result), 1);
    }

    #[test]
    fn fallback_takes_first_minimal_increase() {
        // {x1∨x3, ¬x1∨x4, x2∨x5, ¬x2∨x6} in a permuted order so that both
        // eliminations grow the diagram
        let c = cnf(&[&[1, 3], &[-1, 4], &[2, 5], &[-2, 6]]);
        let s = ZddStore::new(LiteralOrder::from_vars(vec![3, 4, 5, 6, 1, 2]).unwrap());
        let root = s.build_from_clauses(&c.clauses).unwrap();
        let before = s.node_count(root) as u64;
        let sizes: Vec<u64> = [1, 2]
            .iter()
            .map(|&v| s.node_count(eliminate_variable(&s, root, v).unwrap()) as u64)
            .collect();
        let sel = select_and_eliminate(&s, root, &[1, 2], Strategy::new(StrategyKind::NodeBound))
            .unwrap();
        if sizes.iter().all(|&x| x > before) {
            let min = *sizes.iter().min().unwrap();
            let expect = [1, 2][sizes.iter().position(|&x| x == min).unwrap()];
            assert!(!sel.accepted);
            assert_eq!(sel.var, expect);
        } else {
            assert!(sel.accepted);
        }
    }

    #[test]
    fn dp_verdicts() {
        for kind in StrategyKind::ALL {
            let opts = SolveOptions::dp(kind);
            assert_eq!(dp_solve(&cnf(&[&[1]]), &opts).unwrap().verdict, Verdict::Sat);
            assert_eq!(
                dp_solve(&cnf(&[&[1], &[-1]]), &opts).unwrap().verdict,
                Verdict::Unsat
            );
            for n in 1..=3 {
                let r = dp_solve(&gen_pigeonhole(n).unwrap(), &opts).unwrap();
                assert_eq!(r.verdict, Verdict::Unsat, "{kind} ph{n}");
            }
        }
    }

    #[test]
    fn input_empty_clause_short_circuits() {
        let c = CnfInstance::new(2, vec![Clause::empty(), Clause::from_dimacs(&[1, 2]).unwrap()])
            .unwrap();
        let r = dp_solve(&c, &SolveOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Unsat);
        assert!(r.steps.is_empty());
    }

    #[test]
    fn bdd_routes_give_models() {
        for m in [Method::BddDirect, Method::BddViaZdd] {
            let r = solve(&cnf(&[&[1]]), &SolveOptions::method(m)).unwrap();
            assert_eq!(r.verdict, Verdict::Sat);
            assert_eq!(r.model, Some(Assignment::from([(1, true)])));
            let r = solve(&gen_pigeonhole(2).unwrap(), &SolveOptions::method(m)).unwrap();
            assert_eq!(r.verdict, Verdict::Unsat);
        }
    }

    #[test]
    fn zero_time_budget() {
        let opts = SolveOptions {
            max_time: Some(Duration::ZERO),
            ..Default::default()
        };
        let err = solve(&gen_pigeonhole(2).unwrap(), &opts).unwrap_err();
        assert!(err.is_budget());
    }
}
