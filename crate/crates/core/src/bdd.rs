//! Reduced ordered BDDs over SAT variables, and the two ways of building the
//! BDD of all models of a CNF: conjoining clause BDDs one by one, or
//! converting a clause-set ZDD bottom-up with one BDD per ZDD node.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use dashmap::DashMap;
use rustc_hash::FxBuildHasher;

use crate::arena::Arena;
use crate::dimacs::CnfInstance;
use crate::error::{Budget, Error, Result};
use crate::literal::{Clause, LiteralOrder, Var};
use crate::par::{join, Parallelism};
use crate::store::{Limits, ZddHandle, ZddStore};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BddHandle(u32);

impl BddHandle {
    pub const FALSE: BddHandle = BddHandle(0);
    pub const TRUE: BddHandle = BddHandle(1);

    pub fn is_const(self) -> bool {
        self.0 < 2
    }

    fn index(self) -> usize {
        self.0 as usize - 2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BddNode {
    /// position of the variable in the order
    pub level: u32,
    pub hi: BddHandle,
    pub lo: BddHandle,
}

/// Partial assignment; unmentioned variables are free.
pub type Assignment = BTreeMap<Var, bool>;

pub struct BddManager {
    order: LiteralOrder,
    nodes: Arena<BddNode>,
    unique: DashMap<BddNode, u32, FxBuildHasher>,
    and_cache: DashMap<(u32, u32), u32, FxBuildHasher>,
    par: Parallelism,
    limits: Limits,
    ticks: AtomicU64,
    timed_out: AtomicBool,
}

impl BddManager {
    pub fn new(order: LiteralOrder) -> Self {
        BddManager {
            order,
            nodes: Arena::new(),
            unique: DashMap::with_hasher(FxBuildHasher),
            and_cache: DashMap::with_hasher(FxBuildHasher),
            par: Parallelism::sequential(),
            limits: Limits::default(),
            ticks: AtomicU64::new(0),
            timed_out: AtomicBool::new(false),
        }
    }

    pub fn with_parallelism(mut self, par: Parallelism) -> Self {
        self.par = par;
        self
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn order(&self) -> &LiteralOrder {
        &self.order
    }

    pub fn allocated(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, f: BddHandle) -> &BddNode {
        self.nodes.get(f.index())
    }

    fn level(&self, f: BddHandle) -> u32 {
        if f.is_const() {
            self.order.nvars()
        } else {
            self.node(f).level
        }
    }

    fn tick(&self) -> Result<()> {
        let Some(deadline) = self.limits.deadline else {
            return Ok(());
        };
        if self.timed_out.load(Ordering::Relaxed) {
            return Err(Error::BudgetExceeded(Budget::Time));
        }
        if self.ticks.fetch_add(1, Ordering::Relaxed).is_multiple_of(4096) && Instant::now() >= deadline {
            self.timed_out.store(true, Ordering::Relaxed);
            return Err(Error::BudgetExceeded(Budget::Time));
        }
        Ok(())
    }

    /// Reduced node testing the variable at `level`.
    pub fn make_node(&self, level: u32, hi: BddHandle, lo: BddHandle) -> Result<BddHandle> {
        assert!(
            level < self.level(hi) && level < self.level(lo),
            "BDD order violation at level {level}"
        );
        if hi == lo {
            return Ok(lo);
        }
        let key = BddNode { level, hi, lo };
        if let Some(id) = self.unique.get(&key) {
            return Ok(BddHandle(*id));
        }
        if let Some(max) = self.limits.max_nodes {
            if self.nodes.len() >= max {
                return Err(Error::BudgetExceeded(Budget::Nodes));
            }
        }
        let id = *self
            .unique
            .entry(key)
            .or_insert_with(|| (self.nodes.push(key) + 2) as u32);
        Ok(BddHandle(id))
    }

    /// The single-variable function `v` (or `¬v`).
    pub fn literal(&self, v: Var, positive: bool) -> Result<BddHandle> {
        if !self.order.contains(v) {
            return Err(Error::VarOutOfRange {
                var: v,
                nvars: self.order.nvars(),
            });
        }
        let (hi, lo) = if positive {
            (BddHandle::TRUE, BddHandle::FALSE)
        } else {
            (BddHandle::FALSE, BddHandle::TRUE)
        };
        self.make_node(self.order.position(v), hi, lo)
    }

    pub fn and(&self, f: BddHandle, g: BddHandle) -> Result<BddHandle> {
        self.and_rec(f, g, 0)
    }

    fn and_rec(&self, f: BddHandle, g: BddHandle, depth: u32) -> Result<BddHandle> {
        if f == BddHandle::FALSE || g == BddHandle::FALSE {
            return Ok(BddHandle::FALSE);
        }
        if f == BddHandle::TRUE || f == g {
            return Ok(g);
        }
        if g == BddHandle::TRUE {
            return Ok(f);
        }
        let (f, g) = if f < g { (f, g) } else { (g, f) };
        if let Some(r) = self.and_cache.get(&(f.0, g.0)) {
            return Ok(BddHandle(*r));
        }
        self.tick()?;
        let lf = self.level(f);
        let lg = self.level(g);
        let level = lf.min(lg);
        let split = |h: BddHandle, l: u32| {
            if l == level {
                let n = self.node(h);
                (n.hi, n.lo)
            } else {
                (h, h)
            }
        };
        let (fh, fl) = split(f, lf);
        let (gh, gl) = split(g, lg);
        let (hi, lo) = join(
            self.par.forks_at(depth),
            || self.and_rec(fh, gh, depth + 1),
            || self.and_rec(fl, gl, depth + 1),
        );
        let r = self.make_node(level, hi?, lo?)?;
        self.and_cache.insert((f.0, g.0), r.0);
        Ok(r)
    }

    /// Disjunction of the clause's literals; the empty clause is `FALSE`.
    pub fn clause(&self, c: &Clause) -> Result<BddHandle> {
        let mut lits: Vec<_> = c
            .literals()
            .iter()
            .map(|&l| {
                if self.order.contains(l.var()) {
                    Ok((self.order.position(l.var()), l.is_positive()))
                } else {
                    Err(Error::VarOutOfRange {
                        var: l.var(),
                        nvars: self.order.nvars(),
                    })
                }
            })
            .collect::<Result<_>>()?;
        lits.sort_unstable_by(|a, b| b.cmp(a));
        let mut acc = BddHandle::FALSE;
        for (level, positive) in lits {
            acc = if positive {
                self.make_node(level, BddHandle::TRUE, acc)?
            } else {
                self.make_node(level, acc, BddHandle::TRUE)?
            };
        }
        Ok(acc)
    }

    /// Conjunction of all clauses, folded left to right in file order.
    pub fn conjoin_direct(&self, cnf: &CnfInstance) -> Result<BddHandle> {
        let mut acc = BddHandle::TRUE;
        for c in &cnf.clauses {
            let cb = self.clause(c)?;
            acc = self.and(acc, cb)?;
            if acc == BddHandle::FALSE {
                break;
            }
        }
        Ok(acc)
    }

    /// Conjunction of all clauses as a balanced binary tree of `and`s.
    pub fn conjoin_balanced(&self, cnf: &CnfInstance) -> Result<BddHandle> {
        let leaves = cnf
            .clauses
            .iter()
            .map(|c| self.clause(c))
            .collect::<Result<Vec<_>>>()?;
        self.conjoin_tree(&leaves, 0)
    }

    fn conjoin_tree(&self, fs: &[BddHandle], depth: u32) -> Result<BddHandle> {
        match fs {
            [] => Ok(BddHandle::TRUE),
            [f] => Ok(*f),
            _ => {
                let (l, r) = fs.split_at(fs.len() / 2);
                let (l, r) = join(
                    self.par.forks_at(depth),
                    || self.conjoin_tree(l, depth + 1),
                    || self.conjoin_tree(r, depth + 1),
                );
                self.and(l?, r?)
            }
        }
    }

    /// BDD of the models of the clause set `root` of `store`.
    pub fn zdd_to_bdd(&self, store: &ZddStore, root: ZddHandle) -> Result<BddHandle> {
        assert_eq!(store.order(), &self.order, "ZDD and BDD orders differ");
        let memo = DashMap::with_hasher(FxBuildHasher);
        self.zdd_to_bdd_rec(store, root, &memo, 0)
    }

    fn zdd_to_bdd_rec(
        &self,
        store: &ZddStore,
        h: ZddHandle,
        memo: &DashMap<ZddHandle, BddHandle, FxBuildHasher>,
        depth: u32,
    ) -> Result<BddHandle> {
        if h == ZddHandle::ZERO {
            return Ok(BddHandle::TRUE);
        }
        if h == ZddHandle::ONE {
            return Ok(BddHandle::FALSE);
        }
        if let Some(r) = memo.get(&h) {
            return Ok(*r);
        }
        self.tick()?;
        let level = store.top_position(h);
        let (n1, n2, n3) = store.cofactors(h, level);
        let fork = self.par.forks_at(depth);
        let d = depth + 1;
        let (b1, (b2, b3)) = join(
            fork,
            || self.zdd_to_bdd_rec(store, n1, memo, d),
            || {
                join(
                    fork,
                    || self.zdd_to_bdd_rec(store, n2, memo, d),
                    || self.zdd_to_bdd_rec(store, n3, memo, d),
                )
            },
        );
        let b3 = b3?;
        // v true satisfies the +v clauses and leaves the ¬v ones shortened
        let (hi, lo) = join(
            fork,
            || self.and_rec(b2?, b3, d),
            || self.and_rec(b1?, b3, d),
        );
        let r = self.make_node(level, hi?, lo?)?;
        memo.insert(h, r);
        Ok(r)
    }

    /// Number of models over variables `1..=nvars`.
    pub fn satcount(&self, f: BddHandle, nvars: u32) -> Result<u128> {
        let n = self.order.nvars();
        if f != BddHandle::FALSE && nvars < n {
            if let Some(v) = self.support(f).into_iter().find(|&v| v > nvars) {
                return Err(Error::VarOutOfRange { var: v, nvars });
            }
        }
        let pow2 = |k: u32| 1u128.checked_shl(k).ok_or(Error::Overflow("model"));
        let mut memo = HashMap::new();
        let below = self.count_rec(f, &mut memo)?;
        let full = below
            .checked_mul(pow2(self.level(f))?)
            .ok_or(Error::Overflow("model"))?;
        if nvars >= n {
            full.checked_mul(pow2(nvars - n)?)
                .ok_or(Error::Overflow("model"))
        } else {
            Ok(full >> (n - nvars))
        }
    }

    /// Models over the variables at levels `level(f)..n`.
    fn count_rec(&self, f: BddHandle, memo: &mut HashMap<BddHandle, u128>) -> Result<u128> {
        if f.is_const() {
            return Ok(u128::from(f == BddHandle::TRUE));
        }
        if let Some(&c) = memo.get(&f) {
            return Ok(c);
        }
        let node = *self.node(f);
        let mut total = 0u128;
        for child in [node.hi, node.lo] {
            let gap = self.level(child) - node.level - 1;
            let c = self
                .count_rec(child, memo)?
                .checked_mul(1u128.checked_shl(gap).ok_or(Error::Overflow("model"))?)
                .and_then(|c| c.checked_add(total))
                .ok_or(Error::Overflow("model"))?;
            total = c;
        }
        memo.insert(f, total);
        Ok(total)
    }

    /// Internal nodes reachable from `f`.
    pub fn reachable_count(&self, f: BddHandle) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![f];
        while let Some(h) = stack.pop() {
            if h.is_const() || !seen.insert(h) {
                continue;
            }
            let n = self.node(h);
            stack.push(n.hi);
            stack.push(n.lo);
        }
        seen.len()
    }

    /// Variables `f` depends on.
    pub fn support(&self, f: BddHandle) -> Vec<Var> {
        let mut seen = std::collections::HashSet::new();
        let mut levels = std::collections::BTreeSet::new();
        let mut stack = vec![f];
        while let Some(h) = stack.pop() {
            if h.is_const() || !seen.insert(h) {
                continue;
            }
            let n = self.node(h);
            levels.insert(n.level);
            stack.push(n.hi);
            stack.push(n.lo);
        }
        let mut vars: Vec<Var> = levels.into_iter().map(|l| self.order.var_at(l)).collect();
        vars.sort_unstable();
        vars
    }

    /// Some model along a path to `TRUE`, or `None` for `FALSE`.
    pub fn any_model(&self, f: BddHandle) -> Option<Assignment> {
        if f == BddHandle::FALSE {
            return None;
        }
        let mut model = Assignment::new();
        let mut h = f;
        while !h.is_const() {
            let n = self.node(h);
            let value = n.hi != BddHandle::FALSE;
            model.insert(self.order.var_at(n.level), value);
            h = if value { n.hi } else { n.lo };
        }
        Some(model)
    }

    /// Evaluates `f`; unassigned variables read as false.
    pub fn eval(&self, f: BddHandle, assignment: &Assignment) -> bool {
        let mut h = f;
        while !h.is_const() {
            let n = self.node(h);
            let v = self.order.var_at(n.level);
            h = if assignment.get(&v).copied().unwrap_or(false) {
                n.hi
            } else {
                n.lo
            };
        }
        h == BddHandle::TRUE
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mgr(n: u32) -> BddManager {
        BddManager::new(LiteralOrder::ascending(n))
    }

    fn clause(l: &[i64]) -> Clause {
        Clause::from_dimacs(l).unwrap()
    }

    #[test]
    fn and_identities() {
        let m = mgr(2);
        let v1 = m.literal(1, true).unwrap();
        let n1 = m.literal(1, false).unwrap();
        assert_eq!(m.and(BddHandle::TRUE, v1).unwrap(), v1);
        assert_eq!(m.and(v1, BddHandle::FALSE).unwrap(), BddHandle::FALSE);
        assert_eq!(m.and(v1, n1).unwrap(), BddHandle::FALSE);
    }

    #[test]
    fn clause_bdds() {
        let m = mgr(2);
        assert_eq!(m.clause(&Clause::empty()).unwrap(), BddHandle::FALSE);
        let c = m.clause(&clause(&[1])).unwrap();
        assert_eq!(
            *m.node(c),
            BddNode {
                level: 0,
                hi: BddHandle::TRUE,
                lo: BddHandle::FALSE
            }
        );
        assert_eq!(m.satcount(m.clause(&clause(&[1, -2])).unwrap(), 2).unwrap(), 3);
        assert_eq!(m.satcount(m.clause(&clause(&[1, 2])).unwrap(), 2).unwrap(), 3);
    }

    #[test]
    fn satcount_constants_and_padding() {
        let m = mgr(2);
        assert_eq!(m.satcount(BddHandle::TRUE, 3).unwrap(), 8);
        assert_eq!(m.satcount(BddHandle::FALSE, 5).unwrap(), 0);
        let v1 = m.literal(1, true).unwrap();
        assert_eq!(m.satcount(v1, 1).unwrap(), 1);
        assert_eq!(m.satcount(v1, 4).unwrap(), 8);
        let v2 = m.literal(2, true).unwrap();
        assert!(m.satcount(v2, 1).is_err());
        assert!(matches!(
            m.satcount(BddHandle::TRUE, 200),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn models() {
        let m = mgr(2);
        assert_eq!(m.any_model(BddHandle::FALSE), None);
        assert_eq!(m.any_model(BddHandle::TRUE), Some(Assignment::new()));
        let c = m.clause(&clause(&[1])).unwrap();
        assert_eq!(m.any_model(c), Some(Assignment::from([(1, true)])));
        let f = m.clause(&clause(&[-1, -2])).unwrap();
        let model = m.any_model(f).unwrap();
        assert!(m.eval(f, &model));
    }

    #[test]
    fn zdd_conversion() {
        let order = LiteralOrder::ascending(2);
        let s = ZddStore::new(order.clone());
        let m = BddManager::new(order);
        assert_eq!(m.zdd_to_bdd(&s, ZddHandle::ZERO).unwrap(), BddHandle::TRUE);
        let z = s
            .build_from_clauses(&[clause(&[1]), clause(&[-1])])
            .unwrap();
        assert_eq!(m.zdd_to_bdd(&s, z).unwrap(), BddHandle::FALSE);
        let z = s.build_from_clauses(&[clause(&[1, 2])]).unwrap();
        let f = m.zdd_to_bdd(&s, z).unwrap();
        assert_eq!(m.satcount(f, 2).unwrap(), 3);
        assert_eq!(f, m.clause(&clause(&[1, 2])).unwrap());
    }

    #[test]
    fn direct_conjunction() {
        let m = mgr(1);
        let unsat = CnfInstance::new(1, vec![clause(&[1]), clause(&[-1])]).unwrap();
        assert_eq!(m.conjoin_direct(&unsat).unwrap(), BddHandle::FALSE);
        let empty = CnfInstance::new(1, vec![]).unwrap();
        assert_eq!(m.conjoin_direct(&empty).unwrap(), BddHandle::TRUE);
        assert_eq!(m.conjoin_balanced(&unsat).unwrap(), BddHandle::FALSE);
    }
}
