//! Hash-consed ZDD node store.
//!
//! Nodes are labelled by literal rank (see [`LiteralOrder`]) and live in an
//! append-only arena. The unique table guarantees one node per
//! `(label, then, else)` triple and [`ZddStore::make_node`] applies the
//! zero-suppression rule, so equal clause sets always share a handle.
//!
//! Both tables are sharded concurrent maps: operators may recurse on several
//! worker threads against the same store.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use dashmap::DashMap;
use rustc_hash::FxBuildHasher;

use crate::arena::Arena;
use crate::error::{Budget, Error, Result};
use crate::literal::{Literal, LiteralOrder, Var};
use crate::par::Parallelism;

/// Reference to a node of a [`ZddStore`]. `ZERO` is the empty clause set,
/// `ONE` the set holding only the empty clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZddHandle(u32);

impl ZddHandle {
    pub const ZERO: ZddHandle = ZddHandle(0);
    pub const ONE: ZddHandle = ZddHandle(1);

    pub fn is_sink(self) -> bool {
        self.0 < 2
    }

    pub fn id(self) -> u32 {
        self.0
    }

    fn index(self) -> usize {
        self.0 as usize - 2
    }
}

/// Rank reported for sinks; above every literal rank.
pub const SINK_RANK: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ZddNode {
    pub label: u32,
    pub then_child: ZddHandle,
    pub else_child: ZddHandle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Op {
    Union,
    SubDiff,
    SubsumptionFree,
    UnionS,
    Distribute,
    PosPart,
    NegPart,
    Rest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct CacheKey {
    op: Op,
    a: u32,
    b: u32,
}

/// Resource limits checked while operators run.
#[derive(Clone, Copy, Debug, Default)]
pub struct Limits {
    pub max_nodes: Option<usize>,
    pub deadline: Option<Instant>,
}

const CLOCK_INTERVAL: u64 = 1 << 12;

pub struct ZddStore {
    order: LiteralOrder,
    nodes: Arena<ZddNode>,
    unique: DashMap<ZddNode, u32, FxBuildHasher>,
    cache: DashMap<CacheKey, u32, FxBuildHasher>,
    cache_enabled: bool,
    cache_capacity: usize,
    par: Parallelism,
    limits: Limits,
    ticks: AtomicU64,
    timed_out: AtomicBool,
}

impl ZddStore {
    /// Entries above which [`ZddStore::trim_cache`] drops the memo table.
    pub const DEFAULT_CACHE_CAPACITY: usize = 1 << 23;

    pub fn new(order: LiteralOrder) -> Self {
        ZddStore {
            order,
            nodes: Arena::new(),
            unique: DashMap::with_hasher(FxBuildHasher),
            cache: DashMap::with_hasher(FxBuildHasher),
            cache_enabled: true,
            cache_capacity: Self::DEFAULT_CACHE_CAPACITY,
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

    /// Turns the operation cache off (results are unchanged, only slower).
    pub fn without_cache(mut self) -> Self {
        self.cache_enabled = false;
        self
    }

    pub fn set_cache_enabled(&mut self, enabled: bool) {
        self.cache_enabled = enabled;
    }

    pub fn set_parallelism(&mut self, par: Parallelism) {
        self.par = par;
    }

    pub fn with_cache_capacity(mut self, capacity: usize) -> Self {
        self.cache_capacity = capacity;
        self
    }

    pub fn order(&self) -> &LiteralOrder {
        &self.order
    }

    pub fn parallelism(&self) -> Parallelism {
        self.par
    }

    /// Number of internal nodes ever created.
    pub fn allocated(&self) -> usize {
        self.nodes.len()
    }

    pub fn cache_len(&self) -> usize {
        self.cache.len()
    }

    /// Drops memoized results once the cache outgrows its capacity.
    pub fn trim_cache(&self) {
        if self.cache.len() > self.cache_capacity {
            self.cache.clear();
        }
    }

    pub fn clear_cache(&self) {
        self.cache.clear();
    }

    #[inline]
    pub fn node(&self, h: ZddHandle) -> &ZddNode {
        self.nodes.get(h.index())
    }

    /// Label rank of `h`, or [`SINK_RANK`] for sinks.
    #[inline]
    pub fn rank(&self, h: ZddHandle) -> u32 {
        if h.is_sink() {
            SINK_RANK
        } else {
            self.node(h).label
        }
    }

    /// Variable position of the top node of `h`.
    #[inline]
    pub(crate) fn top_position(&self, h: ZddHandle) -> u32 {
        self.rank(h) / 2
    }

    pub fn label(&self, h: ZddHandle) -> Option<Literal> {
        (!h.is_sink()).then(|| self.order.literal(self.node(h).label))
    }

    /// Returns the reduced node `(label, then, else)`: `else_child` when
    /// `then_child` is `ZERO`, else the unique node for the triple.
    ///
    /// Panics if `label` does not precede the labels of both children.
    pub fn make_node(
        &self,
        label: u32,
        then_child: ZddHandle,
        else_child: ZddHandle,
    ) -> Result<ZddHandle> {
        assert!(
            label < self.rank(then_child) && label < self.rank(else_child),
            "ZDD order violation: label {label} above a child"
        );
        assert!(label < 2 * self.order.nvars(), "label {label} outside the order");
        if then_child == ZddHandle::ZERO {
            return Ok(else_child);
        }
        let key = ZddNode {
            label,
            then_child,
            else_child,
        };
        if let Some(id) = self.unique.get(&key) {
            return Ok(ZddHandle(*id));
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
        Ok(ZddHandle(id))
    }

    pub fn make_literal_node(
        &self,
        lit: Literal,
        then_child: ZddHandle,
        else_child: ZddHandle,
    ) -> Result<ZddHandle> {
        self.check_var(lit.var())?;
        self.make_node(self.order.rank(lit), then_child, else_child)
    }

    /// `△(v, n1, △(¬v, n2, n3))` with all reductions applied; `position` is
    /// the order position of `v`.
    pub(crate) fn combine(
        &self,
        position: u32,
        n1: ZddHandle,
        n2: ZddHandle,
        n3: ZddHandle,
    ) -> Result<ZddHandle> {
        let low = self.make_node(2 * position + 1, n2, n3)?;
        self.make_node(2 * position, n1, low)
    }

    /// Combined node for variable `v`: then-successor `n1` (clauses with `v`),
    /// else-successor `n2` (clauses with `¬v`), don't-care successor `n3`.
    pub fn make_combined(
        &self,
        v: Var,
        n1: ZddHandle,
        n2: ZddHandle,
        n3: ZddHandle,
    ) -> Result<ZddHandle> {
        self.check_var(v)?;
        self.combine(self.order.position(v), n1, n2, n3)
    }

    /// Splits `h` into the successors of the combined node for the variable
    /// at `position`; `(ZERO, ZERO, h)` when `h` does not test it at the top.
    #[inline]
    pub(crate) fn cofactors(&self, h: ZddHandle, position: u32) -> (ZddHandle, ZddHandle, ZddHandle) {
        let rank = self.rank(h);
        if rank == 2 * position {
            let n = self.node(h);
            if self.rank(n.else_child) == 2 * position + 1 {
                let e = self.node(n.else_child);
                (n.then_child, e.then_child, e.else_child)
            } else {
                (n.then_child, ZddHandle::ZERO, n.else_child)
            }
        } else if rank == 2 * position + 1 {
            let n = self.node(h);
            (ZddHandle::ZERO, n.then_child, n.else_child)
        } else {
            (ZddHandle::ZERO, ZddHandle::ZERO, h)
        }
    }

    pub(crate) fn check_var(&self, v: Var) -> Result<()> {
        if self.order.contains(v) {
            Ok(())
        } else {
            Err(Error::VarOutOfRange {
                var: v,
                nvars: self.order.nvars(),
            })
        }
    }

    #[inline]
    pub(crate) fn fork(&self, depth: u32) -> bool {
        self.par.forks_at(depth)
    }

    /// Budget check, called once per operator recursion step.
    #[inline]
    pub(crate) fn tick(&self) -> Result<()> {
        let Some(deadline) = self.limits.deadline else {
            return Ok(());
        };
        if self.timed_out.load(Ordering::Relaxed) {
            return Err(Error::BudgetExceeded(Budget::Time));
        }
        if self.ticks.fetch_add(1, Ordering::Relaxed).is_multiple_of(CLOCK_INTERVAL)
            && Instant::now() >= deadline
        {
            self.timed_out.store(true, Ordering::Relaxed);
            return Err(Error::BudgetExceeded(Budget::Time));
        }
        Ok(())
    }

    /// Fails if the deadline has passed, without waiting for the tick interval.
    pub fn check_deadline(&self) -> Result<()> {
        match self.limits.deadline {
            Some(d) if self.timed_out.load(Ordering::Relaxed) || Instant::now() >= d => {
                self.timed_out.store(true, Ordering::Relaxed);
                Err(Error::BudgetExceeded(Budget::Time))
            }
            _ => Ok(()),
        }
    }

    #[inline]
    pub(crate) fn cached(&self, op: Op, a: ZddHandle, b: u32) -> Option<ZddHandle> {
        if !self.cache_enabled {
            return None;
        }
        self.cache
            .get(&CacheKey { op, a: a.0, b })
            .map(|r| ZddHandle(*r))
    }

    #[inline]
    pub(crate) fn remember(&self, op: Op, a: ZddHandle, b: u32, result: ZddHandle) {
        if self.cache_enabled {
            self.cache.insert(CacheKey { op, a: a.0, b }, result.0);
        }
    }

    /// Internal nodes reachable from `root`, sinks excluded.
    pub fn node_count(&self, root: ZddHandle) -> usize {
        self.reachable(&[root]).len()
    }

    /// Internal nodes reachable from any of `roots`, in discovery order.
    pub fn reachable(&self, roots: &[ZddHandle]) -> Vec<ZddHandle> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut stack: Vec<ZddHandle> = roots.iter().rev().copied().collect();
        while let Some(h) = stack.pop() {
            if h.is_sink() || !seen.insert(h) {
                continue;
            }
            out.push(h);
            let n = self.node(h);
            stack.push(n.else_child);
            stack.push(n.then_child);
        }
        out
    }

    /// Text dump of the DAG below `root`: one line `id label then_id else_id`
    /// per node in ascending id order, labels as DIMACS literals, sinks `0`/`1`.
    pub fn dump(&self, root: ZddHandle) -> String {
        let mut ids = self.reachable(&[root]);
        ids.sort_unstable();
        let mut out = String::new();
        for h in ids {
            let n = self.node(h);
            let _ = writeln!(
                out,
                "{} {} {} {}",
                h.0,
                self.order.literal(n.label),
                n.then_child.0,
                n.else_child.0
            );
        }
        out
    }

    /// Every node created so far, for whole-arena invariant scans.
    pub fn all_nodes(&self) -> impl Iterator<Item = (ZddHandle, ZddNode)> + '_ {
        (0..self.nodes.len()).map(|i| (ZddHandle(i as u32 + 2), *self.nodes.get(i)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store(n: u32) -> ZddStore {
        ZddStore::new(LiteralOrder::ascending(n))
    }

    #[test]
    fn zero_suppression() {
        let s = store(2);
        assert_eq!(s.make_node(0, ZddHandle::ZERO, ZddHandle::ONE).unwrap(), ZddHandle::ONE);
    }

    #[test]
    fn hash_consing() {
        let s = store(2);
        let a = s.make_node(0, ZddHandle::ONE, ZddHandle::ZERO).unwrap();
        let b = s.make_node(0, ZddHandle::ONE, ZddHandle::ZERO).unwrap();
        assert_eq!(a, b);
        assert_eq!(s.allocated(), 1);
        assert_eq!(s.dump(a), format!("{} 1 1 0\n", a.id()));
    }

    #[test]
    #[should_panic(expected = "order violation")]
    fn order_violation_panics() {
        let s = store(2);
        let low = s.make_node(2, ZddHandle::ONE, ZddHandle::ZERO).unwrap();
        let _ = s.make_node(3, low, ZddHandle::ZERO);
    }

    #[test]
    fn combined_special_cases() {
        let s = store(3);
        let (z, o) = (ZddHandle::ZERO, ZddHandle::ONE);
        let n3 = s.make_literal_node(Literal::pos(3), o, z).unwrap();
        assert_eq!(s.make_combined(1, z, z, n3).unwrap(), n3);

        let pos = s.make_combined(1, o, z, z).unwrap();
        assert_eq!(s.label(pos), Some(Literal::pos(1)));
        assert_eq!(s.node(pos).else_child, z);

        let neg = s.make_combined(1, z, o, z).unwrap();
        assert_eq!(s.label(neg), Some(Literal::neg(1)));
        assert_eq!(s.cofactors(neg, 0), (z, o, z));

        let full = s.make_combined(2, o, o, n3).unwrap();
        assert_eq!(s.cofactors(full, 1), (o, o, n3));
        assert_eq!(s.cofactors(full, 0), (z, z, full));
        assert_eq!(s.node_count(full), 3);
    }

    #[test]
    fn node_budget() {
        let s = store(3).with_limits(Limits {
            max_nodes: Some(1),
            deadline: None,
        });
        s.make_node(0, ZddHandle::ONE, ZddHandle::ZERO).unwrap();
        assert!(matches!(
            s.make_node(2, ZddHandle::ONE, ZddHandle::ZERO),
            Err(Error::BudgetExceeded(Budget::Nodes))
        ));
    }

    #[test]
    fn concurrent_make_node_agrees() {
        let s = store(8);
        let handles: Vec<Vec<ZddHandle>> = std::thread::scope(|scope| {
            let workers: Vec<_> = (0..4)
                .map(|_| {
                    scope.spawn(|| {
                        (0..16u32)
                            .map(|l| s.make_node(l, ZddHandle::ONE, ZddHandle::ONE).unwrap())
                            .collect()
                    })
                })
                .collect();
            workers.into_iter().map(|w| w.join().unwrap()).collect()
        });
        assert!(handles.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(s.allocated(), 16);
    }
}
