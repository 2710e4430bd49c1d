//! Clause-set semantics on top of [`ZddStore`].
//!
//! A path from the root to the `ONE` sink spells one clause: the literals
//! whose then-edge it takes. Binary operators recurse on the combined node
//! `∇(v, n1, n2, n3)` of the smaller top variable, where `n1` holds the
//! clauses containing `v`, `n2` those containing `¬v` and `n3` the rest.
//! An operand whose top variable is larger is read as `∇(v, 0, 0, operand)`.
//!
//! | operator              | meaning on CNFs           | subsumption              |
//! |-----------------------|---------------------------|--------------------------|
//! | [`union`]             | conjunction               | absorbs at the `1` sink  |
//! | [`subdiff`]           | drop clauses subsumed by B | exact                   |
//! | [`subsumption_free`]  | identity                  | keeps minimal clauses    |
//! | [`union_subsuming`]   | conjunction               | removes cross-subsumption|
//! | [`distribute`]        | disjunction               | removes cross-subsumption|
//!
//! [`union`]: ZddStore::union
//! [`subdiff`]: ZddStore::subdiff
//! [`subsumption_free`]: ZddStore::subsumption_free
//! [`union_subsuming`]: ZddStore::union_subsuming
//! [`distribute`]: ZddStore::distribute

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::literal::{Clause, Var};
use crate::par::join;
use crate::store::{Op, ZddHandle, ZddStore};

const ZERO: ZddHandle = ZddHandle::ZERO;
const ONE: ZddHandle = ZddHandle::ONE;

/// The three parts of a clause set with respect to one variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Extracted {
    /// clauses that contained `+v`, with `+v` removed
    pub plus: ZddHandle,
    /// clauses that contained `¬v`, with `¬v` removed
    pub minus: ZddHandle,
    /// clauses not mentioning `v`
    pub rest: ZddHandle,
}

#[inline]
fn ordered(a: ZddHandle, b: ZddHandle) -> (ZddHandle, ZddHandle) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl ZddStore {
    #[inline]
    fn join3<F1, F2, F3>(&self, depth: u32, f1: F1, f2: F2, f3: F3) -> Result<[ZddHandle; 3]>
    where
        F1: FnOnce() -> Result<ZddHandle> + Send,
        F2: FnOnce() -> Result<ZddHandle> + Send,
        F3: FnOnce() -> Result<ZddHandle> + Send,
    {
        let fork = self.fork(depth);
        let (r1, (r2, r3)) = join(fork, f1, || join(fork, f2, f3));
        Ok([r1?, r2?, r3?])
    }

    /// Encodes `clauses` as-is: duplicates collapse, nothing is subsumed away.
    pub fn build_from_clauses(&self, clauses: &[Clause]) -> Result<ZddHandle> {
        let order = self.order();
        let mut ranked: Vec<Vec<u32>> = Vec::with_capacity(clauses.len());
        for c in clauses {
            let mut r = Vec::with_capacity(c.len());
            for &lit in c.literals() {
                self.check_var(lit.var())?;
                r.push(order.rank(lit));
            }
            r.sort_unstable();
            ranked.push(r);
        }
        ranked.sort_unstable();
        ranked.dedup();
        let slices: Vec<&[u32]> = ranked.iter().map(Vec::as_slice).collect();
        self.build_rec(&slices, 0)
    }

    /// `clauses` sorted lexicographically and duplicate-free.
    fn build_rec(&self, clauses: &[&[u32]], depth: u32) -> Result<ZddHandle> {
        let Some(first) = clauses.first() else {
            return Ok(ZERO);
        };
        let has_empty = first.is_empty();
        let rest = &clauses[usize::from(has_empty)..];
        let Some(head) = rest.first() else {
            return Ok(ONE);
        };
        let top = head[0];
        let split = rest.iter().position(|c| c[0] != top).unwrap_or(rest.len());
        let with_top: Vec<&[u32]> = rest[..split].iter().map(|c| &c[1..]).collect();
        let mut without: Vec<&[u32]> = Vec::with_capacity(rest.len() - split + 1);
        if has_empty {
            without.push(first);
        }
        without.extend_from_slice(&rest[split..]);
        let fork = self.fork(depth);
        let (t, e) = join(
            fork,
            || self.build_rec(&with_top, depth + 1),
            || self.build_rec(&without, depth + 1),
        );
        self.make_node(top, t?, e?)
    }

    /// All clauses, shortest first, ties broken by literal rank.
    pub fn enumerate(&self, root: ZddHandle) -> Vec<Clause> {
        let mut ranked = Vec::new();
        let mut prefix = Vec::new();
        self.collect_paths(root, &mut prefix, &mut ranked);
        ranked.sort_unstable_by(|a: &Vec<u32>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let order = self.order();
        ranked
            .into_iter()
            .map(|r| {
                Clause::new(r.into_iter().map(|x| order.literal(x)))
                    .expect("clause-set ZDD holds a tautological clause")
            })
            .collect()
    }

    fn collect_paths(&self, h: ZddHandle, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if h == ZERO {
            return;
        }
        if h == ONE {
            out.push(prefix.clone());
            return;
        }
        let n = *self.node(h);
        prefix.push(n.label);
        self.collect_paths(n.then_child, prefix, out);
        prefix.pop();
        self.collect_paths(n.else_child, prefix, out);
    }

    /// Number of clauses, by memoized path counting.
    pub fn clause_count(&self, root: ZddHandle) -> Result<u64> {
        fn go(s: &ZddStore, h: ZddHandle, memo: &mut HashMap<ZddHandle, u64>) -> Result<u64> {
            if h.is_sink() {
                return Ok(u64::from(h == ONE));
            }
            if let Some(&c) = memo.get(&h) {
                return Ok(c);
            }
            let n = *s.node(h);
            let c = go(s, n.then_child, memo)?
                .checked_add(go(s, n.else_child, memo)?)
                .ok_or(Error::Overflow("clause"))?;
            memo.insert(h, c);
            Ok(c)
        }
        go(self, root, &mut HashMap::new())
    }

    /// Total number of literal occurrences over all clauses.
    pub fn literal_count(&self, root: ZddHandle) -> Result<u64> {
        fn go(
            s: &ZddStore,
            h: ZddHandle,
            memo: &mut HashMap<ZddHandle, (u64, u64)>,
        ) -> Result<(u64, u64)> {
            if h.is_sink() {
                return Ok((u64::from(h == ONE), 0));
            }
            if let Some(&c) = memo.get(&h) {
                return Ok(c);
            }
            let n = *s.node(h);
            let (tc, tl) = go(s, n.then_child, memo)?;
            let (ec, el) = go(s, n.else_child, memo)?;
            let overflow = || Error::Overflow("literal");
            let count = tc.checked_add(ec).ok_or_else(overflow)?;
            let lits = tl
                .checked_add(tc)
                .and_then(|x| x.checked_add(el))
                .ok_or_else(overflow)?;
            memo.insert(h, (count, lits));
            Ok((count, lits))
        }
        Ok(go(self, root, &mut HashMap::new())?.1)
    }

    /// Whether the empty clause is a member: the all-else path ends in `ONE`.
    pub fn has_empty_clause(&self, root: ZddHandle) -> bool {
        let mut h = root;
        while !h.is_sink() {
            h = self.node(h).else_child;
        }
        h == ONE
    }

    /// Variables labelling some reachable node.
    pub fn support(&self, root: ZddHandle) -> BTreeSet<Var> {
        let order = self.order();
        self.reachable(&[root])
            .into_iter()
            .map(|h| order.var_at(self.node(h).label / 2))
            .collect()
    }

    /// Clause union `A ⊔ B`: the conjunction of both clause sets. A clause
    /// that extends a clause of the other operand is absorbed when the
    /// recursion meets the `1` sink.
    pub fn union(&self, a: ZddHandle, b: ZddHandle) -> Result<ZddHandle> {
        self.union_rec(a, b, 0)
    }

    fn union_rec(&self, a: ZddHandle, b: ZddHandle, depth: u32) -> Result<ZddHandle> {
        if a == ZERO || a == b {
            return Ok(b);
        }
        if b == ZERO {
            return Ok(a);
        }
        if a == ONE || b == ONE {
            return Ok(ONE);
        }
        let (a, b) = ordered(a, b);
        if let Some(r) = self.cached(Op::Union, a, b.id()) {
            return Ok(r);
        }
        self.tick()?;
        let p = self.top_position(a).min(self.top_position(b));
        let (n1, n2, n3) = self.cofactors(a, p);
        let (m1, m2, m3) = self.cofactors(b, p);
        let d = depth + 1;
        let [r1, r2, r3] = self.join3(
            depth,
            || self.union_rec(n1, m1, d),
            || self.union_rec(n2, m2, d),
            || self.union_rec(n3, m3, d),
        )?;
        let r = self.combine(p, r1, r2, r3)?;
        self.remember(Op::Union, a, b.id(), r);
        Ok(r)
    }

    /// `A ⊟ B`: the clauses of `A` that contain no clause of `B`.
    pub fn subdiff(&self, a: ZddHandle, b: ZddHandle) -> Result<ZddHandle> {
        self.subdiff_rec(a, b, 0)
    }

    fn subdiff_rec(&self, a: ZddHandle, b: ZddHandle, depth: u32) -> Result<ZddHandle> {
        if a == ZERO || a == b || b == ONE {
            return Ok(ZERO);
        }
        if b == ZERO {
            return Ok(a);
        }
        if a == ONE {
            // the empty clause is only subsumed by itself
            return Ok(if self.has_empty_clause(b) { ZERO } else { ONE });
        }
        if let Some(r) = self.cached(Op::SubDiff, a, b.id()) {
            return Ok(r);
        }
        self.tick()?;
        let pa = self.top_position(a);
        let pb = self.top_position(b);
        let d = depth + 1;
        let r = if pb < pa {
            // clauses of B that mention the variable cannot subsume any of A
            let (_, _, m3) = self.cofactors(b, pb);
            self.subdiff_rec(a, m3, d)?
        } else {
            let p = pa;
            let (n1, n2, n3) = self.cofactors(a, p);
            let (m1, m2, m3) = self.cofactors(b, p);
            let [r1, r2, r3] = self.join3(
                depth,
                || self.subdiff_rec(self.subdiff_rec(n1, m1, d)?, m3, d),
                || self.subdiff_rec(self.subdiff_rec(n2, m2, d)?, m3, d),
                || self.subdiff_rec(n3, m3, d),
            )?;
            self.combine(p, r1, r2, r3)?
        };
        self.remember(Op::SubDiff, a, b.id(), r);
        Ok(r)
    }

    /// `SF(A)`: keeps exactly the minimal clauses of `A`.
    pub fn subsumption_free(&self, a: ZddHandle) -> Result<ZddHandle> {
        self.sf_rec(a, 0)
    }

    fn sf_rec(&self, a: ZddHandle, depth: u32) -> Result<ZddHandle> {
        if a.is_sink() {
            return Ok(a);
        }
        if let Some(r) = self.cached(Op::SubsumptionFree, a, 0) {
            return Ok(r);
        }
        self.tick()?;
        let p = self.top_position(a);
        let (n1, n2, n3) = self.cofactors(a, p);
        let d = depth + 1;
        let [s1, s2, s3] = self.join3(
            depth,
            || self.sf_rec(n1, d),
            || self.sf_rec(n2, d),
            || self.sf_rec(n3, d),
        )?;
        let fork = self.fork(depth);
        let (r1, r2) = join(
            fork,
            || self.subdiff_rec(s1, s3, d),
            || self.subdiff_rec(s2, s3, d),
        );
        let r = self.combine(p, r1?, r2?, s3)?;
        self.remember(Op::SubsumptionFree, a, 0, r);
        Ok(r)
    }

    /// `A ⊔_S B`: conjunction that also removes clauses of one operand
    /// subsumed by clauses of the other. Minimal on subsumption-free inputs.
    pub fn union_subsuming(&self, a: ZddHandle, b: ZddHandle) -> Result<ZddHandle> {
        self.unions_rec(a, b, 0)
    }

    fn unions_rec(&self, a: ZddHandle, b: ZddHandle, depth: u32) -> Result<ZddHandle> {
        if a == ZERO {
            return Ok(b);
        }
        if b == ZERO {
            return Ok(a);
        }
        if a == ONE || b == ONE {
            return Ok(ONE);
        }
        let (a, b) = ordered(a, b);
        if let Some(r) = self.cached(Op::UnionS, a, b.id()) {
            return Ok(r);
        }
        self.tick()?;
        let p = self.top_position(a).min(self.top_position(b));
        let (n1, n2, n3) = self.cofactors(a, p);
        let (m1, m2, m3) = self.cofactors(b, p);
        let d = depth + 1;
        let [u1, u2, u3] = self.join3(
            depth,
            || self.unions_rec(n1, m1, d),
            || self.unions_rec(n2, m2, d),
            || self.unions_rec(n3, m3, d),
        )?;
        let fork = self.fork(depth);
        let (r1, r2) = join(
            fork,
            || self.subdiff_rec(u1, u3, d),
            || self.subdiff_rec(u2, u3, d),
        );
        let r = self.combine(p, r1?, r2?, u3)?;
        self.remember(Op::UnionS, a, b.id(), r);
        Ok(r)
    }

    /// `A ×_S B`: clause distribution, the disjunction of two CNFs. Every
    /// result clause is the union of a clause of `A` and one of `B`; pairs
    /// that would contain `v` and `¬v` are never formed.
    pub fn distribute(&self, a: ZddHandle, b: ZddHandle) -> Result<ZddHandle> {
        self.dist_rec(a, b, 0)
    }

    fn dist_rec(&self, a: ZddHandle, b: ZddHandle, depth: u32) -> Result<ZddHandle> {
        if a == ZERO || b == ZERO {
            return Ok(ZERO);
        }
        if a == ONE {
            return Ok(b);
        }
        if b == ONE {
            return Ok(a);
        }
        let (a, b) = ordered(a, b);
        if let Some(r) = self.cached(Op::Distribute, a, b.id()) {
            return Ok(r);
        }
        self.tick()?;
        let p = self.top_position(a).min(self.top_position(b));
        let (n1, n2, n3) = self.cofactors(a, p);
        let (m1, m2, m3) = self.cofactors(b, p);
        let d = depth + 1;
        let fork = self.fork(depth);
        // (n_i × m_i) ⊔_S (n_i × m3) ⊔_S (n3 × m_i)
        let branch = |ni: ZddHandle, mi: ZddHandle| -> Result<ZddHandle> {
            let [x, y, z] = self.join3(
                d,
                || self.dist_rec(ni, mi, d),
                || self.dist_rec(ni, m3, d),
                || self.dist_rec(n3, mi, d),
            )?;
            self.unions_rec(self.unions_rec(x, y, d)?, z, d)
        };
        let [b1, b2, r3] = self.join3(
            depth,
            || branch(n1, m1),
            || branch(n2, m2),
            || self.dist_rec(n3, m3, d),
        )?;
        let (r1, r2) = join(
            fork,
            || self.subdiff_rec(b1, r3, d),
            || self.subdiff_rec(b2, r3, d),
        );
        let r = self.combine(p, r1?, r2?, r3)?;
        self.remember(Op::Distribute, a, b.id(), r);
        Ok(r)
    }

    /// Splits `c` by occurrence of `v`.
    pub fn extract(&self, c: ZddHandle, v: Var) -> Result<Extracted> {
        self.check_var(v)?;
        let p = self.order().position(v);
        let fork = self.fork(0);
        let (plus, (minus, rest)) = join(
            fork,
            || self.part_rec(Op::PosPart, c, p, 1),
            || {
                join(
                    fork,
                    || self.part_rec(Op::NegPart, c, p, 1),
                    || self.part_rec(Op::Rest, c, p, 1),
                )
            },
        );
        Ok(Extracted {
            plus: plus?,
            minus: minus?,
            rest: rest?,
        })
    }

    fn part_rec(&self, op: Op, c: ZddHandle, p: u32, depth: u32) -> Result<ZddHandle> {
        let top = self.top_position(c);
        if top >= p {
            let (n1, n2, n3) = self.cofactors(c, p);
            return Ok(match op {
                Op::PosPart => n1,
                Op::NegPart => n2,
                _ => n3,
            });
        }
        if let Some(r) = self.cached(op, c, p) {
            return Ok(r);
        }
        self.tick()?;
        let n = *self.node(c);
        let (t, e) = join(
            self.fork(depth),
            || self.part_rec(op, n.then_child, p, depth + 1),
            || self.part_rec(op, n.else_child, p, depth + 1),
        );
        let r = self.make_node(n.label, t?, e?)?;
        self.remember(op, c, p, r);
        Ok(r)
    }
}
