#![allow(dead_code)]

use std::collections::BTreeSet;

use ddsat::oracle::{self, ExplicitClauseSet, RefClause};
use ddsat::{Clause, CnfInstance, LiteralOrder, ZddHandle, ZddStore};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random non-tautological clause over `1..=nvars` with `len` literals.
pub fn random_clause(rng: &mut impl Rng, nvars: u32, len: usize) -> RefClause {
    let mut vars: Vec<i64> = (1..=nvars as i64).collect();
    vars.shuffle(rng);
    vars.into_iter()
        .take(len)
        .map(|v| if rng.random_bool(0.5) { v } else { -v })
        .collect()
}

/// Up to `max_clauses` clauses of length 0..=max_len (empty clauses rare).
pub fn random_set(rng: &mut impl Rng, nvars: u32, max_clauses: usize, max_len: usize) -> ExplicitClauseSet {
    let n = rng.random_range(0..=max_clauses);
    (0..n)
        .map(|_| {
            let len = if rng.random_bool(0.03) {
                0
            } else {
                rng.random_range(1..=max_len.min(nvars as usize))
            };
            random_clause(rng, nvars, len)
        })
        .collect()
}

/// Random CNF with clauses of exactly `k` literals (k capped at nvars).
pub fn random_kcnf(rng: &mut impl Rng, nvars: u32, max_clauses: usize, k: usize) -> CnfInstance {
    let n = rng.random_range(1..=max_clauses);
    let clauses: Vec<Vec<i64>> = (0..n)
        .map(|_| random_clause(rng, nvars, k.min(nvars as usize)).into_iter().collect())
        .collect();
    let clauses = clauses
        .iter()
        .map(|c| Clause::from_dimacs(c).unwrap())
        .collect();
    CnfInstance::new(nvars, clauses).unwrap()
}

pub fn to_clauses(s: &ExplicitClauseSet) -> Vec<Clause> {
    s.iter()
        .map(|c| Clause::from_dimacs(&c.iter().copied().collect::<Vec<_>>()).unwrap())
        .collect()
}

pub fn to_ref(clauses: &[Clause]) -> ExplicitClauseSet {
    clauses
        .iter()
        .map(|c| c.to_dimacs().into_iter().collect())
        .collect()
}

pub fn cnf_ref(cnf: &CnfInstance) -> ExplicitClauseSet {
    to_ref(&cnf.clauses)
}

pub fn build(store: &ZddStore, s: &ExplicitClauseSet) -> ZddHandle {
    store.build_from_clauses(&to_clauses(s)).unwrap()
}

pub fn read(store: &ZddStore, h: ZddHandle) -> ExplicitClauseSet {
    to_ref(&store.enumerate(h))
}

pub fn store(nvars: u32) -> ZddStore {
    ZddStore::new(LiteralOrder::ascending(nvars))
}

pub fn model_set(nvars: u32, s: &ExplicitClauseSet) -> BTreeSet<u32> {
    oracle::models(nvars, s).unwrap().into_iter().collect()
}

fn has_tautology(s: &ExplicitClauseSet) -> bool {
    s.iter().any(oracle::is_tautology)
}

/// Every operator on one random pair against the explicit-set oracle.
/// Returns the list of violated properties.
pub fn check_operator_pair(seed: u64, nvars: u32, max_clauses: usize) -> Vec<String> {
    let mut r = rng(seed);
    let a = random_set(&mut r, nvars, max_clauses, 4);
    let b = random_set(&mut r, nvars, max_clauses, 4);
    let v = r.random_range(1..=nvars) as i64;
    let s = store(nvars);
    let (za, zb) = (build(&s, &a), build(&s, &b));
    let mut fails = Vec::new();
    let mut expect = |name: &str, got: &ExplicitClauseSet, want: &ExplicitClauseSet| {
        if got != want {
            fails.push(format!("seed {seed}: {name}: got {got:?}, want {want:?} (a={a:?}, b={b:?})"));
        }
    };

    if read(&s, za) != a {
        expect("build", &read(&s, za), &a);
    }
    expect("subdiff", &read(&s, s.subdiff(za, zb).unwrap()), &oracle::ref_subdiff(&a, &b));
    let sf_a = s.subsumption_free(za).unwrap();
    expect("sf", &read(&s, sf_a), &oracle::ref_minimal(&a));

    let e = s.extract(za, v as u32).unwrap();
    let (p, m, rest) = oracle::ref_extract(&a, v);
    expect("extract.plus", &read(&s, e.plus), &p);
    expect("extract.minus", &read(&s, e.minus), &m);
    expect("extract.rest", &read(&s, e.rest), &rest);

    let (ma, mb) = (oracle::ref_minimal(&a), oracle::ref_minimal(&b));
    let (zma, zmb) = (build(&s, &ma), build(&s, &mb));
    let all: ExplicitClauseSet = ma.union(&mb).cloned().collect();
    let us = read(&s, s.union_subsuming(zma, zmb).unwrap());
    expect("union_s", &us, &oracle::ref_minimal(&all));
    let dist = s.distribute(zma, zmb).unwrap();
    let d = read(&s, dist);
    expect("distribute", &d, &oracle::ref_distribute(&ma, &mb));

    // plain union: subset of the inputs, absorbs them, conjunction of models
    let u = read(&s, s.union(za, zb).unwrap());
    let ab: ExplicitClauseSet = a.union(&b).cloned().collect();
    if !u.is_subset(&ab) {
        fails.push(format!("seed {seed}: union adds clauses {u:?}"));
    }
    if !ab.iter().all(|c| u.iter().any(|d| d.is_subset(c))) {
        fails.push(format!("seed {seed}: union loses a clause {u:?}"));
    }
    let (mods_a, mods_b) = (model_set(nvars, &a), model_set(nvars, &b));
    if model_set(nvars, &u) != &mods_a & &mods_b {
        fails.push(format!("seed {seed}: union models"));
    }
    // distribution on raw (not minimised) inputs is still the disjunction
    let draw = read(&s, s.distribute(za, zb).unwrap());
    if model_set(nvars, &draw) != &mods_a | &mods_b {
        fails.push(format!("seed {seed}: distribute models"));
    }
    for (name, set) in [("union", &u), ("union_s", &us), ("distribute", &d), ("distribute-raw", &draw)] {
        if has_tautology(set) {
            fails.push(format!("seed {seed}: {name} produced a tautology"));
        }
    }

    if s.subsumption_free(sf_a).unwrap() != sf_a {
        fails.push(format!("seed {seed}: SF not idempotent"));
    }
    if s.union(za, ZddHandle::ZERO).unwrap() != za || s.distribute(za, ZddHandle::ONE).unwrap() != za {
        fails.push(format!("seed {seed}: neutral element"));
    }
    fails
}
