mod common;

use common::*;
use ddsat::oracle;
use ddsat::{gen_pigeonhole, BddHandle, BddManager, CnfInstance, LiteralOrder, ZddStore};
use rand::seq::SliceRandom;

fn managers(nvars: u32) -> (ZddStore, BddManager) {
    let order = LiteralOrder::ascending(nvars);
    (ZddStore::new(order.clone()), BddManager::new(order))
}

#[test]
fn pipelines_agree_and_count_models() {
    let mut r = rng(21);
    for _ in 0..500 {
        let cnf = random_kcnf(&mut r, 8, 12, 3);
        let (s, m) = managers(cnf.nvars);
        let direct = m.conjoin_direct(&cnf).unwrap();
        let root = s.build_from_clauses(&cnf.clauses).unwrap();
        assert_eq!(m.zdd_to_bdd(&s, root).unwrap(), direct);
        assert_eq!(m.conjoin_balanced(&cnf).unwrap(), direct);
        let (_, count) = oracle::tt_sat(cnf.nvars, &cnf_ref(&cnf)).unwrap();
        assert_eq!(m.satcount(direct, cnf.nvars).unwrap(), count as u128);
        if let Some(model) = m.any_model(direct) {
            assert!(m.eval(direct, &model));
        } else {
            assert_eq!(count, 0);
        }
    }
}

#[test]
fn adding_a_clause_never_adds_models() {
    let mut r = rng(22);
    for _ in 0..200 {
        let mut cnf = random_kcnf(&mut r, 6, 8, 2);
        let (_, m) = managers(cnf.nvars);
        let before = m.satcount(m.conjoin_direct(&cnf).unwrap(), 6).unwrap();
        let extra = random_kcnf(&mut r, 6, 1, 3).clauses;
        cnf.clauses.extend(extra);
        let after = m.satcount(m.conjoin_direct(&cnf).unwrap(), 6).unwrap();
        assert!(after <= before);
    }
}

#[test]
fn clause_order_does_not_matter() {
    let mut r = rng(23);
    for _ in 0..50 {
        let mut cnf = random_kcnf(&mut r, 7, 10, 3);
        let (_, m) = managers(cnf.nvars);
        let f = m.conjoin_direct(&cnf).unwrap();
        for _ in 0..5 {
            cnf.clauses.shuffle(&mut r);
            assert_eq!(m.conjoin_direct(&cnf).unwrap(), f);
        }
    }
}

#[test]
fn pigeonhole_has_no_models() {
    for n in 1..=5 {
        let cnf = gen_pigeonhole(n).unwrap();
        let (s, m) = managers(cnf.nvars);
        let root = s.build_from_clauses(&cnf.clauses).unwrap();
        assert_eq!(m.zdd_to_bdd(&s, root).unwrap(), BddHandle::FALSE);
        assert_eq!(m.conjoin_direct(&cnf).unwrap(), BddHandle::FALSE);
    }
    // truth table for ph2 over its 6 variables
    let cnf = gen_pigeonhole(2).unwrap();
    assert_eq!(oracle::tt_sat(6, &cnf_ref(&cnf)).unwrap(), (false, 0));
}

#[test]
fn satcount_of_single_clause() {
    let cnf = CnfInstance::from_dimacs(&[vec![1, 2]]).unwrap();
    let (s, m) = managers(2);
    let root = s.build_from_clauses(&cnf.clauses).unwrap();
    let f = m.zdd_to_bdd(&s, root).unwrap();
    assert_eq!(m.satcount(f, 2).unwrap(), 3);
}
