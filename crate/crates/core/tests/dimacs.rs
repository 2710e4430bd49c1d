use ddsat::dimacs::{parse, write};
use ddsat::{Clause, CnfInstance};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = CnfInstance> {
    (1u32..12).prop_flat_map(|nvars| {
        let lit = (1..=nvars as i64, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
        let clause = prop::collection::vec(lit, 0..6);
        prop::collection::vec(clause, 0..20).prop_map(move |cs| {
            let clauses = cs
                .into_iter()
                .filter_map(|c| Clause::from_dimacs(&c).ok())
                .collect();
            CnfInstance::new(nvars, clauses).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn write_then_parse_is_identity(cnf in instance()) {
        let parsed = parse(&write(&cnf)).unwrap();
        prop_assert_eq!(parsed.tautologies, 0);
        prop_assert_eq!(parsed.instance, cnf);
    }
}

#[test]
fn pigeonhole_sizes_follow_closed_form() {
    for n in 1..=12u32 {
        let cnf = ddsat::gen_pigeonhole(n).unwrap();
        assert_eq!(cnf.nvars, n * (n + 1));
        assert_eq!(cnf.clauses.len() as u32, (n + 1) + n * (n + 1) * n / 2);
    }
}
