use lff_sat::{enumerate_models, parse_dimacs, solve, write_dimacs, Budget, Cnf, Lit, SatResult, Var};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn truth_table_count(cnf: &Cnf) -> usize {
    let n = cnf.num_vars;
    (0u32..(1 << n))
        .filter(|mask| cnf.clauses.iter().all(|c| c.iter().any(|l| (mask >> l.var().0 & 1 == 1) == l.is_positive())))
        .count()
}

fn random_cnf(rng: &mut ChaCha8Rng, max_vars: u32, max_clauses: usize) -> Cnf {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(0..=max_clauses);
    let mut cnf = Cnf::new(n);
    for _ in 0..m {
        let width = rng.gen_range(1..=3);
        let clause: Vec<Lit> = (0..width).map(|_| Lit::new(Var(rng.gen_range(0..n)), rng.gen())).collect();
        cnf.add_clause(clause);
    }
    cnf
}

#[test]
fn random_cnfs_match_truth_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        let cnf = random_cnf(&mut rng, 10, 45);
        let expected = truth_table_count(&cnf);
        let all: Vec<Var> = (0..cnf.num_vars).map(Var).collect();
        let e = enumerate_models(&cnf, &all, 1 << 16, &Budget::unlimited());
        assert!(e.exhausted);
        assert_eq!(e.models.len(), expected);
        assert_eq!(solve(&cnf, &[], &Budget::unlimited()).is_sat(), expected > 0);
    }
}

#[test]
fn unsat_cores_are_unsat() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 100 {
        let cnf = random_cnf(&mut rng, 8, 20);
        let mut assumptions = Vec::new();
        for v in 0..cnf.num_vars {
            if rng.gen_bool(0.6) {
                assumptions.push(Lit::new(Var(v), rng.gen()));
            }
        }
        if let SatResult::Unsat { failed } = solve(&cnf, &assumptions, &Budget::unlimited()) {
            assert!(failed.iter().all(|l| assumptions.contains(l)));
            assert!(solve(&cnf, &failed, &Budget::unlimited()).is_unsat());
            checked += 1;
        }
    }
}

proptest! {
    #[test]
    fn dimacs_round_trip(clauses in prop::collection::vec(prop::collection::vec((0u32..6, any::<bool>()), 0..4), 0..10)) {
        let mut cnf = Cnf::new(6);
        for c in clauses {
            cnf.add_clause(c.into_iter().map(|(v, p)| Lit::new(Var(v), p)).collect::<Vec<_>>());
        }
        let text = write_dimacs(&cnf, |_| None);
        prop_assert_eq!(parse_dimacs(&text).unwrap(), cnf);
    }
}
