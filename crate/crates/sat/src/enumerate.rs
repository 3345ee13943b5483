use crate::lit::{Lit, Var};
use crate::solver::{Budget, Model, SatResult, Solver, UnknownReason};
use crate::Cnf;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub models: Vec<Model>,
    /// True iff every model (projected) has been produced.
    pub exhausted: bool,
    /// Set when the budget ran out before the enumeration finished.
    pub unknown: Option<UnknownReason>,
    pub conflicts: u64,
}

/// Enumerates up to `limit` models that are pairwise distinct on
/// `projection`, blocking each one over the projection variables only.
pub fn enumerate_models(cnf: &Cnf, projection: &[Var], limit: usize, budget: &Budget) -> Enumeration {
    let mut solver = Solver::from_cnf(cnf);
    let mut models = Vec::new();
    let mut exhausted = false;
    let mut unknown = None;
    while models.len() < limit {
        match solver.solve_with(&[], budget) {
            SatResult::Sat(model) => {
                let block: Vec<Lit> = projection.iter().map(|&v| Lit::new(v, !model.value(v))).collect();
                models.push(model);
                solver.add_clause(&block);
            }
            SatResult::Unsat { .. } => {
                exhausted = true;
                break;
            }
            SatResult::Unknown(reason) => {
                unknown = Some(reason);
                break;
            }
        }
    }
    Enumeration { models, exhausted, unknown, conflicts: solver.stats().conflicts }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn or_clause_has_three_models() {
        let mut cnf = Cnf::new(2);
        cnf.add_clause(vec![Var(0).pos(), Var(1).pos()]);
        let e = enumerate_models(&cnf, &[Var(0), Var(1)], 10, &Budget::unlimited());
        assert_eq!(e.models.len(), 3);
        assert!(e.exhausted);
        assert!(e.unknown.is_none());
    }

    #[test]
    fn limit_reached_is_not_exhausted() {
        let cnf = Cnf::new(1);
        let e = enumerate_models(&cnf, &[Var(0)], 1, &Budget::unlimited());
        assert_eq!(e.models.len(), 1);
        assert!(!e.exhausted);
    }

    #[test]
    fn projection_collapses_hidden_variables() {
        // x0 free, x1 free; project on x0 only
        let cnf = Cnf::new(2);
        let e = enumerate_models(&cnf, &[Var(0)], 10, &Budget::unlimited());
        assert_eq!(e.models.len(), 2);
        assert!(e.exhausted);
    }

    #[test]
    fn empty_projection_yields_single_model() {
        let cnf = Cnf::new(3);
        let e = enumerate_models(&cnf, &[], 10, &Budget::unlimited());
        assert_eq!(e.models.len(), 1);
        assert!(e.exhausted);
    }
}
