//! A compact conflict-driven clause-learning SAT solver.
//!
//! The solver supports solving under assumptions (with failed-assumption
//! cores), projected model enumeration through blocking clauses, a
//! sequential-counter at-most-k encoding and DIMACS input/output.

mod card;
mod check;
mod dimacs;
mod enumerate;
mod heap;
mod lit;
mod solver;

pub use card::at_most_k;
pub use check::{check_model, first_falsified};
pub use dimacs::{parse_dimacs, write_dimacs, DimacsError};
pub use enumerate::{enumerate_models, Enumeration};
pub use lit::{Lit, Var};
pub use solver::{solve, Budget, Model, SatResult, Solver, SolverConfig, SolverStats, UnknownReason};

/// A plain clause set over variables `0..num_vars`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: u32,
    pub clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn new(num_vars: u32) -> Self {
        Cnf { num_vars, clauses: Vec::new() }
    }

    pub fn new_var(&mut self) -> Var {
        let v = Var(self.num_vars);
        self.num_vars += 1;
        v
    }

    pub fn add_clause(&mut self, clause: impl Into<Vec<Lit>>) {
        let clause = clause.into();
        for l in &clause {
            if l.var().0 >= self.num_vars {
                self.num_vars = l.var().0 + 1;
            }
        }
        self.clauses.push(clause);
    }
}
