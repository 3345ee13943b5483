//! Model checking kept apart from the search code so that every reported
//! model is validated by a route that shares nothing with propagation.

use crate::lit::Lit;

/// Index of the first clause not satisfied by `model`, if any.
pub fn first_falsified(clauses: &[Vec<Lit>], model: &[bool]) -> Option<usize> {
    clauses.iter().position(|clause| {
        !clause.iter().any(|l| {
            let value = model.get(l.var().index()).copied().unwrap_or(false);
            value == l.is_positive()
        })
    })
}

pub fn check_model(clauses: &[Vec<Lit>], model: &[bool]) -> bool {
    first_falsified(clauses, model).is_none()
}
