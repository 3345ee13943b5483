//! Direct model checking over an [`Interpretation`], and brute-force model
//! enumeration. Nothing here goes through the grounder, so the two can be
//! checked against each other.

use std::collections::BTreeSet;
use std::fmt;

use crate::interp::{arg_tuples, DomainAssignment, Interpretation};
use crate::lang::{Formula, SortKind, Term};
use crate::symbols::{SortId, Symbols};
use crate::typecheck::TypedProblem;

/// Largest interpretation space [`brute_force_models`] will walk.
pub const SPACE_LIMIT: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum V {
    Elem(usize),
    Int(i64),
    Undef,
}

struct Eval<'a> {
    it: &'a Interpretation,
    symbols: &'a Symbols,
    env: Vec<(String, SortId, usize)>,
}

impl Eval<'_> {
    fn value_of(&self, s: SortId, e: usize) -> V {
        match self.symbols.sort(s).kind {
            SortKind::IntRange { lo, .. } => V::Int(lo + e as i64),
            _ => V::Elem(e),
        }
    }

    fn element_of(&self, s: SortId, v: V) -> Option<usize> {
        match (v, &self.symbols.sort(s).kind) {
            (V::Int(k), SortKind::IntRange { lo, .. }) => {
                let i = k.checked_sub(*lo)?;
                if i >= 0 && (i as u128) < self.it.domains.size(s) as u128 {
                    Some(i as usize)
                } else {
                    None
                }
            }
            (V::Elem(e), _) => Some(e),
            _ => None,
        }
    }

    fn elements(&self, sorts: &[SortId], args: &[Term]) -> Option<Vec<usize>> {
        let mut out = Vec::with_capacity(args.len());
        for (s, a) in sorts.iter().zip(args) {
            let v = self.term(a);
            out.push(self.element_of(*s, v)?);
        }
        Some(out)
    }

    fn term(&self, t: &Term) -> V {
        match t {
            Term::Var(x) => {
                let (_, s, e) = self.env.iter().rev().find(|(v, _, _)| v == x).expect("bound variable");
                self.value_of(*s, *e)
            }
            Term::Name(n) => {
                let sort = self.symbols.name(n).expect("declared name").sort;
                self.value_of(sort, self.it.names[n])
            }
            Term::EnumLit(e) => V::Elem(self.symbols.enum_elem(e).expect("declared element").1),
            Term::Int(k) => V::Int(*k),
            Term::App(f, args) => {
                let sig = self.symbols.func(f).expect("declared function");
                match self.elements(&sig.args, args) {
                    Some(key) => self.value_of(sig.result, self.it.functions[f][&key]),
                    None => V::Undef,
                }
            }
            Term::Arith(op, a, b) => match (self.term(a), self.term(b)) {
                (V::Int(x), V::Int(y)) => op.apply(x, y).map_or(V::Undef, V::Int),
                _ => V::Undef,
            },
            Term::Formula(_) => V::Undef,
        }
    }

    fn formula(&mut self, f: &Formula) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Pred(p, args) => {
                let sig = self.symbols.pred(p).expect("declared predicate");
                match self.elements(&sig.args, args) {
                    Some(key) => self.it.predicates[p].contains(&key),
                    None => false,
                }
            }
            Formula::Eq(a, b) => self.equal(a, b),
            Formula::Neq(a, b) => !self.equal(a, b),
            Formula::Cmp(op, a, b) => match (self.term(a), self.term(b)) {
                (V::Int(x), V::Int(y)) => op.holds(x, y),
                _ => false,
            },
            Formula::Not(g) => !self.formula(g),
            Formula::And(a, b) => self.formula(a) && self.formula(b),
            Formula::Or(a, b) => self.formula(a) || self.formula(b),
            Formula::Implies(a, b) => !self.formula(a) || self.formula(b),
            Formula::Iff(a, b) => self.formula(a) == self.formula(b),
            Formula::Forall(binder, g) | Formula::Exists(binder, g) => {
                let universal = matches!(f, Formula::Forall(..));
                let s = self.symbols.sort_id(binder.sort.as_deref().expect("typed binder")).expect("declared sort");
                for e in 0..self.it.domains.size(s) {
                    self.env.push((binder.var.clone(), s, e));
                    let r = self.formula(g);
                    self.env.pop();
                    if r != universal {
                        return r;
                    }
                }
                universal
            }
        }
    }

    fn equal(&self, a: &Term, b: &Term) -> bool {
        let (x, y) = (self.term(a), self.term(b));
        x != V::Undef && x == y
    }
}

/// Truth of a closed, typed formula in `it`.
pub fn eval(it: &Interpretation, symbols: &Symbols, f: &Formula) -> bool {
    Eval { it, symbols, env: Vec::new() }.formula(f)
}

/// One truth value per constraint.
pub fn check_constraints(it: &Interpretation, tp: &TypedProblem) -> Vec<bool> {
    tp.problem.constraints.iter().map(|c| eval(it, &tp.symbols, &c.formula)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceTooLarge {
    pub space: u128,
}

impl fmt::Display for SpaceTooLarge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} interpretations is beyond the brute-force limit of {SPACE_LIMIT}", self.space)
    }
}

/// Number of interpretations of the vocabulary at `da`, saturating.
pub fn space_size(symbols: &Symbols, da: &DomainAssignment) -> u128 {
    let mut n: u128 = 1;
    for m in &symbols.names {
        n = n.saturating_mul(da.size(m.sort) as u128);
    }
    for f in &symbols.funcs {
        let cells = arg_tuples(&f.args, da).len();
        for _ in 0..cells {
            n = n.saturating_mul(da.size(f.result) as u128);
        }
    }
    for p in &symbols.preds {
        let atoms = p.args.iter().fold(1u128, |acc, s| acc.saturating_mul(da.size(*s) as u128));
        n = n.saturating_mul(if atoms >= 128 { u128::MAX } else { 1u128 << atoms });
    }
    n
}

/// What one position of the odometer controls.
enum Digit {
    Name(String),
    Cell(String, Vec<usize>),
    Atom(String, Vec<usize>),
}

/// Calls `visit` on every interpretation at `da`, in a fixed order, until it
/// returns `false`.
pub fn for_each_interpretation(
    symbols: &Symbols,
    da: &DomainAssignment,
    mut visit: impl FnMut(&Interpretation) -> bool,
) -> Result<(), SpaceTooLarge> {
    let space = space_size(symbols, da);
    if space > SPACE_LIMIT {
        return Err(SpaceTooLarge { space });
    }
    let mut digits = Vec::new();
    let mut radix = Vec::new();
    for m in &symbols.names {
        digits.push(Digit::Name(m.name.clone()));
        radix.push(da.size(m.sort));
    }
    for f in &symbols.funcs {
        for t in arg_tuples(&f.args, da) {
            digits.push(Digit::Cell(f.name.clone(), t));
            radix.push(da.size(f.result));
        }
    }
    for p in &symbols.preds {
        for t in arg_tuples(&p.args, da) {
            digits.push(Digit::Atom(p.name.clone(), t));
            radix.push(2);
        }
    }
    let mut it = Interpretation {
        domains: da.clone(),
        names: symbols.names.iter().map(|m| (m.name.clone(), 0)).collect(),
        functions: symbols
            .funcs
            .iter()
            .map(|f| (f.name.clone(), arg_tuples(&f.args, da).into_iter().map(|t| (t, 0)).collect()))
            .collect(),
        predicates: symbols.preds.iter().map(|p| (p.name.clone(), BTreeSet::new())).collect(),
    };
    let set = |it: &mut Interpretation, d: &Digit, v: usize| match d {
        Digit::Name(n) => {
            it.names.insert(n.clone(), v);
        }
        Digit::Cell(f, t) => {
            it.functions.get_mut(f).unwrap().insert(t.clone(), v);
        }
        Digit::Atom(p, t) => {
            let ext = it.predicates.get_mut(p).unwrap();
            if v == 1 {
                ext.insert(t.clone());
            } else {
                ext.remove(t);
            }
        }
    };
    let mut value = vec![0usize; digits.len()];
    loop {
        if !visit(&it) {
            return Ok(());
        }
        let mut i = 0;
        loop {
            if i == digits.len() {
                return Ok(());
            }
            value[i] += 1;
            if value[i] < radix[i] {
                set(&mut it, &digits[i], value[i]);
                break;
            }
            value[i] = 0;
            set(&mut it, &digits[i], 0);
            i += 1;
        }
    }
}

/// All models of `tp` at `da`, up to `cap` of them.
pub fn brute_force_models(
    tp: &TypedProblem,
    da: &DomainAssignment,
    cap: usize,
) -> Result<Vec<Interpretation>, SpaceTooLarge> {
    let mut models = Vec::new();
    for_each_interpretation(&tp.symbols, da, |it| {
        if tp.problem.constraints.iter().all(|c| eval(it, &tp.symbols, &c.formula)) {
            models.push(it.clone());
        }
        models.len() < cap
    })?;
    Ok(models)
}

/// The largest number of constraints any interpretation at `da` satisfies.
pub fn brute_force_max_satisfied(tp: &TypedProblem, da: &DomainAssignment) -> Result<usize, SpaceTooLarge> {
    let total = tp.problem.constraints.len();
    let mut best = 0;
    for_each_interpretation(&tp.symbols, da, |it| {
        let n = check_constraints(it, tp).iter().filter(|b| **b).count();
        best = best.max(n);
        best < total
    })?;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_problem;
    use crate::typecheck::check;
    use std::collections::BTreeMap;

    fn typed(text: &str) -> TypedProblem {
        check(&parse_problem(text).unwrap(), text).unwrap()
    }

    #[test]
    fn small_counts() {
        let tp = typed("Sorts:\n c enum: a, b.\nVocabulary:\n predicate { p(c). }\nConstraints:\n");
        assert_eq!(brute_force_models(&tp, &DomainAssignment { sizes: vec![2] }, 100).unwrap().len(), 4);
        let tp = typed("Sorts:\n c enum: a, b.\nVocabulary:\n predicate { p(c). }\nConstraints:\n p(a).\n ~p(a).\n");
        assert!(brute_force_models(&tp, &DomainAssignment { sizes: vec![2] }, 100).unwrap().is_empty());
        assert_eq!(brute_force_max_satisfied(&tp, &DomainAssignment { sizes: vec![2] }).unwrap(), 1);
    }

    #[test]
    fn evaluates_integers() {
        let tp = typed("Sorts:\n n int: 1 .. 3.\nVocabulary:\n function { f(n): n. }\nConstraints:\n ALL x (x < 3 -> f(x) = x + 1).\n f(3) = 1.\n");
        let models = brute_force_models(&tp, &DomainAssignment { sizes: vec![3] }, 100).unwrap();
        assert_eq!(models.len(), 1);
        assert_eq!(models[0].functions["f"], BTreeMap::from([(vec![0], 1), (vec![1], 2), (vec![2], 0)]));
    }

    #[test]
    fn refuses_huge_spaces() {
        let tp = typed("Sorts:\n s.\nVocabulary:\n predicate { r(s, s). }\nConstraints:\n");
        let err = brute_force_models(&tp, &DomainAssignment { sizes: vec![5] }, 1).unwrap_err();
        assert_eq!(err.space, 1 << 25);
    }
}
