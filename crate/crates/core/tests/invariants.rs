//! Cross-module invariants over generated and shipped problems.

mod common;

use std::collections::BTreeSet;

use lff_core::corpus::Corpus;
use lff_core::engine::{run, OutcomeKind, SolveOptions};
use lff_core::evaluator::{brute_force_models, eval, for_each_interpretation, space_size};
use lff_core::grounder::{ground, Atom, GroundOptions};
use lff_core::interp::size_vectors;
use lff_core::parser::parse_formula;
use lff_core::symbols::{SortId, Symbols};
use lff_core::{
    check, parse_problem, render_problem, Binder, DomainAssignment, Formula, Interpretation, Term, TypedProblem,
};
use lff_sat::{enumerate_models, Budget, Cnf};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MAX_SPACE: u128 = 4096;

fn small_domains(tp: &TypedProblem) -> Vec<DomainAssignment> {
    let b = tp.symbols.open_sorts().iter().map(|s| (tp.symbols.sort_name(*s).to_string(), (1, 2))).collect();
    size_vectors(&tp.symbols, &b).into_iter().filter(|da| space_size(&tp.symbols, da) <= MAX_SPACE).collect()
}

#[test]
fn eval_follows_the_connectives() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0101);
    let mut checked = 0usize;
    for _ in 0..150 {
        let mut g = common::Gen::new(&mut rng, &common::TINY);
        let text = g.problem(&mut rng, 2, 3);
        let Ok(tp) = check(&parse_problem(&text).unwrap(), &text) else { continue };
        let (a, b) = (&tp.problem.constraints[0].formula, &tp.problem.constraints[1].formula);
        let composite = [
            Formula::not(a.clone()),
            Formula::and(a.clone(), b.clone()),
            Formula::or(a.clone(), b.clone()),
            Formula::implies(a.clone(), b.clone()),
            Formula::iff(a.clone(), b.clone()),
        ];
        for da in small_domains(&tp) {
            let mut visits = 0;
            for_each_interpretation(&tp.symbols, &da, |it| {
                let (x, y) = (eval(it, &tp.symbols, a), eval(it, &tp.symbols, b));
                let got: Vec<bool> = composite.iter().map(|f| eval(it, &tp.symbols, f)).collect();
                assert_eq!(got, vec![!x, x && y, x || y, !x || y, x == y], "{text}");
                if let Formula::Forall(bd, body) | Formula::Exists(bd, body) = a {
                    let dual = match a {
                        Formula::Forall(..) => {
                            Formula::not(Formula::exists(bd.clone(), Formula::not((**body).clone())))
                        }
                        _ => Formula::not(Formula::forall(bd.clone(), Formula::not((**body).clone()))),
                    };
                    assert_eq!(eval(it, &tp.symbols, &dual), x);
                }
                visits += 1;
                checked += 1;
                visits < 64
            })
            .unwrap();
        }
    }
    assert!(checked > 1000, "{checked}");
}

/// Sort of a term: a specific sort, or an integer of no fixed range.
#[derive(Clone, Copy, Debug, PartialEq)]
enum S {
    Of(SortId),
    AnyInt,
}

struct Audit<'a> {
    symbols: &'a Symbols,
    env: Vec<(String, SortId)>,
    findings: Vec<String>,
}

impl Audit<'_> {
    fn fits(&self, s: S, want: SortId) -> bool {
        match s {
            S::Of(x) => x == want,
            S::AnyInt => self.symbols.is_int(want),
        }
    }

    fn int_like(&self, s: S) -> bool {
        match s {
            S::Of(x) => self.symbols.is_int(x),
            S::AnyInt => true,
        }
    }

    fn args(&mut self, what: &str, want: &[SortId], args: &[Term]) {
        if want.len() != args.len() {
            self.findings.push(format!("{what}: arity {} used with {}", want.len(), args.len()));
            return;
        }
        for (w, a) in want.iter().zip(args) {
            if let Some(s) = self.term(a) {
                if !self.fits(s, *w) {
                    self.findings.push(format!("{what}: argument of sort {s:?} where {w:?} is declared"));
                }
            }
        }
    }

    fn term(&mut self, t: &Term) -> Option<S> {
        let s = match t {
            Term::Var(x) => match self.env.iter().rev().find(|(v, _)| v == x) {
                Some((_, s)) => S::Of(*s),
                None => {
                    self.findings.push(format!("free variable {x}"));
                    return None;
                }
            },
            Term::Name(n) => S::Of(self.symbols.name(n)?.sort),
            Term::EnumLit(e) => S::Of(self.symbols.enum_elem(e)?.0),
            Term::Int(_) => S::AnyInt,
            Term::App(f, args) => {
                let Some(sig) = self.symbols.func(f).cloned() else {
                    self.findings.push(format!("undeclared function {f}"));
                    return None;
                };
                self.args(f, &sig.args, args);
                S::Of(sig.result)
            }
            Term::Arith(_, a, b) => {
                for x in [a, b] {
                    if let Some(s) = self.term(x) {
                        if !self.int_like(s) {
                            self.findings.push("arithmetic on a non-integer".into());
                        }
                    }
                }
                S::AnyInt
            }
            Term::Formula(_) => {
                self.findings.push("formula in term position".into());
                return None;
            }
        };
        Some(s)
    }

    fn formula(&mut self, f: &Formula) {
        match f {
            Formula::True | Formula::False => {}
            Formula::Pred(p, args) => match self.symbols.pred(p).cloned() {
                Some(sig) => self.args(p, &sig.args, args),
                None => self.findings.push(format!("undeclared predicate {p}")),
            },
            Formula::Eq(a, b) | Formula::Neq(a, b) => {
                if let (Some(x), Some(y)) = (self.term(a), self.term(b)) {
                    let ok = match (x, y) {
                        (S::Of(p), S::Of(q)) => p == q,
                        (S::AnyInt, S::Of(q)) | (S::Of(q), S::AnyInt) => self.symbols.is_int(q),
                        (S::AnyInt, S::AnyInt) => true,
                    };
                    if !ok {
                        self.findings.push("equality between sorts".into());
                    }
                }
            }
            Formula::Cmp(_, a, b) => {
                for x in [a, b] {
                    if let Some(s) = self.term(x) {
                        if !self.int_like(s) {
                            self.findings.push("comparison of a non-integer".into());
                        }
                    }
                }
            }
            Formula::Not(g) => self.formula(g),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                self.formula(a);
                self.formula(b);
            }
            Formula::Forall(Binder { var, sort }, g) | Formula::Exists(Binder { var, sort }, g) => {
                let Some(s) = sort.as_deref().and_then(|s| self.symbols.sort_id(s)) else {
                    self.findings.push(format!("binder {var} has no sort"));
                    return;
                };
                self.env.push((var.clone(), s));
                self.formula(g);
                self.env.pop();
            }
        }
    }
}

fn audit(tp: &TypedProblem) -> Vec<String> {
    let mut a = Audit { symbols: &tp.symbols, env: Vec::new(), findings: Vec::new() };
    for c in &tp.problem.constraints {
        a.formula(&c.formula);
    }
    a.findings
}

#[test]
fn typed_problems_pass_an_independent_audit() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0102);
    for _ in 0..300 {
        let (text, tp) = common::tiny_problem(&mut rng, &common::TINY);
        assert_eq!(audit(&tp), Vec::<String>::new(), "{text}");
    }
    for p in Corpus::builtin().list(None) {
        let tp = check(&parse_problem(&p.encoding).unwrap(), &p.encoding).unwrap();
        assert_eq!(audit(&tp), Vec::<String>::new(), "{}", p.id);
    }
}

fn projected(cnf: &Cnf, g: &lff_core::grounder::Grounding, tp: &TypedProblem) -> BTreeSet<Interpretation> {
    let e = enumerate_models(cnf, &g.atoms.projection(), usize::MAX, &Budget::unlimited());
    assert!(e.exhausted);
    e.models.iter().map(|m| g.decode(m, &tp.symbols).unwrap()).collect()
}

#[test]
fn dropping_a_constraints_clauses_is_dropping_the_constraint() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0103);
    let mut compared = 0;
    while compared < 150 {
        let (text, tp) = common::tiny_problem(&mut rng, &common::TINY);
        let Some(da) = small_domains(&tp).into_iter().next() else { continue };
        let g = ground(&tp, &da, &GroundOptions::default()).unwrap();
        let k = rng.gen_range(0..tp.problem.constraints.len());

        let mut cnf = Cnf::new(g.cnf.num_vars);
        for (c, p) in g.cnf.clauses.iter().zip(&g.provenance) {
            if p.constraint() != Some(k) {
                cnf.add_clause(c.clone());
            }
        }
        let mut fewer = tp.clone();
        fewer.problem.constraints.remove(k);
        let g2 = ground(&fewer, &da, &GroundOptions::default()).unwrap();
        assert_eq!(projected(&cnf, &g, &tp), projected(&g2.cnf, &g2, &fewer), "dropping {k} of\n{text}");
        compared += 1;
    }
}

#[test]
fn every_cell_has_exactly_one_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0104);
    for _ in 0..150 {
        let (_, tp) = common::tiny_problem(&mut rng, &common::TINY);
        for da in small_domains(&tp) {
            let g = ground(&tp, &da, &GroundOptions::default()).unwrap();
            let e = enumerate_models(&g.cnf, &g.atoms.projection(), 64, &Budget::unlimited());
            for m in &e.models {
                let mut cells = std::collections::BTreeMap::new();
                for (v, atom) in g.atoms.atoms.iter().enumerate() {
                    let key = match atom {
                        Atom::Func { func, args, .. } => (0, *func, args.clone()),
                        Atom::Name { name, .. } => (1, *name, Vec::new()),
                        Atom::Pred { .. } => continue,
                    };
                    *cells.entry(key).or_insert(0) += usize::from(m.0[v]);
                }
                assert!(cells.values().all(|n| *n == 1), "{cells:?}");
            }
        }
    }
}

#[test]
fn constraint_spans_reparse() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0105);
    let mut texts: Vec<String> = (0..100).map(|_| common::tiny_problem(&mut rng, &common::TINY).0).collect();
    texts.extend(Corpus::builtin().list(None).iter().map(|p| p.encoding.clone()));
    for text in &texts {
        let p = parse_problem(text).unwrap();
        for c in &p.constraints {
            let f = parse_formula(c.span.slice(text), &p).unwrap();
            assert_eq!(f, c.formula, "{}", c.span.slice(text));
        }
    }
}

#[test]
fn one_error_per_bad_constraint() {
    let mary = include_str!("../../../corpus/mary-lamb/problem.lff");
    let bad = ["had(Mary, Mary).", "stature(Mary) = little.", "lamb(Mary).", "ALL y Went(y, y).", "hue(Mary) = green."];
    for k in 1..=bad.len() {
        let text = format!("{mary}{}\n", bad[..k].join("\n"));
        let out = run(&text, &SolveOptions::check());
        let OutcomeKind::InputErrors(errs) = &out.kind else { panic!("{}", out.render()) };
        assert!(errs.len() >= k, "{k} bad constraints gave {} diagnostics", errs.len());
    }
}

#[test]
fn declaration_order_does_not_matter() {
    for p in Corpus::builtin().list(None) {
        let mut problem = parse_problem(&p.encoding).unwrap();
        problem.sorts.reverse();
        problem.vocab.predicates.reverse();
        problem.vocab.functions.reverse();
        problem.vocab.names.reverse();
        let shuffled = render_problem(&problem);
        let opts = SolveOptions { max_models: p.expected_models + 1, bounds: p.bounds.clone(), ..Default::default() };
        let (a, b) = (run(&p.encoding, &opts), run(&shuffled, &opts));
        assert_eq!(a.model_count(), b.model_count(), "{}", p.id);
        assert_eq!(a.kind_name(), b.kind_name(), "{}", p.id);
    }
}

#[test]
fn complete_no_solution_means_no_models_anywhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0106);
    let mut spotted = 0;
    for _ in 0..600 {
        let (text, tp) = common::tiny_problem(&mut rng, &common::TINY);
        let bounds = tp.symbols.open_sorts().iter().map(|s| (tp.symbols.sort_name(*s).to_string(), (1, 2))).collect();
        let out = run(&text, &SolveOptions { bounds, ..Default::default() });
        if let OutcomeKind::NoSolution { searched, complete: true } = &out.kind {
            for da in searched {
                if space_size(&tp.symbols, da) <= 1 << 16 {
                    assert!(brute_force_models(&tp, da, 1).unwrap().is_empty(), "{text}");
                    spotted += 1;
                }
            }
        }
    }
    assert!(spotted >= 20, "{spotted}");
}
