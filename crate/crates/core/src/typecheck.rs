//! Sort inference and type checking.
//!
//! Unannotated quantified variables get their sort from how they are used:
//! as an argument of a predicate or function, in an equation with a term of
//! known sort, or in arithmetic (which admits only integer sorts). The
//! candidate sets are intersected until nothing changes.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::diagnostic::Diagnostic;
use crate::lang::{free_variables, render_formula, render_term, Binder, Formula, Problem, Span, Term};
use crate::symbols::{SortId, Symbol, Symbols};

const MISMATCH_HINT: &str = "check for misplaced parentheses and wrong names";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ty {
    Sort(SortId),
    /// An integer expression not tied to one integer sort.
    Int,
    Bool,
}

/// A problem whose every binder carries its sort.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedProblem {
    pub problem: Problem,
    pub symbols: Symbols,
    pub warnings: Vec<Diagnostic>,
}

impl TypedProblem {
    pub fn open_sorts(&self) -> Vec<SortId> {
        self.symbols.open_sorts()
    }
}

/// Checks declarations and constraints. On failure the diagnostics hold the
/// errors first, then any warnings.
pub fn check(problem: &Problem, source: &str) -> Result<TypedProblem, Vec<Diagnostic>> {
    let (symbols, mut errors) = Symbols::build(problem, source);
    let mut typed = problem.clone();
    if errors.is_empty() {
        for c in &mut typed.constraints {
            let cx = Ctx { symbols: &symbols, source, span: c.span, index: c.index };
            match cx.constraint(&c.formula) {
                Ok(f) => c.formula = f,
                Err(d) => errors.push(d),
            }
        }
    }
    let warnings = if errors.is_empty() { unused_warnings(problem, &symbols, source) } else { Vec::new() };
    if errors.is_empty() {
        Ok(TypedProblem { problem: typed, symbols, warnings })
    } else {
        errors.extend(warnings);
        Err(errors)
    }
}

fn unused_warnings(problem: &Problem, symbols: &Symbols, source: &str) -> Vec<Diagnostic> {
    let mut used = HashSet::new();
    for c in &problem.constraints {
        collect_symbols(&c.formula, &mut used);
    }
    let mut warnings = Vec::new();
    let mut warn = |span: Span, what: &str, name: &str| {
        warnings.push(
            Diagnostic::warning(span.line, span.column, format!("{what} `{name}` is declared but never used"))
                .with_source(source),
        );
    };
    for p in &symbols.preds {
        if !used.contains(&p.name) {
            warn(p.span, "predicate", &p.name);
        }
    }
    for f in &symbols.funcs {
        if !used.contains(&f.name) {
            warn(f.span, "function", &f.name);
        }
    }
    for n in &symbols.names {
        if !used.contains(&n.name) {
            warn(n.span, "name", &n.name);
        }
    }
    if problem.constraints.is_empty() {
        let line = source.lines().count().max(1) as u32;
        warnings.push(Diagnostic::warning(line, 1, "there are no constraints, so every interpretation is a model"));
    }
    warnings
}

fn collect_symbols(f: &Formula, used: &mut HashSet<String>) {
    match f {
        Formula::Pred(p, args) => {
            used.insert(p.clone());
            args.iter().for_each(|a| collect_term_symbols(a, used));
        }
        Formula::Eq(a, b) | Formula::Neq(a, b) | Formula::Cmp(_, a, b) => {
            collect_term_symbols(a, used);
            collect_term_symbols(b, used);
        }
        Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => collect_symbols(g, used),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_symbols(a, used);
            collect_symbols(b, used);
        }
        Formula::True | Formula::False => {}
    }
}

fn collect_term_symbols(t: &Term, used: &mut HashSet<String>) {
    match t {
        Term::Name(n) => {
            used.insert(n.clone());
        }
        Term::App(f, args) => {
            used.insert(f.clone());
            args.iter().for_each(|a| collect_term_symbols(a, used));
        }
        Term::Arith(_, a, b) => {
            collect_term_symbols(a, used);
            collect_term_symbols(b, used);
        }
        Term::Formula(g) => collect_symbols(g, used),
        Term::Var(_) | Term::EnumLit(_) | Term::Int(_) => {}
    }
}

struct Ctx<'a> {
    symbols: &'a Symbols,
    source: &'a str,
    span: Span,
    index: usize,
}

/// Candidate sorts per variable; `None` means nothing is known yet.
type Candidates = BTreeMap<String, Option<BTreeSet<SortId>>>;

impl Ctx<'_> {
    fn error(&self, message: impl Into<String>) -> Diagnostic {
        let mut d = Diagnostic::error(self.span.line, self.span.column, message).with_source(self.source);
        d.constraint = Some(self.index);
        d
    }

    fn constraint(&self, f: &Formula) -> Result<Formula, Diagnostic> {
        let f = &rename_binders(f);
        let mut cands = Candidates::new();
        self.binders(f, &mut Vec::new(), &mut cands)?;
        loop {
            let before = cands.clone();
            self.infer_formula(f, &mut cands)?;
            if before == cands {
                break;
            }
        }
        // after inference, so a sort clash elsewhere in the formula is
        // reported in preference to the free variable
        if let Some(x) = free_variables(f).into_iter().next() {
            return Err(self
                .error(format!("`{x}` is not declared and is not bound by any quantifier"))
                .with_hints(&["declare it in the Vocabulary section, or quantify it with ALL or SOME"]));
        }
        let mut env = HashMap::new();
        for (x, c) in &cands {
            let set = c.as_ref().ok_or_else(|| {
                self.error(format!("cannot work out the sort of variable `{}`", base_name(x)))
                    .with_hints(&["give it explicitly, as in `ALL x: sort ...`"])
            })?;
            if set.len() > 1 {
                let names: Vec<&str> = set.iter().map(|s| self.symbols.sort_name(*s)).collect();
                return Err(self
                    .error(format!(
                        "the sort of variable `{}` is ambiguous: it could be {}",
                        base_name(x),
                        names.join(" or ")
                    ))
                    .with_hints(&["give it explicitly, as in `ALL x: sort ...`"]));
            }
            env.insert(x.clone(), *set.iter().next().unwrap());
        }
        self.check_formula(f, &env)?;
        Ok(self.annotate(f, &env))
    }

    fn binders(&self, f: &Formula, bound: &mut Vec<String>, cands: &mut Candidates) -> Result<(), Diagnostic> {
        match f {
            Formula::Forall(b, g) | Formula::Exists(b, g) => {
                let base = base_name(&b.var);
                if bound.iter().any(|v| base_name(v) == base) {
                    return Err(self
                        .error(format!("variable `{base}` is quantified twice"))
                        .with_hints(&["use a different variable name for the inner quantifier"]));
                }
                if let Some(sym) = self.symbols.lookup(base) {
                    return Err(self.error(format!(
                        "quantified variable `{base}` has the same name as a declared {}",
                        sym.role()
                    )));
                }
                let init = match &b.sort {
                    None => None,
                    Some(s) => match self.symbols.sort_id(s) {
                        Some(id) => Some(BTreeSet::from([id])),
                        None => return Err(self.error(format!("undeclared sort `{s}` in quantifier"))),
                    },
                };
                cands.insert(b.var.clone(), init);
                bound.push(b.var.clone());
                let r = self.binders(g, bound, cands);
                bound.pop();
                r
            }
            Formula::Not(g) => self.binders(g, bound, cands),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                self.binders(a, bound, cands)?;
                self.binders(b, bound, cands)
            }
            Formula::Pred(_, args) => args.iter().try_for_each(|t| self.binders_term(t, bound, cands)),
            Formula::Eq(a, b) | Formula::Neq(a, b) | Formula::Cmp(_, a, b) => {
                self.binders_term(a, bound, cands)?;
                self.binders_term(b, bound, cands)
            }
            Formula::True | Formula::False => Ok(()),
        }
    }

    fn binders_term(&self, t: &Term, bound: &mut Vec<String>, cands: &mut Candidates) -> Result<(), Diagnostic> {
        match t {
            Term::Formula(g) => self.binders(g, bound, cands),
            Term::App(_, args) => args.iter().try_for_each(|a| self.binders_term(a, bound, cands)),
            Term::Arith(_, a, b) => {
                self.binders_term(a, bound, cands)?;
                self.binders_term(b, bound, cands)
            }
            _ => Ok(()),
        }
    }

    fn restrict(&self, cands: &mut Candidates, x: &str, allowed: &BTreeSet<SortId>) -> Result<(), Diagnostic> {
        let Some(entry) = cands.get_mut(x) else { return Ok(()) };
        let next: BTreeSet<SortId> = match entry {
            None => allowed.clone(),
            Some(cur) => cur.intersection(allowed).copied().collect(),
        };
        if next.is_empty() {
            let name_of = |set: &BTreeSet<SortId>| {
                set.iter().map(|s| self.symbols.sort_name(*s).to_string()).collect::<Vec<_>>().join(" or ")
            };
            let cur = entry.as_ref().map(name_of).unwrap_or_default();
            let new = if allowed.len() > 1 && allowed.iter().all(|s| self.symbols.is_int(*s)) {
                "an integer sort".to_string()
            } else {
                name_of(allowed)
            };
            let new = if new.is_empty() { "an integer sort".to_string() } else { new };
            return Err(self
                .error(format!("variable `{}` is used both as {cur} and as {new}", base_name(x)))
                .with_hints(&[MISMATCH_HINT]));
        }
        *entry = Some(next);
        Ok(())
    }

    /// Sorts a term could have, as far as is known now.
    fn possible(&self, t: &Term, cands: &Candidates) -> Option<BTreeSet<SortId>> {
        match t {
            Term::Var(x) => cands.get(x).cloned().flatten(),
            Term::Name(n) => self.symbols.name(n).map(|n| BTreeSet::from([n.sort])),
            Term::EnumLit(e) => self.symbols.enum_elem(e).map(|(s, _)| BTreeSet::from([s])),
            Term::App(f, _) => self.symbols.func(f).map(|f| BTreeSet::from([f.result])),
            Term::Int(_) | Term::Arith(..) => Some(self.symbols.int_sorts().into_iter().collect()),
            Term::Formula(_) => None,
        }
    }

    fn infer_formula(&self, f: &Formula, cands: &mut Candidates) -> Result<(), Diagnostic> {
        match f {
            Formula::Pred(p, args) => {
                let expected = self.symbols.pred(p).map(|s| s.args.clone());
                self.infer_args(expected, args, cands)
            }
            Formula::Eq(a, b) | Formula::Neq(a, b) => {
                for (x, other) in [(a, b), (b, a)] {
                    if let Term::Var(v) = x {
                        if let Some(set) = self.possible(other, cands) {
                            self.restrict(cands, v, &set)?;
                        }
                    }
                }
                self.infer_term(a, cands)?;
                self.infer_term(b, cands)
            }
            Formula::Cmp(_, a, b) => {
                let ints: BTreeSet<SortId> = self.symbols.int_sorts().into_iter().collect();
                for t in [a, b] {
                    if let Term::Var(v) = t {
                        self.restrict(cands, v, &ints)?;
                    }
                    self.infer_term(t, cands)?;
                }
                Ok(())
            }
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => self.infer_formula(g, cands),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                self.infer_formula(a, cands)?;
                self.infer_formula(b, cands)
            }
            Formula::True | Formula::False => Ok(()),
        }
    }

    fn infer_args(
        &self,
        expected: Option<Vec<SortId>>,
        args: &[Term],
        cands: &mut Candidates,
    ) -> Result<(), Diagnostic> {
        for (i, a) in args.iter().enumerate() {
            if let (Term::Var(v), Some(exp)) = (a, &expected) {
                if exp.len() == args.len() {
                    self.restrict(cands, v, &BTreeSet::from([exp[i]]))?;
                }
            }
            self.infer_term(a, cands)?;
        }
        Ok(())
    }

    fn infer_term(&self, t: &Term, cands: &mut Candidates) -> Result<(), Diagnostic> {
        match t {
            Term::App(f, args) => {
                let expected = self.symbols.func(f).map(|s| s.args.clone());
                self.infer_args(expected, args, cands)
            }
            Term::Arith(_, a, b) => {
                let ints: BTreeSet<SortId> = self.symbols.int_sorts().into_iter().collect();
                for x in [a, b] {
                    if let Term::Var(v) = &**x {
                        self.restrict(cands, v, &ints)?;
                    }
                    self.infer_term(x, cands)?;
                }
                Ok(())
            }
            Term::Formula(g) => self.infer_formula(g, cands),
            _ => Ok(()),
        }
    }

    fn ty_name(&self, ty: Ty) -> String {
        match ty {
            Ty::Sort(s) => self.symbols.sort_name(s).to_string(),
            Ty::Int => "int".into(),
            Ty::Bool => "bool".into(),
        }
    }

    fn fits(&self, expected: SortId, actual: Ty) -> bool {
        match actual {
            Ty::Sort(s) => s == expected,
            Ty::Int => self.symbols.is_int(expected),
            Ty::Bool => false,
        }
    }

    fn is_intlike(&self, ty: Ty) -> bool {
        match ty {
            Ty::Sort(s) => self.symbols.is_int(s),
            Ty::Int => true,
            Ty::Bool => false,
        }
    }

    fn check_args(
        &self,
        head: &str,
        expected: &[SortId],
        args: &[Term],
        env: &HashMap<String, SortId>,
    ) -> Result<(), Diagnostic> {
        if expected.len() != args.len() {
            return Err(self
                .error(format!(
                    "`{head}` takes {} argument{} but is given {}",
                    expected.len(),
                    if expected.len() == 1 { "" } else { "s" },
                    args.len()
                ))
                .with_hints(&[MISMATCH_HINT]));
        }
        for (i, (exp, a)) in expected.iter().zip(args).enumerate() {
            let ty = self.term_ty(a, env)?;
            if !self.fits(*exp, ty) {
                let n = i + 1;
                // the offending application, arguments separated by bare commas
                let whole: Vec<String> = args.iter().map(|a| render_term(&strip_term(a))).collect();
                let whole = format!("{head}({})", whole.join(","));
                let mut d = self.error(format!("Type mismatch with argument of {head}")).with_hints(&[MISMATCH_HINT]);
                d.detail = vec![
                    "in the formula".into(),
                    format!("    {whole}"),
                    format!(
                        "the main operator \"{head}\" expects argument {n} to be of type {}",
                        self.symbols.sort_name(*exp)
                    ),
                    format!("but argument {n} is"),
                    format!("    {}", render_term(&strip_term(a))),
                    format!("which is of type {}.", self.ty_name(ty)),
                ];
                return Err(d);
            }
        }
        Ok(())
    }

    fn term_ty(&self, t: &Term, env: &HashMap<String, SortId>) -> Result<Ty, Diagnostic> {
        match t {
            Term::Var(x) => Ok(Ty::Sort(env[x])),
            Term::Name(n) => Ok(Ty::Sort(self.symbols.name(n).expect("resolved by the parser").sort)),
            Term::EnumLit(e) => Ok(Ty::Sort(self.symbols.enum_elem(e).expect("resolved by the parser").0)),
            Term::Int(_) => Ok(Ty::Int),
            Term::App(f, args) => match self.symbols.lookup(f) {
                Some(Symbol::Function(i)) => {
                    let sig = &self.symbols.funcs[i];
                    self.check_args(f, &sig.args, args, env)?;
                    Ok(Ty::Sort(sig.result))
                }
                Some(Symbol::Predicate(i)) => {
                    let sig = &self.symbols.preds[i];
                    self.check_args(f, &sig.args, args, env)?;
                    Ok(Ty::Bool)
                }
                Some(other) => Err(self.error(format!("{} `{f}` cannot take arguments", other.role()))),
                None => Err(self
                    .error(format!("undeclared function `{f}`"))
                    .with_hints(&["declare it in the Vocabulary section"])),
            },
            Term::Arith(op, a, b) => {
                for x in [a, b] {
                    let ty = self.term_ty(x, env)?;
                    if !self.is_intlike(ty) {
                        return Err(self.error(format!("`{}` needs integer operands", op.symbol())).with_detail(&[
                            "in the term".into(),
                            format!("    {}", render_term(&strip_term(t))),
                            "the operand".into(),
                            format!("    {}", render_term(&strip_term(x))),
                            format!("is of type {}.", self.ty_name(ty)),
                        ]));
                    }
                }
                Ok(Ty::Int)
            }
            Term::Formula(g) => {
                self.check_formula(g, env)?;
                Ok(Ty::Bool)
            }
        }
    }

    fn check_formula(&self, f: &Formula, env: &HashMap<String, SortId>) -> Result<(), Diagnostic> {
        match f {
            Formula::True | Formula::False => Ok(()),
            Formula::Pred(p, args) => match self.symbols.lookup(p) {
                Some(Symbol::Predicate(i)) => self.check_args(p, &self.symbols.preds[i].args, args, env),
                Some(Symbol::Function(_)) => Err(self
                    .error(format!("function `{p}` is used as a formula"))
                    .with_hints(&["a function application is a term; compare it with `=`"])),
                Some(other) => {
                    Err(self.error(format!("{} `{p}` is used as a formula", other.role())).with_hints(&[MISMATCH_HINT]))
                }
                None if env.contains_key(p) => {
                    Err(self.error(format!("variable `{p}` is used as a formula")).with_hints(&[MISMATCH_HINT]))
                }
                None => Err(self
                    .error(format!("undeclared predicate `{p}`"))
                    .with_hints(&["declare it in the Vocabulary section"])),
            },
            Formula::Eq(a, b) | Formula::Neq(a, b) => {
                let (ta, tb) = (self.term_ty(a, env)?, self.term_ty(b, env)?);
                let ok = match (ta, tb) {
                    (Ty::Bool, _) | (_, Ty::Bool) => {
                        return Err(self
                            .error("`=` compares terms, not formulae")
                            .with_hints(&["use `<->` to say two formulae are equivalent"]))
                    }
                    (Ty::Sort(x), Ty::Sort(y)) => x == y,
                    (Ty::Int, Ty::Int) => true,
                    (Ty::Int, other) | (other, Ty::Int) => self.is_intlike(other),
                };
                if ok {
                    Ok(())
                } else {
                    Err(self
                        .error("Type mismatch in equation")
                        .with_detail(&[
                            "in the formula".into(),
                            format!("    {}", render_formula(&strip_suffixes(f))),
                            format!("the left side is of type {}", self.ty_name(ta)),
                            format!("but the right side is of type {}.", self.ty_name(tb)),
                        ])
                        .with_hints(&[MISMATCH_HINT]))
                }
            }
            Formula::Cmp(op, a, b) => {
                for x in [a, b] {
                    let ty = self.term_ty(x, env)?;
                    if !self.is_intlike(ty) {
                        return Err(self.error(format!("`{}` compares integers only", op.symbol())).with_detail(&[
                            "in the formula".into(),
                            format!("    {}", render_formula(&strip_suffixes(f))),
                            "the operand".into(),
                            format!("    {}", render_term(&strip_term(x))),
                            format!("is of type {}.", self.ty_name(ty)),
                        ]));
                    }
                }
                Ok(())
            }
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => self.check_formula(g, env),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                self.check_formula(a, env)?;
                self.check_formula(b, env)
            }
        }
    }

    fn annotate(&self, f: &Formula, env: &HashMap<String, SortId>) -> Formula {
        let binder = |b: &Binder| Binder::typed(base_name(&b.var), self.symbols.sort_name(env[&b.var]));
        match f {
            Formula::Forall(b, g) => Formula::forall(binder(b), self.annotate(g, env)),
            Formula::Exists(b, g) => Formula::exists(binder(b), self.annotate(g, env)),
            Formula::Not(g) => Formula::not(self.annotate(g, env)),
            Formula::And(a, b) => Formula::and(self.annotate(a, env), self.annotate(b, env)),
            Formula::Or(a, b) => Formula::or(self.annotate(a, env), self.annotate(b, env)),
            Formula::Implies(a, b) => Formula::implies(self.annotate(a, env), self.annotate(b, env)),
            Formula::Iff(a, b) => Formula::iff(self.annotate(a, env), self.annotate(b, env)),
            other => strip_suffixes(other),
        }
    }
}

/// Inference works on a copy in which every binder has a distinct name, so
/// sibling scopes may reuse a variable at different sorts. `#` cannot occur
/// in source identifiers.
fn rename_binders(f: &Formula) -> Formula {
    Renamer::default().formula(f)
}

#[derive(Default)]
struct Renamer {
    seen: HashMap<String, usize>,
    scope: Vec<(String, String)>,
}

impl Renamer {
    fn formula(&mut self, f: &Formula) -> Formula {
        match f {
            Formula::Forall(b, g) | Formula::Exists(b, g) => {
                let k = self.seen.entry(b.var.clone()).or_insert(0);
                *k += 1;
                let fresh = if *k == 1 { b.var.clone() } else { format!("{}#{k}", b.var) };
                self.scope.push((b.var.clone(), fresh.clone()));
                let body = self.formula(g);
                self.scope.pop();
                let b = Binder { var: fresh, sort: b.sort.clone() };
                if matches!(f, Formula::Forall(..)) {
                    Formula::forall(b, body)
                } else {
                    Formula::exists(b, body)
                }
            }
            Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(|a| self.term(a)).collect()),
            Formula::Eq(a, b) => Formula::Eq(self.term(a), self.term(b)),
            Formula::Neq(a, b) => Formula::Neq(self.term(a), self.term(b)),
            Formula::Cmp(op, a, b) => Formula::Cmp(*op, self.term(a), self.term(b)),
            Formula::Not(g) => Formula::not(self.formula(g)),
            Formula::And(a, b) => Formula::and(self.formula(a), self.formula(b)),
            Formula::Or(a, b) => Formula::or(self.formula(a), self.formula(b)),
            Formula::Implies(a, b) => Formula::implies(self.formula(a), self.formula(b)),
            Formula::Iff(a, b) => Formula::iff(self.formula(a), self.formula(b)),
            Formula::True | Formula::False => f.clone(),
        }
    }

    fn term(&mut self, t: &Term) -> Term {
        match t {
            Term::Var(x) => {
                let fresh = self.scope.iter().rev().find(|(v, _)| v == x).map(|(_, f)| f.clone());
                Term::Var(fresh.unwrap_or_else(|| x.clone()))
            }
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.term(a)).collect()),
            Term::Arith(op, a, b) => Term::Arith(*op, Box::new(self.term(a)), Box::new(self.term(b))),
            Term::Formula(g) => Term::Formula(Box::new(self.formula(g))),
            other => other.clone(),
        }
    }
}

/// Rebuilds the non-binding structure of `f`, applying `sub` to immediate
/// subformulae and `term` to immediate terms.
fn map_formula(f: &Formula, sub: &mut dyn FnMut(&Formula) -> Formula, term: &mut dyn FnMut(&Term) -> Term) -> Formula {
    match f {
        Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(&mut *term).collect()),
        Formula::Eq(a, b) => Formula::Eq(term(a), term(b)),
        Formula::Neq(a, b) => Formula::Neq(term(a), term(b)),
        Formula::Cmp(op, a, b) => Formula::Cmp(*op, term(a), term(b)),
        Formula::Not(g) => Formula::not(sub(g)),
        Formula::And(a, b) => Formula::and(sub(a), sub(b)),
        Formula::Or(a, b) => Formula::or(sub(a), sub(b)),
        Formula::Implies(a, b) => Formula::implies(sub(a), sub(b)),
        Formula::Iff(a, b) => Formula::iff(sub(a), sub(b)),
        Formula::Forall(b, g) => Formula::forall(b.clone(), sub(g)),
        Formula::Exists(b, g) => Formula::exists(b.clone(), sub(g)),
        Formula::True => Formula::True,
        Formula::False => Formula::False,
    }
}

fn strip_suffixes(f: &Formula) -> Formula {
    map_formula(f, &mut strip_suffixes, &mut strip_term)
}

fn strip_term(t: &Term) -> Term {
    match t {
        Term::Var(x) => Term::Var(base_name(x).to_string()),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(strip_term).collect()),
        Term::Arith(op, a, b) => Term::Arith(*op, Box::new(strip_term(a)), Box::new(strip_term(b))),
        Term::Formula(g) => Term::Formula(Box::new(strip_suffixes(g))),
        other => other.clone(),
    }
}

fn base_name(x: &str) -> &str {
    x.split('#').next().unwrap_or(x)
}

trait WithDetail {
    fn with_detail(self, lines: &[String]) -> Self;
}

impl WithDetail for Diagnostic {
    fn with_detail(mut self, lines: &[String]) -> Self {
        self.detail = lines.to_vec();
        self
    }
}
