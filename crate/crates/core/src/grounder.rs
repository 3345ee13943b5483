//! Grounding of a typed problem at a fixed domain assignment into CNF.
//!
//! Functions and names are encoded relationally: one propositional atom per
//! cell value `f(ē)=v`, with exactly-one axioms per cell. An atom whose
//! arguments contain function terms becomes a conjunction over the possible
//! cell values, `(f(ē)=v → atom[v])`. Quantifiers expand over the domain and
//! negations are pushed to the atoms on the way, so the result is a
//! negation-normal circuit which is clausified with one-directional
//! (polarity-aware) definitions.

use std::fmt;
use std::time::Instant;

use lff_sat::{write_dimacs, Cnf, Lit, Model, Var};

use crate::interp::{element_labels, DomainAssignment, Interpretation};
use crate::lang::{Formula, SortKind, Term};
use crate::symbols::{SortId, Symbols};
use crate::typecheck::TypedProblem;

pub const DEFAULT_SIZE_CAP: usize = 2_000_000;

#[derive(Clone, Debug)]
pub struct GroundOptions {
    /// Upper bound on ground atoms, and (scaled) on grounding work.
    pub size_cap: usize,
    pub symmetry_breaking: bool,
    /// Guard each constraint's clauses with a selector variable.
    pub selectors: bool,
    pub deadline: Option<Instant>,
}

impl Default for GroundOptions {
    fn default() -> Self {
        GroundOptions { size_cap: DEFAULT_SIZE_CAP, symmetry_breaking: false, selectors: false, deadline: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroundError {
    TooLarge { estimate: u128, cap: usize },
    Timeout,
}

impl fmt::Display for GroundError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundError::TooLarge { estimate, cap } => {
                write!(
                    f,
                    "the ground problem is too large ({estimate} exceeds the limit of {cap}); try smaller domains"
                )
            }
            GroundError::Timeout => write!(f, "the deadline passed while grounding"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    Totality {
        func: usize,
        args: Vec<usize>,
    },
    Functionality {
        func: usize,
        args: Vec<usize>,
    },
    NameTotality(usize),
    NameFunctionality(usize),
    /// Definition of an auxiliary variable introduced for constraint `k`.
    Tseitin(usize),
    /// Optional least-index ordering on names of open sorts.
    Symmetry(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Constraint(usize),
    Axiom(Axiom),
}

impl Provenance {
    /// The constraint this clause belongs to, counting auxiliary definitions.
    pub fn constraint(&self) -> Option<usize> {
        match self {
            Provenance::Constraint(k) | Provenance::Axiom(Axiom::Tseitin(k)) => Some(*k),
            _ => None,
        }
    }

    pub fn describe(&self, symbols: &Symbols, da: &DomainAssignment) -> String {
        let tuple = |sorts: &[SortId], args: &[usize]| -> String {
            sorts
                .iter()
                .zip(args)
                .map(|(s, &e)| element_labels(symbols, *s, da.size(*s))[e].clone())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            Provenance::Constraint(k) => format!("from constraint {k}"),
            Provenance::Axiom(a) => {
                let tag = match a {
                    Axiom::Totality { func, args } => {
                        let f = &symbols.funcs[*func];
                        format!("totality({},{})", f.name, tuple(&f.args, args))
                    }
                    Axiom::Functionality { func, args } => {
                        let f = &symbols.funcs[*func];
                        format!("functionality({},{})", f.name, tuple(&f.args, args))
                    }
                    Axiom::NameTotality(n) => format!("name-totality({})", symbols.names[*n].name),
                    Axiom::NameFunctionality(n) => format!("name-functionality({})", symbols.names[*n].name),
                    Axiom::Tseitin(k) => format!("tseitin({k})"),
                    Axiom::Symmetry(n) => format!("symmetry({})", symbols.names[*n].name),
                };
                format!("axiom {tag}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    Pred { pred: usize, args: Vec<usize> },
    Func { func: usize, args: Vec<usize>, value: usize },
    Name { name: usize, value: usize },
}

/// The variables `0..atoms.len()` are ground atoms; later variables are
/// selectors and auxiliaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomMap {
    pub atoms: Vec<Atom>,
    pred_base: Vec<u32>,
    func_base: Vec<u32>,
    name_base: Vec<u32>,
}

impl AtomMap {
    pub fn num_atoms(&self) -> u32 {
        self.atoms.len() as u32
    }

    pub fn is_atom(&self, v: Var) -> bool {
        v.0 < self.num_atoms()
    }

    pub fn projection(&self) -> Vec<Var> {
        (0..self.num_atoms()).map(Var).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Grounding {
    pub cnf: Cnf,
    /// One entry per clause of `cnf`.
    pub provenance: Vec<Provenance>,
    pub atoms: AtomMap,
    /// Selector per constraint when requested: the constraint's clauses are
    /// active exactly when the selector is true.
    pub selectors: Vec<Var>,
    pub domains: DomainAssignment,
}

impl Grounding {
    pub fn num_aux(&self) -> u32 {
        self.cnf.num_vars - self.atoms.num_atoms() - self.selectors.len() as u32
    }

    /// Reads an interpretation off a model of the clauses.
    pub fn decode(&self, model: &Model, symbols: &Symbols) -> Result<Interpretation, String> {
        let mut it = Interpretation {
            domains: self.domains.clone(),
            names: Default::default(),
            functions: symbols.funcs.iter().map(|f| (f.name.clone(), Default::default())).collect(),
            predicates: symbols.preds.iter().map(|p| (p.name.clone(), Default::default())).collect(),
        };
        for (i, atom) in self.atoms.atoms.iter().enumerate() {
            if !model.value(Var(i as u32)) {
                continue;
            }
            match atom {
                Atom::Pred { pred, args } => {
                    it.predicates.get_mut(&symbols.preds[*pred].name).unwrap().insert(args.clone());
                }
                Atom::Func { func, args, value } => {
                    let table = it.functions.get_mut(&symbols.funcs[*func].name).unwrap();
                    if table.insert(args.clone(), *value).is_some() {
                        return Err(format!("function {} has two values at one point", symbols.funcs[*func].name));
                    }
                }
                Atom::Name { name, value } => {
                    if it.names.insert(symbols.names[*name].name.clone(), *value).is_some() {
                        return Err(format!("name {} has two values", symbols.names[*name].name));
                    }
                }
            }
        }
        it.validate(symbols)?;
        Ok(it)
    }

    /// Clause indices with the given provenance constraint.
    pub fn clauses_of(&self, k: usize) -> Vec<usize> {
        (0..self.provenance.len()).filter(|&i| self.provenance[i].constraint() == Some(k)).collect()
    }

    /// DIMACS text with a provenance comment before every clause.
    pub fn to_dimacs(&self, symbols: &Symbols) -> String {
        write_dimacs(&self.cnf, |i| Some(format!("clause {i} {}", self.provenance[i].describe(symbols, &self.domains))))
    }

    pub fn atom_label(&self, v: Var, symbols: &Symbols) -> Option<String> {
        let da = &self.domains;
        let labels = |s: SortId| element_labels(symbols, s, da.size(s));
        let tuple = |sorts: &[SortId], args: &[usize]| {
            sorts.iter().zip(args).map(|(s, &e)| labels(*s)[e].clone()).collect::<Vec<_>>().join(", ")
        };
        Some(match self.atoms.atoms.get(v.index())? {
            Atom::Pred { pred, args } => {
                let p = &symbols.preds[*pred];
                if args.is_empty() {
                    p.name.clone()
                } else {
                    format!("{}({})", p.name, tuple(&p.args, args))
                }
            }
            Atom::Func { func, args, value } => {
                let f = &symbols.funcs[*func];
                format!("{}({}) = {}", f.name, tuple(&f.args, args), labels(f.result)[*value])
            }
            Atom::Name { name, value } => {
                let n = &symbols.names[*name];
                format!("{} = {}", n.name, labels(n.sort)[*value])
            }
        })
    }
}

/// Ground negation-normal circuit.
#[derive(Clone, Debug)]
enum G {
    T,
    F,
    Lit(Lit),
    And(Vec<G>),
    Or(Vec<G>),
}

fn konst(b: bool) -> G {
    if b {
        G::T
    } else {
        G::F
    }
}

fn and(parts: Vec<G>) -> G {
    let mut out = Vec::with_capacity(parts.len());
    for p in parts {
        match p {
            G::T => {}
            G::F => return G::F,
            G::And(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => G::T,
        1 => out.pop().unwrap(),
        _ => G::And(out),
    }
}

fn or(parts: Vec<G>) -> G {
    let mut out = Vec::with_capacity(parts.len());
    for p in parts {
        match p {
            G::F => {}
            G::T => return G::T,
            G::Or(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => G::F,
        1 => out.pop().unwrap(),
        _ => G::Or(out),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Val {
    Elem(usize),
    Int(i64),
    /// An integer outside the sort it is used at, or an overflow.
    Undef,
}

#[derive(Clone, Debug)]
struct Case {
    conds: Vec<Lit>,
    val: Val,
}

fn tuple_index(args: &[usize], sizes: &[usize]) -> usize {
    args.iter().zip(sizes).fold(0, |acc, (&a, &n)| acc * n + a)
}

struct Grounder<'a> {
    symbols: &'a Symbols,
    da: &'a DomainAssignment,
    atoms: AtomMap,
    cnf: Cnf,
    provenance: Vec<Provenance>,
    work: usize,
    work_cap: usize,
    deadline: Option<Instant>,
    env: Vec<(String, SortId, usize)>,
}

/// Number of ground atoms at `da`, saturating.
pub fn atom_count(symbols: &Symbols, da: &DomainAssignment) -> u128 {
    let prod = |sorts: &[SortId]| sorts.iter().fold(1u128, |acc, s| acc.saturating_mul(da.size(*s) as u128));
    let mut n: u128 = 0;
    for p in &symbols.preds {
        n = n.saturating_add(prod(&p.args));
    }
    for f in &symbols.funcs {
        n = n.saturating_add(prod(&f.args).saturating_mul(da.size(f.result) as u128));
    }
    for m in &symbols.names {
        n = n.saturating_add(da.size(m.sort) as u128);
    }
    n
}

pub fn ground(tp: &TypedProblem, da: &DomainAssignment, opts: &GroundOptions) -> Result<Grounding, GroundError> {
    let symbols = &tp.symbols;
    let estimate = atom_count(symbols, da);
    if estimate > opts.size_cap as u128 {
        return Err(GroundError::TooLarge { estimate, cap: opts.size_cap });
    }
    let mut atoms = AtomMap { atoms: Vec::new(), pred_base: Vec::new(), func_base: Vec::new(), name_base: Vec::new() };
    for (i, p) in symbols.preds.iter().enumerate() {
        atoms.pred_base.push(atoms.atoms.len() as u32);
        for args in crate::interp::arg_tuples(&p.args, da) {
            atoms.atoms.push(Atom::Pred { pred: i, args });
        }
    }
    for (i, f) in symbols.funcs.iter().enumerate() {
        atoms.func_base.push(atoms.atoms.len() as u32);
        for args in crate::interp::arg_tuples(&f.args, da) {
            for value in 0..da.size(f.result) {
                atoms.atoms.push(Atom::Func { func: i, args: args.clone(), value });
            }
        }
    }
    for (i, n) in symbols.names.iter().enumerate() {
        atoms.name_base.push(atoms.atoms.len() as u32);
        for value in 0..da.size(n.sort) {
            atoms.atoms.push(Atom::Name { name: i, value });
        }
    }
    let mut g = Grounder {
        symbols,
        da,
        cnf: Cnf::new(atoms.num_atoms()),
        atoms,
        provenance: Vec::new(),
        work: 0,
        work_cap: opts.size_cap.saturating_mul(4),
        deadline: opts.deadline,
        env: Vec::new(),
    };
    g.axioms(opts.symmetry_breaking);
    let selectors: Vec<Var> =
        if opts.selectors { tp.problem.constraints.iter().map(|_| g.cnf.new_var()).collect() } else { Vec::new() };
    for c in &tp.problem.constraints {
        let circuit = g.formula(&c.formula, true)?;
        let guard = selectors.get(c.index).map(|s| s.neg());
        g.clausify_top(circuit, c.index, guard);
    }
    Ok(Grounding { cnf: g.cnf, provenance: g.provenance, atoms: g.atoms, selectors, domains: da.clone() })
}

impl Grounder<'_> {
    fn emit(&mut self, mut clause: Vec<Lit>, prov: Provenance) {
        clause.sort_unstable();
        clause.dedup();
        if clause.windows(2).any(|w| w[0].var() == w[1].var()) {
            return; // tautology
        }
        self.cnf.add_clause(clause);
        self.provenance.push(prov);
    }

    fn pred_lit(&self, pred: usize, args: &[usize]) -> Lit {
        let sizes: Vec<usize> = self.symbols.preds[pred].args.iter().map(|s| self.da.size(*s)).collect();
        Var(self.atoms.pred_base[pred] + tuple_index(args, &sizes) as u32).pos()
    }

    fn func_lit(&self, func: usize, args: &[usize], value: usize) -> Lit {
        let f = &self.symbols.funcs[func];
        let sizes: Vec<usize> = f.args.iter().map(|s| self.da.size(*s)).collect();
        let width = self.da.size(f.result);
        Var(self.atoms.func_base[func] + (tuple_index(args, &sizes) * width + value) as u32).pos()
    }

    fn name_lit(&self, name: usize, value: usize) -> Lit {
        Var(self.atoms.name_base[name] + value as u32).pos()
    }

    fn exactly_one(&mut self, lits: &[Lit], alo: Provenance, amo: Provenance) {
        self.emit(lits.to_vec(), alo);
        for i in 0..lits.len() {
            for j in i + 1..lits.len() {
                self.emit(vec![!lits[i], !lits[j]], amo.clone());
            }
        }
    }

    fn axioms(&mut self, symmetry: bool) {
        for (fi, f) in self.symbols.funcs.iter().enumerate() {
            for args in crate::interp::arg_tuples(&f.args, self.da) {
                let lits: Vec<Lit> = (0..self.da.size(f.result)).map(|v| self.func_lit(fi, &args, v)).collect();
                self.exactly_one(
                    &lits,
                    Provenance::Axiom(Axiom::Totality { func: fi, args: args.clone() }),
                    Provenance::Axiom(Axiom::Functionality { func: fi, args }),
                );
            }
        }
        for (ni, n) in self.symbols.names.iter().enumerate() {
            let lits: Vec<Lit> = (0..self.da.size(n.sort)).map(|v| self.name_lit(ni, v)).collect();
            self.exactly_one(
                &lits,
                Provenance::Axiom(Axiom::NameTotality(ni)),
                Provenance::Axiom(Axiom::NameFunctionality(ni)),
            );
        }
        if symmetry {
            // the j-th name of an open sort takes one of the first j+1 elements
            for s in self.symbols.open_sorts() {
                let names: Vec<usize> =
                    (0..self.symbols.names.len()).filter(|&i| self.symbols.names[i].sort == s).collect();
                for (j, &ni) in names.iter().enumerate() {
                    for v in j + 1..self.da.size(s) {
                        self.emit(vec![!self.name_lit(ni, v)], Provenance::Axiom(Axiom::Symmetry(ni)));
                    }
                }
            }
        }
    }

    fn tick(&mut self) -> Result<(), GroundError> {
        self.work += 1;
        if self.work > self.work_cap {
            return Err(GroundError::TooLarge { estimate: self.work as u128, cap: self.work_cap });
        }
        if self.work.is_multiple_of(4096) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Err(GroundError::Timeout);
                }
            }
        }
        Ok(())
    }

    fn int_lo(&self, s: SortId) -> Option<i64> {
        match self.symbols.sort(s).kind {
            SortKind::IntRange { lo, .. } => Some(lo),
            _ => None,
        }
    }

    fn elem_val(&self, s: SortId, e: usize) -> Val {
        match self.int_lo(s) {
            Some(lo) => Val::Int(lo + e as i64),
            None => Val::Elem(e),
        }
    }

    fn to_elem(&self, s: SortId, v: Val) -> Option<usize> {
        match v {
            Val::Elem(e) => Some(e),
            Val::Int(k) => {
                let lo = self.int_lo(s)?;
                let off = k.checked_sub(lo)?;
                (off >= 0 && (off as u128) < self.da.size(s) as u128).then_some(off as usize)
            }
            Val::Undef => None,
        }
    }

    /// A cell literal is only a condition when the cell has a choice; with a
    /// one-element result sort the exactly-one axiom already forces it.
    fn cell_cond(&self, result: SortId, lit: Lit) -> Vec<Lit> {
        if self.da.size(result) == 1 {
            Vec::new()
        } else {
            vec![lit]
        }
    }

    fn term(&mut self, t: &Term) -> Result<Vec<Case>, GroundError> {
        self.tick()?;
        Ok(match t {
            Term::Var(x) => {
                let &(_, s, e) = self.env.iter().rev().find(|(v, _, _)| v == x).expect("typed variable is bound");
                vec![Case { conds: Vec::new(), val: self.elem_val(s, e) }]
            }
            Term::Name(n) => {
                let ni = self.symbols.names.iter().position(|d| &d.name == n).expect("typed name");
                let s = self.symbols.names[ni].sort;
                (0..self.da.size(s))
                    .map(|v| Case { conds: self.cell_cond(s, self.name_lit(ni, v)), val: self.elem_val(s, v) })
                    .collect()
            }
            Term::EnumLit(e) => {
                let (_, i) = self.symbols.enum_elem(e).expect("typed enum element");
                vec![Case { conds: Vec::new(), val: Val::Elem(i) }]
            }
            Term::Int(k) => vec![Case { conds: Vec::new(), val: Val::Int(*k) }],
            Term::App(f, args) => {
                let fi = self.symbols.funcs.iter().position(|d| &d.name == f).expect("typed function");
                let sig = self.symbols.funcs[fi].clone();
                let mut out = Vec::new();
                for combo in self.combos(args)? {
                    let elems: Option<Vec<usize>> =
                        combo.vals.iter().zip(&sig.args).map(|(v, s)| self.to_elem(*s, *v)).collect();
                    match elems {
                        None => out.push(Case { conds: combo.conds, val: Val::Undef }),
                        Some(elems) => {
                            for v in 0..self.da.size(sig.result) {
                                let mut conds = combo.conds.clone();
                                conds.extend(self.cell_cond(sig.result, self.func_lit(fi, &elems, v)));
                                out.push(Case { conds, val: self.elem_val(sig.result, v) });
                            }
                        }
                    }
                }
                out
            }
            Term::Arith(op, a, b) => {
                let (ca, cb) = (self.term(a)?, self.term(b)?);
                let mut out = Vec::new();
                for x in &ca {
                    for y in &cb {
                        let val = match (x.val, y.val) {
                            (Val::Int(p), Val::Int(q)) => op.apply(p, q).map_or(Val::Undef, Val::Int),
                            _ => Val::Undef,
                        };
                        out.push(Case { conds: [x.conds.clone(), y.conds.clone()].concat(), val });
                    }
                }
                out
            }
            Term::Formula(_) => unreachable!("rejected by the type checker"),
        })
    }

    /// Cartesian product of the argument cases.
    fn combos(&mut self, args: &[Term]) -> Result<Vec<Combo>, GroundError> {
        let mut out = vec![Combo { conds: Vec::new(), vals: Vec::new() }];
        for a in args {
            let cases = self.term(a)?;
            let mut next = Vec::with_capacity(out.len() * cases.len());
            for c in &out {
                for k in &cases {
                    self.tick()?;
                    let mut conds = c.conds.clone();
                    conds.extend_from_slice(&k.conds);
                    let mut vals = c.vals.clone();
                    vals.push(k.val);
                    next.push(Combo { conds, vals });
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// `⋀ (conds → lit)` over the cases, with `lit` computed per case.
    fn guarded(&mut self, combos: Vec<Combo>, mut body: impl FnMut(&Self, &[Val]) -> G) -> Result<G, GroundError> {
        let mut parts = Vec::with_capacity(combos.len());
        for c in combos {
            self.tick()?;
            let b = body(self, &c.vals);
            let mut disj: Vec<G> = c.conds.iter().map(|l| G::Lit(!*l)).collect();
            disj.push(b);
            parts.push(or(disj));
        }
        Ok(and(parts))
    }

    /// Grounds `f` if `pos`, else its negation.
    fn formula(&mut self, f: &Formula, pos: bool) -> Result<G, GroundError> {
        self.tick()?;
        Ok(match f {
            Formula::True => konst(pos),
            Formula::False => konst(!pos),
            Formula::Pred(p, args) => {
                let pi = self.symbols.preds.iter().position(|d| &d.name == p).expect("typed predicate");
                let sorts = self.symbols.preds[pi].args.clone();
                let combos = self.combos(args)?;
                self.guarded(combos, |g, vals| {
                    let elems: Option<Vec<usize>> = vals.iter().zip(&sorts).map(|(v, s)| g.to_elem(*s, *v)).collect();
                    match elems {
                        None => konst(!pos),
                        Some(e) => {
                            let l = g.pred_lit(pi, &e);
                            G::Lit(if pos { l } else { !l })
                        }
                    }
                })?
            }
            Formula::Eq(a, b) | Formula::Neq(a, b) => {
                let is_eq = matches!(f, Formula::Eq(..));
                let combos = self.combos(&[a.clone(), b.clone()])?;
                self.guarded(combos, |_, vals| {
                    // an undefined value equals nothing; /= is the negation of =
                    let equal = vals[0] != Val::Undef && vals[1] != Val::Undef && vals[0] == vals[1];
                    konst((equal == is_eq) == pos)
                })?
            }
            Formula::Cmp(op, a, b) => {
                let combos = self.combos(&[a.clone(), b.clone()])?;
                self.guarded(combos, |_, vals| match (vals[0], vals[1]) {
                    (Val::Int(x), Val::Int(y)) => konst(op.holds(x, y) == pos),
                    _ => konst(!pos),
                })?
            }
            Formula::Not(g) => self.formula(g, !pos)?,
            Formula::And(a, b) => {
                let (x, y) = (self.formula(a, pos)?, self.formula(b, pos)?);
                if pos {
                    and(vec![x, y])
                } else {
                    or(vec![x, y])
                }
            }
            Formula::Or(a, b) => {
                let (x, y) = (self.formula(a, pos)?, self.formula(b, pos)?);
                if pos {
                    or(vec![x, y])
                } else {
                    and(vec![x, y])
                }
            }
            Formula::Implies(a, b) => {
                let (x, y) = (self.formula(a, !pos)?, self.formula(b, pos)?);
                if pos {
                    or(vec![x, y])
                } else {
                    and(vec![x, y])
                }
            }
            Formula::Iff(a, b) => {
                // a <-> b  ==  (a & b) | (~a & ~b);  ~(a <-> b)  ==  (a & ~b) | (~a & b)
                let (ap, an) = (self.formula(a, true)?, self.formula(a, false)?);
                let (bp, bn) = (self.formula(b, pos)?, self.formula(b, !pos)?);
                or(vec![and(vec![ap, bp]), and(vec![an, bn])])
            }
            Formula::Forall(binder, g) | Formula::Exists(binder, g) => {
                let s = self.symbols.sort_id(binder.sort.as_deref().expect("typed binder")).expect("declared sort");
                let mut parts = Vec::with_capacity(self.da.size(s));
                for e in 0..self.da.size(s) {
                    self.env.push((binder.var.clone(), s, e));
                    let r = self.formula(g, pos);
                    self.env.pop();
                    parts.push(r?);
                }
                let conjunctive = matches!(f, Formula::Forall(..)) == pos;
                if conjunctive {
                    and(parts)
                } else {
                    or(parts)
                }
            }
        })
    }

    fn clausify_top(&mut self, g: G, k: usize, guard: Option<Lit>) {
        let with_guard = |mut c: Vec<Lit>| {
            c.extend(guard);
            c
        };
        match g {
            G::T => {}
            G::F => self.emit(with_guard(Vec::new()), Provenance::Constraint(k)),
            G::Lit(l) => self.emit(with_guard(vec![l]), Provenance::Constraint(k)),
            G::And(parts) => {
                for p in parts {
                    self.clausify_top(p, k, guard);
                }
            }
            G::Or(parts) => {
                let clause: Vec<Lit> = parts.into_iter().map(|p| self.lit_of(p, k)).collect();
                self.emit(with_guard(clause), Provenance::Constraint(k));
            }
        }
    }

    /// A literal implying `g`, with `aux -> g` definitions as needed.
    fn lit_of(&mut self, g: G, k: usize) -> Lit {
        match g {
            G::Lit(l) => l,
            G::T | G::F => unreachable!("constants are simplified away"),
            G::And(parts) => {
                let a = self.cnf.new_var().pos();
                for p in parts {
                    let l = self.lit_of(p, k);
                    self.emit(vec![!a, l], Provenance::Axiom(Axiom::Tseitin(k)));
                }
                a
            }
            G::Or(parts) => {
                let a = self.cnf.new_var().pos();
                let mut clause = vec![!a];
                for p in parts {
                    clause.push(self.lit_of(p, k));
                }
                self.emit(clause, Provenance::Axiom(Axiom::Tseitin(k)));
                a
            }
        }
    }
}

#[derive(Clone, Debug)]
struct Combo {
    conds: Vec<Lit>,
    vals: Vec<Val>,
}
