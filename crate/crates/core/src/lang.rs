//! Abstract syntax of problems and formulae, and their canonical rendering.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

/// Byte range into the submitted text plus the 1-based line/column of its
/// start.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub column: u32,
}

impl Span {
    pub fn slice<'a>(&self, text: &'a str) -> &'a str {
        &text[self.start..self.end]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SortKind {
    /// Size left to the model search.
    Open,
    Enum(Vec<String>),
    IntRange {
        lo: i64,
        hi: i64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortDecl {
    pub name: String,
    pub kind: SortKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredDecl {
    pub name: String,
    pub args: Vec<String>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuncDecl {
    pub name: String,
    pub args: Vec<String>,
    pub result: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NameDecl {
    pub name: String,
    pub sort: String,
    pub span: Span,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub predicates: Vec<PredDecl>,
    pub functions: Vec<FuncDecl>,
    pub names: Vec<NameDecl>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }

    pub fn apply(self, a: i64, b: i64) -> Option<i64> {
        match self {
            ArithOp::Add => a.checked_add(b),
            ArithOp::Sub => a.checked_sub(b),
            ArithOp::Mul => a.checked_mul(b),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Name(String),
    EnumLit(String),
    Int(i64),
    App(String, Vec<Term>),
    Arith(ArithOp, Box<Term>, Box<Term>),
    /// A formula written where a term was expected. Never well-typed; kept
    /// so the type checker can report it precisely.
    Formula(Box<Formula>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Binder {
    pub var: String,
    pub sort: Option<String>,
}

impl Binder {
    pub fn new(var: impl Into<String>) -> Self {
        Binder { var: var.into(), sort: None }
    }

    pub fn typed(var: impl Into<String>, sort: impl Into<String>) -> Self {
        Binder { var: var.into(), sort: Some(sort.into()) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Pred(String, Vec<Term>),
    Eq(Term, Term),
    Neq(Term, Term),
    Cmp(CmpOp, Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Binder, Box<Formula>),
    Exists(Binder, Box<Formula>),
    True,
    False,
}

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(b: Binder, f: Formula) -> Formula {
        Formula::Forall(b, Box::new(f))
    }

    pub fn exists(b: Binder, f: Formula) -> Formula {
        Formula::Exists(b, Box::new(f))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub formula: Formula,
    pub span: Span,
    pub index: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Problem {
    pub sorts: Vec<SortDecl>,
    pub vocab: Vocabulary,
    pub constraints: Vec<Constraint>,
}

// Binding strength used by both the parser and the renderer.
const PREC_IFF: u8 = 1;
const PREC_IMPLIES: u8 = 2;
const PREC_OR: u8 = 3;
const PREC_AND: u8 = 4;
const PREC_PREFIX: u8 = 5;
const PREC_ATOM: u8 = 6;

fn formula_prec(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => PREC_IFF,
        Formula::Implies(..) => PREC_IMPLIES,
        Formula::Or(..) => PREC_OR,
        Formula::And(..) => PREC_AND,
        Formula::Not(_) | Formula::Forall(..) | Formula::Exists(..) => PREC_PREFIX,
        _ => PREC_ATOM,
    }
}

fn term_prec(t: &Term) -> u8 {
    match t {
        Term::Arith(ArithOp::Add | ArithOp::Sub, ..) => 1,
        Term::Arith(ArithOp::Mul, ..) => 2,
        Term::Formula(f) if !matches!(**f, Formula::True | Formula::False) => 0,
        _ => 3,
    }
}

/// Canonical ASCII rendering with minimal parentheses.
pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f);
    out
}

pub fn render_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, t);
    out
}

fn write_wrapped_formula(out: &mut String, f: &Formula, parens: bool) {
    if parens {
        out.push('(');
        write_formula(out, f);
        out.push(')');
    } else {
        write_formula(out, f);
    }
}

fn write_binary(out: &mut String, prec: u8, right_assoc: bool, op: &str, l: &Formula, r: &Formula) {
    let (lp, rp) = (formula_prec(l), formula_prec(r));
    let l_parens = if right_assoc { lp <= prec } else { lp < prec };
    let r_parens = if right_assoc { rp < prec } else { rp <= prec };
    write_wrapped_formula(out, l, l_parens);
    let _ = write!(out, " {op} ");
    write_wrapped_formula(out, r, r_parens);
}

fn write_binder(out: &mut String, q: &str, b: &Binder) {
    out.push_str(q);
    out.push(' ');
    out.push_str(&b.var);
    if let Some(s) = &b.sort {
        out.push_str(": ");
        out.push_str(s);
    }
    out.push(' ');
}

fn write_formula(out: &mut String, f: &Formula) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Pred(p, args) => write_app(out, p, args),
        Formula::Eq(a, b) => write_relation(out, "=", a, b),
        Formula::Neq(a, b) => write_relation(out, "/=", a, b),
        Formula::Cmp(op, a, b) => write_relation(out, op.symbol(), a, b),
        Formula::Not(g) => {
            out.push('~');
            write_wrapped_formula(out, g, formula_prec(g) < PREC_PREFIX);
        }
        Formula::And(a, b) => write_binary(out, PREC_AND, false, "&", a, b),
        Formula::Or(a, b) => write_binary(out, PREC_OR, false, "|", a, b),
        Formula::Implies(a, b) => write_binary(out, PREC_IMPLIES, true, "->", a, b),
        Formula::Iff(a, b) => write_binary(out, PREC_IFF, false, "<->", a, b),
        Formula::Forall(b, g) | Formula::Exists(b, g) => {
            let q = if matches!(f, Formula::Forall(..)) { "ALL" } else { "SOME" };
            write_binder(out, q, b);
            write_wrapped_formula(out, g, formula_prec(g) < PREC_PREFIX);
        }
    }
}

fn write_app(out: &mut String, head: &str, args: &[Term]) {
    out.push_str(head);
    if args.is_empty() {
        return;
    }
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        match a {
            Term::Formula(g) => write_formula(out, g),
            _ => write_term(out, a),
        }
    }
    out.push(')');
}

fn write_relation(out: &mut String, op: &str, a: &Term, b: &Term) {
    // relations are non-associative: operands must bind tighter
    write_operand(out, a, 1);
    let _ = write!(out, " {op} ");
    write_operand(out, b, 1);
}

fn write_operand(out: &mut String, t: &Term, min_prec: u8) {
    if term_prec(t) < min_prec {
        out.push('(');
        match t {
            Term::Formula(g) => write_formula(out, g),
            _ => write_term(out, t),
        }
        out.push(')');
    } else {
        write_term(out, t);
    }
}

fn write_term(out: &mut String, t: &Term) {
    match t {
        Term::Var(x) | Term::Name(x) | Term::EnumLit(x) => out.push_str(x),
        Term::Int(n) => {
            let _ = write!(out, "{n}");
        }
        Term::App(f, args) => write_app(out, f, args),
        Term::Arith(op, a, b) => {
            let prec = term_prec(t);
            write_operand(out, a, prec);
            let _ = write!(out, " {} ", op.symbol());
            write_operand(out, b, prec + 1);
        }
        Term::Formula(g) => write_formula(out, g),
    }
}

/// Variables with at least one occurrence not bound by an enclosing
/// quantifier.
pub fn free_variables(f: &Formula) -> BTreeSet<String> {
    let mut free = BTreeSet::new();
    let mut bound = Vec::new();
    collect_free_formula(f, &mut bound, &mut free);
    free
}

fn collect_free_formula(f: &Formula, bound: &mut Vec<String>, free: &mut BTreeSet<String>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Pred(_, args) => args.iter().for_each(|a| collect_free_term(a, bound, free)),
        Formula::Eq(a, b) | Formula::Neq(a, b) | Formula::Cmp(_, a, b) => {
            collect_free_term(a, bound, free);
            collect_free_term(b, bound, free);
        }
        Formula::Not(g) => collect_free_formula(g, bound, free),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_free_formula(a, bound, free);
            collect_free_formula(b, bound, free);
        }
        Formula::Forall(b, g) | Formula::Exists(b, g) => {
            bound.push(b.var.clone());
            collect_free_formula(g, bound, free);
            bound.pop();
        }
    }
}

fn collect_free_term(t: &Term, bound: &mut Vec<String>, free: &mut BTreeSet<String>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(x) {
                free.insert(x.clone());
            }
        }
        Term::Name(_) | Term::EnumLit(_) | Term::Int(_) => {}
        Term::App(_, args) => args.iter().for_each(|a| collect_free_term(a, bound, free)),
        Term::Arith(_, a, b) => {
            collect_free_term(a, bound, free);
            collect_free_term(b, bound, free);
        }
        Term::Formula(g) => collect_free_formula(g, bound, free),
    }
}

/// Pretty-prints a whole problem in the three-section file format.
pub fn render_problem(p: &Problem) -> String {
    let mut out = String::from("Sorts:\n");
    for s in &p.sorts {
        match &s.kind {
            SortKind::Open => {
                let _ = writeln!(out, "  {}.", s.name);
            }
            SortKind::Enum(elems) => {
                let _ = writeln!(out, "  {} enum: {}.", s.name, elems.join(", "));
            }
            SortKind::IntRange { lo, hi } => {
                let _ = writeln!(out, "  {} int: {} .. {}.", s.name, lo, hi);
            }
        }
    }
    out.push_str("Vocabulary:\n");
    if !p.vocab.predicates.is_empty() {
        out.push_str("  predicate {\n");
        for d in &p.vocab.predicates {
            if d.args.is_empty() {
                let _ = writeln!(out, "    {}.", d.name);
            } else {
                let _ = writeln!(out, "    {}({}).", d.name, d.args.join(", "));
            }
        }
        out.push_str("  }\n");
    }
    if !p.vocab.functions.is_empty() {
        out.push_str("  function {\n");
        for d in &p.vocab.functions {
            let _ = writeln!(out, "    {}({}): {}.", d.name, d.args.join(", "), d.result);
        }
        out.push_str("  }\n");
    }
    for d in &p.vocab.names {
        let _ = writeln!(out, "  name {}: {}.", d.name, d.sort);
    }
    out.push_str("Constraints:\n");
    for c in &p.constraints {
        let _ = writeln!(out, "  {}.", render_formula(&c.formula));
    }
    out
}
