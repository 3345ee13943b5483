//! Resolved declarations. Every identifier has exactly one role.

use std::collections::HashMap;

use crate::diagnostic::Diagnostic;
use crate::lang::{Problem, SortKind, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SortId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortInfo {
    pub name: String,
    pub kind: SortKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredSig {
    pub name: String,
    pub args: Vec<SortId>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuncSig {
    pub name: String,
    pub args: Vec<SortId>,
    pub result: SortId,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NameSig {
    pub name: String,
    pub sort: SortId,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    Sort(SortId),
    Predicate(usize),
    Function(usize),
    Name(usize),
    EnumElem(SortId, usize),
}

impl Symbol {
    pub fn role(self) -> &'static str {
        match self {
            Symbol::Sort(_) => "sort",
            Symbol::Predicate(_) => "predicate",
            Symbol::Function(_) => "function",
            Symbol::Name(_) => "name",
            Symbol::EnumElem(..) => "enumeration element",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Symbols {
    pub sorts: Vec<SortInfo>,
    pub preds: Vec<PredSig>,
    pub funcs: Vec<FuncSig>,
    pub names: Vec<NameSig>,
    table: HashMap<String, Symbol>,
}

impl Symbols {
    /// Validates and indexes the declarations of `problem`. Declarations
    /// with errors are left out of the table.
    pub fn build(problem: &Problem, source: &str) -> (Symbols, Vec<Diagnostic>) {
        let mut s = Symbols::default();
        let mut errors = Vec::new();
        let mut err = |span: Span, msg: String| {
            errors.push(Diagnostic::error(span.line, span.column, msg).with_source(source));
        };

        for d in &problem.sorts {
            if let Some(prev) = s.table.get(&d.name) {
                err(d.span, format!("`{}` is already declared as a {}", d.name, prev.role()));
                continue;
            }
            match &d.kind {
                SortKind::IntRange { lo, hi } if lo > hi => {
                    err(d.span, format!("integer sort `{}` has an empty range {lo} .. {hi}", d.name));
                    continue;
                }
                SortKind::Enum(elems) => {
                    let mut clash = false;
                    for (i, e) in elems.iter().enumerate() {
                        if elems[..i].contains(e) {
                            err(d.span, format!("element `{e}` appears twice in sort `{}`", d.name));
                            clash = true;
                        } else if let Some(prev) = s.table.get(e) {
                            err(
                                d.span,
                                format!("element `{e}` of sort `{}` is already declared as a {}", d.name, prev.role()),
                            );
                            clash = true;
                        } else if *e == d.name {
                            err(d.span, format!("element `{e}` has the same name as its sort"));
                            clash = true;
                        }
                    }
                    if clash {
                        continue;
                    }
                    let id = SortId(s.sorts.len());
                    for (i, e) in elems.iter().enumerate() {
                        s.table.insert(e.clone(), Symbol::EnumElem(id, i));
                    }
                }
                _ => {}
            }
            let id = SortId(s.sorts.len());
            s.table.insert(d.name.clone(), Symbol::Sort(id));
            s.sorts.push(SortInfo { name: d.name.clone(), kind: d.kind.clone(), span: d.span });
        }

        let resolve = |s: &Symbols, name: &str, span: Span, errors: &mut Vec<Diagnostic>| -> Option<SortId> {
            match s.table.get(name) {
                Some(Symbol::Sort(id)) => Some(*id),
                Some(other) => {
                    errors.push(
                        Diagnostic::error(
                            span.line,
                            span.column,
                            format!("`{name}` is a {}, not a sort", other.role()),
                        )
                        .with_source(source),
                    );
                    None
                }
                None => {
                    errors.push(
                        Diagnostic::error(span.line, span.column, format!("undeclared sort `{name}`"))
                            .with_source(source)
                            .with_hints(&["declare every sort in the Sorts section"]),
                    );
                    None
                }
            }
        };
        let declared_twice = |s: &Symbols, name: &str, span: Span, errors: &mut Vec<Diagnostic>| -> bool {
            if let Some(prev) = s.table.get(name) {
                errors.push(
                    Diagnostic::error(
                        span.line,
                        span.column,
                        format!("`{name}` is already declared as a {}", prev.role()),
                    )
                    .with_source(source),
                );
                true
            } else {
                false
            }
        };

        for d in &problem.vocab.predicates {
            if declared_twice(&s, &d.name, d.span, &mut errors) {
                continue;
            }
            let args: Vec<Option<SortId>> = d.args.iter().map(|a| resolve(&s, a, d.span, &mut errors)).collect();
            if let Some(args) = args.into_iter().collect::<Option<Vec<_>>>() {
                s.table.insert(d.name.clone(), Symbol::Predicate(s.preds.len()));
                s.preds.push(PredSig { name: d.name.clone(), args, span: d.span });
            }
        }
        for d in &problem.vocab.functions {
            if declared_twice(&s, &d.name, d.span, &mut errors) {
                continue;
            }
            let args: Vec<Option<SortId>> = d.args.iter().map(|a| resolve(&s, a, d.span, &mut errors)).collect();
            let result = resolve(&s, &d.result, d.span, &mut errors);
            if let (Some(args), Some(result)) = (args.into_iter().collect::<Option<Vec<_>>>(), result) {
                s.table.insert(d.name.clone(), Symbol::Function(s.funcs.len()));
                s.funcs.push(FuncSig { name: d.name.clone(), args, result, span: d.span });
            }
        }
        for d in &problem.vocab.names {
            if declared_twice(&s, &d.name, d.span, &mut errors) {
                continue;
            }
            if let Some(sort) = resolve(&s, &d.sort, d.span, &mut errors) {
                s.table.insert(d.name.clone(), Symbol::Name(s.names.len()));
                s.names.push(NameSig { name: d.name.clone(), sort, span: d.span });
            }
        }
        (s, errors)
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.table.get(name).copied()
    }

    pub fn sort_id(&self, name: &str) -> Option<SortId> {
        match self.lookup(name) {
            Some(Symbol::Sort(id)) => Some(id),
            _ => None,
        }
    }

    pub fn sort(&self, id: SortId) -> &SortInfo {
        &self.sorts[id.0]
    }

    pub fn sort_name(&self, id: SortId) -> &str {
        &self.sorts[id.0].name
    }

    pub fn is_int(&self, id: SortId) -> bool {
        matches!(self.sorts[id.0].kind, SortKind::IntRange { .. })
    }

    pub fn is_open(&self, id: SortId) -> bool {
        matches!(self.sorts[id.0].kind, SortKind::Open)
    }

    pub fn int_sorts(&self) -> Vec<SortId> {
        (0..self.sorts.len()).map(SortId).filter(|&s| self.is_int(s)).collect()
    }

    pub fn open_sorts(&self) -> Vec<SortId> {
        (0..self.sorts.len()).map(SortId).filter(|&s| self.is_open(s)).collect()
    }

    pub fn enum_elem(&self, name: &str) -> Option<(SortId, usize)> {
        match self.lookup(name) {
            Some(Symbol::EnumElem(s, i)) => Some((s, i)),
            _ => None,
        }
    }

    pub fn pred(&self, name: &str) -> Option<&PredSig> {
        match self.lookup(name) {
            Some(Symbol::Predicate(i)) => Some(&self.preds[i]),
            _ => None,
        }
    }

    pub fn func(&self, name: &str) -> Option<&FuncSig> {
        match self.lookup(name) {
            Some(Symbol::Function(i)) => Some(&self.funcs[i]),
            _ => None,
        }
    }

    pub fn name(&self, name: &str) -> Option<&NameSig> {
        match self.lookup(name) {
            Some(Symbol::Name(i)) => Some(&self.names[i]),
            _ => None,
        }
    }
}
