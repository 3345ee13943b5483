//! Finite interpretations and domain-size assignments.
//!
//! Elements of a sort of size `n` are the indices `0..n`. Open-sort element
//! `k` is shown as `sort@{k+1}`, enum elements by name and integer-sort
//! elements by their value, so domains of different sorts never share a
//! label except across integer sorts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::lang::SortKind;
use crate::symbols::{SortId, Symbols};

/// Domain size per sort, in declaration order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DomainAssignment {
    pub sizes: Vec<usize>,
}

impl DomainAssignment {
    pub fn size(&self, s: SortId) -> usize {
        self.sizes[s.0]
    }

    /// The sizes of the open sorts only, e.g. `(1,1,1)` for the Mary problem.
    pub fn open_sizes(&self, symbols: &Symbols) -> Vec<usize> {
        symbols.open_sorts().iter().map(|s| self.size(*s)).collect()
    }

    /// `person=1, animal=2, ...` over the open sorts, or `fixed` if there are
    /// none.
    pub fn describe(&self, symbols: &Symbols) -> String {
        let open = symbols.open_sorts();
        if open.is_empty() {
            return "fixed".into();
        }
        open.iter().map(|s| format!("{}={}", symbols.sort_name(*s), self.size(*s))).collect::<Vec<_>>().join(", ")
    }
}

/// Size of a sort that the search does not choose.
pub fn pinned_size(kind: &SortKind) -> Option<usize> {
    match kind {
        SortKind::Open => None,
        SortKind::Enum(e) => Some(e.len()),
        SortKind::IntRange { lo, hi } => usize::try_from(hi.checked_sub(*lo)?.checked_add(1)?).ok(),
    }
}

pub const DEFAULT_OPEN_BOUNDS: (usize, usize) = (1, 4);

/// Every domain assignment inside the box given by `bounds` (per open sort,
/// by name; missing sorts get [`DEFAULT_OPEN_BOUNDS`]), ordered by total
/// open-sort size and then by declaration order with earlier sorts growing
/// first: `(1,1,1), (2,1,1), (1,2,1), (1,1,2), (3,1,1), ...`.
pub fn size_vectors(symbols: &Symbols, bounds: &BTreeMap<String, (usize, usize)>) -> Vec<DomainAssignment> {
    let mut ranges = Vec::new();
    for info in &symbols.sorts {
        let r = match pinned_size(&info.kind) {
            Some(n) => (n, n),
            None => {
                let (lo, hi) = bounds.get(&info.name).copied().unwrap_or(DEFAULT_OPEN_BOUNDS);
                (lo.max(1), hi)
            }
        };
        if r.0 > r.1 {
            return Vec::new();
        }
        ranges.push(r);
    }
    let mut out = vec![Vec::new()];
    for &(lo, hi) in &ranges {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| (lo..=hi).map(move |n| [prefix.clone(), vec![n]].concat()))
            .collect();
    }
    let open = symbols.open_sorts();
    let key = |v: &Vec<usize>| -> (usize, std::cmp::Reverse<Vec<usize>>) {
        let sizes: Vec<usize> = open.iter().map(|s| v[s.0]).collect();
        (sizes.iter().sum(), std::cmp::Reverse(sizes))
    };
    out.sort_by_key(key);
    out.into_iter().map(|sizes| DomainAssignment { sizes }).collect()
}

/// Number of assignments [`size_vectors`] would produce, without building
/// them.
pub fn count_size_vectors(symbols: &Symbols, bounds: &BTreeMap<String, (usize, usize)>) -> u128 {
    let mut n: u128 = 1;
    for info in &symbols.sorts {
        if matches!(info.kind, SortKind::Open) {
            let (lo, hi) = bounds.get(&info.name).copied().unwrap_or(DEFAULT_OPEN_BOUNDS);
            let lo = lo.max(1);
            n = n.saturating_mul(if hi >= lo { (hi - lo + 1) as u128 } else { 0 });
        }
    }
    n
}

/// Display labels for the elements of one sort.
pub fn element_labels(symbols: &Symbols, s: SortId, size: usize) -> Vec<String> {
    let info = symbols.sort(s);
    match &info.kind {
        SortKind::Open => (1..=size).map(|k| format!("{}@{k}", info.name)).collect(),
        SortKind::Enum(e) => e.clone(),
        SortKind::IntRange { lo, .. } => (0..size as i64).map(|k| (lo + k).to_string()).collect(),
    }
}

/// A finite structure for the vocabulary of a problem.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interpretation {
    pub domains: DomainAssignment,
    pub names: BTreeMap<String, usize>,
    /// Total maps from argument tuples to results.
    pub functions: BTreeMap<String, BTreeMap<Vec<usize>, usize>>,
    pub predicates: BTreeMap<String, BTreeSet<Vec<usize>>>,
}

/// All tuples over the given sorts, in lexicographic order.
pub fn arg_tuples(sorts: &[SortId], da: &DomainAssignment) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for s in sorts {
        let n = da.size(*s);
        out = out.into_iter().flat_map(|t: Vec<usize>| (0..n).map(move |e| [t.clone(), vec![e]].concat())).collect();
    }
    out
}

impl Interpretation {
    /// Checks the well-formedness conditions: every name has a value in its
    /// sort, function tables are total with values in the result sort, and
    /// predicate tuples lie in the argument sorts.
    pub fn validate(&self, symbols: &Symbols) -> Result<(), String> {
        let da = &self.domains;
        if da.sizes.len() != symbols.sorts.len() {
            return Err(format!("{} domain sizes for {} sorts", da.sizes.len(), symbols.sorts.len()));
        }
        for (i, info) in symbols.sorts.iter().enumerate() {
            if da.sizes[i] == 0 {
                return Err(format!("sort {} is empty", info.name));
            }
            if let Some(n) = pinned_size(&info.kind) {
                if da.sizes[i] != n {
                    return Err(format!("sort {} must have size {n}", info.name));
                }
            }
        }
        if self.names.len() != symbols.names.len() {
            return Err("name valuation does not cover exactly the declared names".into());
        }
        for n in &symbols.names {
            match self.names.get(&n.name) {
                Some(&v) if v < da.size(n.sort) => {}
                _ => return Err(format!("name {} has no value in its sort", n.name)),
            }
        }
        if self.functions.len() != symbols.funcs.len() {
            return Err("function tables do not cover exactly the declared functions".into());
        }
        for f in &symbols.funcs {
            let table = self.functions.get(&f.name).ok_or_else(|| format!("no table for {}", f.name))?;
            let tuples = arg_tuples(&f.args, da);
            if table.len() != tuples.len() || !tuples.iter().all(|t| table.contains_key(t)) {
                return Err(format!("table for {} is not total", f.name));
            }
            if table.values().any(|&v| v >= da.size(f.result)) {
                return Err(format!("table for {} has a value outside {}", f.name, symbols.sort_name(f.result)));
            }
        }
        if self.predicates.len() != symbols.preds.len() {
            return Err("predicate extensions do not cover exactly the declared predicates".into());
        }
        for p in &symbols.preds {
            let ext = self.predicates.get(&p.name).ok_or_else(|| format!("no extension for {}", p.name))?;
            for t in ext {
                if t.len() != p.args.len() || t.iter().zip(&p.args).any(|(&e, s)| e >= da.size(*s)) {
                    return Err(format!("extension of {} has an ill-sorted tuple", p.name));
                }
            }
        }
        Ok(())
    }

    pub fn view(&self, symbols: &Symbols) -> ModelView {
        let da = &self.domains;
        let labels: Vec<Vec<String>> =
            (0..symbols.sorts.len()).map(|i| element_labels(symbols, SortId(i), da.sizes[i])).collect();
        let label = |s: SortId, e: usize| labels[s.0][e].clone();
        let domains = symbols
            .sorts
            .iter()
            .enumerate()
            .map(|(i, s)| DomainView { sort: s.name.clone(), elements: labels[i].clone() })
            .collect();
        let names = symbols
            .names
            .iter()
            .map(|n| NameView { name: n.name.clone(), value: label(n.sort, self.names[&n.name]) })
            .collect();
        let functions = symbols
            .funcs
            .iter()
            .map(|f| FunctionView {
                name: f.name.clone(),
                rows: self.functions[&f.name]
                    .iter()
                    .map(|(args, v)| FunctionRow {
                        args: args.iter().zip(&f.args).map(|(&e, &s)| label(s, e)).collect(),
                        value: label(f.result, *v),
                    })
                    .collect(),
            })
            .collect();
        let predicates = symbols
            .preds
            .iter()
            .map(|p| PredicateView {
                name: p.name.clone(),
                arity: p.args.len(),
                tuples: self.predicates[&p.name]
                    .iter()
                    .map(|t| t.iter().zip(&p.args).map(|(&e, &s)| label(s, e)).collect())
                    .collect(),
            })
            .collect();
        ModelView { sizes: da.describe(symbols), domains, names, functions, predicates }
    }

    /// Plain-text tables: `Mary = person@1`, `hue(animal@1) = green`, and
    /// one line per predicate listing its true tuples.
    pub fn render(&self, symbols: &Symbols) -> String {
        self.view(symbols).render()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DomainView {
    pub sort: String,
    pub elements: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NameView {
    pub name: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FunctionRow {
    pub args: Vec<String>,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FunctionView {
    pub name: String,
    pub rows: Vec<FunctionRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PredicateView {
    pub name: String,
    pub arity: usize,
    pub tuples: Vec<Vec<String>>,
}

/// Label-level presentation of an interpretation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ModelView {
    pub sizes: String,
    pub domains: Vec<DomainView>,
    pub names: Vec<NameView>,
    pub functions: Vec<FunctionView>,
    pub predicates: Vec<PredicateView>,
}

impl ModelView {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for d in &self.domains {
            let _ = writeln!(out, "{} = {{{}}}", d.sort, d.elements.join(", "));
        }
        for n in &self.names {
            let _ = writeln!(out, "{} = {}", n.name, n.value);
        }
        for f in &self.functions {
            for r in &f.rows {
                let _ = writeln!(out, "{}({}) = {}", f.name, r.args.join(", "), r.value);
            }
        }
        for p in &self.predicates {
            if p.arity == 0 {
                let _ = writeln!(out, "{} is {}", p.name, !p.tuples.is_empty());
                continue;
            }
            let tuples: Vec<String> = p
                .tuples
                .iter()
                .map(|t| if t.len() == 1 { t[0].clone() } else { format!("({})", t.join(", ")) })
                .collect();
            let _ = writeln!(out, "{} = {{{}}}", p.name, tuples.join(", "));
        }
        out
    }
}
