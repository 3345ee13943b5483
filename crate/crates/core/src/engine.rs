//! The check and solve pipeline.
//!
//! Solving walks the size vectors in order, grounds at each, and enumerates
//! models projected onto the ground atoms until `max_models` are found, the
//! bounded space is exhausted, or the deadline passes. Every model is
//! decoded and re-checked with the evaluator before it is reported.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use lff_sat::{enumerate_models, Budget};
use serde::Serialize;

use crate::diagnostic::{render_all, Diagnostic};
use crate::evaluator::check_constraints;
use crate::grounder::{ground, GroundError, GroundOptions, DEFAULT_SIZE_CAP};
use crate::interp::{size_vectors, DomainAssignment, Interpretation, ModelView, DEFAULT_OPEN_BOUNDS};
use crate::parser::{parse_problem, parse_sections};
use crate::typecheck::{check, TypedProblem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Check,
    Solve,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub mode: Mode,
    pub max_models: usize,
    /// Per open sort, by name. Sorts not listed use `default_bounds`.
    pub bounds: BTreeMap<String, (usize, usize)>,
    pub default_bounds: (usize, usize),
    pub deadline: Duration,
    pub symmetry_breaking: bool,
    pub size_cap: usize,
    /// Keep the DIMACS text of the first grounding.
    pub capture_dimacs: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            mode: Mode::Solve,
            max_models: 2,
            bounds: BTreeMap::new(),
            default_bounds: DEFAULT_OPEN_BOUNDS,
            deadline: Duration::from_secs(10),
            symmetry_breaking: false,
            size_cap: DEFAULT_SIZE_CAP,
            capture_dimacs: false,
        }
    }
}

impl SolveOptions {
    pub fn check() -> Self {
        SolveOptions { mode: Mode::Check, ..Default::default() }
    }

    /// Bounds for every open sort of `tp`, defaults filled in.
    pub fn effective_bounds(&self, tp: &TypedProblem) -> BTreeMap<String, (usize, usize)> {
        tp.symbols
            .open_sorts()
            .iter()
            .map(|s| {
                let name = tp.symbols.sort_name(*s).to_string();
                let b = self.bounds.get(&name).copied().unwrap_or(self.default_bounds);
                (name, b)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelGroup {
    pub domains: DomainAssignment,
    pub models: Vec<Interpretation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OutcomeKind {
    /// Check mode found no errors.
    Ok,
    InputErrors(Vec<Diagnostic>),
    NoSolution {
        searched: Vec<DomainAssignment>,
        complete: bool,
    },
    Solutions {
        groups: Vec<ModelGroup>,
        unique: bool,
        exhausted: bool,
    },
    Timeout {
        searched: Vec<DomainAssignment>,
        groups: Vec<ModelGroup>,
    },
    /// A decoded model failed the independent check; never expected.
    InternalError(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunStats {
    pub sizes: String,
    pub atoms: u32,
    pub aux_vars: u32,
    pub clauses: usize,
    pub conflicts: u64,
    pub models: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Stats {
    pub runs: Vec<RunStats>,
    pub conflicts: u64,
    pub wall_ms: u64,
    /// The open-sort bounds searched.
    pub bounds: BTreeMap<String, (usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub kind: OutcomeKind,
    pub warnings: Vec<Diagnostic>,
    pub stats: Stats,
    /// Present once type checking has succeeded.
    pub typed: Option<TypedProblem>,
    pub source: String,
    pub dimacs: Option<String>,
    /// Remarks such as a size limit that cut the search short.
    pub notes: Vec<String>,
}

impl Outcome {
    fn new(source: String) -> Self {
        Outcome {
            kind: OutcomeKind::Ok,
            warnings: Vec::new(),
            stats: Stats::default(),
            typed: None,
            source,
            dimacs: None,
            notes: Vec::new(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            OutcomeKind::Ok => "ok",
            OutcomeKind::InputErrors(_) => "input-errors",
            OutcomeKind::NoSolution { .. } => "no-solution",
            OutcomeKind::Solutions { .. } => "solutions",
            OutcomeKind::Timeout { .. } => "timeout",
            OutcomeKind::InternalError(_) => "internal-error",
        }
    }

    pub fn models(&self) -> Vec<&Interpretation> {
        match &self.kind {
            OutcomeKind::Solutions { groups, .. } | OutcomeKind::Timeout { groups, .. } => {
                groups.iter().flat_map(|g| g.models.iter()).collect()
            }
            _ => Vec::new(),
        }
    }

    pub fn model_count(&self) -> usize {
        self.models().len()
    }

    pub fn report(&self) -> OutcomeReport {
        let describe = |da: &DomainAssignment| match &self.typed {
            Some(tp) => da.describe(&tp.symbols),
            None => String::new(),
        };
        let groups = |gs: &[ModelGroup]| -> Vec<GroupReport> {
            gs.iter()
                .map(|g| GroupReport {
                    sizes: describe(&g.domains),
                    models: match &self.typed {
                        Some(tp) => g.models.iter().map(|m| m.view(&tp.symbols)).collect(),
                        None => Vec::new(),
                    },
                })
                .collect()
        };
        let mut r = OutcomeReport {
            kind: self.kind_name(),
            diagnostics: Vec::new(),
            warnings: self.warnings.clone(),
            searched: Vec::new(),
            complete: None,
            groups: Vec::new(),
            model_count: self.model_count(),
            unique: None,
            exhausted: None,
            message: None,
            notes: self.notes.clone(),
            text: self.render(),
            stats: self.stats.clone(),
        };
        match &self.kind {
            OutcomeKind::Ok => {}
            OutcomeKind::InputErrors(d) => r.diagnostics = d.clone(),
            OutcomeKind::NoSolution { searched, complete } => {
                r.searched = searched.iter().map(describe).collect();
                r.complete = Some(*complete);
                r.message = Some("No solution found".into());
            }
            OutcomeKind::Solutions { groups: gs, unique, exhausted } => {
                r.groups = groups(gs);
                r.unique = Some(*unique);
                r.exhausted = Some(*exhausted);
            }
            OutcomeKind::Timeout { searched, groups: gs } => {
                r.searched = searched.iter().map(describe).collect();
                r.groups = groups(gs);
                r.message = Some("The solver ran out of time".into());
            }
            OutcomeKind::InternalError(m) => r.message = Some(m.clone()),
        }
        r
    }

    /// Plain-text rendering for terminals.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let describe =
            |da: &DomainAssignment| self.typed.as_ref().map(|tp| da.describe(&tp.symbols)).unwrap_or_default();
        let write_groups = |out: &mut String, groups: &[ModelGroup]| {
            let mut n = 0;
            for g in groups {
                let _ = writeln!(out, "Domain sizes: {}", describe(&g.domains));
                for m in &g.models {
                    n += 1;
                    let _ = writeln!(out, "\nModel {n}:");
                    if let Some(tp) = &self.typed {
                        for line in m.render(&tp.symbols).lines() {
                            let _ = writeln!(out, "  {line}");
                        }
                    }
                }
                out.push('\n');
            }
        };
        match &self.kind {
            OutcomeKind::Ok => out.push_str("No errors found.\n"),
            OutcomeKind::InputErrors(d) => out.push_str(&render_all(d)),
            OutcomeKind::NoSolution { searched, complete } => {
                out.push_str("No solution found\n");
                let _ = writeln!(
                    out,
                    "Searched {} domain size assignment{}{}",
                    searched.len(),
                    if searched.len() == 1 { "" } else { "s" },
                    if *complete { " (all within the bounds)." } else { " (the search was cut short)." }
                );
            }
            OutcomeKind::Solutions { groups, unique, exhausted } => {
                write_groups(&mut out, groups);
                let n: usize = groups.iter().map(|g| g.models.len()).sum();
                if *unique {
                    out.push_str("The model is unique within the searched bounds.\n");
                } else if *exhausted {
                    let _ = writeln!(out, "These are all {n} models within the searched bounds.");
                } else {
                    let _ = writeln!(out, "Found {n} model{}; there may be more.", if n == 1 { "" } else { "s" });
                }
            }
            OutcomeKind::Timeout { groups, .. } => {
                write_groups(&mut out, groups);
                out.push_str("The solver ran out of time.\n");
            }
            OutcomeKind::InternalError(m) => {
                let _ = writeln!(out, "Internal error: {m}");
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "Note: {n}");
        }
        if !self.warnings.is_empty() && !matches!(self.kind, OutcomeKind::InputErrors(_)) {
            out.push('\n');
            out.push_str(&render_all(&self.warnings));
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GroupReport {
    pub sizes: String,
    pub models: Vec<ModelView>,
}

/// Serialisable form of an [`Outcome`].
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OutcomeReport {
    pub kind: &'static str,
    pub diagnostics: Vec<Diagnostic>,
    pub warnings: Vec<Diagnostic>,
    pub searched: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complete: Option<bool>,
    pub groups: Vec<GroupReport>,
    pub model_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unique: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhausted: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub notes: Vec<String>,
    pub text: String,
    pub stats: Stats,
}

/// Parses and checks; on success the typed problem, otherwise the outcome to
/// report.
pub fn prepare(text: &str) -> Result<TypedProblem, Outcome> {
    let mut out = Outcome::new(text.to_string());
    let problem = match parse_problem(text) {
        Ok(p) => p,
        Err(d) => {
            out.kind = OutcomeKind::InputErrors(d);
            return Err(out);
        }
    };
    match check(&problem, text) {
        Ok(tp) => Ok(tp),
        Err(d) => {
            out.kind = OutcomeKind::InputErrors(d);
            Err(out)
        }
    }
}

pub fn run_sections(sorts: &str, vocabulary: &str, constraints: &str, opts: &SolveOptions) -> Outcome {
    let (text, _) = parse_sections(sorts, vocabulary, constraints);
    run(&text, opts)
}

pub fn run(text: &str, opts: &SolveOptions) -> Outcome {
    let start = Instant::now();
    let mut out = match prepare(text) {
        Ok(tp) => {
            let mut out = Outcome::new(text.to_string());
            out.warnings = tp.warnings.clone();
            out.typed = Some(tp);
            out
        }
        Err(mut o) => {
            o.stats.wall_ms = start.elapsed().as_millis() as u64;
            return o;
        }
    };
    if opts.mode == Mode::Solve {
        solve_typed(&mut out, opts, start);
    }
    out.stats.wall_ms = start.elapsed().as_millis() as u64;
    out
}

fn solve_typed(out: &mut Outcome, opts: &SolveOptions, start: Instant) {
    let tp = out.typed.clone().expect("typed problem");
    let deadline = start + opts.deadline;
    let bounds = opts.effective_bounds(&tp);
    out.stats.bounds = bounds.clone();
    let max_models = opts.max_models.max(1);
    let mut groups: Vec<ModelGroup> = Vec::new();
    let mut searched = Vec::new();
    let mut found = 0;
    let mut complete = true;
    let gopts = GroundOptions {
        size_cap: opts.size_cap,
        symmetry_breaking: opts.symmetry_breaking,
        selectors: false,
        deadline: Some(deadline),
    };
    for da in size_vectors(&tp.symbols, &bounds) {
        if Instant::now() >= deadline {
            out.kind = OutcomeKind::Timeout { searched, groups };
            return;
        }
        let g = match ground(&tp, &da, &gopts) {
            Ok(g) => g,
            Err(GroundError::Timeout) => {
                out.kind = OutcomeKind::Timeout { searched, groups };
                return;
            }
            Err(e @ GroundError::TooLarge { .. }) => {
                // larger assignments only get bigger; stop here
                out.notes.push(format!("stopped at domain sizes {}: {e}", da.describe(&tp.symbols)));
                complete = false;
                break;
            }
        };
        if opts.capture_dimacs && out.dimacs.is_none() {
            out.dimacs = Some(format!("c domain sizes {}\n{}", da.describe(&tp.symbols), g.to_dimacs(&tp.symbols)));
        }
        let budget = Budget::with_deadline(deadline);
        let e = enumerate_models(&g.cnf, &g.atoms.projection(), max_models - found, &budget);
        searched.push(da.clone());
        out.stats.conflicts += e.conflicts;
        out.stats.runs.push(RunStats {
            sizes: da.describe(&tp.symbols),
            atoms: g.atoms.num_atoms(),
            aux_vars: g.num_aux(),
            clauses: g.cnf.clauses.len(),
            conflicts: e.conflicts,
            models: e.models.len(),
        });
        let mut models = Vec::with_capacity(e.models.len());
        for m in &e.models {
            let it = match g.decode(m, &tp.symbols) {
                Ok(it) => it,
                Err(msg) => {
                    out.kind = OutcomeKind::InternalError(format!("decoding failed: {msg}"));
                    return;
                }
            };
            if let Some(k) = check_constraints(&it, &tp).iter().position(|ok| !ok) {
                out.kind = OutcomeKind::InternalError(format!("a decoded model violates constraint {k}"));
                return;
            }
            models.push(it);
        }
        found += models.len();
        if !models.is_empty() {
            groups.push(ModelGroup { domains: da.clone(), models });
        }
        if e.unknown.is_some() {
            out.kind = OutcomeKind::Timeout { searched, groups };
            return;
        }
        if found >= max_models && !e.exhausted {
            complete = false;
            break;
        }
        if found >= max_models {
            // this assignment is exhausted but later ones may hold more
            complete = false;
            break;
        }
    }
    out.kind = if groups.is_empty() {
        OutcomeKind::NoSolution { searched, complete }
    } else {
        let exhausted = complete;
        OutcomeKind::Solutions { groups, unique: exhausted && found == 1, exhausted }
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = "Sorts:\n c enum: a, b.\nVocabulary:\n predicate { p(c). }\nConstraints:\n";

    fn solve(text: &str, max_models: usize) -> Outcome {
        run(text, &SolveOptions { max_models, ..Default::default() })
    }

    #[test]
    fn check_mode_stops_early() {
        let o = run(&format!("{TOY} p(a).\n"), &SolveOptions::check());
        assert_eq!(o.kind, OutcomeKind::Ok);
        assert!(o.stats.runs.is_empty());
    }

    #[test]
    fn unique_and_ambiguous() {
        let o = solve(&format!("{TOY} p(a).\n ~p(b).\n"), 2);
        let OutcomeKind::Solutions { unique, exhausted, .. } = o.kind else { panic!("{:?}", o.kind) };
        assert!(unique && exhausted);
        let o = solve(&format!("{TOY} p(a).\n"), 2);
        let OutcomeKind::Solutions { unique, exhausted, ref groups } = o.kind else { panic!() };
        assert!(!unique && !exhausted);
        assert_eq!(groups[0].models.len(), 2);
        let o = solve(&format!("{TOY} p(a).\n"), 10);
        let OutcomeKind::Solutions { unique, exhausted, .. } = o.kind else { panic!() };
        assert!(!unique && exhausted);
    }

    #[test]
    fn contradiction_has_no_solution() {
        let o = solve(&format!("{TOY} p(a).\n ~p(a).\n"), 2);
        assert_eq!(
            o.kind,
            OutcomeKind::NoSolution { searched: vec![DomainAssignment { sizes: vec![2] }], complete: true }
        );
        assert!(o.render().starts_with("No solution found\n"));
    }

    #[test]
    fn searches_open_sizes_in_order() {
        // needs three distinct elements
        let text = "Sorts:\n s.\nVocabulary:\n name a: s.\n name b: s.\n name c: s.\nConstraints:\n a /= b & b /= c & a /= c.\n";
        let o = run(text, &SolveOptions { max_models: 1, symmetry_breaking: true, ..Default::default() });
        let OutcomeKind::Solutions { groups, .. } = &o.kind else { panic!() };
        assert_eq!(groups[0].domains.sizes, vec![3]);
        assert_eq!(o.stats.runs.len(), 3);
        let rendered = o.render();
        assert!(rendered.contains("a = s@1\n"), "{rendered}");
        assert!(rendered.contains("c = s@3\n"), "{rendered}");
    }

    #[test]
    fn input_errors_are_values() {
        let o = solve("Sorts:\n s.\nVocabulary:\nConstraints:\n p(.\n", 2);
        assert!(matches!(o.kind, OutcomeKind::InputErrors(_)));
        assert!(o.render().starts_with("Input error on line 5"));
    }

    #[test]
    fn size_cap_stops_search() {
        let text = "Sorts:\n s.\nVocabulary:\n predicate { r(s, s). }\nConstraints:\n ALL x ~r(x, x).\n false.\n";
        let o = run(text, &SolveOptions { size_cap: 5, ..Default::default() });
        let OutcomeKind::NoSolution { complete, searched } = &o.kind else { panic!("{:?}", o.kind) };
        assert!(!complete);
        assert_eq!(searched.len(), 2);
        assert_eq!(o.notes.len(), 1);
    }

    #[test]
    fn zero_deadline_times_out() {
        let o = run(&format!("{TOY} p(a).\n"), &SolveOptions { deadline: Duration::ZERO, ..Default::default() });
        assert!(matches!(o.kind, OutcomeKind::Timeout { .. }));
    }
}
