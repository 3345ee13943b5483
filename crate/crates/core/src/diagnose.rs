//! Minimal unsatisfiable cores, at the level of constraints and of clauses,
//! and approximate solutions that violate as few constraints as possible.
//!
//! Everything happens at one domain assignment: the first one a solve
//! searched without finding a model.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use lff_sat::{at_most_k, Budget, Cnf, Lit, SatResult, Solver, Var};
use serde::Serialize;

use crate::diagnostic::{render_all, Diagnostic};
use crate::engine::{run, Mode, OutcomeKind, SolveOptions};
use crate::evaluator::check_constraints;
use crate::grounder::{ground, GroundOptions, Grounding, Provenance};
use crate::interp::{DomainAssignment, Interpretation, ModelView};
use crate::typecheck::TypedProblem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagnoseMode {
    /// Constraint-level core.
    Mus,
    /// Clause-level core of the compiled problem.
    Clauses,
    Approx,
}

impl std::str::FromStr for DiagnoseMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mus" => Ok(DiagnoseMode::Mus),
            "clauses" => Ok(DiagnoseMode::Clauses),
            "approx" => Ok(DiagnoseMode::Approx),
            _ => Err(format!("unknown diagnosis mode `{s}` (expected mus, clauses or approx)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreClause {
    pub id: usize,
    pub literals: Vec<Lit>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReportKind {
    HighLevelMus { constraints: Vec<usize> },
    LowLevelMus { clauses: Vec<CoreClause> },
    Approximate { interp: Interpretation, violated: Vec<usize>, satisfied_count: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagnosisReport {
    pub kind: ReportKind,
    pub domains: DomainAssignment,
    /// Cores: minimality was verified. Approximations: no smaller violation
    /// count is possible. False when the budget ran out first.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagnoseError {
    /// The constraints have a model at this domain assignment.
    NothingToDiagnose,
    Timeout,
    Internal(String),
}

impl std::fmt::Display for DiagnoseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DiagnoseError::NothingToDiagnose => f.write_str("nothing to diagnose"),
            DiagnoseError::Timeout => f.write_str("the diagnosis ran out of time"),
            DiagnoseError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

fn grounding_with_selectors(
    tp: &TypedProblem,
    da: &DomainAssignment,
    deadline: Instant,
) -> Result<Grounding, DiagnoseError> {
    let opts = GroundOptions { selectors: true, deadline: Some(deadline), ..Default::default() };
    ground(tp, da, &opts).map_err(|e| match e {
        crate::grounder::GroundError::Timeout => DiagnoseError::Timeout,
        other => DiagnoseError::Internal(other.to_string()),
    })
}

/// Deletion-based shrinking of a failed-assumption set. Each UNSAT answer
/// also replaces the working set by its own failed assumptions, which are
/// never larger. Returns the core and whether minimality was established.
fn shrink(solver: &mut Solver, initial: Vec<Lit>, budget: &Budget) -> (Vec<Lit>, bool) {
    let mut core = initial;
    let mut i = 0;
    while i < core.len() {
        let trial: Vec<Lit> = core.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, l)| *l).collect();
        match solver.solve_with(&trial, budget) {
            SatResult::Unsat { failed } => {
                // keep order stable so `i` still points past kept elements
                core = trial.into_iter().filter(|l| failed.contains(l)).collect();
            }
            SatResult::Sat(_) => i += 1,
            SatResult::Unknown(_) => return (core, false),
        }
    }
    (core, true)
}

/// The constraint-level MUS at `da`.
pub fn high_level_mus(
    tp: &TypedProblem,
    da: &DomainAssignment,
    deadline: Instant,
) -> Result<DiagnosisReport, DiagnoseError> {
    let g = grounding_with_selectors(tp, da, deadline)?;
    let budget = Budget::with_deadline(deadline);
    let mut solver = Solver::from_cnf(&g.cnf);
    let all: Vec<Lit> = g.selectors.iter().map(|s| s.pos()).collect();
    let failed = match solver.solve_with(&all, &budget) {
        SatResult::Sat(_) => return Err(DiagnoseError::NothingToDiagnose),
        SatResult::Unknown(_) => return Err(DiagnoseError::Timeout),
        SatResult::Unsat { failed } => failed,
    };
    let initial: Vec<Lit> = all.iter().copied().filter(|l| failed.contains(l)).collect();
    let (core, exact) = shrink(&mut solver, initial, &budget);
    let mut constraints: Vec<usize> =
        core.iter().map(|l| g.selectors.iter().position(|s| *s == l.var()).expect("selector")).collect();
    constraints.sort_unstable();
    Ok(DiagnosisReport { kind: ReportKind::HighLevelMus { constraints }, domains: da.clone(), exact })
}

/// A minimal unsatisfiable subset of the clauses of `g`, which must not
/// carry constraint selectors.
pub fn low_level_mus(g: &Grounding, deadline: Instant) -> Result<DiagnosisReport, DiagnoseError> {
    let clauses = &g.cnf.clauses;
    let mut cnf = Cnf::new(g.cnf.num_vars);
    let guards: Vec<Var> = (0..clauses.len()).map(|_| cnf.new_var()).collect();
    for (c, s) in clauses.iter().zip(&guards) {
        let mut c = c.clone();
        c.push(s.neg());
        cnf.add_clause(c);
    }
    let budget = Budget::with_deadline(deadline);
    let mut solver = Solver::from_cnf(&cnf);
    let all: Vec<Lit> = guards.iter().map(|s| s.pos()).collect();
    let failed = match solver.solve_with(&all, &budget) {
        SatResult::Sat(_) => return Err(DiagnoseError::NothingToDiagnose),
        SatResult::Unknown(_) => return Err(DiagnoseError::Timeout),
        SatResult::Unsat { failed } => failed,
    };
    let initial: Vec<Lit> = all.iter().copied().filter(|l| failed.contains(l)).collect();
    let (core, exact) = shrink(&mut solver, initial, &budget);
    let first = g.cnf.num_vars;
    let mut ids: Vec<usize> = core.iter().map(|l| (l.var().0 - first) as usize).collect();
    ids.sort_unstable();
    let clauses = ids
        .into_iter()
        .map(|id| CoreClause { id, literals: clauses[id].clone(), provenance: g.provenance[id].clone() })
        .collect();
    Ok(DiagnosisReport { kind: ReportKind::LowLevelMus { clauses }, domains: g.domains.clone(), exact })
}

/// An interpretation at `da` violating the fewest constraints, found by
/// trying k = 1, 2, ... relaxed constraints in turn.
pub fn approximate_solution(
    tp: &TypedProblem,
    da: &DomainAssignment,
    deadline: Instant,
) -> Result<DiagnosisReport, DiagnoseError> {
    let g = grounding_with_selectors(tp, da, deadline)?;
    let budget = Budget::with_deadline(deadline);
    let all: Vec<Lit> = g.selectors.iter().map(|s| s.pos()).collect();
    match lff_sat::solve(&g.cnf, &all, &budget) {
        SatResult::Sat(_) => return Err(DiagnoseError::NothingToDiagnose),
        SatResult::Unknown(_) => return Err(DiagnoseError::Timeout),
        SatResult::Unsat { .. } => {}
    }
    let relaxed: Vec<Lit> = g.selectors.iter().map(|s| s.neg()).collect();
    // with every constraint relaxed only the axioms remain, and they always
    // have a model, so some k <= n succeeds
    let mut best: Option<(Interpretation, Vec<usize>)> = None;
    let mut exact = true;
    for k in 1..=relaxed.len() {
        let mut cnf = g.cnf.clone();
        let mut next = cnf.num_vars;
        let card = at_most_k(&relaxed, k, &mut next);
        cnf.num_vars = next;
        for c in card {
            cnf.add_clause(c);
        }
        match lff_sat::solve(&cnf, &[], &budget) {
            SatResult::Sat(m) => {
                let interp = g.decode(&m, &tp.symbols).map_err(DiagnoseError::Internal)?;
                let truth = check_constraints(&interp, tp);
                let violated: Vec<usize> = (0..truth.len()).filter(|&i| !truth[i]).collect();
                if violated.iter().any(|&i| m.value(g.selectors[i])) {
                    return Err(DiagnoseError::Internal("an active constraint is false in the decoded model".into()));
                }
                best = Some((interp, violated));
                break;
            }
            SatResult::Unsat { .. } => {}
            SatResult::Unknown(_) => {
                exact = false;
                break;
            }
        }
    }
    let (interp, violated) = match best {
        Some(b) => b,
        None if !exact => {
            // fall back to any interpretation of the axioms
            let m = match lff_sat::solve(&g.cnf, &[], &Budget::unlimited()) {
                SatResult::Sat(m) => m,
                _ => return Err(DiagnoseError::Timeout),
            };
            let interp = g.decode(&m, &tp.symbols).map_err(DiagnoseError::Internal)?;
            let truth = check_constraints(&interp, tp);
            let violated = (0..truth.len()).filter(|&i| !truth[i]).collect();
            (interp, violated)
        }
        None => return Err(DiagnoseError::Internal("no k admits a model".into())),
    };
    let satisfied_count = tp.problem.constraints.len() - violated.len();
    Ok(DiagnosisReport {
        kind: ReportKind::Approximate { interp, violated, satisfied_count },
        domains: da.clone(),
        exact,
    })
}

/// Result of diagnosing a whole input text.
#[derive(Clone, Debug)]
pub enum Diagnosis {
    InputErrors(Vec<Diagnostic>),
    NothingToDiagnose,
    /// No domain assignment within the bounds was searched.
    NoAssignment,
    Failed(DiagnoseError),
    Report(Box<DiagnosisReport>, Box<TypedProblem>),
}

/// Solves first; if there is no model, diagnoses at the first searched
/// domain assignment.
pub fn diagnose(text: &str, mode: DiagnoseMode, opts: &SolveOptions) -> Diagnosis {
    let start = Instant::now();
    let solve_opts = SolveOptions { mode: Mode::Solve, max_models: 1, capture_dimacs: false, ..opts.clone() };
    let outcome = run(text, &solve_opts);
    let da = match &outcome.kind {
        OutcomeKind::InputErrors(d) => return Diagnosis::InputErrors(d.clone()),
        OutcomeKind::Solutions { .. } => return Diagnosis::NothingToDiagnose,
        OutcomeKind::Timeout { .. } => return Diagnosis::Failed(DiagnoseError::Timeout),
        OutcomeKind::InternalError(m) => return Diagnosis::Failed(DiagnoseError::Internal(m.clone())),
        OutcomeKind::Ok => unreachable!("solve mode"),
        OutcomeKind::NoSolution { searched, .. } => match searched.first() {
            Some(da) => da.clone(),
            None => return Diagnosis::NoAssignment,
        },
    };
    let tp = outcome.typed.expect("typed problem");
    let remaining = opts.deadline.saturating_sub(start.elapsed()).max(Duration::from_millis(100));
    let deadline = Instant::now() + remaining;
    let r = match mode {
        DiagnoseMode::Mus => high_level_mus(&tp, &da, deadline),
        DiagnoseMode::Approx => approximate_solution(&tp, &da, deadline),
        DiagnoseMode::Clauses => {
            match ground(&tp, &da, &GroundOptions { deadline: Some(deadline), ..Default::default() }) {
                Ok(g) => low_level_mus(&g, deadline),
                Err(e) => Err(DiagnoseError::Internal(e.to_string())),
            }
        }
    };
    match r {
        Ok(r) => Diagnosis::Report(Box::new(r), Box::new(tp)),
        Err(DiagnoseError::NothingToDiagnose) => Diagnosis::NothingToDiagnose,
        Err(e) => Diagnosis::Failed(e),
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstraintRef {
    pub index: usize,
    pub line: u32,
    pub column: u32,
    pub text: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClauseRef {
    pub id: usize,
    pub literals: Vec<String>,
    pub provenance: String,
    /// Index of the constraint the clause came from, if any.
    pub constraint: Option<usize>,
}

/// Serialisable form of a [`Diagnosis`].
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagnosisView {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sizes: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<bool>,
    pub constraints: Vec<ConstraintRef>,
    pub clauses: Vec<ClauseRef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelView>,
    pub violated: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub satisfied_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total: Option<usize>,
    pub diagnostics: Vec<Diagnostic>,
    pub text: String,
}

fn constraint_ref(tp: &TypedProblem, source: &str, i: usize) -> ConstraintRef {
    let c = &tp.problem.constraints[i];
    ConstraintRef { index: i, line: c.span.line, column: c.span.column, text: format!("{}.", c.span.slice(source)) }
}

fn lit_label(g_atoms: &dyn Fn(Var) -> Option<String>, l: Lit) -> String {
    let name = g_atoms(l.var()).unwrap_or_else(|| format!("aux{}", l.var().0 + 1));
    if l.is_positive() {
        name
    } else {
        format!("~{name}")
    }
}

impl Diagnosis {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Diagnosis::InputErrors(_) => "input-errors",
            Diagnosis::NothingToDiagnose => "nothing-to-diagnose",
            Diagnosis::NoAssignment => "no-assignment",
            Diagnosis::Failed(DiagnoseError::Timeout) => "timeout",
            Diagnosis::Failed(_) => "internal-error",
            Diagnosis::Report(r, _) => match r.kind {
                ReportKind::HighLevelMus { .. } => "mus",
                ReportKind::LowLevelMus { .. } => "clause-mus",
                ReportKind::Approximate { .. } => "approximate",
            },
        }
    }

    /// `source` is the text the diagnosis was run on.
    pub fn view(&self, source: &str) -> DiagnosisView {
        let mut v = DiagnosisView {
            kind: self.kind_name(),
            sizes: None,
            exact: None,
            constraints: Vec::new(),
            clauses: Vec::new(),
            model: None,
            violated: Vec::new(),
            satisfied_count: None,
            total: None,
            diagnostics: Vec::new(),
            text: String::new(),
        };
        let mut text = String::new();
        match self {
            Diagnosis::InputErrors(d) => {
                v.diagnostics = d.clone();
                text = render_all(d);
            }
            Diagnosis::NothingToDiagnose => text.push_str("Nothing to diagnose: the constraints have a model.\n"),
            Diagnosis::NoAssignment => text.push_str("Nothing to diagnose: no domain sizes lie within the bounds.\n"),
            Diagnosis::Failed(e) => {
                let _ = writeln!(text, "Diagnosis failed: {e}.");
            }
            Diagnosis::Report(r, tp) => {
                let symbols = &tp.symbols;
                let sizes = r.domains.describe(symbols);
                v.sizes = Some(sizes.clone());
                v.exact = Some(r.exact);
                match &r.kind {
                    ReportKind::HighLevelMus { constraints } => {
                        let _ = writeln!(
                            text,
                            "{} unsatisfiable set of {} constraint{} at domain sizes {sizes}:",
                            if r.exact { "Minimal" } else { "Possibly non-minimal" },
                            constraints.len(),
                            if constraints.len() == 1 { "" } else { "s" }
                        );
                        for &i in constraints {
                            let c = constraint_ref(tp, source, i);
                            let _ = writeln!(text, "  line {}: {}", c.line, c.text);
                            v.constraints.push(c);
                        }
                    }
                    ReportKind::LowLevelMus { clauses } => {
                        // labels need a grounding only for atom names, which
                        // depend on the layout alone
                        let g = ground(tp, &r.domains, &GroundOptions::default()).ok();
                        let label = |var: Var| g.as_ref().and_then(|g| g.atom_label(var, symbols));
                        let _ = writeln!(
                            text,
                            "{} unsatisfiable set of {} clause{} at domain sizes {sizes}:",
                            if r.exact { "Minimal" } else { "Possibly non-minimal" },
                            clauses.len(),
                            if clauses.len() == 1 { "" } else { "s" }
                        );
                        for c in clauses {
                            let lits: Vec<String> = c.literals.iter().map(|l| lit_label(&label, *l)).collect();
                            let prov = c.provenance.describe(symbols, &r.domains);
                            let _ = writeln!(
                                text,
                                "  {}   ({prov})",
                                if lits.is_empty() { "<empty>".into() } else { lits.join(" | ") }
                            );
                            v.clauses.push(ClauseRef {
                                id: c.id,
                                literals: lits,
                                provenance: prov,
                                constraint: c.provenance.constraint(),
                            });
                        }
                        let mut ks: Vec<usize> = clauses.iter().filter_map(|c| c.provenance.constraint()).collect();
                        ks.sort_unstable();
                        ks.dedup();
                        v.constraints = ks.into_iter().map(|i| constraint_ref(tp, source, i)).collect();
                    }
                    ReportKind::Approximate { interp, violated, satisfied_count } => {
                        let total = tp.problem.constraints.len();
                        let _ = writeln!(
                            text,
                            "Approximate solution at domain sizes {sizes}: {satisfied_count} of {total} constraints hold{}.",
                            if r.exact { "" } else { " (not known to be the best)" }
                        );
                        let _ = writeln!(text, "Violated:");
                        for &i in violated {
                            let c = constraint_ref(tp, source, i);
                            let _ = writeln!(text, "  line {}: {}", c.line, c.text);
                            v.constraints.push(c);
                        }
                        text.push('\n');
                        text.push_str(&interp.render(symbols));
                        v.model = Some(interp.view(symbols));
                        v.violated = violated.clone();
                        v.satisfied_count = Some(*satisfied_count);
                        v.total = Some(total);
                    }
                }
            }
        }
        v.text = text;
        v
    }
}
