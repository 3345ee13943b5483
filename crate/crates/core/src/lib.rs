//! Core of the logical-modelling workbench.
//!
//! Problems are written in three sections (sorts, vocabulary, constraints)
//! of a many-sorted first-order language. The pipeline is
//! [`parser`] → [`typecheck`] → [`grounder`] → SAT ([`lff_sat`]) → decoded
//! [`Interpretation`]s, driven by [`engine`]. The [`evaluator`] is an
//! independent model checker used to validate that pipeline, and
//! [`diagnose`] explains unsatisfiable problems.

// Diagnostics are large by design and returned rarely.
#![allow(clippy::result_large_err)]

pub mod corpus;
pub mod diagnose;
pub mod diagnostic;
pub mod engine;
pub mod evaluator;
pub mod grounder;
pub mod interp;
pub mod lang;
pub mod lexer;
pub mod parser;
pub mod symbols;
pub mod tree;
pub mod typecheck;

pub use diagnostic::{Diagnostic, Severity};
pub use interp::{DomainAssignment, Interpretation};
pub use lang::{free_variables, render_formula, render_problem, Binder, Formula, Problem, Span, Term};
pub use parser::{parse_problem, parse_sections};
pub use typecheck::{check, TypedProblem};
