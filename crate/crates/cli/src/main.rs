//! `lff`: check, solve and diagnose problem files; serve the HTTP API;
//! verify the puzzle corpus; mine usage logs.
//!
//! Exit codes: 0 success (or solutions found), 1 no solution, 2 input error
//! or unreadable file, 3 timeout, 4 internal error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use lff_core::corpus::{parse_bounds, Corpus, Level};
use lff_core::diagnose::{diagnose, DiagnoseError, DiagnoseMode, Diagnosis};
use lff_core::diagnostic::render_all;
use lff_core::engine::{run, Mode, OutcomeKind, SolveOptions};

const OK: u8 = 0;
const NO_SOLUTION: u8 = 1;
const INPUT_ERROR: u8 = 2;
const TIMEOUT: u8 = 3;
const INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "lff", version, about = "Finite model finding for many-sorted first-order problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and type-check a problem file.
    Check { file: PathBuf },
    /// Search for models.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Write the CNF of the first domain assignment tried.
        #[arg(long, value_name = "OUT")]
        dimacs: Option<PathBuf>,
        /// Print the JSON report instead of tables.
        #[arg(long)]
        json: bool,
    },
    /// Explain why a problem has no model.
    Diagnose {
        file: PathBuf,
        #[arg(long, default_value = "mus", value_parser = ["mus", "approx", "clauses"])]
        mode: String,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        json: bool,
    },
    /// Run the HTTP service (configured by LFF_* environment variables).
    Serve {
        #[arg(long)]
        port: Option<u16>,
    },
    /// The puzzle library.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
    /// Aggregate a usage log as CSV.
    Stats {
        logfile: PathBuf,
        /// Requests per day: `date,count` (the default).
        #[arg(long, conflicts_with = "intervals")]
        by_day: bool,
        /// One session's requests: `timestamp,interval_secs,action,prev_action`.
        #[arg(long, value_name = "SESSION")]
        intervals: Option<String>,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Solve every puzzle and compare with its expected answer.
    Verify {
        /// Read puzzles from this directory instead of the built-in set.
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Only this puzzle.
        #[arg(long)]
        id: Option<String>,
    },
    /// List puzzles.
    List {
        #[arg(long)]
        level: Option<Level>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 2)]
    max_models: usize,
    /// Largest size tried for open sorts.
    #[arg(long, value_name = "K")]
    max_size: Option<usize>,
    /// Per-sort bounds, e.g. `person=1..2,place=3..3`.
    #[arg(long)]
    bounds: Option<String>,
    /// Seconds.
    #[arg(long, default_value_t = 10.0)]
    timeout: f64,
    #[arg(long)]
    symmetry_breaking: bool,
}

impl RunArgs {
    fn options(&self) -> Result<SolveOptions, String> {
        let mut o = SolveOptions { mode: Mode::Solve, ..Default::default() };
        if self.max_models == 0 {
            return Err("--max-models must be at least 1".into());
        }
        o.max_models = self.max_models;
        if let Some(k) = self.max_size {
            if k == 0 {
                return Err("--max-size must be at least 1".into());
            }
            o.default_bounds = (o.default_bounds.0.min(k), k);
        }
        if let Some(b) = &self.bounds {
            o.bounds = parse_bounds(b)?;
        }
        if !(self.timeout.is_finite() && self.timeout > 0.0) {
            return Err("--timeout must be positive".into());
        }
        o.deadline = Duration::from_secs_f64(self.timeout);
        o.symmetry_breaking = self.symmetry_breaking;
        Ok(o)
    }
}

fn read(path: &Path) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("lff: cannot read {}: {e}", path.display());
        ExitCode::from(INPUT_ERROR)
    })
}

fn usage_error(msg: String) -> ExitCode {
    eprintln!("lff: {msg}");
    ExitCode::from(INPUT_ERROR)
}

fn check(file: &Path) -> Result<ExitCode, ExitCode> {
    let text = read(file)?;
    let out = run(&text, &SolveOptions::check());
    match &out.kind {
        OutcomeKind::InputErrors(d) => {
            eprint!("{}", render_all(d));
            Ok(ExitCode::from(INPUT_ERROR))
        }
        _ => {
            if !out.warnings.is_empty() {
                eprint!("{}", render_all(&out.warnings));
            }
            println!("No errors found.");
            Ok(ExitCode::from(OK))
        }
    }
}

fn solve(file: &Path, args: &RunArgs, dimacs: Option<&Path>, json: bool) -> Result<ExitCode, ExitCode> {
    let text = read(file)?;
    let mut opts = args.options().map_err(usage_error)?;
    opts.capture_dimacs = dimacs.is_some();
    let out = run(&text, &opts);
    if let (Some(path), Some(cnf)) = (dimacs, &out.dimacs) {
        std::fs::write(path, cnf).map_err(|e| usage_error(format!("cannot write {}: {e}", path.display())))?;
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&out.report()).expect("serialisable"));
    } else if let OutcomeKind::InputErrors(d) = &out.kind {
        eprint!("{}", render_all(d));
    } else {
        print!("{}", out.render());
    }
    Ok(ExitCode::from(match out.kind {
        OutcomeKind::Ok | OutcomeKind::Solutions { .. } => OK,
        OutcomeKind::NoSolution { .. } => NO_SOLUTION,
        OutcomeKind::InputErrors(_) => INPUT_ERROR,
        OutcomeKind::Timeout { .. } => TIMEOUT,
        OutcomeKind::InternalError(_) => INTERNAL,
    }))
}

fn diagnose_cmd(file: &Path, mode: &str, args: &RunArgs, json: bool) -> Result<ExitCode, ExitCode> {
    let text = read(file)?;
    let opts = args.options().map_err(usage_error)?;
    let mode: DiagnoseMode = mode.parse().map_err(usage_error)?;
    let d = diagnose(&text, mode, &opts);
    let view = d.view(&text);
    if json {
        println!("{}", serde_json::to_string_pretty(&view).expect("serialisable"));
    } else if let Diagnosis::InputErrors(diags) = &d {
        eprint!("{}", render_all(diags));
    } else {
        print!("{}", view.text);
    }
    // The status of the problem itself, as for `solve`.
    Ok(ExitCode::from(match d {
        Diagnosis::NothingToDiagnose => OK,
        Diagnosis::Report(..) | Diagnosis::NoAssignment => NO_SOLUTION,
        Diagnosis::InputErrors(_) => INPUT_ERROR,
        Diagnosis::Failed(DiagnoseError::Timeout) => TIMEOUT,
        Diagnosis::Failed(_) => INTERNAL,
    }))
}

fn corpus_verify(dir: Option<&Path>, id: Option<&str>) -> Result<ExitCode, ExitCode> {
    let corpus = match dir {
        Some(d) => Corpus::load_dir(d).map_err(usage_error)?,
        None => Corpus::builtin(),
    };
    let results = match id {
        Some(id) => {
            let p = corpus.get(id).ok_or_else(|| usage_error(format!("no puzzle `{id}`")))?;
            vec![lff_core::corpus::verify(p)]
        }
        None => corpus.verify_all(),
    };
    let mut failed = 0;
    for v in &results {
        let status = if v.passed { "PASS" } else { "FAIL" };
        println!("{status} {:<20} models={} exhausted={} {} ms", v.id, v.models, v.exhausted, v.elapsed_ms);
        if let Some(p) = &v.problem {
            for line in p.lines() {
                println!("     {line}");
            }
            failed += 1;
        }
    }
    println!("{} of {} puzzles verified", results.len() - failed, results.len());
    Ok(ExitCode::from(if failed == 0 { OK } else { NO_SOLUTION }))
}

fn corpus_list(level: Option<Level>) -> ExitCode {
    for p in Corpus::builtin().list(level) {
        println!("{:<13} {:<20} {} ({})", p.level, p.id, p.title, p.source);
    }
    ExitCode::from(OK)
}

fn stats(log: &Path, intervals: Option<&str>) -> Result<ExitCode, ExitCode> {
    let events = lff_service::usage::read_events(log).map_err(usage_error)?;
    match intervals {
        Some(session) => print!("{}", lff_service::usage::intervals_csv(&events, session)),
        None => print!("{}", lff_service::usage::by_day_csv(&events)),
    }
    Ok(ExitCode::from(OK))
}

fn serve(port: Option<u16>) -> Result<ExitCode, ExitCode> {
    let mut config = lff_service::Config::from_env().map_err(usage_error)?;
    if let Some(p) = port {
        config.port = p;
    }
    let rt = tokio::runtime::Runtime::new().map_err(|e| usage_error(e.to_string()))?;
    rt.block_on(lff_service::serve(config)).map_err(|e| usage_error(format!("serve: {e}")))?;
    Ok(ExitCode::from(OK))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.command {
        Command::Check { file } => check(file),
        Command::Solve { file, run, dimacs, json } => solve(file, run, dimacs.as_deref(), *json),
        Command::Diagnose { file, mode, run, json } => diagnose_cmd(file, mode, run, *json),
        Command::Serve { port } => serve(*port),
        Command::Corpus { command: CorpusCommand::Verify { dir, id } } => corpus_verify(dir.as_deref(), id.as_deref()),
        Command::Corpus { command: CorpusCommand::List { level } } => Ok(corpus_list(*level)),
        Command::Stats { logfile, by_day: _, intervals } => stats(logfile, intervals.as_deref()),
    };
    r.unwrap_or_else(|code| code)
}
