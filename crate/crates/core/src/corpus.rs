//! The puzzle library.
//!
//! Each puzzle is a directory holding `statement.txt`, `problem.lff`, a
//! `meta` file of `key: value` lines and, optionally, `solution.txt` with
//! the expected rendering of the unique model. The shipped puzzles are also
//! compiled in, so the library works without the directory at hand.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::engine::{run, OutcomeKind, SolveOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Level {
    Beginner,
    Intermediate,
    Advanced,
    Expert,
    Logician,
}

impl Level {
    pub const ALL: [Level; 5] = [Level::Beginner, Level::Intermediate, Level::Advanced, Level::Expert, Level::Logician];
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Level {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Level::ALL
            .into_iter()
            .find(|l| l.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown level `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Puzzle {
    pub id: String,
    pub title: String,
    pub level: Level,
    /// `paper` for the two classic items, `invented` otherwise.
    pub source: String,
    pub statement: String,
    pub encoding: String,
    pub expected_models: usize,
    /// Open-sort bounds for verification; empty means the defaults.
    pub bounds: BTreeMap<String, (usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<String>,
}

/// Short form for listings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PuzzleSummary {
    pub id: String,
    pub title: String,
    pub level: Level,
    pub source: String,
}

impl Puzzle {
    pub fn summary(&self) -> PuzzleSummary {
        PuzzleSummary { id: self.id.clone(), title: self.title.clone(), level: self.level, source: self.source.clone() }
    }

    /// Builds a puzzle from the contents of its files.
    pub fn from_parts(meta: &str, statement: &str, encoding: &str, solution: Option<&str>) -> Result<Puzzle, String> {
        let mut fields = BTreeMap::new();
        for (n, line) in meta.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once(':').ok_or_else(|| format!("meta line {}: expected `key: value`", n + 1))?;
            fields.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| fields.get(k).cloned().ok_or_else(|| format!("meta has no `{k}`"));
        let expected_models =
            get("expected_models")?.parse().map_err(|_| "expected_models is not a number".to_string())?;
        Ok(Puzzle {
            id: get("id")?,
            title: get("title")?,
            level: get("level")?.parse()?,
            source: fields.get("source").cloned().unwrap_or_else(|| "invented".into()),
            statement: statement.to_string(),
            encoding: encoding.to_string(),
            expected_models,
            bounds: parse_bounds(fields.get("bounds").map(String::as_str).unwrap_or("none"))?,
            solution: solution.map(str::to_string),
        })
    }
}

/// `none`, or a list like `person=1..1, place=1..3`.
pub fn parse_bounds(text: &str) -> Result<BTreeMap<String, (usize, usize)>, String> {
    let mut out = BTreeMap::new();
    let text = text.trim();
    if text.is_empty() || text == "none" {
        return Ok(out);
    }
    for item in text.split(',') {
        let bad = || format!("bad bound `{}`", item.trim());
        let (sort, range) = item.split_once('=').ok_or_else(bad)?;
        let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo == 0 || lo > hi {
            return Err(bad());
        }
        out.insert(sort.trim().to_string(), (lo, hi));
    }
    Ok(out)
}

macro_rules! builtin {
    ($($id:literal),* $(,)?) => {
        &[$((
            include_str!(concat!("../../../corpus/", $id, "/meta")),
            include_str!(concat!("../../../corpus/", $id, "/statement.txt")),
            include_str!(concat!("../../../corpus/", $id, "/problem.lff")),
        )),*]
    };
}

const BUILTIN: &[(&str, &str, &str)] = builtin!(
    "mary-lamb",
    "three-pets",
    "knights-and-knaves",
    "music-club",
    "fun-run",
    "logic-games",
    "blocks-world",
    "latin-square",
    "circuit-fault",
);

const SOLUTIONS: &[(&str, &str)] = &[
    ("logic-games", include_str!("../../../corpus/logic-games/solution.txt")),
    ("latin-square", include_str!("../../../corpus/latin-square/solution.txt")),
];

#[derive(Clone, Debug, Default)]
pub struct Corpus {
    puzzles: Vec<Puzzle>,
}

impl Corpus {
    pub fn builtin() -> Corpus {
        let puzzles = BUILTIN
            .iter()
            .map(|(meta, statement, encoding)| {
                let id = meta.lines().find_map(|l| l.strip_prefix("id:")).unwrap_or_default().trim();
                let solution = SOLUTIONS.iter().find(|(s, _)| *s == id).map(|(_, t)| *t);
                Puzzle::from_parts(meta, statement, encoding, solution).expect("shipped puzzle metadata")
            })
            .collect();
        Corpus::new(puzzles)
    }

    /// Reads every subdirectory of `dir` that has a `meta` file.
    pub fn load_dir(dir: &Path) -> Result<Corpus, String> {
        let mut puzzles = Vec::new();
        let entries = std::fs::read_dir(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        for entry in entries {
            let path = entry.map_err(|e| e.to_string())?.path();
            if !path.join("meta").is_file() {
                continue;
            }
            let read = |name: &str| {
                std::fs::read_to_string(path.join(name)).map_err(|e| format!("{}: {e}", path.join(name).display()))
            };
            let solution = path.join("solution.txt").is_file().then(|| read("solution.txt")).transpose()?;
            let p =
                Puzzle::from_parts(&read("meta")?, &read("statement.txt")?, &read("problem.lff")?, solution.as_deref())
                    .map_err(|e| format!("{}: {e}", path.display()))?;
            puzzles.push(p);
        }
        Ok(Corpus::new(puzzles))
    }

    pub fn new(mut puzzles: Vec<Puzzle>) -> Corpus {
        puzzles.sort_by(|a, b| (a.level, &a.id).cmp(&(b.level, &b.id)));
        Corpus { puzzles }
    }

    /// Ordered by level, then id.
    pub fn list(&self, level: Option<Level>) -> Vec<&Puzzle> {
        self.puzzles.iter().filter(|p| level.is_none_or(|l| p.level == l)).collect()
    }

    pub fn get(&self, id: &str) -> Option<&Puzzle> {
        self.puzzles.iter().find(|p| p.id == id)
    }

    /// [`verify`] on every puzzle, in listing order.
    pub fn verify_all(&self) -> Vec<Verification> {
        self.puzzles.iter().map(verify).collect()
    }
}

/// Time allowed for each puzzle by [`verify`].
pub const VERIFY_DEADLINE: Duration = Duration::from_secs(5);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Verification {
    pub id: String,
    pub passed: bool,
    pub models: usize,
    pub exhausted: bool,
    pub elapsed_ms: u64,
    /// Why it failed, if it did.
    pub problem: Option<String>,
}

/// Solves the reference encoding at its bounds and compares with the
/// expected model count and, when present, the frozen solution.
pub fn verify(p: &Puzzle) -> Verification {
    let start = Instant::now();
    let opts = SolveOptions {
        max_models: p.expected_models + 1,
        bounds: p.bounds.clone(),
        deadline: VERIFY_DEADLINE,
        ..Default::default()
    };
    let out = run(&p.encoding, &opts);
    let elapsed = start.elapsed();
    let mut v = Verification {
        id: p.id.clone(),
        passed: false,
        models: out.model_count(),
        exhausted: false,
        elapsed_ms: elapsed.as_millis() as u64,
        problem: None,
    };
    let problem = match &out.kind {
        OutcomeKind::Solutions { exhausted, groups, .. } => {
            v.exhausted = *exhausted;
            if !exhausted || v.models != p.expected_models {
                Some(format!(
                    "expected {} models, found {}{}",
                    p.expected_models,
                    v.models,
                    if *exhausted { "" } else { " or more" }
                ))
            } else if let Some(expected) = &p.solution {
                let tp = out.typed.as_ref().expect("typed");
                let got = groups[0].models[0].render(&tp.symbols);
                (got.trim() != expected.trim()).then(|| format!("solution differs from the frozen one:\n{got}"))
            } else {
                None
            }
        }
        OutcomeKind::NoSolution { complete: true, .. } if p.expected_models == 0 => None,
        other => Some(format!(
            "unexpected outcome {}: {}",
            out.kind_name(),
            match other {
                OutcomeKind::InputErrors(d) => crate::diagnostic::render_all(d),
                _ => out.render(),
            }
        )),
    };
    v.problem = match problem {
        None if elapsed > VERIFY_DEADLINE => Some(format!("took {} ms", v.elapsed_ms)),
        other => other,
    };
    v.passed = v.problem.is_none();
    v
}
