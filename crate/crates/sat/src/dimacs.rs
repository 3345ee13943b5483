use std::fmt::Write as _;

use thiserror::Error;

use crate::lit::Lit;
use crate::Cnf;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: malformed problem line")]
    BadHeader { line: usize },
    #[error("line {line}: duplicate problem line")]
    DuplicateHeader { line: usize },
    #[error("line {line}: invalid literal `{token}`")]
    BadLiteral { line: usize, token: String },
    #[error("line {line}: literal {lit} exceeds declared variable count {num_vars}")]
    VarOutOfRange { line: usize, lit: i64, num_vars: u32 },
    #[error("clause data before the problem line")]
    MissingHeader,
    #[error("unterminated final clause")]
    Unterminated,
    #[error("declared {declared} clauses but found {found}")]
    ClauseCount { declared: usize, found: usize },
}

/// Parses DIMACS CNF. Comment lines (`c ...`) are skipped, `%` ends the
/// clause section (as in some benchmark files).
pub fn parse_dimacs(text: &str) -> Result<Cnf, DimacsError> {
    let mut header: Option<(u32, usize)> = None;
    let mut cnf = Cnf::default();
    let mut current: Vec<Lit> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::DuplicateHeader { line: lineno });
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(DimacsError::BadHeader { line: lineno });
            }
            let vars: u32 = parts[2].parse().map_err(|_| DimacsError::BadHeader { line: lineno })?;
            let clauses: usize = parts[3].parse().map_err(|_| DimacsError::BadHeader { line: lineno })?;
            if vars > i32::MAX as u32 {
                return Err(DimacsError::BadHeader { line: lineno });
            }
            header = Some((vars, clauses));
            cnf.num_vars = vars;
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(DimacsError::MissingHeader);
        };
        for token in line.split_whitespace() {
            let x: i64 =
                token.parse().map_err(|_| DimacsError::BadLiteral { line: lineno, token: token.to_string() })?;
            if x == 0 {
                cnf.clauses.push(std::mem::take(&mut current));
            } else {
                if x.unsigned_abs() > num_vars as u64 {
                    return Err(DimacsError::VarOutOfRange { line: lineno, lit: x, num_vars });
                }
                current.push(Lit::from_dimacs(x));
            }
        }
    }
    let Some((_, declared)) = header else {
        return Err(DimacsError::MissingHeader);
    };
    if !current.is_empty() {
        return Err(DimacsError::Unterminated);
    }
    if cnf.clauses.len() != declared {
        return Err(DimacsError::ClauseCount { declared, found: cnf.clauses.len() });
    }
    Ok(cnf)
}

/// Writes `cnf` in DIMACS format. `comment(i)` may supply a comment line
/// emitted just before clause `i`.
pub fn write_dimacs(cnf: &Cnf, mut comment: impl FnMut(usize) -> Option<String>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p cnf {} {}", cnf.num_vars, cnf.clauses.len());
    for (i, clause) in cnf.clauses.iter().enumerate() {
        if let Some(c) = comment(i) {
            let _ = writeln!(out, "c {c}");
        }
        for l in clause {
            let _ = write!(out, "{} ", l.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_simple_file() {
        let cnf = parse_dimacs("c hello\np cnf 3 2\n1 -2 0\n2 3\n-1 0\n").unwrap();
        assert_eq!(cnf.num_vars, 3);
        assert_eq!(cnf.clauses.len(), 2);
        assert_eq!(cnf.clauses[1], vec![Lit::from_dimacs(2), Lit::from_dimacs(3), Lit::from_dimacs(-1)]);
    }

    #[test]
    fn empty_clause_is_kept() {
        let cnf = parse_dimacs("p cnf 1 1\n0\n").unwrap();
        assert_eq!(cnf.clauses, vec![vec![]]);
    }

    #[test]
    fn errors() {
        assert_eq!(parse_dimacs("1 0\n"), Err(DimacsError::MissingHeader));
        assert_eq!(parse_dimacs("p cnf 1 1\n2 0\n"), Err(DimacsError::VarOutOfRange { line: 2, lit: 2, num_vars: 1 }));
        assert_eq!(parse_dimacs("p cnf 1 1\n1\n"), Err(DimacsError::Unterminated));
        assert_eq!(parse_dimacs("p cnf 1 2\n1 0\n"), Err(DimacsError::ClauseCount { declared: 2, found: 1 }));
        assert!(matches!(parse_dimacs("p cnf x 1\n"), Err(DimacsError::BadHeader { line: 1 })));
        assert!(matches!(parse_dimacs("p cnf 1 1\n1 a 0\n"), Err(DimacsError::BadLiteral { .. })));
    }

    #[test]
    fn writes_comments() {
        let mut cnf = Cnf::new(2);
        cnf.add_clause(vec![Lit::from_dimacs(1), Lit::from_dimacs(-2)]);
        let text = write_dimacs(&cnf, |i| Some(format!("clause {i}")));
        assert_eq!(text, "p cnf 2 1\nc clause 0\n1 -2 0\n");
        assert_eq!(parse_dimacs(&text).unwrap(), cnf);
    }
}
