//! Recursive-descent parser for the three-section problem format.
//!
//! ```text
//! Sorts:
//!   person.
//!   size enum: little, medium, big.
//!   day int: 1 .. 7.
//! Vocabulary:
//!   predicate { had(person, animal). }
//!   function { hue(animal): colour. }
//!   name Mary: person.
//! Constraints:
//!   SOME x had(Mary, x).
//! ```
//!
//! Errors resynchronise at the next `.` so one run reports as many
//! problems as it can.

use std::collections::HashSet;

use crate::diagnostic::Diagnostic;
use crate::lang::{
    ArithOp, Binder, CmpOp, Constraint, Formula, FuncDecl, NameDecl, PredDecl, Problem, SortDecl, SortKind, Span, Term,
    Vocabulary,
};
use crate::lexer::{tokenize_lossy, Token, TokenKind};
use crate::tree::{render_parse_tree, BinOp, Node, NodeKind, Quantifier};

pub const SORTS_HEADER: &str = "Sorts";
pub const VOCABULARY_HEADER: &str = "Vocabulary";
pub const CONSTRAINTS_HEADER: &str = "Constraints";

const SYNTAX_HINTS: &[&str] =
    &["check for misplaced parentheses and wrong names", "every declaration and constraint must end with a full stop"];

/// Joins the three input boxes into one problem text.
pub fn assemble_sections(sorts: &str, vocabulary: &str, constraints: &str) -> String {
    let mut text = String::new();
    for (header, body) in [(SORTS_HEADER, sorts), (VOCABULARY_HEADER, vocabulary), (CONSTRAINTS_HEADER, constraints)] {
        text.push_str(header);
        text.push_str(":\n");
        text.push_str(body);
        if !body.ends_with('\n') {
            text.push('\n');
        }
    }
    text
}

/// Parses the three input boxes as one problem. Returns the assembled text
/// alongside the result, since diagnostics refer to its line numbers.
pub fn parse_sections(sorts: &str, vocabulary: &str, constraints: &str) -> (String, Result<Problem, Vec<Diagnostic>>) {
    let text = assemble_sections(sorts, vocabulary, constraints);
    let result = parse_problem(&text);
    (text, result)
}

pub fn parse_problem(text: &str) -> Result<Problem, Vec<Diagnostic>> {
    let (tokens, lex_errors) = tokenize_lossy(text);
    if !lex_errors.is_empty() {
        return Err(lex_errors);
    }
    let mut p = Parser::new(text, tokens);
    let problem = p.problem();
    if p.diags.is_empty() {
        Ok(problem)
    } else {
        Err(p.diags)
    }
}

/// Parses a single formula, resolving identifiers against the declarations
/// of `context`. A trailing `.` is optional.
pub fn parse_formula(text: &str, context: &Problem) -> Result<Formula, Vec<Diagnostic>> {
    let (tokens, lex_errors) = tokenize_lossy(text);
    if !lex_errors.is_empty() {
        return Err(lex_errors);
    }
    let mut p = Parser::new(text, tokens);
    let ctx = Scope::from_declarations(&context.sorts, &context.vocab);
    let node = match p.formula_node() {
        Ok(n) => n,
        Err(fail) => {
            p.report_fail(fail);
            return Err(p.diags);
        }
    };
    if p.peek() == Some(&TokenKind::Period) {
        p.bump();
    }
    if let Some(tok) = p.tokens.get(p.pos) {
        let d = p.diag_at(p.pos, format!("Syntax error: unexpected {} after the formula", tok.kind.describe()));
        p.diags.push(d);
        return Err(p.diags);
    }
    match ctx.lower_formula(&node, &mut Vec::new()) {
        Ok(f) => Ok(f),
        Err(e) => Err(vec![p.lower_diag(e)]),
    }
}

/// Parses a single formula into its raw parse tree (no name resolution).
pub fn parse_tree(text: &str) -> Result<Node, Diagnostic> {
    let (tokens, mut lex_errors) = tokenize_lossy(text);
    if !lex_errors.is_empty() {
        return Err(lex_errors.swap_remove(0));
    }
    let mut p = Parser::new(text, tokens);
    match p.formula_node() {
        Ok(node) => {
            if p.peek() == Some(&TokenKind::Period) {
                p.bump();
            }
            if p.pos < p.tokens.len() {
                let mut d = p.diag_at(p.pos, format!("Syntax error: unexpected {}", p.tokens[p.pos].kind.describe()));
                d.partial_tree = Some(render_parse_tree(&node));
                return Err(d);
            }
            Ok(node)
        }
        Err(fail) => {
            p.report_fail(fail);
            Err(p.diags.swap_remove(0))
        }
    }
}

struct Fail {
    at: usize,
    expected: String,
    partial: Node,
}

type PResult = Result<Node, Fail>;

struct LowerError {
    message: String,
    span: Span,
}

/// Identifier classes needed to resolve bare identifiers while lowering.
struct Scope {
    names: HashSet<String>,
    enum_elements: HashSet<String>,
    functions: HashSet<String>,
    predicates: HashSet<String>,
}

impl Scope {
    fn from_declarations(sorts: &[SortDecl], vocab: &Vocabulary) -> Self {
        let mut enum_elements = HashSet::new();
        for s in sorts {
            if let SortKind::Enum(elems) = &s.kind {
                enum_elements.extend(elems.iter().cloned());
            }
        }
        Scope {
            names: vocab.names.iter().map(|n| n.name.clone()).collect(),
            enum_elements,
            functions: vocab.functions.iter().map(|f| f.name.clone()).collect(),
            predicates: vocab.predicates.iter().map(|p| p.name.clone()).collect(),
        }
    }

    fn lower_formula(&self, n: &Node, bound: &mut Vec<String>) -> Result<Formula, LowerError> {
        Ok(match &n.kind {
            NodeKind::Ident(s) => Formula::Pred(s.clone(), Vec::new()),
            NodeKind::True => Formula::True,
            NodeKind::False => Formula::False,
            NodeKind::App { head, args, .. } => {
                let args = args.iter().map(|a| self.lower_term(a, bound)).collect::<Result<_, _>>()?;
                Formula::Pred(head.clone(), args)
            }
            NodeKind::Not(g) => Formula::not(self.lower_formula(g, bound)?),
            NodeKind::Binary(op, a, b) => match op {
                BinOp::Iff | BinOp::Implies | BinOp::Or | BinOp::And => {
                    let (a, b) = (self.lower_formula(a, bound)?, self.lower_formula(b, bound)?);
                    match op {
                        BinOp::Iff => Formula::iff(a, b),
                        BinOp::Implies => Formula::implies(a, b),
                        BinOp::Or => Formula::or(a, b),
                        _ => Formula::and(a, b),
                    }
                }
                BinOp::Eq | BinOp::Neq | BinOp::Cmp(_) => {
                    let (a, b) = (self.lower_term(a, bound)?, self.lower_term(b, bound)?);
                    match op {
                        BinOp::Eq => Formula::Eq(a, b),
                        BinOp::Neq => Formula::Neq(a, b),
                        BinOp::Cmp(c) => Formula::Cmp(*c, a, b),
                        _ => unreachable!(),
                    }
                }
                BinOp::Arith(_) => {
                    return Err(LowerError {
                        message: "expected a formula but found an arithmetic term".into(),
                        span: n.span,
                    })
                }
            },
            NodeKind::Int(_) => {
                return Err(LowerError { message: "expected a formula but found an integer".into(), span: n.span })
            }
            NodeKind::Quant { q, vars, sort, body } => {
                let depth = bound.len();
                bound.extend(vars.iter().cloned());
                let body = self.lower_formula(body, bound);
                bound.truncate(depth);
                let mut f = body?;
                for v in vars.iter().rev() {
                    let b = Binder { var: v.clone(), sort: sort.clone() };
                    f = match q {
                        Quantifier::All => Formula::forall(b, f),
                        Quantifier::Some => Formula::exists(b, f),
                    };
                }
                f
            }
            NodeKind::OpenGroup(_) | NodeKind::Missing => {
                return Err(LowerError { message: "incomplete formula".into(), span: n.span })
            }
        })
    }

    fn lower_term(&self, n: &Node, bound: &mut Vec<String>) -> Result<Term, LowerError> {
        Ok(match &n.kind {
            NodeKind::Ident(s) => {
                if bound.contains(s) {
                    Term::Var(s.clone())
                } else if self.names.contains(s) {
                    Term::Name(s.clone())
                } else if self.enum_elements.contains(s) {
                    Term::EnumLit(s.clone())
                } else if self.functions.contains(s) || self.predicates.contains(s) {
                    Term::App(s.clone(), Vec::new())
                } else {
                    Term::Var(s.clone())
                }
            }
            NodeKind::Int(v) => Term::Int(*v),
            NodeKind::App { head, args, .. } => {
                let args = args.iter().map(|a| self.lower_term(a, bound)).collect::<Result<_, _>>()?;
                Term::App(head.clone(), args)
            }
            NodeKind::Binary(BinOp::Arith(op), a, b) => {
                Term::Arith(*op, Box::new(self.lower_term(a, bound)?), Box::new(self.lower_term(b, bound)?))
            }
            _ => Term::Formula(Box::new(self.lower_formula(n, bound)?)),
        })
    }
}

struct Parser<'a> {
    text: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

fn join(a: Span, b: Span) -> Span {
    Span { start: a.start, end: b.end.max(a.end), line: a.line, column: a.column }
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, tokens: Vec<Token>) -> Self {
        Parser { text, tokens, pos: 0, diags: Vec::new() }
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, k: usize) -> Option<&TokenKind> {
        self.tokens.get(self.pos + k).map(|t| &t.kind)
    }

    fn bump(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn span_here(&self) -> Span {
        match self.tokens.get(self.pos) {
            Some(t) => t.span,
            None => self.eof_span(),
        }
    }

    fn prev_span(&self) -> Span {
        if self.pos == 0 {
            self.span_here()
        } else {
            self.tokens[self.pos - 1].span
        }
    }

    fn eof_span(&self) -> Span {
        let mut line = 1;
        let mut column = 1;
        for c in self.text.chars() {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        Span { start: self.text.len(), end: self.text.len(), line, column }
    }

    fn describe_at(&self, idx: usize) -> String {
        match self.tokens.get(idx) {
            Some(t) => t.kind.describe(),
            None => "end of input".into(),
        }
    }

    fn diag_at(&self, idx: usize, message: String) -> Diagnostic {
        let span = match self.tokens.get(idx) {
            Some(t) => t.span,
            None => self.eof_span(),
        };
        let mut d = Diagnostic::error(span.line, span.column, message).with_source(self.text);
        if d.offending_text.is_empty() && idx > 0 {
            // at end of input, show the last line that had content
            let last = self.tokens[(idx - 1).min(self.tokens.len() - 1)].span;
            d.offending_text = self.text.lines().nth(last.line as usize - 1).unwrap_or("").trim().to_string();
        }
        d.with_hints(SYNTAX_HINTS)
    }

    fn error_expected(&mut self, expected: &str) {
        let msg = format!("Syntax error: expected {expected} but found {}", self.describe_at(self.pos));
        let d = self.diag_at(self.pos, msg);
        self.diags.push(d);
    }

    fn report_fail(&mut self, fail: Fail) {
        let msg = format!("Syntax error: expected {} but found {}", fail.expected, self.describe_at(fail.at));
        let mut d = self.diag_at(fail.at, msg);
        d.partial_tree = Some(render_parse_tree(&fail.partial));
        self.diags.push(d);
        self.pos = self.pos.max(fail.at);
    }

    fn lower_diag(&self, e: LowerError) -> Diagnostic {
        Diagnostic::error(e.span.line, e.span.column, format!("Syntax error: {}", e.message))
            .with_source(self.text)
            .with_hints(SYNTAX_HINTS)
    }

    fn at_header(&self, name: &str) -> bool {
        matches!(self.peek(), Some(TokenKind::Ident(s)) if s == name) && self.peek_at(1) == Some(&TokenKind::Colon)
    }

    fn at_any_header(&self) -> bool {
        [SORTS_HEADER, VOCABULARY_HEADER, CONSTRAINTS_HEADER].iter().any(|h| self.at_header(h))
    }

    fn expect_header(&mut self, name: &str) {
        if self.at_header(name) {
            self.pos += 2;
        } else {
            let span = self.span_here();
            let d = Diagnostic::error(span.line, span.column, format!("Missing section header `{name}:`"))
                .with_source(self.text)
                .with_hints(&[
                    "a problem consists of the sections `Sorts:`, `Vocabulary:` and `Constraints:`, in that order",
                ]);
            self.diags.push(d);
        }
    }

    /// Skips past the next `.`, stopping early at a section header, a
    /// closing brace (when inside a block) or end of input.
    fn sync(&mut self, in_block: bool) {
        while let Some(k) = self.peek() {
            if self.at_any_header() || (in_block && *k == TokenKind::RBrace) {
                return;
            }
            let k = k.clone();
            self.bump();
            if k == TokenKind::Period {
                return;
            }
        }
    }

    fn eat(&mut self, k: &TokenKind) -> bool {
        if self.peek() == Some(k) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<(String, Span)> {
        match self.tokens.get(self.pos) {
            Some(Token { kind: TokenKind::Ident(s), span }) => {
                let r = (s.clone(), *span);
                self.pos += 1;
                Some(r)
            }
            _ => None,
        }
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(TokenKind::Ident(s)) if s == kw)
    }

    fn problem(&mut self) -> Problem {
        let mut problem = Problem::default();
        self.expect_header(SORTS_HEADER);
        while self.pos < self.tokens.len() && !self.at_any_header() {
            match self.sort_decl() {
                Some(d) => problem.sorts.push(d),
                None => self.sync(false),
            }
        }
        self.expect_header(VOCABULARY_HEADER);
        while self.pos < self.tokens.len() && !self.at_any_header() {
            self.vocab_item(&mut problem.vocab);
        }
        self.expect_header(CONSTRAINTS_HEADER);
        let scope = Scope::from_declarations(&problem.sorts, &problem.vocab);
        while self.pos < self.tokens.len() {
            if self.at_any_header() {
                let span = self.span_here();
                let d = Diagnostic::error(span.line, span.column, "Unexpected section header after `Constraints:`")
                    .with_source(self.text);
                self.diags.push(d);
                self.pos += 2;
                continue;
            }
            if let Some(c) = self.constraint(&scope, problem.constraints.len()) {
                problem.constraints.push(c);
            }
        }
        problem
    }

    fn sort_decl(&mut self) -> Option<SortDecl> {
        let start = self.span_here();
        let Some((name, _)) = self.ident() else {
            self.error_expected("a sort name");
            return None;
        };
        let kind = if self.eat(&TokenKind::Period) {
            SortKind::Open
        } else if self.keyword("enum") && self.peek_at(1) == Some(&TokenKind::Colon) {
            self.pos += 2;
            let mut elems = Vec::new();
            loop {
                let Some((e, _)) = self.ident() else {
                    self.error_expected("an enumeration element");
                    return None;
                };
                elems.push(e);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            if !self.eat(&TokenKind::Period) {
                self.error_expected("`,` or `.`");
                return None;
            }
            SortKind::Enum(elems)
        } else if self.keyword("int") && self.peek_at(1) == Some(&TokenKind::Colon) {
            self.pos += 2;
            let lo = self.signed_int()?;
            if !self.eat(&TokenKind::DotDot) {
                self.error_expected("`..`");
                return None;
            }
            let hi = self.signed_int()?;
            if !self.eat(&TokenKind::Period) {
                self.error_expected("`.`");
                return None;
            }
            SortKind::IntRange { lo, hi }
        } else {
            self.error_expected("`.`, `enum:` or `int:` after the sort name");
            return None;
        };
        Some(SortDecl { name, kind, span: join(start, self.prev_span()) })
    }

    fn signed_int(&mut self) -> Option<i64> {
        let negative = self.eat(&TokenKind::Minus);
        match self.peek() {
            Some(TokenKind::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Some(if negative { -n } else { n })
            }
            _ => {
                self.error_expected("an integer");
                None
            }
        }
    }

    fn vocab_item(&mut self, vocab: &mut Vocabulary) {
        if self.keyword("predicate") || self.keyword("function") {
            let is_pred = self.keyword("predicate");
            self.pos += 1;
            if !self.eat(&TokenKind::LBrace) {
                self.error_expected("`{`");
                self.sync(false);
                return;
            }
            loop {
                match self.peek() {
                    Some(TokenKind::RBrace) => {
                        self.pos += 1;
                        return;
                    }
                    None => {
                        self.error_expected("`}` to close the declaration block");
                        return;
                    }
                    _ if self.at_any_header() => {
                        self.error_expected("`}` to close the declaration block");
                        return;
                    }
                    _ => {}
                }
                let ok = if is_pred { self.pred_decl(vocab) } else { self.func_decl(vocab) };
                if !ok {
                    self.sync(true);
                }
            }
        } else if self.keyword("name") {
            let start = self.span_here();
            self.pos += 1;
            let parsed = (|| {
                let (name, _) = self.ident().or_else(|| {
                    self.error_expected("a name");
                    None
                })?;
                if !self.eat(&TokenKind::Colon) {
                    self.error_expected("`:`");
                    return None;
                }
                let (sort, _) = self.ident().or_else(|| {
                    self.error_expected("a sort name");
                    None
                })?;
                if !self.eat(&TokenKind::Period) {
                    self.error_expected("`.`");
                    return None;
                }
                Some((name, sort))
            })();
            match parsed {
                Some((name, sort)) => vocab.names.push(NameDecl { name, sort, span: join(start, self.prev_span()) }),
                None => self.sync(false),
            }
        } else {
            self.error_expected("`predicate {`, `function {` or `name`");
            self.sync(false);
        }
    }

    fn sort_list(&mut self) -> Option<Vec<String>> {
        let mut sorts = Vec::new();
        loop {
            let Some((s, _)) = self.ident() else {
                self.error_expected("a sort name");
                return None;
            };
            sorts.push(s);
            if self.eat(&TokenKind::RParen) {
                return Some(sorts);
            }
            if !self.eat(&TokenKind::Comma) {
                self.error_expected("`,` or `)`");
                return None;
            }
        }
    }

    fn pred_decl(&mut self, vocab: &mut Vocabulary) -> bool {
        let start = self.span_here();
        let Some((name, _)) = self.ident() else {
            self.error_expected("a predicate declaration");
            return false;
        };
        let args = if self.eat(&TokenKind::LParen) {
            match self.sort_list() {
                Some(a) => a,
                None => return false,
            }
        } else {
            Vec::new()
        };
        if !self.eat(&TokenKind::Period) {
            self.error_expected("`.`");
            return false;
        }
        vocab.predicates.push(PredDecl { name, args, span: join(start, self.prev_span()) });
        true
    }

    fn func_decl(&mut self, vocab: &mut Vocabulary) -> bool {
        let start = self.span_here();
        let Some((name, _)) = self.ident() else {
            self.error_expected("a function declaration");
            return false;
        };
        if !self.eat(&TokenKind::LParen) {
            self.error_expected("`(` (declare constants with `name`)");
            return false;
        }
        let Some(args) = self.sort_list() else {
            return false;
        };
        if !self.eat(&TokenKind::Colon) {
            self.error_expected("`:` and the result sort");
            return false;
        }
        let Some((result, _)) = self.ident() else {
            self.error_expected("a result sort");
            return false;
        };
        if !self.eat(&TokenKind::Period) {
            self.error_expected("`.`");
            return false;
        }
        vocab.functions.push(FuncDecl { name, args, result, span: join(start, self.prev_span()) });
        true
    }

    fn constraint(&mut self, scope: &Scope, index: usize) -> Option<Constraint> {
        let first = self.pos;
        let node = match self.formula_node() {
            Ok(n) => n,
            Err(fail) => {
                self.report_fail(fail);
                if self.pos == first {
                    self.pos += 1;
                }
                self.sync(false);
                return None;
            }
        };
        let span = join(self.tokens[first].span, self.prev_span());
        if !self.eat(&TokenKind::Period) {
            let mut d = self.diag_at(
                self.pos,
                format!(
                    "Syntax error: expected `.` at the end of the constraint but found {}",
                    self.describe_at(self.pos)
                ),
            );
            d.partial_tree = Some(render_parse_tree(&node));
            self.diags.push(d);
            self.sync(false);
            return None;
        }
        match scope.lower_formula(&node, &mut Vec::new()) {
            Ok(formula) => Some(Constraint { formula, span, index }),
            Err(e) => {
                let d = self.lower_diag(e);
                self.diags.push(d);
                None
            }
        }
    }

    fn formula_node(&mut self) -> PResult {
        self.binary(1)
    }

    fn fail(&self, expected: &str, partial: Node) -> Fail {
        Fail { at: self.pos, expected: expected.into(), partial }
    }

    fn binary(&mut self, min: u8) -> PResult {
        let mut lhs = self.prefix()?;
        loop {
            let (op, prec, right_assoc) = match self.peek() {
                Some(TokenKind::Iff) => (BinOp::Iff, 1, false),
                Some(TokenKind::Implies) => (BinOp::Implies, 2, true),
                Some(TokenKind::Or) => (BinOp::Or, 3, false),
                Some(TokenKind::And) => (BinOp::And, 4, false),
                _ => break,
            };
            if prec < min {
                break;
            }
            self.pos += 1;
            let next = if right_assoc { prec } else { prec + 1 };
            match self.binary(next) {
                Ok(rhs) => {
                    let span = join(lhs.span, rhs.span);
                    lhs = Node::new(NodeKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
                }
                Err(mut f) => {
                    let span = join(lhs.span, f.partial.span);
                    f.partial = Node::new(NodeKind::Binary(op, Box::new(lhs), Box::new(f.partial)), span);
                    return Err(f);
                }
            }
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> PResult {
        let start = self.span_here();
        match self.peek() {
            Some(TokenKind::Not) => {
                self.pos += 1;
                match self.prefix() {
                    Ok(g) => Ok(Node::new(NodeKind::Not(Box::new(g.clone())), join(start, g.span))),
                    Err(mut f) => {
                        f.partial = Node::new(NodeKind::Not(Box::new(f.partial)), start);
                        Err(f)
                    }
                }
            }
            Some(TokenKind::Forall) | Some(TokenKind::Exists) => {
                let q = if self.peek() == Some(&TokenKind::Forall) { Quantifier::All } else { Quantifier::Some };
                self.pos += 1;
                let mut vars = Vec::new();
                let mut sort = None;
                let quant = |vars: Vec<String>, sort: Option<String>, body: Node| {
                    let span = join(start, body.span);
                    Node::new(NodeKind::Quant { q, vars, sort, body: Box::new(body) }, span)
                };
                loop {
                    match self.ident() {
                        Some((v, _)) => vars.push(v),
                        None => {
                            let f = self.fail("a variable after the quantifier", Node::missing(self.span_here()));
                            return Err(Fail { partial: quant(vars, sort, f.partial), ..f });
                        }
                    }
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
                if self.eat(&TokenKind::Colon) {
                    match self.ident() {
                        Some((s, _)) => sort = Some(s),
                        None => {
                            let f = self.fail("a sort name", Node::missing(self.span_here()));
                            return Err(Fail { partial: quant(vars, sort, f.partial), ..f });
                        }
                    }
                }
                match self.prefix() {
                    Ok(body) => Ok(quant(vars, sort, body)),
                    Err(f) => Err(Fail { partial: quant(vars, sort, f.partial.clone()), ..f }),
                }
            }
            _ => self.comparison(),
        }
    }

    fn comparison(&mut self) -> PResult {
        let lhs = self.additive()?;
        let op = match self.peek() {
            Some(TokenKind::Eq) => BinOp::Eq,
            Some(TokenKind::Neq) => BinOp::Neq,
            Some(TokenKind::Lt) => BinOp::Cmp(CmpOp::Lt),
            Some(TokenKind::Le) => BinOp::Cmp(CmpOp::Le),
            Some(TokenKind::Gt) => BinOp::Cmp(CmpOp::Gt),
            Some(TokenKind::Ge) => BinOp::Cmp(CmpOp::Ge),
            _ => return Ok(lhs),
        };
        self.pos += 1;
        self.rhs_of(op, lhs, Self::additive)
    }

    fn rhs_of(&mut self, op: BinOp, lhs: Node, next: fn(&mut Self) -> PResult) -> PResult {
        match next(self) {
            Ok(rhs) => {
                let span = join(lhs.span, rhs.span);
                Ok(Node::new(NodeKind::Binary(op, Box::new(lhs), Box::new(rhs)), span))
            }
            Err(mut f) => {
                let span = join(lhs.span, f.partial.span);
                f.partial = Node::new(NodeKind::Binary(op, Box::new(lhs), Box::new(f.partial)), span);
                Err(f)
            }
        }
    }

    fn additive(&mut self) -> PResult {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Plus) => ArithOp::Add,
                Some(TokenKind::Minus) => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = self.rhs_of(BinOp::Arith(op), lhs, Self::multiplicative)?;
        }
    }

    fn multiplicative(&mut self) -> PResult {
        let mut lhs = self.primary()?;
        while self.peek() == Some(&TokenKind::Star) {
            self.pos += 1;
            lhs = self.rhs_of(BinOp::Arith(ArithOp::Mul), lhs, Self::primary)?;
        }
        Ok(lhs)
    }

    fn primary(&mut self) -> PResult {
        let start = self.span_here();
        match self.peek().cloned() {
            Some(TokenKind::Ident(head)) => {
                self.pos += 1;
                if !self.eat(&TokenKind::LParen) {
                    return Ok(Node::new(NodeKind::Ident(head), start));
                }
                let mut args = Vec::new();
                if self.eat(&TokenKind::RParen) {
                    return Ok(Node::new(NodeKind::App { head, args, closed: true }, join(start, self.prev_span())));
                }
                loop {
                    match self.binary(1) {
                        Ok(a) => args.push(a),
                        Err(mut f) => {
                            args.push(f.partial);
                            f.partial = Node::new(NodeKind::App { head, args, closed: false }, start);
                            return Err(f);
                        }
                    }
                    if self.eat(&TokenKind::Comma) {
                        continue;
                    }
                    if self.eat(&TokenKind::RParen) {
                        return Ok(Node::new(
                            NodeKind::App { head, args, closed: true },
                            join(start, self.prev_span()),
                        ));
                    }
                    let partial = Node::new(NodeKind::App { head, args, closed: false }, start);
                    return Err(self.fail("`,` or `)`", partial));
                }
            }
            Some(TokenKind::Int(n)) => {
                self.pos += 1;
                Ok(Node::new(NodeKind::Int(n), start))
            }
            Some(TokenKind::Minus) if matches!(self.peek_at(1), Some(TokenKind::Int(_))) => {
                let Some(TokenKind::Int(n)) = self.peek_at(1).cloned() else { unreachable!() };
                self.pos += 2;
                Ok(Node::new(NodeKind::Int(-n), join(start, self.prev_span())))
            }
            Some(TokenKind::True) => {
                self.pos += 1;
                Ok(Node::new(NodeKind::True, start))
            }
            Some(TokenKind::False) => {
                self.pos += 1;
                Ok(Node::new(NodeKind::False, start))
            }
            Some(TokenKind::LParen) => {
                self.pos += 1;
                match self.binary(1) {
                    Ok(inner) => {
                        if self.eat(&TokenKind::RParen) {
                            let mut inner = inner;
                            inner.span = join(start, self.prev_span());
                            Ok(inner)
                        } else {
                            let partial = Node::new(NodeKind::OpenGroup(Box::new(inner)), start);
                            Err(self.fail("`)`", partial))
                        }
                    }
                    Err(mut f) => {
                        f.partial = Node::new(NodeKind::OpenGroup(Box::new(f.partial)), start);
                        Err(f)
                    }
                }
            }
            _ => Err(self.fail("a formula or term", Node::missing(start))),
        }
    }
}
