//! Raw parse trees, as produced by the formula parser before identifiers
//! are resolved. Incomplete trees are what syntax errors display.

use crate::lang::{ArithOp, CmpOp, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Iff,
    Implies,
    Or,
    And,
    Eq,
    Neq,
    Cmp(CmpOp),
    Arith(ArithOp),
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Iff => "<->",
            BinOp::Implies => "->",
            BinOp::Or => "|",
            BinOp::And => "&",
            BinOp::Eq => "=",
            BinOp::Neq => "/=",
            BinOp::Cmp(op) => op.symbol(),
            BinOp::Arith(op) => op.symbol(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantifier {
    All,
    Some,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Ident(String),
    Int(i64),
    True,
    False,
    App {
        head: String,
        args: Vec<Node>,
        closed: bool,
    },
    Not(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Quant {
        q: Quantifier,
        vars: Vec<String>,
        sort: Option<String>,
        body: Box<Node>,
    },
    /// A parenthesised group whose closing `)` never arrived.
    OpenGroup(Box<Node>),
    /// Placeholder for the part the parser could not read.
    Missing,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub kind: NodeKind,
    pub span: Span,
}

impl Node {
    pub fn new(kind: NodeKind, span: Span) -> Self {
        Node { kind, span }
    }

    pub fn missing(span: Span) -> Self {
        Node { kind: NodeKind::Missing, span }
    }
}

/// Indented one-node-per-line rendering, two spaces per level.
pub fn render_parse_tree(node: &Node) -> String {
    let mut out = String::new();
    write_node(&mut out, node, 0);
    out
}

fn line(out: &mut String, depth: usize, text: &str) {
    for _ in 0..depth {
        out.push_str("  ");
    }
    out.push_str(text);
    out.push('\n');
}

fn write_node(out: &mut String, node: &Node, depth: usize) {
    match &node.kind {
        NodeKind::Ident(s) => line(out, depth, s),
        NodeKind::Int(n) => line(out, depth, &n.to_string()),
        NodeKind::True => line(out, depth, "true"),
        NodeKind::False => line(out, depth, "false"),
        NodeKind::App { head, args, closed } => {
            line(out, depth, head);
            for a in args {
                write_node(out, a, depth + 1);
            }
            if !closed {
                line(out, depth + 1, "<unclosed argument list>");
            }
        }
        NodeKind::Not(g) => {
            line(out, depth, "~");
            write_node(out, g, depth + 1);
        }
        NodeKind::Binary(op, a, b) => {
            line(out, depth, op.symbol());
            write_node(out, a, depth + 1);
            write_node(out, b, depth + 1);
        }
        NodeKind::Quant { q, vars, sort, body } => {
            let mut head = String::from(match q {
                Quantifier::All => "ALL ",
                Quantifier::Some => "SOME ",
            });
            head.push_str(&vars.join(", "));
            if let Some(s) = sort {
                head.push_str(": ");
                head.push_str(s);
            }
            line(out, depth, &head);
            write_node(out, body, depth + 1);
        }
        NodeKind::OpenGroup(g) => {
            line(out, depth, "(");
            write_node(out, g, depth + 1);
            line(out, depth + 1, "<unclosed parenthesis>");
        }
        NodeKind::Missing => line(out, depth, "<missing>"),
    }
}
