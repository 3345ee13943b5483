//! Seeded generator of tiny well-typed problems, shared by the property
//! tests.
#![allow(dead_code)]

use lff_core::evaluator::{brute_force_models, space_size};
use lff_core::interp::size_vectors;
use lff_core::{check, parse_problem, DomainAssignment, TypedProblem};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub enum SortGen {
    Open(String),
    Enum(String, Vec<String>),
    Int(String, i64, i64),
}

impl SortGen {
    fn name(&self) -> &str {
        match self {
            SortGen::Open(n) | SortGen::Enum(n, _) | SortGen::Int(n, ..) => n,
        }
    }
}

#[derive(Clone, Debug)]
enum Sym {
    Pred(String, Vec<usize>),
    Func(String, Vec<usize>, usize),
    Name(String, usize),
}

pub struct Gen {
    pub sorts: Vec<SortGen>,
    syms: Vec<Sym>,
    next_var: usize,
}

pub struct Shape {
    pub max_symbols: usize,
    pub max_constraints: usize,
    pub depth: u32,
}

pub const TINY: Shape = Shape { max_symbols: 3, max_constraints: 3, depth: 3 };

impl Gen {
    pub fn new(rng: &mut ChaCha8Rng, shape: &Shape) -> Gen {
        let mut sorts = Vec::new();
        let n_sorts = rng.gen_range(1..=2);
        for i in 0..n_sorts {
            sorts.push(match rng.gen_range(0..3) {
                0 => SortGen::Open(format!("s{i}")),
                1 => {
                    let n = rng.gen_range(1..=3);
                    SortGen::Enum(format!("e{i}"), (0..n).map(|k| format!("c{i}{k}")).collect())
                }
                _ => {
                    let lo = rng.gen_range(-1..=1);
                    SortGen::Int(format!("n{i}"), lo, lo + rng.gen_range(0..=2))
                }
            });
        }
        let mut syms = Vec::new();
        let n_syms = rng.gen_range(1..=shape.max_symbols);
        for i in 0..n_syms {
            let arity = rng.gen_range(0..=2);
            let args: Vec<usize> = (0..arity).map(|_| rng.gen_range(0..n_sorts)).collect();
            let kind = rng.gen_range(0..5);
            syms.push(match kind {
                0 | 1 => Sym::Pred(format!("p{i}"), args),
                2 | 3 => {
                    // constants are names, so functions take one argument
                    Sym::Func(format!("f{i}"), vec![rng.gen_range(0..n_sorts)], rng.gen_range(0..n_sorts))
                }
                _ => Sym::Name(format!("m{i}"), rng.gen_range(0..n_sorts)),
            });
        }
        Gen { sorts, syms, next_var: 0 }
    }

    pub fn header(&self) -> String {
        let mut out = String::from("Sorts:\n");
        for s in &self.sorts {
            match s {
                SortGen::Open(n) => out.push_str(&format!("  {n}.\n")),
                SortGen::Enum(n, e) => out.push_str(&format!("  {n} enum: {}.\n", e.join(", "))),
                SortGen::Int(n, lo, hi) => out.push_str(&format!("  {n} int: {lo} .. {hi}.\n")),
            }
        }
        out.push_str("Vocabulary:\n");
        let sorts =
            |args: &[usize]| args.iter().map(|a| self.sorts[*a].name().to_string()).collect::<Vec<_>>().join(", ");
        for s in &self.syms {
            match s {
                Sym::Pred(p, a) if a.is_empty() => out.push_str(&format!("  predicate {{ {p}. }}\n")),
                Sym::Pred(p, a) => out.push_str(&format!("  predicate {{ {p}({}). }}\n", sorts(a))),
                Sym::Func(f, a, r) => {
                    out.push_str(&format!("  function {{ {f}({}): {}. }}\n", sorts(a), self.sorts[*r].name()))
                }
                Sym::Name(m, s) => out.push_str(&format!("  name {m}: {}.\n", self.sorts[*s].name())),
            }
        }
        out.push_str("Constraints:\n");
        out
    }

    /// A term of `sort`, or `None` if nothing of that sort is at hand.
    fn term(&mut self, rng: &mut ChaCha8Rng, sort: usize, env: &[(String, usize)], depth: u32) -> Option<String> {
        let mut options: Vec<String> = env.iter().filter(|(_, s)| *s == sort).map(|(v, _)| v.clone()).collect();
        for s in &self.syms {
            if let Sym::Name(m, ms) = s {
                if *ms == sort {
                    options.push(m.clone());
                }
            }
        }
        match &self.sorts[sort] {
            SortGen::Enum(_, e) => options.push(e.choose(rng).unwrap().clone()),
            SortGen::Int(_, lo, hi) => options.push(rng.gen_range(*lo..=*hi + 1).to_string()),
            SortGen::Open(_) => {}
        }
        let funcs: Vec<(String, Vec<usize>)> = self
            .syms
            .iter()
            .filter_map(|s| match s {
                Sym::Func(f, a, r) if *r == sort => Some((f.clone(), a.clone())),
                _ => None,
            })
            .collect();
        if depth > 0 && !funcs.is_empty() && (options.is_empty() || rng.gen_bool(0.4)) {
            let (f, args) = funcs.choose(rng).unwrap().clone();
            let a: Option<Vec<String>> = args.iter().map(|s| self.term(rng, *s, env, depth - 1)).collect();
            return Some(format!("{f}({})", a?.join(", ")));
        }
        if matches!(self.sorts[sort], SortGen::Int(..)) && depth > 0 && rng.gen_bool(0.2) {
            let t = self.term(rng, sort, env, depth - 1)?;
            let op = ["+", "-"].choose(rng).unwrap();
            return Some(format!("({t} {op} 1)"));
        }
        options.choose(rng).cloned()
    }

    fn atom(&mut self, rng: &mut ChaCha8Rng, env: &[(String, usize)], depth: u32) -> String {
        for _ in 0..8 {
            let choice = rng.gen_range(0..4);
            let s = match choice {
                0 | 1 => {
                    let preds: Vec<(String, Vec<usize>)> = self
                        .syms
                        .iter()
                        .filter_map(|s| match s {
                            Sym::Pred(p, a) => Some((p.clone(), a.clone())),
                            _ => None,
                        })
                        .collect();
                    let Some((p, args)) = preds.choose(rng).cloned() else { continue };
                    if args.is_empty() {
                        p
                    } else {
                        let a: Option<Vec<String>> = args.iter().map(|s| self.term(rng, *s, env, depth)).collect();
                        let Some(a) = a else { continue };
                        format!("{p}({})", a.join(", "))
                    }
                }
                _ => {
                    let sort = rng.gen_range(0..self.sorts.len());
                    let (Some(a), Some(b)) = (self.term(rng, sort, env, depth), self.term(rng, sort, env, depth))
                    else {
                        continue;
                    };
                    let ops: &[&str] = if matches!(self.sorts[sort], SortGen::Int(..)) {
                        &["=", "/=", "<", "<=", ">"]
                    } else {
                        &["=", "/="]
                    };
                    format!("{a} {} {b}", ops.choose(rng).unwrap())
                }
            };
            return s;
        }
        ["true", "false"].choose(rng).unwrap().to_string()
    }

    pub fn formula(&mut self, rng: &mut ChaCha8Rng, env: &mut Vec<(String, usize)>, depth: u32) -> String {
        if depth == 0 || rng.gen_bool(0.25) {
            return self.atom(rng, env, 1);
        }
        match rng.gen_range(0..6) {
            0 => format!("~{}", self.formula(rng, env, depth - 1)),
            1 | 2 => {
                let op = ["&", "|", "->", "<->"].choose(rng).unwrap();
                let a = self.formula(rng, env, depth - 1);
                let b = self.formula(rng, env, depth - 1);
                format!("({a} {op} {b})")
            }
            _ => {
                let q = ["ALL", "SOME"].choose(rng).unwrap();
                let sort = rng.gen_range(0..self.sorts.len());
                let v = format!("x{}", self.next_var);
                self.next_var += 1;
                env.push((v.clone(), sort));
                let body = self.formula(rng, env, depth - 1);
                env.pop();
                format!("{q} {v}: {} ({body})", self.sorts[sort].name())
            }
        }
    }

    pub fn constraint(&mut self, rng: &mut ChaCha8Rng, depth: u32) -> String {
        self.formula(rng, &mut Vec::new(), depth)
    }

    pub fn problem(&mut self, rng: &mut ChaCha8Rng, n: usize, depth: u32) -> String {
        let mut text = self.header();
        for _ in 0..n {
            text.push_str(&format!("  {}.\n", self.constraint(rng, depth)));
        }
        text
    }
}

/// A random tiny problem that type-checks, with its text.
pub fn tiny_problem(rng: &mut ChaCha8Rng, shape: &Shape) -> (String, TypedProblem) {
    loop {
        let mut g = Gen::new(rng, shape);
        let n = rng.gen_range(1..=shape.max_constraints);
        let text = g.problem(rng, n, shape.depth);
        let Ok(p) = parse_problem(&text) else { panic!("generated text does not parse:\n{text}") };
        if let Ok(tp) = check(&p, &text) {
            return (text, tp);
        }
    }
}

/// Over-constrained instances: few symbols, many shallow constraints.
pub const OVER: Shape = Shape { max_symbols: 2, max_constraints: 6, depth: 2 };

pub fn restrict(tp: &TypedProblem, keep: &[usize]) -> TypedProblem {
    let mut out = tp.clone();
    out.problem.constraints = keep.iter().map(|&i| tp.problem.constraints[i].clone()).collect();
    for (k, c) in out.problem.constraints.iter_mut().enumerate() {
        c.index = k;
    }
    out
}

/// Random problems with no model at their smallest domain assignment. With
/// `pairwise`, each constraint on its own has a model, so every core has at
/// least two members.
pub fn unsat_instances(seed: u64, wanted: usize, pairwise: bool) -> Vec<(String, TypedProblem, DomainAssignment)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < wanted {
        tries += 1;
        assert!(tries < 500 * wanted, "too few unsatisfiable instances");
        let mut g = Gen::new(&mut rng, &OVER);
        let n = rng.gen_range(3..=6);
        let depth = rng.gen_range(1..=2);
        let text = g.problem(&mut rng, n, depth);
        let Ok(tp) = check(&parse_problem(&text).unwrap(), &text) else { continue };
        let da = size_vectors(&tp.symbols, &Default::default()).remove(0);
        if space_size(&tp.symbols, &da) > 4096 {
            continue;
        }
        if pairwise && (0..n).any(|i| brute_force_models(&restrict(&tp, &[i]), &da, 1).unwrap().is_empty()) {
            continue;
        }
        if brute_force_models(&tp, &da, 1).unwrap().is_empty() {
            out.push((text, tp, da));
        }
    }
    out
}
