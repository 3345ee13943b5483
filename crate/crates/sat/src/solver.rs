use std::time::Instant;

use crate::check;
use crate::heap::VarOrder;
use crate::lit::{LBool, Lit, Var};
use crate::Cnf;

/// Resource limits for one `solve` call. Whichever trips first yields
/// [`SatResult::Unknown`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Budget {
    pub deadline: Option<Instant>,
    pub max_conflicts: Option<u64>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn with_deadline(deadline: Instant) -> Self {
        Budget { deadline: Some(deadline), max_conflicts: None }
    }

    pub fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnknownReason {
    Timeout,
    ConflictBudget,
}

/// A total assignment, indexed by variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Model(pub Vec<bool>);

impl Model {
    pub fn value(&self, v: Var) -> bool {
        self.0[v.index()]
    }

    pub fn lit_value(&self, l: Lit) -> bool {
        self.value(l.var()) == l.is_positive()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat(Model),
    /// `failed` is a subset of the assumptions that is unsatisfiable together
    /// with the clause set. Empty when the clauses alone are unsatisfiable.
    Unsat {
        failed: Vec<Lit>,
    },
    Unknown(UnknownReason),
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SatResult::Unsat { .. })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    pub var_decay: f64,
    pub restart_base: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { var_decay: 0.95, restart_base: 64 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
}

struct Clause {
    lits: Vec<Lit>,
}

#[derive(Clone, Copy)]
struct Watcher {
    cref: usize,
    blocker: Lit,
}

/// Solves `cnf` under `assumptions` with a fresh solver.
pub fn solve(cnf: &Cnf, assumptions: &[Lit], budget: &Budget) -> SatResult {
    let mut solver = Solver::from_cnf(cnf);
    solver.solve_with(assumptions, budget)
}

/// CDCL search: two watched literals, first-UIP learning, activity-based
/// branching with phase saving, Luby restarts. Learnt clauses are kept.
pub struct Solver {
    config: SolverConfig,
    clauses: Vec<Clause>,
    original: Vec<Vec<Lit>>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<LBool>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    order: VarOrder,
    polarity: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
    stats: SolverStats,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new(SolverConfig::default())
    }
}

#[inline]
fn lit_value(assigns: &[LBool], l: Lit) -> LBool {
    match assigns[l.var().index()] {
        LBool::Undef => LBool::Undef,
        LBool::True if l.is_positive() => LBool::True,
        LBool::False if !l.is_positive() => LBool::True,
        _ => LBool::False,
    }
}

fn luby(y: f64, mut x: u64) -> f64 {
    let mut size = 1u64;
    let mut seq = 0i32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq)
}

impl Solver {
    pub fn new(config: SolverConfig) -> Self {
        Solver {
            config,
            clauses: Vec::new(),
            original: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            order: VarOrder::default(),
            polarity: Vec::new(),
            seen: Vec::new(),
            ok: true,
            stats: SolverStats::default(),
        }
    }

    pub fn from_cnf(cnf: &Cnf) -> Self {
        let mut s = Solver::default();
        s.reserve_vars(cnf.num_vars);
        for c in &cnf.clauses {
            s.add_clause(c);
        }
        s
    }

    pub fn num_vars(&self) -> u32 {
        self.assigns.len() as u32
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    pub fn new_var(&mut self) -> Var {
        let v = Var(self.assigns.len() as u32);
        self.assigns.push(LBool::Undef);
        self.level.push(0);
        self.reason.push(None);
        self.activity.push(0.0);
        self.polarity.push(false);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.order.insert(v, &self.activity);
        v
    }

    /// Ensures variables `0..n` exist.
    pub fn reserve_vars(&mut self, n: u32) {
        while self.num_vars() < n {
            self.new_var();
        }
    }

    /// Adds a clause at decision level 0. Returns `false` once the clause set
    /// is known to be unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        self.cancel_until(0);
        for l in lits {
            self.reserve_vars(l.var().0 + 1);
        }
        self.original.push(lits.to_vec());
        if !self.ok {
            return false;
        }
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) {
            return true;
        }
        let mut kept = Vec::with_capacity(c.len());
        for &l in &c {
            match lit_value(&self.assigns, l) {
                LBool::True => return true,
                LBool::False => {}
                LBool::Undef => kept.push(l),
            }
        }
        match kept.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(kept[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                self.attach(kept);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>) -> usize {
        let cref = self.clauses.len();
        self.watches[lits[0].code()].push(Watcher { cref, blocker: lits[1] });
        self.watches[lits[1].code()].push(Watcher { cref, blocker: lits[0] });
        self.clauses.push(Clause { lits });
        cref
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var().index();
        debug_assert_eq!(self.assigns[v], LBool::Undef);
        self.assigns[v] = if l.is_positive() { LBool::True } else { LBool::False };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let stop = self.trail_lim[lvl as usize];
        for i in (stop..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            self.assigns[v.index()] = LBool::Undef;
            self.reason[v.index()] = None;
            self.polarity[v.index()] = l.is_positive();
            self.order.insert(v, &self.activity);
        }
        self.trail.truncate(stop);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = self.trail.len();
    }

    /// Unit propagation; returns the conflicting clause, if any.
    fn propagate(&mut self) -> Option<usize> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if lit_value(&self.assigns, w.blocker) == LBool::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let lits = &mut self.clauses[w.cref].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                if first != w.blocker && lit_value(&self.assigns, first) == LBool::True {
                    ws[j] = Watcher { cref: w.cref, blocker: first };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..lits.len() {
                    if lit_value(&self.assigns, lits[k]) != LBool::False {
                        lits.swap(1, k);
                        let new_watch = lits[1];
                        self.watches[new_watch.code()].push(Watcher { cref: w.cref, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher { cref: w.cref, blocker: first };
                j += 1;
                if lit_value(&self.assigns, first) == LBool::False {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                    self.qhead = self.trail.len();
                } else {
                    self.enqueue(first, Some(w.cref));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn bump(&mut self, v: Var) {
        self.activity[v.index()] += self.var_inc;
        if self.activity[v.index()] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.increased(v, &self.activity);
    }

    fn decay(&mut self) {
        self.var_inc /= self.config.var_decay;
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first, highest remaining level second) and the backjump level.
    fn analyze(&mut self, mut cref: usize) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit::new(Var(0), true)];
        let mut pending = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        loop {
            let start = usize::from(p.is_some());
            let n = self.clauses[cref].lits.len();
            for k in start..n {
                let q = self.clauses[cref].lits[k];
                let v = q.var();
                if !self.seen[v.index()] && self.level[v.index()] > 0 {
                    self.bump(v);
                    self.seen[v.index()] = true;
                    if self.level[v.index()] >= self.decision_level() {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] {
                    break;
                }
            }
            let pl = self.trail[index];
            p = Some(pl);
            self.seen[pl.var().index()] = false;
            pending -= 1;
            if pending == 0 {
                break;
            }
            cref = self.reason[pl.var().index()].expect("implied literal has a reason");
        }
        learnt[0] = !p.unwrap();

        // Drop literals whose reason is entirely subsumed by the clause.
        let marked: Vec<Lit> = learnt.clone();
        let mut minimized = vec![learnt[0]];
        for &q in &learnt[1..] {
            let redundant = match self.reason[q.var().index()] {
                None => false,
                Some(r) => self.clauses[r].lits[1..].iter().all(|l| {
                    let v = l.var().index();
                    self.seen[v] || self.level[v] == 0
                }),
            };
            if !redundant {
                minimized.push(q);
            }
        }
        for l in &marked {
            self.seen[l.var().index()] = false;
        }
        let mut learnt = minimized;

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var().index()] > self.level[learnt[max_i].var().index()] {
                    max_i = k;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var().index()]
        };
        (learnt, bt)
    }

    /// Collects the assumptions responsible for `p` (an assumption) being
    /// false under the current trail.
    fn analyze_final(&mut self, p: Lit) -> Vec<Lit> {
        let mut core = vec![p];
        if self.decision_level() == 0 {
            return core;
        }
        self.seen[p.var().index()] = true;
        let start = self.trail_lim[0];
        for i in (start..self.trail.len()).rev() {
            let x = self.trail[i];
            let v = x.var().index();
            if !self.seen[v] {
                continue;
            }
            match self.reason[v] {
                None => core.push(x),
                Some(r) => {
                    for k in 1..self.clauses[r].lits.len() {
                        let q = self.clauses[r].lits[k].var().index();
                        if self.level[q] > 0 {
                            self.seen[q] = true;
                        }
                    }
                }
            }
            self.seen[v] = false;
        }
        self.seen[p.var().index()] = false;
        core
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.order.pop(&self.activity) {
            if self.assigns[v.index()] == LBool::Undef {
                return Some(Lit::new(v, self.polarity[v.index()]));
            }
        }
        None
    }

    fn search(
        &mut self,
        restart_after: u64,
        assumptions: &[Lit],
        budget: &Budget,
        conflicts_at_start: u64,
    ) -> Option<SatResult> {
        let mut local_conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                local_conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Some(SatResult::Unsat { failed: Vec::new() });
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let asserting = learnt[0];
                    let cref = self.attach(learnt);
                    self.enqueue(asserting, Some(cref));
                }
                self.decay();
                if let Some(max) = budget.max_conflicts {
                    if self.stats.conflicts - conflicts_at_start >= max {
                        return Some(SatResult::Unknown(UnknownReason::ConflictBudget));
                    }
                }
            } else {
                if local_conflicts >= restart_after {
                    self.cancel_until(0);
                    return None;
                }
                if budget.expired() {
                    return Some(SatResult::Unknown(UnknownReason::Timeout));
                }
                let mut next = None;
                while (self.decision_level() as usize) < assumptions.len() {
                    let a = assumptions[self.decision_level() as usize];
                    match lit_value(&self.assigns, a) {
                        LBool::True => self.trail_lim.push(self.trail.len()),
                        LBool::False => {
                            let failed = self.analyze_final(a);
                            return Some(SatResult::Unsat { failed });
                        }
                        LBool::Undef => {
                            next = Some(a);
                            break;
                        }
                    }
                }
                let next = match next {
                    Some(l) => l,
                    None => match self.pick_branch() {
                        Some(l) => {
                            self.stats.decisions += 1;
                            l
                        }
                        None => {
                            let model = Model(self.assigns.iter().map(|&a| a == LBool::True).collect());
                            assert!(
                                check::check_model(&self.original, &model.0),
                                "solver produced an assignment violating an input clause"
                            );
                            return Some(SatResult::Sat(model));
                        }
                    },
                };
                self.trail_lim.push(self.trail.len());
                self.enqueue(next, None);
            }
        }
    }

    /// Solves under `assumptions`. The solver stays usable afterwards; more
    /// clauses may be added and it may be solved again.
    pub fn solve_with(&mut self, assumptions: &[Lit], budget: &Budget) -> SatResult {
        self.cancel_until(0);
        for a in assumptions {
            self.reserve_vars(a.var().0 + 1);
        }
        if !self.ok {
            return SatResult::Unsat { failed: Vec::new() };
        }
        if budget.expired() {
            return SatResult::Unknown(UnknownReason::Timeout);
        }
        let start = self.stats.conflicts;
        let mut restarts = 0u64;
        let result = loop {
            let limit = (luby(2.0, restarts) * self.config.restart_base as f64) as u64;
            match self.search(limit, assumptions, budget, start) {
                Some(r) => break r,
                None => {
                    restarts += 1;
                    self.stats.restarts += 1;
                }
            }
        };
        self.cancel_until(0);
        result
    }

    pub fn solve(&mut self) -> SatResult {
        self.solve_with(&[], &Budget::unlimited())
    }
}
