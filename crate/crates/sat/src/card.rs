use crate::lit::{Lit, Var};

/// Sequential-counter encoding of "at most `k` of `lits` are true".
///
/// Auxiliary register variables are allocated from `next_var`, which is
/// advanced past them. Any assignment of `lits` with at most `k` true
/// literals extends to the registers; no other assignment does.
pub fn at_most_k(lits: &[Lit], k: usize, next_var: &mut u32) -> Vec<Vec<Lit>> {
    let n = lits.len();
    if k >= n {
        return Vec::new();
    }
    if k == 0 {
        return lits.iter().map(|&l| vec![!l]).collect();
    }
    let mut fresh = || {
        let v = Var(*next_var);
        *next_var += 1;
        v
    };
    // reg[i][j]: at least j+1 of lits[0..=i] are true
    let reg: Vec<Vec<Lit>> = (0..n - 1).map(|_| (0..k).map(|_| fresh().pos()).collect()).collect();
    let mut out = Vec::new();
    out.push(vec![!lits[0], reg[0][0]]);
    for r in &reg[0][1..] {
        out.push(vec![!*r]);
    }
    for i in 1..n - 1 {
        out.push(vec![!lits[i], reg[i][0]]);
        out.push(vec![!reg[i - 1][0], reg[i][0]]);
        for j in 1..k {
            out.push(vec![!lits[i], !reg[i - 1][j - 1], reg[i][j]]);
            out.push(vec![!reg[i - 1][j], reg[i][j]]);
        }
        out.push(vec![!lits[i], !reg[i - 1][k - 1]]);
    }
    out.push(vec![!lits[n - 1], !reg[n - 2][k - 1]]);
    out
}
