use crate::lit::Var;

/// Binary max-heap of variables keyed by an external activity array.
#[derive(Default)]
pub(crate) struct VarOrder {
    heap: Vec<Var>,
    index: Vec<usize>,
}

const ABSENT: usize = usize::MAX;

impl VarOrder {
    pub fn grow(&mut self, num_vars: usize) {
        if self.index.len() < num_vars {
            self.index.resize(num_vars, ABSENT);
        }
    }

    pub fn contains(&self, v: Var) -> bool {
        self.index.get(v.index()).is_some_and(|&i| i != ABSENT)
    }

    pub fn insert(&mut self, v: Var, act: &[f64]) {
        self.grow(v.index() + 1);
        if self.contains(v) {
            return;
        }
        self.index[v.index()] = self.heap.len();
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    /// Restores the heap property after `v`'s activity increased.
    pub fn increased(&mut self, v: Var, act: &[f64]) {
        if self.contains(v) {
            self.sift_up(self.index[v.index()], act);
        }
    }

    pub fn pop(&mut self, act: &[f64]) -> Option<Var> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap.swap_remove(0);
        self.index[top.index()] = ABSENT;
        if !self.heap.is_empty() {
            self.index[self.heap[0].index()] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.heap[parent];
            if act[p.index()] >= act[v.index()] {
                break;
            }
            self.heap[i] = p;
            self.index[p.index()] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.index[v.index()] = i;
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let left = 2 * i + 1;
            if left >= n {
                break;
            }
            let right = left + 1;
            let child =
                if right < n && act[self.heap[right].index()] > act[self.heap[left].index()] { right } else { left };
            let c = self.heap[child];
            if act[c.index()] <= act[v.index()] {
                break;
            }
            self.heap[i] = c;
            self.index[c.index()] = i;
            i = child;
        }
        self.heap[i] = v;
        self.index[v.index()] = i;
    }
}
