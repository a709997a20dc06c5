//! Dancing links over the candidate copies: box cells are primary columns,
//! cells outside the box are secondary (covered at most once).

use std::collections::HashMap;

use super::{Search, Status};
use crate::space::Point;

struct Links {
    l: Vec<usize>,
    r: Vec<usize>,
    u: Vec<usize>,
    d: Vec<usize>,
    col: Vec<usize>,
    row: Vec<usize>,
    size: Vec<usize>,
}

const ROOT: usize = 0;

impl Links {
    fn new(search: &Search) -> Self {
        let primary = search.covered.len();
        let mut ext_ids: HashMap<&Point, usize> = HashMap::new();
        for c in &search.cands {
            for p in &c.ext {
                let next = primary + 1 + ext_ids.len();
                ext_ids.entry(p).or_insert(next);
            }
        }
        let cols = primary + ext_ids.len();
        let mut x = Links {
            l: (0..=cols).map(|i| if i == 0 { primary } else { i - 1 }).collect(),
            r: (0..=cols).map(|i| if i == primary { 0 } else { i + 1 }).collect(),
            u: (0..=cols).collect(),
            d: (0..=cols).collect(),
            col: (0..=cols).collect(),
            row: vec![usize::MAX; cols + 1],
            size: vec![0; cols + 1],
        };
        // Secondary headers stay out of the header ring.
        for i in primary + 1..=cols {
            x.l[i] = i;
            x.r[i] = i;
        }
        let mut order: Vec<usize> = (0..search.cands.len()).collect();
        order.sort_by(|&a, &b| search.cands[a].copy.cmp(&search.cands[b].copy));
        for id in order {
            let cand = &search.cands[id];
            let cols: Vec<usize> =
                cand.cells.iter().map(|&c| c + 1).chain(cand.ext.iter().map(|p| ext_ids[p])).collect();
            x.add_row(id, &cols);
        }
        x
    }

    fn add_row(&mut self, id: usize, cols: &[usize]) {
        let first = self.l.len();
        for (k, &c) in cols.iter().enumerate() {
            let n = self.l.len();
            let up = self.u[c];
            self.u.push(up);
            self.d.push(c);
            self.d[up] = n;
            self.u[c] = n;
            self.l.push(if k == 0 { n } else { n - 1 });
            self.r.push(first);
            if k > 0 {
                self.r[n - 1] = n;
            }
            self.l[first] = n;
            self.col.push(c);
            self.row.push(id);
            self.size[c] += 1;
        }
    }

    fn cover(&mut self, c: usize) {
        let (l, r) = (self.l[c], self.r[c]);
        self.r[l] = r;
        self.l[r] = l;
        let mut i = self.d[c];
        while i != c {
            let mut j = self.r[i];
            while j != i {
                let (u, d) = (self.u[j], self.d[j]);
                self.d[u] = d;
                self.u[d] = u;
                self.size[self.col[j]] -= 1;
                j = self.r[j];
            }
            i = self.d[i];
        }
    }

    fn uncover(&mut self, c: usize) {
        let mut i = self.u[c];
        while i != c {
            let mut j = self.l[i];
            while j != i {
                self.size[self.col[j]] += 1;
                let (u, d) = (self.u[j], self.d[j]);
                self.d[u] = j;
                self.u[d] = j;
                j = self.l[j];
            }
            i = self.u[i];
        }
        let (l, r) = (self.l[c], self.r[c]);
        self.r[l] = c;
        self.l[r] = c;
    }

    // Smallest column, earliest on ties.
    fn choose(&self) -> usize {
        let mut best = self.r[ROOT];
        let mut c = self.r[best];
        while c != ROOT {
            if self.size[c] < self.size[best] {
                best = c;
            }
            c = self.r[c];
        }
        best
    }
}

pub(super) fn solve(search: &Search, budget: u64) -> (Status, Vec<usize>, u64) {
    let mut x = Links::new(search);
    // Chosen row node per level.
    let mut stack: Vec<usize> = Vec::new();
    let mut nodes = 0u64;
    'descend: loop {
        if x.r[ROOT] == ROOT {
            let rows = stack.iter().map(|&n| x.row[n]).collect();
            return (Status::Sat, rows, nodes);
        }
        let c = x.choose();
        x.cover(c);
        let mut next = x.d[c];
        loop {
            if next != x.col[next] {
                nodes += 1;
                if nodes > budget {
                    return (Status::Timeout, Vec::new(), nodes - 1);
                }
                let mut j = x.r[next];
                while j != next {
                    x.cover(x.col[j]);
                    j = x.r[j];
                }
                stack.push(next);
                continue 'descend;
            }
            // Column exhausted: undo it and resume the parent level.
            x.uncover(x.col[next]);
            let Some(n) = stack.pop() else {
                return (Status::Unsat, Vec::new(), nodes);
            };
            let mut j = x.l[n];
            while j != n {
                x.uncover(x.col[j]);
                j = x.l[j];
            }
            next = x.d[n];
        }
    }
}
