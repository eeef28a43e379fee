use std::collections::VecDeque;

/// Connected components of `(V, A)` under single-edge insertions and deletions.
///
/// Vertices carry component labels, so "are `u` and `v` connected" is a label
/// comparison. Insertion relabels the smaller side. Deletion runs two searches
/// from the endpoints in lockstep and stops as soon as one of them is exhausted or
/// they meet, so a split costs time proportional to the smaller piece.
#[derive(Clone, Debug)]
pub(crate) struct DynamicComponents {
    ends: Vec<(usize, usize)>,
    present: Vec<bool>,
    adj: Vec<Vec<(usize, usize)>>,
    /// Position of edge `e` in `adj[u]` and `adj[v]`.
    pos: Vec<(usize, usize)>,
    label: Vec<usize>,
    size: Vec<usize>,
    free_labels: Vec<usize>,
    components: usize,
    mark: Vec<u32>,
    epoch: u32,
}

impl DynamicComponents {
    pub fn new(n: usize, ends: &[(usize, usize)]) -> Self {
        Self {
            ends: ends.to_vec(),
            present: vec![false; ends.len()],
            adj: vec![Vec::new(); n],
            pos: vec![(usize::MAX, usize::MAX); ends.len()],
            label: (0..n).collect(),
            size: vec![1; n],
            free_labels: Vec::new(),
            components: n,
            mark: vec![0; n],
            epoch: 0,
        }
    }

    pub fn contains(&self, e: usize) -> bool {
        self.present[e]
    }

    pub fn connected(&self, u: usize, v: usize) -> bool {
        self.label[u] == self.label[v]
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn largest(&self) -> usize {
        let mut best = 0;
        let mut seen = vec![false; self.size.len()];
        for &l in &self.label {
            if !seen[l] {
                seen[l] = true;
                best = best.max(self.size[l]);
            }
        }
        best
    }

    /// Sizes of all components, largest first.
    pub fn sizes(&self) -> Vec<usize> {
        let mut seen = vec![false; self.size.len()];
        let mut out = Vec::with_capacity(self.components);
        for &l in &self.label {
            if !seen[l] {
                seen[l] = true;
                out.push(self.size[l]);
            }
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        self.epoch
    }

    pub fn insert(&mut self, e: usize) {
        if self.present[e] {
            return;
        }
        self.present[e] = true;
        let (u, v) = self.ends[e];
        if u == v {
            return;
        }
        self.pos[e] = (self.adj[u].len(), self.adj[v].len());
        self.adj[u].push((v, e));
        self.adj[v].push((u, e));
        let (lu, lv) = (self.label[u], self.label[v]);
        if lu == lv {
            return;
        }
        let (small, keep, start) = if self.size[lu] < self.size[lv] {
            (lu, lv, u)
        } else {
            (lv, lu, v)
        };
        self.relabel(start, small, keep);
        self.size[keep] += self.size[small];
        self.size[small] = 0;
        self.free_labels.push(small);
        self.components -= 1;
    }

    fn relabel(&mut self, start: usize, from: usize, to: usize) {
        let mut stack = vec![start];
        self.label[start] = to;
        while let Some(x) = stack.pop() {
            for i in 0..self.adj[x].len() {
                let y = self.adj[x][i].0;
                if self.label[y] == from {
                    self.label[y] = to;
                    stack.push(y);
                }
            }
        }
    }

    fn detach(&mut self, x: usize, slot: usize) {
        let last = self.adj[x].len() - 1;
        self.adj[x].swap(slot, last);
        self.adj[x].pop();
        if slot < last {
            let moved = self.adj[x][slot].1;
            if self.ends[moved].0 == x {
                self.pos[moved].0 = slot;
            } else {
                self.pos[moved].1 = slot;
            }
        }
    }

    /// Removes `e`; returns whether its endpoints are still connected.
    pub fn remove(&mut self, e: usize) -> bool {
        if !self.present[e] {
            let (u, v) = self.ends[e];
            return self.connected(u, v);
        }
        self.present[e] = false;
        let (u, v) = self.ends[e];
        if u == v {
            return true;
        }
        let (pu, pv) = self.pos[e];
        self.detach(u, pu);
        self.detach(v, pv);
        self.pos[e] = (usize::MAX, usize::MAX);

        // lockstep search: side 0 from u, side 1 from v
        let ep = self.next_epoch();
        let ep_v = self.next_epoch();
        let mut seen = [vec![u], vec![v]];
        let mut queue = [VecDeque::from([u]), VecDeque::from([v])];
        self.mark[u] = ep;
        self.mark[v] = ep_v;
        let tags = [ep, ep_v];
        let exhausted = loop {
            let mut done = None;
            for side in 0..2 {
                match queue[side].pop_front() {
                    None => {
                        done = Some(side);
                        break;
                    }
                    Some(x) => {
                        for i in 0..self.adj[x].len() {
                            let y = self.adj[x][i].0;
                            if self.mark[y] == tags[1 - side] {
                                return true;
                            }
                            if self.mark[y] != tags[side] {
                                self.mark[y] = tags[side];
                                seen[side].push(y);
                                queue[side].push_back(y);
                            }
                        }
                    }
                }
            }
            if let Some(side) = done {
                break side;
            }
        };
        // the exhausted side is a full component of its own
        let fresh = self.free_labels.pop().unwrap_or_else(|| {
            self.size.push(0);
            self.size.len() - 1
        });
        let old = self.label[u];
        let piece = std::mem::take(&mut seen[exhausted]);
        for &x in &piece {
            self.label[x] = fresh;
        }
        self.size[fresh] = piece.len();
        self.size[old] -= piece.len();
        self.components += 1;
        false
    }

    pub fn edges(&self) -> Vec<usize> {
        (0..self.present.len()).filter(|&e| self.present[e]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{RollbackUnionFind, Seed};
    use rand::Rng;

    fn reference(n: usize, ends: &[(usize, usize)], present: &[bool]) -> RollbackUnionFind {
        let mut uf = RollbackUnionFind::new(n);
        for (e, &(u, v)) in ends.iter().enumerate() {
            if present[e] {
                uf.union(u, v);
            }
        }
        uf
    }

    #[test]
    fn random_updates_match_union_find() {
        let mut rng = Seed(17).rng();
        for _ in 0..20 {
            let n = rng.random_range(1..15);
            let m = rng.random_range(0..40);
            let ends: Vec<_> = (0..m)
                .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
                .collect();
            let mut dc = DynamicComponents::new(n, &ends);
            let mut present = vec![false; m];
            for _ in 0..500 {
                if m == 0 {
                    break;
                }
                let e = rng.random_range(0..m);
                if present[e] {
                    let still = dc.remove(e);
                    present[e] = false;
                    let uf = reference(n, &ends, &present);
                    assert_eq!(still, uf.same(ends[e].0, ends[e].1));
                } else {
                    dc.insert(e);
                    present[e] = true;
                }
                let uf = reference(n, &ends, &present);
                assert_eq!(dc.components(), uf.components());
                for a in 0..n {
                    for b in 0..n {
                        assert_eq!(dc.connected(a, b), uf.same(a, b));
                    }
                }
                assert_eq!(dc.sizes().iter().sum::<usize>(), n);
            }
        }
    }
}
