use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Multigraph on vertices `0..n` with one non-negative rational weight per edge.
///
/// Parallel edges are separate ids so each carries its own weight; loops are rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<BigRational>,
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, BigRational)>,
    ) -> Result<Self> {
        let mut g = Self::new(n);
        for (u, v, w) in edges {
            g.add_edge(u, v, w)?;
        }
        Ok(g)
    }

    /// Every edge gets the same weight.
    pub fn uniform(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        weight: &BigRational,
    ) -> Result<Self> {
        Self::from_edges(n, edges.into_iter().map(|(u, v)| (u, v, weight.clone())))
    }

    pub fn add_edge(&mut self, u: usize, v: usize, weight: BigRational) -> Result<usize> {
        for x in [u, v] {
            if x >= self.n {
                return Err(Error::VertexOutOfRange { vertex: x, n: self.n });
            }
        }
        if u == v {
            return Err(Error::InvalidInstance(format!("loop at vertex {u}")));
        }
        if weight.is_negative() {
            return Err(Error::InvalidInstance(format!(
                "negative weight {weight} on edge ({u},{v})"
            )));
        }
        self.edges.push((u, v));
        self.weights.push(weight);
        Ok(self.edges.len() - 1)
    }

    pub fn add_vertex(&mut self) -> usize {
        self.n += 1;
        self.n - 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn weight(&self, id: usize) -> &BigRational {
        &self.weights[id]
    }

    pub fn set_weight(&mut self, id: usize, w: BigRational) {
        self.weights[id] = w;
    }

    pub fn check_edge(&self, id: usize) -> Result<()> {
        if id >= self.m() {
            Err(Error::EdgeOutOfRange { id, len: self.m() })
        } else {
            Ok(())
        }
    }

    /// Same vertices and edges, new weights.
    pub fn with_weights(&self, weights: Vec<BigRational>) -> Result<Self> {
        if weights.len() != self.m() {
            return Err(Error::InvalidParameter(format!(
                "{} weights for {} edges",
                weights.len(),
                self.m()
            )));
        }
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::InvalidInstance(format!("negative weight {w}")));
        }
        Ok(Self {
            n: self.n,
            edges: self.edges.clone(),
            weights,
        })
    }

    /// The graph viewed as a 2-uniform hypergraph with the same edge ids.
    pub fn to_hypergraph(&self) -> WeightedHypergraph {
        WeightedHypergraph {
            n: self.n,
            hyperedges: self.edges.iter().map(|&(u, v)| vec![u, v]).collect(),
            weights: self.weights.clone(),
        }
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &WeightedGraph) -> WeightedGraph {
        let shift = self.n;
        let mut g = self.clone();
        g.n += other.n;
        for (&(u, v), w) in other.edges.iter().zip(&other.weights) {
            g.edges.push((u + shift, v + shift));
            g.weights.push(w.clone());
        }
        g
    }

    /// Subgraph induced by `vertices`, relabelled in the given order. Returns the graph
    /// and, for each new edge, the id of the original edge.
    pub fn induced(&self, vertices: &[usize]) -> (WeightedGraph, Vec<usize>) {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut g = WeightedGraph::new(vertices.len());
        let mut origin = Vec::new();
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            if index[u] != usize::MAX && index[v] != usize::MAX {
                g.edges.push((index[u], index[v]));
                g.weights.push(self.weights[id].clone());
                origin.push(id);
            }
        }
        (g, origin)
    }
}

/// Hypergraph on vertices `0..n`; hyperedges are non-empty vertex multisets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedHypergraph {
    n: usize,
    hyperedges: Vec<Vec<usize>>,
    weights: Vec<BigRational>,
}

impl WeightedHypergraph {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            hyperedges: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn from_hyperedges(
        n: usize,
        hyperedges: impl IntoIterator<Item = (Vec<usize>, BigRational)>,
    ) -> Result<Self> {
        let mut h = Self::new(n);
        for (f, w) in hyperedges {
            h.add_hyperedge(f, w)?;
        }
        Ok(h)
    }

    pub fn add_hyperedge(&mut self, vertices: Vec<usize>, weight: BigRational) -> Result<usize> {
        if vertices.is_empty() {
            return Err(Error::InvalidInstance("empty hyperedge".into()));
        }
        if let Some(&v) = vertices.iter().find(|&&v| v >= self.n) {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        if weight.is_negative() {
            return Err(Error::InvalidInstance(format!("negative weight {weight}")));
        }
        self.hyperedges.push(vertices);
        self.weights.push(weight);
        Ok(self.hyperedges.len() - 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.hyperedges.len()
    }

    pub fn hyperedges(&self) -> &[Vec<usize>] {
        &self.hyperedges
    }

    pub fn hyperedge(&self, id: usize) -> &[usize] {
        &self.hyperedges[id]
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn weight(&self, id: usize) -> &BigRational {
        &self.weights[id]
    }

    /// Common hyperedge size, if every hyperedge has the same number of distinct vertices.
    pub fn uniform_arity(&self) -> Option<usize> {
        let mut sizes = self
            .hyperedges
            .iter()
            .map(|f| f.iter().collect::<BTreeSet<_>>().len());
        let first = sizes.next()?;
        sizes.all(|s| s == first).then_some(first)
    }

    /// Common weight if all hyperedges share one.
    pub fn uniform_weight(&self) -> Option<&BigRational> {
        let first = self.weights.first()?;
        self.weights.iter().all(|w| w == first).then_some(first)
    }
}

/// Simple bipartite graph with left part `0..left` and right part `0..right`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    left: usize,
    right: usize,
    edges: Vec<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn new(left: usize, right: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &(u, v) in &edges {
            if u >= left {
                return Err(Error::VertexOutOfRange { vertex: u, n: left });
            }
            if v >= right {
                return Err(Error::VertexOutOfRange { vertex: v, n: right });
            }
            if !seen.insert((u, v)) {
                return Err(Error::InvalidInstance(format!("duplicate edge ({u},{v})")));
            }
        }
        Ok(Self { left, right, edges })
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn n(&self) -> usize {
        self.left + self.right
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Left neighbourhood of every right vertex.
    pub fn right_neighbourhoods(&self) -> Vec<Vec<usize>> {
        let mut nb = vec![Vec::new(); self.right];
        for &(u, v) in &self.edges {
            nb[v].push(u);
        }
        for list in &mut nb {
            list.sort_unstable();
        }
        nb
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.right];
        for &(_, v) in &self.edges {
            deg[v] += 1;
        }
        deg
    }

    /// Weighted independent-set sum `Σ_I μ^{|I|}`, by enumerating left subsets.
    ///
    /// Exponential in `left()`; callers keep instances small.
    pub fn independence_polynomial(&self, mu: &BigRational) -> Result<BigRational> {
        const LEFT_CAP: usize = 26;
        if self.left > LEFT_CAP {
            return Err(Error::CapExceeded {
                what: "left vertices",
                size: self.left as u64,
                cap: LEFT_CAP as u64,
            });
        }
        let nb = self.right_neighbourhoods();
        let masks: Vec<u64> = nb
            .iter()
            .map(|l| l.iter().fold(0u64, |m, &u| m | (1 << u)))
            .collect();
        // group by (|S|, number of free right vertices)
        let mut counts = vec![vec![0u64; self.right + 1]; self.left + 1];
        for s in 0u64..(1u64 << self.left) {
            let free = masks.iter().filter(|&&m| m & s == 0).count();
            counts[s.count_ones() as usize][free] += 1;
        }
        let one_plus = BigRational::one() + mu;
        let mut total = BigRational::zero();
        for (size, row) in counts.iter().enumerate() {
            for (free, &c) in row.iter().enumerate() {
                if c > 0 {
                    total += BigRational::from_integer(c.into())
                        * num_traits::pow(mu.clone(), size)
                        * num_traits::pow(one_plus.clone(), free);
                }
            }
        }
        Ok(total)
    }

    /// Size of a maximum independent set and the number of such sets, by brute force.
    pub fn maximum_independent_sets(&self) -> Result<(usize, u64)> {
        const CAP: usize = 30;
        let n = self.n();
        if n > CAP {
            return Err(Error::CapExceeded {
                what: "vertices",
                size: n as u64,
                cap: CAP as u64,
            });
        }
        let mut adj = vec![0u64; n];
        for &(u, v) in &self.edges {
            let (a, b) = (u, self.left + v);
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        let (mut best, mut count) = (0usize, 0u64);
        for s in 0u64..(1u64 << n) {
            let independent = (0..n).all(|v| s & (1 << v) == 0 || adj[v] & s == 0);
            if independent {
                let k = s.count_ones() as usize;
                if k > best {
                    best = k;
                    count = 1;
                } else if k == best {
                    count += 1;
                }
            }
        }
        Ok((best, count))
    }
}
