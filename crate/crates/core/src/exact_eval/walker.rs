use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{RollbackUnionFind, WeightedGraph, WeightedHypergraph};

/// Depth-first walk over every subset of a list of (hyper)edges, maintaining
/// connectivity incrementally in a rollback union-find. The first few edges are fixed
/// per task so disjoint subset ranges run in parallel.
pub(crate) struct SubsetWalker {
    n: usize,
    links: Vec<Vec<(usize, usize)>>,
    marks: Vec<bool>,
}

const MAX_CLASSES: usize = 8;
const CLASS_BITS: usize = 16;

impl SubsetWalker {
    pub fn for_graph(g: &WeightedGraph) -> Self {
        Self {
            n: g.n(),
            links: g.edges().iter().map(|&e| vec![e]).collect(),
            marks: vec![false; g.n()],
        }
    }

    pub fn for_hypergraph(h: &WeightedHypergraph) -> Self {
        Self {
            n: h.n(),
            links: h
                .hyperedges()
                .iter()
                .map(|f| f.windows(2).map(|w| (w[0], w[1])).collect())
                .collect(),
            marks: vec![false; h.n()],
        }
    }

    pub fn with_marks(mut self, marked: &[usize]) -> Self {
        for &v in marked {
            self.marks[v] = true;
        }
        self
    }

    pub fn m(&self) -> usize {
        self.links.len()
    }

    pub fn check_cap(&self, cap: usize) -> Result<()> {
        if self.m() > cap {
            return Err(Error::CapExceeded {
                what: "edges",
                size: self.m() as u64,
                cap: cap as u64,
            });
        }
        Ok(())
    }

    fn walk<S, A>(
        &self,
        init: S,
        step: &(dyn Fn(&S, usize) -> S + Sync),
        leaf: &(dyn Fn(&mut A, &RollbackUnionFind, &S) + Sync),
        fresh: &(dyn Fn() -> A + Sync),
        merge: &(dyn Fn(A, A) -> A + Sync),
    ) -> A
    where
        S: Sync + Send,
        A: Send,
    {
        let m = self.m();
        let fixed = m.min(8);
        (0u64..1 << fixed)
            .into_par_iter()
            .map(|prefix| {
                let mut uf = RollbackUnionFind::with_marks(self.n, &self.marks);
                let mut state = None::<S>;
                for e in 0..fixed {
                    if prefix >> e & 1 == 1 {
                        for &(a, b) in &self.links[e] {
                            uf.union(a, b);
                        }
                        state = Some(step(state.as_ref().unwrap_or(&init), e));
                    }
                }
                let mut acc = fresh();
                self.rec(
                    fixed,
                    &mut uf,
                    state.as_ref().unwrap_or(&init),
                    step,
                    leaf,
                    &mut acc,
                );
                acc
            })
            .reduce(fresh, merge)
    }

    fn rec<S, A>(
        &self,
        i: usize,
        uf: &mut RollbackUnionFind,
        state: &S,
        step: &(dyn Fn(&S, usize) -> S + Sync),
        leaf: &(dyn Fn(&mut A, &RollbackUnionFind, &S) + Sync),
        acc: &mut A,
    ) {
        if i == self.links.len() {
            leaf(acc, uf, state);
            return;
        }
        self.rec(i + 1, uf, state, step, leaf, acc);
        let t = uf.time();
        for &(a, b) in &self.links[i] {
            uf.union(a, b);
        }
        let next = step(state, i);
        self.rec(i + 1, uf, &next, step, leaf, acc);
        uf.rollback(t);
    }

    /// Number of subsets per (leaf label, per-class inclusion counts). Counts for class
    /// `c` sit in bits `16c..16c+16` of the key.
    pub fn census<L>(
        &self,
        classes: &[usize],
        label: &(dyn Fn(&RollbackUnionFind) -> L + Sync),
    ) -> HashMap<(L, u128), u64>
    where
        L: Hash + Eq + Send,
    {
        assert!(classes.iter().all(|&c| c < MAX_CLASSES));
        assert!(self.m() < 1 << CLASS_BITS);
        let step = |key: &u128, e: usize| key + (1u128 << (CLASS_BITS * classes[e]));
        let leaf = |acc: &mut HashMap<(L, u128), u64>, uf: &RollbackUnionFind, key: &u128| {
            *acc.entry((label(uf), *key)).or_insert(0) += 1;
        };
        self.walk(0u128, &step, &leaf, &HashMap::new, &merge_maps)
    }

    /// `Σ γ(A)` over subsets `A`, grouped by `label`.
    pub fn weight_sums<L>(
        &self,
        weights: &[BigRational],
        label: &(dyn Fn(&RollbackUnionFind) -> L + Sync),
    ) -> HashMap<L, BigRational>
    where
        L: Hash + Eq + Send + Clone,
    {
        let mut distinct: Vec<&BigRational> = weights.iter().collect();
        distinct.sort();
        distinct.dedup();
        if distinct.len() <= MAX_CLASSES {
            let classes: Vec<usize> = weights
                .iter()
                .map(|w| distinct.binary_search(&w).unwrap())
                .collect();
            let counts = self.census(&classes, label);
            let mut out: HashMap<L, BigRational> = HashMap::new();
            let mut powers: Vec<Vec<BigRational>> = distinct
                .iter()
                .map(|&w| {
                    let mut p = vec![BigRational::one()];
                    for _ in 0..self.m() {
                        let next = p.last().unwrap() * w;
                        p.push(next);
                    }
                    p
                })
                .collect();
            for ((l, key), count) in counts {
                let mut term = BigRational::from_integer(count.into());
                for (c, pw) in powers.iter_mut().enumerate() {
                    let k = (key >> (CLASS_BITS * c)) as usize & ((1 << CLASS_BITS) - 1);
                    term *= &pw[k];
                }
                *out.entry(l).or_insert_with(BigRational::zero) += term;
            }
            return out;
        }
        // many distinct weights: integer products over a common denominator
        let den = weights
            .iter()
            .fold(BigInt::one(), |d, w| num_integer::lcm(d, w.denom().clone()));
        let nums: Vec<BigInt> = weights
            .iter()
            .map(|w| w.numer() * (&den / w.denom()))
            .collect();
        let step = |s: &(BigInt, usize), e: usize| (&s.0 * &nums[e], s.1 + 1);
        let leaf = |acc: &mut HashMap<(L, usize), BigInt>,
                    uf: &RollbackUnionFind,
                    s: &(BigInt, usize)| {
            *acc.entry((label(uf), s.1)).or_insert_with(BigInt::zero) += &s.0;
        };
        let sums = self.walk(
            (BigInt::one(), 0usize),
            &step,
            &leaf,
            &HashMap::new,
            &merge_maps,
        );
        let mut out: HashMap<L, BigRational> = HashMap::new();
        for ((l, size), total) in sums {
            let d = num_traits::pow(den.clone(), size);
            *out.entry(l).or_insert_with(BigRational::zero) += BigRational::new(total, d);
        }
        out
    }
}

fn merge_maps<K, V>(mut a: HashMap<K, V>, b: HashMap<K, V>) -> HashMap<K, V>
where
    K: Hash + Eq,
    V: std::ops::AddAssign + Default,
{
    if a.len() < b.len() {
        return merge_maps(b, a);
    }
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}
