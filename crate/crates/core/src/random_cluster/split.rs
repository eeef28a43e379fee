use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::RngCore;
use serde::Serialize;

use super::probability::{bernoulli, EdgeProbabilityMap};
use crate::error::{Error, Result};
use crate::model::number::pow;
use crate::model::{connected_components, RollbackUnionFind, WeightedGraph};

/// `P̃(G; A, q, p) = q^{κ(V,A)} Π_{e∈A} p(e) Π_{e∉A} (1−p(e))`.
pub fn rc_weight(
    g: &WeightedGraph,
    a: &[usize],
    q: &BigRational,
    p: &EdgeProbabilityMap,
) -> Result<BigRational> {
    if p.len() != g.m() {
        return Err(Error::InvalidParameter(format!(
            "{} probabilities for {} edges",
            p.len(),
            g.m()
        )));
    }
    let (kappa, _) = connected_components(g, a)?;
    let mut inside = vec![false; g.m()];
    for &e in a {
        inside[e] = true;
    }
    let mut w = pow(q, kappa);
    for (e, &x) in inside.iter().enumerate() {
        if x {
            w *= p.get(e);
        } else {
            w *= BigRational::one() - p.get(e);
        }
    }
    Ok(w)
}

const DISTRIBUTION_CAP: usize = 20;

/// Exact `RC(G; q, p)` over all `2^m` subsets, indexed by edge bitmask.
pub fn rc_distribution(
    g: &WeightedGraph,
    q: &BigRational,
    p: &EdgeProbabilityMap,
) -> Result<Vec<BigRational>> {
    if g.m() > DISTRIBUTION_CAP {
        return Err(Error::CapExceeded {
            what: "edges",
            size: g.m() as u64,
            cap: DISTRIBUTION_CAP as u64,
        });
    }
    let all: Vec<usize> = (0..g.m()).collect();
    let weights = (0u64..1 << g.m())
        .map(|mask| {
            let a: Vec<usize> = all.iter().copied().filter(|&e| mask >> e & 1 == 1).collect();
            rc_weight(g, &a, q, p)
        })
        .collect::<Result<Vec<_>>>()?;
    let z: BigRational = weights.iter().fold(BigRational::zero(), |s, w| s + w);
    if z.is_zero() {
        return Err(Error::InvalidParameter("random-cluster weights sum to zero".into()));
    }
    Ok(weights.into_iter().map(|w| w / &z).collect())
}

/// Output of [`red_green_split`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RedGreen {
    pub red_vertices: Vec<usize>,
    pub red_edges: Vec<usize>,
    pub green_edges: Vec<usize>,
}

/// Colours each component of `(V, A)` red with probability `r`, independently.
pub fn red_green_split<R: RngCore>(
    g: &WeightedGraph,
    a: &[usize],
    r: &BigRational,
    rng: &mut R,
) -> Result<RedGreen> {
    if r.is_negative() || *r > BigRational::one() {
        return Err(Error::InvalidParameter(format!("r = {r} outside [0,1]")));
    }
    let (_, part) = connected_components(g, a)?;
    let mut red = vec![false; g.n()];
    for block in part.blocks() {
        if bernoulli(rng, r) {
            for &v in block {
                red[v] = true;
            }
        }
    }
    let (red_edges, green_edges) = a.iter().copied().partition(|&e| red[g.edge(e).0]);
    Ok(RedGreen {
        red_vertices: (0..g.n()).filter(|&v| red[v]).collect(),
        red_edges,
        green_edges,
    })
}

/// Outcome of [`factorisation_check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorisationReport {
    /// Red sets `V₁` with positive probability.
    pub red_sets: usize,
    /// `(V₁, A)` pairs compared.
    pub comparisons: usize,
    /// Pairs whose conditional probability differs from the product law.
    pub mismatches: usize,
}

impl FactorisationReport {
    pub fn holds(&self) -> bool {
        self.mismatches == 0
    }
}

/// `q^{κ}` restricted to the vertices in `mask`, for the edges of `a` inside it.
fn restricted_weight(
    g: &WeightedGraph,
    vmask: u64,
    amask: u64,
    q: &BigRational,
    p: &EdgeProbabilityMap,
) -> BigRational {
    let mut uf = RollbackUnionFind::new(g.n());
    let mut w = BigRational::one();
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if vmask >> u & 1 == 1 && vmask >> v & 1 == 1 {
            if amask >> e & 1 == 1 {
                uf.union(u, v);
                w *= p.get(e);
            } else {
                w *= BigRational::one() - p.get(e);
            }
        }
    }
    let kappa = (0..g.n())
        .filter(|&v| vmask >> v & 1 == 1 && uf.find(v) == v)
        .count();
    w * pow(q, kappa)
}

/// Exact check of the red/green decomposition: draw `A ~ RC(G; q, p)`, colour each
/// component red with probability `r`, and let `V₁` be the red vertices. Conditioned
/// on `V₁`, the red and green edge sets must be independent with laws
/// `RC(G[V₁]; rq, p)` and `RC(G[V∖V₁]; (1−r)q, p)`.
pub fn factorisation_check(
    g: &WeightedGraph,
    q: &BigRational,
    p: &EdgeProbabilityMap,
    r: &BigRational,
) -> Result<FactorisationReport> {
    if g.m() > DISTRIBUTION_CAP || g.n() > 16 {
        return Err(Error::CapExceeded {
            what: "edges",
            size: g.m() as u64,
            cap: DISTRIBUTION_CAP as u64,
        });
    }
    if r.is_negative() || *r > BigRational::one() {
        return Err(Error::InvalidParameter(format!("r = {r} outside [0,1]")));
    }
    let law = rc_distribution(g, q, p)?;
    let one = BigRational::one();
    let rbar = &one - r;
    // joint[(V₁, A)]
    let mut joint: HashMap<(u64, u64), BigRational> = HashMap::new();
    for (amask, pa) in law.iter().enumerate() {
        if pa.is_zero() {
            continue;
        }
        let a: Vec<usize> = (0..g.m()).filter(|&e| amask >> e & 1 == 1).collect();
        let (_, part) = connected_components(g, &a)?;
        let blocks = part.blocks();
        for colouring in 0u64..1 << blocks.len() {
            let mut vmask = 0u64;
            let mut w = pa.clone();
            for (i, block) in blocks.iter().enumerate() {
                if colouring >> i & 1 == 1 {
                    w *= r;
                    for &v in block {
                        vmask |= 1 << v;
                    }
                } else {
                    w *= &rbar;
                }
            }
            if !w.is_zero() {
                *joint.entry((vmask, amask as u64)).or_insert_with(BigRational::zero) += w;
            }
        }
    }
    let mut marginal: HashMap<u64, BigRational> = HashMap::new();
    for (&(vm, _), w) in &joint {
        *marginal.entry(vm).or_insert_with(BigRational::zero) += w;
    }
    let full = (1u64 << g.n()) - 1;
    let (rq, gq) = (r * q, &rbar * q);
    let mut report = FactorisationReport {
        red_sets: marginal.len(),
        comparisons: 0,
        mismatches: 0,
    };
    for (&v1, pv) in &marginal {
        let v2 = full & !v1;
        let z1 = partition_sum(g, v1, &rq, p);
        let z2 = partition_sum(g, v2, &gq, p);
        for amask in 0u64..1 << g.m() {
            let crossing = g.edges().iter().enumerate().any(|(e, &(u, v))| {
                amask >> e & 1 == 1 && ((v1 >> u) ^ (v1 >> v)) & 1 == 1
            });
            let expected = if crossing {
                BigRational::zero()
            } else {
                restricted_weight(g, v1, amask, &rq, p) / &z1
                    * restricted_weight(g, v2, amask, &gq, p)
                    / &z2
            };
            let observed = joint
                .get(&(v1, amask))
                .map(|w| w / pv)
                .unwrap_or_else(BigRational::zero);
            report.comparisons += 1;
            if observed != expected {
                report.mismatches += 1;
            }
        }
    }
    Ok(report)
}

/// `Σ_{A ⊆ E(G[mask])} q^κ Π p Π (1−p)`.
fn partition_sum(g: &WeightedGraph, vmask: u64, q: &BigRational, p: &EdgeProbabilityMap) -> BigRational {
    let inner: Vec<usize> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, &(u, v))| vmask >> u & 1 == 1 && vmask >> v & 1 == 1)
        .map(|(e, _)| e)
        .collect();
    let mut z = BigRational::zero();
    for sub in 0u64..1 << inner.len() {
        let mut amask = 0u64;
        for (i, &e) in inner.iter().enumerate() {
            if sub >> i & 1 == 1 {
                amask |= 1 << e;
            }
        }
        z += restricted_weight(g, vmask, amask, q, p);
    }
    z
}
