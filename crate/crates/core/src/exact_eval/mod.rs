//! Exact partition-function oracles.
//!
//! Everything here is exhaustive: subset enumeration for `Z_Tutte`, colouring
//! enumeration for `Z_Potts`. Instances above the enumeration cap are refused with
//! [`Error::CapExceeded`]. The cap defaults to 24 edges and can be overridden with the
//! `POTTSFORGE_CAP` environment variable or per call through [`ExactOracle`].
//!
//! [`frontier`] holds a second, independent evaluator that handles long, thin graphs
//! (series-parallel expansions, chains of gadgets) exactly.

pub mod frontier;
mod gadget_census;
mod walker;

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::number::{pow, to_decimal};
use crate::model::{WeightedGraph, WeightedHypergraph};

pub use gadget_census::{census_weights, exact_y_distribution, gadget_census, GadgetCensus};
pub(crate) use walker::SubsetWalker;

pub const DEFAULT_CAP: usize = 24;
pub const CAP_ENV: &str = "POTTSFORGE_CAP";

/// Cap from `POTTSFORGE_CAP`, falling back to [`DEFAULT_CAP`].
pub fn enumeration_cap() -> usize {
    std::env::var(CAP_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PartitionFunctionValue {
    pub value: BigRational,
}

impl PartitionFunctionValue {
    pub fn decimal(&self, digits: usize) -> String {
        to_decimal(&self.value, digits)
    }
}

impl fmt::Display for PartitionFunctionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl From<PartitionFunctionValue> for BigRational {
    fn from(v: PartitionFunctionValue) -> Self {
        v.value
    }
}

/// `Z_st` and `Z_s|t` of a two-terminal graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TerminalSplit {
    pub z_joined: BigRational,
    pub z_split: BigRational,
}

impl TerminalSplit {
    pub fn total(&self) -> BigRational {
        &self.z_joined + &self.z_split
    }

    /// Effective weight `q·Z_st / Z_s|t` of the two-terminal graph.
    pub fn effective_weight(&self, q: &BigRational) -> Result<BigRational> {
        if self.z_split.is_zero() {
            return Err(Error::InvalidParameter("Z_s|t vanishes".into()));
        }
        Ok(q * &self.z_joined / &self.z_split)
    }
}

/// Exhaustive oracle with an explicit enumeration cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactOracle {
    pub cap: usize,
}

impl Default for ExactOracle {
    fn default() -> Self {
        Self {
            cap: enumeration_cap(),
        }
    }
}

fn q_powers(q: &BigRational, n: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(BigRational::one());
    for i in 0..n {
        let next = &out[i] * q;
        out.push(next);
    }
    out
}

fn positive_integer(q: &BigRational) -> Result<u64> {
    if !q.is_integer() || !q.is_positive() {
        return Err(Error::InvalidParameter(format!(
            "Potts form needs a positive integer q, got {q}"
        )));
    }
    q.to_integer()
        .to_u64()
        .ok_or_else(|| Error::InvalidParameter(format!("q = {q} too large")))
}

impl ExactOracle {
    pub fn new(cap: usize) -> Self {
        Self { cap }
    }

    /// `Σ_{F⊆E} q^{κ(V,F)} Π_{e∈F} γ_e`.
    pub fn tutte_graph(&self, g: &WeightedGraph, q: &BigRational) -> Result<PartitionFunctionValue> {
        let walker = SubsetWalker::for_graph(g);
        walker.check_cap(self.cap)?;
        let sums = walker.weight_sums(g.weights(), &|uf| uf.components());
        Ok(fold_by_components(sums, q, g.n()))
    }

    /// `Σ_{ℱ⊆ℰ} q^{κ(𝒱,ℱ)} Π_{f∈ℱ} γ_f`.
    pub fn tutte_hypergraph(
        &self,
        h: &WeightedHypergraph,
        q: &BigRational,
    ) -> Result<PartitionFunctionValue> {
        let walker = SubsetWalker::for_hypergraph(h);
        walker.check_cap(self.cap)?;
        let sums = walker.weight_sums(h.weights(), &|uf| uf.components());
        Ok(fold_by_components(sums, q, h.n()))
    }

    /// `Σ_σ Π_f (1 + γ_f·[f monochromatic under σ])` over all `q^n` colourings.
    pub fn potts(&self, h: &WeightedHypergraph, q: &BigRational) -> Result<PartitionFunctionValue> {
        let q = positive_integer(q)?;
        let n = h.n();
        let colourings = (q as u128).checked_pow(n as u32);
        let limit = 1u128 << self.cap.min(100);
        match colourings {
            Some(c) if c <= limit => {}
            _ => {
                return Err(Error::CapExceeded {
                    what: "colourings (log2)",
                    size: (n as f64 * (q as f64).log2()).ceil() as u64,
                    cap: self.cap as u64,
                })
            }
        }
        if h.m() > 64 {
            return Err(Error::CapExceeded {
                what: "hyperedges",
                size: h.m() as u64,
                cap: 64,
            });
        }
        // count colourings per set of monochromatic hyperedges
        let mut by_mask: HashMap<u64, u64> = HashMap::new();
        let mut sigma = vec![0u64; n];
        loop {
            let mut mask = 0u64;
            for (i, f) in h.hyperedges().iter().enumerate() {
                if f.iter().all(|&v| sigma[v] == sigma[f[0]]) {
                    mask |= 1 << i;
                }
            }
            *by_mask.entry(mask).or_insert(0) += 1;
            // odometer
            let mut i = 0;
            while i < n {
                sigma[i] += 1;
                if sigma[i] < q {
                    break;
                }
                sigma[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
        let one_plus: Vec<BigRational> = h.weights().iter().map(|w| w + BigRational::one()).collect();
        let mut total = BigRational::zero();
        for (mask, count) in by_mask {
            let mut term = BigRational::from_integer(count.into());
            for (i, f) in one_plus.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    term *= f;
                }
            }
            total += term;
        }
        Ok(PartitionFunctionValue { value: total })
    }

    /// Whether the Potts and random-cluster forms agree exactly at integer `q`.
    pub fn fk_check(&self, h: &WeightedHypergraph, q: &BigRational) -> Result<bool> {
        Ok(self.potts(h, q)? == self.tutte_hypergraph(h, q)?)
    }

    pub fn terminal_split(
        &self,
        g: &WeightedGraph,
        s: usize,
        t: usize,
        q: &BigRational,
    ) -> Result<TerminalSplit> {
        check_terminals(g, s, t)?;
        let walker = SubsetWalker::for_graph(g);
        walker.check_cap(self.cap)?;
        let sums = walker.weight_sums(g.weights(), &|uf| (uf.components(), uf.same(s, t)));
        let qp = q_powers(q, g.n());
        let mut split = TerminalSplit {
            z_joined: BigRational::zero(),
            z_split: BigRational::zero(),
        };
        for ((k, joined), w) in sums {
            let term = w * &qp[k];
            if joined {
                split.z_joined += term;
            } else {
                split.z_split += term;
            }
        }
        Ok(split)
    }
}

pub(crate) fn check_terminals(g: &WeightedGraph, s: usize, t: usize) -> Result<()> {
    for v in [s, t] {
        if v >= g.n() {
            return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
        }
    }
    if s == t {
        return Err(Error::InvalidParameter("terminals s and t coincide".into()));
    }
    Ok(())
}

fn fold_by_components(
    sums: HashMap<usize, BigRational>,
    q: &BigRational,
    n: usize,
) -> PartitionFunctionValue {
    let qp = q_powers(q, n);
    let value = sums
        .into_iter()
        .fold(BigRational::zero(), |acc, (k, w)| acc + w * &qp[k]);
    PartitionFunctionValue { value }
}

pub fn tutte_graph(g: &WeightedGraph, q: &BigRational) -> Result<PartitionFunctionValue> {
    ExactOracle::default().tutte_graph(g, q)
}

pub fn tutte_hypergraph(h: &WeightedHypergraph, q: &BigRational) -> Result<PartitionFunctionValue> {
    ExactOracle::default().tutte_hypergraph(h, q)
}

pub fn potts(h: &WeightedHypergraph, q: &BigRational) -> Result<PartitionFunctionValue> {
    ExactOracle::default().potts(h, q)
}

pub fn fk_check(h: &WeightedHypergraph, q: &BigRational) -> Result<bool> {
    ExactOracle::default().fk_check(h, q)
}

pub fn terminal_split(
    g: &WeightedGraph,
    s: usize,
    t: usize,
    q: &BigRational,
) -> Result<TerminalSplit> {
    ExactOracle::default().terminal_split(g, s, t, q)
}

/// `q^n` as an exact rational; the partition function of an edgeless instance.
pub fn edgeless(n: usize, q: &BigRational) -> BigRational {
    pow(q, n)
}
