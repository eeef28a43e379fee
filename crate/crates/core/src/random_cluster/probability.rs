use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::RngCore;

use crate::error::{Error, Result};
use crate::model::WeightedGraph;

/// `p(e) ∈ [0,1]` for every edge id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeProbabilityMap {
    probs: Vec<BigRational>,
}

impl EdgeProbabilityMap {
    pub fn new(g: &WeightedGraph, probs: Vec<BigRational>) -> Result<Self> {
        if probs.len() != g.m() {
            return Err(Error::InvalidParameter(format!(
                "{} probabilities for {} edges",
                probs.len(),
                g.m()
            )));
        }
        if let Some(p) = probs.iter().find(|p| p.is_negative() || **p > BigRational::one()) {
            return Err(Error::InvalidParameter(format!("probability {p} outside [0,1]")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(g: &WeightedGraph, p: &BigRational) -> Result<Self> {
        Self::new(g, vec![p.clone(); g.m()])
    }

    /// `p(e) = γ_e/(1+γ_e)` from the graph's weights.
    pub fn from_weights(g: &WeightedGraph) -> Self {
        let probs = g
            .weights()
            .iter()
            .map(|w| w / (BigRational::one() + w))
            .collect();
        Self { probs }
    }

    pub fn get(&self, id: usize) -> &BigRational {
        &self.probs[id]
    }

    pub fn as_slice(&self) -> &[BigRational] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `γ_e = p(e)/(1−p(e))`; fails if some `p(e) = 1`.
    pub fn weights(&self) -> Result<Vec<BigRational>> {
        self.probs
            .iter()
            .map(|p| {
                let rest = BigRational::one() - p;
                if rest.is_zero() {
                    Err(Error::InvalidParameter("p = 1 has infinite weight".into()))
                } else {
                    Ok(p / rest)
                }
            })
            .collect()
    }

    /// Pointwise `p(e)/q`.
    pub fn scaled_down(&self, q: &BigRational) -> Self {
        Self {
            probs: self.probs.iter().map(|p| p / q).collect(),
        }
    }
}

/// A rational in `[0,1]` prepared for comparison against a binary expansion.
#[derive(Clone, Debug)]
pub(crate) struct Threshold {
    value: BigRational,
    head: u64,
    /// `value·2^64 − head`, in `[0,1)`.
    tail: BigRational,
}

impl Threshold {
    pub fn new(value: BigRational) -> Self {
        let two64 = BigRational::from_integer(BigInt::one() << 64);
        let scaled = &value * &two64;
        let floor = scaled.floor();
        // value = 1 scales to 2^64, which does not fit: clamp and keep the excess as tail
        let (head, tail) = match floor.to_integer().to_u64() {
            Some(h) => (h, &scaled - &floor),
            None => (u64::MAX, &scaled - BigRational::from_integer(u64::MAX.into())),
        };
        Self { value, head, tail }
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }
}

/// A uniform `U ∈ [0,1)` whose binary expansion is drawn 64 bits at a time on demand.
/// Several thresholds may be compared against the same `U`, which is how coupled chains
/// share randomness.
pub(crate) struct LazyUniform<'r, R: RngCore> {
    rng: &'r mut R,
    chunks: Vec<u64>,
}

impl<'r, R: RngCore> LazyUniform<'r, R> {
    pub fn new(rng: &'r mut R) -> Self {
        Self {
            rng,
            chunks: Vec::with_capacity(1),
        }
    }

    fn chunk(&mut self, i: usize) -> u64 {
        while self.chunks.len() <= i {
            let c = self.rng.next_u64();
            self.chunks.push(c);
        }
        self.chunks[i]
    }

    /// Exactly `U < threshold`.
    pub fn below(&mut self, th: &Threshold) -> bool {
        let c = self.chunk(0);
        if c != th.head {
            return c < th.head;
        }
        // tie on the first 64 bits: refine with the exact remainder
        let two64 = BigRational::from_integer(BigInt::one() << 64);
        let mut x = th.tail.clone();
        let mut i = 1;
        loop {
            if x.is_zero() {
                return false;
            }
            if x >= BigRational::one() {
                return true;
            }
            let scaled = &x * &two64;
            let f = scaled.floor();
            let fu = f.to_integer().to_u64().unwrap_or(u64::MAX);
            let c = self.chunk(i);
            if c != fu {
                return c < fu;
            }
            x = scaled - f;
            i += 1;
        }
    }
}

/// One exact Bernoulli(p) draw.
pub fn bernoulli<R: RngCore>(rng: &mut R, p: &BigRational) -> bool {
    LazyUniform::new(rng).below(&Threshold::new(p.clone()))
}
