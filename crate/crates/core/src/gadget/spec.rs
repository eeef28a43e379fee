use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::number::inverse_three_quarter_power;
use crate::model::WeightedGraph;
use crate::random_cluster::EdgeProbabilityMap;

const ROOT_BITS: u32 = 96;

/// The two-clique gadget with clique `K = 0..N` and terminals `T = N..N+t`.
///
/// Edge probabilities: `ρ` inside `K`, `N^{-3/4}` between `K` and `T`, `1` inside `T`.
/// When `N` is not a fourth power the terminal probability is a rational approximation
/// (within `2^-96` relative error) and [`p_terminal_is_exact`](Self::p_terminal_is_exact)
/// reports `false`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetSpec {
    clique: usize,
    terminals: usize,
    rho: BigRational,
    p_terminal: BigRational,
    p_terminal_exact: bool,
}

impl GadgetSpec {
    pub fn new(clique: usize, terminals: usize, rho: BigRational) -> Result<Self> {
        if clique == 0 {
            return Err(Error::InvalidParameter("gadget needs N ≥ 1".into()));
        }
        if terminals == 0 {
            return Err(Error::InvalidParameter("gadget needs t ≥ 1".into()));
        }
        if rho.is_negative() || rho > BigRational::one() {
            return Err(Error::InvalidParameter(format!("rho = {rho} outside [0,1]")));
        }
        let (p_terminal, p_terminal_exact) = inverse_three_quarter_power(clique as u64, ROOT_BITS);
        Ok(Self {
            clique,
            terminals,
            rho,
            p_terminal,
            p_terminal_exact,
        })
    }

    /// Same gadget with an explicit clique–terminal probability.
    pub fn with_terminal_probability(mut self, p: BigRational) -> Result<Self> {
        if p.is_negative() || p > BigRational::one() {
            return Err(Error::InvalidParameter(format!("p = {p} outside [0,1]")));
        }
        self.p_terminal = p;
        self.p_terminal_exact = true;
        Ok(self)
    }

    pub fn clique_size(&self) -> usize {
        self.clique
    }

    pub fn terminal_count(&self) -> usize {
        self.terminals
    }

    pub fn rho(&self) -> &BigRational {
        &self.rho
    }

    pub fn p_terminal(&self) -> &BigRational {
        &self.p_terminal
    }

    pub fn p_terminal_is_exact(&self) -> bool {
        self.p_terminal_exact
    }

    pub fn vertex_count(&self) -> usize {
        self.clique + self.terminals
    }

    pub fn clique_edge_count(&self) -> usize {
        self.clique * (self.clique - 1) / 2
    }

    /// Edges of `Γ′`: clique pairs then clique–terminal pairs.
    pub fn prime_edge_count(&self) -> usize {
        self.clique_edge_count() + self.clique * self.terminals
    }

    pub fn terminal_vertices(&self) -> std::ops::Range<usize> {
        self.clique..self.clique + self.terminals
    }

    fn prime_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::with_capacity(self.prime_edge_count());
        for i in 0..self.clique {
            for j in i + 1..self.clique {
                edges.push((i, j));
            }
        }
        for k in 0..self.clique {
            for t in self.terminal_vertices() {
                edges.push((k, t));
            }
        }
        edges
    }

    /// `γ′ = ρ/(1−ρ)`.
    pub fn gamma_clique(&self) -> Result<BigRational> {
        odds(&self.rho, "rho")
    }

    /// `γ″ = p/(1−p)` with `p` the clique–terminal probability.
    pub fn gamma_terminal(&self) -> Result<BigRational> {
        odds(&self.p_terminal, "clique-terminal probability")
    }

    /// `Γ′` with weights `γ′`, `γ″`.
    pub fn prime_graph(&self) -> Result<WeightedGraph> {
        let (gc, gt) = (self.gamma_clique()?, self.gamma_terminal()?);
        let split = self.clique_edge_count();
        WeightedGraph::from_edges(
            self.vertex_count(),
            self.prime_edges()
                .into_iter()
                .enumerate()
                .map(|(i, (u, v))| (u, v, if i < split { gc.clone() } else { gt.clone() })),
        )
    }

    /// `Γ′` with unit weights, for structural work.
    pub fn prime_structure(&self) -> WeightedGraph {
        WeightedGraph::uniform(self.vertex_count(), self.prime_edges(), &BigRational::one())
            .expect("gadget edges are valid")
    }

    /// `Γ` (including the terminal clique) with its edge-probability map. Graph weights
    /// are unit placeholders; the model lives in the map.
    pub fn full_graph(&self) -> (WeightedGraph, EdgeProbabilityMap) {
        let mut edges = self.prime_edges();
        let mut probs: Vec<BigRational> = (0..edges.len())
            .map(|i| {
                if i < self.clique_edge_count() {
                    self.rho.clone()
                } else {
                    self.p_terminal.clone()
                }
            })
            .collect();
        for a in self.terminal_vertices() {
            for b in a + 1..self.clique + self.terminals {
                edges.push((a, b));
                probs.push(BigRational::one());
            }
        }
        let g = WeightedGraph::uniform(self.vertex_count(), edges, &BigRational::one())
            .expect("gadget edges are valid");
        let p = EdgeProbabilityMap::new(&g, probs).expect("probabilities lie in [0,1]");
        (g, p)
    }
}

fn odds(p: &BigRational, what: &str) -> Result<BigRational> {
    let rest = BigRational::one() - p;
    if rest.is_zero() {
        return Err(Error::InvalidParameter(format!(
            "{what} = 1 gives an infinite edge weight"
        )));
    }
    Ok(p / rest)
}

/// `Γ′(N, t, ρ)` together with its spec; fails when a probability equals 1.
pub fn build_gadget(
    clique: usize,
    terminals: usize,
    rho: BigRational,
) -> Result<(GadgetSpec, WeightedGraph)> {
    let spec = GadgetSpec::new(clique, terminals, rho)?;
    let g = spec.prime_graph()?;
    Ok((spec, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::number::{int, rat};

    #[test]
    fn edge_counts_and_weights() {
        let (spec, g) = build_gadget(3, 2, rat(1, 4)).unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.m(), 9);
        assert_eq!(g.weight(0), &rat(1, 3));
        assert!(!spec.p_terminal_is_exact());
        let (spec16, g16) = build_gadget(16, 2, rat(1, 100)).unwrap();
        assert!(spec16.p_terminal_is_exact());
        assert_eq!(spec16.p_terminal(), &rat(1, 8));
        assert_eq!(g16.weight(g16.m() - 1), &rat(1, 7));
    }

    #[test]
    fn single_clique_vertex_has_infinite_terminal_weight() {
        assert!(build_gadget(1, 1, rat(1, 2)).is_err());
        let spec = GadgetSpec::new(1, 1, rat(1, 2))
            .unwrap()
            .with_terminal_probability(rat(2, 5))
            .unwrap();
        let g = spec.prime_graph().unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(g.weight(0), &rat(2, 3));
    }

    #[test]
    fn rho_one_rejected() {
        assert!(build_gadget(4, 2, int(1)).is_err());
    }

    #[test]
    fn weights_in_unit_interval_on_the_tuning_range() {
        // ρ ∈ [N^-3, λ/N] with λ/N ≤ 1/2 gives weights in [|V|^-3, 1]
        let n = 16usize;
        let lo = rat(1, (n * n * n) as i64);
        let hi = rat(1, 2);
        for rho in [lo, hi] {
            let (_, g) = build_gadget(n, 2, rho).unwrap();
            let floor = rat(1, ((n + 2) * (n + 2) * (n + 2)) as i64);
            assert!(g.weights().iter().all(|w| *w >= floor && *w <= int(1)));
        }
    }

    #[test]
    fn full_graph_has_forced_terminal_clique() {
        let spec = GadgetSpec::new(2, 3, rat(1, 3)).unwrap();
        let (g, p) = spec.full_graph();
        assert_eq!(g.m(), 1 + 6 + 3);
        assert_eq!(p.get(g.m() - 1), &int(1));
    }
}
