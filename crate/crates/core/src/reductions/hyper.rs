use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_eval::frontier;
use crate::gadget::{dp_weights, ser_rat, tune_rho_with, z_k, GadgetSpec, TuneResult, TunerConfig};
use crate::model::number::{exp_bounds, floor_dyadic, int, pow};
use crate::model::{Partition, RollbackUnionFind, WeightedGraph, WeightedHypergraph};

const ETA_BITS: u32 = 64;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TwoWeightConfig {
    /// Clique size to use instead of the prescribed one, which is far beyond exact reach.
    pub clique_override: Option<usize>,
    pub tuner: TunerConfig,
}

/// The two-weight graph `Ĝ` with everything needed to map its partition function back.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoWeightInstance {
    #[serde(skip)]
    pub graph: WeightedGraph,
    #[serde(serialize_with = "ser_rat")]
    pub gamma_clique: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub gamma_terminal: BigRational,
    pub clique: usize,
    pub terminals: usize,
    pub hyperedges: usize,
    /// `Z_j(⊥)`, the gadget weight of the all-singletons terminal partition.
    #[serde(serialize_with = "ser_rat")]
    pub c: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub chi: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub eta: BigRational,
    pub tune: Option<TuneResult>,
    /// `Z_Tutte(H) ≈ scale · Z_Tutte(Ĝ)`.
    #[serde(serialize_with = "ser_rat")]
    pub scale: BigRational,
    /// Smallest `N = r^4` above `max(t^16, η^{-1/8}, N0)`.
    #[serde(serialize_with = "ser_bigint")]
    pub prescribed_clique: BigInt,
    pub asymptotic_regime: bool,
    pub warnings: Vec<String>,
    /// Vertices of `Ĝ` hosting gadget `j`: clique vertices first, then the terminals.
    #[serde(skip)]
    pub gadget_vertices: Vec<Vec<usize>>,
}

fn ser_bigint<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Largest 64-bit dyadic `η` with `1 + η(1+e^χ γ)/(1−η) ≤ e^χ`.
///
/// The condition is `η ≤ (e^χ − 1)/(e^χ(1+γ))`; the right side increases with `e^χ`,
/// so a certified lower bound on `e^χ` keeps the choice safe.
pub fn choose_eta(chi: &BigRational, gamma: &BigRational) -> BigRational {
    let e = exp_bounds(chi, 128).lo;
    let bound = (&e - int(1)) / (&e * (int(1) + gamma));
    floor_dyadic(&bound, ETA_BITS)
}

/// Smallest `r^4` with `r^4 > t^16`, `r^32 η > 1` and `r^4 > n0`.
pub fn prescribed_clique_size(t: usize, eta: &BigRational, n0: usize) -> BigInt {
    let t4 = BigInt::from(t).pow(4);
    let mut r: BigInt = &t4 + 1;
    let n0 = BigInt::from(n0);
    loop {
        let r4 = r.pow(4);
        let big_enough = BigRational::from_integer(r.pow(32)) * eta > BigRational::one();
        if big_enough && r4 > n0 {
            return r4;
        }
        r += 1;
    }
}

fn check_uniform(h: &WeightedHypergraph, gamma: &BigRational) -> Result<usize> {
    for (j, f) in h.hyperedges().iter().enumerate() {
        let mut sorted = f.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != f.len() {
            return Err(Error::InvalidInstance(format!("hyperedge {j} repeats a vertex")));
        }
    }
    let t = h
        .uniform_arity()
        .ok_or_else(|| Error::InvalidInstance("hypergraph is not uniform".into()))?;
    match h.uniform_weight() {
        Some(w) if w == gamma => Ok(t),
        _ => Err(Error::InvalidInstance(format!(
            "every hyperedge must carry weight {gamma}"
        ))),
    }
}

/// Replaces every hyperedge by a copy of `Γ′` whose terminals are the hyperedge's
/// vertices. Vertices of `H` keep their indices; clique vertices are appended.
pub fn simulate_hyperedges(
    h: &WeightedHypergraph,
    spec: &GadgetSpec,
) -> Result<(WeightedGraph, Vec<Vec<usize>>)> {
    let prime = spec.prime_graph()?;
    let n = spec.clique_size();
    let mut g = WeightedGraph::new(h.n());
    let mut hosts = Vec::with_capacity(h.m());
    for f in h.hyperedges() {
        if f.len() != spec.terminal_count() {
            return Err(Error::InvalidInstance(format!(
                "hyperedge of size {} for a gadget with {} terminals",
                f.len(),
                spec.terminal_count()
            )));
        }
        let mut host: Vec<usize> = (0..n).map(|_| g.add_vertex()).collect();
        host.extend_from_slice(f);
        for (id, &(u, v)) in prime.edges().iter().enumerate() {
            g.add_edge(host[u], host[v], prime.weight(id).clone())?;
        }
        hosts.push(host);
    }
    Ok((g, hosts))
}

/// Both sides of the decomposition of `Z_Tutte(Ĝ)` over per-gadget terminal partitions:
/// the direct value, and `Σ q^{κ(π₁∨…∨π_m)} Π_j Z_j(π_j)`.
pub fn decomposition_check(
    h: &WeightedHypergraph,
    spec: &GadgetSpec,
    q: &BigRational,
) -> Result<(BigRational, BigRational)> {
    let (g, _) = simulate_hyperedges(h, spec)?;
    let direct = frontier::tutte(&g, q)?;
    let prime = spec.prime_graph()?;
    let terminals: Vec<usize> = spec.terminal_vertices().collect();
    let local: Vec<(Partition, BigRational)> =
        frontier::terminal_weights(&prime, q, &terminals)?.into_iter().collect();

    let m = h.m();
    let mut total = BigRational::zero();
    let mut choice = vec![0usize; m];
    let mut uf = RollbackUnionFind::new(h.n());
    loop {
        let mark = uf.time();
        let mut weight = BigRational::one();
        for (j, &c) in choice.iter().enumerate() {
            let (p, w) = &local[c];
            weight *= w;
            let f = h.hyperedge(j);
            for block in p.blocks() {
                // terminal `N + a` of the gadget is vertex `f[a]` of H
                let first = f[block[0] - spec.clique_size()];
                for &x in &block[1..] {
                    uf.union(first, f[x - spec.clique_size()]);
                }
            }
        }
        total += pow(q, uf.components()) * weight;
        uf.rollback(mark);

        let mut j = 0;
        loop {
            if j == m {
                return Ok((direct, total));
            }
            choice[j] += 1;
            if choice[j] < local.len() {
                break;
            }
            choice[j] = 0;
            j += 1;
        }
    }
}

fn weight_warnings(n: usize, weights: [&BigRational; 2], warnings: &mut Vec<String>) {
    let lo = BigRational::new(BigInt::one(), BigInt::from(n).pow(3));
    for w in weights {
        if *w < lo || *w > BigRational::one() {
            warnings.push(format!("weight {w} outside [|V|^-3, 1] = [{lo}, 1]"));
        }
    }
}

/// Builds the two-weight instance simulating the `t`-uniform hypergraph `h` (every
/// hyperedge weighted `gamma`) at cluster weight `q`.
///
/// `ρ` is tuned so the gadget's `Z^1/Z^t` is within `e^{±χ/2}` of `γ`, with `χ = ε/(4m)`,
/// and `c = Z_j(⊥)` is computed exactly from the weight recurrence. Then
/// `c^{-m} Z_Tutte(Ĝ)` approximates `Z_Tutte(H)` when the clique is large enough; at
/// smaller sizes only the exact decomposition of [`decomposition_check`] is guaranteed.
pub fn hyper_to_twoweight(
    h: &WeightedHypergraph,
    q: &BigRational,
    gamma: &BigRational,
    eps: &BigRational,
    cfg: &TwoWeightConfig,
) -> Result<TwoWeightInstance> {
    if !eps.is_positive() || !gamma.is_positive() {
        return Err(Error::InvalidParameter("eps and gamma must be positive".into()));
    }
    if *q <= int(1) {
        return Err(Error::InvalidParameter(format!("q must exceed 1, got {q}")));
    }
    let m = h.m();
    let mut warnings = Vec::new();
    if m == 0 {
        return Ok(TwoWeightInstance {
            graph: WeightedGraph::new(h.n()),
            gamma_clique: BigRational::zero(),
            gamma_terminal: BigRational::zero(),
            clique: 0,
            terminals: 0,
            hyperedges: 0,
            c: BigRational::one(),
            chi: eps.clone(),
            eta: BigRational::zero(),
            tune: None,
            scale: BigRational::one(),
            prescribed_clique: BigInt::zero(),
            asymptotic_regime: true,
            warnings,
            gadget_vertices: Vec::new(),
        });
    }
    let t = check_uniform(h, gamma)?;
    let chi = eps / int(4 * m as i64);
    let eta = choose_eta(&chi, gamma);
    let prescribed_clique = prescribed_clique_size(t, &eta, cfg.tuner.n0);
    if t == 1 {
        // singleton hyperedges never join anything: each contributes a factor 1 + γ
        warnings.push("1-uniform hypergraph: no gadget needed".into());
        return Ok(TwoWeightInstance {
            graph: WeightedGraph::new(h.n()),
            gamma_clique: BigRational::zero(),
            gamma_terminal: BigRational::zero(),
            clique: 0,
            terminals: 1,
            hyperedges: m,
            c: BigRational::one(),
            chi,
            eta,
            tune: None,
            scale: pow(&(int(1) + gamma), m),
            prescribed_clique,
            asymptotic_regime: true,
            warnings,
            gadget_vertices: Vec::new(),
        });
    }

    let clique = match cfg.clique_override {
        Some(n) => {
            warnings.push(format!("clique size overridden to {n} (prescribed {prescribed_clique})"));
            n
        }
        None => {
            let limit = cfg.tuner.n_limit;
            if prescribed_clique > BigInt::from(limit) {
                return Err(Error::GadgetTooLarge {
                    n: u64::try_from(&prescribed_clique).unwrap_or(u64::MAX),
                    limit: limit as u64,
                });
            }
            u64::try_from(&prescribed_clique).unwrap_or(u64::MAX) as usize
        }
    };
    let tune = tune_rho_with(clique, t, q, gamma, &chi, &cfg.tuner)?;
    let spec = GadgetSpec::new(clique, t, tune.rho.clone())?;
    if !spec.p_terminal_is_exact() {
        warnings.push(format!("N = {clique} is not a fourth power; N^(-3/4) rounded"));
    }
    let gamma_clique = spec.gamma_clique()?;
    let gamma_terminal = spec.gamma_terminal()?;
    let table = dp_weights(t, clique, &gamma_clique, &gamma_terminal)?;
    let c = z_k(&table, t, clique, q)?.z_k(t).clone();
    let (graph, gadget_vertices) = simulate_hyperedges(h, &spec)?;
    weight_warnings(graph.n(), [&gamma_clique, &gamma_terminal], &mut warnings);
    if !tune.asymptotic_regime {
        warnings.push("outside the asymptotic regime: only the exact decomposition holds".into());
    }
    Ok(TwoWeightInstance {
        graph,
        scale: pow(&c, m).recip(),
        gamma_clique,
        gamma_terminal,
        clique,
        terminals: t,
        hyperedges: m,
        c,
        chi,
        eta,
        asymptotic_regime: tune.asymptotic_regime,
        tune: Some(tune),
        prescribed_clique,
        warnings,
        gadget_vertices,
    })
}

/// Per-partition gadget weights keyed by the partition of `0..t`.
pub fn gadget_partition_weights(spec: &GadgetSpec, q: &BigRational) -> Result<BTreeMap<Partition, BigRational>> {
    let prime = spec.prime_graph()?;
    let terminals: Vec<usize> = spec.terminal_vertices().collect();
    frontier::terminal_weights(&prime, q, &terminals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::number::rat;

    fn hyper(n: usize, edges: &[&[usize]], w: &BigRational) -> WeightedHypergraph {
        WeightedHypergraph::from_hyperedges(n, edges.iter().map(|f| (f.to_vec(), w.clone()))).unwrap()
    }

    #[test]
    fn eta_satisfies_condition() {
        for (chi, gamma) in [(rat(1, 8), int(2)), (rat(1, 1000), rat(1, 3)), (int(1), int(5))] {
            let eta = choose_eta(&chi, &gamma);
            assert!(eta.is_positive());
            let e = exp_bounds(&chi, 128);
            let lhs = int(1) + &eta * (int(1) + &e.hi * &gamma) / (int(1) - &eta);
            assert!(lhs <= e.lo);
        }
    }

    #[test]
    fn prescribed_clique_for_pairs() {
        let n = prescribed_clique_size(2, &rat(1, 100), 0);
        assert_eq!(n, BigInt::from(17u32).pow(4));
    }

    #[test]
    fn decomposition_single_and_overlapping() {
        let q = int(3);
        for (n, edges) in [(2usize, vec![vec![0usize, 1]]), (3, vec![vec![0, 1], vec![1, 2]])] {
            let refs: Vec<&[usize]> = edges.iter().map(|e| e.as_slice()).collect();
            let h = hyper(n, &refs, &int(2));
            for clique in 2..=4 {
                let spec = GadgetSpec::new(clique, 2, rat(1, 3)).unwrap();
                let (lhs, rhs) = decomposition_check(&h, &spec, &q).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn c_is_bottom_partition_weight() {
        let q = int(3);
        let spec = GadgetSpec::new(3, 2, rat(1, 4)).unwrap();
        let weights = gadget_partition_weights(&spec, &q).unwrap();
        let bottom = Partition::finest(spec.terminal_vertices().collect());
        let table = dp_weights(2, 3, &spec.gamma_clique().unwrap(), &spec.gamma_terminal().unwrap()).unwrap();
        assert_eq!(&weights[&bottom], z_k(&table, 2, 3, &q).unwrap().z_k(2));
    }

    #[test]
    fn tuned_instance_structure() {
        // at N = 16, q = 3 the balance ratio spans roughly [0.1, 1.39]
        let h = hyper(3, &[&[0, 1], &[1, 2]], &int(1));
        let cfg = TwoWeightConfig {
            clique_override: Some(16),
            ..Default::default()
        };
        let inst = hyper_to_twoweight(&h, &int(3), &int(1), &rat(1, 2), &cfg).unwrap();
        assert_eq!(inst.graph.n(), 3 + 2 * 16);
        assert_eq!(inst.graph.m(), 2 * (120 + 32));
        assert_eq!(inst.scale, pow(&inst.c, 2).recip());
        assert!(!inst.warnings.is_empty());
        let tune = inst.tune.unwrap();
        assert!(tune.zeta >= tune.accept_low && tune.zeta <= tune.accept_high);
    }

    #[test]
    fn degenerate_inputs() {
        let cfg = TwoWeightConfig::default();
        let empty = WeightedHypergraph::new(4);
        let inst = hyper_to_twoweight(&empty, &int(3), &int(2), &int(1), &cfg).unwrap();
        assert_eq!(inst.graph.n(), 4);
        assert_eq!(inst.scale, int(1));

        let singles = hyper(2, &[&[0], &[1], &[1]], &int(2));
        let inst = hyper_to_twoweight(&singles, &int(3), &int(2), &int(1), &cfg).unwrap();
        let zh = crate::exact_eval::tutte_hypergraph(&singles, &int(3)).unwrap().value;
        assert_eq!(inst.scale * frontier::tutte(&inst.graph, &int(3)).unwrap(), zh);

        let mixed = hyper(3, &[&[0, 1], &[0, 1, 2]], &int(2));
        assert!(hyper_to_twoweight(&mixed, &int(3), &int(2), &int(1), &cfg).is_err());
        let repeated = hyper(3, &[&[0, 0]], &int(2));
        assert!(hyper_to_twoweight(&repeated, &int(3), &int(2), &int(1), &cfg).is_err());
        let other_weight = hyper(3, &[&[0, 1]], &int(5));
        assert!(hyper_to_twoweight(&other_weight, &int(3), &int(2), &int(1), &cfg).is_err());
    }

    #[test]
    fn prescribed_size_is_out_of_reach() {
        let h = hyper(2, &[&[0, 1]], &int(2));
        let err = hyper_to_twoweight(&h, &int(3), &int(2), &int(1), &TwoWeightConfig::default()).unwrap_err();
        assert!(err.is_regime_error());
    }
}
