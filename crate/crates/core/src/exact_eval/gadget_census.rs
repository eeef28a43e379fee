use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::gadget::GadgetSpec;
use crate::model::number::pow;

use super::{ExactOracle, SubsetWalker};

/// Edge subsets of `Γ′(N, t)` counted by `(k, ℓ, a, b)`: `k` components meet the
/// terminals, `ℓ` do not, `a` clique edges and `b` clique–terminal edges are present.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetCensus {
    pub clique: usize,
    pub terminals: usize,
    pub counts: BTreeMap<(usize, usize, usize, usize), u64>,
}

impl GadgetCensus {
    pub fn clique_edges(&self) -> usize {
        self.clique * self.clique.saturating_sub(1) / 2
    }

    pub fn terminal_edges(&self) -> usize {
        self.clique * self.terminals
    }
}

/// Brute-force census of `Γ′(N, t)`; the structure does not depend on the weights.
pub fn gadget_census(clique: usize, terminals: usize, oracle: &ExactOracle) -> Result<GadgetCensus> {
    let spec = GadgetSpec::new(clique, terminals, BigRational::zero())?;
    let g = spec.prime_structure();
    let classes: Vec<usize> = (0..g.m())
        .map(|e| usize::from(e >= spec.clique_edge_count()))
        .collect();
    let marks: Vec<usize> = spec.terminal_vertices().collect();
    let walker = SubsetWalker::for_graph(&g).with_marks(&marks);
    walker.check_cap(oracle.cap)?;
    let raw = walker.census(&classes, &|uf| (uf.marked_components(), uf.unmarked_components()));
    let mut counts = BTreeMap::new();
    for (((k, l), key), c) in raw {
        let a = (key & 0xffff) as usize;
        let b = (key >> 16 & 0xffff) as usize;
        *counts.entry((k, l, a, b)).or_insert(0) += c;
    }
    Ok(GadgetCensus {
        clique,
        terminals,
        counts,
    })
}

/// `w(t, N, k, ℓ) = Σ γ(A)` from a census, at clique weight `γ′` and terminal weight `γ″`.
pub fn census_weights(
    census: &GadgetCensus,
    gamma_clique: &BigRational,
    gamma_terminal: &BigRational,
) -> BTreeMap<(usize, usize), BigRational> {
    let mut out: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
    for (&(k, l, a, b), &c) in &census.counts {
        let term = BigRational::from_integer(c.into())
            * pow(gamma_clique, a)
            * pow(gamma_terminal, b);
        *out.entry((k, l)).or_insert_with(BigRational::zero) += term;
    }
    out
}

/// `Pr(Y(A) = k)` for `A ~ RC(Γ; q, p)`, from the random-cluster weights of `Γ` with its
/// terminal–terminal edges always present.
pub fn exact_y_distribution(spec: &GadgetSpec, q: &BigRational) -> Result<BTreeMap<usize, BigRational>> {
    let oracle = ExactOracle::default();
    let census = gadget_census(spec.clique_size(), spec.terminal_count(), &oracle)?;
    let one = BigRational::one();
    let (rho, p) = (spec.rho(), spec.p_terminal());
    let (ck, ct) = (census.clique_edges(), census.terminal_edges());
    let mut mass: BTreeMap<usize, BigRational> = (1..=spec.terminal_count())
        .map(|k| (k, BigRational::zero()))
        .collect();
    for (&(k, l, a, b), &c) in &census.counts {
        // every terminal component is one component of Γ once T² is present
        let kappa = l + usize::from(k > 0);
        let term = BigRational::from_integer(c.into())
            * pow(q, kappa)
            * pow(rho, a)
            * pow(&(&one - rho), ck - a)
            * pow(p, b)
            * pow(&(&one - p), ct - b);
        *mass.entry(k).or_insert_with(BigRational::zero) += term;
    }
    let total = mass.values().fold(BigRational::zero(), |x, y| x + y);
    Ok(mass
        .into_iter()
        .map(|(k, v)| (k, v / &total))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::number::{int, rat};

    #[test]
    fn single_terminal_is_certain() {
        let spec = GadgetSpec::new(3, 1, rat(1, 5)).unwrap();
        let d = exact_y_distribution(&spec, &int(3)).unwrap();
        assert_eq!(d, BTreeMap::from([(1, int(1))]));
    }

    #[test]
    fn one_clique_vertex_two_terminals() {
        // N = 1: p = 1 on both clique–terminal edges, so the terminals always meet
        let spec = GadgetSpec::new(1, 2, rat(1, 3)).unwrap();
        let d = exact_y_distribution(&spec, &int(2)).unwrap();
        assert_eq!(d, BTreeMap::from([(1, int(1)), (2, int(0))]));
        let total: BigRational = d.values().sum();
        assert_eq!(total, int(1));
    }

    #[test]
    fn probabilities_sum_to_one() {
        let spec = GadgetSpec::new(3, 2, rat(1, 3)).unwrap();
        let d = exact_y_distribution(&spec, &rat(5, 2)).unwrap();
        assert_eq!(d.values().sum::<BigRational>(), int(1));
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn census_totals() {
        let c = gadget_census(3, 2, &ExactOracle::new(24)).unwrap();
        assert_eq!(c.counts.values().sum::<u64>(), 1 << 9);
        let w = census_weights(&c, &int(1), &int(1));
        assert_eq!(w.values().sum::<BigRational>(), int(512));
    }
}
