//! Series/parallel implementations of edge weights from a single base weight.
//!
//! A two-terminal graph `Υ` implements `γ* = q Z_st(Υ)/Z_s|t(Υ)`. Substituting it for an
//! edge of weight `γ*` multiplies the partition function by `Z_s|t(Υ)/q²`, which for
//! series/parallel trees is the product of the series factors `q + γ₁ + γ₂`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gadget::ser_rat;
use crate::model::number::{int, pow};
use crate::model::WeightedGraph;

/// A series/parallel tree whose leaves are edges of the base weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Composition {
    Edge,
    Series(Vec<Composition>),
    Parallel(Vec<Composition>),
}

/// `(1+γ₁)(1+γ₂) − 1`; contributes no factor to the partition function.
pub fn parallel_compose(g1: &BigRational, g2: &BigRational) -> BigRational {
    (int(1) + g1) * (int(1) + g2) - int(1)
}

/// `(γ₁γ₂/(q+γ₁+γ₂), q+γ₁+γ₂)`.
pub fn series_compose(
    g1: &BigRational,
    g2: &BigRational,
    q: &BigRational,
) -> Result<(BigRational, BigRational)> {
    let factor = q + g1 + g2;
    if factor.is_zero() {
        return Err(Error::InvalidParameter("q + γ₁ + γ₂ = 0 in series composition".into()));
    }
    Ok((g1 * g2 / &factor, factor))
}

impl Composition {
    /// A path of `len` base edges.
    pub fn path(len: usize) -> Self {
        if len == 1 {
            Composition::Edge
        } else {
            Composition::Series(vec![Composition::Edge; len])
        }
    }

    /// Implemented weight and accumulated factor `Z_s|t/q²`.
    pub fn value_and_scale(&self, q: &BigRational, base: &BigRational) -> Result<(BigRational, BigRational)> {
        match self {
            Composition::Edge => Ok((base.clone(), BigRational::one())),
            Composition::Parallel(children) => {
                let mut value = BigRational::zero();
                let mut scale = BigRational::one();
                for c in children {
                    let (v, s) = c.value_and_scale(q, base)?;
                    value = parallel_compose(&value, &v);
                    scale *= s;
                }
                Ok((value, scale))
            }
            Composition::Series(children) => {
                let mut iter = children.iter();
                let first = iter
                    .next()
                    .ok_or_else(|| Error::InvalidInstance("empty series composition".into()))?;
                let (mut value, mut scale) = first.value_and_scale(q, base)?;
                for c in iter {
                    let (v, s) = c.value_and_scale(q, base)?;
                    let (joined, factor) = series_compose(&value, &v, q)?;
                    value = joined;
                    scale *= s * factor;
                }
                Ok((value, scale))
            }
        }
    }

    pub fn edge_count(&self) -> usize {
        match self {
            Composition::Edge => 1,
            Composition::Series(c) | Composition::Parallel(c) => c.iter().map(Self::edge_count).sum(),
        }
    }

    /// Adds a copy of the tree between `s` and `t` of `g`, creating inner vertices.
    pub fn embed(&self, g: &mut WeightedGraph, s: usize, t: usize, base: &BigRational) -> Result<()> {
        match self {
            Composition::Edge => {
                g.add_edge(s, t, base.clone())?;
            }
            Composition::Parallel(children) => {
                for c in children {
                    c.embed(g, s, t, base)?;
                }
            }
            Composition::Series(children) => {
                let mut from = s;
                for (i, c) in children.iter().enumerate() {
                    let to = if i + 1 == children.len() { t } else { g.add_vertex() };
                    c.embed(g, from, to, base)?;
                    from = to;
                }
            }
        }
        Ok(())
    }

    /// `Υ` on its own, with `s = 0` and `t = 1`.
    pub fn to_graph(&self, base: &BigRational) -> Result<WeightedGraph> {
        let mut g = WeightedGraph::new(2);
        self.embed(&mut g, 0, 1, base)?;
        Ok(g)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightImplementation {
    pub tree: Composition,
    #[serde(serialize_with = "ser_rat")]
    pub target: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub realized_value: BigRational,
    /// `Z_s|t(Υ)/q²`.
    #[serde(serialize_with = "ser_rat")]
    pub accumulated_scale: BigRational,
    pub edge_count: usize,
    /// Length of the path implementing `γ₁ ≤ 1/4`.
    pub k: usize,
    pub m: usize,
    /// `d_j` for `j = 1..m`.
    pub d: Vec<u64>,
    #[serde(serialize_with = "ser_rat")]
    pub gamma_1: BigRational,
}

/// Implements `target ∈ (0,1]` to within `π_tol` from below using only `γ̂`.
///
/// A path of `k` base edges gives `γ₁ ≤ 1/4`, and a path of `j` copies of that gives
/// `γ_j`. Then `d_j` parallel copies of `γ_j` are taken greedily, largest first, so that
/// `Π(1+γ_j)^{d_j} ≤ 1 + target`; `m` is the least index with
/// `(q/γ₁ + 1)^m ≥ q(1+target)/π + 1`. All quantities are computed exactly. `budget`
/// bounds `d₁ + ⋯ + d_m`.
pub fn implement_weight(
    target: &BigRational,
    q_hat: &BigRational,
    gamma_hat: &BigRational,
    pi_tol: &BigRational,
    budget: Option<u64>,
) -> Result<WeightImplementation> {
    if !target.is_positive() || *target > BigRational::one() {
        return Err(Error::InvalidParameter(format!("target {target} outside (0,1]")));
    }
    if *q_hat <= int(2) {
        return Err(Error::InvalidParameter(format!("q must exceed 2, got {q_hat}")));
    }
    if !gamma_hat.is_positive() || !pi_tol.is_positive() {
        return Err(Error::InvalidParameter("gamma and tolerance must be positive".into()));
    }
    let one = BigRational::one();
    let ratio = &one + q_hat / gamma_hat;
    // least k with (1 + q/γ̂)^k ≥ 1 + 4q, i.e. γ₁ ≤ 1/4
    let mut k = 1usize;
    let mut power = ratio.clone();
    while power < &one + q_hat * int(4) {
        k += 1;
        power *= &ratio;
    }
    let gamma_1 = q_hat / (&power - &one);
    if target == gamma_hat {
        return Ok(WeightImplementation {
            tree: Composition::Edge,
            target: target.clone(),
            realized_value: gamma_hat.clone(),
            accumulated_scale: one,
            edge_count: 1,
            k,
            m: 0,
            d: Vec::new(),
            gamma_1,
        });
    }

    let base1 = q_hat / &gamma_1 + &one;
    let goal = q_hat * (&one + target) / pi_tol + &one;
    let mut m = 1usize;
    let mut p = base1.clone();
    while p < goal {
        m += 1;
        p *= &base1;
    }

    let mut remaining = &one + target;
    let mut d = Vec::with_capacity(m);
    let mut branches = Vec::new();
    let mut branch_power = base1.clone();
    for j in 1..=m {
        let gamma_j = q_hat / (&branch_power - &one);
        let step = &one + &gamma_j;
        let mut dj = 0u64;
        while &remaining / &step >= one {
            remaining /= &step;
            dj += 1;
        }
        for _ in 0..dj {
            branches.push(Composition::path(j * k));
        }
        d.push(dj);
        branch_power *= &base1;
    }
    let used: u64 = d.iter().sum();
    if let Some(budget) = budget {
        if used > budget {
            return Err(Error::BudgetExceeded { needed: used, budget });
        }
    }
    let tree = if branches.len() == 1 {
        branches.pop().expect("one branch")
    } else {
        Composition::Parallel(branches)
    };
    let (realized_value, accumulated_scale) = tree.value_and_scale(q_hat, gamma_hat)?;
    debug_assert_eq!(&realized_value, &(&(&one + target) / &remaining - &one));
    Ok(WeightImplementation {
        edge_count: tree.edge_count(),
        tree,
        target: target.clone(),
        realized_value,
        accumulated_scale,
        k,
        m,
        d,
        gamma_1,
    })
}

/// The uniform-weight graph together with the data that maps its partition function
/// back: `Z_Tutte(graph; q, γ) = scale · Z_Tutte(source; q, realized)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformInstance {
    pub graph: WeightedGraph,
    pub scale: BigRational,
    /// Implemented weight of every source edge.
    pub realized: Vec<BigRational>,
    pub implementations: BTreeMap<BigRational, WeightImplementation>,
    pub chi: BigRational,
    pub pi_tol: BigRational,
    pub warnings: Vec<String>,
}

/// Replaces every edge of `g` by an implementation of its weight over the single weight
/// `gamma`, with tolerance `π = χ/(2|V|³)`, `χ = ε/(4(|V|+|E|²))`.
///
/// A weight below `|V|^{-3}` gets the tighter tolerance `wχ/2` so that the implemented
/// value stays within `e^{-χ}` of it. With `enforce_budget` each implementation may use
/// at most `|E|` parallel branches.
pub fn twoweight_to_uniform(
    g: &WeightedGraph,
    q: &BigRational,
    gamma: &BigRational,
    eps: &BigRational,
    enforce_budget: bool,
) -> Result<UniformInstance> {
    if !eps.is_positive() {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    let n = g.n().max(1);
    let m = g.m();
    let chi = eps / int((n + m * m) as i64 * 4);
    let pi_tol = &chi / int(2 * n.pow(3) as i64);
    let floor = BigRational::new(1.into(), n.pow(3).into());
    let budget = enforce_budget.then_some(m as u64);
    let mut warnings = Vec::new();
    let mut implementations = BTreeMap::new();
    for w in g.weights() {
        if implementations.contains_key(w) {
            continue;
        }
        let tol = if *w < floor {
            warnings.push(format!("weight {w} below |V|^-3; tolerance tightened"));
            w * &chi / int(2)
        } else {
            pi_tol.clone()
        };
        if *w > BigRational::one() {
            warnings.push(format!("weight {w} above 1"));
        }
        implementations.insert(w.clone(), implement_weight(w, q, gamma, &tol, budget)?);
    }

    let mut out = WeightedGraph::new(g.n());
    let mut realized = Vec::with_capacity(m);
    let mut uses: BTreeMap<&BigRational, u32> = BTreeMap::new();
    for (id, &(u, v)) in g.edges().iter().enumerate() {
        let imp = &implementations[g.weight(id)];
        imp.tree.embed(&mut out, u, v, gamma)?;
        *uses.entry(g.weight(id)).or_default() += 1;
        realized.push(imp.realized_value.clone());
    }
    // one power per distinct weight; a reduced fraction stays reduced under powers
    let scale = uses.into_iter().fold(BigRational::one(), |acc, (w, count)| {
        let s = &implementations[w].accumulated_scale;
        acc * BigRational::new_raw(s.numer().pow(count), s.denom().pow(count))
    });
    Ok(UniformInstance {
        graph: out,
        scale,
        realized,
        implementations,
        chi,
        pi_tol,
        warnings,
    })
}

/// `q Z_st/Z_s|t` and `Z_s|t/q²` of the expanded tree, computed by exact evaluation.
pub fn expanded_value(tree: &Composition, q: &BigRational, base: &BigRational) -> Result<(BigRational, BigRational)> {
    let g = tree.to_graph(base)?;
    let split = crate::exact_eval::frontier::terminal_split(&g, 0, 1, q)?;
    Ok((q * &split.z_joined / &split.z_split, split.z_split / pow(q, 2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_eval::frontier;
    use crate::model::number::{rat, to_f64};
    use proptest::prelude::*;

    #[test]
    fn composition_formulas() {
        assert_eq!(parallel_compose(&int(1), &int(1)), int(3));
        assert_eq!(parallel_compose(&rat(2, 5), &int(0)), rat(2, 5));
        let (g, s) = series_compose(&int(2), &int(2), &int(2)).unwrap();
        assert_eq!((g.clone(), s), (rat(2, 3), int(6)));
        assert_eq!(int(1) + int(2) / g, int(2) * int(2));
        assert_eq!(series_compose(&int(1), &int(1), &int(2)).unwrap().0, rat(1, 4));
        assert!(series_compose(&int(-1), &int(-1), &int(2)).is_err());
    }

    #[test]
    fn small_trees_match_exact_evaluation() {
        let q = int(2);
        let par = Composition::Parallel(vec![Composition::Edge, Composition::Edge]);
        assert_eq!(expanded_value(&par, &q, &int(1)).unwrap(), (int(3), int(1)));
        let ser = Composition::path(2);
        assert_eq!(expanded_value(&ser, &q, &int(2)).unwrap(), (rat(2, 3), int(6)));
        let nested = Composition::Parallel(vec![ser.clone(), Composition::Series(vec![par, Composition::Edge])]);
        let q = int(3);
        assert_eq!(
            expanded_value(&nested, &q, &rat(3, 7)).unwrap(),
            nested.value_and_scale(&q, &rat(3, 7)).unwrap()
        );
    }

    #[test]
    fn k_for_three_and_two() {
        let imp = implement_weight(&rat(1, 2), &int(3), &int(2), &rat(1, 1000), None).unwrap();
        assert_eq!(imp.k, 3);
        assert_eq!(imp.gamma_1, rat(24, 117));
        assert!((to_f64(&imp.gamma_1) - 0.20513).abs() < 1e-5);
    }

    #[test]
    fn exact_target_is_one_edge() {
        let imp = implement_weight(&int(1), &int(3), &int(1), &int(1), None).unwrap();
        assert_eq!(imp.tree, Composition::Edge);
        assert_eq!(imp.accumulated_scale, int(1));
    }

    #[test]
    fn gamma_one_target_is_single_chain() {
        let (q, g) = (int(3), int(2));
        let gamma_1 = rat(24, 117);
        let imp = implement_weight(&gamma_1, &q, &g, &int(1), None).unwrap();
        assert_eq!(imp.tree, Composition::path(3));
        assert_eq!(imp.realized_value, gamma_1);
    }

    #[test]
    fn budget_is_enforced() {
        let err = implement_weight(&int(1), &int(3), &int(2), &rat(1, 1_000_000), Some(1)).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn triangle_two_weights() {
        let (q, gamma) = (int(3), int(2));
        let g = WeightedGraph::from_edges(3, [(0, 1, rat(1, 2)), (1, 2, rat(1, 3)), (0, 2, rat(1, 2))]).unwrap();
        let u = twoweight_to_uniform(&g, &q, &gamma, &int(1), false).unwrap();
        assert!(u.graph.weights().iter().all(|w| *w == gamma));
        let realized = g.with_weights(u.realized.clone()).unwrap();
        assert_eq!(
            frontier::tutte(&u.graph, &q).unwrap(),
            &u.scale * frontier::tutte(&realized, &q).unwrap()
        );
        for (w, r) in g.weights().iter().zip(&u.realized) {
            assert!(r <= w && *r >= w - &u.pi_tol);
        }
    }

    #[test]
    fn exact_edge_passes_through() {
        let g = WeightedGraph::uniform(2, [(0, 1)], &int(1)).unwrap();
        let u = twoweight_to_uniform(&g, &int(3), &int(1), &int(1), true).unwrap();
        assert_eq!(u.graph, g);
        assert_eq!(u.scale, int(1));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn realized_within_tolerance(num in 1u32..=1000, tol_exp in 2u32..8) {
            let target = BigRational::new(num.into(), 1000.into());
            let tol = BigRational::new(1.into(), num_bigint::BigInt::from(10).pow(tol_exp));
            let imp = implement_weight(&target, &int(3), &int(2), &tol, None).unwrap();
            prop_assert!(imp.realized_value <= target);
            prop_assert!(imp.realized_value >= &target - &tol);
        }
    }
}
