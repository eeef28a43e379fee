use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gadget::ser_rat;
use crate::model::number::{int, pow, sqrt_rational};
use crate::model::{WeightedGraph, WeightedHypergraph};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsingReduction {
    #[serde(skip)]
    pub graph: WeightedGraph,
    /// `√(1+γ) − 1`.
    #[serde(serialize_with = "ser_rat")]
    pub gamma_prime: BigRational,
    /// Whether `√(1+γ)` is rational, so that the identity below is exact.
    pub exact: bool,
    #[serde(serialize_with = "ser_rat")]
    pub y_prime: BigRational,
    /// `y′^{|ℰ|}`; `Z_Potts(G; 2, γ′) = y′^{|ℰ|} Z_Potts(H; 2, γ)`.
    #[serde(serialize_with = "ser_rat")]
    pub y_prime_power: BigRational,
}

/// Turns a 3-uniform hypergraph into a graph for the Ising model (`q = 2`): every
/// hyperedge becomes a triangle of weight `√(1+γ) − 1`. The hypergraph's own weights are
/// ignored in favour of the uniform `gamma`. When `1+γ` is not a rational square the root
/// is rounded to `bits` fractional bits.
pub fn ising3_reduce(h: &WeightedHypergraph, gamma: &BigRational, bits: u32) -> Result<IsingReduction> {
    if !gamma.is_positive() {
        return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    let (y_prime, exact) = sqrt_rational(&(int(1) + gamma), bits);
    let gamma_prime = &y_prime - int(1);
    let mut g = WeightedGraph::new(h.n());
    for f in h.hyperedges() {
        let &[u, v, w] = f.as_slice() else {
            return Err(Error::InvalidInstance(format!(
                "hyperedge of size {} in a 3-uniform instance",
                f.len()
            )));
        };
        if u == v || v == w || u == w {
            return Err(Error::InvalidInstance(format!("hyperedge {f:?} repeats a vertex")));
        }
        for (a, b) in [(u, v), (v, w), (u, w)] {
            g.add_edge(a, b, gamma_prime.clone())?;
        }
    }
    Ok(IsingReduction {
        graph: g,
        y_prime_power: pow(&y_prime, h.m()),
        gamma_prime,
        exact,
        y_prime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_eval::{potts, tutte_graph};
    use crate::model::number::rat;

    fn tri(n: usize, edges: &[[usize; 3]], w: &BigRational) -> WeightedHypergraph {
        WeightedHypergraph::from_hyperedges(n, edges.iter().map(|f| (f.to_vec(), w.clone()))).unwrap()
    }

    #[test]
    fn single_hyperedge() {
        let h = tri(3, &[[0, 1, 2]], &int(3));
        let r = ising3_reduce(&h, &int(3), 64).unwrap();
        assert!(r.exact);
        assert_eq!((r.gamma_prime.clone(), r.y_prime.clone()), (int(1), int(2)));
        assert_eq!(potts(&h, &int(2)).unwrap().value, int(14));
        assert_eq!(tutte_graph(&r.graph, &int(2)).unwrap().value, int(28));
    }

    #[test]
    fn shared_pair_and_empty() {
        let h = tri(4, &[[0, 1, 2], [1, 2, 3]], &int(8));
        let r = ising3_reduce(&h, &int(8), 64).unwrap();
        assert_eq!(r.graph.m(), 6);
        let lhs = potts(&r.graph.to_hypergraph(), &int(2)).unwrap().value;
        assert_eq!(lhs, &r.y_prime_power * potts(&h, &int(2)).unwrap().value);

        let empty = WeightedHypergraph::new(3);
        let r = ising3_reduce(&empty, &int(3), 64).unwrap();
        assert_eq!(r.graph.m(), 0);
        assert_eq!(r.y_prime_power, int(1));
    }

    #[test]
    fn irrational_root_is_approximate() {
        let r = ising3_reduce(&WeightedHypergraph::new(1), &int(1), 40).unwrap();
        assert!(!r.exact);
        let err = (&r.y_prime * &r.y_prime - int(2)).abs();
        assert!(err < rat(1, 1 << 30));
    }

    #[test]
    fn rejects_bad_shapes() {
        let h = WeightedHypergraph::from_hyperedges(3, [(vec![0, 1], int(1))]).unwrap();
        assert!(ising3_reduce(&h, &int(3), 64).is_err());
        let h = WeightedHypergraph::from_hyperedges(3, [(vec![0, 1, 1], int(1))]).unwrap();
        assert!(ising3_reduce(&h, &int(3), 64).is_err());
        assert!(ising3_reduce(&WeightedHypergraph::new(2), &int(0), 64).is_err());
    }
}
