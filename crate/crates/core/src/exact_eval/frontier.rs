//! Exact evaluation by sweeping edges in order and tracking how the live vertices are
//! connected.
//!
//! A vertex is live from its first edge until its last one. States are restricted
//! growth labellings of the live vertices; when a vertex retires as the only live member
//! of its block, that block can never grow again and contributes a factor `q`. Terminal
//! vertices never retire, so the result is broken down by the partition they induce.
//!
//! Cost is driven by the number of simultaneously live vertices, so edges should come in
//! a path-like order; every construction in this crate emits them that way.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::number::pow;
use crate::model::{Partition, WeightedGraph};

use super::{check_terminals, TerminalSplit};

pub const DEFAULT_STATE_CAP: usize = 1 << 20;

type States = HashMap<Vec<u8>, BigRational>;

fn canonical(labels: &mut [u8]) {
    let mut map = [u8::MAX; 256];
    let mut next = 0u8;
    for l in labels.iter_mut() {
        if map[*l as usize] == u8::MAX {
            map[*l as usize] = next;
            next += 1;
        }
        *l = map[*l as usize];
    }
}

fn add(states: &mut States, key: Vec<u8>, w: BigRational) {
    match states.get_mut(&key) {
        Some(acc) => *acc += w,
        None => {
            states.insert(key, w);
        }
    }
}

/// For every partition `π` of `terminals`, the sum of `q^{κ_0(A)} γ(A)` over edge sets
/// `A` whose components cut the terminals into `π`, where `κ_0` counts components
/// without terminals.
pub fn terminal_weights(
    g: &WeightedGraph,
    q: &BigRational,
    terminals: &[usize],
) -> Result<BTreeMap<Partition, BigRational>> {
    terminal_weights_capped(g, q, terminals, DEFAULT_STATE_CAP)
}

pub fn terminal_weights_capped(
    g: &WeightedGraph,
    q: &BigRational,
    terminals: &[usize],
    state_cap: usize,
) -> Result<BTreeMap<Partition, BigRational>> {
    let n = g.n();
    let mut is_terminal = vec![false; n];
    for &t in terminals {
        if t >= n {
            return Err(Error::VertexOutOfRange { vertex: t, n });
        }
        if is_terminal[t] {
            return Err(Error::InvalidParameter(format!("terminal {t} listed twice")));
        }
        is_terminal[t] = true;
    }
    let mut last = vec![None; n];
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        last[u] = Some(i);
        last[v] = Some(i);
    }
    let isolated = (0..n)
        .filter(|&v| last[v].is_none() && !is_terminal[v])
        .count();
    let factor = pow(q, isolated);

    let mut active: Vec<usize> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    let mut states: States = HashMap::from([(Vec::new(), BigRational::one())]);

    let activate = |x: usize, active: &mut Vec<usize>, slot: &mut Vec<usize>, states: States| {
        slot[x] = active.len();
        active.push(x);
        states
            .into_iter()
            .map(|(mut l, w)| {
                let fresh = l.iter().max().map_or(0, |&m| m + 1);
                l.push(fresh);
                (l, w)
            })
            .collect::<States>()
    };

    for (i, (&(u, v), gamma)) in g.edges().iter().zip(g.weights()).enumerate() {
        for x in [u, v] {
            if slot[x] == usize::MAX {
                if active.len() >= 255 {
                    return Err(Error::CapExceeded {
                        what: "frontier width",
                        size: active.len() as u64 + 1,
                        cap: 255,
                    });
                }
                states = activate(x, &mut active, &mut slot, states);
            }
        }
        let (pu, pv) = (slot[u], slot[v]);
        let mut next = States::with_capacity(states.len() * 2);
        for (l, w) in states {
            if !gamma.is_zero() {
                let mut joined = l.clone();
                let (a, b) = (joined[pu], joined[pv]);
                if a != b {
                    for x in joined.iter_mut() {
                        if *x == b {
                            *x = a;
                        }
                    }
                    canonical(&mut joined);
                }
                add(&mut next, joined, &w * gamma);
            }
            add(&mut next, l, w);
        }
        states = next;

        for x in [u, v] {
            if last[x] != Some(i) || is_terminal[x] || slot[x] == usize::MAX {
                continue;
            }
            let p = slot[x];
            let mut next = States::with_capacity(states.len());
            for (mut l, mut w) in states {
                let label = l[p];
                if l.iter().filter(|&&y| y == label).count() == 1 {
                    w *= q;
                }
                l.remove(p);
                canonical(&mut l);
                add(&mut next, l, w);
            }
            states = next;
            active.remove(p);
            slot[x] = usize::MAX;
            for (k, &y) in active.iter().enumerate() {
                slot[y] = k;
            }
        }
        if states.len() > state_cap {
            return Err(Error::CapExceeded {
                what: "frontier states",
                size: states.len() as u64,
                cap: state_cap as u64,
            });
        }
    }
    for &t in terminals {
        if slot[t] == usize::MAX {
            states = activate(t, &mut active, &mut slot, states);
        }
    }

    let mut out: BTreeMap<Partition, BigRational> = BTreeMap::new();
    for (l, w) in states {
        let labels: Vec<usize> = terminals.iter().map(|&t| l[slot[t]] as usize).collect();
        let p = Partition::from_labels(terminals.to_vec(), &labels);
        *out.entry(p).or_insert_with(BigRational::zero) += w * &factor;
    }
    Ok(out)
}

/// `Z_Tutte(G; q, γ)`.
pub fn tutte(g: &WeightedGraph, q: &BigRational) -> Result<BigRational> {
    Ok(terminal_weights(g, q, &[])?
        .into_values()
        .fold(BigRational::zero(), |a, b| a + b))
}

/// `Z_st` and `Z_s|t` without the enumeration cap.
pub fn terminal_split(
    g: &WeightedGraph,
    s: usize,
    t: usize,
    q: &BigRational,
) -> Result<TerminalSplit> {
    check_terminals(g, s, t)?;
    let mut split = TerminalSplit {
        z_joined: BigRational::zero(),
        z_split: BigRational::zero(),
    };
    for (p, w) in terminal_weights(g, q, &[s, t])? {
        if p.block_count() == 1 {
            split.z_joined += w * q;
        } else {
            split.z_split += w * q * q;
        }
    }
    Ok(split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_eval;
    use crate::model::number::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn matches_small_examples() {
        let tri = WeightedGraph::uniform(3, [(0, 1), (1, 2), (0, 2)], &int(1)).unwrap();
        assert_eq!(tutte(&tri, &int(2)).unwrap(), int(28));
        assert_eq!(tutte(&WeightedGraph::new(3), &int(2)).unwrap(), int(8));
        let par = WeightedGraph::uniform(2, [(0, 1), (0, 1)], &int(2)).unwrap();
        let s = terminal_split(&par, 0, 1, &int(3)).unwrap();
        assert_eq!(s.z_joined, int(3) * int(8));
        assert_eq!(s.z_split, int(9));
    }

    #[test]
    fn long_path_is_cheap() {
        // a 400-edge path: Z = q (q + γ)^m
        let g = WeightedGraph::uniform(401, (0..400).map(|i| (i, i + 1)), &rat(1, 3)).unwrap();
        let q = int(3);
        assert_eq!(tutte(&g, &q).unwrap(), &q * pow(&(&q + rat(1, 3)), 400));
    }

    #[test]
    fn untouched_terminals_stay_singletons() {
        let g = WeightedGraph::uniform(3, [(0, 1)], &int(1)).unwrap();
        let w = terminal_weights(&g, &int(2), &[2, 0]).unwrap();
        assert_eq!(w.len(), 1);
        let (p, v) = w.into_iter().next().unwrap();
        assert_eq!(p.block_count(), 2);
        // vertex 1 is not a terminal: edge present joins it to 0, absent leaves it alone
        assert_eq!(v, int(1) + int(2));
    }

    fn graph() -> impl Strategy<Value = WeightedGraph> {
        (2usize..=6)
            .prop_flat_map(|n| {
                (
                    Just(n),
                    prop::collection::vec((0..n, 0..n, 0i64..4, 1i64..4), 0..10),
                )
            })
            .prop_map(|(n, raw)| {
                let edges = raw
                    .into_iter()
                    .filter(|(u, v, _, _)| u != v)
                    .map(|(u, v, a, b)| (u, v, rat(a, b)));
                WeightedGraph::from_edges(n, edges).unwrap()
            })
    }

    proptest! {
        #[test]
        fn agrees_with_enumeration(g in graph(), qn in 1i64..6, qd in 1i64..3) {
            let q = rat(qn, qd);
            prop_assert_eq!(tutte(&g, &q).unwrap(), exact_eval::tutte_graph(&g, &q).unwrap().value);
            prop_assert_eq!(
                terminal_split(&g, 0, 1, &q).unwrap(),
                exact_eval::terminal_split(&g, 0, 1, &q).unwrap()
            );
        }
    }
}
