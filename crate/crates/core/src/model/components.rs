use crate::error::{Error, Result};

use super::{Partition, RollbackUnionFind, WeightedGraph, WeightedHypergraph};

/// `κ(V, A)` and the vertex partition induced by the edge ids in `subset`.
pub fn connected_components(g: &WeightedGraph, subset: &[usize]) -> Result<(usize, Partition)> {
    let mut uf = RollbackUnionFind::new(g.n());
    for &id in subset {
        g.check_edge(id)?;
        let (u, v) = g.edge(id);
        uf.union(u, v);
    }
    Ok(finish(&uf))
}

/// Same as [`connected_components`] under hyperedge connectivity.
pub fn hyper_components(h: &WeightedHypergraph, subset: &[usize]) -> Result<(usize, Partition)> {
    let mut uf = RollbackUnionFind::new(h.n());
    for &id in subset {
        if id >= h.m() {
            return Err(Error::EdgeOutOfRange { id, len: h.m() });
        }
        let f = h.hyperedge(id);
        for w in f.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    Ok(finish(&uf))
}

fn finish(uf: &RollbackUnionFind) -> (usize, Partition) {
    let p = Partition::from_labels((0..uf.len()).collect(), &uf.labels());
    (uf.components(), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::number::int;
    use proptest::prelude::*;
    use std::collections::VecDeque;

    fn bfs_count(n: usize, edges: &[(usize, usize)]) -> usize {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut seen = vec![false; n];
        let mut count = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
        count
    }

    #[test]
    fn small_cases() {
        let g = WeightedGraph::new(3);
        let (k, p) = connected_components(&g, &[]).unwrap();
        assert_eq!(k, 3);
        assert_eq!(p, Partition::finest(vec![0, 1, 2]));

        let tri = WeightedGraph::uniform(3, [(0, 1), (1, 2), (0, 2)], &int(1)).unwrap();
        assert_eq!(connected_components(&tri, &[0, 1, 2]).unwrap().0, 1);

        let path = WeightedGraph::uniform(3, [(0, 1)], &int(1)).unwrap();
        let (k, p) = connected_components(&path, &[0]).unwrap();
        assert_eq!(k, 2);
        assert_eq!(p.blocks(), &[vec![0, 1], vec![2]]);

        assert!(matches!(
            connected_components(&path, &[3]),
            Err(Error::EdgeOutOfRange { id: 3, len: 1 })
        ));
    }

    #[test]
    fn hyperedge_cases() {
        let h = WeightedHypergraph::from_hyperedges(4, [(vec![0, 1, 2], int(1))]).unwrap();
        let (k, p) = hyper_components(&h, &[0]).unwrap();
        assert_eq!(k, 2);
        assert_eq!(p.blocks(), &[vec![0, 1, 2], vec![3]]);
        assert_eq!(hyper_components(&h, &[]).unwrap().0, 4);

        let h = WeightedHypergraph::from_hyperedges(
            5,
            [(vec![0, 1], int(1)), (vec![1, 2], int(1))],
        )
        .unwrap();
        let (k, p) = hyper_components(&h, &[0, 1]).unwrap();
        assert_eq!(k, 3);
        assert_eq!(p.blocks()[0], vec![0, 1, 2]);
        assert!(hyper_components(&h, &[2]).is_err());
    }

    proptest! {
        #[test]
        fn agrees_with_bfs(n in 1usize..=12, raw in prop::collection::vec((0usize..12, 0usize..12), 0..20)) {
            let edges: Vec<(usize, usize)> = raw
                .into_iter()
                .map(|(u, v)| (u % n, v % n))
                .filter(|(u, v)| u != v)
                .collect();
            let g = WeightedGraph::uniform(n, edges.iter().copied(), &int(1)).unwrap();
            let all: Vec<usize> = (0..g.m()).collect();
            let (k, p) = connected_components(&g, &all).unwrap();
            prop_assert_eq!(k, bfs_count(n, &edges));
            prop_assert_eq!(k, p.block_count());
        }
    }
}
