use num_bigint::BigInt;
use proptest::prelude::*;

use pottsforge::exact_eval::{self, frontier};
use pottsforge::model::number::{int, rat};
use pottsforge::model::text::{parse, Instance};
use pottsforge::reductions::{run_pipeline, PipelineConfig};
use pottsforge::{BigRational, BipartiteGraph, WeightedGraph, WeightedHypergraph};

fn weight() -> impl Strategy<Value = BigRational> {
    (0i64..7, 1i64..5).prop_map(|(n, d)| rat(n, d))
}

fn graph(max_n: usize, max_m: usize) -> impl Strategy<Value = WeightedGraph> {
    (2..=max_n).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 1..n, weight()), 0..=max_m).prop_map(move |es| {
            // shift by a nonzero offset so no loops are produced
            let es = es.into_iter().map(|(u, d, w)| (u, (u + d) % n, w));
            WeightedGraph::from_edges(n, es).unwrap()
        })
    })
}

fn hypergraph() -> impl Strategy<Value = WeightedHypergraph> {
    (1usize..6).prop_flat_map(|n| {
        prop::collection::vec((prop::collection::vec(0..n, 1..4), weight()), 0..4)
            .prop_map(move |fs| WeightedHypergraph::from_hyperedges(n, fs).unwrap())
    })
}

fn bipartite() -> impl Strategy<Value = BipartiteGraph> {
    (1usize..4, 0usize..4).prop_flat_map(|(l, r)| {
        prop::collection::btree_set((0..l, 0..r.max(1)), 0..=l * r).prop_map(move |es| {
            let es = if r == 0 { Vec::new() } else { es.into_iter().collect() };
            BipartiteGraph::new(l, r, es).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_format_round_trips(g in graph(6, 8), h in hypergraph(), b in bipartite()) {
        for inst in [Instance::Graph(g), Instance::Hypergraph(h), Instance::Bipartite(b)] {
            prop_assert_eq!(parse(&inst.to_text()).unwrap(), inst);
        }
    }

    #[test]
    fn frontier_matches_enumeration(g in graph(6, 9), q in (1i64..5, 1i64..3)) {
        let q = rat(q.0, q.1);
        let brute = exact_eval::tutte_graph(&g, &q).unwrap().value;
        prop_assert_eq!(frontier::tutte(&g, &q).unwrap(), brute);
    }

    #[test]
    fn graph_as_hypergraph_keeps_its_value(g in graph(5, 6), q in 1i64..4) {
        let q = int(q);
        let direct = exact_eval::tutte_graph(&g, &q).unwrap().value;
        let lifted = exact_eval::tutte_hypergraph(&g.to_hypergraph(), &q).unwrap().value;
        prop_assert_eq!(direct, lifted);
    }

    #[test]
    fn integer_q_potts_is_tutte(h in hypergraph(), q in 1i64..4) {
        prop_assert!(exact_eval::fk_check(&h, &int(q)).unwrap());
    }
}

#[test]
fn pipeline_recovers_single_vertex_count() {
    let b = BipartiteGraph::new(1, 0, Vec::new()).unwrap();
    for (q, gamma) in [(int(3), int(2)), (int(4), int(3))] {
        let res = run_pipeline(&b, &q, &gamma, &rat(1, 2), &PipelineConfig::default()).unwrap();
        let stages: Vec<_> = res.traces.iter().map(|t| t.stage).collect();
        assert_eq!(
            stages,
            ["maxis-blowup", "semiregular-pad", "hypergraph-tutte", "two-weight", "uniform-weight"]
        );
        assert!(res.final_graph.weights().iter().all(|w| *w == gamma));
        let z = frontier::tutte(&res.final_graph, &q).unwrap();
        assert_eq!(res.recover(&z), BigInt::from(1), "q = {q}, gamma = {gamma}");
    }
}

#[test]
fn pipeline_rejects_small_q() {
    let b = BipartiteGraph::new(1, 0, Vec::new()).unwrap();
    assert!(run_pipeline(&b, &int(2), &int(1), &rat(1, 2), &PipelineConfig::default()).is_err());
}
