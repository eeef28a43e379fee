//! Acceptance suite: one line per criterion, then a non-zero exit if a gating one fails.
//!
//! Run with `cargo test -p pottsforge-core --test acceptance`. Criterion 10 is a report
//! and never fails the run; its CSV goes to the cargo target temp directory.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use pottsforge::exact_eval::{
    census_weights, exact_y_distribution, fk_check, gadget_census, potts, tutte_hypergraph, ExactOracle,
};
use pottsforge::gadget::{
    dp_weights, phase_constants, psi_monotonicity, tune_rho_with, z_k, GadgetSpec, RhoGrid, TunerConfig,
    ZetaCurve,
};
use pottsforge::model::number::{exp_bounds, int, rat, to_f64};
use pottsforge::random_cluster::{
    factorisation_check, rc_distribution, run_coupled, Conditioning, CouplingKind, EdgeProbabilityMap,
    HeatBath, Model,
};
use pottsforge::reductions::{
    decomposition_check, expanded_value, implement_weight, ising3_reduce, parallel_compose,
    semiregular_to_hypertutte, series_compose, Composition,
};
use pottsforge::{BigRational, BipartiteGraph, Error, Seed, WeightedGraph, WeightedHypergraph};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

/// Multisets of size `0..=max` drawn from `0..k`, in non-decreasing order.
fn multisets(k: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().copied().unwrap_or(0);
            for x in start..k {
                let mut t: Vec<usize> = s.clone();
                t.push(x);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn subsets_of(n: usize) -> Vec<Vec<usize>> {
    (1u32..1 << n)
        .map(|mask| (0..n).filter(|&v| mask >> v & 1 == 1).collect())
        .collect()
}

fn random_rational<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> BigRational {
    rat(rng.random_range(1..=max_num), rng.random_range(1..=max_den))
}

fn criterion_1() -> Outcome {
    let mut checked = 0usize;
    for n in 1..=4 {
        let cands = subsets_of(n);
        for choice in multisets(cands.len(), 4) {
            for gamma in [int(1), int(2), int(3)] {
                let h = WeightedHypergraph::from_hyperedges(
                    n,
                    choice.iter().map(|&i| (cands[i].clone(), gamma.clone())),
                )
                .map_err(err)?;
                for q in [int(2), int(3), int(4)] {
                    check(fk_check(&h, &q).map_err(err)?, || {
                        format!("Z_Potts != Z_Tutte on {h:?} at q = {q}")
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} (hypergraph, gamma, q) cases equal"))
}

fn criterion_2() -> Outcome {
    let mut rng = Seed(2).rng();
    let pairs: Vec<(BigRational, BigRational)> = (0..20)
        .map(|_| (random_rational(&mut rng, 9, 9), random_rational(&mut rng, 9, 9)))
        .collect();
    let oracle = ExactOracle::new(26);
    let mut cells = 0usize;
    for t in 1..=3 {
        for n in 1..=5 {
            let census = gadget_census(n, t, &oracle).map_err(err)?;
            for (gc, gt) in &pairs {
                let brute = census_weights(&census, gc, gt);
                let table = dp_weights(t, n, gc, gt).map_err(err)?;
                for k in 0..=t {
                    for l in 0..=n {
                        let b = brute.get(&(k, l)).cloned().unwrap_or_else(BigRational::zero);
                        let d = table.get(t as i64, n as i64, k as i64, l as i64);
                        check(b == d, || format!("t={t} N={n} k={k} l={l}: dp {d} vs brute {b}"))?;
                        cells += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{cells} table cells match the brute-force census"))
}

fn criterion_3() -> Outcome {
    let mut cases = 0usize;
    for t in 1..=3 {
        // N = 1 puts probability 1 on clique-terminal edges, which has no finite weight
        for n in 2..=4 {
            for rho in [rat(1, 8), rat(1, 3)] {
                for q in [int(2), rat(5, 2), int(3)] {
                    let spec = GadgetSpec::new(n, t, rho.clone()).map_err(err)?;
                    let dist = exact_y_distribution(&spec, &q).map_err(err)?;
                    let table = dp_weights(t, n, &spec.gamma_clique().map_err(err)?, &spec.gamma_terminal().map_err(err)?)
                        .map_err(err)?;
                    let s = z_k(&table, t, n, &q).map_err(err)?;
                    for k in 1..=t {
                        let lhs = s.z_k(k) / &s.total;
                        check(lhs == dist[&k], || format!("t={t} N={n} rho={rho} q={q} k={k}"))?;
                    }
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("Z^k/Z = Pr(Y=k) exactly in {cases} configurations"))
}

fn random_graph<R: Rng>(rng: &mut R, n: usize, density: f64) -> WeightedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(density) {
                edges.push((u, v));
            }
        }
    }
    WeightedGraph::uniform(n, edges, &int(1)).expect("simple graph")
}

fn criterion_4() -> Outcome {
    let mut rng = Seed(4).rng();
    let mut jobs = Vec::new();
    for i in 0..20 {
        let g = random_graph(&mut rng, 10, 0.4);
        let p: Vec<BigRational> = (0..g.m()).map(|_| rat(rng.random_range(1..10), 10)).collect();
        let p_up: Vec<BigRational> = p
            .iter()
            .map(|x| x + (int(1) - x) * rat(rng.random_range(0..5), 5))
            .collect();
        let q = [int(1), rat(3, 2), int(2), int(4)][i % 4].clone();
        let pm = EdgeProbabilityMap::new(&g, p).map_err(err)?;
        let pu = EdgeProbabilityMap::new(&g, p_up).map_err(err)?;
        for kind in [
            CouplingKind::ErOverRc,
            CouplingKind::RcOverErq,
            CouplingKind::RcMonotoneP { p_upper: pu.clone() },
        ] {
            jobs.push((g.clone(), q.clone(), pm.clone(), kind, i as u64));
        }
    }
    let results: Vec<Result<(), String>> = jobs
        .par_iter()
        .map(|(g, q, p, kind, i)| {
            run_coupled(g, q, p, kind.clone(), &Conditioning::none(), 10_000, Seed(400 + i))
                .map(|_| ())
                .map_err(|e| format!("{} on graph {i}: {e}", kind.name()))
        })
        .collect();
    for r in results {
        r?;
    }
    Ok(format!("{} coupled runs of 10^4 steps, no containment violation", jobs.len()))
}

fn criterion_5() -> Outcome {
    let mut graphs = 0usize;
    for n in 1..=5 {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for mask in 0u32..1 << pairs.len() {
            if mask.count_ones() > 4 {
                continue;
            }
            let edges: Vec<(usize, usize)> =
                (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
            let g = WeightedGraph::uniform(n, edges, &int(1)).map_err(err)?;
            let probs: Vec<BigRational> = (0..g.m()).map(|e| rat(1 + (e as i64 % 3), 5)).collect();
            let p = EdgeProbabilityMap::new(&g, probs).map_err(err)?;
            for r in [rat(1, 2), rat(1, 3)] {
                for q in [int(2), int(3)] {
                    let report = factorisation_check(&g, &q, &p, &r).map_err(err)?;
                    check(report.holds(), || {
                        format!("{} mismatches on {:?} (r={r}, q={q})", report.mismatches, g.edges())
                    })?;
                }
            }
            graphs += 1;
        }
    }
    Ok(format!("conditional laws factor exactly on {graphs} graphs with at most 4 edges"))
}

fn criterion_6() -> Outcome {
    const SAMPLES: usize = 1_000_000;
    const THIN: usize = 12;
    let cases = [
        ("triangle", vec![(0, 1), (1, 2), (0, 2)], int(2)),
        ("path", vec![(0, 1), (1, 2), (2, 3)], int(3)),
        ("double edge", vec![(0, 1), (0, 1), (1, 2)], rat(5, 2)),
    ];
    let mut worst = 1.0f64;
    for (i, (name, edges, q)) in cases.iter().enumerate() {
        let n = edges.iter().map(|&(u, v)| u.max(v)).max().unwrap() + 1;
        let g = WeightedGraph::uniform(n, edges.clone(), &int(1)).map_err(err)?;
        let p = EdgeProbabilityMap::new(&g, vec![rat(1, 2), rat(1, 3), rat(3, 5)]).map_err(err)?;
        let exact = rc_distribution(&g, q, &p).map_err(err)?;
        let hb = HeatBath::new(&g, &Model::RandomCluster { q: q.clone() }, &p, &Conditioning::none())
            .map_err(err)?;
        let mut rng = Seed(600 + i as u64).rng();
        let mut state = hb.initial_state();
        for _ in 0..1000 {
            hb.step(&mut state, &mut rng);
        }
        let mut counts = [0u64; 8];
        for _ in 0..SAMPLES {
            for _ in 0..THIN {
                hb.step(&mut state, &mut rng);
            }
            let mask = (0..3).filter(|&e| state.contains(e)).fold(0, |m, e| m | 1 << e);
            counts[mask] += 1;
        }
        let stat: f64 = counts
            .iter()
            .zip(&exact)
            .map(|(&c, pr)| {
                let e = to_f64(pr) * SAMPLES as f64;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        let pval = ChiSquared::new(7.0).map_err(|e| e.to_string())?.sf(stat);
        check(pval > 1e-3, || format!("{name}: chi2 = {stat:.2}, p = {pval:.2e}"))?;
        worst = worst.min(pval);
    }
    Ok(format!("3 graphs x 10^6 thinned samples, smallest p-value {worst:.3}"))
}

fn all_bipartite(max_vertices: usize) -> Vec<BipartiteGraph> {
    let mut out = Vec::new();
    for left in 0..=max_vertices {
        for right in 0..=max_vertices - left {
            let pairs: Vec<(usize, usize)> =
                (0..left).flat_map(|u| (0..right).map(move |v| (u, v))).collect();
            for mask in 0u32..1 << pairs.len() {
                let edges = (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
                out.push(BipartiteGraph::new(left, right, edges).expect("simple"));
            }
        }
    }
    out
}

fn criterion_7() -> Outcome {
    // apex hypergraph identity
    let graphs = all_bipartite(6);
    let mus = [rat(1, 2), int(1), int(2)];
    let failures: Vec<String> = graphs
        .par_iter()
        .flat_map_iter(|b| {
            mus.iter().filter_map(move |mu| {
                let (h, scale) = semiregular_to_hypertutte(b, mu).ok()?;
                let z = tutte_hypergraph(&h, &(int(1) + mu)).ok()?.value;
                let zis = b.independence_polynomial(mu).ok()?;
                (scale * z != zis).then(|| format!("apex identity fails on {b:?}, mu = {mu}"))
            })
        })
        .collect();
    if let Some(f) = failures.first() {
        return Err(f.clone());
    }

    // gadget decomposition, t = 2
    let pair_hypergraphs: [&[&[usize]]; 4] = [&[&[0, 1]], &[&[0, 1], &[1, 2]], &[&[0, 1], &[0, 1]], &[&[0, 1], &[2, 3]]];
    let mut decompositions = 0;
    for edges in pair_hypergraphs {
        let h = WeightedHypergraph::from_hyperedges(4, edges.iter().map(|f| (f.to_vec(), int(1)))).map_err(err)?;
        for n in 2..=4 {
            for rho in [rat(1, 8), rat(1, 3)] {
                let spec = GadgetSpec::new(n, 2, rho).map_err(err)?;
                for q in [int(2), int(3)] {
                    let (lhs, rhs) = decomposition_check(&h, &spec, &q).map_err(err)?;
                    check(lhs == rhs, || format!("decomposition fails for {edges:?}, N = {n}"))?;
                    decompositions += 1;
                }
            }
        }
    }

    // series/parallel against exact two-terminal evaluation
    let q = int(3);
    check(expanded_value(&Composition::Parallel(vec![Composition::Edge; 2]), &q, &int(1)).map_err(err)?.0 == parallel_compose(&int(1), &int(1)), || "parallel".into())?;
    check(expanded_value(&Composition::path(2), &int(2), &int(2)).map_err(err)? == series_compose(&int(2), &int(2), &int(2)).map_err(err)?, || "series".into())?;
    let mut trees = 0;
    for target in [rat(1, 2), rat(1, 7), int(1), rat(9, 10)] {
        let imp = implement_weight(&target, &q, &int(2), &rat(1, 1000), None).map_err(err)?;
        let (v, s) = expanded_value(&imp.tree, &q, &int(2)).map_err(err)?;
        check(v == imp.realized_value && s == imp.accumulated_scale, || format!("tree for {target}"))?;
        trees += 1;
    }

    // ising triangles, every 3-uniform hypergraph on 5 vertices with at most 3 hyperedges
    let triples: Vec<Vec<usize>> = subsets_of(5).into_iter().filter(|s| s.len() == 3).collect();
    let mut ising = 0;
    for choice in multisets(triples.len(), 3) {
        for gamma in [int(3), int(8)] {
            let h = WeightedHypergraph::from_hyperedges(5, choice.iter().map(|&i| (triples[i].clone(), gamma.clone())))
                .map_err(err)?;
            let r = ising3_reduce(&h, &gamma, 64).map_err(err)?;
            let lhs = potts(&r.graph.to_hypergraph(), &int(2)).map_err(err)?.value;
            let rhs = &r.y_prime_power * potts(&h, &int(2)).map_err(err)?.value;
            check(r.exact && lhs == rhs, || format!("ising identity fails on {choice:?}, gamma = {gamma}"))?;
            ising += 1;
        }
    }
    Ok(format!(
        "apex {} cases, decomposition {decompositions}, series/parallel {trees} trees, ising {ising}",
        graphs.len() * mus.len()
    ))
}

fn criterion_8() -> Outcome {
    let cfg = TunerConfig::default();
    let q = int(3);
    let chi = rat(1, 4);
    let report = psi_monotonicity(16, 2, &q, &chi, &cfg).map_err(err)?;
    check(report.non_increasing(), || format!("psi increases at {:?}", &report.increases[..report.increases.len().min(5)]))?;

    let configs: [(BigRational, BigRational, usize); 10] = [
        (int(3), int(1), 16),
        (int(3), rat(1, 2), 16),
        (int(3), int(2), 16),
        (int(3), rat(1, 20), 16),
        (int(4), int(1), 16),
        (int(4), rat(1, 3), 8),
        (int(5), int(1), 12),
        (rat(5, 2), int(1), 16),
        (int(3), int(1), 24),
        (int(10), int(1), 16),
    ];
    let mut found = 0;
    let mut none = 0;
    for (q, gamma, n) in configs.iter() {
        let cfg = TunerConfig { n_limit: 96, ..TunerConfig::default() };
        let grid = RhoGrid::new(*n, 2, q, &chi, &cfg).map_err(err)?;
        let curve = ZetaCurve::new(*n, 2, q, cfg.precision_bits).map_err(err)?;
        let lo = curve.zeta(&grid.rho(0)).map_err(err)?;
        let hi = curve.zeta(&grid.rho(grid.len() - 1)).map_err(err)?;
        let half = &chi / int(2);
        let band_lo = exp_bounds(&-&half, 128).hi * gamma;
        let band_hi = exp_bounds(&half, 128).lo * gamma;
        let brackets = lo <= band_hi && hi >= band_lo;
        match tune_rho_with(*n, 2, q, gamma, &chi, &cfg) {
            Ok(t) => {
                check(brackets, || format!("q={q} gamma={gamma} N={n}: tuned without a bracket"))?;
                check(t.zeta >= band_lo && t.zeta <= band_hi, || format!("q={q} gamma={gamma} N={n}: zeta outside band"))?;
                let direct = curve.zeta(&t.rho).map_err(err)?;
                check(direct == t.zeta, || "reported zeta differs from direct evaluation".into())?;
                found += 1;
            }
            Err(Error::NoCrossing { .. }) => {
                check(!brackets, || format!("q={q} gamma={gamma} N={n}: NoCrossing despite bracket"))?;
                none += 1;
            }
            Err(e) => return Err(format!("q={q} gamma={gamma} N={n}: {e}")),
        }
    }
    Ok(format!(
        "psi non-increasing over {} grid points; {found} tuned, {none} NoCrossing",
        report.points
    ))
}

fn criterion_9() -> Outcome {
    let mut rng = Seed(9).rng();
    let tol = rat(1, 1_000_000);
    let (q, g) = (int(3), int(2));
    let targets: Vec<BigRational> = (0..50)
        .map(|_| BigRational::new(rng.random_range(1..=1_000_000u32).into(), 1_000_000u32.into()))
        .collect();
    let results: Vec<Result<usize, String>> = targets
        .par_iter()
        .map(|target| {
            let imp = implement_weight(target, &q, &g, &tol, None).map_err(err)?;
            check(imp.realized_value <= *target && imp.realized_value >= target - &tol, || {
                format!("{target}: realized {} outside tolerance", imp.realized_value)
            })?;
            let (v, _) = expanded_value(&imp.tree, &q, &g).map_err(err)?;
            check(v == imp.realized_value, || format!("{target}: expanded value differs"))?;
            Ok(imp.edge_count)
        })
        .collect();
    let mut max_edges = 0;
    for r in results {
        max_edges = max_edges.max(r?);
    }
    Ok(format!("50 targets within 1e-6 from below, exact expansion agrees (max {max_edges} edges)"))
}

/// Not gating: heat-bath on `K_N` at `q = 10`, from the empty and the full edge set.
fn criterion_10() -> Outcome {
    let q = int(10);
    let n = 500usize;
    let phase = phase_constants(&q, 64).map_err(err)?;
    let lambda_c = phase.lambda_c.to_f64();
    let theta = to_f64(&phase.theta);
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let g = WeightedGraph::uniform(n, edges, &int(1)).map_err(err)?;
    let lambdas: Vec<BigRational> = [6, 7, 8, 9, 10, 11, 12, 14, 16, 18].iter().map(|&x| rat(x, 2)).collect();
    let sweeps = 12;
    let m = g.m();
    let runs: Vec<(f64, &str, f64)> = lambdas
        .par_iter()
        .flat_map_iter(|lambda| {
            let p = EdgeProbabilityMap::uniform(&g, &(lambda / int(n as i64))).expect("p in [0,1]");
            let hb = HeatBath::new(&g, &Model::RandomCluster { q: q.clone() }, &p, &Conditioning::none())
                .expect("valid chain");
            let lf = to_f64(lambda);
            ["empty", "full"].into_iter().map(move |start| {
                let mut rng = Seed(1000 + (lf * 10.0) as u64).stream(u64::from(start == "full"));
                let mut state = if start == "full" {
                    hb.state_from(0..m)
                } else {
                    hb.initial_state()
                };
                let mut acc = 0.0;
                for s in 0..sweeps {
                    hb.sweep(&mut state, &mut rng);
                    if s >= sweeps / 2 {
                        acc += state.largest_component() as f64 / n as f64;
                    }
                }
                (lf, start, acc / (sweeps - sweeps / 2) as f64)
            })
        })
        .collect();
    let mut csv = String::from("lambda,start,largest_fraction\n");
    for (l, s, f) in &runs {
        writeln!(csv, "{l},{s},{f:.4}").expect("write to string");
    }
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("phase_demo.csv");
    std::fs::write(&path, csv).map_err(|e| e.to_string())?;
    let below: f64 = runs
        .iter()
        .filter(|(l, s, _)| *l < lambda_c && *s == "empty")
        .map(|r| r.2)
        .fold(0.0, f64::max);
    let above: f64 = runs
        .iter()
        .filter(|(l, s, _)| *l > to_f64(&q) * 0.9 && *s == "full")
        .map(|r| r.2)
        .fold(1.0, f64::min);
    let jump = below < theta && above > theta;
    let msg = format!(
        "lambda_c = {lambda_c:.3}; largest fraction {below:.3} below lambda_c, {above:.3} near lambda = q; \
         crosses theta = {theta:.3}: {jump}; csv at {}",
        path.display()
    );
    if jump {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// (number, title, check, gating)
type Criterion = (usize, &'static str, fn() -> Outcome, bool);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "FK identity", criterion_1, true),
        (2, "weight recurrence vs census", criterion_2, true),
        (3, "wiring identity", criterion_3, true),
        (4, "coupling containment", criterion_4, true),
        (5, "red/green factorisation", criterion_5, true),
        (6, "heat-bath stationarity", criterion_6, true),
        (7, "reduction identities", criterion_7, true),
        (8, "tuner behaviour", criterion_8, true),
        (9, "weight implementation", criterion_9, true),
        (10, "phase-transition report", criterion_10, false),
    ];
    let only: Option<usize> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .find_map(|a| a.parse().ok());
    let mut failed = Vec::new();
    let mut summary = BTreeMap::new();
    for (id, name, run, gating) in criteria {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match (&out, gating) {
            (Ok(d), _) => ("PASS", d.clone()),
            (Err(d), true) => ("FAIL", d.clone()),
            (Err(d), false) => ("NOTE", d.clone()),
        };
        println!("criterion {id:>2} [{tag}] {name} ({secs:.1}s): {detail}");
        if tag == "FAIL" {
            failed.push(id);
        }
        summary.insert(id, tag);
    }
    let passed = summary.values().filter(|t| **t == "PASS").count();
    println!("acceptance: {passed}/{} passed, failed {:?}", summary.len(), failed);
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
