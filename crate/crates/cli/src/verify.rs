use pottsforge::exact_eval::{frontier, ExactOracle};
use pottsforge::model::number::{int, rat};
use pottsforge::model::text::Instance;
use pottsforge::reductions::{
    ising3_reduce, maxis_blowup, pad_sandwich_holds, semiregular_pad, semiregular_to_hypertutte,
};
use pottsforge::{BigRational, Result, WeightedHypergraph};
use rayon::prelude::*;
use serde_json::json;

use crate::commands::read_instance;
use crate::report::{Failure, Report};
use crate::{CmdResult, VerifyCommand, VerifyFkArgs, VerifyInstanceArgs};

pub fn run(cmd: &VerifyCommand) -> CmdResult {
    match cmd {
        VerifyCommand::Fk(a) => fk(a),
        VerifyCommand::Instance(a) => instance(a),
    }
}

/// Non-decreasing sequences of length `0..=max` over `0..k`.
fn multisets(k: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &layer {
            for x in s.last().copied().unwrap_or(0)..k {
                let mut t = s.clone();
                t.push(x);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn fk(a: &VerifyFkArgs) -> CmdResult {
    if a.max_n == 0 || a.max_n > 8 {
        return Err(Failure::usage("--max-n must lie in 1..=8"));
    }
    if a.q.contains(&0) {
        return Err(Failure::usage("--q values must be positive integers"));
    }
    let oracle = ExactOracle::default();
    let mut cases = Vec::new();
    for n in 1..=a.max_n {
        let subsets: Vec<Vec<usize>> = (1u32..1 << n)
            .map(|mask| (0..n).filter(|&v| mask >> v & 1 == 1).collect())
            .collect();
        for choice in multisets(subsets.len(), a.max_edges) {
            let edges: Vec<Vec<usize>> = choice.iter().map(|&i| subsets[i].clone()).collect();
            for gamma in &a.gamma {
                for &q in &a.q {
                    cases.push((n, edges.clone(), gamma.clone(), q));
                }
            }
        }
    }
    let outcomes: Vec<Result<Option<String>>> = cases
        .par_iter()
        .map(|(n, edges, gamma, q)| {
            let h = WeightedHypergraph::from_hyperedges(*n, edges.iter().map(|f| (f.clone(), gamma.clone())))?;
            let ok = oracle.fk_check(&h, &int(*q as i64))?;
            Ok((!ok).then(|| format!("n = {n}, hyperedges {edges:?}, gamma = {gamma}, q = {q}")))
        })
        .collect();
    let mut failures = Vec::new();
    for o in outcomes {
        if let Some(f) = o? {
            failures.push(f);
        }
    }
    let mut r = Report::new("verify fk");
    r.input("max_n", a.max_n)
        .input("max_edges", a.max_edges)
        .input("q", a.q.clone())
        .input("gamma", a.gamma.iter().map(|g| g.to_string()).collect::<Vec<_>>());
    r.output("cases", cases.len()).output("failures", failures.clone());
    r.line(format!(
        "FK identity: {} of {} cases agree",
        cases.len() - failures.len(),
        cases.len()
    ));
    for f in &failures {
        r.line(format!("FAIL {f}"));
    }
    if !failures.is_empty() {
        r.status = 3;
    }
    Ok(r)
}

fn instance(a: &VerifyInstanceArgs) -> CmdResult {
    let inst = read_instance(&a.file)?;
    let q = &a.q;
    let oracle = ExactOracle::default();
    let mut checks: Vec<(&str, bool)> = Vec::new();
    match &inst {
        Instance::Graph(g) => {
            let frontier_value = frontier::tutte(g, q)?;
            checks.push((
                "enumeration and frontier agree",
                oracle.tutte_graph(g, q)?.value == frontier_value,
            ));
            if q.is_integer() && *q >= int(1) {
                checks.push(("FK identity", oracle.fk_check(&g.to_hypergraph(), q)?));
            }
        }
        Instance::Hypergraph(h) => {
            if q.is_integer() && *q >= int(1) {
                checks.push(("FK identity", oracle.fk_check(h, q)?));
            }
            if let (Some(3), Some(gamma)) = (h.uniform_arity(), h.uniform_weight()) {
                let r = ising3_reduce(h, gamma, 128)?;
                if r.exact {
                    let lhs = oracle.potts(&r.graph.to_hypergraph(), &int(2))?.value;
                    let rhs = &r.y_prime_power * oracle.potts(h, &int(2))?.value;
                    checks.push(("3-uniform Ising triangles", lhs == rhs));
                }
            }
        }
        Instance::Bipartite(b) => {
            if *q <= int(2) {
                return Err(Failure::usage("bipartite checks need q > 2"));
            }
            let mu: BigRational = q - int(1);
            let (h, scale) = semiregular_to_hypertutte(b, &mu)?;
            let z_is = b.independence_polynomial(&mu)?;
            checks.push((
                "apex hypergraph identity",
                scale * oracle.tutte_hypergraph(&h, q)?.value == z_is,
            ));
            let up = maxis_blowup(b, &mu)?;
            let (_, count) = b.maximum_independent_sets()?;
            let z_up = up.graph.independence_polynomial(&mu)?;
            checks.push(("blow-up recovers the count", up.postprocess(&z_up) == count.into()));
            let pad = semiregular_pad(b, &mu, &rat(1, 2))?;
            checks.push(("padding sandwich", pad_sandwich_holds(b, &pad, &mu)?));
        }
    }
    let mut r = Report::new("verify instance");
    r.input("file", a.file.display().to_string())
        .input("kind", inst.kind())
        .input("q", q.to_string());
    let rows: Vec<_> = checks
        .iter()
        .map(|(name, ok)| json!({"check": name, "holds": ok}))
        .collect();
    r.output("checks", rows);
    for (name, ok) in &checks {
        r.line(format!("{} {name}", if *ok { "PASS" } else { "FAIL" }));
    }
    if checks.iter().any(|(_, ok)| !ok) {
        r.status = 3;
    }
    Ok(r)
}
