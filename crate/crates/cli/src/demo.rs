use std::fmt::Write as _;

use pottsforge::gadget::phase_constants;
use pottsforge::model::number::{floor_dyadic, int, to_decimal, to_f64};
use pottsforge::random_cluster::{Conditioning, EdgeProbabilityMap, HeatBath, Model};
use pottsforge::{BigRational, Seed, WeightedGraph};
use rayon::prelude::*;
use serde_json::json;

use crate::report::{Failure, Report};
use crate::{CmdResult, DemoCommand, PhaseArgs};

pub fn run(cmd: &DemoCommand) -> CmdResult {
    match cmd {
        DemoCommand::Phase(a) => phase(a),
    }
}

/// Heat-bath chains on `K_N` at `p = λ/N`, one from the empty and one from the full edge
/// set per `λ`. Reports the largest-component fraction averaged over the second half of
/// the run and at the end.
fn phase(a: &PhaseArgs) -> CmdResult {
    if a.n < 2 || a.sweeps == 0 || a.points < 2 {
        return Err(Failure::usage("need --N ≥ 2, --sweeps ≥ 1 and --points ≥ 2"));
    }
    let q = &a.q;
    let phase = phase_constants(q, 64)?;
    let lambda_c = phase.lambda_c.mid();
    let lo = a
        .lambda_min
        .clone()
        .unwrap_or_else(|| floor_dyadic(&(&lambda_c / int(2)), 4));
    let hi = a.lambda_max.clone().unwrap_or_else(|| q + int(2));
    let n_rat = int(a.n as i64);
    if lo <= int(0) || hi <= lo || hi > n_rat {
        return Err(Failure::usage(format!("need 0 < lambda_min < lambda_max ≤ N, got {lo} and {hi}")));
    }
    let steps = int(a.points as i64 - 1);
    let lambdas: Vec<BigRational> = (0..a.points)
        .map(|i| &lo + (&hi - &lo) * int(i as i64) / &steps)
        .collect();

    let edges: Vec<(usize, usize)> = (0..a.n).flat_map(|u| (u + 1..a.n).map(move |v| (u, v))).collect();
    let g = WeightedGraph::uniform(a.n, edges, &int(1))?;
    let m = g.m();
    let model = Model::RandomCluster { q: q.clone() };
    let jobs: Vec<(usize, &BigRational, bool)> = lambdas
        .iter()
        .enumerate()
        .flat_map(|(i, l)| [(i, l, false), (i, l, true)])
        .collect();
    let burn = a.sweeps / 2;
    let rows: Vec<pottsforge::Result<(f64, f64)>> = jobs
        .par_iter()
        .map(|&(i, lambda, full)| {
            let p = EdgeProbabilityMap::uniform(&g, &(lambda / &n_rat))?;
            let hb = HeatBath::new(&g, &model, &p, &Conditioning::none())?;
            let mut rng = Seed(a.seed).stream(2 * i as u64 + u64::from(full));
            let mut state = if full { hb.state_from(0..m) } else { hb.initial_state() };
            let mut acc = 0.0;
            for s in 0..a.sweeps {
                hb.sweep(&mut state, &mut rng);
                if s >= burn {
                    acc += state.largest_component() as f64;
                }
            }
            let nf = a.n as f64;
            Ok((acc / (a.sweeps - burn) as f64 / nf, state.largest_component() as f64 / nf))
        })
        .collect();

    let mut csv = String::from("lambda,lambda_decimal,start,mean_largest_fraction,final_largest_fraction\n");
    let mut out_rows = Vec::new();
    for ((_, lambda, full), row) in jobs.iter().zip(rows) {
        let (mean, last) = row?;
        let start = if *full { "full" } else { "empty" };
        let dec = to_decimal(lambda, 4);
        writeln!(csv, "{lambda},{dec},{start},{mean:.6},{last:.6}").expect("write to string");
        out_rows.push(json!({
            "lambda": lambda.to_string(),
            "start": start,
            "mean_largest_fraction": format!("{mean:.6}"),
            "final_largest_fraction": format!("{last:.6}"),
        }));
    }
    let mut r = Report::new("demo phase");
    r.seed = Some(a.seed);
    r.input("q", q.to_string())
        .input("N", a.n)
        .input("sweeps", a.sweeps)
        .input("lambda_min", lo.to_string())
        .input("lambda_max", hi.to_string())
        .input("points", a.points);
    r.output("lambda_c", to_decimal(&lambda_c, 6))
        .output("theta", phase.theta.to_string())
        .output("rows", out_rows);
    if to_f64(q) <= 2.0 {
        r.warnings.push("no first-order transition for q ≤ 2".into());
    }
    if a.sweeps < 4 {
        r.warnings.push(format!("only {} sweeps; averages are noisy", a.sweeps));
    }
    r.text = csv;
    Ok(r)
}
