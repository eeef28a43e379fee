use std::fmt::Write as _;
use std::path::Path;

use pottsforge::exact_eval::{frontier, ExactOracle};
use pottsforge::gadget::{build_gadget, dp_weights, tune_rho_with, GadgetSpec, TunerConfig};
use pottsforge::model::number::{display_decimal, to_decimal};
use pottsforge::model::text::{self, Instance};
use pottsforge::random_cluster::{Conditioning, EdgeProbabilityMap, HeatBath, Model};
use pottsforge::reductions::{run_pipeline, PipelineConfig};
use pottsforge::{BigRational, Error, Seed, WeightedGraph};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::report::{exact, innermost, Failure, Report};
use crate::{
    Cli, CmdResult, Command, DumpDpArgs, EvalArgs, EvalModel, GadgetCommand, GadgetGraphArgs, ReduceArgs,
    SampleArgs, SampleModel, TuneArgs,
};

pub fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Eval(a) => eval(a),
        Command::Sample(a) => sample(a),
        Command::Tune(a) => tune(a),
        Command::Gadget { action } => match action {
            GadgetCommand::DumpDp(a) => dump_dp(a, cli.json),
            GadgetCommand::Graph(a) => gadget_graph(a),
        },
        Command::Reduce(a) => reduce(a),
        Command::Verify { target } => crate::verify::run(target),
        Command::Demo { action } => crate::demo::run(action),
    }
}

/// Reads and parses an instance, insisting that it survives a write/read round trip.
pub fn read_instance(path: &Path) -> Result<Instance, Failure> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let inst = text::parse(&raw).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let again = text::parse(&inst.to_text())?;
    if again != inst {
        return Err(Failure::usage(format!("{}: instance does not round-trip", path.display())));
    }
    Ok(inst)
}

fn read_graph(path: &Path) -> Result<WeightedGraph, Failure> {
    match read_instance(path)? {
        Instance::Graph(g) => Ok(g),
        other => Err(Failure::usage(format!(
            "{}: expected a graph, found a {}",
            path.display(),
            other.kind()
        ))),
    }
}

fn describe(r: &mut Report, inst: &Instance) {
    let (n, m) = match inst {
        Instance::Graph(g) => (g.n(), g.m()),
        Instance::Hypergraph(h) => (h.n(), h.m()),
        Instance::Bipartite(b) => (b.n(), b.edges().len()),
    };
    r.input("kind", inst.kind()).input("n", n).input("m", m);
}

fn eval(a: &EvalArgs) -> CmdResult {
    let inst = read_instance(&a.file)?;
    let mut r = Report::new("eval");
    r.input("file", a.file.display().to_string());
    describe(&mut r, &inst);
    let oracle = ExactOracle::default();
    let value = match (&inst, a.model) {
        (Instance::Graph(g), EvalModel::Tutte) if !a.brute => frontier::tutte(g, &a.q)?,
        (Instance::Graph(g), EvalModel::Tutte) => oracle.tutte_graph(g, &a.q)?.value,
        (Instance::Graph(g), EvalModel::Potts) => oracle.potts(&g.to_hypergraph(), &a.q)?.value,
        (Instance::Hypergraph(h), EvalModel::Tutte) => oracle.tutte_hypergraph(h, &a.q)?.value,
        (Instance::Hypergraph(h), EvalModel::Potts) => oracle.potts(h, &a.q)?.value,
        (Instance::Bipartite(b), _) => {
            let (size, count) = b.maximum_independent_sets()?;
            r.output("max_independent_set_size", size)
                .output("max_independent_set_count", count)
                .line(format!("maximum independent sets: {count} of size {size}"));
            if let Some(mu) = &a.mu {
                let z = b.independence_polynomial(mu)?;
                r.input("mu", mu.to_string())
                    .output("independence_polynomial", exact(&z, a.digits))
                    .line(format!("Z_IS(mu = {mu}) = {z}"))
                    .line(format!("decimal: {}", to_decimal(&z, a.digits)));
            }
            return Ok(r);
        }
    };
    r.input("q", a.q.to_string())
        .input("model", format!("{:?}", a.model).to_lowercase());
    r.outputs = exact(&value, a.digits).as_object().cloned().unwrap_or_default();
    r.line(value.to_string())
        .line(format!("decimal: {}", to_decimal(&value, a.digits)));
    Ok(r)
}

fn sample(a: &SampleArgs) -> CmdResult {
    let g = read_graph(&a.file)?;
    let model = match (a.model, &a.q) {
        (SampleModel::Rc, Some(q)) => Model::RandomCluster { q: q.clone() },
        (SampleModel::Rc, None) => return Err(Failure::usage("--model rc needs --q")),
        (SampleModel::Er, _) => Model::ErdosRenyi,
    };
    let p = match &a.p {
        Some(p) => EdgeProbabilityMap::uniform(&g, p)?,
        None => EdgeProbabilityMap::from_weights(&g),
    };
    let cond = Conditioning::new(a.force_in.iter().copied(), a.force_out.iter().copied())?;
    let hb = HeatBath::new(&g, &model, &p, &cond)?;
    if a.sweeps == 0 || a.chains == 0 {
        return Err(Failure::usage("--sweeps and --chains must be positive"));
    }
    let runs: Vec<_> = (0..a.chains)
        .into_par_iter()
        .map(|c| {
            let mut rng = Seed(a.seed).stream(c);
            let mut state = hb.initial_state();
            let mut largest = Vec::with_capacity(if a.trace.is_some() { a.sweeps as usize } else { 0 });
            for _ in 0..a.sweeps {
                hb.sweep(&mut state, &mut rng);
                if a.trace.is_some() {
                    largest.push(state.largest_component());
                }
            }
            (state.summary(), largest)
        })
        .collect();

    let mut r = Report::new("sample");
    r.seed = Some(a.seed);
    r.input("file", a.file.display().to_string())
        .input("model", format!("{:?}", a.model).to_lowercase())
        .input("q", a.q.as_ref().map(|q| q.to_string()))
        .input("p", a.p.as_ref().map(|p| p.to_string()))
        .input("sweeps", a.sweeps)
        .input("chains", a.chains)
        .input("force_in", a.force_in.clone())
        .input("force_out", a.force_out.clone());
    let summaries: Vec<Value> = runs
        .iter()
        .map(|(s, _)| {
            let mut v = serde_json::to_value(s).expect("summary serializes");
            v["largest_component"] = s.component_sizes.iter().copied().max().unwrap_or(0).into();
            v
        })
        .collect();
    r.output("chains", summaries);

    if a.trace.is_some() {
        // trace goes to stdout, so the summary moves to stderr
        let mut csv = String::from("chain,sweep,largest_component\n");
        for (c, (_, largest)) in runs.iter().enumerate() {
            for (s, l) in largest.iter().enumerate() {
                writeln!(csv, "{c},{},{l}", s + 1).expect("write to string");
            }
        }
        eprintln!("{}", crate::report::pretty(&r.to_json()));
        r.text = csv;
        r.text_only = true;
        return Ok(r);
    }
    for (c, (s, _)) in runs.iter().enumerate() {
        r.line(format!(
            "chain {c}: {} edges, {} components, largest {}",
            s.edge_count,
            s.components,
            s.component_sizes.iter().max().unwrap_or(&0)
        ));
        r.line(format!("  subset: {:?}", s.edges));
    }
    Ok(r)
}

fn tune(a: &TuneArgs) -> CmdResult {
    let cfg = TunerConfig {
        precision_bits: a.bits,
        n_limit: a.n_limit,
        ..TunerConfig::default()
    };
    let mut r = Report::new("tune");
    r.input("N", a.n)
        .input("t", a.t)
        .input("q", a.q.to_string())
        .input("gamma", a.gamma.to_string())
        .input("chi", a.chi.to_string());
    let res = match tune_rho_with(a.n, a.t, &a.q, &a.gamma, &a.chi, &cfg) {
        Ok(res) => res,
        Err(e) => {
            let mut f = Failure::from(e.clone());
            if let Error::NoCrossing {
                zeta_low,
                zeta_high,
                grid_len,
            } = innermost(&e)
            {
                f.text = format!(
                    "no crossing over {grid_len} grid points\nzeta at smallest rho: {}\nzeta at largest rho: {}\n",
                    to_decimal(zeta_low, a.digits),
                    to_decimal(zeta_high, a.digits),
                );
            }
            return Err(f);
        }
    };
    r.output("rho", exact(&res.rho, a.digits))
        .output("zeta", exact(&res.zeta, a.digits))
        .output("grid_index", res.mu)
        .output("grid_len", res.grid_len)
        .output("accept_low", exact(&res.accept_low, a.digits))
        .output("accept_high", exact(&res.accept_high, a.digits))
        .output("p_terminal_exact", res.p_terminal_exact)
        .output("asymptotic_regime", res.asymptotic_regime);
    if !res.p_terminal_exact {
        r.warnings
            .push("N is not a perfect fourth power; the terminal probability is rounded".into());
    }
    r.line(format!("rho = {} ({})", res.rho, to_decimal(&res.rho, a.digits)))
        .line(format!("zeta = {} (exact value under --json)", to_decimal(&res.zeta, a.digits)))
        .line(format!("grid point {} of {}", res.mu, res.grid_len))
        .line(format!(
            "accepted band [{}, {}]",
            to_decimal(&res.accept_low, a.digits),
            to_decimal(&res.accept_high, a.digits)
        ));
    Ok(r)
}

fn dump_dp(a: &DumpDpArgs, json: bool) -> CmdResult {
    let (gc, gt) = match (&a.rho, &a.gamma_clique, &a.gamma_terminal) {
        (Some(rho), _, _) => {
            let spec = GadgetSpec::new(a.n, a.t, rho.clone())?;
            (spec.gamma_clique()?, spec.gamma_terminal()?)
        }
        (None, Some(c), Some(t)) => (c.clone(), t.clone()),
        _ => return Err(Failure::usage("give --rho, or both --gamma-clique and --gamma-terminal")),
    };
    let table = dp_weights(a.t, a.n, &gc, &gt)?;
    let mut r = Report::new("gadget dump-dp");
    r.input("N", a.n)
        .input("t", a.t)
        .input("gamma_clique", gc.to_string())
        .input("gamma_terminal", gt.to_string());
    let mut csv = String::from("t,N,k,l,weight_num,weight_den,weight_decimal\n");
    let mut rows = Vec::new();
    for (&(tt, nn, k, l), w) in table.entries() {
        let dec = to_decimal(w, 10);
        writeln!(csv, "{tt},{nn},{k},{l},{},{},{dec}", w.numer(), w.denom()).expect("write to string");
        if json {
            rows.push(json!({"t": tt, "N": nn, "k": k, "l": l, "weight": exact(w, 10)}));
        }
    }
    r.output("entries", rows);
    r.text = csv;
    Ok(r)
}

fn gadget_graph(a: &GadgetGraphArgs) -> CmdResult {
    let (spec, g) = build_gadget(a.n, a.t, a.rho.clone())?;
    let mut r = Report::new("gadget graph");
    r.input("N", a.n).input("t", a.t).input("rho", a.rho.to_string());
    let terminals: Vec<usize> = spec.terminal_vertices().collect();
    r.output("terminals", terminals.clone())
        .output("instance", text::graph_to_text(&g));
    r.line(format!("# terminals {terminals:?}"));
    r.text.push_str(&text::graph_to_text(&g));
    Ok(r)
}

fn reduce(a: &ReduceArgs) -> CmdResult {
    let b = match read_instance(&a.file)? {
        Instance::Bipartite(b) => b,
        other => {
            return Err(Failure::usage(format!(
                "reduce --from bis needs a bipartite instance, found a {}",
                other.kind()
            )))
        }
    };
    let cfg = PipelineConfig {
        clique_override: a.force_n,
        tuner: TunerConfig {
            n_limit: a.n_limit,
            ..TunerConfig::default()
        },
        enforce_budget: a.enforce_budget,
    };
    let res = run_pipeline(&b, &a.q, &a.gamma, &a.eps, &cfg)?;
    std::fs::create_dir_all(&a.out)
        .map_err(|e| Failure::usage(format!("cannot create {}: {e}", a.out.display())))?;
    let mut r = Report::new("reduce");
    r.input("file", a.file.display().to_string())
        .input("from", "bis")
        .input("to", "tutte")
        .input("q", a.q.to_string())
        .input("gamma", a.gamma.to_string())
        .input("eps", a.eps.to_string())
        .input("force_N", a.force_n);
    let mut records = Vec::new();
    let mut files = Vec::new();
    for (i, t) in res.traces.iter().enumerate() {
        let name = format!("{:02}-{}.txt", i + 1, t.stage);
        std::fs::write(a.out.join(&name), t.instance.to_text())?;
        let rec = t.record();
        r.line(format!(
            "{name}: {} scale {} eps {}",
            rec.kind,
            display_decimal(&t.scale_factor, 10),
            rec.eps_used
        ));
        for w in &t.warnings {
            r.warnings.push(format!("{}: {w}", t.stage));
        }
        records.push(serde_json::to_value(rec).expect("trace record serializes"));
        files.push(name);
    }
    let trace = Value::Array(records);
    std::fs::write(a.out.join("trace.json"), crate::report::pretty(&trace) + "\n")?;
    let total = res.total_scale();
    r.output("stages", trace)
        .output("files", files)
        .output("out_dir", a.out.display().to_string())
        .output("total_scale", exact(&total, 10))
        .output("final_vertices", res.final_graph.n())
        .output("final_edges", res.final_graph.m());
    r.line(format!(
        "final instance: {} vertices, {} edges, total scale {}",
        res.final_graph.n(),
        res.final_graph.m(),
        display_decimal(&total, 10)
    ));
    if a.evaluate {
        let z: BigRational = frontier::tutte(&res.final_graph, &a.q)?;
        let recovered = res.recover(&z);
        r.output("final_value", exact(&z, 10))
            .output("recovered", recovered.to_string());
        r.line(format!("recovered maximum independent set count: {recovered}"));
        if let Ok((_, count)) = b.maximum_independent_sets() {
            r.output("direct", count);
            r.line(format!("direct count: {count}"));
        }
    }
    Ok(r)
}
