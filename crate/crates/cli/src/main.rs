//! `pottsforge` command-line tool.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 when an exact oracle hits its
//! cap or the tuner finds no crossing, 3 when `verify` finds an identity that fails.

mod commands;
mod demo;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pottsforge::model::number::parse_rational;
use pottsforge::BigRational;

use report::{Failure, Report};

#[derive(Parser, Debug)]
#[command(name = "pottsforge", version, about = "Exact and sampled Potts/Tutte partition functions")]
pub struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for independent chains, grid points and subset ranges (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Report wall-clock time on stderr.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact partition function of an instance file.
    Eval(EvalArgs),
    /// Heat-bath sampling from the random-cluster or Erdős–Rényi measure.
    Sample(SampleArgs),
    /// Choose the clique probability that balances the hyperedge gadget.
    Tune(TuneArgs),
    /// Gadget utilities.
    Gadget {
        #[command(subcommand)]
        action: GadgetCommand,
    },
    /// Reduce a bipartite instance down to a uniform-weight Tutte instance.
    Reduce(ReduceArgs),
    /// Replay the exact identities.
    Verify {
        #[command(subcommand)]
        target: VerifyCommand,
    },
    /// Simulations meant for plotting.
    Demo {
        #[command(subcommand)]
        action: DemoCommand,
    },
}

pub fn rational(s: &str) -> Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EvalModel {
    Tutte,
    Potts,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Instance file in the text format (`graph`, `hypergraph` or `bipartite`).
    pub file: PathBuf,
    #[arg(long, value_parser = rational, default_value = "2")]
    pub q: BigRational,
    #[arg(long, value_enum, default_value_t = EvalModel::Tutte)]
    pub model: EvalModel,
    /// Use subset enumeration (subject to POTTSFORGE_CAP) even for graphs.
    #[arg(long)]
    pub brute: bool,
    /// For bipartite input: also evaluate the independence polynomial at this fugacity.
    #[arg(long, value_parser = rational)]
    pub mu: Option<BigRational>,
    /// Fractional digits in decimal renderings.
    #[arg(long, default_value_t = 10)]
    pub digits: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SampleModel {
    Rc,
    Er,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TraceFormat {
    Csv,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    /// Graph file; edge weights give `p(e) = γ/(1+γ)` unless `--p` is set.
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = SampleModel::Rc)]
    pub model: SampleModel,
    #[arg(long, value_parser = rational)]
    pub q: Option<BigRational>,
    /// Uniform edge probability overriding the file's weights.
    #[arg(long, value_parser = rational)]
    pub p: Option<BigRational>,
    #[arg(long, default_value_t = 100)]
    pub sweeps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent chains, each on its own stream of the seed.
    #[arg(long, default_value_t = 1)]
    pub chains: u64,
    #[arg(long = "force-in", value_delimiter = ',')]
    pub force_in: Vec<usize>,
    #[arg(long = "force-out", value_delimiter = ',')]
    pub force_out: Vec<usize>,
    /// Stream `chain,sweep,largest_component` rows to stdout; the summary goes to stderr.
    #[arg(long, value_enum)]
    pub trace: Option<TraceFormat>,
}

#[derive(Args, Debug)]
pub struct TuneArgs {
    /// Clique size.
    #[arg(long = "N")]
    pub n: usize,
    /// Number of terminals.
    #[arg(long)]
    pub t: usize,
    #[arg(long, value_parser = rational)]
    pub q: BigRational,
    #[arg(long, value_parser = rational)]
    pub gamma: BigRational,
    #[arg(long, value_parser = rational)]
    pub chi: BigRational,
    /// Largest clique the exact recurrence is run for.
    #[arg(long, default_value_t = 32)]
    pub n_limit: usize,
    #[arg(long, default_value_t = 128)]
    pub bits: u32,
    #[arg(long, default_value_t = 10)]
    pub digits: usize,
}

#[derive(Subcommand, Debug)]
pub enum GadgetCommand {
    /// Weight table `w(t', N', k, l)` as CSV.
    DumpDp(DumpDpArgs),
    /// The gadget graph itself, in the text format.
    Graph(GadgetGraphArgs),
}

#[derive(Args, Debug)]
pub struct DumpDpArgs {
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long)]
    pub t: usize,
    /// Clique edge probability; terminal weights follow from `N`.
    #[arg(long, value_parser = rational, conflicts_with_all = ["gamma_clique", "gamma_terminal"])]
    pub rho: Option<BigRational>,
    #[arg(long, value_parser = rational, requires = "gamma_terminal")]
    pub gamma_clique: Option<BigRational>,
    #[arg(long, value_parser = rational, requires = "gamma_clique")]
    pub gamma_terminal: Option<BigRational>,
}

#[derive(Args, Debug)]
pub struct GadgetGraphArgs {
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long)]
    pub t: usize,
    #[arg(long, value_parser = rational)]
    pub rho: BigRational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FromKind {
    Bis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ToKind {
    Tutte,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    /// Bipartite instance file.
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = FromKind::Bis)]
    pub from: FromKind,
    #[arg(long, value_enum, default_value_t = ToKind::Tutte)]
    pub to: ToKind,
    #[arg(long, value_parser = rational)]
    pub q: BigRational,
    #[arg(long, value_parser = rational)]
    pub gamma: BigRational,
    #[arg(long, value_parser = rational)]
    pub eps: BigRational,
    /// Use this clique size instead of the prescribed one.
    #[arg(long = "force-N")]
    pub force_n: Option<usize>,
    /// Directory for the per-stage instances and `trace.json`.
    #[arg(long, default_value = "reduce-out")]
    pub out: PathBuf,
    /// Largest clique the tuner runs its exact recurrence for.
    #[arg(long, default_value_t = 32)]
    pub n_limit: usize,
    /// Fail when a weight implementation needs too many parallel branches.
    #[arg(long)]
    pub enforce_budget: bool,
    /// Evaluate the final instance exactly and recover the count.
    #[arg(long)]
    pub evaluate: bool,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Potts form equals random-cluster form on every small hypergraph.
    Fk(VerifyFkArgs),
    /// Every identity that applies to the given instance.
    Instance(VerifyInstanceArgs),
}

#[derive(Args, Debug)]
pub struct VerifyFkArgs {
    #[arg(long, default_value_t = 3)]
    pub max_n: usize,
    /// Largest number of hyperedges (repeats allowed).
    #[arg(long, default_value_t = 3)]
    pub max_edges: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    pub q: Vec<u64>,
    #[arg(long, value_parser = rational, value_delimiter = ',', default_value = "1,2")]
    pub gamma: Vec<BigRational>,
}

#[derive(Args, Debug)]
pub struct VerifyInstanceArgs {
    pub file: PathBuf,
    /// Integer `q ≥ 3`; `μ = q − 1` for bipartite input.
    #[arg(long, value_parser = rational, default_value = "3")]
    pub q: BigRational,
}

#[derive(Subcommand, Debug)]
pub enum DemoCommand {
    /// Largest-component fraction of the random-cluster model on `K_N` across `λ = pN`.
    Phase(PhaseArgs),
}

#[derive(Args, Debug)]
pub struct PhaseArgs {
    #[arg(long, value_parser = rational, default_value = "10")]
    pub q: BigRational,
    #[arg(long = "N", default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub sweeps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Smallest `λ` (default: `λ_c/2`).
    #[arg(long, value_parser = rational)]
    pub lambda_min: Option<BigRational>,
    /// Largest `λ` (default: `q + 2`).
    #[arg(long, value_parser = rational)]
    pub lambda_max: Option<BigRational>,
    #[arg(long, default_value_t = 12)]
    pub points: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = std::time::Instant::now();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {} worker threads: {e}", cli.jobs);
            return ExitCode::from(1);
        }
    };
    let result = pool.install(|| commands::run(&cli));
    if cli.timing {
        eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    }
    match result {
        Ok(report) => report.emit(cli.json),
        Err(f) => f.emit(cli.json),
    }
}

pub type CmdResult = Result<Report, Failure>;
