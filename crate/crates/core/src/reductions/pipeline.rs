use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gadget::TunerConfig;
use crate::model::number::{int, rat};
use crate::model::text::Instance;
use crate::model::{BipartiteGraph, WeightedGraph};

use super::bis::{maxis_blowup, semiregular_pad, semiregular_to_hypertutte};
use super::hyper::{hyper_to_twoweight, TwoWeightConfig};
use super::series_parallel::twoweight_to_uniform;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PipelineConfig {
    pub clique_override: Option<usize>,
    pub tuner: TunerConfig,
    pub enforce_budget: bool,
}

/// One stage of the chain. `scale_factor` maps this stage's value back to the previous
/// one: `Z_prev ≈ scale_factor · Z_this`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTrace {
    pub stage: &'static str,
    pub instance: Instance,
    pub scale_factor: BigRational,
    pub eps_used: BigRational,
    pub warnings: Vec<String>,
    pub params: BTreeMap<String, String>,
}

/// Serializable summary of a [`ReductionTrace`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub stage: String,
    pub kind: String,
    pub scale_num: String,
    pub scale_den: String,
    pub eps_used: String,
    pub warnings: Vec<String>,
    pub params: BTreeMap<String, String>,
}

impl ReductionTrace {
    pub fn record(&self) -> TraceRecord {
        TraceRecord {
            stage: self.stage.to_string(),
            kind: self.instance.kind().to_string(),
            scale_num: self.scale_factor.numer().to_string(),
            scale_den: self.scale_factor.denom().to_string(),
            eps_used: self.eps_used.to_string(),
            warnings: self.warnings.clone(),
            params: self.params.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub traces: Vec<ReductionTrace>,
    /// Uniform-weight Tutte instance; every edge has weight `gamma`.
    pub final_graph: WeightedGraph,
    pub q: BigRational,
    pub gamma: BigRational,
}

impl PipelineResult {
    /// Product of all stage scale factors.
    pub fn total_scale(&self) -> BigRational {
        self.traces
            .iter()
            .fold(BigRational::one(), |acc, t| acc * &t.scale_factor)
    }

    /// Maximum-independent-set count of the input recovered from a value (or estimate)
    /// of `Z_Tutte(final_graph; q, γ)`.
    pub fn recover(&self, z_final: &BigRational) -> BigInt {
        (z_final * self.total_scale()).floor().to_integer()
    }
}

fn params<const N: usize>(items: [(&str, String); N]) -> BTreeMap<String, String> {
    items.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Chains the reductions from counting maximum independent sets of `b` down to a
/// uniform-weight Tutte instance at `(q, gamma)`, with `μ = q − 1`.
///
/// `ε` is split as `ε/8, ε/8, ε/4, ε/4, ε/4` over the five stages; the exact stages
/// simply leave their share unused.
pub fn run_pipeline(
    b: &BipartiteGraph,
    q: &BigRational,
    gamma: &BigRational,
    eps: &BigRational,
    cfg: &PipelineConfig,
) -> Result<PipelineResult> {
    if *q <= int(2) {
        return Err(Error::InvalidParameter(format!("q must exceed 2, got {q}")));
    }
    let mu = q - int(1);
    let eighth = eps * rat(1, 8);
    let quarter = eps * rat(1, 4);
    let mut traces = Vec::with_capacity(5);

    let up = maxis_blowup(b, &mu).map_err(|e| e.in_stage("maxis-blowup"))?;
    traces.push(ReductionTrace {
        stage: "maxis-blowup",
        instance: Instance::Bipartite(up.graph.clone()),
        scale_factor: up.divisor.recip(),
        eps_used: eighth.clone(),
        warnings: vec!["final value is floored after scaling".into()],
        params: params([
            ("s", up.s.to_string()),
            ("xi", up.xi.to_string()),
            ("divisor", up.divisor.to_string()),
        ]),
    });

    let pad = semiregular_pad(&up.graph, &mu, &eighth).map_err(|e| e.in_stage("semiregular-pad"))?;
    let p = &pad.params;
    traces.push(ReductionTrace {
        stage: "semiregular-pad",
        instance: Instance::Bipartite(pad.graph.clone()),
        scale_factor: pad.correction.recip(),
        eps_used: eighth,
        warnings: Vec::new(),
        params: params([
            ("s_pad", p.s_pad.to_string()),
            ("d", p.d.to_string()),
            ("g", p.g.to_string()),
            ("Y", p.y.to_string()),
        ]),
    });

    let (h, scale) = semiregular_to_hypertutte(&pad.graph, &mu).map_err(|e| e.in_stage("hypergraph-tutte"))?;
    traces.push(ReductionTrace {
        stage: "hypergraph-tutte",
        instance: Instance::Hypergraph(h.clone()),
        scale_factor: scale,
        eps_used: quarter.clone(),
        warnings: Vec::new(),
        params: params([("q", q.to_string()), ("gamma", mu.to_string())]),
    });

    let tw_cfg = TwoWeightConfig {
        clique_override: cfg.clique_override,
        tuner: cfg.tuner.clone(),
    };
    let tw = hyper_to_twoweight(&h, q, &mu, &quarter, &tw_cfg).map_err(|e| e.in_stage("two-weight"))?;
    traces.push(ReductionTrace {
        stage: "two-weight",
        instance: Instance::Graph(tw.graph.clone()),
        scale_factor: tw.scale.clone(),
        eps_used: quarter.clone(),
        warnings: tw.warnings.clone(),
        params: params([
            ("N", tw.clique.to_string()),
            ("t", tw.terminals.to_string()),
            ("m", tw.hyperedges.to_string()),
            ("c", tw.c.to_string()),
            ("chi", tw.chi.to_string()),
            ("eta", tw.eta.to_string()),
            ("prescribed_N", tw.prescribed_clique.to_string()),
            ("asymptotic_regime", tw.asymptotic_regime.to_string()),
        ]),
    });

    let uni = twoweight_to_uniform(&tw.graph, q, gamma, &quarter, cfg.enforce_budget)
        .map_err(|e| e.in_stage("uniform-weight"))?;
    traces.push(ReductionTrace {
        stage: "uniform-weight",
        instance: Instance::Graph(uni.graph.clone()),
        scale_factor: uni.scale.recip(),
        eps_used: quarter,
        warnings: uni.warnings.clone(),
        params: params([
            ("chi", uni.chi.to_string()),
            ("pi", uni.pi_tol.to_string()),
            ("implementations", uni.implementations.len().to_string()),
        ]),
    });

    Ok(PipelineResult {
        traces,
        final_graph: uni.graph,
        q: q.clone(),
        gamma: gamma.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_eval::frontier;

    #[test]
    fn single_vertex_end_to_end() {
        let b = BipartiteGraph::new(1, 0, vec![]).unwrap();
        let eps = rat(1, 2);
        let r = run_pipeline(&b, &int(3), &int(2), &eps, &PipelineConfig::default()).unwrap();
        assert_eq!(r.traces.len(), 5);
        let budget = r.traces.iter().fold(BigRational::from_integer(0.into()), |a, t| a + &t.eps_used);
        assert_eq!(budget, eps);
        let z = frontier::tutte(&r.final_graph, &r.q).unwrap();
        assert_eq!(r.recover(&z), BigInt::from(1));
        assert_eq!(r.traces[0].params["divisor"], "80");
        for t in &r.traces {
            assert!(t.scale_factor > int(0));
            crate::model::text::parse(&t.instance.to_text()).unwrap();
        }
    }

    #[test]
    fn stage_errors_are_attributed() {
        let b = BipartiteGraph::new(1, 1, vec![(0, 0)]).unwrap();
        let err = run_pipeline(&b, &int(3), &int(2), &int(1), &PipelineConfig::default()).unwrap_err();
        match &err {
            Error::Stage { stage, .. } => assert_eq!(*stage, "two-weight"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.is_regime_error());
        assert!(run_pipeline(&b, &int(2), &int(2), &int(1), &PipelineConfig::default()).is_err());
    }
}
