use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, RngCore};
use serde::Serialize;

use super::dynamic::DynamicComponents;
use super::probability::{EdgeProbabilityMap, LazyUniform, Threshold};
use crate::error::{Error, Result};
use crate::model::{Seed, WeightedGraph};

/// Which distribution the heat-bath chain targets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    RandomCluster { q: BigRational },
    ErdosRenyi,
}

/// Edges forced into (`A⁺`) and out of (`A⁻`) every state.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Conditioning {
    forced_in: BTreeSet<usize>,
    forced_out: BTreeSet<usize>,
}

impl Conditioning {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(
        forced_in: impl IntoIterator<Item = usize>,
        forced_out: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let c = Self {
            forced_in: forced_in.into_iter().collect(),
            forced_out: forced_out.into_iter().collect(),
        };
        if let Some(e) = c.forced_in.intersection(&c.forced_out).next() {
            return Err(Error::InvalidParameter(format!(
                "edge {e} is both forced in and forced out"
            )));
        }
        Ok(c)
    }

    pub fn forced_in(&self) -> &BTreeSet<usize> {
        &self.forced_in
    }

    pub fn forced_out(&self) -> &BTreeSet<usize> {
        &self.forced_out
    }

    pub fn is_free(&self, e: usize) -> bool {
        !self.forced_in.contains(&e) && !self.forced_out.contains(&e)
    }

    /// Range checks plus `p > 0` on `A⁺` and `p < 1` on `A⁻`.
    pub fn validate(&self, g: &WeightedGraph, p: &EdgeProbabilityMap) -> Result<()> {
        for &e in self.forced_in.iter().chain(&self.forced_out) {
            g.check_edge(e)?;
        }
        if let Some(&e) = self.forced_in.iter().find(|&&e| p.get(e).is_zero()) {
            return Err(Error::InvalidParameter(format!(
                "edge {e} is forced in but has p = 0"
            )));
        }
        if let Some(&e) = self.forced_out.iter().find(|&&e| p.get(e).is_one()) {
            return Err(Error::InvalidParameter(format!(
                "edge {e} is forced out but has p = 1"
            )));
        }
        Ok(())
    }
}

/// Current edge set `A` and the number of single-edge updates applied so far.
#[derive(Clone, Debug)]
pub struct ChainState {
    comps: DynamicComponents,
    step: u64,
}

impl ChainState {
    pub fn contains(&self, e: usize) -> bool {
        self.comps.contains(e)
    }

    /// Edge ids of `A`, ascending.
    pub fn edges(&self) -> Vec<usize> {
        self.comps.edges()
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn components(&self) -> usize {
        self.comps.components()
    }

    pub fn largest_component(&self) -> usize {
        self.comps.largest()
    }

    pub fn component_sizes(&self) -> Vec<usize> {
        self.comps.sizes()
    }

    pub fn summary(&self) -> StateSummary {
        let edges = self.edges();
        StateSummary {
            step: self.step,
            edge_count: edges.len(),
            edges,
            components: self.components(),
            component_sizes: self.component_sizes(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StateSummary {
    pub step: u64,
    pub edges: Vec<usize>,
    pub edge_count: usize,
    pub components: usize,
    pub component_sizes: Vec<usize>,
}

/// Heat-bath dynamics for a fixed graph, model, edge probabilities and conditioning.
///
/// Each step picks a uniformly random free edge `e` and resamples it from its
/// conditional law given the rest of `A`: with probability `p(e)` under ER, and under
/// RC with `p(e)` when the endpoints are joined in `A − e`, else `p(e)/(p(e)+q(1−p(e)))`.
#[derive(Clone, Debug)]
pub struct HeatBath {
    n: usize,
    ends: Vec<(usize, usize)>,
    free: Vec<usize>,
    joined: Vec<Threshold>,
    apart: Vec<Threshold>,
    cond: Conditioning,
}

impl HeatBath {
    pub fn new(
        g: &WeightedGraph,
        model: &Model,
        p: &EdgeProbabilityMap,
        cond: &Conditioning,
    ) -> Result<Self> {
        if p.len() != g.m() {
            return Err(Error::InvalidParameter(format!(
                "{} probabilities for {} edges",
                p.len(),
                g.m()
            )));
        }
        cond.validate(g, p)?;
        let mut joined = Vec::with_capacity(g.m());
        let mut apart = Vec::with_capacity(g.m());
        for e in 0..g.m() {
            let pe = p.get(e);
            joined.push(Threshold::new(pe.clone()));
            let a = match model {
                Model::ErdosRenyi => pe.clone(),
                Model::RandomCluster { q } => {
                    if !q.is_positive() {
                        return Err(Error::InvalidParameter(format!(
                            "random-cluster model needs q > 0, got {q}"
                        )));
                    }
                    let den = pe + q * (BigRational::one() - pe);
                    pe / den
                }
            };
            apart.push(Threshold::new(a));
        }
        Ok(Self {
            n: g.n(),
            ends: g.edges().to_vec(),
            free: (0..g.m()).filter(|&e| cond.is_free(e)).collect(),
            joined,
            apart,
            cond: cond.clone(),
        })
    }

    pub fn free_edges(&self) -> &[usize] {
        &self.free
    }

    pub fn conditioning(&self) -> &Conditioning {
        &self.cond
    }

    /// `A = A⁺`.
    pub fn initial_state(&self) -> ChainState {
        let mut comps = DynamicComponents::new(self.n, &self.ends);
        for &e in self.cond.forced_in() {
            comps.insert(e);
        }
        ChainState { comps, step: 0 }
    }

    /// `A = A⁺ ∪ edges`, ignoring edges forced out.
    pub fn state_from(&self, edges: impl IntoIterator<Item = usize>) -> ChainState {
        let mut state = self.initial_state();
        for e in edges {
            if e < self.ends.len() && !self.cond.forced_out().contains(&e) {
                state.comps.insert(e);
            }
        }
        state
    }

    /// Conditional inclusion probability of `e` given the rest of `state`.
    pub fn inclusion_probability(&self, state: &mut ChainState, e: usize) -> BigRational {
        let was_in = state.comps.contains(e);
        let (u, v) = self.ends[e];
        let joined = if was_in {
            let j = state.comps.remove(e);
            state.comps.insert(e);
            j
        } else {
            state.comps.connected(u, v)
        };
        let th = if joined { &self.joined[e] } else { &self.apart[e] };
        th.value().clone()
    }

    /// Resample edge `e` against the shared uniform `u`.
    pub(crate) fn update<R: RngCore>(
        &self,
        state: &mut ChainState,
        e: usize,
        u: &mut LazyUniform<'_, R>,
    ) {
        let (a, b) = self.ends[e];
        let joined = if state.comps.contains(e) {
            state.comps.remove(e)
        } else {
            state.comps.connected(a, b)
        };
        let th = if joined { &self.joined[e] } else { &self.apart[e] };
        if u.below(th) {
            state.comps.insert(e);
        }
        state.step += 1;
    }

    pub(crate) fn pick<R: RngCore>(&self, rng: &mut R) -> Option<usize> {
        if self.free.is_empty() {
            None
        } else {
            Some(self.free[rng.random_range(0..self.free.len())])
        }
    }

    /// One heat-bath step. With no free edges the state is left unchanged.
    pub fn step<R: RngCore>(&self, state: &mut ChainState, rng: &mut R) {
        if let Some(e) = self.pick(rng) {
            self.update(state, e, &mut LazyUniform::new(rng));
        }
    }

    /// `m` steps, where `m` counts all edges of the graph.
    pub fn sweep<R: RngCore>(&self, state: &mut ChainState, rng: &mut R) {
        for _ in 0..self.ends.len() {
            self.step(state, rng);
        }
    }
}

/// One heat-bath step built from scratch; use [`HeatBath`] to run many.
pub fn heat_bath_step<R: RngCore>(
    g: &WeightedGraph,
    state: &mut ChainState,
    model: &Model,
    p: &EdgeProbabilityMap,
    cond: &Conditioning,
    rng: &mut R,
) -> Result<()> {
    HeatBath::new(g, model, p, cond)?.step(state, rng);
    Ok(())
}

/// State after `sweeps · m` heat-bath updates of `RC(G; q, p)` from `A = A⁺`.
pub fn sample_rc(
    g: &WeightedGraph,
    q: &BigRational,
    p: &EdgeProbabilityMap,
    cond: &Conditioning,
    sweeps: u64,
    seed: Seed,
) -> Result<ChainState> {
    sample_traced(
        g,
        &Model::RandomCluster { q: q.clone() },
        p,
        cond,
        sweeps,
        seed,
        |_, _| {},
    )
}

/// Like [`sample_rc`] for either model, calling `trace(sweep, state)` after each sweep.
pub fn sample_traced(
    g: &WeightedGraph,
    model: &Model,
    p: &EdgeProbabilityMap,
    cond: &Conditioning,
    sweeps: u64,
    seed: Seed,
    mut trace: impl FnMut(u64, &ChainState),
) -> Result<ChainState> {
    if sweeps == 0 {
        return Err(Error::InvalidParameter("need at least one sweep".into()));
    }
    let hb = HeatBath::new(g, model, p, cond)?;
    let mut rng = seed.rng();
    let mut state = hb.initial_state();
    for s in 1..=sweeps {
        hb.sweep(&mut state, &mut rng);
        trace(s, &state);
    }
    Ok(state)
}

/// The three monotone couplings. In each, `lower` is stochastically below `upper`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CouplingKind {
    /// `RC(G; q, p)` below `ER(G; p)`.
    ErOverRc,
    /// `ER(G; p/q)` below `RC(G; q, p)`.
    RcOverErq,
    /// `RC(G; q, p)` below `RC(G; q, p′)` for `p′ ≥ p`.
    RcMonotoneP { p_upper: EdgeProbabilityMap },
}

impl CouplingKind {
    pub fn name(&self) -> &'static str {
        match self {
            CouplingKind::ErOverRc => "er-over-rc",
            CouplingKind::RcOverErq => "rc-over-erq",
            CouplingKind::RcMonotoneP { .. } => "rc-monotone-p",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CoupledState {
    pub lower: ChainState,
    pub upper: ChainState,
}

/// Two heat-bath chains advanced on the same edge with the same uniform.
#[derive(Clone, Debug)]
pub struct CoupledChain {
    lower: HeatBath,
    upper: HeatBath,
    kind: CouplingKind,
}

impl CoupledChain {
    /// All couplings need `q ≥ 1`.
    pub fn new(
        g: &WeightedGraph,
        q: &BigRational,
        p: &EdgeProbabilityMap,
        kind: CouplingKind,
        cond: &Conditioning,
    ) -> Result<Self> {
        if *q < BigRational::one() {
            return Err(Error::InvalidParameter(format!(
                "monotone couplings need q ≥ 1, got {q}"
            )));
        }
        let rc = Model::RandomCluster { q: q.clone() };
        let (lower, upper) = match &kind {
            CouplingKind::ErOverRc => (
                HeatBath::new(g, &rc, p, cond)?,
                HeatBath::new(g, &Model::ErdosRenyi, p, cond)?,
            ),
            CouplingKind::RcOverErq => (
                HeatBath::new(g, &Model::ErdosRenyi, &p.scaled_down(q), cond)?,
                HeatBath::new(g, &rc, p, cond)?,
            ),
            CouplingKind::RcMonotoneP { p_upper } => {
                if p_upper.len() != p.len()
                    || (0..p.len()).any(|e| p_upper.get(e) < p.get(e))
                {
                    return Err(Error::InvalidParameter(
                        "upper probabilities must dominate the lower ones edgewise".into(),
                    ));
                }
                (
                    HeatBath::new(g, &rc, p, cond)?,
                    HeatBath::new(g, &rc, p_upper, cond)?,
                )
            }
        };
        Ok(Self { lower, upper, kind })
    }

    pub fn kind(&self) -> &CouplingKind {
        &self.kind
    }

    pub fn initial_state(&self) -> CoupledState {
        CoupledState {
            lower: self.lower.initial_state(),
            upper: self.upper.initial_state(),
        }
    }

    /// One lockstep step; containment is checked on the updated edge.
    pub fn step<R: RngCore>(&self, cs: &mut CoupledState, rng: &mut R) -> Result<()> {
        let Some(e) = self.lower.pick(rng) else {
            return Ok(());
        };
        let mut u = LazyUniform::new(rng);
        self.lower.update(&mut cs.lower, e, &mut u);
        self.upper.update(&mut cs.upper, e, &mut u);
        if cs.lower.contains(e) && !cs.upper.contains(e) {
            return Err(Error::CouplingViolation {
                step: cs.lower.step,
                edge: e,
            });
        }
        Ok(())
    }
}

/// Full check of `lower.A ⊆ upper.A`.
pub fn verify_containment(cs: &CoupledState) -> Result<()> {
    match cs
        .lower
        .edges()
        .into_iter()
        .find(|&e| !cs.upper.contains(e))
    {
        Some(edge) => Err(Error::CouplingViolation {
            step: cs.lower.step,
            edge,
        }),
        None => Ok(()),
    }
}

/// Runs `steps` coupled steps and returns the final pair.
pub fn run_coupled(
    g: &WeightedGraph,
    q: &BigRational,
    p: &EdgeProbabilityMap,
    kind: CouplingKind,
    cond: &Conditioning,
    steps: u64,
    seed: Seed,
) -> Result<CoupledState> {
    let chain = CoupledChain::new(g, q, p, kind, cond)?;
    let mut rng = seed.rng();
    let mut cs = chain.initial_state();
    for _ in 0..steps {
        chain.step(&mut cs, &mut rng)?;
    }
    verify_containment(&cs)?;
    Ok(cs)
}

#[cfg(test)]
pub(crate) fn state_from_edges(g: &WeightedGraph, edges: &[usize]) -> ChainState {
    let mut comps = DynamicComponents::new(g.n(), g.edges());
    for &e in edges {
        comps.insert(e);
    }
    ChainState { comps, step: 0 }
}
