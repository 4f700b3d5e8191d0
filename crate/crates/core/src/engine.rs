//! Tick loop, metrics capture and parameter sweeps.
//!
//! Each tick runs, in order:
//!
//! 1. campaign topic draw (uniform over env, wca, know, trust);
//! 2. peer phase, synchronous: every agent reads only the start-of-tick
//!    snapshot, engages with probability `2δ`, and updates env, wca and know;
//! 3. media phase: `round(2σ·n)` agents sampled without replacement apply the
//!    feed's promoted opinion through the damped blend;
//! 4. government phase while campaigns run: the promoted opinion derives from
//!    the current mean of the campaign topic, each agent is exposed with
//!    `gov_exposure_prob`, then every agent's `s_gov` decays;
//! 5. purchase probabilities are recomputed;
//! 6. metrics are recorded on the configured cadence.

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::influence::{
    blend, fatigue_step, gov_feedback, peer_update, sm_feedback, KernelParams, PeerTerm,
};
use crate::model::{AgentState, RegressionCoefficients, Topic};
use crate::population::{
    build_graph_with, load_population_csv, sample_daily_contacts, synthesize_population,
    PopulationSource, SocialGraph,
};
use crate::rng::{stream, StreamLabel};
use crate::scenario::{EngineConfig, GridAxis, ScenarioConfig};

/// Quantities tracked per recorded tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tracked {
    Env,
    Wca,
    Know,
    Trust,
    PurchaseProb,
    GovSusceptibility,
}

impl Tracked {
    pub const ALL: [Tracked; 6] = [
        Tracked::Env,
        Tracked::Wca,
        Tracked::Know,
        Tracked::Trust,
        Tracked::PurchaseProb,
        Tracked::GovSusceptibility,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Tracked::Env => "env",
            Tracked::Wca => "wca",
            Tracked::Know => "know",
            Tracked::Trust => "trust",
            Tracked::PurchaseProb => "purchase_prob",
            Tracked::GovSusceptibility => "s_gov",
        }
    }

    pub fn value(self, agent: &AgentState) -> f64 {
        let a = &agent.attributes;
        match self {
            Tracked::Env => a.env,
            Tracked::Wca => a.wca,
            Tracked::Know => a.know,
            Tracked::Trust => a.trust,
            Tracked::PurchaseProb => agent.purchase_prob,
            Tracked::GovSusceptibility => agent.susceptibilities.s_gov,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Population mean and variance (divisor `n`) of one tracked quantity.
pub fn mean_variance(agents: &[AgentState], what: Tracked) -> (f64, f64) {
    if agents.is_empty() {
        return (0.0, 0.0);
    }
    let n = agents.len() as f64;
    let mean = agents.iter().map(|a| what.value(a)).sum::<f64>() / n;
    let var = agents
        .iter()
        .map(|a| {
            let d = what.value(a) - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    (mean, var)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Moments {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
}

/// Recorded means and variances over time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsSeries {
    /// Tick index of each record; the first is always 0.
    pub ticks: Vec<u64>,
    series: [Moments; 6],
}

impl MetricsSeries {
    fn record(&mut self, tick: u64, agents: &[AgentState]) {
        self.ticks.push(tick);
        for what in Tracked::ALL {
            let (m, v) = mean_variance(agents, what);
            let s = &mut self.series[what.index()];
            s.mean.push(m);
            s.variance.push(v);
        }
    }

    pub fn len(&self) -> usize {
        self.ticks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ticks.is_empty()
    }

    pub fn moments(&self, what: Tracked) -> &Moments {
        &self.series[what.index()]
    }

    pub fn mean(&self, what: Tracked) -> &[f64] {
        &self.series[what.index()].mean
    }

    pub fn variance(&self, what: Tracked) -> &[f64] {
        &self.series[what.index()].variance
    }

    pub fn baseline(&self, what: Tracked) -> f64 {
        self.mean(what)[0]
    }

    /// `mean(t) - mean(0)` for every record.
    pub fn net_change(&self, what: Tracked) -> Vec<f64> {
        let m = self.mean(what);
        m.iter().map(|v| v - m[0]).collect()
    }

    pub fn final_net_change(&self, what: Tracked) -> f64 {
        let m = self.mean(what);
        m[m.len() - 1] - m[0]
    }

    /// Record index for tick `tick`, if it was recorded.
    pub fn record_at(&self, tick: u64) -> Option<usize> {
        self.ticks.binary_search(&tick).ok()
    }
}

/// Result of a completed run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub metrics: MetricsSeries,
    pub agents: Vec<AgentState>,
}

/// Builds the initial agentset and graph for a single-cell scenario. Both
/// depend only on the population spec and the seed.
pub fn initialize(scenario: &ScenarioConfig) -> Result<(Vec<AgentState>, SocialGraph)> {
    let seed = scenario.engine.seed;
    let spec = &scenario.population;
    spec.validate()?;
    let mut pop_rng = stream(seed, StreamLabel::Population, 0);
    let agents = match &spec.source {
        PopulationSource::Synthetic => {
            synthesize_population(spec, &scenario.coefficients, &mut pop_rng)?
        }
        PopulationSource::Csv(path) => load_population_csv(
            path,
            spec.susceptibility_range,
            &scenario.coefficients,
            &mut pop_rng,
        )?,
    };
    let mut graph_rng = stream(seed, StreamLabel::Graph, 0);
    let graph = build_graph_with(agents.len(), spec.acquaintances, &mut graph_rng)?;
    Ok((agents, graph))
}

/// A run in progress. Advance with [`Simulation::step`].
#[derive(Debug, Clone)]
pub struct Simulation {
    kernels: KernelParams,
    engine: EngineConfig,
    coeffs: RegressionCoefficients,
    graph: SocialGraph,
    agents: Vec<AgentState>,
    snapshot: Vec<AgentState>,
    peer_terms: Vec<PeerTerm>,
    tick: u64,
    metrics: MetricsSeries,
}

impl Simulation {
    /// Validates a single-cell scenario and builds its initial state.
    pub fn new(scenario: &ScenarioConfig) -> Result<Self> {
        if scenario.is_grid() {
            return Err(Error::InvalidSpec(
                "scenario has multi-valued parameters; expand it with cells() or run a sweep".into(),
            ));
        }
        scenario.validate()?;
        let (agents, graph) = initialize(scenario)?;
        Self::from_parts(
            agents,
            graph,
            scenario.kernels,
            scenario.engine,
            scenario.coefficients,
        )
    }

    /// Starts from an explicit agentset and graph.
    pub fn from_parts(
        agents: Vec<AgentState>,
        graph: SocialGraph,
        kernels: KernelParams,
        engine: EngineConfig,
        coeffs: RegressionCoefficients,
    ) -> Result<Self> {
        kernels.validate()?;
        engine.validate()?;
        if graph.len() != agents.len() {
            return Err(Error::InvalidSpec(format!(
                "graph has {} nodes for {} agents",
                graph.len(),
                agents.len()
            )));
        }
        let mut metrics = MetricsSeries::default();
        metrics.record(0, &agents);
        Ok(Self {
            kernels,
            engine,
            coeffs,
            graph,
            snapshot: Vec::with_capacity(agents.len()),
            agents,
            peer_terms: Vec::new(),
            tick: 0,
            metrics,
        })
    }

    pub fn agents(&self) -> &[AgentState] {
        &self.agents
    }

    pub fn graph(&self) -> &SocialGraph {
        &self.graph
    }

    /// Ticks completed so far.
    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn is_finished(&self) -> bool {
        self.tick >= self.engine.ticks
    }

    pub fn metrics(&self) -> &MetricsSeries {
        &self.metrics
    }

    pub fn campaign_active(&self, tick: u64) -> bool {
        self.kernels.zeta.is_some()
            && !self.engine.disable_gov
            && self.engine.campaign_stop_tick.is_none_or(|stop| tick < stop)
    }

    /// Executes one tick. Returns `false` once the configured tick count has
    /// been reached.
    pub fn step(&mut self) -> bool {
        if self.is_finished() {
            return false;
        }
        let t = self.tick;
        let seed = self.engine.seed;

        let topic = Topic::CAMPAIGN
            [stream(seed, StreamLabel::Campaign, t).random_range(0..Topic::CAMPAIGN.len())];

        if !self.engine.disable_peer {
            self.peer_phase(t);
        }
        if !self.engine.disable_media {
            self.media_phase(t);
        }
        if self.campaign_active(t) {
            self.government_phase(t, topic);
        }
        for agent in &mut self.agents {
            agent.refresh_purchase_prob(&self.coeffs);
        }

        self.tick += 1;
        if self.tick.is_multiple_of(self.engine.record_every) {
            self.metrics.record(self.tick, &self.agents);
        }
        true
    }

    fn peer_phase(&mut self, t: u64) {
        let mut rng = stream(self.engine.seed, StreamLabel::Peer, t);
        let engage = self.kernels.engagement_prob();
        let tau = self.kernels.tau;
        self.snapshot.clone_from(&self.agents);
        let snap = &self.snapshot;
        for i in 0..snap.len() {
            if rng.random::<f64>() >= engage {
                continue;
            }
            let partners = sample_daily_contacts(i, &self.graph, &mut rng);
            let me = &snap[i];
            for topic in Topic::SOCIAL {
                self.peer_terms.clear();
                self.peer_terms.extend(partners.iter().map(|&j| PeerTerm {
                    opinion: snap[j].attributes.get(topic),
                    behavior: snap[j].behavior(),
                    s_pp: snap[j].susceptibilities.s_pp,
                }));
                let updated = peer_update(
                    me.attributes.get(topic),
                    me.susceptibilities.s_pp,
                    &self.peer_terms,
                    tau,
                );
                self.agents[i].attributes.set(topic, updated);
            }
        }
    }

    fn media_phase(&mut self, t: u64) {
        let mut rng = stream(self.engine.seed, StreamLabel::Media, t);
        let n = self.agents.len();
        let exposed = ((self.kernels.media_fraction() * n as f64).round() as usize).min(n);
        let gamma = self.kernels.blend_gamma;
        let beta = self.kernels.beta;
        for i in index::sample(&mut rng, n, exposed) {
            let agent = &mut self.agents[i];
            let s_sm = agent.susceptibilities.s_sm;
            for topic in Topic::SOCIAL {
                let x = agent.attributes.get(topic);
                let promoted = sm_feedback(x, s_sm, beta);
                agent.attributes.set(topic, blend(x, promoted, s_sm, gamma));
            }
        }
    }

    fn government_phase(&mut self, t: u64, topic: Topic) {
        let Some(zeta) = self.kernels.zeta else {
            return;
        };
        let mut rng = stream(self.engine.seed, StreamLabel::Government, t);
        let n = self.agents.len() as f64;
        let mean = self.agents.iter().map(|a| a.attributes.get(topic)).sum::<f64>() / n;
        let promoted = gov_feedback(mean, zeta);
        let gamma = self.kernels.blend_gamma;
        let p_exposed = self.kernels.gov_exposure_prob;
        for agent in &mut self.agents {
            if rng.random::<f64>() < p_exposed {
                let x = agent.attributes.get(topic);
                let s_gov = agent.susceptibilities.s_gov;
                agent.attributes.set(topic, blend(x, promoted, s_gov, gamma));
            }
        }
        let rate = self.kernels.fatigue_rate;
        for agent in &mut self.agents {
            let s = &mut agent.susceptibilities.s_gov;
            *s = fatigue_step(*s, t, rate);
        }
    }

    pub fn run_to_end(&mut self) {
        while self.step() {}
    }

    pub fn into_output(self) -> RunOutput {
        RunOutput {
            metrics: self.metrics,
            agents: self.agents,
        }
    }
}

/// Runs a single-cell scenario to completion.
pub fn run(scenario: &ScenarioConfig) -> Result<RunOutput> {
    let mut sim = Simulation::new(scenario)?;
    sim.run_to_end();
    Ok(sim.into_output())
}

/// Execution order for sweep jobs. Results never depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    #[default]
    Parallel,
    Sequential,
    Reversed,
}

/// Mean and sample standard deviation of one tracked quantity's final net
/// change across the seeds of a cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetChangeStats {
    pub what: Tracked,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub label: String,
    pub assignments: Vec<(crate::scenario::SweepKey, f64)>,
    /// `(seed, metrics)` in seed-list order.
    pub runs: Vec<(u64, MetricsSeries)>,
    pub stats: Vec<NetChangeStats>,
}

impl SweepCell {
    pub fn stat(&self, what: Tracked) -> NetChangeStats {
        self.stats[what.index()]
    }
}

/// Runs every cell of `base` extended by `extra` axes under every seed.
pub fn run_sweep(base: &ScenarioConfig, extra: &[GridAxis], seeds: &[u64]) -> Result<Vec<SweepCell>> {
    run_sweep_with(base, extra, seeds, Schedule::Parallel)
}

pub fn run_sweep_with(
    base: &ScenarioConfig,
    extra: &[GridAxis],
    seeds: &[u64],
    schedule: Schedule,
) -> Result<Vec<SweepCell>> {
    if seeds.is_empty() {
        return Err(Error::InvalidSpec("sweep needs at least one seed".into()));
    }
    let mut scenario = base.clone();
    for axis in extra {
        scenario.set_axis(axis.clone());
    }
    scenario.validate()?;
    let cells = scenario.cells();

    let jobs: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| seeds.iter().map(move |&s| (c, s)))
        .collect();
    let run_job = |&(c, seed): &(usize, u64)| -> Result<MetricsSeries> {
        run(&cells[c].scenario.with_seed(seed)).map(|out| out.metrics)
    };
    let results: Vec<Result<MetricsSeries>> = match schedule {
        Schedule::Parallel => jobs.par_iter().map(run_job).collect(),
        Schedule::Sequential => jobs.iter().map(run_job).collect(),
        Schedule::Reversed => {
            let mut r: Vec<_> = jobs.iter().rev().map(run_job).collect();
            r.reverse();
            r
        }
    };

    let mut results = results.into_iter();
    let mut out = Vec::with_capacity(cells.len());
    for cell in &cells {
        let mut runs = Vec::with_capacity(seeds.len());
        for &seed in seeds {
            runs.push((seed, results.next().expect("one result per job")?));
        }
        let stats = Tracked::ALL
            .iter()
            .map(|&what| {
                let xs: Vec<f64> = runs.iter().map(|(_, m)| m.final_net_change(what)).collect();
                let (mean, sd) = mean_sd(&xs);
                NetChangeStats { what, mean, sd }
            })
            .collect();
        out.push(SweepCell {
            label: cell.label(),
            assignments: cell.assignments.clone(),
            runs,
            stats,
        });
    }
    Ok(out)
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    (mean, (ss / (n - 1.0)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::SweepKey;

    fn small(ticks: u64) -> ScenarioConfig {
        let mut s = ScenarioConfig::default();
        s.population.n_agents = 60;
        s.engine.ticks = ticks;
        s
    }

    #[test]
    fn zero_ticks_is_baseline_only() {
        let s = small(0);
        let out = run(&s).unwrap();
        assert_eq!(out.metrics.len(), 1);
        let (init, _) = initialize(&s).unwrap();
        assert_eq!(out.agents, init);
    }

    #[test]
    fn series_length_follows_cadence() {
        let mut s = small(10);
        s.engine.record_every = 3;
        let out = run(&s).unwrap();
        assert_eq!(out.metrics.ticks, vec![0, 3, 6, 9]);
    }

    #[test]
    fn grid_scenarios_cannot_run_directly() {
        let mut s = small(1);
        s.set_axis(GridAxis::new(SweepKey::Delta, vec![0.1, 0.2]));
        assert!(matches!(Simulation::new(&s), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn sweep_requires_seeds() {
        assert!(matches!(
            run_sweep(&small(1), &[], &[]),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn sweep_rejects_range_violation_before_running() {
        let axis = GridAxis::new(SweepKey::Sigma, vec![0.1, 0.9]);
        assert!(matches!(
            run_sweep(&small(1), &[axis], &[1]),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn mean_sd_small_cases() {
        assert_eq!(mean_sd(&[2.0]), (2.0, 0.0));
        let (m, sd) = mean_sd(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((sd - 2f64.sqrt()).abs() < 1e-15);
    }
}
