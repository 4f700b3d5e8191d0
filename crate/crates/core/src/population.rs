//! Agentset construction: synthetic sampling or CSV ingestion, the
//! clique-plus-acquaintance social graph, and daily contact sampling.

use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use rand::seq::index;
use rand::Rng;
use rand_distr::{Beta, Distribution};

use crate::error::{check_range, Error, Result};
use crate::model::{
    AgentAttributes, AgentState, RegressionCoefficients, Susceptibilities, AGE_BRACKETS,
    ATTRIBUTE_NAMES,
};

/// Close friends per agent; cliques have `INNER_CIRCLE + 1` members.
pub const INNER_CIRCLE: usize = 5;
pub const CLIQUE_SIZE: usize = INNER_CIRCLE + 1;
pub const DEFAULT_ACQUAINTANCES: usize = 10;
/// Centre of the daily interaction count `10 ± a`.
pub const DAILY_CONTACTS: usize = 10;
/// Largest deviation `a` from [`DAILY_CONTACTS`].
pub const DAILY_SPREAD: usize = 4;

/// Two-parameter Beta distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSpec {
    pub alpha: f64,
    pub beta: f64,
}

impl BetaSpec {
    pub const fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    fn validate(&self, key: &str) -> Result<()> {
        if self.alpha.is_finite() && self.beta.is_finite() && self.alpha > 0.0 && self.beta > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!(
                "{key}: Beta parameters must be positive, got ({}, {})",
                self.alpha, self.beta
            )))
        }
    }

    fn distribution(&self) -> Beta<f64> {
        // validated beforehand
        Beta::new(self.alpha, self.beta).expect("validated Beta parameters")
    }
}

/// Beta specs for the seven continuous attributes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttributeDistributions {
    pub env: BetaSpec,
    pub exp: BetaSpec,
    pub wca: BetaSpec,
    pub know: BetaSpec,
    pub trust: BetaSpec,
    pub access: BetaSpec,
    pub freq: BetaSpec,
}

impl AttributeDistributions {
    pub const NAMES: [&'static str; 7] = ["env", "exp", "wca", "know", "trust", "access", "freq"];

    pub fn get(&self, name: &str) -> Option<&BetaSpec> {
        Some(match name {
            "env" => &self.env,
            "exp" => &self.exp,
            "wca" => &self.wca,
            "know" => &self.know,
            "trust" => &self.trust,
            "access" => &self.access,
            "freq" => &self.freq,
            _ => return None,
        })
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut BetaSpec> {
        Some(match name {
            "env" => &mut self.env,
            "exp" => &mut self.exp,
            "wca" => &mut self.wca,
            "know" => &mut self.know,
            "trust" => &mut self.trust,
            "access" => &mut self.access,
            "freq" => &mut self.freq,
            _ => return None,
        })
    }

    pub fn uniform() -> Self {
        let u = BetaSpec::new(1.0, 1.0);
        Self {
            env: u,
            exp: u,
            wca: u,
            know: u,
            trust: u,
            access: u,
            freq: u,
        }
    }
}

impl Default for AttributeDistributions {
    fn default() -> Self {
        Self {
            env: BetaSpec::new(5.0, 2.0),
            exp: BetaSpec::new(2.0, 4.0),
            wca: BetaSpec::new(2.0, 5.5),
            know: BetaSpec::new(2.0, 5.5),
            trust: BetaSpec::new(12.0, 2.0),
            access: BetaSpec::new(3.0, 3.0),
            freq: BetaSpec::new(2.0, 5.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PopulationSource {
    Synthetic,
    Csv(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSpec {
    pub n_agents: usize,
    pub female_fraction: f64,
    /// Share of agents in the youngest age bracket.
    pub young_fraction: f64,
    pub distributions: AttributeDistributions,
    /// Closed interval all three susceptibilities are drawn from uniformly.
    pub susceptibility_range: (f64, f64),
    /// Acquaintances per agent in the social graph.
    pub acquaintances: usize,
    pub source: PopulationSource,
}

impl Default for PopulationSpec {
    fn default() -> Self {
        Self {
            n_agents: 1050,
            female_fraction: 0.80,
            young_fraction: 0.50,
            distributions: AttributeDistributions::default(),
            // calibrated; any sub-interval of [0.1, 0.9] is admissible
            susceptibility_range: (0.1, 0.6),
            acquaintances: DEFAULT_ACQUAINTANCES,
            source: PopulationSource::Synthetic,
        }
    }
}

impl PopulationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.source == PopulationSource::Synthetic {
            check_clique_tiling(self.n_agents)?;
        }
        check_range("population.female_fraction", self.female_fraction, 0.0, 1.0)?;
        check_range("population.young_fraction", self.young_fraction, 0.0, 1.0)?;
        let (lo, hi) = self.susceptibility_range;
        check_range("population.susceptibility_range", lo, 0.0, 1.0)?;
        check_range("population.susceptibility_range", hi, lo, 1.0)?;
        for name in AttributeDistributions::NAMES {
            self.distributions
                .get(name)
                .expect("known attribute")
                .validate(&format!("population.distributions.{name}"))?;
        }
        Ok(())
    }
}

fn check_clique_tiling(n_agents: usize) -> Result<()> {
    if n_agents == 0 || !n_agents.is_multiple_of(CLIQUE_SIZE) {
        return Err(Error::InvalidSpec(format!(
            "n_agents must be a positive multiple of {CLIQUE_SIZE}, got {n_agents}"
        )));
    }
    Ok(())
}

fn sample_susceptibilities<R: Rng + ?Sized>(range: (f64, f64), rng: &mut R) -> Susceptibilities {
    let (lo, hi) = range;
    let mut draw = || lo + (hi - lo) * rng.random::<f64>();
    Susceptibilities {
        s_pp: draw(),
        s_sm: draw(),
        s_gov: draw(),
    }
}

/// Samples a synthetic agentset.
///
/// Per agent, in order: sex, age bracket, the seven Beta attributes in
/// [`AttributeDistributions::NAMES`] order, then `s_pp`, `s_sm`, `s_gov`.
pub fn synthesize_population<R: Rng + ?Sized>(
    spec: &PopulationSpec,
    coeffs: &RegressionCoefficients,
    rng: &mut R,
) -> Result<Vec<AgentState>> {
    spec.validate()?;
    let d = &spec.distributions;
    let [env, exp, wca, know, trust, access, freq] =
        [d.env, d.exp, d.wca, d.know, d.trust, d.access, d.freq].map(|b| b.distribution());

    let mut agents = Vec::with_capacity(spec.n_agents);
    for id in 0..spec.n_agents {
        let sex = if rng.random::<f64>() < spec.female_fraction {
            1.0
        } else {
            0.0
        };
        let age = if rng.random::<f64>() < spec.young_fraction {
            AGE_BRACKETS[0]
        } else {
            AGE_BRACKETS[rng.random_range(1..AGE_BRACKETS.len())]
        };
        let attributes = AgentAttributes {
            sex,
            age,
            env: env.sample(rng),
            exp: exp.sample(rng),
            wca: wca.sample(rng),
            know: know.sample(rng),
            trust: trust.sample(rng),
            access: access.sample(rng),
            freq: freq.sample(rng),
        };
        let sus = sample_susceptibilities(spec.susceptibility_range, rng);
        agents.push(AgentState::new(id, attributes, sus, coeffs));
    }
    Ok(agents)
}

/// Loads agents from a population CSV with header
/// `sex,age,env,exp,wca,know,trust,access,freq` (any column order).
///
/// Values must already be normalised to `[0, 1]`; `sex` must be 0 or 1.
/// Rows are numbered from 1, not counting the header. Susceptibilities are
/// drawn as in [`synthesize_population`].
pub fn load_population_csv<R: Rng + ?Sized>(
    path: &Path,
    susceptibility_range: (f64, f64),
    coeffs: &RegressionCoefficients,
    rng: &mut R,
) -> Result<Vec<AgentState>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_population_csv(file, susceptibility_range, coeffs, rng)
}

/// Reader-based variant of [`load_population_csv`].
pub fn read_population_csv<In: Read, R: Rng + ?Sized>(
    input: In,
    susceptibility_range: (f64, f64),
    coeffs: &RegressionCoefficients,
    rng: &mut R,
) -> Result<Vec<AgentState>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .quoting(false)
        .trim(csv::Trim::All)
        .from_reader(input);

    let headers = reader.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::InvalidSpec("population csv is empty".into()));
    }
    let mut column_of = [usize::MAX; 9];
    for (col, name) in headers.iter().enumerate() {
        let Some(slot) = ATTRIBUTE_NAMES.iter().position(|n| *n == name) else {
            return Err(Error::CsvSchema(format!("unexpected column `{name}`")));
        };
        if column_of[slot] != usize::MAX {
            return Err(Error::CsvSchema(format!("duplicate column `{name}`")));
        }
        column_of[slot] = col;
    }
    if let Some(missing) = column_of.iter().position(|c| *c == usize::MAX) {
        return Err(Error::CsvSchema(format!(
            "missing column `{}`",
            ATTRIBUTE_NAMES[missing]
        )));
    }

    let mut agents = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        if record.len() != headers.len() {
            return Err(Error::CsvSchema(format!(
                "row {row} has {} fields, expected {}",
                record.len(),
                headers.len()
            )));
        }
        let mut values = [0.0; 9];
        for (slot, name) in ATTRIBUTE_NAMES.iter().enumerate() {
            let raw = &record[column_of[slot]];
            let cell_err = |message: String| Error::CsvValue {
                row,
                column: name.to_string(),
                message,
            };
            let v: f64 = raw
                .parse()
                .map_err(|_| cell_err(format!("cannot parse `{raw}` as a number")))?;
            if !(0.0..=1.0).contains(&v) {
                return Err(cell_err(format!("value {v} is outside [0, 1]")));
            }
            if slot == 0 && v != 0.0 && v != 1.0 {
                return Err(cell_err(format!("sex must be 0 or 1, got {v}")));
            }
            values[slot] = v;
        }
        let sus = sample_susceptibilities(susceptibility_range, rng);
        agents.push(AgentState::new(
            agents.len(),
            AgentAttributes::from_array(values),
            sus,
            coeffs,
        ));
    }
    if agents.is_empty() {
        return Err(Error::InvalidSpec("population csv has no rows".into()));
    }
    Ok(agents)
}

/// Inner-circle cliques plus directed acquaintance edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialGraph {
    inner: Vec<Vec<usize>>,
    outer: Vec<Vec<usize>>,
    contacts: Vec<Vec<usize>>,
}

impl SocialGraph {
    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    pub fn inner(&self, agent: usize) -> &[usize] {
        &self.inner[agent]
    }

    pub fn outer(&self, agent: usize) -> &[usize] {
        &self.outer[agent]
    }

    /// Inner circle followed by acquaintances.
    pub fn contacts(&self, agent: usize) -> &[usize] {
        &self.contacts[agent]
    }

    pub fn clique_of(agent: usize) -> usize {
        agent / CLIQUE_SIZE
    }
}

/// Builds the graph with [`DEFAULT_ACQUAINTANCES`] acquaintances per agent.
pub fn build_graph<R: Rng + ?Sized>(n_agents: usize, rng: &mut R) -> Result<SocialGraph> {
    build_graph_with(n_agents, DEFAULT_ACQUAINTANCES, rng)
}

/// Partitions ids consecutively into cliques of six, then gives every agent
/// `acquaintances` distinct contacts drawn uniformly from outside its clique.
pub fn build_graph_with<R: Rng + ?Sized>(
    n_agents: usize,
    acquaintances: usize,
    rng: &mut R,
) -> Result<SocialGraph> {
    check_clique_tiling(n_agents)?;
    let candidates = n_agents - CLIQUE_SIZE;
    if candidates < acquaintances {
        return Err(Error::InvalidSpec(format!(
            "{n_agents} agents leave {candidates} acquaintance candidates, \
             {acquaintances} required (need at least {} agents)",
            acquaintances + CLIQUE_SIZE
        )));
    }

    let mut inner = Vec::with_capacity(n_agents);
    let mut outer = Vec::with_capacity(n_agents);
    let mut contacts = Vec::with_capacity(n_agents);
    for agent in 0..n_agents {
        let start = SocialGraph::clique_of(agent) * CLIQUE_SIZE;
        let friends: Vec<usize> = (start..start + CLIQUE_SIZE).filter(|&j| j != agent).collect();
        let acq: Vec<usize> = index::sample(rng, candidates, acquaintances)
            .into_iter()
            .map(|k| if k < start { k } else { k + CLIQUE_SIZE })
            .collect();
        let mut all = friends.clone();
        all.extend_from_slice(&acq);
        inner.push(friends);
        outer.push(acq);
        contacts.push(all);
    }
    Ok(SocialGraph {
        inner,
        outer,
        contacts,
    })
}

/// Draws today's conversation partners: `10 ± a` contacts with `a`
/// uniform in `1..=4` and the sign uniform, sampled without replacement.
/// The count is capped at the number of contacts the agent has.
pub fn sample_daily_contacts<R: Rng + ?Sized>(
    agent: usize,
    graph: &SocialGraph,
    rng: &mut R,
) -> Vec<usize> {
    let contacts = graph.contacts(agent);
    let a = rng.random_range(1..=DAILY_SPREAD);
    let count = if rng.random::<bool>() {
        DAILY_CONTACTS + a
    } else {
        DAILY_CONTACTS - a
    };
    let count = count.min(contacts.len());
    index::sample(rng, contacts.len(), count)
        .into_iter()
        .map(|k| contacts[k])
        .collect()
}
