//! Complete run specifications and parameter grids.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_range, Error, Result};
use crate::influence::{KernelParams, BETA_RANGE, DELTA_RANGE, SIGMA_RANGE, TAU_RANGE, ZETA_RANGE};
use crate::model::RegressionCoefficients;
use crate::population::PopulationSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub ticks: u64,
    /// Campaigns (and fatigue) run only on ticks `t < campaign_stop_tick`.
    pub campaign_stop_tick: Option<u64>,
    pub seed: u64,
    /// Metrics are recorded at tick 0 and every `record_every` ticks after.
    pub record_every: u64,
    pub disable_peer: bool,
    pub disable_media: bool,
    pub disable_gov: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            ticks: 500,
            campaign_stop_tick: None,
            seed: 42,
            record_every: 1,
            disable_peer: false,
            disable_media: false,
            disable_gov: false,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.record_every == 0 {
            return Err(Error::InvalidSpec("engine.record_every must be positive".into()));
        }
        if let Some(stop) = self.campaign_stop_tick {
            if stop > self.ticks {
                return Err(Error::InvalidSpec(format!(
                    "engine.campaign_stop_tick ({stop}) exceeds engine.ticks ({})",
                    self.ticks
                )));
            }
        }
        Ok(())
    }
}

/// Output artefacts a run may emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutputKind {
    TimeseriesCsv,
    FinalSnapshotCsv,
    HistogramCsv,
    SvgLines,
    SvgHistogram,
}

impl OutputKind {
    pub const ALL: [OutputKind; 5] = [
        OutputKind::TimeseriesCsv,
        OutputKind::FinalSnapshotCsv,
        OutputKind::HistogramCsv,
        OutputKind::SvgLines,
        OutputKind::SvgHistogram,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OutputKind::TimeseriesCsv => "timeseries_csv",
            OutputKind::FinalSnapshotCsv => "final_snapshot_csv",
            OutputKind::HistogramCsv => "histogram_csv",
            OutputKind::SvgLines => "svg_lines",
            OutputKind::SvgHistogram => "svg_histogram",
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            OutputKind::TimeseriesCsv => "timeseries.csv",
            OutputKind::FinalSnapshotCsv => "final_snapshot.csv",
            OutputKind::HistogramCsv => "histogram.csv",
            OutputKind::SvgLines => "lines.svg",
            OutputKind::SvgHistogram => "histogram.svg",
        }
    }
}

impl FromStr for OutputKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OutputKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown output `{s}`"))
    }
}

/// A kernel parameter that can vary across sweep cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SweepKey {
    Delta,
    Tau,
    Sigma,
    Beta,
    Zeta,
    GovExposureProb,
    BlendGamma,
    FatigueRate,
}

impl SweepKey {
    pub const ALL: [SweepKey; 8] = [
        SweepKey::Delta,
        SweepKey::Tau,
        SweepKey::Sigma,
        SweepKey::Beta,
        SweepKey::Zeta,
        SweepKey::GovExposureProb,
        SweepKey::BlendGamma,
        SweepKey::FatigueRate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepKey::Delta => "delta",
            SweepKey::Tau => "tau",
            SweepKey::Sigma => "sigma",
            SweepKey::Beta => "beta",
            SweepKey::Zeta => "zeta",
            SweepKey::GovExposureProb => "gov_exposure_prob",
            SweepKey::BlendGamma => "blend_gamma",
            SweepKey::FatigueRate => "fatigue_rate",
        }
    }

    pub fn range(self) -> (f64, f64) {
        match self {
            SweepKey::Delta => DELTA_RANGE,
            SweepKey::Tau => TAU_RANGE,
            SweepKey::Sigma => SIGMA_RANGE,
            SweepKey::Beta => BETA_RANGE,
            SweepKey::Zeta => ZETA_RANGE,
            SweepKey::GovExposureProb => (0.0, 1.0),
            SweepKey::BlendGamma | SweepKey::FatigueRate => (0.0, f64::MAX),
        }
    }

    pub fn apply(self, kernels: &mut KernelParams, value: f64) {
        match self {
            SweepKey::Delta => kernels.delta = value,
            SweepKey::Tau => kernels.tau = Some(value),
            SweepKey::Sigma => kernels.sigma = value,
            SweepKey::Beta => kernels.beta = value,
            SweepKey::Zeta => kernels.zeta = Some(value),
            SweepKey::GovExposureProb => kernels.gov_exposure_prob = value,
            SweepKey::BlendGamma => kernels.blend_gamma = value,
            SweepKey::FatigueRate => kernels.fatigue_rate = value,
        }
    }
}

impl fmt::Display for SweepKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.strip_prefix("kernels.").unwrap_or(s);
        SweepKey::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("`{s}` is not a sweepable parameter"))
    }
}

/// One swept parameter and its values.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub key: SweepKey,
    pub values: Vec<f64>,
}

impl GridAxis {
    pub fn new(key: SweepKey, values: Vec<f64>) -> Self {
        Self { key, values }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config {
                key: format!("kernels.{}", self.key),
                message: "value list is empty".into(),
            });
        }
        let (min, max) = self.key.range();
        for &v in &self.values {
            check_range(&format!("kernels.{}", self.key), v, min, max)?;
        }
        Ok(())
    }
}

/// One point of a grid: the parameter values that define it.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub assignments: Vec<(SweepKey, f64)>,
    pub scenario: ScenarioConfig,
}

impl Cell {
    /// `delta=0.1;zeta=1.2`, or `base` for an ungridded scenario.
    pub fn label(&self) -> String {
        if self.assignments.is_empty() {
            return "base".into();
        }
        self.assignments
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Everything needed to run (or sweep) a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub population: PopulationSpec,
    pub kernels: KernelParams,
    pub coefficients: RegressionCoefficients,
    pub engine: EngineConfig,
    pub outputs: Vec<OutputKind>,
    /// Multi-valued parameters; the scenario is the cartesian product.
    pub grid: Vec<GridAxis>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            population: PopulationSpec::default(),
            kernels: KernelParams::default(),
            coefficients: RegressionCoefficients::SURVEY,
            engine: EngineConfig::default(),
            outputs: OutputKind::ALL.to_vec(),
            grid: Vec::new(),
        }
    }
}

impl ScenarioConfig {
    /// Validates the base scenario and every grid cell.
    pub fn validate(&self) -> Result<()> {
        self.population.validate()?;
        self.engine.validate()?;
        for axis in &self.grid {
            axis.validate()?;
        }
        for cell in self.cells() {
            cell.scenario.kernels.validate()?;
        }
        Ok(())
    }

    pub fn is_grid(&self) -> bool {
        !self.grid.is_empty()
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        let mut s = self.clone();
        s.engine.seed = seed;
        s
    }

    /// Replaces (or adds) a grid axis for `axis.key`.
    pub fn set_axis(&mut self, axis: GridAxis) {
        match self.grid.iter_mut().find(|a| a.key == axis.key) {
            Some(existing) => *existing = axis,
            None => self.grid.push(axis),
        }
    }

    /// Cartesian product of the grid, first axis varying slowest.
    pub fn cells(&self) -> Vec<Cell> {
        let mut base = self.clone();
        base.grid.clear();
        let mut cells = vec![Cell {
            assignments: Vec::new(),
            scenario: base,
        }];
        for axis in &self.grid {
            let mut next = Vec::with_capacity(cells.len() * axis.values.len());
            for cell in &cells {
                for &v in &axis.values {
                    let mut c = cell.clone();
                    axis.key.apply(&mut c.scenario.kernels, v);
                    c.assignments.push((axis.key, v));
                    next.push(c);
                }
            }
            cells = next;
        }
        cells
    }
}
