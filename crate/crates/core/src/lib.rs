//! Agent-based simulation of fast-fashion purchasing behaviour.
//!
//! Agents carry survey-style attributes that feed a linear purchase
//! probability. Three mechanisms move their concerns over time: peer
//! pressure on a clique-plus-acquaintance network (optionally polarized),
//! a personalised social-media feedback loop, and government campaigns with
//! fatigue. Runs are fully determined by their configuration and seed.

pub mod engine;
pub mod config;
pub mod error;
pub mod influence;
pub mod model;
pub mod oracle;
pub mod output;
pub mod population;
pub mod presets;
pub mod rng;
pub mod scenario;
pub mod svg;

pub use engine::{run, run_sweep, MetricsSeries, RunOutput, Simulation, Tracked};
pub use error::{Error, Result};
pub use influence::KernelParams;
pub use model::{AgentAttributes, AgentState, RegressionCoefficients, Susceptibilities, Topic};
pub use population::{PopulationSpec, SocialGraph};
pub use scenario::{EngineConfig, GridAxis, OutputKind, ScenarioConfig, SweepKey};
pub use config::{parse_config, to_config_text};
