//! The shipped scenario catalog.
//!
//! Each preset is a base scenario plus at most one grid axis. Everything not
//! listed uses the defaults, seed 42 and 500 ticks.

use crate::scenario::{GridAxis, ScenarioConfig, SweepKey};

pub const PRESET_NAMES: [&str; 13] = [
    "A1", "A2", "A3", "B1", "B2", "B3", "B4", "B5", "C1", "C2", "C3", "C4", "C5",
];

/// Tick at which the halted-campaign presets stop government activity.
pub const HALT_TICK: u64 = 250;

const BETAS: [f64; 5] = [-0.30, -0.15, 0.0, 0.15, 0.30];
const ZETAS: [f64; 5] = [0.5, 0.8, 1.0, 1.2, 1.5];
const LEVELS: [f64; 3] = [0.1, 0.3, 0.5];

struct Spec {
    delta: f64,
    tau: Option<f64>,
    sigma: f64,
    beta: f64,
    zeta: Option<f64>,
    stop: Option<u64>,
    axis: Option<(SweepKey, &'static [f64])>,
}

const fn spec(delta: f64, tau: Option<f64>, sigma: f64, zeta: Option<f64>) -> Spec {
    Spec {
        delta,
        tau,
        sigma,
        beta: 0.0,
        zeta,
        stop: None,
        axis: None,
    }
}

fn lookup(name: &str) -> Option<Spec> {
    use SweepKey::*;
    let s = match name {
        "A1" => Spec { axis: Some((Delta, &LEVELS)), ..spec(0.1, None, 0.1, None) },
        "A2" | "A3" => Spec { axis: Some((Delta, &LEVELS)), ..spec(0.1, Some(0.15), 0.1, None) },
        "B1" => Spec { axis: Some((Sigma, &LEVELS)), ..spec(0.1, None, 0.1, None) },
        "B2" => Spec { axis: Some((Beta, &BETAS)), ..spec(0.1, None, 0.1, None) },
        "B3" => Spec { axis: Some((Beta, &[-0.15, 0.15])), ..spec(0.4, None, 0.4, None) },
        "B4" => Spec { axis: Some((Sigma, &LEVELS)), ..spec(0.4, Some(0.15), 0.1, None) },
        "B5" => Spec { axis: Some((Beta, &BETAS)), ..spec(0.1, Some(0.15), 0.35, None) },
        "C1" => Spec { axis: Some((Zeta, &ZETAS)), ..spec(0.4, None, 0.1, Some(0.5)) },
        "C2" => Spec { axis: Some((Zeta, &ZETAS)), ..spec(0.4, Some(0.15), 0.1, Some(0.5)) },
        "C3" => Spec {
            axis: Some((Beta, &[-0.30, 0.0, 0.30])),
            ..spec(0.4, Some(0.15), 0.4, Some(1.2))
        },
        "C4" => Spec {
            axis: Some((Tau, &[0.10, 0.20, 0.30])),
            stop: Some(HALT_TICK),
            ..spec(0.4, Some(0.10), 0.1, Some(1.2))
        },
        "C5" => Spec {
            axis: Some((Beta, &[-0.30, 0.30])),
            stop: Some(HALT_TICK),
            ..spec(0.4, Some(0.15), 0.1, Some(1.2))
        },
        _ => return None,
    };
    Some(s)
}

/// The scenario for a catalog name, or `None` if there is no such preset.
pub fn preset(name: &str) -> Option<ScenarioConfig> {
    let s = lookup(name)?;
    let mut scenario = ScenarioConfig::default();
    let k = &mut scenario.kernels;
    k.delta = s.delta;
    k.tau = s.tau;
    k.sigma = s.sigma;
    k.beta = s.beta;
    k.zeta = s.zeta;
    scenario.engine.campaign_stop_tick = s.stop;
    if let Some((key, values)) = s.axis {
        // base value mirrors the first grid entry
        key.apply(&mut scenario.kernels, values[0]);
        scenario.set_axis(GridAxis::new(key, values.to_vec()));
    }
    Some(scenario)
}

/// One-line summary for `preset --list`.
pub fn describe(name: &str) -> Option<&'static str> {
    Some(match name {
        "A1" => "communication levels, non-polarized",
        "A2" => "communication levels, polarized (tau 0.15)",
        "A3" => "communication levels, polarized (tau 0.15), tolerance study",
        "B1" => "social media exposure, non-polarized",
        "B2" => "social media bias, non-polarized",
        "B3" => "social media bias with high communication and exposure",
        "B4" => "social media exposure, polarized",
        "B5" => "social media bias, polarized",
        "C1" => "government stance, non-polarized",
        "C2" => "government stance, polarized",
        "C3" => "social media bias under a pro-sustainability state",
        "C4" => "campaign halted at tick 250, tolerance levels",
        "C5" => "campaign halted at tick 250, social media bias",
        _ => return None,
    })
}
