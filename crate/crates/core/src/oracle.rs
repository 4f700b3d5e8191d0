//! Straight-line reference implementation of the tick loop.
//!
//! Written as one function with every formula inlined and no calls into the
//! influence, population or engine modules, so that it can cross-check
//! [`crate::engine::Simulation`] tick by tick. It consumes random numbers
//! from the same labelled streams in the same order, so for identical inputs
//! the two must agree bit for bit.

use rand::seq::index;
use rand::Rng;

use crate::engine::{initialize, Simulation};
use crate::error::Result;
use crate::influence::KernelParams;
use crate::model::{AgentState, RegressionCoefficients};
use crate::population::SocialGraph;
use crate::rng::{stream, StreamLabel};
use crate::scenario::{EngineConfig, ScenarioConfig};

/// A small scenario that exercises every phase: polarized peers, media
/// and a government campaign. `n_agents` must be a multiple of 6 and at
/// least 12.
pub fn check_scenario(n_agents: usize, ticks: u64, seed: u64) -> ScenarioConfig {
    let mut s = ScenarioConfig::default();
    s.population.n_agents = n_agents;
    s.population.acquaintances = 6;
    s.kernels.delta = 0.4;
    s.kernels.tau = Some(0.15);
    s.kernels.sigma = 0.3;
    s.kernels.beta = 0.1;
    s.kernels.zeta = Some(1.2);
    s.engine.ticks = ticks;
    s.engine.seed = seed;
    s
}

/// Runs the engine and the reference side by side from the same initial
/// state. Returns the first (tick, agent) where they differ, if any.
pub fn compare_with_engine(scenario: &ScenarioConfig) -> Result<Option<(usize, usize)>> {
    scenario.validate()?;
    let (agents, graph) = initialize(scenario)?;
    let reference = reference_trace(
        &agents,
        &graph,
        &scenario.kernels,
        &scenario.engine,
        &scenario.coefficients,
    );
    let mut sim = Simulation::from_parts(
        agents,
        graph,
        scenario.kernels,
        scenario.engine,
        scenario.coefficients,
    )?;
    let mut trace = Vec::with_capacity(reference.len());
    while sim.step() {
        trace.push(sim.agents().to_vec());
    }
    Ok(first_divergence(&trace, &reference))
}

/// Agent states after each of the first `engine.ticks` ticks.
pub fn reference_trace(
    initial: &[AgentState],
    graph: &SocialGraph,
    k: &KernelParams,
    engine: &EngineConfig,
    coeffs: &RegressionCoefficients,
) -> Vec<Vec<AgentState>> {
    let n = initial.len();
    let seed = engine.seed;
    let mut state: Vec<AgentState> = initial.to_vec();
    let mut trace = Vec::with_capacity(engine.ticks as usize);

    // attribute slots: 0 env, 1 wca, 2 know, 3 trust
    fn get(a: &AgentState, slot: usize) -> f64 {
        [a.attributes.env, a.attributes.wca, a.attributes.know, a.attributes.trust][slot]
    }
    fn put(a: &mut AgentState, slot: usize, v: f64) {
        let v = v.clamp(0.0, 1.0);
        match slot {
            0 => a.attributes.env = v,
            1 => a.attributes.wca = v,
            2 => a.attributes.know = v,
            _ => a.attributes.trust = v,
        }
    }
    fn damped(prior: f64, target: f64, s: f64, gamma: f64) -> f64 {
        if s >= 1.0 {
            return target.clamp(0.0, 1.0);
        }
        let d = target - prior;
        if d == 0.0 || s <= 0.0 {
            return prior;
        }
        let g = if 1.0 - s <= 0.0 { gamma } else { gamma.min(1.0 / (1.0 - s)) };
        (prior + s * d * (-g * (1.0 - s) * d.abs()).exp()).clamp(0.0, 1.0)
    }

    for t in 0..engine.ticks {
        // 1. campaign topic
        let topic = stream(seed, StreamLabel::Campaign, t).random_range(0..4usize);

        // 2. peers, synchronous against the tick-start state
        if !engine.disable_peer {
            let before = state.clone();
            let mut rng = stream(seed, StreamLabel::Peer, t);
            let p_talk = (2.0 * k.delta).min(1.0);
            for i in 0..n {
                if rng.random::<f64>() >= p_talk {
                    continue;
                }
                let mine = graph.contacts(i);
                let a = rng.random_range(1..=4usize);
                let want = if rng.random::<bool>() { 10 + a } else { 10 - a };
                let want = want.min(mine.len());
                let talked: Vec<usize> = index::sample(&mut rng, mine.len(), want)
                    .into_iter()
                    .map(|x| mine[x])
                    .collect();
                let s_me = before[i].susceptibilities.s_pp;
                for slot in 0..3 {
                    let own = get(&before[i], slot);
                    let mut total = 0.0;
                    let mut heard = 0usize;
                    for &j in &talked {
                        if before[j].susceptibilities.s_pp >= s_me {
                            continue;
                        }
                        let mut o = get(&before[j], slot);
                        let mut b = 1.0 - before[j].purchase_prob;
                        if let Some(tau) = k.tau {
                            if (o - own).abs() > tau {
                                o = 1.0 - o;
                                b = 1.0 - b;
                            }
                        }
                        total += (1.0 / 3.0) * o + (2.0 / 3.0) * b;
                        heard += 1;
                    }
                    let next = if heard == 0 {
                        own
                    } else {
                        ((1.0 - s_me) * own + (s_me / heard as f64) * total).clamp(0.0, 1.0)
                    };
                    put(&mut state[i], slot, next);
                }
            }
        }

        // 3. social media
        if !engine.disable_media {
            let mut rng = stream(seed, StreamLabel::Media, t);
            let count = (((2.0 * k.sigma).min(1.0) * n as f64).round() as usize).min(n);
            for i in index::sample(&mut rng, n, count) {
                let s = state[i].susceptibilities.s_sm;
                let b = 50.0 * s;
                for slot in 0..3 {
                    let x = get(&state[i], slot);
                    let raw =
                        b * x * x * x - 1.5 * b * x * x + 0.75 * b * x + (0.5 - b / 8.0) + k.beta;
                    let fed = if raw > 1.0 {
                        0.95
                    } else if raw < 0.0 {
                        0.05
                    } else {
                        raw
                    };
                    let v = damped(x, fed, s, k.blend_gamma);
                    put(&mut state[i], slot, v);
                }
            }
        }

        // 4. government
        let running = engine.campaign_stop_tick.is_none_or(|stop| t < stop);
        if let (Some(zeta), false, true) = (k.zeta, engine.disable_gov, running) {
            let mut rng = stream(seed, StreamLabel::Government, t);
            let avg = state.iter().map(|a| get(a, topic)).sum::<f64>() / n as f64;
            let pushed = (zeta * avg).clamp(0.05, 0.95);
            for agent in state.iter_mut() {
                if rng.random::<f64>() < k.gov_exposure_prob {
                    let x = get(agent, topic);
                    let v = damped(x, pushed, agent.susceptibilities.s_gov, k.blend_gamma);
                    put(agent, topic, v);
                }
            }
            let weeks = (t / 7) as f64;
            for agent in state.iter_mut() {
                agent.susceptibilities.s_gov *= (-k.fatigue_rate * weeks).exp();
            }
        }

        // 5. decisions
        for agent in state.iter_mut() {
            let x = agent.attributes.to_array();
            let mut p = coeffs.intercept;
            for (b, v) in coeffs.slopes.iter().zip(x.iter()) {
                p += b * v;
            }
            agent.purchase_prob = p.clamp(0.01, 0.99);
        }

        trace.push(state.clone());
    }
    trace
}

/// First tick (1-based) and agent id where two traces differ.
pub fn first_divergence(a: &[Vec<AgentState>], b: &[Vec<AgentState>]) -> Option<(usize, usize)> {
    if a.len() != b.len() {
        return Some((a.len().min(b.len()) + 1, 0));
    }
    for (t, (sa, sb)) in a.iter().zip(b).enumerate() {
        for (i, (x, y)) in sa.iter().zip(sb).enumerate() {
            if !bit_identical(x, y) {
                return Some((t + 1, i));
            }
        }
    }
    None
}

fn bit_identical(x: &AgentState, y: &AgentState) -> bool {
    let fx = flatten(x);
    let fy = flatten(y);
    x.id == y.id && fx.iter().zip(fy.iter()).all(|(a, b)| a.to_bits() == b.to_bits())
}

fn flatten(a: &AgentState) -> [f64; 13] {
    let v = a.attributes.to_array();
    let s = a.susceptibilities;
    [
        v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], s.s_pp, s.s_sm, s.s_gov,
        a.purchase_prob,
    ]
}
