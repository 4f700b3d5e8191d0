//! The four influence kernels plus campaign fatigue.
//!
//! Every function here is pure: callers pass prior state in and write the
//! returned opinion wherever it belongs.

use crate::error::{check_range, Result};

/// Weight of a peer's stated opinion in its contribution.
pub const PEER_OPINION_WEIGHT: f64 = 1.0 / 3.0;
/// Weight of a peer's observed behaviour in its contribution.
pub const PEER_BEHAVIOR_WEIGHT: f64 = 2.0 / 3.0;
/// Scale factor mapping social-media susceptibility to the cubic gain.
pub const SM_GAIN_PER_SUSCEPTIBILITY: f64 = 50.0;
/// Replacement for social-media or government output above 1.
pub const FEEDBACK_CAP_HIGH: f64 = 0.95;
/// Replacement for social-media or government output below 0.
pub const FEEDBACK_CAP_LOW: f64 = 0.05;
/// Ticks per week for campaign fatigue.
pub const TICKS_PER_WEEK: u64 = 7;

pub const DELTA_RANGE: (f64, f64) = (0.05, 0.5);
pub const TAU_RANGE: (f64, f64) = (0.05, 0.5);
pub const SIGMA_RANGE: (f64, f64) = (0.05, 0.5);
pub const BETA_RANGE: (f64, f64) = (-0.30, 0.30);
pub const ZETA_RANGE: (f64, f64) = (0.5, 1.5);

/// Parameters shared by the influence kernels of one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    /// Communication threshold; agents engage in conversation with
    /// probability `2 * delta` per tick.
    pub delta: f64,
    /// Tolerance threshold. `None` selects the non-polarized peer rule.
    pub tau: Option<f64>,
    /// Social-media exposure; a fraction `2 * sigma` of agents is exposed.
    pub sigma: f64,
    /// Social-media bias, negative is pro-consumption.
    pub beta: f64,
    /// Government stance. `None` disables campaigns.
    pub zeta: Option<f64>,
    pub gov_exposure_prob: f64,
    pub blend_gamma: f64,
    pub fatigue_rate: f64,
}

impl Default for KernelParams {
    fn default() -> Self {
        Self {
            delta: 0.1,
            tau: None,
            sigma: 0.1,
            beta: 0.0,
            zeta: None,
            gov_exposure_prob: 0.5,
            blend_gamma: 2.0,
            fatigue_rate: 0.00125,
        }
    }
}

impl KernelParams {
    pub fn validate(&self) -> Result<()> {
        check_range("kernels.delta", self.delta, DELTA_RANGE.0, DELTA_RANGE.1)?;
        if let Some(tau) = self.tau {
            check_range("kernels.tau", tau, TAU_RANGE.0, TAU_RANGE.1)?;
        }
        check_range("kernels.sigma", self.sigma, SIGMA_RANGE.0, SIGMA_RANGE.1)?;
        check_range("kernels.beta", self.beta, BETA_RANGE.0, BETA_RANGE.1)?;
        if let Some(zeta) = self.zeta {
            check_range("kernels.zeta", zeta, ZETA_RANGE.0, ZETA_RANGE.1)?;
        }
        check_range("kernels.gov_exposure_prob", self.gov_exposure_prob, 0.0, 1.0)?;
        check_range("kernels.blend_gamma", self.blend_gamma, 0.0, f64::MAX)?;
        check_range("kernels.fatigue_rate", self.fatigue_rate, 0.0, f64::MAX)?;
        Ok(())
    }

    /// Per-tick probability that an agent talks to its contacts.
    pub fn engagement_prob(&self) -> f64 {
        (2.0 * self.delta).min(1.0)
    }

    /// Share of the population exposed to social media each tick.
    pub fn media_fraction(&self) -> f64 {
        (2.0 * self.sigma).min(1.0)
    }
}

/// One neighbour's view as seen from the start-of-tick snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeerTerm {
    pub opinion: f64,
    pub behavior: f64,
    pub s_pp: f64,
}

/// Opinion and behaviour terms a peer contributes. In polarized mode a peer
/// whose opinion lies farther than `tau` from `self_opinion` enters with
/// both terms reflected to `1 - value`.
pub fn peer_contribution(
    self_opinion: f64,
    opinion: f64,
    behavior: f64,
    tau: Option<f64>,
) -> (f64, f64) {
    match tau {
        Some(tau) if (opinion - self_opinion).abs() > tau => (1.0 - opinion, 1.0 - behavior),
        _ => (opinion, behavior),
    }
}

/// Peer-pressure update of one opinion.
///
/// Only peers strictly less susceptible than the agent are heard. With no
/// such peer the opinion is returned unchanged.
pub fn peer_update(self_opinion: f64, s_pp_self: f64, peers: &[PeerTerm], tau: Option<f64>) -> f64 {
    let mut heard = 0usize;
    let mut sum = 0.0;
    for peer in peers.iter().filter(|p| p.s_pp < s_pp_self) {
        let (o, b) = peer_contribution(self_opinion, peer.opinion, peer.behavior, tau);
        sum += PEER_OPINION_WEIGHT * o + PEER_BEHAVIOR_WEIGHT * b;
        heard += 1;
    }
    if heard == 0 {
        return self_opinion;
    }
    let updated = (1.0 - s_pp_self) * self_opinion + (s_pp_self / heard as f64) * sum;
    updated.clamp(0.0, 1.0)
}

/// Uncapped cubic feedback loop: the opinion a personalised feed promotes.
pub fn sm_feedback_raw(opinion: f64, s_sm: f64, beta: f64) -> f64 {
    let b = SM_GAIN_PER_SUSCEPTIBILITY * s_sm;
    let x = opinion;
    b * x * x * x - 1.5 * b * x * x + 0.75 * b * x + (0.5 - b / 8.0) + beta
}

/// [`sm_feedback_raw`] with outputs above 1 replaced by 0.95 and outputs
/// below 0 replaced by 0.05.
pub fn sm_feedback(opinion: f64, s_sm: f64, beta: f64) -> f64 {
    cap_feedback(sm_feedback_raw(opinion, s_sm, beta))
}

fn cap_feedback(raw: f64) -> f64 {
    if raw > 1.0 {
        FEEDBACK_CAP_HIGH
    } else if raw < 0.0 {
        FEEDBACK_CAP_LOW
    } else {
        raw
    }
}

/// Damping exponent actually applied by [`blend`]. Capped so that
/// `gamma_eff * (1 - S) <= 1`, which keeps the blend monotone in the
/// promoted opinion.
pub fn effective_gamma(susceptibility: f64, gamma: f64) -> f64 {
    let slack = 1.0 - susceptibility;
    if slack <= 0.0 {
        gamma
    } else {
        gamma.min(1.0 / slack)
    }
}

/// Moves `prior` toward `promoted` by a damped fraction `S` of the gap:
/// `prior + S * d * exp(-gamma_eff * (1 - S) * |d|)` with `d = promoted - prior`.
///
/// `S = 0` returns `prior`, `S = 1` returns `promoted`, and equal inputs
/// return `prior`, all exactly.
pub fn blend(prior: f64, promoted: f64, susceptibility: f64, gamma: f64) -> f64 {
    if susceptibility >= 1.0 {
        return promoted.clamp(0.0, 1.0);
    }
    let d = promoted - prior;
    if d == 0.0 || susceptibility <= 0.0 {
        return prior;
    }
    let damping = (-effective_gamma(susceptibility, gamma) * (1.0 - susceptibility) * d.abs()).exp();
    (prior + susceptibility * d * damping).clamp(0.0, 1.0)
}

/// Opinion a campaign promotes given the population mean, clamped to
/// `[0.05, 0.95]`.
pub fn gov_feedback(mean_opinion: f64, zeta: f64) -> f64 {
    (zeta * mean_opinion).clamp(FEEDBACK_CAP_LOW, FEEDBACK_CAP_HIGH)
}

/// Campaign fatigue for one tick: `s_gov * exp(-rate * floor(tick / 7))`.
pub fn fatigue_step(s_gov: f64, tick: u64, fatigue_rate: f64) -> f64 {
    let weeks = (tick / TICKS_PER_WEEK) as f64;
    s_gov * (-fatigue_rate * weeks).exp()
}
