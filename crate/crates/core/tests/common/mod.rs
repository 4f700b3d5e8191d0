//! Independent reference formulas shared by the integration tests. Written
//! from the model description, not from the library code.

#![allow(dead_code, clippy::manual_clamp)]

pub const SURVEY: [f64; 10] = [
    0.7450, -0.0101, 0.0200, -0.0179, -0.0488, -0.1783, -0.1414, 0.0320, 0.0360, 0.2181,
];

/// `|a - b| <= tol * max(|a|, |b|)`, with equal values always passing.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

pub fn purchase(attrs: &[f64; 9]) -> f64 {
    // summed back to front on purpose
    let mut p = 0.0;
    for i in (0..9).rev() {
        p += SURVEY[i + 1] * attrs[i];
    }
    p += SURVEY[0];
    if p < 0.01 {
        0.01
    } else if p > 0.99 {
        0.99
    } else {
        p
    }
}

/// Peers as (opinion, behavior, s_pp).
pub fn peer(own: f64, s: f64, peers: &[(f64, f64, f64)], tau: Option<f64>) -> f64 {
    let heard: Vec<(f64, f64)> = peers
        .iter()
        .filter(|p| p.2 < s)
        .map(|&(o, b, _)| match tau {
            Some(t) if (o - own).abs() > t => (1.0 - o, 1.0 - b),
            _ => (o, b),
        })
        .collect();
    if heard.is_empty() {
        return own;
    }
    let k = heard.len() as f64;
    let total: f64 = heard.iter().map(|(o, b)| o / 3.0 + 2.0 * b / 3.0).sum();
    let v = own - s * own + s * total / k;
    v.max(0.0).min(1.0)
}

/// The cubic written around its inflection point: b (x - 1/2)^3 + 1/2 + beta.
pub fn sm_raw(x: f64, s_sm: f64, beta: f64) -> f64 {
    let b = 50.0 * s_sm;
    b * (x - 0.5).powi(3) + 0.5 + beta
}

pub fn sm(x: f64, s_sm: f64, beta: f64) -> f64 {
    let raw = sm_raw(x, s_sm, beta);
    if raw > 1.0 {
        0.95
    } else if raw < 0.0 {
        0.05
    } else {
        raw
    }
}

pub fn blend(prior: f64, promoted: f64, s: f64, gamma: f64) -> f64 {
    if s >= 1.0 {
        return promoted;
    }
    if s <= 0.0 || promoted == prior {
        return prior;
    }
    let g = if gamma * (1.0 - s) > 1.0 { 1.0 / (1.0 - s) } else { gamma };
    let d = promoted - prior;
    let v = prior + s * d / (g * (1.0 - s) * d.abs()).exp();
    v.max(0.0).min(1.0)
}

pub fn gov(mean: f64, zeta: f64) -> f64 {
    (mean * zeta).max(0.05).min(0.95)
}

pub fn fatigue(s: f64, tick: u64, rate: f64) -> f64 {
    let weeks = (tick - tick % 7) / 7;
    s / (rate * weeks as f64).exp()
}

use fashion_abm::influence::{self, PeerTerm};
use fashion_abm::model::{purchase_probability, AgentAttributes};
use fashion_abm::RegressionCoefficients;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Compares every kernel against the formulas above on `n` random inputs
/// each and returns a description of each disagreement.
pub fn kernel_mismatches(n: usize, seed: u64, tol: f64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    let mut check = |name: &str, got: f64, want: f64, input: String| {
        if !rel_close(got, want, tol) {
            bad.push(format!("{name}({input}): got {got}, oracle {want}"));
        }
    };
    for _ in 0..n {
        let mut a = [0.0; 9];
        for v in a.iter_mut() {
            *v = rng.random::<f64>();
        }
        a[0] = rng.random_range(0..2) as f64;
        a[1] = rng.random_range(0..6) as f64 / 5.0;
        let got = purchase_probability(&AgentAttributes::from_array(a), &RegressionCoefficients::SURVEY);
        check("purchase_probability", got, purchase(&a), format!("{a:?}"));

        let own = rng.random::<f64>();
        let s = rng.random::<f64>();
        let k = rng.random_range(0..16);
        let peers: Vec<(f64, f64, f64)> = (0..k)
            .map(|_| (rng.random(), rng.random(), rng.random()))
            .collect();
        let terms: Vec<PeerTerm> = peers
            .iter()
            .map(|&(opinion, behavior, s_pp)| PeerTerm { opinion, behavior, s_pp })
            .collect();
        let tau = rng.random_bool(0.5).then(|| rng.random_range(0.05..=0.5));
        check(
            "peer_update",
            influence::peer_update(own, s, &terms, tau),
            peer(own, s, &peers, tau),
            format!("{own}, {s}, {peers:?}, {tau:?}"),
        );

        let x = rng.random::<f64>();
        let s_sm = rng.random::<f64>();
        let beta = rng.random_range(-0.3..=0.3);
        check("sm_feedback", influence::sm_feedback(x, s_sm, beta), sm(x, s_sm, beta), format!("{x}, {s_sm}, {beta}"));

        let (p, q, sb) = (rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>());
        let gamma = rng.random_range(0.0..5.0);
        check("blend", influence::blend(p, q, sb, gamma), blend(p, q, sb, gamma), format!("{p}, {q}, {sb}, {gamma}"));

        let (m, z) = (rng.random::<f64>(), rng.random_range(0.5..=1.5));
        check("gov_feedback", influence::gov_feedback(m, z), gov(m, z), format!("{m}, {z}"));

        let (sg, t, r) = (rng.random::<f64>(), rng.random_range(0..1000u64), rng.random_range(0.0..0.01));
        check("fatigue_step", influence::fatigue_step(sg, t, r), fatigue(sg, t, r), format!("{sg}, {t}, {r}"));
    }

    // the hand-worked examples
    let mut fixed = |name: &str, got: f64, want: f64| {
        if !rel_close(got, want, tol) {
            bad.push(format!("{name}: got {got}, expected {want}"));
        }
    };
    let one = [PeerTerm { opinion: 0.8, behavior: 0.6, s_pp: 0.1 }];
    fixed("peer 0.4/0.5 example", influence::peer_update(0.4, 0.5, &one, None), 0.5 * 0.4 + 0.5 * (0.8 / 3.0 + 1.2 / 3.0));
    fixed("sm midpoint", influence::sm_feedback(0.5, 0.73, 0.0), 0.5);
    fixed("sm raw at 1", influence::sm_feedback_raw(1.0, 0.5, 0.0), 3.625);
    fixed("sm cap high", influence::sm_feedback(1.0, 0.5, 0.0), 0.95);
    fixed("sm raw at 0", influence::sm_feedback_raw(0.0, 0.1, 0.0), -0.125);
    fixed("sm cap low", influence::sm_feedback(0.0, 0.1, 0.0), 0.05);
    fixed("gov cap high", influence::gov_feedback(0.80, 1.5), 0.95);
    fixed("gov cap low", influence::gov_feedback(0.06, 0.5), 0.05);
    fixed("fatigue week 10", influence::fatigue_step(0.8, 70, 0.00125), 0.8 * (-0.0125f64).exp());
    bad
}
