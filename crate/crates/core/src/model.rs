//! Agent schema and the purchase-probability decision rule.

use std::fmt;
use std::str::FromStr;

/// Lower bound applied to the regression output.
pub const MIN_PURCHASE_PROB: f64 = 0.01;
/// Upper bound applied to the regression output.
pub const MAX_PURCHASE_PROB: f64 = 0.99;

/// Names of the nine attribute columns, in regression order.
pub const ATTRIBUTE_NAMES: [&str; 9] = [
    "sex", "age", "env", "exp", "wca", "know", "trust", "access", "freq",
];

/// Age brackets used by the synthetic population, youngest first.
pub const AGE_BRACKETS: [f64; 6] = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];

/// One agent's survey-derived attribute vector. Every field lies in `[0, 1]`.
///
/// `sex` is encoded 0 = male, 1 = female. `age` is one of [`AGE_BRACKETS`].
/// Only `env`, `wca`, `know` and `trust` change during a run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AgentAttributes {
    pub sex: f64,
    pub age: f64,
    pub env: f64,
    pub exp: f64,
    pub wca: f64,
    pub know: f64,
    pub trust: f64,
    pub access: f64,
    pub freq: f64,
}

impl AgentAttributes {
    /// All nine fields set to `value`.
    pub fn uniform(value: f64) -> Self {
        Self::from_array([value; 9])
    }

    pub fn from_array(v: [f64; 9]) -> Self {
        Self {
            sex: v[0],
            age: v[1],
            env: v[2],
            exp: v[3],
            wca: v[4],
            know: v[5],
            trust: v[6],
            access: v[7],
            freq: v[8],
        }
    }

    pub fn to_array(&self) -> [f64; 9] {
        [
            self.sex,
            self.age,
            self.env,
            self.exp,
            self.wca,
            self.know,
            self.trust,
            self.access,
            self.freq,
        ]
    }

    pub fn get(&self, topic: Topic) -> f64 {
        match topic {
            Topic::Env => self.env,
            Topic::Wca => self.wca,
            Topic::Know => self.know,
            Topic::Trust => self.trust,
        }
    }

    /// Writes `value` into the topic's field, clamped to `[0, 1]`.
    pub fn set(&mut self, topic: Topic, value: f64) {
        let value = value.clamp(0.0, 1.0);
        match topic {
            Topic::Env => self.env = value,
            Topic::Wca => self.wca = value,
            Topic::Know => self.know = value,
            Topic::Trust => self.trust = value,
        }
    }

    pub fn in_unit_range(&self) -> bool {
        self.to_array().iter().all(|v| (0.0..=1.0).contains(v))
    }
}

/// The attributes an influence mechanism may change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Topic {
    Env,
    Wca,
    Know,
    Trust,
}

impl Topic {
    /// Topics open to peer and social-media influence.
    pub const SOCIAL: [Topic; 3] = [Topic::Env, Topic::Wca, Topic::Know];
    /// Topics a government campaign can target.
    pub const CAMPAIGN: [Topic; 4] = [Topic::Env, Topic::Wca, Topic::Know, Topic::Trust];

    pub fn name(self) -> &'static str {
        match self {
            Topic::Env => "env",
            Topic::Wca => "wca",
            Topic::Know => "know",
            Topic::Trust => "trust",
        }
    }
}

impl fmt::Display for Topic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Topic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "env" => Ok(Topic::Env),
            "wca" => Ok(Topic::Wca),
            "know" => Ok(Topic::Know),
            "trust" => Ok(Topic::Trust),
            other => Err(format!("unknown topic `{other}`")),
        }
    }
}

/// Per-mechanism openness to influence.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Susceptibilities {
    /// Peer pressure. Constant for the agent's lifetime.
    pub s_pp: f64,
    /// Social media. Constant for the agent's lifetime.
    pub s_sm: f64,
    /// Government campaigns. Decays through campaign fatigue.
    pub s_gov: f64,
}

/// Coefficients of the linear purchase-probability model, intercept first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionCoefficients {
    pub intercept: f64,
    /// Slopes for the nine attributes, in [`ATTRIBUTE_NAMES`] order.
    pub slopes: [f64; 9],
}

impl RegressionCoefficients {
    /// Fitted values from the Spanish consumer survey.
    pub const SURVEY: RegressionCoefficients = RegressionCoefficients {
        intercept: 0.7450,
        slopes: [
            -0.0101, // sex
            0.0200,  // age
            -0.0179, // env
            -0.0488, // exp
            -0.1783, // wca
            -0.1414, // know
            0.0320,  // trust
            0.0360,  // access
            0.2181,  // freq
        ],
    };

    /// Unclamped linear predictor.
    pub fn linear(&self, attrs: &AgentAttributes) -> f64 {
        attrs
            .to_array()
            .iter()
            .zip(self.slopes.iter())
            .fold(self.intercept, |acc, (a, b)| acc + b * a)
    }
}

impl Default for RegressionCoefficients {
    fn default() -> Self {
        Self::SURVEY
    }
}

/// Probability of buying fast fashion, clamped to
/// `[MIN_PURCHASE_PROB, MAX_PURCHASE_PROB]`.
pub fn purchase_probability(attrs: &AgentAttributes, coeffs: &RegressionCoefficients) -> f64 {
    coeffs
        .linear(attrs)
        .clamp(MIN_PURCHASE_PROB, MAX_PURCHASE_PROB)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub id: usize,
    pub attributes: AgentAttributes,
    pub susceptibilities: Susceptibilities,
    /// Cached output of [`purchase_probability`].
    pub purchase_prob: f64,
}

impl AgentState {
    pub fn new(
        id: usize,
        attributes: AgentAttributes,
        susceptibilities: Susceptibilities,
        coeffs: &RegressionCoefficients,
    ) -> Self {
        Self {
            id,
            attributes,
            susceptibilities,
            purchase_prob: purchase_probability(&attributes, coeffs),
        }
    }

    pub fn refresh_purchase_prob(&mut self, coeffs: &RegressionCoefficients) {
        self.purchase_prob = purchase_probability(&self.attributes, coeffs);
    }

    /// Observable sustainable behaviour, see [`behavior_proxy`].
    pub fn behavior(&self) -> f64 {
        behavior_proxy(self.purchase_prob)
    }
}

/// Sustainable-behaviour level peers observe: the complement of the
/// purchase probability, on the same polarity as the concern attributes.
pub fn behavior_proxy(purchase_prob: f64) -> f64 {
    1.0 - purchase_prob
}
