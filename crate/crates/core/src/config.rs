//! Scenario config files.
//!
//! The format is TOML with four sections. A `preset = "C4"` line at the top
//! starts from a catalog entry; any other key overrides it.
//!
//! ```toml
//! preset = "A1"
//! outputs = ["timeseries_csv", "final_snapshot_csv", "histogram_csv", "svg_lines", "svg_histogram"]
//!
//! [population]
//! n_agents = 1050
//! female_fraction = 0.8
//! young_fraction = 0.5
//! susceptibility_range = [0.1, 0.6]
//! acquaintances = 10
//! # csv = "survey.csv"          # omit for synthetic agents
//!
//! [population.distributions]     # Beta(alpha, beta) per attribute
//! env = [5.0, 2.0]
//!
//! [kernels]
//! delta = [0.1, 0.3, 0.5]        # a list makes a sweep axis
//! tau = "N/A"                    # absent or "N/A": non-polarized
//! sigma = 0.1
//! beta = 0.0
//! zeta = "N/A"                   # absent or "N/A": no government
//! gov_exposure_prob = 0.5
//! blend_gamma = 2.0
//! fatigue_rate = 0.00125
//!
//! [engine]
//! ticks = 500
//! campaign_stop_tick = 250
//! seed = 42                      # quote seeds above 2^63 - 1
//! record_every = 1
//! disable_peer = false
//! disable_media = false
//! disable_gov = false
//!
//! [coefficients]                 # b0 is the intercept, b1..b9 follow
//! b0 = 0.745
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;

use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::population::{AttributeDistributions, BetaSpec, PopulationSource};
use crate::presets;
use crate::scenario::{GridAxis, OutputKind, ScenarioConfig, SweepKey};

/// Marker accepted for an absent `tau` or `zeta`.
pub const NOT_APPLICABLE: &str = "N/A";

/// Parses and fully validates a config.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;

    let mut scenario = match table.get("preset") {
        None => ScenarioConfig::default(),
        Some(Value::String(name)) => presets::preset(name).ok_or_else(|| Error::Config {
            key: "preset".into(),
            message: format!("unknown preset `{name}` (try `preset --list`)"),
        })?,
        Some(_) => return Err(type_error("preset", "a string")),
    };

    for (key, value) in &table {
        match key.as_str() {
            "preset" => {}
            "outputs" => scenario.outputs = parse_outputs(value)?,
            "population" => apply_population(&mut scenario, section(key, value)?)?,
            "kernels" => apply_kernels(&mut scenario, section(key, value)?)?,
            "engine" => apply_engine(&mut scenario, section(key, value)?)?,
            "coefficients" => apply_coefficients(&mut scenario, section(key, value)?)?,
            other => return Err(unknown(other)),
        }
    }
    scenario.grid.sort_by_key(|a| a.key);
    scenario.validate()?;
    Ok(scenario)
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn unknown(key: &str) -> Error {
    Error::Config {
        key: key.into(),
        message: "unknown key".into(),
    }
}

fn type_error(key: &str, expected: &str) -> Error {
    Error::Config {
        key: key.into(),
        message: format!("expected {expected}"),
    }
}

fn section<'a>(key: &str, value: &'a Value) -> Result<&'a Table> {
    value.as_table().ok_or_else(|| type_error(key, "a table"))
}

fn float(key: &str, value: &Value) -> Result<f64> {
    match value {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(type_error(key, "a number")),
    }
}

fn uint(key: &str, value: &Value) -> Result<u64> {
    match value {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        _ => Err(type_error(key, "a non-negative integer")),
    }
}

fn boolean(key: &str, value: &Value) -> Result<bool> {
    value.as_bool().ok_or_else(|| type_error(key, "true or false"))
}

fn pair(key: &str, value: &Value) -> Result<(f64, f64)> {
    match value.as_array().map(Vec::as_slice) {
        Some([a, b]) => Ok((float(key, a)?, float(key, b)?)),
        _ => Err(type_error(key, "a two-element array")),
    }
}

fn parse_outputs(value: &Value) -> Result<Vec<OutputKind>> {
    let items = value
        .as_array()
        .ok_or_else(|| type_error("outputs", "an array of output names"))?;
    let mut kinds = Vec::new();
    for item in items {
        let name = item
            .as_str()
            .ok_or_else(|| type_error("outputs", "an array of output names"))?;
        let kind = name.parse::<OutputKind>().map_err(|message| Error::Config {
            key: "outputs".into(),
            message,
        })?;
        if !kinds.contains(&kind) {
            kinds.push(kind);
        }
    }
    Ok(kinds)
}

fn apply_population(s: &mut ScenarioConfig, table: &Table) -> Result<()> {
    let p = &mut s.population;
    for (key, value) in table {
        let full = format!("population.{key}");
        match key.as_str() {
            "n_agents" => p.n_agents = uint(&full, value)? as usize,
            "female_fraction" => p.female_fraction = float(&full, value)?,
            "young_fraction" => p.young_fraction = float(&full, value)?,
            "susceptibility_range" => p.susceptibility_range = pair(&full, value)?,
            "acquaintances" => p.acquaintances = uint(&full, value)? as usize,
            "csv" => {
                let path = value.as_str().ok_or_else(|| type_error(&full, "a path string"))?;
                p.source = PopulationSource::Csv(PathBuf::from(path));
            }
            "distributions" => {
                for (name, spec) in section(&full, value)? {
                    let dkey = format!("{full}.{name}");
                    let (alpha, beta) = pair(&dkey, spec)?;
                    *p.distributions.get_mut(name).ok_or_else(|| unknown(&dkey))? =
                        BetaSpec::new(alpha, beta);
                }
            }
            _ => return Err(unknown(&full)),
        }
    }
    Ok(())
}

fn apply_kernels(s: &mut ScenarioConfig, table: &Table) -> Result<()> {
    for (key, value) in table {
        let full = format!("kernels.{key}");
        let sweep_key: SweepKey = key.parse().map_err(|_| unknown(&full))?;
        match value {
            Value::Array(items) => {
                let values = items
                    .iter()
                    .map(|v| float(&full, v))
                    .collect::<Result<Vec<_>>>()?;
                match values.as_slice() {
                    [] => return Err(type_error(&full, "a non-empty list")),
                    [single] => {
                        s.grid.retain(|a| a.key != sweep_key);
                        sweep_key.apply(&mut s.kernels, *single);
                    }
                    _ => {
                        // the base value is irrelevant once a grid overrides it
                        sweep_key.apply(&mut s.kernels, values[0]);
                        s.set_axis(GridAxis::new(sweep_key, values));
                    }
                }
            }
            Value::String(text) if text == NOT_APPLICABLE => {
                s.grid.retain(|a| a.key != sweep_key);
                match sweep_key {
                    SweepKey::Tau => s.kernels.tau = None,
                    SweepKey::Zeta => s.kernels.zeta = None,
                    _ => return Err(type_error(&full, "a number or a list of numbers")),
                }
            }
            other => {
                let v = float(&full, other)?;
                s.grid.retain(|a| a.key != sweep_key);
                sweep_key.apply(&mut s.kernels, v);
            }
        }
    }
    Ok(())
}

fn apply_engine(s: &mut ScenarioConfig, table: &Table) -> Result<()> {
    let e = &mut s.engine;
    for (key, value) in table {
        let full = format!("engine.{key}");
        match key.as_str() {
            "ticks" => e.ticks = uint(&full, value)?,
            "campaign_stop_tick" => {
                e.campaign_stop_tick = match value {
                    Value::String(t) if t == NOT_APPLICABLE => None,
                    v => Some(uint(&full, v)?),
                }
            }
            "seed" => {
                e.seed = match value {
                    // TOML integers stop at i64::MAX
                    Value::String(t) => t.parse().map_err(|_| type_error(&full, "a u64 seed"))?,
                    v => uint(&full, v)?,
                }
            }
            "record_every" => e.record_every = uint(&full, value)?,
            "disable_peer" => e.disable_peer = boolean(&full, value)?,
            "disable_media" => e.disable_media = boolean(&full, value)?,
            "disable_gov" => e.disable_gov = boolean(&full, value)?,
            _ => return Err(unknown(&full)),
        }
    }
    Ok(())
}

fn apply_coefficients(s: &mut ScenarioConfig, table: &Table) -> Result<()> {
    for (key, value) in table {
        let full = format!("coefficients.{key}");
        let idx: usize = key
            .strip_prefix('b')
            .and_then(|d| d.parse().ok())
            .filter(|i| *i <= 9)
            .ok_or_else(|| unknown(&full))?;
        let v = float(&full, value)?;
        if idx == 0 {
            s.coefficients.intercept = v;
        } else {
            s.coefficients.slopes[idx - 1] = v;
        }
    }
    Ok(())
}

fn num(v: f64) -> String {
    // Debug keeps a decimal point or exponent, which TOML needs for floats
    format!("{v:?}")
}

fn kernel_value(s: &ScenarioConfig, key: SweepKey, base: Option<f64>) -> String {
    if let Some(axis) = s.grid.iter().find(|a| a.key == key) {
        let items: Vec<String> = axis.values.iter().map(|v| num(*v)).collect();
        return format!("[{}]", items.join(", "));
    }
    match base {
        Some(v) => num(v),
        None => format!("\"{NOT_APPLICABLE}\""),
    }
}

/// Writes a complete, self-contained config that [`parse_config`] reads
/// back into an equal [`ScenarioConfig`].
pub fn to_config_text(s: &ScenarioConfig) -> String {
    let mut out = String::new();
    let outputs: Vec<String> = s.outputs.iter().map(|k| format!("\"{}\"", k.name())).collect();
    let _ = writeln!(out, "outputs = [{}]", outputs.join(", "));

    let p = &s.population;
    let _ = writeln!(out, "\n[population]");
    let _ = writeln!(out, "n_agents = {}", p.n_agents);
    let _ = writeln!(out, "female_fraction = {}", num(p.female_fraction));
    let _ = writeln!(out, "young_fraction = {}", num(p.young_fraction));
    let _ = writeln!(
        out,
        "susceptibility_range = [{}, {}]",
        num(p.susceptibility_range.0),
        num(p.susceptibility_range.1)
    );
    let _ = writeln!(out, "acquaintances = {}", p.acquaintances);
    if let PopulationSource::Csv(path) = &p.source {
        let _ = writeln!(out, "csv = {}", Value::String(path.display().to_string()));
    }
    let _ = writeln!(out, "\n[population.distributions]");
    for name in AttributeDistributions::NAMES {
        let b = p.distributions.get(name).expect("known attribute");
        let _ = writeln!(out, "{name} = [{}, {}]", num(b.alpha), num(b.beta));
    }

    let k = &s.kernels;
    let _ = writeln!(out, "\n[kernels]");
    for (key, base) in [
        (SweepKey::Delta, Some(k.delta)),
        (SweepKey::Tau, k.tau),
        (SweepKey::Sigma, Some(k.sigma)),
        (SweepKey::Beta, Some(k.beta)),
        (SweepKey::Zeta, k.zeta),
        (SweepKey::GovExposureProb, Some(k.gov_exposure_prob)),
        (SweepKey::BlendGamma, Some(k.blend_gamma)),
        (SweepKey::FatigueRate, Some(k.fatigue_rate)),
    ] {
        let _ = writeln!(out, "{key} = {}", kernel_value(s, key, base));
    }

    let e = &s.engine;
    let _ = writeln!(out, "\n[engine]");
    let _ = writeln!(out, "ticks = {}", e.ticks);
    match e.campaign_stop_tick {
        Some(t) => {
            let _ = writeln!(out, "campaign_stop_tick = {t}");
        }
        None => {
            let _ = writeln!(out, "campaign_stop_tick = \"{NOT_APPLICABLE}\"");
        }
    }
    if e.seed > i64::MAX as u64 {
        let _ = writeln!(out, "seed = \"{}\"", e.seed);
    } else {
        let _ = writeln!(out, "seed = {}", e.seed);
    }
    let _ = writeln!(out, "record_every = {}", e.record_every);
    let _ = writeln!(out, "disable_peer = {}", e.disable_peer);
    let _ = writeln!(out, "disable_media = {}", e.disable_media);
    let _ = writeln!(out, "disable_gov = {}", e.disable_gov);

    let c = &s.coefficients;
    let _ = writeln!(out, "\n[coefficients]");
    let _ = writeln!(out, "b0 = {}", num(c.intercept));
    for (i, b) in c.slopes.iter().enumerate() {
        let _ = writeln!(out, "b{} = {}", i + 1, num(*b));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_line_expands() {
        let s = parse_config("preset = \"A1\"\n").unwrap();
        assert_eq!(s, presets::preset("A1").unwrap());
        assert_eq!(s.cells().len(), 3);
    }

    #[test]
    fn zeta_out_of_range_cites_range() {
        let err = parse_config("[kernels]\nzeta = 2.0\n").unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::OutOfRange { .. }));
        assert!(msg.contains("kernels.zeta") && msg.contains("[0.5, 1.5]"), "{msg}");
    }

    #[test]
    fn absent_tau_is_non_polarized() {
        let s = parse_config("[kernels]\ndelta = 0.3\n").unwrap();
        assert_eq!(s.kernels.tau, None);
        let s = parse_config("preset = \"A2\"\n[kernels]\ntau = \"N/A\"\n").unwrap();
        assert_eq!(s.kernels.tau, None);
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = parse_config("[kernels]\ndelta = 0.3\nsigma = = 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            parse_config("[kernels]\ngamma = 1.0\n"),
            Err(Error::Config { .. })
        ));
        assert!(matches!(parse_config("speed = 3\n"), Err(Error::Config { .. })));
        assert!(matches!(
            parse_config("preset = \"Z9\"\n"),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn dotted_keys_and_lists() {
        let s = parse_config(
            "kernels.delta = [0.1, 0.5]\nengine.ticks = 20\npopulation.distributions.env = [2, 2]\n",
        )
        .unwrap();
        assert_eq!(s.grid, vec![GridAxis::new(SweepKey::Delta, vec![0.1, 0.5])]);
        assert_eq!(s.engine.ticks, 20);
        assert_eq!(s.population.distributions.env, BetaSpec::new(2.0, 2.0));
    }

    #[test]
    fn scalar_override_removes_preset_axis() {
        let s = parse_config("preset = \"C1\"\n[kernels]\nzeta = 1.2\n").unwrap();
        assert!(s.grid.is_empty());
        assert_eq!(s.kernels.zeta, Some(1.2));
    }

    #[test]
    fn text_round_trip() {
        let mut s = presets::preset("C4").unwrap();
        s.population.source = PopulationSource::Csv("data/survey \"v2\".csv".into());
        s.engine.disable_media = true;
        s.coefficients.slopes[3] = -0.5;
        s.outputs = vec![OutputKind::HistogramCsv];
        s.population.distributions.know = BetaSpec::new(1e6, 0.25);
        let back = parse_config(&to_config_text(&s)).unwrap();
        assert_eq!(back, s);
    }
}
