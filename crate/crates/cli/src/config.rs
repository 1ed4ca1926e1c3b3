//! Run configuration: a flat TOML document of `key = value` pairs.
//!
//! ```toml
//! scenario = "fig2a"          # fig2a | fig2b | fig3a | fig3b | custom
//! phi_values = [0, 0.001]     # J t_g, one simulation pass each
//! shots = "exact"             # or a positive integer
//! seed = 0
//! bootstrap_resamples = 500
//! reference = ""              # gate tokens, e.g. "X180 X180"
//! meta_references = []        # alternative references to cross-check
//! output_dir = "ctxdep-out"
//!
//! gamma1 = 16666.67           # 1/s
//! gamma3 = 1449.28            # 1/s, defaults to gamma1 (1 - p) / p
//! gamma_phi = 8333.33         # 1/s, defaults to gamma1 / 2
//! t_g = 2e-8                  # s
//! p = 0.92
//! eta = 0.95
//!
//! fidelity_power = 2          # r in F^(r) for cyclic tests
//! m_values = [0, 50, 100]     # overrides the fig3a/fig3b grids
//!
//! # scenario = "custom" only
//! family = "repetition"       # permutation | cyclic | repetition
//! block = "X180 Y180"         # repetition
//! gate_a = "I"                # permutation
//! gate_b = "X180"             # permutation
//! n = 250                     # permutation
//! random_permutations = 0     # permutation: > 0 draws random orderings
//! sequence = "X180 I*500"     # cyclic
//! ```
//!
//! Gate tokens are `I`, `X<degrees>`, `Y<degrees>`, optionally followed by
//! `@<duration multiplier>`; a sequence token may end in `*<repeat count>`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use ctxdep::analysis::bootstrap::MIN_RESAMPLES;
use ctxdep::experiment::{Sequence, Shots};
use ctxdep::noise::{GateSpec, NoiseParams};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("`{key}`: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Custom,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Fig2a => "fig2a",
            Scenario::Fig2b => "fig2b",
            Scenario::Fig3a => "fig3a",
            Scenario::Fig3b => "fig3b",
            Scenario::Custom => "custom",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fig2a" => Ok(Scenario::Fig2a),
            "fig2b" => Ok(Scenario::Fig2b),
            "fig3a" => Ok(Scenario::Fig3a),
            "fig3b" => Ok(Scenario::Fig3b),
            "custom" => Ok(Scenario::Custom),
            _ => Err(format!(
                "unknown scenario `{s}` (expected fig2a, fig2b, fig3a, fig3b or custom)"
            )),
        }
    }
}

/// Family of a custom scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum CustomFamily {
    Permutation {
        gate_a: GateToken,
        gate_b: GateToken,
        n: usize,
        /// Zero for the deterministic family, otherwise the number of random
        /// orderings to draw.
        random_permutations: usize,
    },
    Cyclic {
        sequence: SequenceText,
    },
    Repetition {
        block: SequenceText,
        m_values: Vec<u32>,
    },
}

/// A gate kept alongside the token it was parsed from.
#[derive(Debug, Clone, PartialEq)]
pub struct GateToken {
    pub gate: GateSpec,
    pub text: String,
}

impl Serialize for GateToken {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

/// A parsed sequence kept alongside its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceText {
    pub sequence: Sequence,
    pub text: String,
}

impl Serialize for SequenceText {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

fn serialize_shots<S: Serializer>(shots: &Shots, s: S) -> Result<S::Ok, S::Error> {
    match shots {
        Shots::Exact => s.serialize_str("exact"),
        Shots::Finite(n) => s.serialize_u64(*n),
    }
}

/// Validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    /// Coupling is zero here; each pass sets it from `phi_values`.
    pub noise: NoiseParams,
    pub phi_values: Vec<f64>,
    #[serde(serialize_with = "serialize_shots")]
    pub shots: Shots,
    pub seed: u64,
    pub bootstrap_resamples: usize,
    pub reference: SequenceText,
    pub meta_references: Vec<SequenceText>,
    #[serde(skip)]
    pub output_dir: PathBuf,
    pub fidelity_power: usize,
    pub m_values: Option<Vec<u32>>,
    pub custom: Option<CustomFamily>,
}

/// Command-line values that replace the corresponding config keys.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scenario: Option<Scenario>,
    pub shots: Option<Shots>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ShotsValue {
    Count(i64),
    Word(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Option<String>,
    phi_values: Option<Vec<f64>>,
    shots: Option<ShotsValue>,
    seed: Option<u64>,
    bootstrap_resamples: Option<i64>,
    reference: Option<String>,
    meta_references: Option<Vec<String>>,
    output_dir: Option<PathBuf>,
    gamma1: Option<f64>,
    gamma3: Option<f64>,
    gamma_phi: Option<f64>,
    t_g: Option<f64>,
    p: Option<f64>,
    eta: Option<f64>,
    fidelity_power: Option<i64>,
    m_values: Option<Vec<i64>>,
    family: Option<String>,
    block: Option<String>,
    gate_a: Option<String>,
    gate_b: Option<String>,
    n: Option<i64>,
    random_permutations: Option<i64>,
    sequence: Option<String>,
}

/// Parses with no overrides.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with(text, &Overrides::default())
}

pub fn parse_config_with(text: &str, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    resolve(raw, overrides)
}

fn parse_shots(v: &ShotsValue) -> Result<Shots, ConfigError> {
    match v {
        ShotsValue::Count(n) if *n >= 1 => Ok(Shots::Finite(*n as u64)),
        ShotsValue::Count(_) => Err(invalid("shots", "must be at least 1 or \"exact\"")),
        ShotsValue::Word(w) if w == "exact" => Ok(Shots::Exact),
        ShotsValue::Word(w) => Err(invalid("shots", format!("expected a positive integer or \"exact\", got \"{w}\""))),
    }
}

/// Parses a `--shots` argument: `exact` or a positive integer.
pub fn parse_shots_arg(s: &str) -> Result<Shots, String> {
    if s == "exact" {
        return Ok(Shots::Exact);
    }
    match s.parse::<u64>() {
        Ok(n) if n >= 1 => Ok(Shots::Finite(n)),
        _ => Err(format!("expected a positive integer or `exact`, got `{s}`")),
    }
}

fn sequence(key: &str, label: &str, text: &str) -> Result<SequenceText, ConfigError> {
    Ok(SequenceText {
        sequence: Sequence::parse(label, text).map_err(|e| invalid(key, e.to_string()))?,
        text: text.to_string(),
    })
}

fn gate(key: &str, text: &str) -> Result<GateToken, ConfigError> {
    Ok(GateToken {
        gate: text.parse().map_err(|e: ctxdep::Error| invalid(key, e.to_string()))?,
        text: text.to_string(),
    })
}

fn non_negative(key: &str, v: Option<f64>) -> Result<Option<f64>, ConfigError> {
    match v {
        Some(x) if !(x >= 0.0 && x.is_finite()) => Err(invalid(key, "must be a finite non-negative number")),
        _ => Ok(v),
    }
}

fn positive_int(key: &str, v: i64) -> Result<usize, ConfigError> {
    if v >= 1 {
        Ok(v as usize)
    } else {
        Err(invalid(key, "must be a positive integer"))
    }
}

fn m_grid(key: &str, values: &[i64]) -> Result<Vec<u32>, ConfigError> {
    if values.is_empty() {
        return Err(invalid(key, "must not be empty"));
    }
    let mut out = Vec::with_capacity(values.len());
    for (j, &m) in values.iter().enumerate() {
        let m = u32::try_from(m).map_err(|_| invalid(&format!("{key}[{j}]"), "must be a non-negative integer"))?;
        if out.last().is_some_and(|&prev| m <= prev) {
            return Err(invalid(&format!("{key}[{j}]"), "values must be strictly increasing"));
        }
        out.push(m);
    }
    Ok(out)
}

fn resolve(raw: RawConfig, ov: &Overrides) -> Result<RunConfig, ConfigError> {
    let file_scenario = match &raw.scenario {
        Some(s) => s.parse().map_err(|e| invalid("scenario", e))?,
        None => Scenario::Fig2a,
    };
    let scenario = ov.scenario.unwrap_or(file_scenario);

    let phi_values = raw.phi_values.clone().unwrap_or_else(|| vec![0.0]);
    if phi_values.is_empty() {
        return Err(invalid("phi_values", "must list at least one value"));
    }
    for (j, phi) in phi_values.iter().enumerate() {
        if !phi.is_finite() {
            return Err(invalid(&format!("phi_values[{j}]"), "must be finite"));
        }
    }

    let file_shots = raw.shots.as_ref().map(parse_shots).transpose()?;
    let shots = ov.shots.or(file_shots).unwrap_or(Shots::Exact);

    let bootstrap_resamples = match raw.bootstrap_resamples {
        None => 500,
        Some(b) if b >= MIN_RESAMPLES as i64 => b as usize,
        Some(_) => return Err(invalid("bootstrap_resamples", format!("must be at least {MIN_RESAMPLES}"))),
    };

    let reference = NoiseParams::reference();
    let p = raw.p.unwrap_or(reference.p);
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid("p", "must lie in [0, 1]"));
    }
    let eta = raw.eta.unwrap_or(reference.eta);
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(invalid("eta", "must lie in (0, 1]"));
    }
    let gamma1 = non_negative("gamma1", raw.gamma1)?.unwrap_or(reference.gamma1);
    let gamma3 = match non_negative("gamma3", raw.gamma3)? {
        Some(g) => g,
        None if p > 0.0 => gamma1 * (1.0 - p) / p,
        None => return Err(invalid("gamma3", "must be given explicitly when p = 0")),
    };
    let gamma_phi = non_negative("gamma_phi", raw.gamma_phi)?.unwrap_or(gamma1 / 2.0);
    let gate_time = raw.t_g.unwrap_or(reference.gate_time);
    if !(gate_time > 0.0 && gate_time.is_finite()) {
        return Err(invalid("t_g", "must be a positive number of seconds"));
    }
    let noise = NoiseParams {
        gamma1,
        gamma3,
        gamma_phi,
        coupling: 0.0,
        gate_time,
        p,
        eta,
    };

    let reference_seq = sequence("reference", "reference", raw.reference.as_deref().unwrap_or(""))?;
    let meta_references = raw
        .meta_references
        .as_deref()
        .unwrap_or_default()
        .iter()
        .enumerate()
        .map(|(j, t)| sequence(&format!("meta_references[{j}]"), &format!("meta{}", j + 1), t))
        .collect::<Result<Vec<_>, _>>()?;

    let fidelity_power = match raw.fidelity_power {
        None => 2,
        Some(r) => positive_int("fidelity_power", r)?,
    };
    if fidelity_power > 16 {
        return Err(invalid("fidelity_power", "must not exceed d^2 = 16"));
    }
    let m_values = raw.m_values.as_deref().map(|m| m_grid("m_values", m)).transpose()?;

    let custom_keys = [
        ("family", raw.family.is_some()),
        ("block", raw.block.is_some()),
        ("gate_a", raw.gate_a.is_some()),
        ("gate_b", raw.gate_b.is_some()),
        ("n", raw.n.is_some()),
        ("random_permutations", raw.random_permutations.is_some()),
        ("sequence", raw.sequence.is_some()),
    ];
    let custom = if scenario == Scenario::Custom {
        Some(custom_family(&raw, m_values.clone())?)
    } else {
        if let Some((key, _)) = custom_keys.iter().find(|(_, present)| *present) {
            return Err(invalid(key, "only used by scenario \"custom\""));
        }
        None
    };

    Ok(RunConfig {
        scenario,
        noise,
        phi_values,
        shots,
        seed: ov.seed.or(raw.seed).unwrap_or(0),
        bootstrap_resamples,
        reference: reference_seq,
        meta_references,
        output_dir: ov
            .output_dir
            .clone()
            .or(raw.output_dir)
            .unwrap_or_else(|| PathBuf::from("ctxdep-out")),
        fidelity_power,
        m_values,
        custom,
    })
}

fn custom_family(raw: &RawConfig, m_values: Option<Vec<u32>>) -> Result<CustomFamily, ConfigError> {
    let family = raw
        .family
        .as_deref()
        .ok_or_else(|| invalid("family", "required for scenario \"custom\""))?;
    let require = |key: &str, v: &Option<String>| -> Result<String, ConfigError> {
        v.clone().ok_or_else(|| invalid(key, format!("required for family \"{family}\"")))
    };
    let reject = |keys: &[(&str, bool)]| -> Result<(), ConfigError> {
        match keys.iter().find(|(_, present)| *present) {
            Some((key, _)) => Err(invalid(key, format!("not used by family \"{family}\""))),
            None => Ok(()),
        }
    };
    match family {
        "permutation" => {
            reject(&[("block", raw.block.is_some()), ("sequence", raw.sequence.is_some())])?;
            let n = positive_int("n", raw.n.ok_or_else(|| invalid("n", "required for family \"permutation\""))?)?;
            let random_permutations = match raw.random_permutations {
                None | Some(0) => 0,
                Some(c) => positive_int("random_permutations", c)?,
            };
            Ok(CustomFamily::Permutation {
                gate_a: gate("gate_a", &require("gate_a", &raw.gate_a)?)?,
                gate_b: gate("gate_b", &require("gate_b", &raw.gate_b)?)?,
                n,
                random_permutations,
            })
        }
        "cyclic" => {
            reject(&[
                ("block", raw.block.is_some()),
                ("gate_a", raw.gate_a.is_some()),
                ("gate_b", raw.gate_b.is_some()),
                ("n", raw.n.is_some()),
            ])?;
            let seq = sequence("sequence", "base", &require("sequence", &raw.sequence)?)?;
            if seq.sequence.is_empty() {
                return Err(invalid("sequence", "cyclic family needs at least one gate"));
            }
            Ok(CustomFamily::Cyclic { sequence: seq })
        }
        "repetition" => {
            reject(&[
                ("sequence", raw.sequence.is_some()),
                ("gate_a", raw.gate_a.is_some()),
                ("gate_b", raw.gate_b.is_some()),
                ("n", raw.n.is_some()),
            ])?;
            let block = sequence("block", "block", &require("block", &raw.block)?)?;
            if block.sequence.is_empty() {
                return Err(invalid("block", "repetition family needs at least one gate"));
            }
            let m_values = m_values.ok_or_else(|| invalid("m_values", "required for family \"repetition\""))?;
            Ok(CustomFamily::Repetition { block, m_values })
        }
        other => Err(invalid(
            "family",
            format!("unknown family \"{other}\" (expected permutation, cyclic or repetition)"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = parse_config("").unwrap();
        let r = NoiseParams::reference();
        assert_eq!(cfg.scenario, Scenario::Fig2a);
        assert_eq!(cfg.noise, r);
        assert_eq!(cfg.shots, Shots::Exact);
        assert_eq!(cfg.bootstrap_resamples, 500);
        assert_eq!(cfg.phi_values, vec![0.0]);
        assert!(cfg.reference.sequence.is_empty());
    }

    #[test]
    fn derived_rates_follow_configured_values() {
        let cfg = parse_config("gamma1 = 1000.0\np = 0.8").unwrap();
        assert!((cfg.noise.gamma3 - 250.0).abs() < 1e-9);
        assert_eq!(cfg.noise.gamma_phi, 500.0);
        let cfg = parse_config("gamma1 = 1000.0\ngamma_phi = 7.0\ngamma3 = 1.0").unwrap();
        assert_eq!((cfg.noise.gamma3, cfg.noise.gamma_phi), (1.0, 7.0));
    }

    #[test]
    fn phi_list_and_shots() {
        let cfg = parse_config("phi_values = [0, 0.001, 0.005]\nshots = 1000000").unwrap();
        assert_eq!(cfg.phi_values.len(), 3);
        assert_eq!(cfg.shots, Shots::Finite(1_000_000));
        assert_eq!(parse_config("shots = \"exact\"").unwrap().shots, Shots::Exact);
    }

    #[test]
    fn errors_name_the_key() {
        let err = |text: &str| match parse_config(text) {
            Err(ConfigError::Invalid { key, .. }) => key,
            other => panic!("expected a validation error for {text:?}, got {other:?}"),
        };
        assert_eq!(err("shots = 0"), "shots");
        assert_eq!(err("shots = \"many\""), "shots");
        assert_eq!(err("phi_values = []"), "phi_values");
        assert_eq!(err("phi_values = [0.0, nan]"), "phi_values[1]");
        assert_eq!(err("p = 1.5"), "p");
        assert_eq!(err("eta = 0.0"), "eta");
        assert_eq!(err("gamma1 = -1.0"), "gamma1");
        assert_eq!(err("t_g = 0.0"), "t_g");
        assert_eq!(err("bootstrap_resamples = 10"), "bootstrap_resamples");
        assert_eq!(err("reference = \"X180 Q\""), "reference");
        assert_eq!(err("meta_references = [\"I\", \"Z\"]"), "meta_references[1]");
        assert_eq!(err("scenario = \"fig9\""), "scenario");
        assert_eq!(err("m_values = [0, 50, 50]"), "m_values[2]");
        assert_eq!(err("family = \"cyclic\""), "family");
        assert_eq!(err("scenario = \"custom\""), "family");
        assert_eq!(err("scenario = \"custom\"\nfamily = \"cyclic\"\nsequence = \"\""), "sequence");
        assert_eq!(err("scenario = \"custom\"\nfamily = \"repetition\"\nblock = \"X180\""), "m_values");
        assert_eq!(err("scenario = \"custom\"\nfamily = \"permutation\"\ngate_a = \"I\"\ngate_b = \"X180\"\nn = 0"), "n");
    }

    #[test]
    fn syntax_and_unknown_keys_are_rejected() {
        assert!(matches!(parse_config("shots = "), Err(ConfigError::Syntax(_))));
        let e = parse_config("gama1 = 3.0").unwrap_err();
        assert!(e.to_string().contains("gama1"), "{e}");
    }

    #[test]
    fn overrides_win() {
        let ov = Overrides {
            scenario: Some(Scenario::Fig3b),
            shots: Some(Shots::Finite(10)),
            seed: Some(9),
            output_dir: Some("elsewhere".into()),
        };
        let cfg = parse_config_with("scenario = \"fig2b\"\nshots = \"exact\"\nseed = 1", &ov).unwrap();
        assert_eq!(cfg.scenario, Scenario::Fig3b);
        assert_eq!(cfg.shots, Shots::Finite(10));
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.output_dir, PathBuf::from("elsewhere"));
    }

    #[test]
    fn custom_families() {
        let cfg = parse_config(
            "scenario = \"custom\"\nfamily = \"repetition\"\nblock = \"X-90 X90\"\nm_values = [0, 10, 20, 30]",
        )
        .unwrap();
        match cfg.custom.unwrap() {
            CustomFamily::Repetition { block, m_values } => {
                assert_eq!(block.sequence.len(), 2);
                assert_eq!(m_values, vec![0, 10, 20, 30]);
            }
            other => panic!("{other:?}"),
        }
        let cfg = parse_config(
            "scenario = \"custom\"\nfamily = \"permutation\"\ngate_a = \"I\"\ngate_b = \"Y90@2\"\nn = 5",
        )
        .unwrap();
        assert!(matches!(cfg.custom, Some(CustomFamily::Permutation { n: 5, .. })));
    }

    #[test]
    fn shots_argument() {
        assert_eq!(parse_shots_arg("exact"), Ok(Shots::Exact));
        assert_eq!(parse_shots_arg("100"), Ok(Shots::Finite(100)));
        assert!(parse_shots_arg("0").is_err());
        assert!(parse_shots_arg("-3").is_err());
    }
}
