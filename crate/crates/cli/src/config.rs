//! Sectioned run configuration: `[model]`, `[params]`, `[run]`.
//!
//! ```toml
//! [model]
//! name = "double_dot"
//!
//! [params]
//! Gamma_L = 1.0
//! Gamma_R = 1.0
//! Omega = 1.0
//! epsilon = 0.0
//!
//! [run]
//! mode = "steady"
//! ```
//!
//! Unknown sections and keys are rejected by name; primed widths default to
//! their unprimed values, `epsilon`, `U1` and `U2` default to zero, and the
//! detector regime comes either from an explicit `regime` key or from level
//! energies (`E0`, `EF_det`) via the Fermi-step classifier.

use std::collections::BTreeMap;

use dotprobe_core::{
    classify_regime_energies, DetectorRegime, DoubleDotDetectorParams, DoubleDotParams, Method,
    SingleDotDetectorParams,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown section [{0}]; expected [model], [params], [run]")]
    UnknownSection(String),
    #[error("unknown key {key:?} in [{section}]")]
    UnknownKey { section: &'static str, key: String },
    #[error("key {key:?} is not valid for model {model:?}")]
    ModelMismatch { model: &'static str, key: String },
    #[error("missing required key {0:?}")]
    MissingKey(&'static str),
    #[error("bad value for {key:?}: {reason}")]
    BadValue { key: String, reason: String },
    #[error("unknown model {0:?}; expected one of single_dot_detector, double_dot, double_dot_detector, reduced")]
    UnknownModel(String),
    #[error("unknown scenario {0:?}; expected one of fig3, zeno, noninvasive, reduction")]
    UnknownScenario(String),
    #[error("regime {stated:?} contradicts the level energies (classified {classified:?})")]
    InconsistentRegime { stated: String, classified: String },
    #[error("bad --set override {0:?}; expected key=value")]
    BadOverride(String),
    #[error(transparent)]
    Core(#[from] dotprobe_core::Error),
}

pub type Result<T> = std::result::Result<T, ConfigError>;

/// One `[params]` value: every key is numeric except `regime`.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Number(f64),
    Text(String),
}

impl ParamValue {
    pub fn number(&self, key: &str) -> Result<f64> {
        match self {
            ParamValue::Number(v) => Ok(*v),
            ParamValue::Text(s) => Err(ConfigError::BadValue {
                key: key.to_string(),
                reason: format!("expected a number, got {s:?}"),
            }),
        }
    }
}

pub type ParamMap = BTreeMap<String, ParamValue>;

/// Validated model parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    SingleDotDetector(SingleDotDetectorParams),
    DoubleDot(DoubleDotParams),
    DoubleDotDetector(DoubleDotDetectorParams),
    Reduced { dot: DoubleDotParams, gamma_l: f64 },
}

impl ModelParams {
    pub fn model_name(&self) -> &'static str {
        match self {
            ModelParams::SingleDotDetector(_) => "single_dot_detector",
            ModelParams::DoubleDot(_) => "double_dot",
            ModelParams::DoubleDotDetector(_) => "double_dot_detector",
            ModelParams::Reduced { .. } => "reduced",
        }
    }
}

/// What to run and with which settings.
#[derive(Debug, Clone, PartialEq)]
pub enum RunMode {
    Evolve { tmax: f64, npoints: usize, tol: f64, method: Method },
    Steady,
    Sweep { parameter: String, start: f64, stop: f64, count: usize, log: bool },
    Scenario { name: ScenarioName },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioName {
    Fig3,
    Zeno,
    Noninvasive,
    Reduction,
}

impl ScenarioName {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fig3" => Ok(ScenarioName::Fig3),
            "zeno" => Ok(ScenarioName::Zeno),
            "noninvasive" => Ok(ScenarioName::Noninvasive),
            "reduction" => Ok(ScenarioName::Reduction),
            other => Err(ConfigError::UnknownScenario(other.to_string())),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ScenarioName::Fig3 => "fig3",
            ScenarioName::Zeno => "zeno",
            ScenarioName::Noninvasive => "noninvasive",
            ScenarioName::Reduction => "reduction",
        }
    }
}

/// Parsed and validated configuration. The raw parameter map is kept so
/// that sweeps can re-validate per grid point.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model_name: &'static str,
    pub params: ModelParams,
    pub run: RunMode,
    pub raw_params: ParamMap,
    pub run_settings: BTreeMap<String, ParamValue>,
}

const MODEL_NAMES: [&str; 4] =
    ["single_dot_detector", "double_dot", "double_dot_detector", "reduced"];

fn allowed_keys(model: &'static str) -> &'static [&'static str] {
    match model {
        "single_dot_detector" => &[
            "Gamma_L", "Gamma_R", "Gamma_Lp", "Gamma_Rp", "gamma_L", "gamma_R", "gamma_Lp",
            "gamma_Rp",
        ],
        "double_dot" => &["Gamma_L", "Gamma_R", "Omega", "epsilon"],
        "double_dot_detector" => &[
            "Gamma_L", "Gamma_R", "Omega", "Omega_p", "epsilon", "gamma_L", "gamma_R", "gamma_Lp",
            "gamma_Rp", "U1", "U2", "regime", "E0", "E1", "E2", "EF_det", "EF_sys",
        ],
        "reduced" => &["Gamma_L", "Gamma_R", "Omega", "epsilon", "gamma_L"],
        other => unreachable!("unknown model {other}"),
    }
}

/// Numeric keys a sweep may scan for the given model.
pub fn sweepable_keys(model: &'static str) -> Vec<&'static str> {
    allowed_keys(model).iter().copied().filter(|&k| k != "regime").collect()
}

fn line_of(text: &str, offset: usize) -> usize {
    text.as_bytes()[..offset.min(text.len())].iter().filter(|&&b| b == b'\n').count() + 1
}

fn get_f64(map: &ParamMap, key: &str) -> Result<Option<f64>> {
    map.get(key).map(|v| v.number(key)).transpose()
}

fn require_f64(map: &ParamMap, key: &'static str) -> Result<f64> {
    get_f64(map, key)?.ok_or(ConfigError::MissingKey(key))
}

/// Validate a parameter map for the given model and produce the typed
/// parameter set, applying the documented defaults.
pub fn validate_params(model: &'static str, map: &ParamMap) -> Result<ModelParams> {
    let allowed = allowed_keys(model);
    for key in map.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(ConfigError::ModelMismatch { model, key: key.clone() });
        }
    }

    match model {
        "single_dot_detector" => {
            let gamma_l = require_f64(map, "Gamma_L")?;
            let gamma_r = require_f64(map, "Gamma_R")?;
            let g_l = require_f64(map, "gamma_L")?;
            let g_r = require_f64(map, "gamma_R")?;
            let p = SingleDotDetectorParams {
                Gamma_L: gamma_l,
                Gamma_R: gamma_r,
                Gamma_Lp: get_f64(map, "Gamma_Lp")?.unwrap_or(gamma_l),
                Gamma_Rp: get_f64(map, "Gamma_Rp")?.unwrap_or(gamma_r),
                gamma_L: g_l,
                gamma_R: g_r,
                gamma_Lp: get_f64(map, "gamma_Lp")?.unwrap_or(g_l),
                gamma_Rp: get_f64(map, "gamma_Rp")?.unwrap_or(g_r),
            };
            p.validate()?;
            Ok(ModelParams::SingleDotDetector(p))
        }
        "double_dot" => {
            let p = DoubleDotParams {
                Gamma_L: require_f64(map, "Gamma_L")?,
                Gamma_R: require_f64(map, "Gamma_R")?,
                Omega: require_f64(map, "Omega")?,
                epsilon: get_f64(map, "epsilon")?.unwrap_or(0.0),
            };
            p.validate()?;
            Ok(ModelParams::DoubleDot(p))
        }
        "reduced" => {
            let dot = DoubleDotParams {
                Gamma_L: require_f64(map, "Gamma_L")?,
                Gamma_R: require_f64(map, "Gamma_R")?,
                Omega: require_f64(map, "Omega")?,
                epsilon: get_f64(map, "epsilon")?.unwrap_or(0.0),
            };
            dot.validate()?;
            let gamma_l = require_f64(map, "gamma_L")?;
            if gamma_l < 0.0 {
                return Err(ConfigError::BadValue {
                    key: "gamma_L".into(),
                    reason: format!("width must be nonnegative, got {gamma_l}"),
                });
            }
            Ok(ModelParams::Reduced { dot, gamma_l })
        }
        "double_dot_detector" => validate_detector_params(map).map(ModelParams::DoubleDotDetector),
        other => Err(ConfigError::UnknownModel(other.to_string())),
    }
}

fn validate_detector_params(map: &ParamMap) -> Result<DoubleDotDetectorParams> {
    let u1 = get_f64(map, "U1")?.unwrap_or(0.0);
    let u2 = get_f64(map, "U2")?.unwrap_or(0.0);

    // Detuning: explicit epsilon wins; otherwise level energies; otherwise 0.
    let epsilon = match (get_f64(map, "epsilon")?, get_f64(map, "E1")?, get_f64(map, "E2")?) {
        (Some(e), _, _) => e,
        (None, Some(e1), Some(e2)) => e2 - e1,
        _ => 0.0,
    };

    let classified = match (get_f64(map, "E0")?, get_f64(map, "EF_det")?) {
        (Some(e0), Some(ef)) => Some(classify_regime_energies(e0, u1, u2, ef)),
        (Some(_), None) => return Err(ConfigError::MissingKey("EF_det")),
        (None, Some(_)) => return Err(ConfigError::MissingKey("E0")),
        (None, None) => None,
    };
    let stated = match map.get("regime") {
        Some(ParamValue::Text(s)) => Some(DetectorRegime::from_label(s).map_err(|_| {
            ConfigError::BadValue {
                key: "regime".into(),
                reason: format!(
                    "{s:?} is not one of never_blocked, blocked_by_dot1, always_blocked"
                ),
            }
        })?),
        Some(ParamValue::Number(v)) => {
            return Err(ConfigError::BadValue {
                key: "regime".into(),
                reason: format!("expected a regime name, got the number {v}"),
            })
        }
        None => None,
    };
    let regime = match (stated, classified) {
        (Some(s), Some(c)) if s != c => {
            return Err(ConfigError::InconsistentRegime {
                stated: s.label().to_string(),
                classified: c.label().to_string(),
            })
        }
        (Some(s), _) => s,
        (None, Some(c)) => c,
        // The printed-equations configuration.
        (None, None) => DetectorRegime::BlockedByDot1,
    };

    if let (Some(e1), Some(ef_sys)) = (get_f64(map, "E1")?, get_f64(map, "EF_sys")?) {
        if e1 >= ef_sys {
            return Err(ConfigError::BadValue {
                key: "E1".into(),
                reason: format!("resonant level must lie below EF_sys ({e1} >= {ef_sys})"),
            });
        }
    }

    let gamma = require_f64(map, "Gamma_L")?;
    let gamma_r = require_f64(map, "Gamma_R")?;
    let omega = require_f64(map, "Omega")?;
    let g_l = require_f64(map, "gamma_L")?;
    let g_r = require_f64(map, "gamma_R")?;
    let p = DoubleDotDetectorParams {
        Gamma_L: gamma,
        Gamma_R: gamma_r,
        Omega: omega,
        Omega_p: get_f64(map, "Omega_p")?.unwrap_or(omega),
        epsilon,
        gamma_L: g_l,
        gamma_R: g_r,
        gamma_Lp: get_f64(map, "gamma_Lp")?.unwrap_or(g_l),
        gamma_Rp: get_f64(map, "gamma_Rp")?.unwrap_or(g_r),
        U1: u1,
        U2: u2,
        regime,
    };
    p.validate()?;
    Ok(p)
}

fn toml_to_param(key: &str, value: &toml::Value) -> Result<ParamValue> {
    match value {
        toml::Value::Float(f) => Ok(ParamValue::Number(*f)),
        toml::Value::Integer(i) => Ok(ParamValue::Number(*i as f64)),
        toml::Value::String(s) => Ok(ParamValue::Text(s.clone())),
        other => Err(ConfigError::BadValue {
            key: key.to_string(),
            reason: format!("unsupported value type {}", other.type_str()),
        }),
    }
}

fn section<'a>(doc: &'a toml::Table, name: &'static str) -> Result<&'a toml::Table> {
    match doc.get(name) {
        Some(toml::Value::Table(t)) => Ok(t),
        Some(_) => Err(ConfigError::BadValue {
            key: name.to_string(),
            reason: "expected a table section".into(),
        }),
        None => Err(ConfigError::MissingKey(name)),
    }
}

/// Parse, apply `--set` overrides, validate.
pub fn parse_config_with_overrides(text: &str, overrides: &[String]) -> Result<RunConfig> {
    let mut doc: toml::Table = text.parse().map_err(|e: toml::de::Error| {
        let line = e.span().map(|s| line_of(text, s.start)).unwrap_or(1);
        ConfigError::Parse { line, message: e.message().to_string() }
    })?;

    for item in overrides {
        apply_override(&mut doc, item)?;
    }

    for key in doc.keys() {
        if !["model", "params", "run"].contains(&key.as_str()) {
            return Err(ConfigError::UnknownSection(key.clone()));
        }
    }

    let model_tbl = section(&doc, "model")?;
    for key in model_tbl.keys() {
        if key != "name" {
            return Err(ConfigError::UnknownKey { section: "model", key: key.clone() });
        }
    }
    let model_name = match model_tbl.get("name") {
        Some(toml::Value::String(s)) => MODEL_NAMES
            .iter()
            .find(|&&m| m == s)
            .copied()
            .ok_or_else(|| ConfigError::UnknownModel(s.clone()))?,
        Some(other) => {
            return Err(ConfigError::BadValue {
                key: "name".into(),
                reason: format!("expected a string, got {}", other.type_str()),
            })
        }
        None => return Err(ConfigError::MissingKey("name")),
    };

    let mut raw_params = ParamMap::new();
    if let Some(toml::Value::Table(t)) = doc.get("params") {
        for (k, v) in t {
            raw_params.insert(k.clone(), toml_to_param(k, v)?);
        }
    }
    let params = validate_params(model_name, &raw_params)?;

    let run_tbl = section(&doc, "run")?;
    let mut run_settings = BTreeMap::new();
    for (k, v) in run_tbl {
        run_settings.insert(k.clone(), toml_to_param(k, v)?);
    }
    let run = validate_run(model_name, &run_settings)?;

    Ok(RunConfig { model_name, params, run, raw_params, run_settings })
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with_overrides(text, &[])
}

const RUN_KEYS: &[&str] = &[
    "mode", "tmax", "npoints", "tol", "method", "parameter", "start", "stop", "count", "scale",
    "name",
];

fn validate_run(model: &'static str, settings: &BTreeMap<String, ParamValue>) -> Result<RunMode> {
    for key in settings.keys() {
        if !RUN_KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey { section: "run", key: key.clone() });
        }
    }
    let mode = match settings.get("mode") {
        Some(ParamValue::Text(s)) => s.as_str(),
        Some(ParamValue::Number(v)) => {
            return Err(ConfigError::BadValue {
                key: "mode".into(),
                reason: format!("expected evolve|steady|sweep|scenario, got {v}"),
            })
        }
        None => "steady",
    };
    match mode {
        "steady" => Ok(RunMode::Steady),
        "evolve" => {
            let (tmax, npoints, tol, method) = evolve_settings(settings)?;
            Ok(RunMode::Evolve { tmax, npoints, tol, method })
        }
        "sweep" => {
            let parameter = match settings.get("parameter") {
                Some(ParamValue::Text(s)) => s.clone(),
                Some(ParamValue::Number(v)) => {
                    return Err(ConfigError::BadValue {
                        key: "parameter".into(),
                        reason: format!("expected a parameter name, got {v}"),
                    })
                }
                None => return Err(ConfigError::MissingKey("parameter")),
            };
            if !sweepable_keys(model).contains(&parameter.as_str()) {
                return Err(ConfigError::ModelMismatch { model, key: parameter });
            }
            let start = number_setting(settings, "start")?.ok_or(ConfigError::MissingKey("start"))?;
            let stop = number_setting(settings, "stop")?.ok_or(ConfigError::MissingKey("stop"))?;
            let count = count_setting(settings, "count")?.ok_or(ConfigError::MissingKey("count"))?;
            let log = match settings.get("scale") {
                Some(ParamValue::Text(s)) if s == "log" => true,
                Some(ParamValue::Text(s)) if s == "linear" => false,
                Some(other) => {
                    return Err(ConfigError::BadValue {
                        key: "scale".into(),
                        reason: format!("expected linear|log, got {other:?}"),
                    })
                }
                None => false,
            };
            if count < 2 {
                return Err(ConfigError::BadValue {
                    key: "count".into(),
                    reason: format!("need at least 2 sweep points, got {count}"),
                });
            }
            if log && (start <= 0.0 || stop <= 0.0) {
                return Err(ConfigError::BadValue {
                    key: "scale".into(),
                    reason: "log scale needs positive bounds".into(),
                });
            }
            Ok(RunMode::Sweep { parameter, start, stop, count, log })
        }
        "scenario" => {
            let name = match settings.get("name") {
                Some(ParamValue::Text(s)) => ScenarioName::parse(s)?,
                _ => return Err(ConfigError::MissingKey("name")),
            };
            Ok(RunMode::Scenario { name })
        }
        other => Err(ConfigError::BadValue {
            key: "mode".into(),
            reason: format!("expected evolve|steady|sweep|scenario, got {other:?}"),
        }),
    }
}

pub(crate) fn evolve_settings(
    settings: &BTreeMap<String, ParamValue>,
) -> Result<(f64, usize, f64, Method)> {
    let tmax = number_setting(settings, "tmax")?.unwrap_or(20.0);
    if tmax.is_nan() || tmax <= 0.0 {
        return Err(ConfigError::BadValue {
            key: "tmax".into(),
            reason: format!("must be positive, got {tmax}"),
        });
    }
    let npoints = count_setting(settings, "npoints")?.unwrap_or(201);
    if npoints < 2 {
        return Err(ConfigError::BadValue {
            key: "npoints".into(),
            reason: format!("need at least 2 grid points, got {npoints}"),
        });
    }
    let tol = number_setting(settings, "tol")?.unwrap_or(1e-9);
    if tol.is_nan() || tol <= 0.0 {
        return Err(ConfigError::BadValue {
            key: "tol".into(),
            reason: format!("must be positive, got {tol}"),
        });
    }
    let method = match settings.get("method") {
        Some(ParamValue::Text(s)) => Method::from_label(s).map_err(|_| ConfigError::BadValue {
            key: "method".into(),
            reason: format!("expected exact|rk-adaptive, got {s:?}"),
        })?,
        Some(ParamValue::Number(v)) => {
            return Err(ConfigError::BadValue {
                key: "method".into(),
                reason: format!("expected exact|rk-adaptive, got {v}"),
            })
        }
        None => Method::Exact,
    };
    Ok((tmax, npoints, tol, method))
}

pub(crate) fn number_setting(
    settings: &BTreeMap<String, ParamValue>,
    key: &str,
) -> Result<Option<f64>> {
    settings.get(key).map(|v| v.number(key)).transpose()
}

pub(crate) fn count_setting(
    settings: &BTreeMap<String, ParamValue>,
    key: &str,
) -> Result<Option<usize>> {
    match settings.get(key) {
        None => Ok(None),
        Some(v) => {
            let n = v.number(key)?;
            if n.fract() != 0.0 || n < 0.0 || n > usize::MAX as f64 {
                return Err(ConfigError::BadValue {
                    key: key.to_string(),
                    reason: format!("expected a nonnegative integer, got {n}"),
                });
            }
            Ok(Some(n as usize))
        }
    }
}

/// Apply one `--set key=value` override to the raw document. Bare keys go to
/// `[params]`; `run.key` and `model.name` address the other sections.
fn apply_override(doc: &mut toml::Table, item: &str) -> Result<()> {
    let (path, value) = item
        .split_once('=')
        .ok_or_else(|| ConfigError::BadOverride(item.to_string()))?;
    let path = path.trim();
    let value = value.trim();
    if path.is_empty() || value.is_empty() {
        return Err(ConfigError::BadOverride(item.to_string()));
    }

    let (section_name, key) = match path.split_once('.') {
        Some((s, k)) => (s, k),
        None => ("params", path),
    };
    if !["model", "params", "run"].contains(&section_name) {
        return Err(ConfigError::UnknownSection(section_name.to_string()));
    }

    let parsed = if let Ok(v) = value.parse::<f64>() {
        if value.parse::<i64>().is_ok() {
            toml::Value::Integer(value.parse().unwrap())
        } else {
            toml::Value::Float(v)
        }
    } else {
        toml::Value::String(value.to_string())
    };

    let entry = doc
        .entry(section_name.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    match entry {
        toml::Value::Table(t) => {
            t.insert(key.to_string(), parsed);
            Ok(())
        }
        _ => Err(ConfigError::BadOverride(item.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
[model]
name = \"double_dot\"

[params]
Gamma_L = 1.0
Gamma_R = 1.0
Omega = 1.0
epsilon = 0.0

[run]
mode = \"steady\"
";

    #[test]
    fn minimal_double_dot_config_parses() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.model_name, "double_dot");
        match cfg.params {
            ModelParams::DoubleDot(p) => {
                assert_eq!(p.Omega, 1.0);
                assert_eq!(p.epsilon, 0.0);
            }
            other => panic!("wrong params: {other:?}"),
        }
        assert_eq!(cfg.run, RunMode::Steady);
    }

    #[test]
    fn missing_omega_is_reported_by_name() {
        let text = MINIMAL.replace("Omega = 1.0\n", "");
        let err = parse_config(&text).unwrap_err();
        assert!(matches!(err, ConfigError::MissingKey("Omega")), "{err}");
    }

    #[test]
    fn unknown_param_is_reported_by_name() {
        let text = MINIMAL.replace("epsilon = 0.0", "gamma_L = 1.0");
        let err = parse_config(&text).unwrap_err();
        match err {
            ConfigError::ModelMismatch { key, .. } => assert_eq!(key, "gamma_L"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn primed_widths_default_to_unprimed() {
        let text = "\
[model]
name = \"single_dot_detector\"

[params]
Gamma_L = 1.0
Gamma_R = 2.0
gamma_L = 0.3
gamma_R = 4.0

[run]
mode = \"steady\"
";
        let cfg = parse_config(text).unwrap();
        match cfg.params {
            ModelParams::SingleDotDetector(p) => {
                assert_eq!(p.gamma_Lp, 0.3);
                assert_eq!(p.gamma_Rp, 4.0);
                assert_eq!(p.Gamma_Lp, 1.0);
                assert_eq!(p.Gamma_Rp, 2.0);
            }
            other => panic!("wrong params: {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "[model]\nname = \"double_dot\"\nnot toml at all ???\n";
        match parse_config(text).unwrap_err() {
            ConfigError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn regime_from_energies_and_consistency_check() {
        let base = "\
[model]
name = \"double_dot_detector\"

[params]
Gamma_L = 1.0
Gamma_R = 1.0
Omega = 1.0
gamma_L = 50.0
gamma_R = 50.0
U1 = 2.0
U2 = 0.5
E0 = 0.0
EF_det = 1.0

[run]
mode = \"steady\"
";
        let cfg = parse_config(base).unwrap();
        match cfg.params {
            ModelParams::DoubleDotDetector(p) => {
                assert_eq!(p.regime, DetectorRegime::BlockedByDot1)
            }
            other => panic!("wrong params: {other:?}"),
        }

        let contradicted = base.replace("EF_det = 1.0", "EF_det = 1.0\nregime = \"never_blocked\"");
        assert!(matches!(
            parse_config(&contradicted).unwrap_err(),
            ConfigError::InconsistentRegime { .. }
        ));
    }

    #[test]
    fn overrides_reach_params_and_run() {
        let cfg = parse_config_with_overrides(
            MINIMAL,
            &["Omega=2.5".to_string(), "run.mode=evolve".to_string(), "run.tmax=7".to_string()],
        )
        .unwrap();
        match cfg.params {
            ModelParams::DoubleDot(p) => assert_eq!(p.Omega, 2.5),
            other => panic!("wrong params: {other:?}"),
        }
        match cfg.run {
            RunMode::Evolve { tmax, npoints, tol, method } => {
                assert_eq!(tmax, 7.0);
                assert_eq!(npoints, 201);
                assert_eq!(tol, 1e-9);
                assert_eq!(method, Method::Exact);
            }
            other => panic!("wrong run mode: {other:?}"),
        }
    }

    #[test]
    fn sweep_validates_the_parameter_name() {
        let text = MINIMAL.replace(
            "mode = \"steady\"",
            "mode = \"sweep\"\nparameter = \"gamma_L\"\nstart = 0.0\nstop = 1.0\ncount = 5",
        );
        match parse_config(&text).unwrap_err() {
            ConfigError::ModelMismatch { key, .. } => assert_eq!(key, "gamma_L"),
            other => panic!("unexpected error {other}"),
        }
        let ok = text.replace("\"gamma_L\"", "\"Omega\"");
        assert!(matches!(parse_config(&ok).unwrap().run, RunMode::Sweep { .. }));
    }

    #[test]
    fn unknown_sections_and_run_keys_are_rejected() {
        let text = format!("{MINIMAL}\n[plot]\nstyle = \"x\"\n");
        assert!(matches!(
            parse_config(&text).unwrap_err(),
            ConfigError::UnknownSection(s) if s == "plot"
        ));
        let text = MINIMAL.replace("mode = \"steady\"", "mode = \"steady\"\nfoo = 1");
        assert!(matches!(
            parse_config(&text).unwrap_err(),
            ConfigError::UnknownKey { section: "run", key } if key == "foo"
        ));
    }
}
