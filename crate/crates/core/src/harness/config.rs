//! Experiment configuration: `key = value` lines grouped under `[section]` headers, or the
//! same schema as a JSON object of objects.
//!
//! ```text
//! [experiment]
//! id = fixed_points
//! seed = 42
//! oracle = exact          # or monte_carlo
//! samples = 100000
//!
//! [params]
//! n = 10
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Result, SteinError};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ParamValue {
    Num(f64),
    List(Vec<f64>),
    Text(String),
}

impl ParamValue {
    pub fn parse(raw: &str) -> ParamValue {
        let raw = raw.trim();
        if let Ok(x) = raw.parse::<f64>() {
            return ParamValue::Num(x);
        }
        if raw.contains(',') {
            let parts: std::result::Result<Vec<f64>, _> = raw.split(',').map(|s| s.trim().parse::<f64>()).collect();
            if let Ok(v) = parts {
                return ParamValue::List(v);
            }
        }
        ParamValue::Text(raw.trim_matches('"').to_string())
    }

    fn render(&self) -> String {
        match self {
            ParamValue::Num(x) => x.to_string(),
            ParamValue::List(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
            ParamValue::Text(s) => s.clone(),
        }
    }
}

/// Named parameters with typed accessors.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Params(pub BTreeMap<String, ParamValue>);

impl Params {
    pub fn new() -> Self {
        Params::default()
    }

    pub fn set(&mut self, key: &str, v: ParamValue) {
        self.0.insert(key.to_string(), v);
    }

    /// Parse `key=value` overrides.
    pub fn apply_override(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv.split_once('=').ok_or_else(|| SteinError::Config(format!("expected key=value, got '{kv}'")))?;
        self.set(k.trim(), ParamValue::parse(v));
        Ok(())
    }

    pub fn merged_over(&self, defaults: &[(&str, f64)]) -> Params {
        let mut out = Params::new();
        for (k, v) in defaults {
            out.set(k, ParamValue::Num(*v));
        }
        for (k, v) in &self.0 {
            out.0.insert(k.clone(), v.clone());
        }
        out
    }

    pub fn contains(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        match self.0.get(key) {
            Some(ParamValue::Num(x)) => Ok(*x),
            Some(other) => Err(SteinError::Config(format!("parameter '{key}' must be a number, got '{}'", other.render()))),
            None => Err(SteinError::Config(format!("missing parameter '{key}'"))),
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        let x = self.f64(key)?;
        if x < 0.0 || x.fract() != 0.0 || x > 1e15 {
            return Err(SteinError::Config(format!("parameter '{key}' must be a nonnegative integer, got {x}")));
        }
        Ok(x as usize)
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>> {
        match self.0.get(key) {
            Some(ParamValue::List(v)) => Ok(v.clone()),
            Some(ParamValue::Num(x)) => Ok(vec![*x]),
            Some(ParamValue::Text(s)) => Err(SteinError::Config(format!("parameter '{key}' must be a number list, got '{s}'"))),
            None => Err(SteinError::Config(format!("missing parameter '{key}'"))),
        }
    }

    pub fn text(&self, key: &str) -> Result<String> {
        match self.0.get(key) {
            Some(v) => Ok(v.render()),
            None => Err(SteinError::Config(format!("missing parameter '{key}'"))),
        }
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        if self.contains(key) {
            self.f64(key).map(Some)
        } else {
            Ok(None)
        }
    }
}

/// Parsed sections of a config file; keys before any header land in section "".
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Document {
    pub sections: BTreeMap<String, Params>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Document> {
        if text.trim_start().starts_with('{') {
            return Self::parse_json(text);
        }
        let mut doc = Document::default();
        let mut current = String::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| SteinError::Config(format!("line {}: unterminated section header", i + 1)))?;
                current = name.trim().to_string();
                doc.sections.entry(current.clone()).or_default();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| SteinError::Config(format!("line {}: expected 'key = value'", i + 1)))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(SteinError::Config(format!("line {}: empty key", i + 1)));
            }
            let sec = doc.sections.entry(current.clone()).or_default();
            if sec.contains(k) {
                return Err(SteinError::Config(format!("line {}: duplicate key '{k}'", i + 1)));
            }
            sec.set(k, ParamValue::parse(v));
        }
        Ok(doc)
    }

    fn parse_json(text: &str) -> Result<Document> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| SteinError::Config(format!("invalid JSON: {e}")))?;
        let obj = v.as_object().ok_or_else(|| SteinError::Config("top-level JSON value must be an object".into()))?;
        let mut doc = Document::default();
        for (name, sec) in obj {
            let fields = sec.as_object().ok_or_else(|| SteinError::Config(format!("section '{name}' must be an object")))?;
            let mut p = Params::new();
            for (k, val) in fields {
                let pv = match val {
                    serde_json::Value::Number(n) => ParamValue::Num(n.as_f64().unwrap_or(f64::NAN)),
                    serde_json::Value::String(s) => ParamValue::parse(s),
                    serde_json::Value::Array(a) => ParamValue::List(
                        a.iter()
                            .map(|x| x.as_f64().ok_or_else(|| SteinError::Config(format!("'{name}.{k}' must hold numbers"))))
                            .collect::<Result<_>>()?,
                    ),
                    _ => return Err(SteinError::Config(format!("unsupported value for '{name}.{k}'"))),
                };
                p.set(k, pv);
            }
            doc.sections.insert(name.clone(), p);
        }
        Ok(doc)
    }

    pub fn section(&self, name: &str) -> Option<&Params> {
        self.sections.get(name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OracleSpec {
    Exact,
    MonteCarlo { n_draws: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    pub params: Params,
    /// None means the experiment's registered default
    pub oracle: Option<OracleSpec>,
    pub theorem_id: Option<String>,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment_id: &str, seed: u64) -> Self {
        ExperimentConfig { experiment_id: experiment_id.to_string(), params: Params::new(), oracle: None, theorem_id: None, seed, out: None }
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_document(&Document::parse(text)?)
    }

    pub fn from_document(doc: &Document) -> Result<Self> {
        for name in doc.sections.keys() {
            if !matches!(name.as_str(), "experiment" | "params") {
                return Err(SteinError::Config(format!("unknown section '[{name}]'")));
            }
        }
        let exp = doc.section("experiment").ok_or_else(|| SteinError::Config("missing [experiment] section".into()))?;
        for k in exp.0.keys() {
            if !matches!(k.as_str(), "id" | "seed" | "oracle" | "samples" | "theorem" | "out") {
                return Err(SteinError::Config(format!("unknown key '{k}' in [experiment]")));
            }
        }
        let id = exp.text("id")?;
        let seed = exp.f64("seed").map_err(|_| SteinError::Config("seed is mandatory and must be an integer".into()))?;
        if seed < 0.0 || seed.fract() != 0.0 || seed > 9.007_199_254_740_992e15 {
            return Err(SteinError::Config(format!("seed must be a nonnegative integer, got {seed}")));
        }
        let samples = exp.opt_f64("samples")?;
        let oracle = match exp.0.get("oracle").map(|v| v.render()) {
            None if samples.is_some() => Some(OracleSpec::MonteCarlo { n_draws: exp.usize("samples")? }),
            None => None,
            Some(s) if s == "exact" => Some(OracleSpec::Exact),
            Some(s) if s == "monte_carlo" => Some(OracleSpec::MonteCarlo { n_draws: exp.usize("samples").unwrap_or(100_000) }),
            Some(s) => return Err(SteinError::Config(format!("oracle must be 'exact' or 'monte_carlo', got '{s}'"))),
        };
        Ok(ExperimentConfig {
            experiment_id: id,
            params: doc.section("params").cloned().unwrap_or_default(),
            oracle,
            theorem_id: exp.0.get("theorem").map(|v| v.render()),
            seed: seed as u64,
            out: exp.0.get("out").map(|v| PathBuf::from(v.render())),
        })
    }
}
