use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::Scenario;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Int,
    Float,
    Bool,
    Str,
    IntList,
    FloatList,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Int => "a nonnegative integer",
            Kind::Float => "a real number",
            Kind::Bool => "true or false",
            Kind::Str => "a string",
            Kind::IntList => "a comma-separated list of nonnegative integers",
            Kind::FloatList => "a comma-separated list of real numbers",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(u64),
    Float(f64),
    Bool(bool),
    Str(String),
    IntList(Vec<u64>),
    FloatList(Vec<f64>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join<T: fmt::Display>(v: &[T]) -> String {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{v:?}"),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Str(v) => f.write_str(v),
            Value::IntList(v) => f.write_str(&join(v)),
            Value::FloatList(v) => f.write_str(&join(&v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>())),
        }
    }
}

/// One schema entry; the default is written in config syntax.
#[derive(Clone, Copy, Debug)]
pub struct Field {
    pub key: &'static str,
    pub kind: Kind,
    pub default: &'static str,
    pub help: &'static str,
}

pub(crate) const fn field(key: &'static str, kind: Kind, default: &'static str, help: &'static str) -> Field {
    Field { key, kind, default, help }
}

/// Keys every scenario accepts.
pub const COMMON: &[Field] =
    &[field("seed", Kind::Int, "0", "base seed"), field("delta", Kind::Float, "0.05", "confidence parameter")];

fn parse_float(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        t => t.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

fn split_list(s: &str) -> Vec<&str> {
    let t = s.trim().trim_start_matches('[').trim_end_matches(']');
    if t.trim().is_empty() {
        return Vec::new();
    }
    t.split(',').map(str::trim).collect()
}

pub fn parse_value(kind: Kind, raw: &str) -> Option<Value> {
    let s = raw.trim();
    match kind {
        Kind::Int => s.parse().ok().map(Value::Int),
        Kind::Float => parse_float(s).map(Value::Float),
        Kind::Bool => match s {
            "true" => Some(Value::Bool(true)),
            "false" => Some(Value::Bool(false)),
            _ => None,
        },
        Kind::Str => Some(Value::Str(s.trim_matches('"').to_string())),
        Kind::IntList => {
            let v: Option<Vec<u64>> = split_list(s).into_iter().map(|t| t.parse().ok()).collect();
            v.filter(|v| !v.is_empty()).map(Value::IntList)
        }
        Kind::FloatList => {
            let v: Option<Vec<f64>> = split_list(s).into_iter().map(parse_float).collect();
            v.filter(|v| !v.is_empty()).map(Value::FloatList)
        }
    }
}

#[derive(Clone, Debug)]
struct Entry {
    key: String,
    raw: String,
    line: usize,
}

/// A parsed config file: optional global keys followed by `[scenario]` sections.
#[derive(Clone, Debug, Default)]
pub struct ConfigFile {
    global: Vec<Entry>,
    sections: BTreeMap<String, Vec<Entry>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut file = ConfigFile::default();
        let mut current: Option<String> = None;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let t = line.split('#').next().unwrap_or("").trim();
            if t.is_empty() {
                continue;
            }
            if let Some(name) = t.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Config(format!("line {line_no}: unterminated section header `{t}`")))?
                    .trim();
                if Scenario::from_name(name).is_none() {
                    return Err(Error::Config(format!(
                        "line {line_no}: unknown section `{name}`; expected one of {}",
                        Scenario::names().join(", ")
                    )));
                }
                file.sections.entry(name.to_string()).or_default();
                current = Some(name.to_string());
                continue;
            }
            let (k, v) = t
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {line_no}: expected `key = value`, got `{t}`")))?;
            let entry = Entry { key: k.trim().to_string(), raw: v.trim().to_string(), line: line_no };
            match &current {
                Some(s) => file.sections.get_mut(s).expect("section exists").push(entry),
                None => {
                    if !COMMON.iter().any(|f| f.key == entry.key) {
                        return Err(Error::Config(format!(
                            "line {line_no}: unknown global key `{}`; only seed and delta may precede a section",
                            entry.key
                        )));
                    }
                    file.global.push(entry)
                }
            }
        }
        for (name, entries) in &file.sections {
            let scenario = Scenario::from_name(name).expect("checked above");
            for e in entries {
                lookup(scenario, &e.key).ok_or_else(|| {
                    Error::Config(format!("line {}: unknown key `{}` for scenario `{name}`", e.line, e.key))
                })?;
            }
        }
        Ok(file)
    }
}

fn lookup(scenario: Scenario, key: &str) -> Option<Field> {
    COMMON.iter().chain(scenario.schema()).find(|f| f.key == key).copied()
}

/// A fully resolved, type-checked scenario configuration.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub values: BTreeMap<String, Value>,
}

impl ExperimentConfig {
    pub fn defaults(scenario: Scenario) -> Self {
        let values = COMMON
            .iter()
            .chain(scenario.schema())
            .map(|f| {
                let v = parse_value(f.kind, f.default).unwrap_or_else(|| panic!("bad default for {}", f.key));
                (f.key.to_string(), v)
            })
            .collect();
        ExperimentConfig { scenario, values }
    }

    /// Defaults, then the file's global keys, then its section, then `key=value` overrides.
    pub fn resolve(scenario: Scenario, file: Option<&ConfigFile>, overrides: &[(String, String)]) -> Result<Self> {
        let mut cfg = Self::defaults(scenario);
        if let Some(file) = file {
            let section = file.sections.get(scenario.name()).map(Vec::as_slice).unwrap_or(&[]);
            for e in file.global.iter().chain(section) {
                cfg.set_raw(&e.key, &e.raw, Some(e.line))?;
            }
        }
        for (k, v) in overrides {
            cfg.set_raw(k, v, None)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn accepts(scenario: Scenario, key: &str) -> bool {
        lookup(scenario, key).is_some()
    }

    pub fn set_raw(&mut self, key: &str, raw: &str, line: Option<usize>) -> Result<()> {
        let at = line.map(|l| format!("line {l}: ")).unwrap_or_else(|| "override: ".to_string());
        let f = lookup(self.scenario, key)
            .ok_or_else(|| Error::Config(format!("{at}unknown key `{key}` for scenario `{}`", self.scenario.name())))?;
        let v = parse_value(f.kind, raw)
            .ok_or_else(|| Error::Config(format!("{at}key `{key}` expects {}, got `{raw}`", f.kind)))?;
        self.values.insert(key.to_string(), v);
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        let delta = self.f64("delta");
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Config(format!("key `delta` must lie in (0, 1), got {delta}")));
        }
        for key in ["trials", "mc_samples"] {
            let bad = match self.values.get(key) {
                Some(Value::Int(v)) => *v == 0,
                Some(Value::IntList(l)) => l.contains(&0),
                _ => false,
            };
            if bad {
                return Err(Error::Config(format!("key `{key}` must be at least 1")));
            }
        }
        Ok(())
    }

    fn get(&self, key: &str) -> &Value {
        self.values.get(key).unwrap_or_else(|| panic!("key `{key}` missing from schema"))
    }

    pub fn u64(&self, key: &str) -> u64 {
        match self.get(key) {
            Value::Int(v) => *v,
            v => panic!("key `{key}` is not an integer: {v:?}"),
        }
    }

    pub fn usize(&self, key: &str) -> usize {
        self.u64(key) as usize
    }

    pub fn f64(&self, key: &str) -> f64 {
        match self.get(key) {
            Value::Float(v) => *v,
            v => panic!("key `{key}` is not a float: {v:?}"),
        }
    }

    pub fn bool(&self, key: &str) -> bool {
        match self.get(key) {
            Value::Bool(v) => *v,
            v => panic!("key `{key}` is not a bool: {v:?}"),
        }
    }

    pub fn str(&self, key: &str) -> &str {
        match self.get(key) {
            Value::Str(v) => v,
            v => panic!("key `{key}` is not a string: {v:?}"),
        }
    }

    pub fn usize_list(&self, key: &str) -> Vec<usize> {
        match self.get(key) {
            Value::IntList(v) => v.iter().map(|&x| x as usize).collect(),
            v => panic!("key `{key}` is not an integer list: {v:?}"),
        }
    }

    pub fn f64_list(&self, key: &str) -> Vec<f64> {
        match self.get(key) {
            Value::FloatList(v) => v.clone(),
            v => panic!("key `{key}` is not a float list: {v:?}"),
        }
    }

    pub fn seed(&self) -> u64 {
        self.u64("seed")
    }

    pub fn delta(&self) -> f64 {
        self.f64("delta")
    }

    /// `key = value` lines in key order, the canonical form that gets hashed.
    pub fn canonical(&self) -> String {
        let mut s = format!("[{}]\n", self.scenario.name());
        for (k, v) in &self.values {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

pub fn parse_override(s: &str) -> Result<(String, String)> {
    let (k, v) =
        s.split_once('=').ok_or_else(|| Error::Config(format!("override `{s}` is not of the form key=value")))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}
