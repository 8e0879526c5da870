//! Run reports and their deterministic JSON rendering.
//!
//! Objects are `BTreeMap`s so keys come out sorted, and every float is
//! written with 17 significant digits, so identical runs give identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    List(Vec<Json>),
    Map(BTreeMap<String, Json>),
}

impl From<bool> for Json {
    fn from(v: bool) -> Self {
        Json::Bool(v)
    }
}

impl From<f64> for Json {
    fn from(v: f64) -> Self {
        Json::Num(v)
    }
}

impl From<usize> for Json {
    fn from(v: usize) -> Self {
        Json::Int(i64::try_from(v).expect("counts fit in i64"))
    }
}

impl From<u32> for Json {
    fn from(v: u32) -> Self {
        Json::Int(i64::from(v))
    }
}

impl From<u64> for Json {
    fn from(v: u64) -> Self {
        Json::Int(i64::try_from(v).unwrap_or(i64::MAX))
    }
}

impl From<&str> for Json {
    fn from(v: &str) -> Self {
        Json::Str(v.to_string())
    }
}

impl From<String> for Json {
    fn from(v: String) -> Self {
        Json::Str(v)
    }
}

impl<T: Into<Json>> From<Vec<T>> for Json {
    fn from(v: Vec<T>) -> Self {
        Json::List(v.into_iter().map(Into::into).collect())
    }
}

impl<T: Into<Json>> From<BTreeMap<String, T>> for Json {
    fn from(v: BTreeMap<String, T>) -> Self {
        Json::Map(v.into_iter().map(|(k, x)| (k, x.into())).collect())
    }
}

impl From<serde_json::Value> for Json {
    fn from(v: serde_json::Value) -> Self {
        use serde_json::Value;
        match v {
            Value::Null => Json::Null,
            Value::Bool(b) => Json::Bool(b),
            Value::Number(n) => match n.as_i64() {
                Some(i) => Json::Int(i),
                None => Json::Num(n.as_f64().unwrap_or(f64::NAN)),
            },
            Value::String(s) => Json::Str(s),
            Value::Array(items) => Json::List(items.into_iter().map(Json::from).collect()),
            Value::Object(map) => Json::Map(map.into_iter().map(|(k, x)| (k, Json::from(x))).collect()),
        }
    }
}

/// `{:.16e}`, or `null` for values JSON cannot carry.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

impl Json {
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        let pad = |n: usize| "  ".repeat(n);
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => write!(out, "{i}").unwrap(),
            Json::Num(v) => out.push_str(&format_float(*v)),
            Json::Str(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
            Json::List(items) if items.is_empty() => out.push_str("[]"),
            Json::List(items) => {
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    out.push_str(&pad(indent + 1));
                    item.write(out, indent + 1);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                out.push_str(&pad(indent));
                out.push(']');
            }
            Json::Map(map) if map.is_empty() => out.push_str("{}"),
            Json::Map(map) => {
                out.push_str("{\n");
                for (i, (k, v)) in map.iter().enumerate() {
                    out.push_str(&pad(indent + 1));
                    out.push_str(&serde_json::to_string(k).expect("strings serialize"));
                    out.push_str(": ");
                    v.write(out, indent + 1);
                    out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
                }
                out.push_str(&pad(indent));
                out.push('}');
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Bound {
    AtMost(f64),
    Holds,
}

#[derive(Debug, Clone, PartialEq)]
struct Check {
    value: Json,
    bound: Bound,
    passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    experiment: String,
    seed: u64,
    parameters: BTreeMap<String, Json>,
    values: BTreeMap<String, Json>,
    checks: BTreeMap<String, Check>,
    files: Vec<String>,
}

impl RunReport {
    pub fn new(experiment: &str, seed: u64) -> Self {
        RunReport {
            experiment: experiment.to_string(),
            seed,
            parameters: BTreeMap::new(),
            values: BTreeMap::new(),
            checks: BTreeMap::new(),
            files: Vec::new(),
        }
    }

    /// Records a resolved input parameter.
    pub fn param(&mut self, name: &str, value: impl Into<Json>) {
        self.parameters.insert(name.to_string(), value.into());
    }

    /// Records a measurement that carries no pass/fail verdict.
    pub fn value(&mut self, name: &str, value: impl Into<Json>) {
        self.values.insert(name.to_string(), value.into());
    }

    pub fn at_most(&mut self, name: &str, value: f64, tolerance: f64) {
        // NaN fails every comparison
        let passed = value <= tolerance;
        self.insert(name, Json::Num(value), Bound::AtMost(tolerance), passed);
    }

    pub fn holds(&mut self, name: &str, passed: bool) {
        self.insert(name, Json::Bool(passed), Bound::Holds, passed);
    }

    fn insert(&mut self, name: &str, value: Json, bound: Bound, passed: bool) {
        self.checks.insert(name.to_string(), Check { value, bound, passed });
    }

    pub fn add_file(&mut self, name: &str) {
        self.files.push(name.to_string());
    }

    pub fn passed(&self) -> bool {
        self.checks.values().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|(_, c)| !c.passed).map(|(k, _)| k.as_str()).collect()
    }

    pub fn to_json(&self) -> Json {
        let checks = self
            .checks
            .iter()
            .map(|(name, c)| {
                let mut m = BTreeMap::new();
                m.insert("passed".to_string(), Json::Bool(c.passed));
                m.insert("value".to_string(), c.value.clone());
                match c.bound {
                    Bound::AtMost(t) => {
                        m.insert("at_most".to_string(), Json::Num(t));
                    }
                    Bound::Holds => {}
                }
                (name.clone(), Json::Map(m))
            })
            .collect();
        let mut files = self.files.clone();
        files.sort();
        let mut top = BTreeMap::new();
        top.insert("experiment".to_string(), Json::from(self.experiment.as_str()));
        top.insert("seed".to_string(), Json::from(self.seed));
        top.insert("parameters".to_string(), Json::Map(self.parameters.clone()));
        top.insert("values".to_string(), Json::Map(self.values.clone()));
        top.insert("checks".to_string(), Json::Map(checks));
        top.insert("files".to_string(), Json::from(files));
        top.insert("passed".to_string(), Json::Bool(self.passed()));
        Json::Map(top)
    }
}
