//! Line-oriented scenario files: `[section]` headers, `key = value` lines and
//! `#` comments. Values are raw text; expressions are not quoted.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use serde_json::Value;
use thiserror::Error;

use super::expr::{parse_expression, Expr, ExprError, Var};

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
    /// 1-based column of the key and of the value.
    pub col: usize,
    pub value_col: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scenario {
    pub sections: Vec<Section>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("line {line}, column {col}: unknown key `{key}` in [{section}]")]
    UnknownKey { section: String, key: String, line: usize, col: usize },
    #[error("line {line}: unknown section [{section}]")]
    UnknownSection { section: String, line: usize },
    #[error("missing required key `{key}` in [{section}]")]
    Missing { section: String, key: String },
    #[error("line {line}, column {col}: `{key}` {message}")]
    BadValue { key: String, line: usize, col: usize, message: String },
    #[error("line {line}, column {col}: in `{key}`: {source}")]
    Expression { key: String, line: usize, col: usize, source: ExprError },
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut sections: Vec<Section> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            let trimmed = content.trim();
            if trimmed.is_empty() {
                continue;
            }
            let indent = content.len() - content.trim_start().len();
            if let Some(rest) = trimmed.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    return Err(ScenarioError::Syntax { line, col: indent + trimmed.len() + 1, message: "expected `]`".into() });
                };
                let name = name.trim().to_string();
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                    return Err(ScenarioError::Syntax { line, col: indent + 2, message: "bad section name".into() });
                }
                if let Some(prev) = sections.iter().find(|s| s.name == name) {
                    return Err(ScenarioError::Syntax {
                        line,
                        col: indent + 1,
                        message: format!("section [{name}] already opened on line {}", prev.line),
                    });
                }
                sections.push(Section { name, line, entries: Vec::new() });
                continue;
            }
            let Some(eq) = content.find('=') else {
                return Err(ScenarioError::Syntax { line, col: indent + 1, message: "expected `key = value`".into() });
            };
            let key = content[..eq].trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(ScenarioError::Syntax { line, col: indent + 1, message: "bad key".into() });
            }
            let after = &content[eq + 1..];
            let value = after.trim();
            let value_col = eq + 2 + (after.len() - after.trim_start().len());
            let Some(section) = sections.last_mut() else {
                return Err(ScenarioError::Syntax { line, col: indent + 1, message: "key outside any [section]".into() });
            };
            if let Some(prev) = section.entries.iter().find(|e| e.key == key) {
                return Err(ScenarioError::Syntax {
                    line,
                    col: indent + 1,
                    message: format!("`{key}` already set on line {}", prev.line),
                });
            }
            section.entries.push(Entry { key: key.into(), value: value.into(), line, col: indent + 1, value_col });
        }
        Ok(Self { sections })
    }

    pub fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.iter().find(|s| s.name == section)?.entries.iter().find(|e| e.key == key)
    }
}

/// Typed access to a scenario that remembers which keys were read and echoes
/// every resolved value, defaults included.
pub struct Reader<'a> {
    scenario: &'a Scenario,
    used: RefCell<BTreeSet<(String, String)>>,
    echo: RefCell<BTreeMap<String, BTreeMap<String, Value>>>,
}

impl<'a> Reader<'a> {
    pub fn new(scenario: &'a Scenario) -> Self {
        Self { scenario, used: RefCell::default(), echo: RefCell::default() }
    }

    fn lookup(&self, section: &str, key: &str) -> Option<&'a Entry> {
        self.used.borrow_mut().insert((section.into(), key.into()));
        self.scenario.entry(section, key)
    }

    fn record(&self, section: &str, key: &str, v: Value) {
        self.echo.borrow_mut().entry(section.into()).or_default().insert(key.into(), v);
    }

    fn bad(e: &Entry, message: impl Into<String>) -> ScenarioError {
        ScenarioError::BadValue { key: e.key.clone(), line: e.line, col: e.value_col, message: message.into() }
    }

    fn missing(section: &str, key: &str) -> ScenarioError {
        ScenarioError::Missing { section: section.into(), key: key.into() }
    }

    pub fn text(&self, section: &str, key: &str, default: Option<&str>) -> Result<String, ScenarioError> {
        let v = match (self.lookup(section, key), default) {
            (Some(e), _) => e.value.clone(),
            (None, Some(d)) => d.to_string(),
            (None, None) => return Err(Self::missing(section, key)),
        };
        self.record(section, key, Value::String(v.clone()));
        Ok(v)
    }

    pub fn f64(&self, section: &str, key: &str, default: Option<f64>) -> Result<f64, ScenarioError> {
        let v = match (self.lookup(section, key), default) {
            (Some(e), _) => match e.value.parse::<f64>() {
                Ok(v) if v.is_finite() => v,
                _ => return Err(Self::bad(e, "must be a finite number")),
            },
            (None, Some(d)) => d,
            (None, None) => return Err(Self::missing(section, key)),
        };
        self.record(section, key, serde_json::json!(v));
        Ok(v)
    }

    pub fn opt_f64(&self, section: &str, key: &str) -> Result<Option<f64>, ScenarioError> {
        if self.scenario.entry(section, key).is_none() {
            self.used.borrow_mut().insert((section.into(), key.into()));
            return Ok(None);
        }
        self.f64(section, key, None).map(Some)
    }

    pub fn usize(&self, section: &str, key: &str, default: Option<usize>) -> Result<usize, ScenarioError> {
        let v = match (self.lookup(section, key), default) {
            (Some(e), _) => e.value.parse::<usize>().map_err(|_| Self::bad(e, "must be a non-negative integer"))?,
            (None, Some(d)) => d,
            (None, None) => return Err(Self::missing(section, key)),
        };
        self.record(section, key, serde_json::json!(v));
        Ok(v)
    }

    /// A `usize` that must be at least one.
    pub fn count(&self, section: &str, key: &str, default: Option<usize>) -> Result<usize, ScenarioError> {
        let v = self.usize(section, key, default)?;
        match (v, self.scenario.entry(section, key)) {
            (0, Some(e)) => Err(Self::bad(e, "must be at least 1")),
            _ => Ok(v),
        }
    }

    pub fn bool(&self, section: &str, key: &str, default: Option<bool>) -> Result<bool, ScenarioError> {
        let v = match (self.lookup(section, key), default) {
            (Some(e), _) => match e.value.as_str() {
                "true" => true,
                "false" => false,
                _ => return Err(Self::bad(e, "must be `true` or `false`")),
            },
            (None, Some(d)) => d,
            (None, None) => return Err(Self::missing(section, key)),
        };
        self.record(section, key, Value::Bool(v));
        Ok(v)
    }

    /// An expression restricted to `allowed` variables.
    pub fn expr(
        &self,
        section: &str,
        key: &str,
        allowed: &[Var],
        default: Option<&str>,
    ) -> Result<Option<Expr>, ScenarioError> {
        let (src, line, col) = match (self.lookup(section, key), default) {
            (Some(e), _) => (e.value.as_str(), e.line, e.value_col),
            (None, Some(d)) => (d, 0, 0),
            (None, None) => return Ok(None),
        };
        let at = |source: ExprError| {
            let offset = match &source {
                ExprError::Syntax { offset, .. } => *offset,
                ExprError::Domain { span, .. } => span.start,
            };
            ScenarioError::Expression { key: key.into(), line, col: col + offset, source }
        };
        let e = parse_expression(src).map_err(at)?;
        if let Some(v) = e.vars().into_iter().find(|v| !allowed.contains(v)) {
            let names: Vec<_> = allowed.iter().map(|v| v.name()).collect();
            return Err(ScenarioError::BadValue {
                key: key.into(),
                line,
                col,
                message: format!("uses `{}`; allowed variables: {}", v.name(), names.join(", ")),
            });
        }
        self.record(section, key, Value::String(src.to_string()));
        Ok(Some(e))
    }

    /// Rejects every section or key that was never read.
    pub fn finish(&self) -> Result<(), ScenarioError> {
        let used = self.used.borrow();
        for s in &self.scenario.sections {
            if !used.iter().any(|(sec, _)| *sec == s.name) {
                return Err(ScenarioError::UnknownSection { section: s.name.clone(), line: s.line });
            }
            for e in &s.entries {
                if !used.contains(&(s.name.clone(), e.key.clone())) {
                    return Err(ScenarioError::UnknownKey {
                        section: s.name.clone(),
                        key: e.key.clone(),
                        line: e.line,
                        col: e.col,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn echo(&self) -> Value {
        serde_json::to_value(&*self.echo.borrow()).expect("string-keyed maps serialize")
    }
}
