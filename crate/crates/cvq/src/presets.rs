//! Named parameter sets.
//!
//! A preset file is plain text: `[name]` opens a section, `key = value`
//! assigns inside it, `#` starts a comment. `inherit = other` copies the
//! keys of an earlier or later section before the section's own keys apply.
//! The file shipped with the crate is available through [`PresetFile::builtin`].

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{invalid, Result};

const BUILTIN: &str = include_str!("../presets/builtin.conf");

/// Parsed preset file: section name to raw key/value pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PresetFile {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl PresetFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| invalid("preset", format!("line {}: unterminated section header", i + 1)))?
                    .trim();
                if name.is_empty() {
                    return Err(invalid("preset", format!("line {}: empty section name", i + 1)));
                }
                if sections.contains_key(name) {
                    return Err(invalid("preset", format!("line {}: duplicate section `{name}`", i + 1)));
                }
                sections.insert(name.to_string(), BTreeMap::new());
                current = Some(name.to_string());
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| invalid("preset", format!("line {}: expected `key = value`", i + 1)))?;
            let section = current
                .as_ref()
                .ok_or_else(|| invalid("preset", format!("line {}: assignment outside a section", i + 1)))?;
            let key = k.trim();
            if key.is_empty() {
                return Err(invalid("preset", format!("line {}: empty key", i + 1)));
            }
            sections
                .get_mut(section)
                .expect("section was inserted")
                .insert(key.to_string(), v.trim().to_string());
        }
        Ok(PresetFile { sections })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid("preset", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The presets compiled into the crate (`table1`, `water_avg`, ...).
    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("shipped preset file parses")
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.sections.keys().map(String::as_str)
    }

    /// Resolves `name`, following `inherit` chains.
    pub fn resolve(&self, name: &str) -> Result<Params> {
        let mut chain = Vec::new();
        let mut next = Some(name.to_string());
        while let Some(n) = next {
            if chain.contains(&n) {
                return Err(invalid("preset", format!("inheritance cycle through `{n}`")));
            }
            let sec = self
                .sections
                .get(&n)
                .ok_or_else(|| invalid("preset", format!("unknown preset `{n}`")))?;
            next = sec.get("inherit").cloned();
            chain.push(n);
        }
        let mut values = BTreeMap::new();
        for n in chain.iter().rev() {
            for (k, v) in &self.sections[n] {
                if k != "inherit" {
                    values.insert(k.clone(), v.clone());
                }
            }
        }
        Ok(Params { values })
    }
}

/// Resolved flat parameter map with typed accessors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    values: BTreeMap<String, String>,
}

impl Params {
    pub fn set(&mut self, key: &str, value: &str) {
        self.values.insert(key.to_string(), value.to_string());
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| invalid("set", format!("expected key=value, got `{assignment}`")))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(invalid("set", "empty key"));
        }
        self.set(k, v.trim());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        let raw = self
            .get(key)
            .ok_or_else(|| invalid("preset", format!("missing parameter `{key}`")))?;
        raw.parse::<f64>()
            .map_err(|_| invalid("preset", format!("`{key}` = `{raw}` is not a number")))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            Some(_) => self.f64(key),
            None => Ok(default),
        }
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.get(key).unwrap_or(default)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}
