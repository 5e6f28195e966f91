//! Flat key/value scenario format with `[section]` headers. Hand-parsed so
//! fixtures stay diff-able and errors can name the exact field.

use std::collections::BTreeMap;

use crate::error::ScenarioError;

#[derive(Debug, Default)]
pub(crate) struct ConfigDoc {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl ConfigDoc {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut doc = ConfigDoc::default();
        let mut current: Option<String> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.starts_with('[') {
                let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) else {
                    return Err(ScenarioError::field(
                        format!("line {}", lineno + 1),
                        format!("malformed section header `{line}`"),
                    ));
                };
                let name = name.trim().to_string();
                doc.sections.entry(name.clone()).or_default();
                current = Some(name);
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ScenarioError::field(
                    format!("line {}", lineno + 1),
                    format!("expected `key = value`, got `{line}`"),
                ));
            };
            let Some(section) = &current else {
                return Err(ScenarioError::field(
                    key.trim(),
                    "key appears before any [section] header",
                ));
            };
            doc.sections
                .get_mut(section)
                .expect("section registered")
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(doc)
    }

    pub fn section(&self, name: &str) -> Result<Section<'_>, ScenarioError> {
        match self.sections.get(name) {
            Some(entries) => Ok(Section {
                name: name.to_string(),
                entries,
            }),
            None => Err(ScenarioError::field(name, "missing section")),
        }
    }

    pub fn optional_section(&self, name: &str) -> Option<Section<'_>> {
        self.sections.get(name).map(|entries| Section {
            name: name.to_string(),
            entries,
        })
    }

    /// Sections named `prefix <rest>`, e.g. `mass grass`.
    pub fn sections_with_prefix<'a>(
        &'a self,
        prefix: &'a str,
    ) -> impl Iterator<Item = (String, Section<'a>)> + 'a {
        self.sections.iter().filter_map(move |(name, entries)| {
            let rest = name.strip_prefix(prefix)?.trim();
            if rest.is_empty() {
                return None;
            }
            Some((
                rest.to_string(),
                Section {
                    name: name.clone(),
                    entries,
                },
            ))
        })
    }
}

pub(crate) struct Section<'a> {
    name: String,
    entries: &'a BTreeMap<String, String>,
}

impl<'a> Section<'a> {
    fn path(&self, key: &str) -> String {
        format!("{}.{}", self.name, key)
    }

    pub fn raw(&self, key: &str) -> Result<&str, ScenarioError> {
        self.entries
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| ScenarioError::field(self.path(key), "missing"))
    }

    pub fn raw_or(&self, key: &str, default: &'a str) -> &str {
        self.entries.get(key).map_or(default, String::as_str)
    }

    pub fn f64(&self, key: &str) -> Result<f64, ScenarioError> {
        let raw = self.raw(key)?;
        raw.parse()
            .map_err(|_| ScenarioError::field(self.path(key), format!("not a number: `{raw}`")))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, ScenarioError> {
        match self.entries.get(key) {
            Some(raw) => raw.parse().map_err(|_| {
                ScenarioError::field(self.path(key), format!("not a number: `{raw}`"))
            }),
            None => Ok(default),
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize, ScenarioError> {
        let raw = self.raw(key)?;
        raw.parse()
            .map_err(|_| ScenarioError::field(self.path(key), format!("not a count: `{raw}`")))
    }

    pub fn u64(&self, key: &str) -> Result<u64, ScenarioError> {
        let raw = self.raw(key)?;
        raw.parse()
            .map_err(|_| ScenarioError::field(self.path(key), format!("not an integer: `{raw}`")))
    }

    pub fn err(&self, key: &str, reason: impl Into<String>) -> ScenarioError {
        ScenarioError::field(self.path(key), reason)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_values() {
        let doc = ConfigDoc::parse("# comment\n[robot]\nx = 1.5\n[mass grass]\ndelta_m = 1\n")
            .unwrap();
        assert_eq!(doc.section("robot").unwrap().f64("x").unwrap(), 1.5);
        let masses: Vec<_> = doc.sections_with_prefix("mass").map(|(n, _)| n).collect();
        assert_eq!(masses, vec!["grass"]);
    }

    #[test]
    fn errors_name_the_field() {
        let doc = ConfigDoc::parse("[robot]\nx = oops\n").unwrap();
        let err = doc.section("robot").unwrap().f64("x").unwrap_err();
        assert!(err.to_string().contains("robot.x"));
        let err = doc.section("robot").unwrap().f64("y").unwrap_err();
        assert!(err.to_string().contains("robot.y"));
    }
}
