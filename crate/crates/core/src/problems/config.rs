//! Line-oriented `key = value` problem description.
//!
//! ```text
//! # Bessel order 7
//! name = bessel7
//! param n = 7
//! interval = unit
//! q = (4*n^2 - 1)/(4*x^2)
//! rho = 1
//! map = de
//! d = pi/2
//! beta_l = n
//! beta_r = 0.5
//! gamma_l = 1
//! gamma_r = 1
//! ```
//!
//! Numeric fields accept constant expressions over `pi` and parameters.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::expr::{self, Expr};
use super::{Reference, SturmLiouvilleProblem};
use crate::error::{Error, Result};
use crate::mesh::DecayProfile;
use crate::transform::{map_catalog, DecayKind, IntervalKind};

const KEYS: [&str; 13] = [
    "name",
    "interval",
    "q",
    "rho",
    "map",
    "kappa",
    "d",
    "beta_l",
    "beta_r",
    "gamma_l",
    "gamma_r",
    "alpha_se",
    "rho_decay_se",
];

/// A value together with where it starts in the source.
struct Entry {
    value: String,
    line: usize,
    column: usize,
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn column_of(line: &str, byte: usize) -> usize {
    line[..byte].chars().count() + 1
}

struct Fields {
    entries: BTreeMap<&'static str, Entry>,
    params: BTreeMap<String, f64>,
}

impl Fields {
    fn required(&self, key: &str) -> Result<&Entry> {
        self.entries
            .get(key)
            .ok_or_else(|| Error::Config(format!("missing mandatory field '{key}'")))
    }

    fn expression(&self, entry: &Entry) -> Result<Expr> {
        expr::parse_at(&entry.value, &self.params).map_err(|(offset, message)| {
            parse_error(
                entry.line,
                entry.column + entry.value[..offset].chars().count(),
                message,
            )
        })
    }

    fn number(&self, entry: &Entry) -> Result<f64> {
        let e = self.expression(entry)?;
        if e.uses_var() {
            return Err(parse_error(
                entry.line,
                entry.column,
                "expected a constant, found a reference to x",
            ));
        }
        let v = e.eval(f64::NAN);
        if !v.is_finite() {
            return Err(parse_error(
                entry.line,
                entry.column,
                format!("value {v} is not finite"),
            ));
        }
        Ok(v)
    }

    fn required_number(&self, key: &str) -> Result<f64> {
        self.number(self.required(key)?)
    }

    fn optional_number(&self, key: &str) -> Result<Option<f64>> {
        self.entries.get(key).map(|e| self.number(e)).transpose()
    }

    fn positive(&self, key: &str) -> Result<f64> {
        let v = self.required_number(key)?;
        if v > 0.0 {
            Ok(v)
        } else {
            let e = &self.entries[key];
            Err(parse_error(
                e.line,
                e.column,
                format!("'{key}' must be positive, got {v}"),
            ))
        }
    }
}

fn split_lines(text: &str) -> Result<Fields> {
    let mut entries: BTreeMap<&'static str, Entry> = BTreeMap::new();
    let mut raw_params: Vec<(String, Entry)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let content = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        if content.trim().is_empty() {
            continue;
        }
        let Some(eq) = content.find('=') else {
            let start = content.len() - content.trim_start().len();
            return Err(parse_error(
                line_no,
                column_of(raw, start),
                "expected 'key = value'",
            ));
        };
        let lhs = &content[..eq];
        let rhs = &content[eq + 1..];
        let value_start = eq + 1 + (rhs.len() - rhs.trim_start().len());
        let value = rhs.trim().to_string();
        let key_start = lhs.len() - lhs.trim_start().len();
        if value.is_empty() {
            return Err(parse_error(
                line_no,
                column_of(raw, eq) + 1,
                "missing value",
            ));
        }
        let entry = Entry {
            value,
            line: line_no,
            column: column_of(raw, value_start),
        };
        let words: Vec<&str> = lhs.split_whitespace().collect();
        match words.as_slice() {
            ["param", name] => {
                let valid = name
                    .chars()
                    .next()
                    .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                    && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
                if !valid || matches!(*name, "x" | "pi") {
                    return Err(parse_error(
                        line_no,
                        column_of(raw, key_start),
                        format!("invalid parameter name '{name}'"),
                    ));
                }
                if raw_params.iter().any(|(n, _)| n == name) {
                    return Err(parse_error(
                        line_no,
                        column_of(raw, key_start),
                        format!("duplicate parameter '{name}'"),
                    ));
                }
                raw_params.push((name.to_string(), entry));
            }
            [key] => {
                let Some(&known) = KEYS.iter().find(|k| *k == key) else {
                    return Err(parse_error(
                        line_no,
                        column_of(raw, key_start),
                        format!("unknown field '{key}'"),
                    ));
                };
                if entries.contains_key(known) {
                    return Err(parse_error(
                        line_no,
                        column_of(raw, key_start),
                        format!("duplicate field '{key}'"),
                    ));
                }
                entries.insert(known, entry);
            }
            _ => {
                return Err(parse_error(
                    line_no,
                    column_of(raw, key_start),
                    "expected 'key = value' or 'param name = value'",
                ));
            }
        }
    }

    // parameters may refer to parameters declared above them
    let mut fields = Fields {
        entries,
        params: BTreeMap::new(),
    };
    for (name, entry) in raw_params {
        let v = fields.number(&entry)?;
        fields.params.insert(name, v);
    }
    Ok(fields)
}

/// Parse a problem description. Mandatory fields are `interval`, `q`, `rho`,
/// `d`, `beta_l`, `beta_r`, `gamma_l` and `gamma_r`; an SE profile is
/// attached when `alpha_se` is present.
pub fn parse_problem_config(text: &str) -> Result<SturmLiouvilleProblem> {
    let fields = split_lines(text)?;

    let name = fields
        .entries
        .get("name")
        .map_or_else(|| "custom".to_string(), |e| e.value.clone());
    let interval_entry = fields.required("interval")?;
    let interval: IntervalKind = interval_entry.value.parse().map_err(|_| {
        parse_error(
            interval_entry.line,
            interval_entry.column,
            format!("unknown interval '{}'", interval_entry.value),
        )
    })?;
    let q = fields.expression(fields.required("q")?)?;
    let rho = fields.expression(fields.required("rho")?)?;

    let default_method = match fields.entries.get("map") {
        None => DecayKind::De,
        Some(e) => e.value.parse().map_err(|_| {
            parse_error(
                e.line,
                e.column,
                format!("unknown map '{}', expected se or de", e.value),
            )
        })?,
    };

    let d = fields.positive("d")?;
    let beta_l = fields.positive("beta_l")?;
    let beta_r = fields.positive("beta_r")?;
    let gamma_l = fields.positive("gamma_l")?;
    let gamma_r = fields.positive("gamma_r")?;
    let de_profile = DecayProfile::de(beta_l, beta_r, gamma_l, gamma_r, d)?;

    let se_profile = match fields.optional_number("alpha_se")? {
        Some(alpha) => {
            let rho_decay = fields.optional_number("rho_decay_se")?.unwrap_or(1.0);
            Some(DecayProfile::se(alpha, rho_decay, d)?)
        }
        None if fields.entries.contains_key("rho_decay_se") => {
            return Err(Error::Config(
                "'rho_decay_se' given without 'alpha_se'".into(),
            ));
        }
        None => None,
    };
    if default_method == DecayKind::Se && se_profile.is_none() {
        return Err(Error::Config("map = se needs 'alpha_se'".into()));
    }

    let kappa = fields.optional_number("kappa")?.unwrap_or(1.0);
    let de_map = map_catalog(interval, DecayKind::De, kappa)?;
    let se_map = map_catalog(interval, DecayKind::Se, 1.0)?;

    let q_eval = Arc::new(q);
    let rho_eval = Arc::new(rho);
    let problem = SturmLiouvilleProblem {
        name,
        interval,
        q: Arc::new(move |x| q_eval.eval(x)),
        rho: Arc::new(move |x| rho_eval.eval(x)),
        params: fields.params,
        se_profile,
        de_profile,
        se_map,
        de_map,
        default_method,
        reference: Reference::None,
    };
    problem.validate()?;
    Ok(problem)
}
