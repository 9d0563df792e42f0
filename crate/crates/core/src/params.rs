//! Key-value parameters for catalog problems.

use std::collections::BTreeMap;

use crate::error::{invalid_param, OptError, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum ParamValue {
    Num(f64),
    List(Vec<f64>),
    Text(String),
    Bool(bool),
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Num(v)
    }
}

impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        ParamValue::Num(v as f64)
    }
}

impl From<Vec<f64>> for ParamValue {
    fn from(v: Vec<f64>) -> Self {
        ParamValue::List(v)
    }
}

impl From<&[f64]> for ParamValue {
    fn from(v: &[f64]) -> Self {
        ParamValue::List(v.to_vec())
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_string())
    }
}

impl From<bool> for ParamValue {
    fn from(v: bool) -> Self {
        ParamValue::Bool(v)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Params(BTreeMap<String, ParamValue>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl Into<ParamValue>) -> Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    pub fn insert(&mut self, key: &str, value: impl Into<ParamValue>) {
        self.0.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&ParamValue> {
        self.0.get(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Rejects keys outside `allowed`.
    pub fn expect_keys(&self, problem: &str, allowed: &[&str]) -> Result<()> {
        for k in self.keys() {
            if !allowed.contains(&k) {
                return Err(OptError::InvalidParam {
                    name: k.to_string(),
                    reason: format!(
                        "unknown for `{problem}` (accepted: {})",
                        if allowed.is_empty() {
                            "none".to_string()
                        } else {
                            allowed.join(", ")
                        }
                    ),
                });
            }
        }
        Ok(())
    }

    pub fn num(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(ParamValue::Num(v)) if v.is_finite() => Ok(*v),
            Some(other) => Err(invalid_param(key, format!("expected a finite number, got {other:?}"))),
        }
    }

    pub fn positive(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.num(key, default)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(invalid_param(key, format!("must be > 0, got {v}")))
        }
    }

    pub fn count(&self, key: &str, default: usize) -> Result<usize> {
        let v = self.num(key, default as f64)?;
        if v >= 1.0 && v.fract() == 0.0 && v <= 1e9 {
            Ok(v as usize)
        } else {
            Err(invalid_param(key, format!("must be a positive integer, got {v}")))
        }
    }

    pub fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(key) {
            None => Ok(None),
            Some(ParamValue::List(v)) => {
                if v.iter().all(|x| x.is_finite()) {
                    Ok(Some(v.clone()))
                } else {
                    Err(invalid_param(key, "entries must be finite"))
                }
            }
            Some(ParamValue::Num(v)) => Ok(Some(vec![*v])),
            Some(other) => Err(invalid_param(key, format!("expected a list, got {other:?}"))),
        }
    }

    pub fn text(&self, key: &str, default: &str) -> Result<String> {
        match self.get(key) {
            None => Ok(default.to_string()),
            Some(ParamValue::Text(s)) => Ok(s.clone()),
            Some(other) => Err(invalid_param(key, format!("expected a string, got {other:?}"))),
        }
    }
}
