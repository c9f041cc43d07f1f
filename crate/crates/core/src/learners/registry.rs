use std::collections::BTreeMap;
use std::path::Path;

use serde::ser::{Serialize, SerializeMap, Serializer};

use super::params_from;
use crate::{Error, Result};

/// Parameter name to value.
pub type Params = BTreeMap<String, f64>;

pub(crate) const DEFAULT_MAX_DEPTH: usize = 30;

/// Default tuning parameters per method, in a fixed order.
///
/// Besides the four built-in learners the registry carries the documented
/// defaults of methods that only enter through prediction import (NNet,
/// PCR, ENet) so that a user parameter file can round-trip them.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamRegistry {
    entries: Vec<(String, Params)>,
}

impl ParamRegistry {
    pub fn get(&self, method: &str) -> Option<&Params> {
        self.entries.iter().find(|(m, _)| m == method).map(|(_, p)| p)
    }

    pub fn methods(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(m, _)| m.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Params)> {
        self.entries.iter().map(|(m, p)| (m.as_str(), p))
    }

    /// Sets one parameter. Unknown methods or parameter names are errors.
    pub fn set(&mut self, method: &str, param: &str, value: f64) -> Result<()> {
        let params = self
            .entries
            .iter_mut()
            .find(|(m, _)| m == method)
            .map(|(_, p)| p)
            .ok_or_else(|| Error::Argument(format!("unknown method '{method}' in parameters")))?;
        match params.get_mut(param) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::Argument(format!(
                "method '{method}' has no parameter '{param}'"
            ))),
        }
    }

    /// Map-merges `overrides` (method -> param -> value) over the defaults.
    pub fn merge(&mut self, overrides: &BTreeMap<String, Params>) -> Result<()> {
        for (method, params) in overrides {
            for (param, &value) in params {
                self.set(method, param, value)?;
            }
        }
        Ok(())
    }

    /// Merges a JSON parameter file of the form `{"KNN": {"k": 5}, ...}`.
    pub fn merge_json_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let overrides: BTreeMap<String, Params> = serde_json::from_str(&text)?;
        self.merge(&overrides)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("registry serializes")
    }
}

impl Serialize for ParamRegistry {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.entries.len()))?;
        for (m, p) in &self.entries {
            if p.is_empty() {
                map.serialize_entry(m, &Option::<()>::None)?;
            } else {
                map.serialize_entry(m, p)?;
            }
        }
        map.end()
    }
}

/// Default parameters for an `n` x `p` problem.
///
/// `classify` and `nfolds` are accepted for signature compatibility; none of
/// the current defaults depend on them.
pub fn make_model_defaults(n: usize, p: usize, classify: bool, nfolds: usize) -> ParamRegistry {
    let _ = (n, classify, nfolds);
    let mtry = (p.max(1) as f64).sqrt().ceil();
    ParamRegistry {
        entries: vec![
            ("NNet".into(), params_from([("size", 2.0), ("decay", 0.0)])),
            ("PCR".into(), Params::new()),
            ("ENet".into(), params_from([("lambda", 1.0)])),
            ("KNN".into(), params_from([("k", 10.0)])),
            ("Ridge".into(), params_from([("lambda", 1.0)])),
            (
                "Tree".into(),
                params_from([("max_depth", DEFAULT_MAX_DEPTH as f64), ("min_leaf", 5.0)]),
            ),
            (
                "RF".into(),
                params_from([("n_trees", 100.0), ("mtry", mtry), ("min_leaf", 5.0)]),
            ),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_entries() {
        let reg = make_model_defaults(3311, 171, true, 10);
        let nnet = reg.get("NNet").unwrap();
        assert_eq!(nnet["size"], 2.0);
        assert_eq!(nnet["decay"], 0.0);
        assert_eq!(reg.get("ENet").unwrap()["lambda"], 1.0);
        assert!(reg.get("PCR").unwrap().is_empty());
        assert_eq!(reg.methods().take(3).collect::<Vec<_>>(), ["NNet", "PCR", "ENet"]);
        assert_eq!(reg.get("RF").unwrap()["mtry"], 14.0);
    }

    #[test]
    fn override_reads_back() {
        let mut reg = make_model_defaults(100, 5, true, 10);
        reg.set("NNet", "size", 10.0).unwrap();
        let nnet = reg.get("NNet").unwrap();
        assert_eq!(nnet["size"], 10.0);
        assert_eq!(nnet["decay"], 0.0);
        assert!(reg.set("NNet", "layers", 1.0).is_err());
        assert!(reg.set("SVM", "cost", 1.0).is_err());
    }

    #[test]
    fn json_shape() {
        let reg = make_model_defaults(10, 4, false, 5);
        let v: serde_json::Value = serde_json::from_str(&reg.to_json_pretty()).unwrap();
        assert!(v["PCR"].is_null());
        assert_eq!(v["KNN"]["k"], 10.0);
        assert_eq!(v["RF"]["mtry"], 2.0);
    }
}
