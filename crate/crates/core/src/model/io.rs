//! JSON instance files.
//!
//! ```json
//! {
//!   "states": 2,
//!   "actions": ["convict", "acquit"],
//!   "prior": ["1/4", "3/4"],
//!   "sender_utility": [["2", "1"], ["3", "0"]],
//!   "receiver_utility": [["1", "0"], ["1/100", "1"]],
//!   "constraints": { "lb": ["0", "0"], "ub": ["1/4", "1"] }
//! }
//! ```
//!
//! `states` and `actions` are either counts or label lists. Utility rows are
//! states, columns are actions. Rationals are strings `p/q` (bare integers
//! are also accepted on input); output always uses the canonical form.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ConstraintProfile, Instance, Matrix};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Count(usize),
    Labels(Vec<String>),
}

impl Axis {
    pub fn len(&self) -> usize {
        match self {
            Axis::Count(n) => *n,
            Axis::Labels(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintsFile {
    pub lb: Vec<Rational>,
    pub ub: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub states: Axis,
    pub actions: Axis,
    pub prior: Vec<Rational>,
    pub sender_utility: Matrix,
    pub receiver_utility: Matrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<ConstraintsFile>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn from_instance(inst: &Instance, constraints: Option<&ConstraintProfile>) -> Self {
        InstanceFile {
            states: Axis::Count(inst.states()),
            actions: Axis::Count(inst.actions()),
            prior: inst.prior().to_vec(),
            sender_utility: inst.sender_utility().clone(),
            receiver_utility: inst.receiver_utility().clone(),
            constraints: constraints.map(|c| ConstraintsFile {
                lb: c.lower().to_vec(),
                ub: c.upper().to_vec(),
            }),
        }
    }

    /// Validates the document and builds the instance and optional profile.
    pub fn build(&self) -> Result<(Instance, Option<ConstraintProfile>)> {
        if self.prior.len() != self.states.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} states declared, prior has {} entries",
                self.states.len(),
                self.prior.len()
            )));
        }
        if let Some(row) = self.sender_utility.first() {
            if row.len() != self.actions.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} actions declared, utility rows have {} entries",
                    self.actions.len(),
                    row.len()
                )));
            }
        }
        let inst = Instance::new(
            self.prior.clone(),
            self.sender_utility.clone(),
            self.receiver_utility.clone(),
        )?;
        let constraints = match &self.constraints {
            None => None,
            Some(c) => {
                if c.lb.len() != inst.actions() || c.ub.len() != inst.actions() {
                    return Err(Error::DimensionMismatch(format!(
                        "constraints give {} lower and {} upper bounds for {} actions",
                        c.lb.len(),
                        c.ub.len(),
                        inst.actions()
                    )));
                }
                Some(ConstraintProfile::new(c.lb.clone(), c.ub.clone())?)
            }
        };
        Ok((inst, constraints))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    const SAMPLE: &str = r#"{
        "states": ["low", "high"],
        "actions": 2,
        "prior": ["1/4", "3/4"],
        "sender_utility": [["2", "1"], ["3", "0"]],
        "receiver_utility": [["1", "0"], ["1/100", 1]],
        "constraints": { "lb": ["0", "0"], "ub": ["1/4", "1"] }
    }"#;

    #[test]
    fn parses_sample() {
        let (inst, c) = InstanceFile::parse(SAMPLE).unwrap().build().unwrap();
        assert_eq!(
            inst,
            catalog::nonalignment_instance("1/100".parse().unwrap())
        );
        assert_eq!(c.unwrap().upper()[0], "1/4".parse().unwrap());
    }

    #[test]
    fn roundtrip_is_canonical() {
        let inst = catalog::ternary_instance();
        let c = ConstraintProfile::bounding(3, 0, Rational::zero(), Rational::new(1, 2)).unwrap();
        let text = InstanceFile::from_instance(&inst, Some(&c)).to_json_string();
        assert!(text.contains("\"1/3\""));
        let (back, bc) = InstanceFile::parse(&text).unwrap().build().unwrap();
        assert_eq!(back, inst);
        assert_eq!(bc, Some(c));
    }

    #[test]
    fn rejects_inconsistent_documents() {
        let wrong_states = SAMPLE.replace(r#"["low", "high"]"#, "3");
        assert!(matches!(
            InstanceFile::parse(&wrong_states).unwrap().build(),
            Err(Error::DimensionMismatch(_))
        ));
        let bad_rational = SAMPLE.replace("\"1/4\", \"3/4\"", "\"1/4\", \"3/0\"");
        assert!(InstanceFile::parse(&bad_rational).is_err());
        let short_ub = SAMPLE.replace(r#""ub": ["1/4", "1"]"#, r#""ub": ["1/4"]"#);
        assert!(InstanceFile::parse(&short_ub).unwrap().build().is_err());
        let extra = SAMPLE.replace("\"actions\": 2,", "\"actions\": 2, \"bogus\": 1,");
        assert!(InstanceFile::parse(&extra).is_err());
    }
}
