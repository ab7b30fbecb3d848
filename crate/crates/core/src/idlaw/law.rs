//! JSON law files: either a Lévy triplet or a named closed form.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::exponent::CharExponent;
use super::registry::ClosedForm;
use super::triplet::LevyTriplet;
use crate::error::{IdLawError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LawSpec {
    ClosedForm(ClosedForm),
    Triplet(LevyTriplet),
}

impl LawSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| IdLawError::LawFormat(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn dim(&self) -> usize {
        match self {
            LawSpec::ClosedForm(cf) => cf.dim(),
            LawSpec::Triplet(t) => t.dim,
        }
    }

    pub fn exponent(&self) -> Result<CharExponent> {
        match self {
            LawSpec::ClosedForm(cf) => CharExponent::closed_form(cf.clone()),
            LawSpec::Triplet(t) => CharExponent::from_triplet(t.clone()),
        }
    }

    pub fn triplet(&self) -> Result<LevyTriplet> {
        match self {
            LawSpec::ClosedForm(cf) => {
                cf.validate()?;
                cf.to_triplet()
            }
            LawSpec::Triplet(t) => Ok(t.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_triplet_file() {
        let law = LawSpec::from_json(
            r#"{ "dim": 1, "shift": [0.5], "cov": [[1.0]],
                 "levy": { "rays": [ { "dir": [1.0],
                    "atoms": [{"r": 2.0, "m": 1.0}],
                    "segments": [{"lo": 3.0, "hi": null, "c": 1.0, "p": -2.0}] } ] } }"#,
        )
        .unwrap();
        let t = law.triplet().unwrap();
        assert_eq!(t.levy.rays[0].radial.atoms.len(), 1);
        assert!(t.levy.rays[0].radial.segments[0].hi.is_infinite());
        assert!(law.exponent().is_ok());
    }

    #[test]
    fn rejects_unknown_keys() {
        let nested = r#"{ "dim": 1, "shift": [0.0], "cov": [[1.0]],
            "levy": { "rays": [ { "dir": [1.0], "radial": { "atoms": [{"r": 2.0, "m": 1.0}] } } ] } }"#;
        assert!(LawSpec::from_json(nested).is_err());
        let typo = r#"{"closed_form":"gaussian","params":{"mean":[0.0],"covariance":[[1.0]]}}"#;
        assert!(LawSpec::from_json(typo).is_err());
    }

    #[test]
    fn parses_closed_forms() {
        let g = LawSpec::from_json(
            r#"{"closed_form":"gaussian","params":{"mean":[0.0],"cov":[[1.0]]}}"#,
        )
        .unwrap();
        assert_eq!(g.exponent().unwrap().at(2.0).unwrap().re, -2.0);
        let cp = LawSpec::from_json(
            r#"{"closed_form":"compound_poisson","params":{"rate":2.0,
                "jumps":[{"x":[2.0],"p":0.5},{"x":[-2.0],"p":0.5}]}}"#,
        )
        .unwrap();
        assert_eq!(cp.dim(), 1);
        assert!(cp.triplet().unwrap().validate().is_valid());
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(
            LawSpec::from_json(r#"{"closed_form":"stable","params":{}}"#),
            Err(IdLawError::LawFormat(_))
        ));
    }
}
