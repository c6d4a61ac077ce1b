//! JSON documents for models and derivations.
//!
//! Model documents name facets by their key, the sorted vertex ids joined
//! with `+`. The canonical rendering sorts every object key and list, so
//! saving a loaded canonical document reproduces it byte for byte.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{validate_complex, AgentId, FacetId, InvalidComplex, RawComplex, VertexId};
use crate::logic::{parse, SyntaxError};
use crate::model::{validate_model, ModelError, SecrecyModel};
use crate::proof::{Derivation, Justification, Scheme, Step, UnknownScheme};

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Complex(#[from] InvalidComplex),
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("invalid facet key {0:?}")]
    BadFacetKey(String),
    #[error("invalid vertex id {0:?}")]
    BadVertexId(String),
    #[error("step {step}: {source}")]
    Syntax { step: usize, source: SyntaxError },
    #[error("step {step}: {source}")]
    Scheme { step: usize, source: UnknownScheme },
    #[error("step {step}: invalid agent name {agent:?}")]
    BadAgent { step: usize, agent: String },
}

impl DocumentError {
    /// Whether the input could not be read at all, as opposed to describing
    /// an invalid model.
    pub fn is_malformed(&self) -> bool {
        !matches!(self, DocumentError::Complex(_) | DocumentError::Model(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub id: String,
    pub colour: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub agents: Vec<String>,
    pub vertices: Vec<VertexEntry>,
    pub facets: Vec<Vec<String>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub neighborhoods: BTreeMap<String, Vec<Vec<String>>>,
}

fn facet_key(key: &str) -> Result<FacetId, DocumentError> {
    FacetId::parse_key(key).ok_or_else(|| DocumentError::BadFacetKey(key.to_string()))
}

impl ModelDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_model(model: &SecrecyModel) -> Self {
        let c = model.complex();
        let raw = c.to_raw();
        let mut valuation: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (fix, facet) in c.facets().iter().enumerate() {
            let atoms = model.atoms_at(fix);
            if !atoms.is_empty() {
                valuation.insert(facet.key(), atoms.into_iter().map(str::to_string).collect());
            }
        }
        let mut neighborhoods = BTreeMap::new();
        for (vix, events) in model.neighborhoods().iter().enumerate() {
            if !events.is_empty() {
                let events = events
                    .iter()
                    .map(|e| c.facet_ids(e).iter().map(FacetId::key).collect())
                    .collect();
                neighborhoods.insert(c.vertices()[vix].to_string(), events);
            }
        }
        ModelDocument {
            agents: raw.agents,
            vertices: raw
                .vertices
                .into_iter()
                .map(|(id, colour)| VertexEntry { id, colour })
                .collect(),
            facets: raw.facets,
            valuation,
            neighborhoods,
        }
        .canonical()
    }

    /// Validates the complex, then the model.
    pub fn to_model(&self) -> Result<SecrecyModel, DocumentError> {
        let raw = RawComplex {
            agents: self.agents.clone(),
            vertices: self
                .vertices
                .iter()
                .map(|v| (v.id.clone(), v.colour.clone()))
                .collect(),
            facets: self.facets.clone(),
        };
        let complex = Arc::new(validate_complex(&raw)?);
        let mut valuation: BTreeMap<FacetId, BTreeSet<String>> = BTreeMap::new();
        for (key, atoms) in &self.valuation {
            valuation
                .entry(facet_key(key)?)
                .or_default()
                .extend(atoms.iter().cloned());
        }
        let mut neighborhoods: BTreeMap<VertexId, Vec<BTreeSet<FacetId>>> = BTreeMap::new();
        for (v, events) in &self.neighborhoods {
            let vid =
                VertexId::new(v.as_str()).ok_or_else(|| DocumentError::BadVertexId(v.clone()))?;
            let events = events
                .iter()
                .map(|e| {
                    e.iter()
                        .map(|k| facet_key(k))
                        .collect::<Result<BTreeSet<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            neighborhoods.entry(vid).or_default().extend(events);
        }
        Ok(validate_model(complex, &valuation, &neighborhoods)?)
    }

    /// Sorted lists everywhere, facet keys normalized, empty entries dropped.
    pub fn canonical(&self) -> Self {
        let norm_key = |k: &String| FacetId::parse_key(k).map_or_else(|| k.clone(), |f| f.key());
        let mut agents = self.agents.clone();
        agents.sort();
        let mut vertices = self.vertices.clone();
        vertices.sort();
        let mut facets: Vec<Vec<String>> = self
            .facets
            .iter()
            .map(|f| {
                let mut f = f.clone();
                f.sort();
                f
            })
            .collect();
        facets.sort();
        let mut valuation: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (k, atoms) in &self.valuation {
            valuation
                .entry(norm_key(k))
                .or_default()
                .extend(atoms.iter().cloned());
        }
        valuation.retain(|_, atoms| !atoms.is_empty());
        for atoms in valuation.values_mut() {
            atoms.sort();
            atoms.dedup();
        }
        let mut neighborhoods = BTreeMap::new();
        for (v, events) in &self.neighborhoods {
            let set: BTreeSet<Vec<String>> = events
                .iter()
                .map(|e| {
                    let keys: BTreeSet<String> = e.iter().map(norm_key).collect();
                    keys.into_iter().collect()
                })
                .collect();
            if !set.is_empty() {
                neighborhoods.insert(v.clone(), set.into_iter().collect());
            }
        }
        ModelDocument {
            agents,
            vertices,
            facets,
            valuation,
            neighborhoods,
        }
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let value = serde_json::to_value(self.canonical()).expect("documents serialize");
        let mut text = serde_json::to_string_pretty(&value).expect("values serialize");
        text.push('\n');
        text
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum RuleRef {
    Mp([usize; 2]),
    Nec((usize, String)),
    Re((usize, String)),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepRule {
    Axiom(String),
    Rule(RuleRef),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepEntry {
    pub formula: String,
    pub by: StepRule,
}

/// A derivation file. Step indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivationDocument {
    pub name: String,
    pub steps: Vec<StepEntry>,
}

impl DerivationDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_derivation(d: &Derivation) -> Self {
        let steps = d
            .steps
            .iter()
            .map(|s| StepEntry {
                formula: s.formula.to_string(),
                by: match &s.by {
                    Justification::Axiom(scheme) => StepRule::Axiom(scheme.name().to_string()),
                    Justification::Mp(i, j) => StepRule::Rule(RuleRef::Mp([*i, *j])),
                    Justification::Nec(i, a) => StepRule::Rule(RuleRef::Nec((*i, a.to_string()))),
                    Justification::Re(i, a) => StepRule::Rule(RuleRef::Re((*i, a.to_string()))),
                },
            })
            .collect();
        DerivationDocument {
            name: d.name.clone(),
            steps,
        }
    }

    pub fn to_derivation(&self) -> Result<Derivation, DocumentError> {
        let mut steps = Vec::with_capacity(self.steps.len());
        for (step, entry) in self.steps.iter().enumerate() {
            let formula =
                parse(&entry.formula).map_err(|source| DocumentError::Syntax { step, source })?;
            let agent = |name: &str| {
                AgentId::new(name).ok_or_else(|| DocumentError::BadAgent {
                    step,
                    agent: name.to_string(),
                })
            };
            let by = match &entry.by {
                StepRule::Axiom(name) => Justification::Axiom(
                    name.parse::<Scheme>()
                        .map_err(|source| DocumentError::Scheme { step, source })?,
                ),
                StepRule::Rule(RuleRef::Mp([i, j])) => Justification::Mp(*i, *j),
                StepRule::Rule(RuleRef::Nec((i, a))) => Justification::Nec(*i, agent(a)?),
                StepRule::Rule(RuleRef::Re((i, a))) => Justification::Re(*i, agent(a)?),
            };
            steps.push(Step { formula, by });
        }
        Ok(Derivation {
            name: self.name.clone(),
            steps,
        })
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("documents serialize");
        text.push('\n');
        text
    }
}
