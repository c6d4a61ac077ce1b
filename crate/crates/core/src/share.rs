//! Auxiliary-colour models and the share model.
//!
//! An auxiliary-colour model carries an extra colour `*` with no modality.
//! The share model removes it: each aux facet `X` is split into facets
//! `X^σ = {(a, v_a(X), σ(a)) | a ∈ A}` where the shares `σ(a) ∈ Z_m` sum to
//! the facet's code `ι(X)`, its index in canonical facet order. Any modulus
//! `m ≥ |Fac|` keeps `ι` injective, which together with subtraction in the
//! group is all the construction relies on; a finite group keeps the result
//! finite.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::checker::{EvalError, Evaluator};
use crate::complex::{validate_complex, AgentId, FacetId, VertexId, AUX_COLOUR};
use crate::facet_set::FacetSet;
use crate::logic::Formula;
use crate::model::{validate_model, ModelCandidate, ModelError, SecrecyModel};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ShareError {
    #[error("the model already uses the reserved colour {AUX_COLOUR:?}")]
    ReservedColourInUse,
    #[error("the model has no {AUX_COLOUR:?} colour")]
    NotAuxiliary,
    #[error("the share construction needs at least two agents")]
    SingleAgent,
    #[error("modulus {modulus} is smaller than the number of facets {facets}")]
    ModulusTooSmall { modulus: u64, facets: usize },
    #[error("facets {first} and {second} differ for agent {agent}")]
    NotIndistinguishable {
        first: String,
        second: String,
        agent: String,
    },
    #[error("unknown facet {0}")]
    UnknownFacet(String),
    #[error("unknown agent {0}")]
    UnknownAgent(String),
}

/// An element of `Z_m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GroupElem {
    pub residue: u64,
    pub modulus: u64,
}

impl GroupElem {
    pub fn new(value: i128, modulus: u64) -> Self {
        GroupElem {
            residue: value.rem_euclid(modulus as i128) as u64,
            modulus,
        }
    }
}

impl std::ops::Add for GroupElem {
    type Output = GroupElem;

    fn add(self, rhs: GroupElem) -> GroupElem {
        debug_assert_eq!(self.modulus, rhs.modulus);
        GroupElem::new(self.residue as i128 + rhs.residue as i128, self.modulus)
    }
}

impl std::ops::Sub for GroupElem {
    type Output = GroupElem;

    fn sub(self, rhs: GroupElem) -> GroupElem {
        debug_assert_eq!(self.modulus, rhs.modulus);
        GroupElem::new(self.residue as i128 - rhs.residue as i128, self.modulus)
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.residue)
    }
}

/// Shares per agent.
pub type ShareAssignment = BTreeMap<AgentId, GroupElem>;

/// A secrecy model over `A ∪ {*}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AuxModel(SecrecyModel);

impl AuxModel {
    pub fn new(model: SecrecyModel) -> Result<Self, ShareError> {
        if !model.is_aux() {
            return Err(ShareError::NotAuxiliary);
        }
        Ok(AuxModel(model))
    }

    pub fn model(&self) -> &SecrecyModel {
        &self.0
    }

    pub fn into_model(self) -> SecrecyModel {
        self.0
    }

    /// Adds a fresh `*`-vertex to every facet, so that `~_*` is the identity.
    /// Valuation and neighborhoods carry over.
    pub fn from_plain(model: &SecrecyModel) -> Result<Self, ShareError> {
        if model.is_aux() {
            return Err(ShareError::ReservedColourInUse);
        }
        let c = model.complex();
        let mut raw = c.to_raw();
        raw.agents.push(AUX_COLOUR.to_string());
        let taken: BTreeSet<&str> = c.vertices().iter().map(VertexId::as_str).collect();
        let mut prefix = AUX_COLOUR.to_string();
        while taken.iter().any(|v| {
            v.starts_with(&prefix) && v[prefix.len()..].bytes().all(|b| b.is_ascii_digit())
        }) {
            prefix.push_str(AUX_COLOUR);
        }
        let mut renamed = HashMap::new();
        for (fix, facet) in raw.facets.iter_mut().enumerate() {
            let star = format!("{prefix}{fix}");
            raw.vertices.push((star.clone(), AUX_COLOUR.to_string()));
            let old = c.facets()[fix].clone();
            facet.push(star.clone());
            renamed.insert(
                old.clone(),
                FacetId::new(
                    old.vertices()
                        .iter()
                        .cloned()
                        .chain([VertexId::from(star.as_str())]),
                ),
            );
        }
        let complex = Arc::new(
            validate_complex(&raw).expect("adding a fresh colour keeps the complex valid"),
        );
        let mut valuation: BTreeMap<FacetId, BTreeSet<String>> = BTreeMap::new();
        for (atom, set) in model.valuation() {
            for fix in set.iter() {
                valuation
                    .entry(renamed[&c.facets()[fix]].clone())
                    .or_default()
                    .insert(atom.clone());
            }
        }
        let mut neighborhoods = BTreeMap::new();
        for (vix, events) in model.neighborhoods().iter().enumerate() {
            if events.is_empty() {
                continue;
            }
            let lifted = events
                .iter()
                .map(|e| e.iter().map(|f| renamed[&c.facets()[f]].clone()).collect())
                .collect();
            neighborhoods.insert(c.vertices()[vix].clone(), lifted);
        }
        let aux = validate_model(complex, &valuation, &neighborhoods)
            .expect("(SN) ignores the fresh colour, so it still holds");
        Ok(AuxModel(aux))
    }
}

/// The share model of an aux model over `Z_m`.
#[derive(Clone, Debug)]
pub struct ShareModel {
    model: SecrecyModel,
    aux: AuxModel,
    modulus: u64,
    /// The real agents, sorted; shares are indexed in this order.
    agents: Vec<AgentId>,
    /// Aux colour index of each real agent.
    aux_colours: Vec<usize>,
    /// Share facet index to `(aux facet index, shares)`.
    origin: Vec<(usize, Vec<u64>)>,
    index: HashMap<(usize, Vec<u64>), usize>,
}

fn share_vertex(agent: &AgentId, v: &VertexId, g: u64) -> String {
    format!("{agent}@{v}#{g}")
}

/// Every share vector over `agents` agents summing to `code` mod
/// `modulus`, the last share determined by the others.
fn share_vectors(agents: usize, modulus: u64, code: u64) -> impl Iterator<Item = Vec<u64>> {
    let free = modulus.pow(agents as u32 - 1);
    (0..free).map(move |mut rest| {
        let mut shares = Vec::with_capacity(agents);
        for _ in 0..agents - 1 {
            shares.push(rest % modulus);
            rest /= modulus;
        }
        shares.reverse();
        let sum: u64 = shares.iter().sum::<u64>() % modulus;
        shares.push((code + modulus - sum) % modulus);
        shares
    })
}

impl ShareModel {
    /// Builds the share model with modulus `modulus` (at least `|Fac|`).
    pub fn build(aux: &AuxModel, modulus: u64) -> Result<ShareModel, ShareError> {
        let c = aux.model().complex();
        let agents: Vec<AgentId> = c.agents().cloned().collect();
        if agents.len() < 2 {
            return Err(ShareError::SingleAgent);
        }
        if modulus < c.num_facets() as u64 {
            return Err(ShareError::ModulusTooSmall {
                modulus,
                facets: c.num_facets(),
            });
        }
        let aux_colours: Vec<usize> = agents
            .iter()
            .map(|a| c.colour_index(a).expect("agent of the complex"))
            .collect();

        let mut raw = crate::complex::RawComplex {
            agents: agents.iter().map(ToString::to_string).collect(),
            ..Default::default()
        };
        for (a, &colour) in agents.iter().zip(&aux_colours) {
            for &v in c.vertices_of_colour(colour) {
                for g in 0..modulus {
                    raw.vertices
                        .push((share_vertex(a, &c.vertices()[v], g), a.to_string()));
                }
            }
        }
        let mut built = Vec::new();
        for fix in 0..c.num_facets() {
            for shares in share_vectors(agents.len(), modulus, fix as u64) {
                let names: Vec<String> = agents
                    .iter()
                    .zip(&aux_colours)
                    .zip(&shares)
                    .map(|((a, &col), &g)| share_vertex(a, &c.vertices()[c.vertex_at(fix, col)], g))
                    .collect();
                raw.facets.push(names);
                built.push((fix, shares));
            }
        }
        let complex = Arc::new(validate_complex(&raw).expect("share facets are pure and distinct"));
        let n = complex.num_facets();
        debug_assert_eq!(n, built.len());

        let mut origin = vec![(0, Vec::new()); n];
        let mut index = HashMap::with_capacity(n);
        for (names, (fix, shares)) in raw.facets.iter().zip(built) {
            let id = FacetId::new(names.iter().map(|s| VertexId::from(s.as_str())));
            let sfix = complex.facet_index(&id).expect("facet just built");
            index.insert((fix, shares.clone()), sfix);
            origin[sfix] = (fix, shares);
        }

        let lift = |u: &FacetSet| -> FacetSet {
            FacetSet::from_indices(n, (0..n).filter(|&s| u.contains(origin[s].0)))
        };
        let valuation = aux
            .model()
            .valuation()
            .iter()
            .map(|(atom, set)| (atom.clone(), lift(set)))
            .collect();
        let mut neighborhoods = vec![BTreeSet::new(); complex.vertices().len()];
        for (vix, nb) in neighborhoods.iter_mut().enumerate() {
            let name = complex.vertices()[vix].as_str();
            let (_, rest) = name.split_once('@').expect("share vertex name");
            let (v, _) = rest.rsplit_once('#').expect("share vertex name");
            let aux_v = c.vertex_index(&VertexId::from(v)).expect("original vertex");
            *nb = aux.model().neighborhood(aux_v).iter().map(lift).collect();
        }
        let model = ModelCandidate {
            complex,
            valuation,
            neighborhoods,
        }
        .validate()
        .expect("the share model satisfies (SN)");
        Ok(ShareModel {
            model,
            aux: aux.clone(),
            modulus,
            agents,
            aux_colours,
            origin,
            index,
        })
    }

    pub fn model(&self) -> &SecrecyModel {
        &self.model
    }

    pub fn aux(&self) -> &AuxModel {
        &self.aux
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    /// `ι(X)` for an aux facet.
    pub fn code(&self, aux_facet: &FacetId) -> Result<GroupElem, ShareError> {
        let fix = self.aux_index(aux_facet)?;
        Ok(GroupElem::new(fix as i128, self.modulus))
    }

    fn aux_index(&self, facet: &FacetId) -> Result<usize, ShareError> {
        self.aux
            .model()
            .complex()
            .facet_index(facet)
            .map_err(|_| ShareError::UnknownFacet(facet.key()))
    }

    /// The aux facet and shares a share facet was built from.
    pub fn origin(&self, share_facet: &FacetId) -> Result<(FacetId, ShareAssignment), ShareError> {
        let sfix = self
            .model
            .complex()
            .facet_index(share_facet)
            .map_err(|_| ShareError::UnknownFacet(share_facet.key()))?;
        let (fix, shares) = &self.origin[sfix];
        Ok((
            self.aux.model().complex().facets()[*fix].clone(),
            self.assignment(shares),
        ))
    }

    /// `(aux facet index, shares)` by share facet index.
    pub fn origin_index(&self, sfix: usize) -> (usize, &[u64]) {
        let (fix, shares) = &self.origin[sfix];
        (*fix, shares)
    }

    fn assignment(&self, shares: &[u64]) -> ShareAssignment {
        self.agents
            .iter()
            .cloned()
            .zip(
                shares
                    .iter()
                    .map(|&g| GroupElem::new(g as i128, self.modulus)),
            )
            .collect()
    }

    /// `X^σ`, if `σ` sums to `ι(X)`.
    pub fn share_facet(
        &self,
        aux_facet: &FacetId,
        shares: &ShareAssignment,
    ) -> Result<Option<FacetId>, ShareError> {
        let fix = self.aux_index(aux_facet)?;
        let mut residues = Vec::with_capacity(self.agents.len());
        for a in &self.agents {
            let g = shares
                .get(a)
                .ok_or_else(|| ShareError::UnknownAgent(a.to_string()))?;
            residues.push(g.residue);
        }
        Ok(self
            .index
            .get(&(fix, residues))
            .map(|&s| self.model.complex().facets()[s].clone()))
    }

    /// Share facet indices over one aux facet.
    pub fn shares_of(&self, aux_fix: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.origin.len()).filter(move |&s| self.origin[s].0 == aux_fix)
    }

    /// `U↑`: every share facet whose aux facet lies in `event`.
    pub fn lift(&self, event: &FacetSet) -> FacetSet {
        let n = self.origin.len();
        FacetSet::from_indices(n, (0..n).filter(|&s| event.contains(self.origin[s].0)))
    }

    /// Share-completion: given `X^σ` and `Y ~_a X`, shares `τ` for `Y` with
    /// `τ(a) = σ(a)`. The first other agent `b` takes `τ(b) = ι(Y) - σ(a)`;
    /// the rest take 0.
    pub fn completion_witness(
        &self,
        share_facet: &FacetId,
        agent: &AgentId,
        target: &FacetId,
    ) -> Result<ShareAssignment, ShareError> {
        if self.agents.len() < 2 {
            return Err(ShareError::SingleAgent);
        }
        let ai = self
            .agents
            .iter()
            .position(|a| a == agent)
            .ok_or_else(|| ShareError::UnknownAgent(agent.to_string()))?;
        let (source, source_shares) = self.origin(share_facet)?;
        let target_fix = self.aux_index(target)?;
        let ac = self.aux.model().complex();
        let source_fix = ac.facet_index(&source).expect("origin facet");
        let colour = self.aux_colours[ai];
        if ac.vertex_at(source_fix, colour) != ac.vertex_at(target_fix, colour) {
            return Err(ShareError::NotIndistinguishable {
                first: source.key(),
                second: target.key(),
                agent: agent.to_string(),
            });
        }
        let bi = if ai == 0 { 1 } else { 0 };
        let own = source_shares[agent];
        let code = GroupElem::new(target_fix as i128, self.modulus);
        Ok(self
            .agents
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let g = if i == ai {
                    own
                } else if i == bi {
                    code - own
                } else {
                    GroupElem::new(0, self.modulus)
                };
                (c.clone(), g)
            })
            .collect())
    }

    /// The same construction with replaced neighborhoods, for fault
    /// injection. The result is revalidated as a secrecy model.
    pub fn with_neighborhoods(
        &self,
        neighborhoods: Vec<BTreeSet<FacetSet>>,
    ) -> Result<ShareModel, ModelError> {
        Ok(ShareModel {
            model: self.model.with_neighborhoods(neighborhoods)?,
            ..self.clone()
        })
    }

    /// Compares every share facet against its aux facet on every pool
    /// formula.
    pub fn check_representation(
        &self,
        pool: &[Formula],
    ) -> Result<RepresentationReport, EvalError> {
        let per_formula: Vec<Result<Vec<Disagreement>, EvalError>> = pool
            .par_iter()
            .map(|phi| {
                let aux_set = Evaluator::new(self.aux.model()).truth_set(phi)?;
                let share_set = Evaluator::new(&self.model).truth_set(phi)?;
                let ac = self.aux.model().complex();
                let sc = self.model.complex();
                Ok((0..self.origin.len())
                    .filter_map(|s| {
                        let fix = self.origin[s].0;
                        let (aux_value, share_value) =
                            (aux_set.contains(fix), share_set.contains(s));
                        (aux_value != share_value).then(|| Disagreement {
                            formula: phi.to_string(),
                            aux_facet: ac.facets()[fix].clone(),
                            share_facet: sc.facets()[s].clone(),
                            aux_value,
                            share_value,
                        })
                    })
                    .collect())
            })
            .collect();
        let mut disagreements = Vec::new();
        for r in per_formula {
            disagreements.extend(r?);
        }
        Ok(RepresentationReport {
            formulas: pool.len(),
            share_facets: self.origin.len(),
            comparisons: pool.len() * self.origin.len(),
            disagreements,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub formula: String,
    pub aux_facet: FacetId,
    pub share_facet: FacetId,
    pub aux_value: bool,
    pub share_value: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepresentationReport {
    pub formulas: usize,
    pub share_facets: usize,
    pub comparisons: usize,
    pub disagreements: Vec<Disagreement>,
}

impl RepresentationReport {
    pub fn agrees(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Adds a fresh `*` vertex to every facet of a plain model.
pub fn to_aux(model: &SecrecyModel) -> Result<AuxModel, ShareError> {
    AuxModel::from_plain(model)
}

pub fn build_share_model(aux: &AuxModel, modulus: u64) -> Result<ShareModel, ShareError> {
    ShareModel::build(aux, modulus)
}
