//! Secrecy models: a complex plus a facet valuation and, for every local
//! state, a family of designated secret events.
//!
//! The frame condition (SN) requires every designated event `U` at an
//! `a`-vertex `v` to leave every other agent `b` uncertain: for each facet
//! `X` in `St(v)` some `Y ~_b X` lies outside `U`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::complex::{is_token, AgentId, ChromaticComplex, FacetId, LookupError, VertexId};
use crate::facet_set::FacetSet;

/// A concrete `(v, U, X, b)` for which (SN) has no witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SnViolation {
    pub vertex: VertexId,
    pub event: Vec<FacetId>,
    pub facet: FacetId,
    pub blocked_agent: AgentId,
}

/// A facet witnessing (SN) for one `(v, U, X, b)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SnWitness {
    pub vertex: VertexId,
    pub event: Vec<FacetId>,
    pub facet: FacetId,
    pub agent: AgentId,
    pub witness: FacetId,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("neighborhood given for unknown vertex {0}")]
    UnknownNeighborhoodVertex(String),
    #[error("neighborhood given for auxiliary-colour vertex {0}")]
    NeighborhoodAtAuxVertex(String),
    #[error("event at vertex {vertex} mentions unknown facet {facet}")]
    UnknownFacetInEvent { vertex: String, facet: String },
    #[error("valuation mentions unknown facet {0}")]
    UnknownFacetInValuation(String),
    #[error("invalid atom name {0:?}")]
    InvalidAtom(String),
    #[error("(SN) fails in {} case(s), first at vertex {}, facet {}, agent {}",
        .0.len(), .0[0].vertex, .0[0].facet, .0[0].blocked_agent)]
    SnViolated(Vec<SnViolation>),
    #[error("{} model errors: {}", .0.len(), .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Multiple(Vec<ModelError>),
}

impl ModelError {
    fn collect(mut errors: Vec<ModelError>) -> Result<(), ModelError> {
        match errors.len() {
            0 => Ok(()),
            1 => Err(errors.pop().unwrap()),
            _ => Err(ModelError::Multiple(errors)),
        }
    }

    /// Every (SN) violation carried by this error.
    pub fn sn_violations(&self) -> Vec<SnViolation> {
        match self {
            ModelError::SnViolated(v) => v.clone(),
            ModelError::Multiple(es) => es.iter().flat_map(ModelError::sn_violations).collect(),
            _ => Vec::new(),
        }
    }
}

pub(crate) fn is_atom_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase()) && is_token(s)
}

/// Structurally valid model data whose (SN) status is not yet known.
#[derive(Clone, Debug)]
pub struct ModelCandidate {
    pub complex: Arc<ChromaticComplex>,
    /// Atom name to truth set. Atoms absent here are false everywhere.
    pub valuation: BTreeMap<String, FacetSet>,
    /// Indexed by vertex index.
    pub neighborhoods: Vec<BTreeSet<FacetSet>>,
}

impl ModelCandidate {
    /// A candidate with empty valuation and empty neighborhoods.
    pub fn bare(complex: Arc<ChromaticComplex>) -> Self {
        let n = complex.vertices().len();
        ModelCandidate {
            complex,
            valuation: BTreeMap::new(),
            neighborhoods: vec![BTreeSet::new(); n],
        }
    }

    pub fn check_sn(&self) -> Vec<SnViolation> {
        check_sn(&self.complex, &self.neighborhoods)
    }

    /// Checks the aux-vertex rule and (SN).
    pub fn validate(self) -> Result<SecrecyModel, ModelError> {
        let mut errors = Vec::new();
        for (vix, nb) in self.neighborhoods.iter().enumerate() {
            if !nb.is_empty() && self.complex.colours()[self.complex.colour_of(vix)].is_aux() {
                errors.push(ModelError::NeighborhoodAtAuxVertex(
                    self.complex.vertices()[vix].to_string(),
                ));
            }
        }
        for atom in self.valuation.keys() {
            if !is_atom_name(atom) {
                errors.push(ModelError::InvalidAtom(atom.clone()));
            }
        }
        let violations = self.check_sn();
        if !violations.is_empty() {
            errors.push(ModelError::SnViolated(violations));
        }
        ModelError::collect(errors)?;
        let universe = self.complex.num_facets();
        let valuation = self
            .valuation
            .into_iter()
            .filter(|(_, s)| !s.is_empty())
            .collect::<BTreeMap<_, _>>();
        debug_assert!(valuation.values().all(|s| s.universe() == universe));
        Ok(SecrecyModel {
            complex: self.complex,
            valuation,
            neighborhoods: self.neighborhoods,
        })
    }
}

/// Every `(v, U, X, b)` for which (SN) fails, in vertex / event / facet /
/// agent order.
pub fn check_sn(
    complex: &ChromaticComplex,
    neighborhoods: &[BTreeSet<FacetSet>],
) -> Vec<SnViolation> {
    let mut out = Vec::new();
    sn_scan(complex, neighborhoods, |vix, event, fix, b, witness| {
        if witness.is_none() {
            out.push(SnViolation {
                vertex: complex.vertices()[vix].clone(),
                event: complex.facet_ids(event),
                facet: complex.facets()[fix].clone(),
                blocked_agent: complex.colours()[b].clone(),
            });
        }
    });
    out
}

/// Walks every `(v, U, X, b)` quadruple and reports the first witness `Y` in
/// canonical facet order, if any.
fn sn_scan(
    complex: &ChromaticComplex,
    neighborhoods: &[BTreeSet<FacetSet>],
    mut visit: impl FnMut(usize, &FacetSet, usize, usize, Option<usize>),
) {
    for (vix, events) in neighborhoods.iter().enumerate() {
        let owner = complex.colour_of(vix);
        for event in events {
            for fix in complex.star_set(vix).iter() {
                for (b, colour) in complex.colours().iter().enumerate() {
                    if b == owner || colour.is_aux() {
                        continue;
                    }
                    let witness = complex
                        .class_of(fix, b)
                        .iter()
                        .find(|&y| !event.contains(y));
                    visit(vix, event, fix, b, witness);
                }
            }
        }
    }
}

/// `true` iff the single event `event` satisfies (SN) at vertex `vix`.
pub(crate) fn event_satisfies_sn(complex: &ChromaticComplex, vix: usize, event: &FacetSet) -> bool {
    let owner = complex.colour_of(vix);
    complex.star_set(vix).iter().all(|fix| {
        complex
            .colours()
            .iter()
            .enumerate()
            .filter(|(b, c)| *b != owner && !c.is_aux())
            .all(|(b, _)| !complex.class_of(fix, b).is_subset(event))
    })
}

/// A validated simplicial secrecy model. Immutable.
#[derive(Clone, Debug)]
pub struct SecrecyModel {
    complex: Arc<ChromaticComplex>,
    valuation: BTreeMap<String, FacetSet>,
    neighborhoods: Vec<BTreeSet<FacetSet>>,
}

impl PartialEq for SecrecyModel {
    fn eq(&self, other: &Self) -> bool {
        self.complex.to_raw() == other.complex.to_raw()
            && self.valuation == other.valuation
            && self.neighborhoods == other.neighborhoods
    }
}

/// Builds a model from name-level data: a valuation keyed by facet and
/// neighborhoods keyed by vertex, events given as facet lists. Vertices
/// absent from `neighborhoods` get the empty family.
pub fn validate_model(
    complex: Arc<ChromaticComplex>,
    valuation: &BTreeMap<FacetId, BTreeSet<String>>,
    neighborhoods: &BTreeMap<VertexId, Vec<BTreeSet<FacetId>>>,
) -> Result<SecrecyModel, ModelError> {
    let mut errors = Vec::new();
    let n = complex.num_facets();
    let mut truth: BTreeMap<String, FacetSet> = BTreeMap::new();
    for (facet, atoms) in valuation {
        let Ok(fix) = complex.facet_index(facet) else {
            errors.push(ModelError::UnknownFacetInValuation(facet.key()));
            continue;
        };
        for atom in atoms {
            truth
                .entry(atom.clone())
                .or_insert_with(|| FacetSet::empty(n))
                .insert(fix);
        }
    }
    let mut nbhd = vec![BTreeSet::new(); complex.vertices().len()];
    for (v, events) in neighborhoods {
        let Ok(vix) = complex.vertex_index(v) else {
            errors.push(ModelError::UnknownNeighborhoodVertex(v.to_string()));
            continue;
        };
        for event in events {
            let mut set = FacetSet::empty(n);
            for facet in event {
                match complex.facet_index(facet) {
                    Ok(fix) => set.insert(fix),
                    Err(_) => errors.push(ModelError::UnknownFacetInEvent {
                        vertex: v.to_string(),
                        facet: facet.key(),
                    }),
                }
            }
            nbhd[vix].insert(set);
        }
    }
    if !errors.is_empty() {
        return Err(ModelError::collect(errors).unwrap_err());
    }
    ModelCandidate {
        complex,
        valuation: truth,
        neighborhoods: nbhd,
    }
    .validate()
}

impl SecrecyModel {
    pub fn complex(&self) -> &ChromaticComplex {
        &self.complex
    }

    pub fn complex_arc(&self) -> &Arc<ChromaticComplex> {
        &self.complex
    }

    /// Non-empty atom truth sets.
    pub fn valuation(&self) -> &BTreeMap<String, FacetSet> {
        &self.valuation
    }

    /// `⟦p⟧` for an atom; empty for atoms the model never mentions.
    pub fn atom_set(&self, atom: &str) -> FacetSet {
        self.valuation
            .get(atom)
            .cloned()
            .unwrap_or_else(|| FacetSet::empty(self.complex.num_facets()))
    }

    /// `ν(X)` for a facet index.
    pub fn atoms_at(&self, fix: usize) -> BTreeSet<&str> {
        self.valuation
            .iter()
            .filter(|(_, s)| s.contains(fix))
            .map(|(a, _)| a.as_str())
            .collect()
    }

    pub fn neighborhoods(&self) -> &[BTreeSet<FacetSet>] {
        &self.neighborhoods
    }

    /// `N_a^S(v)` for vertex index `vix`, with `a` the colour of `vix`.
    pub fn neighborhood(&self, vix: usize) -> &BTreeSet<FacetSet> {
        &self.neighborhoods[vix]
    }

    /// Name-level view of `N(v)`.
    pub fn neighborhood_of(&self, v: &VertexId) -> Result<Vec<Vec<FacetId>>, LookupError> {
        let vix = self.complex.vertex_index(v)?;
        Ok(self.neighborhoods[vix]
            .iter()
            .map(|e| self.complex.facet_ids(e))
            .collect())
    }

    pub fn is_aux(&self) -> bool {
        self.complex.has_aux_colour()
    }

    /// One witness per `(v, U, X, b)`, the first in canonical facet order.
    pub fn sn_witnesses(&self) -> Vec<SnWitness> {
        let c = &self.complex;
        let mut out = Vec::new();
        sn_scan(c, &self.neighborhoods, |vix, event, fix, b, witness| {
            let witness = witness.expect("validated model satisfies (SN)");
            out.push(SnWitness {
                vertex: c.vertices()[vix].clone(),
                event: c.facet_ids(event),
                facet: c.facets()[fix].clone(),
                agent: c.colours()[b].clone(),
                witness: c.facets()[witness].clone(),
            });
        });
        out
    }

    /// Owner-local normalization: keeps at each vertex `v` only the events
    /// containing `St(v)`. Truth of every formula is unchanged.
    pub fn normalize_owner_local(&self) -> SecrecyModel {
        let neighborhoods = self
            .neighborhoods
            .iter()
            .enumerate()
            .map(|(vix, events)| {
                let star = self.complex.star_set(vix);
                events
                    .iter()
                    .filter(|u| star.is_subset(u))
                    .cloned()
                    .collect()
            })
            .collect();
        SecrecyModel {
            complex: Arc::clone(&self.complex),
            valuation: self.valuation.clone(),
            neighborhoods,
        }
    }

    /// The same model with different neighborhoods, revalidated.
    pub fn with_neighborhoods(
        &self,
        neighborhoods: Vec<BTreeSet<FacetSet>>,
    ) -> Result<SecrecyModel, ModelError> {
        ModelCandidate {
            complex: Arc::clone(&self.complex),
            valuation: self.valuation.clone(),
            neighborhoods,
        }
        .validate()
    }

    pub fn to_candidate(&self) -> ModelCandidate {
        ModelCandidate {
            complex: Arc::clone(&self.complex),
            valuation: self.valuation.clone(),
            neighborhoods: self.neighborhoods.clone(),
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::complex::tests::grid;

    pub(crate) fn fid(key: &str) -> FacetId {
        FacetId::parse_key(key).unwrap()
    }

    /// `x1`..`z3` to facet ids of the 3x3 grid.
    pub(crate) fn cell(name: &str) -> FacetId {
        let row = "xyz".find(&name[..1]).unwrap();
        fid(&format!("u{row}+w{}", &name[1..]))
    }

    pub(crate) fn cells(names: &str) -> BTreeSet<FacetId> {
        names.split_whitespace().map(cell).collect()
    }

    pub(crate) fn valuation(atoms: &[(&str, &str)]) -> BTreeMap<FacetId, BTreeSet<String>> {
        let mut out: BTreeMap<FacetId, BTreeSet<String>> = BTreeMap::new();
        for (atom, names) in atoms {
            for f in cells(names) {
                out.entry(f).or_default().insert(atom.to_string());
            }
        }
        out
    }

    pub(crate) fn at_u0(events: &[&str]) -> BTreeMap<VertexId, Vec<BTreeSet<FacetId>>> {
        BTreeMap::from([("u0".into(), events.iter().map(|e| cells(e)).collect())])
    }

    pub(crate) fn running() -> SecrecyModel {
        validate_model(
            Arc::new(grid()),
            &valuation(&[("p", "x1 x2 x3 y1")]),
            &at_u0(&["x1 x2 x3 y1"]),
        )
        .unwrap()
    }

    /// Independent (SN) oracle: enumerate the b-column of every facet in the
    /// star and look for a facet outside the event.
    fn brute_violations(event: &BTreeSet<FacetId>) -> Vec<FacetId> {
        let c = grid();
        let mut out = Vec::new();
        for x in c.star(&"u0".into()).unwrap() {
            let w = c.vertex_of_colour(&x, &"b".into()).unwrap().clone();
            let column: Vec<FacetId> = c
                .facets()
                .iter()
                .filter(|y| y.vertices().contains(&w))
                .cloned()
                .collect();
            if column.iter().all(|y| event.contains(y)) {
                out.push(x);
            }
        }
        out
    }

    #[test]
    fn running_example_is_valid() {
        let m = running();
        assert!(m.to_candidate().check_sn().is_empty());
        let witnesses: Vec<(String, String)> = m
            .sn_witnesses()
            .into_iter()
            .map(|w| (w.facet.key(), w.witness.key()))
            .collect();
        assert_eq!(
            witnesses,
            vec![
                (cell("x1").key(), cell("z1").key()),
                (cell("x2").key(), cell("y2").key()),
                (cell("x3").key(), cell("y3").key()),
            ]
        );
    }

    #[test]
    fn universal_event_violates_sn_once_per_star_facet() {
        let all = "x1 x2 x3 y1 y2 y3 z1 z2 z3";
        let err = validate_model(Arc::new(grid()), &BTreeMap::new(), &at_u0(&[all])).unwrap_err();
        let v = err.sn_violations();
        assert_eq!(v.len(), 3);
        assert!(v.iter().all(|v| v.blocked_agent == AgentId::from("b")));
        assert_eq!(
            v.iter().map(|v| v.facet.clone()).collect::<Vec<_>>(),
            vec![cell("x1"), cell("x2"), cell("x3")]
        );
    }

    #[test]
    fn covered_columns_are_reported_like_brute_force() {
        let event = "x1 x2 x3 y2 y3 z2 z3";
        let err = validate_model(Arc::new(grid()), &BTreeMap::new(), &at_u0(&[event])).unwrap_err();
        let got: Vec<FacetId> = err.sn_violations().into_iter().map(|v| v.facet).collect();
        let expect = brute_violations(&cells(event));
        assert_eq!(expect, vec![cell("x2"), cell("x3")]);
        assert_eq!(got, expect);
        assert_eq!(err.sn_violations()[0].vertex, VertexId::from("u0"));
        assert_eq!(
            err.sn_violations()[0].event,
            cells(event).into_iter().collect::<Vec<_>>()
        );
    }

    #[test]
    fn empty_neighborhoods_pass_vacuously() {
        let m = validate_model(Arc::new(grid()), &BTreeMap::new(), &BTreeMap::new()).unwrap();
        assert!(m.to_candidate().check_sn().is_empty());
        assert!(m.sn_witnesses().is_empty());
        assert_eq!(m.normalize_owner_local(), m);
    }

    #[test]
    fn structural_errors() {
        let c = Arc::new(grid());
        let nb = BTreeMap::from([(VertexId::from("q9"), vec![])]);
        assert_eq!(
            validate_model(c.clone(), &BTreeMap::new(), &nb).unwrap_err(),
            ModelError::UnknownNeighborhoodVertex("q9".into())
        );
        let nb = BTreeMap::from([(VertexId::from("u0"), vec![BTreeSet::from([fid("u0+w7")])])]);
        assert_eq!(
            validate_model(c.clone(), &BTreeMap::new(), &nb).unwrap_err(),
            ModelError::UnknownFacetInEvent {
                vertex: "u0".into(),
                facet: "u0+w7".into()
            }
        );
        let val = BTreeMap::from([(fid("u0+w1"), BTreeSet::from(["P".to_string()]))]);
        assert_eq!(
            validate_model(c, &val, &BTreeMap::new()).unwrap_err(),
            ModelError::InvalidAtom("P".into())
        );
    }

    #[test]
    fn empty_event_is_allowed() {
        let m = validate_model(Arc::new(grid()), &BTreeMap::new(), &at_u0(&[""])).unwrap();
        assert_eq!(
            m.neighborhood_of(&"u0".into()).unwrap(),
            vec![Vec::<FacetId>::new()]
        );
    }

    #[test]
    fn normalization_drops_non_owner_local_events() {
        assert_eq!(running().normalize_owner_local(), running());
        let m = validate_model(
            Arc::new(grid()),
            &valuation(&[("p", "x1 x2 x3 y1")]),
            &at_u0(&["x1 x2 x3 y1", "y1 y2 y3"]),
        )
        .unwrap();
        let n = m.normalize_owner_local();
        assert_eq!(
            n.neighborhood_of(&"u0".into()).unwrap(),
            vec![cells("x1 x2 x3 y1").into_iter().collect::<Vec<_>>()]
        );
        assert!(n.to_candidate().check_sn().is_empty());
        assert_eq!(n.normalize_owner_local(), n);
    }
}
