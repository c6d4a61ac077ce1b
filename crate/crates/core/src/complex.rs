//! Pure chromatic simplicial complexes.
//!
//! Only facets are stored; faces are their downward closure and the
//! semantics never needs them. A [`ChromaticComplex`] can only be obtained
//! through [`validate_complex`], so every value satisfies:
//!
//! * every facet is non-empty and carries each colour exactly once (pure and
//!   properly coloured),
//! * every vertex lies in some facet,
//! * no facet is contained in another.
//!
//! Facets and vertices are kept in canonical sorted order; the position of a
//! facet in that order is its *index*, which [`FacetSet`] uses.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::facet_set::FacetSet;

/// Reserved colour of auxiliary-colour models. It never names a modality.
pub const AUX_COLOUR: &str = "*";

/// An agent (colour) name: `[A-Za-z0-9_]+`, or the reserved [`AUX_COLOUR`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(String);

impl AgentId {
    pub fn new(name: impl Into<String>) -> Option<Self> {
        let name = name.into();
        if name == AUX_COLOUR || is_token(&name) {
            Some(AgentId(name))
        } else {
            None
        }
    }

    /// The auxiliary colour `*`.
    pub fn aux() -> Self {
        AgentId(AUX_COLOUR.to_string())
    }

    pub fn is_aux(&self) -> bool {
        self.0 == AUX_COLOUR
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// Convenience constructor for literal agent names; panics on invalid input.
impl From<&str> for AgentId {
    fn from(name: &str) -> Self {
        AgentId::new(name).unwrap_or_else(|| panic!("invalid agent name {name:?}"))
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

pub(crate) fn is_token(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// A vertex (local state) name. Any non-empty string without whitespace and
/// without `+`, which separates vertex ids inside facet keys.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(String);

impl VertexId {
    pub fn new(name: impl Into<String>) -> Option<Self> {
        let name = name.into();
        let ok = !name.is_empty()
            && !name
                .chars()
                .any(|c| c == '+' || c == '"' || c.is_whitespace() || c.is_control());
        ok.then_some(VertexId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for VertexId {
    fn from(name: &str) -> Self {
        VertexId::new(name).unwrap_or_else(|| panic!("invalid vertex name {name:?}"))
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Facet identity: the sorted list of its vertex ids. Renders as the facet
/// key, e.g. `u0+w1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FacetId(Vec<VertexId>);

impl FacetId {
    pub fn new(vertices: impl IntoIterator<Item = VertexId>) -> Self {
        let set: BTreeSet<VertexId> = vertices.into_iter().collect();
        FacetId(set.into_iter().collect())
    }

    /// Parses a facet key (`+`-joined vertex ids, in any order).
    pub fn parse_key(key: &str) -> Option<Self> {
        let vertices: Option<Vec<VertexId>> = key.split('+').map(VertexId::new).collect();
        vertices.map(FacetId::new)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn key(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for FacetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            f.write_str(v.as_str())?;
        }
        Ok(())
    }
}

impl fmt::Debug for FacetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FacetId({self})")
    }
}

macro_rules! impl_serialize_display {
    ($($t:ty),*) => {$(
        impl Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
    )*};
}
impl_serialize_display!(VertexId, FacetId, AgentId);

/// Unvalidated complex data as it arrives from a document or a generator.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawComplex {
    pub agents: Vec<String>,
    /// `(vertex id, colour)` pairs.
    pub vertices: Vec<(String, String)>,
    pub facets: Vec<Vec<String>>,
}

/// One violated complex invariant.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ComplexViolation {
    #[error("agent set is empty")]
    NoAgents,
    #[error("invalid agent name {0:?}")]
    InvalidAgentName(String),
    #[error("agent {0:?} listed twice")]
    DuplicateAgent(String),
    #[error("invalid vertex name {0:?}")]
    InvalidVertexName(String),
    #[error("vertex {0:?} listed twice")]
    DuplicateVertex(String),
    #[error("vertex {vertex:?} has colour {colour:?}, which is not an agent")]
    UnknownColour { vertex: String, colour: String },
    #[error("the complex has no facets")]
    NoFacets,
    #[error("facet #{index} is empty")]
    EmptyFacet { index: usize },
    #[error("facet #{index} mentions unknown vertex {vertex:?}")]
    UnknownVertexInFacet { index: usize, vertex: String },
    #[error("facet {facet} contains {first} and {second}, both of colour {colour}")]
    DuplicateColourInFacet {
        facet: String,
        colour: String,
        first: String,
        second: String,
    },
    #[error("facet {facet} misses colours {missing:?}")]
    ImpureFacet { facet: String, missing: Vec<String> },
    #[error("facet {facet} is a proper subset of facet {superset}")]
    NonMaximalFacet { facet: String, superset: String },
    #[error("vertex {0} belongs to no facet")]
    OrphanVertex(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("invalid complex: {}", list_violations(.0))]
pub struct InvalidComplex(pub Vec<ComplexViolation>);

fn list_violations(vs: &[ComplexViolation]) -> String {
    vs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Lookup of a name that is not part of the complex.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LookupError {
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown facet {0}")]
    UnknownFacet(String),
    #[error("unknown agent {0}")]
    UnknownAgent(String),
}

/// A validated, finite, pure chromatic simplicial complex.
#[derive(Clone, Debug)]
pub struct ChromaticComplex {
    colours: Vec<AgentId>,
    colour_index: HashMap<AgentId, usize>,
    vertices: Vec<VertexId>,
    vertex_colour: Vec<usize>,
    vertex_index: HashMap<VertexId, usize>,
    colour_vertices: Vec<Vec<usize>>,
    facets: Vec<FacetId>,
    facet_index: HashMap<FacetId, usize>,
    /// `facet_vertices[x][c]` is the vertex of colour `c` in facet `x`.
    facet_vertices: Vec<Vec<usize>>,
    stars: Vec<FacetSet>,
}

/// Validates raw complex data, reporting every violated invariant.
pub fn validate_complex(raw: &RawComplex) -> Result<ChromaticComplex, InvalidComplex> {
    let mut errors = Vec::new();

    let mut agents = BTreeSet::new();
    if raw.agents.is_empty() {
        errors.push(ComplexViolation::NoAgents);
    }
    for name in &raw.agents {
        match AgentId::new(name.as_str()) {
            Some(a) => {
                if !agents.insert(a) {
                    errors.push(ComplexViolation::DuplicateAgent(name.clone()));
                }
            }
            None => errors.push(ComplexViolation::InvalidAgentName(name.clone())),
        }
    }

    let mut colouring: BTreeMap<VertexId, AgentId> = BTreeMap::new();
    for (name, colour) in &raw.vertices {
        let Some(v) = VertexId::new(name.as_str()) else {
            errors.push(ComplexViolation::InvalidVertexName(name.clone()));
            continue;
        };
        let colour_id = AgentId::new(colour.as_str()).filter(|c| agents.contains(c));
        let Some(c) = colour_id else {
            errors.push(ComplexViolation::UnknownColour {
                vertex: name.clone(),
                colour: colour.clone(),
            });
            continue;
        };
        if colouring.insert(v, c).is_some() {
            errors.push(ComplexViolation::DuplicateVertex(name.clone()));
        }
    }

    if raw.facets.is_empty() {
        errors.push(ComplexViolation::NoFacets);
    }
    let mut facet_sets: BTreeSet<BTreeSet<VertexId>> = BTreeSet::new();
    for (index, facet) in raw.facets.iter().enumerate() {
        if facet.is_empty() {
            errors.push(ComplexViolation::EmptyFacet { index });
            continue;
        }
        let mut set = BTreeSet::new();
        let mut known = true;
        for name in facet {
            match VertexId::new(name.as_str()).filter(|v| colouring.contains_key(v)) {
                Some(v) => {
                    set.insert(v);
                }
                None => {
                    known = false;
                    errors.push(ComplexViolation::UnknownVertexInFacet {
                        index,
                        vertex: name.clone(),
                    });
                }
            }
        }
        if known {
            facet_sets.insert(set);
        }
    }

    for set in &facet_sets {
        let key = FacetId::new(set.iter().cloned()).key();
        let mut seen: BTreeMap<&AgentId, &VertexId> = BTreeMap::new();
        for v in set {
            let c = &colouring[v];
            if let Some(first) = seen.insert(c, v) {
                errors.push(ComplexViolation::DuplicateColourInFacet {
                    facet: key.clone(),
                    colour: c.to_string(),
                    first: first.to_string(),
                    second: v.to_string(),
                });
                seen.insert(c, first);
            }
        }
        let missing: Vec<String> = agents
            .iter()
            .filter(|a| !seen.contains_key(a))
            .map(ToString::to_string)
            .collect();
        if !missing.is_empty() {
            errors.push(ComplexViolation::ImpureFacet {
                facet: key.clone(),
                missing,
            });
        }
        if let Some(sup) = facet_sets
            .iter()
            .find(|other| other.len() > set.len() && set.is_subset(other))
        {
            errors.push(ComplexViolation::NonMaximalFacet {
                facet: key,
                superset: FacetId::new(sup.iter().cloned()).key(),
            });
        }
    }

    let covered: BTreeSet<&VertexId> = facet_sets.iter().flatten().collect();
    for v in colouring.keys() {
        if !covered.contains(v) {
            errors.push(ComplexViolation::OrphanVertex(v.to_string()));
        }
    }

    if !errors.is_empty() {
        return Err(InvalidComplex(errors));
    }
    Ok(ChromaticComplex::assemble(agents, colouring, facet_sets))
}

impl ChromaticComplex {
    /// Builds the indexed representation; the inputs must already satisfy
    /// every invariant.
    fn assemble(
        agents: BTreeSet<AgentId>,
        colouring: BTreeMap<VertexId, AgentId>,
        facet_sets: BTreeSet<BTreeSet<VertexId>>,
    ) -> Self {
        let colours: Vec<AgentId> = agents.into_iter().collect();
        let colour_index: HashMap<AgentId, usize> = colours
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        let vertices: Vec<VertexId> = colouring.keys().cloned().collect();
        let vertex_index: HashMap<VertexId, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let vertex_colour: Vec<usize> = vertices
            .iter()
            .map(|v| colour_index[&colouring[v]])
            .collect();
        let mut colour_vertices = vec![Vec::new(); colours.len()];
        for (vix, &c) in vertex_colour.iter().enumerate() {
            colour_vertices[c].push(vix);
        }

        let mut facets: Vec<FacetId> = facet_sets.into_iter().map(FacetId::new).collect();
        facets.sort();
        let facet_index: HashMap<FacetId, usize> = facets
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i))
            .collect();
        let mut facet_vertices = Vec::with_capacity(facets.len());
        let mut stars = vec![FacetSet::empty(facets.len()); vertices.len()];
        for (fix, facet) in facets.iter().enumerate() {
            let mut by_colour = vec![usize::MAX; colours.len()];
            for v in facet.vertices() {
                let vix = vertex_index[v];
                by_colour[vertex_colour[vix]] = vix;
                stars[vix].insert(fix);
            }
            facet_vertices.push(by_colour);
        }

        ChromaticComplex {
            colours,
            colour_index,
            vertices,
            vertex_colour,
            vertex_index,
            colour_vertices,
            facets,
            facet_index,
            facet_vertices,
            stars,
        }
    }

    /// All colours, sorted; includes `*` for auxiliary-colour complexes.
    pub fn colours(&self) -> &[AgentId] {
        &self.colours
    }

    /// The modal agents: every colour except `*`.
    pub fn agents(&self) -> impl Iterator<Item = &AgentId> {
        self.colours.iter().filter(|c| !c.is_aux())
    }

    pub fn has_aux_colour(&self) -> bool {
        self.colours.iter().any(AgentId::is_aux)
    }

    pub fn colour_index(&self, agent: &AgentId) -> Option<usize> {
        self.colour_index.get(agent).copied()
    }

    /// Index of a modal agent; `*` is not an agent.
    pub fn agent_index(&self, agent: &AgentId) -> Result<usize, LookupError> {
        self.colour_index(agent)
            .filter(|_| !agent.is_aux())
            .ok_or_else(|| LookupError::UnknownAgent(agent.to_string()))
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn vertex_index(&self, v: &VertexId) -> Result<usize, LookupError> {
        self.vertex_index
            .get(v)
            .copied()
            .ok_or_else(|| LookupError::UnknownVertex(v.to_string()))
    }

    /// Colour index of a vertex index.
    pub fn colour_of(&self, vix: usize) -> usize {
        self.vertex_colour[vix]
    }

    /// Vertex indices of one colour, sorted.
    pub fn vertices_of_colour(&self, colour: usize) -> &[usize] {
        &self.colour_vertices[colour]
    }

    pub fn facets(&self) -> &[FacetId] {
        &self.facets
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn facet_index(&self, x: &FacetId) -> Result<usize, LookupError> {
        self.facet_index
            .get(x)
            .copied()
            .ok_or_else(|| LookupError::UnknownFacet(x.key()))
    }

    /// Vertex index of colour `colour` in facet `fix`.
    pub fn vertex_at(&self, fix: usize, colour: usize) -> usize {
        self.facet_vertices[fix][colour]
    }

    /// Star of a vertex index as a facet set.
    pub fn star_set(&self, vix: usize) -> &FacetSet {
        &self.stars[vix]
    }

    pub fn facet_ids(&self, set: &FacetSet) -> Vec<FacetId> {
        set.iter().map(|i| self.facets[i].clone()).collect()
    }

    pub fn facet_set(&self, ids: impl IntoIterator<Item = usize>) -> FacetSet {
        FacetSet::from_indices(self.num_facets(), ids)
    }

    /// `v_a(X)`: the vertex of colour `a` in facet `x`.
    pub fn vertex_of_colour(&self, x: &FacetId, a: &AgentId) -> Result<&VertexId, LookupError> {
        let fix = self.facet_index(x)?;
        let c = self
            .colour_index(a)
            .ok_or_else(|| LookupError::UnknownAgent(a.to_string()))?;
        Ok(&self.vertices[self.vertex_at(fix, c)])
    }

    /// `St(v)`: the facets containing `v`, in canonical order.
    pub fn star(&self, v: &VertexId) -> Result<Vec<FacetId>, LookupError> {
        let vix = self.vertex_index(v)?;
        Ok(self.facet_ids(&self.stars[vix]))
    }

    /// `X ~_a Y`: the `a`-vertices of the two facets coincide.
    pub fn indistinguishable(
        &self,
        a: &AgentId,
        x: &FacetId,
        y: &FacetId,
    ) -> Result<bool, LookupError> {
        let c = self
            .colour_index(a)
            .ok_or_else(|| LookupError::UnknownAgent(a.to_string()))?;
        let (xi, yi) = (self.facet_index(x)?, self.facet_index(y)?);
        Ok(self.vertex_at(xi, c) == self.vertex_at(yi, c))
    }

    /// The partition of facets into `~_a` classes, one block per `a`-vertex
    /// (in vertex order).
    pub fn equivalence_classes(&self, a: &AgentId) -> Result<Vec<Vec<FacetId>>, LookupError> {
        let c = self
            .colour_index(a)
            .ok_or_else(|| LookupError::UnknownAgent(a.to_string()))?;
        Ok(self.colour_vertices[c]
            .iter()
            .map(|&v| self.facet_ids(&self.stars[v]))
            .collect())
    }

    /// Facets `Y` with `Y ~_c X`, as a set: the star of `X`'s `c`-vertex.
    pub(crate) fn class_of(&self, fix: usize, colour: usize) -> &FacetSet {
        &self.stars[self.vertex_at(fix, colour)]
    }

    /// Round-trips to raw data (used by documents and derived constructions).
    pub fn to_raw(&self) -> RawComplex {
        RawComplex {
            agents: self.colours.iter().map(ToString::to_string).collect(),
            vertices: self
                .vertices
                .iter()
                .zip(&self.vertex_colour)
                .map(|(v, &c)| (v.to_string(), self.colours[c].to_string()))
                .collect(),
            facets: self
                .facets
                .iter()
                .map(|f| f.vertices().iter().map(ToString::to_string).collect())
                .collect(),
        }
    }
}
