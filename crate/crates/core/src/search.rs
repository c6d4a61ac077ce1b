//! Bounded model enumeration, seeded random models and countermodel search
//! over grid-shaped complexes.
//!
//! Agents are named `a`, `b`, `c`, ... and agent `a`'s local states `a0`,
//! `a1`, ... A grid cell picks one local state per agent; under the full-grid
//! policy every cell is a facet, under the subsets policy every nonempty set
//! of cells is a geometry of its own.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checker::Evaluator;
use crate::complex::{validate_complex, AgentId, ChromaticComplex, FacetId, RawComplex};
use crate::facet_set::FacetSet;
use crate::logic::Formula;
use crate::model::{event_satisfies_sn, ModelCandidate, SecrecyModel};

pub const DEFAULT_CAP: u64 = 10_000_000;

/// Above this many facets per geometry, events are not enumerated.
const MAX_ENUMERATED_FACETS: usize = 20;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FacetPolicy {
    #[default]
    FullGrid,
    AllNonemptySubsets,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchBounds {
    pub agents: usize,
    pub local_states_per_agent: usize,
    pub atoms: Vec<String>,
    pub max_events_per_vertex: usize,
    pub facet_subset_policy: FacetPolicy,
    /// Largest number of candidate models a search may face.
    pub cap: u64,
    /// Event draws rejected by (SN) before a random model settles for fewer
    /// events at a vertex.
    pub max_rejections: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            agents: 2,
            local_states_per_agent: 3,
            atoms: vec!["p".into(), "r".into()],
            max_events_per_vertex: 2,
            facet_subset_policy: FacetPolicy::FullGrid,
            cap: DEFAULT_CAP,
            max_rejections: 32,
        }
    }
}

impl SearchBounds {
    pub fn grid(agents: usize, states: usize, atoms: &[&str]) -> Self {
        SearchBounds {
            agents,
            local_states_per_agent: states,
            atoms: atoms.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn agent_names(&self) -> Vec<AgentId> {
        (0..self.agents)
            .map(|i| AgentId::from(((b'a' + i as u8) as char).to_string().as_str()))
            .collect()
    }

    fn check(&self) -> Result<(), SearchError> {
        if self.agents == 0 || self.agents > 26 {
            return Err(SearchError::InvalidBounds(format!(
                "agent count must be in 1..=26, got {}",
                self.agents
            )));
        }
        if self.local_states_per_agent == 0 {
            return Err(SearchError::InvalidBounds(
                "local states must be at least 1".into(),
            ));
        }
        if let Some(bad) = self.atoms.iter().find(|a| !crate::model::is_atom_name(a)) {
            return Err(SearchError::InvalidBounds(format!(
                "invalid atom name {bad:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SearchError {
    #[error("about {estimate:.3e} candidate models exceed the cap of {cap}")]
    BoundsTooLarge { estimate: f64, cap: u64 },
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    #[error("formula mentions agent {0}, which is outside the bounds")]
    UnknownAgent(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    ValidUpToBound,
    Countermodel { model: SecrecyModel, facet: FacetId },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub verdict: Verdict,
    /// Leaf models evaluated. Under parallel search this may include work
    /// past the reported countermodel.
    pub models_examined: u64,
    pub elapsed: Duration,
}

/// Grid cells in lexicographic order: `cells[i][agent]` is a state index.
fn grid_cells(agents: usize, states: &[usize]) -> Vec<Vec<usize>> {
    let mut cells = vec![vec![]];
    for &n in &states[..agents] {
        cells = cells
            .into_iter()
            .flat_map(|c| {
                (0..n).map(move |s| {
                    let mut c = c.clone();
                    c.push(s);
                    c
                })
            })
            .collect();
    }
    cells
}

fn vertex_name(agent: &AgentId, state: usize) -> String {
    format!("{agent}{state}")
}

/// The complex whose facets are the chosen cells.
fn complex_of(names: &[AgentId], cells: &[&Vec<usize>]) -> ChromaticComplex {
    let mut vertices = BTreeSet::new();
    let facets = cells
        .iter()
        .map(|cell| {
            cell.iter()
                .enumerate()
                .map(|(a, &s)| {
                    vertices.insert((vertex_name(&names[a], s), names[a].to_string()));
                    vertex_name(&names[a], s)
                })
                .collect()
        })
        .collect();
    let raw = RawComplex {
        agents: names.iter().map(ToString::to_string).collect(),
        vertices: vertices.into_iter().collect(),
        facets,
    };
    validate_complex(&raw).expect("grid complexes are pure")
}

fn geometries(bounds: &SearchBounds) -> Result<Vec<Arc<ChromaticComplex>>, SearchError> {
    bounds.check()?;
    let names = bounds.agent_names();
    let cells = grid_cells(
        bounds.agents,
        &vec![bounds.local_states_per_agent; bounds.agents],
    );
    match bounds.facet_subset_policy {
        FacetPolicy::FullGrid => Ok(vec![Arc::new(complex_of(
            &names,
            &cells.iter().collect::<Vec<_>>(),
        ))]),
        FacetPolicy::AllNonemptySubsets => {
            let count = 2f64.powi(cells.len() as i32) - 1.0;
            if cells.len() > MAX_ENUMERATED_FACETS || count > bounds.cap as f64 {
                return Err(SearchError::BoundsTooLarge {
                    estimate: count,
                    cap: bounds.cap,
                });
            }
            Ok((1u64..1 << cells.len())
                .map(|mask| {
                    let chosen: Vec<&Vec<usize>> = cells
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, c)| c)
                        .collect();
                    Arc::new(complex_of(&names, &chosen))
                })
                .collect())
        }
    }
}

/// Events satisfying (SN) at a vertex, in mask order.
fn sn_events(c: &ChromaticComplex, vix: usize) -> Vec<FacetSet> {
    let n = c.num_facets();
    (0u64..1 << n)
        .map(|m| FacetSet::from_mask(n, m))
        .filter(|e| event_satisfies_sn(c, vix, e))
        .collect()
}

/// Subsets of `0..n` of size at most `k`, by size then lexicographically.
fn small_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..k.min(n) {
        let mut next = Vec::new();
        for s in &layer {
            let start = s.last().map_or(0, |&l: &usize| l + 1);
            for i in start..n {
                let mut t: Vec<usize> = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn binomial_prefix_sum(n: usize, k: usize) -> f64 {
    let mut total = 0.0;
    let mut term = 1.0;
    for i in 0..=k.min(n) {
        if i > 0 {
            term = term * (n - i + 1) as f64 / i as f64;
        }
        total += term;
    }
    total
}

struct GeometryPlan {
    complex: Arc<ChromaticComplex>,
    /// Per vertex, the admissible neighborhoods.
    choices: Vec<Vec<BTreeSet<FacetSet>>>,
}

/// Every model within the bounds, in a fixed order: geometry, then the
/// valuation (atoms in order, each a facet mask), then the neighborhood
/// choice at each vertex. Events are arbitrary facet sets satisfying (SN);
/// a neighborhood holds at most `max_events_per_vertex` of them.
pub fn enumerate_models(bounds: &SearchBounds) -> Result<ModelStream, SearchError> {
    let geos = geometries(bounds)?;
    let mut estimate = 0.0;
    for c in &geos {
        if c.num_facets() > MAX_ENUMERATED_FACETS {
            return Err(SearchError::BoundsTooLarge {
                estimate: f64::INFINITY,
                cap: bounds.cap,
            });
        }
        let mut count = 2f64.powi((c.num_facets() * bounds.atoms.len()) as i32);
        for v in 0..c.vertices().len() {
            count *= binomial_prefix_sum(sn_events(c, v).len(), bounds.max_events_per_vertex);
        }
        estimate += count;
    }
    if estimate > bounds.cap as f64 {
        return Err(SearchError::BoundsTooLarge {
            estimate,
            cap: bounds.cap,
        });
    }
    Ok(ModelStream {
        bounds: bounds.clone(),
        geometries: geos,
        current: None,
        next_geometry: 0,
        digits: Vec::new(),
        radices: Vec::new(),
        total: estimate as u64,
    })
}

/// Lazy, deterministic stream of models; see [`enumerate_models`].
pub struct ModelStream {
    bounds: SearchBounds,
    geometries: Vec<Arc<ChromaticComplex>>,
    current: Option<GeometryPlan>,
    next_geometry: usize,
    digits: Vec<usize>,
    radices: Vec<usize>,
    total: u64,
}

impl ModelStream {
    /// Number of models the stream yields.
    pub fn total(&self) -> u64 {
        self.total
    }

    fn start_geometry(&mut self) -> bool {
        let Some(complex) = self.geometries.get(self.next_geometry).cloned() else {
            return false;
        };
        self.next_geometry += 1;
        let choices: Vec<Vec<BTreeSet<FacetSet>>> = (0..complex.vertices().len())
            .map(|v| {
                let events = sn_events(&complex, v);
                small_subsets(events.len(), self.bounds.max_events_per_vertex)
                    .into_iter()
                    .map(|s| s.into_iter().map(|i| events[i].clone()).collect())
                    .collect()
            })
            .collect();
        let n = complex.num_facets();
        self.radices = std::iter::repeat_n(1usize << n, self.bounds.atoms.len())
            .chain(choices.iter().map(Vec::len))
            .collect();
        self.digits = vec![0; self.radices.len()];
        self.current = Some(GeometryPlan { complex, choices });
        true
    }

    fn advance(&mut self) -> bool {
        for i in (0..self.digits.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < self.radices[i] {
                return true;
            }
            self.digits[i] = 0;
        }
        false
    }
}

impl Iterator for ModelStream {
    type Item = SecrecyModel;

    fn next(&mut self) -> Option<SecrecyModel> {
        if self.current.is_none() && !self.start_geometry() {
            return None;
        }
        let plan = self.current.as_ref().expect("geometry started");
        let n = plan.complex.num_facets();
        let atoms = self.bounds.atoms.len();
        let valuation = self
            .bounds
            .atoms
            .iter()
            .zip(&self.digits)
            .map(|(a, &m)| (a.clone(), FacetSet::from_mask(n, m as u64)))
            .collect();
        let neighborhoods = plan
            .choices
            .iter()
            .zip(&self.digits[atoms..])
            .map(|(c, &d)| c[d].clone())
            .collect();
        let model = ModelCandidate {
            complex: Arc::clone(&plan.complex),
            valuation,
            neighborhoods,
        }
        .validate()
        .expect("enumerated events satisfy (SN)");
        if !self.advance() {
            self.current = None;
        }
        Some(model)
    }
}

/// A random model, deterministic in `seed`. Each agent gets between 1 and
/// `local_states_per_agent` states; atoms hold at each facet with
/// probability 1/2; each vertex draws up to `max_events_per_vertex` events,
/// half of them truth sets of small atom combinations and half supersets
/// of the vertex's star, keeping only draws that satisfy (SN).
pub fn random_model(seed: u64, bounds: &SearchBounds) -> Result<SecrecyModel, SearchError> {
    bounds.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = bounds.agent_names();
    let states: Vec<usize> = (0..bounds.agents)
        .map(|_| rng.gen_range(1..=bounds.local_states_per_agent))
        .collect();
    let cells = grid_cells(bounds.agents, &states);
    let chosen: Vec<&Vec<usize>> = match bounds.facet_subset_policy {
        FacetPolicy::FullGrid => cells.iter().collect(),
        FacetPolicy::AllNonemptySubsets => {
            let mut pick: Vec<&Vec<usize>> = cells.iter().filter(|_| rng.gen_bool(0.5)).collect();
            if pick.is_empty() {
                pick.push(&cells[rng.gen_range(0..cells.len())]);
            }
            pick
        }
    };
    let complex = Arc::new(complex_of(&names, &chosen));
    let n = complex.num_facets();

    let valuation: BTreeMap<String, FacetSet> = bounds
        .atoms
        .iter()
        .map(|a| {
            let set = FacetSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.5)));
            (a.clone(), set)
        })
        .collect();
    let atom_sets: Vec<&FacetSet> = valuation.values().collect();

    let mut neighborhoods = vec![BTreeSet::new(); complex.vertices().len()];
    for (vix, nb) in neighborhoods.iter_mut().enumerate() {
        for _ in 0..bounds.max_events_per_vertex {
            if !rng.gen_bool(0.6) {
                continue;
            }
            for _ in 0..=bounds.max_rejections {
                let event = if rng.gen_bool(0.5) && !atom_sets.is_empty() {
                    atom_combination(&mut rng, &atom_sets)
                } else {
                    let mut e = complex.star_set(vix).clone();
                    for f in 0..n {
                        if rng.gen_bool(0.3) {
                            e.insert(f);
                        }
                    }
                    e
                };
                if event_satisfies_sn(&complex, vix, &event) {
                    nb.insert(event);
                    break;
                }
            }
        }
    }
    Ok(ModelCandidate {
        complex,
        valuation,
        neighborhoods,
    }
    .validate()
    .expect("random events are filtered by (SN)"))
}

/// Truth set of a literal, or of a conjunction or disjunction of two.
fn atom_combination(rng: &mut ChaCha8Rng, atoms: &[&FacetSet]) -> FacetSet {
    let literal = |rng: &mut ChaCha8Rng| {
        let s = atoms[rng.gen_range(0..atoms.len())];
        if rng.gen_bool(0.5) {
            s.clone()
        } else {
            s.complement()
        }
    };
    let first = literal(rng);
    match rng.gen_range(0..3) {
        0 => first,
        1 => first.intersection(&literal(rng)),
        _ => first.union(&literal(rng)),
    }
}

/// Subformula bookkeeping for one query.
struct Query<'f> {
    formula: &'f Formula,
    subs: Vec<&'f Formula>,
    position: HashMap<&'f Formula, usize>,
    /// Colour of each `K`/`S` subformula's agent.
    colour: Vec<usize>,
}

struct Leaf {
    neighborhoods: Vec<BTreeSet<FacetSet>>,
    facet: usize,
}

struct Dfs<'q> {
    query: &'q Query<'q>,
    complex: &'q ChromaticComplex,
    valuation: &'q BTreeMap<String, FacetSet>,
    max_events: usize,
    truth: Vec<FacetSet>,
    decided: HashMap<(usize, FacetSet), bool>,
    designated: Vec<BTreeSet<FacetSet>>,
    leaves: u64,
}

impl Dfs<'_> {
    fn run(&mut self, i: usize) -> Option<Leaf> {
        let q = self.query;
        if i == q.subs.len() {
            self.leaves += 1;
            let top = &self.truth[q.position[q.formula]];
            return (0..self.complex.num_facets())
                .find(|&f| !top.contains(f))
                .map(|facet| Leaf {
                    neighborhoods: self.designated.clone(),
                    facet,
                });
        }
        let f = q.subs[i];
        if let Formula::S(_, body) = f {
            let t = self.truth[q.position[&**body]].clone();
            let candidates: Vec<usize> = self
                .complex
                .vertices_of_colour(q.colour[i])
                .iter()
                .copied()
                .filter(|&v| self.complex.star_set(v).is_subset(&t))
                .collect();
            return self.decide(i, &t, &candidates, 0);
        }
        let set = self.local(i);
        self.truth.push(set);
        let found = self.run(i + 1);
        self.truth.pop();
        found
    }

    /// Branches on whether `t` is designated at each candidate vertex, "not
    /// designated" first, then evaluates the `S` node and continues.
    fn decide(&mut self, i: usize, t: &FacetSet, candidates: &[usize], k: usize) -> Option<Leaf> {
        if k == candidates.len() {
            let mut set = FacetSet::empty(self.complex.num_facets());
            for &v in candidates {
                if self.decided[&(v, t.clone())] {
                    set.union_with(self.complex.star_set(v));
                }
            }
            self.truth.push(set);
            let found = self.run(i + 1);
            self.truth.pop();
            return found;
        }
        let v = candidates[k];
        let key = (v, t.clone());
        if self.decided.contains_key(&key) {
            return self.decide(i, t, candidates, k + 1);
        }
        self.decided.insert(key.clone(), false);
        let found = self.decide(i, t, candidates, k + 1);
        if found.is_some() {
            self.decided.remove(&key);
            return found;
        }
        let mut result = None;
        if self.designated[v].len() < self.max_events && event_satisfies_sn(self.complex, v, t) {
            self.decided.insert(key.clone(), true);
            self.designated[v].insert(t.clone());
            result = self.decide(i, t, candidates, k + 1);
            self.designated[v].remove(t);
        }
        self.decided.remove(&key);
        result
    }

    /// Truth set of a non-`S` subformula from its children.
    fn local(&self, i: usize) -> FacetSet {
        let q = self.query;
        let c = self.complex;
        let n = c.num_facets();
        let get = |g: &Formula| &self.truth[q.position[g]];
        match q.subs[i] {
            Formula::Atom(p) => self
                .valuation
                .get(p)
                .cloned()
                .unwrap_or_else(|| FacetSet::empty(n)),
            Formula::Top => FacetSet::full(n),
            Formula::Bot => FacetSet::empty(n),
            Formula::Not(g) => get(g).complement(),
            Formula::And(l, r) => get(l).intersection(get(r)),
            Formula::Or(l, r) => get(l).union(get(r)),
            Formula::Imp(l, r) => get(l).complement().union(get(r)),
            Formula::Iff(l, r) => {
                let (l, r) = (get(l), get(r));
                l.intersection(r)
                    .union(&l.complement().intersection(&r.complement()))
            }
            Formula::K(_, g) => {
                let t = get(g);
                let mut out = FacetSet::empty(n);
                for &v in c.vertices_of_colour(q.colour[i]) {
                    if c.star_set(v).is_subset(t) {
                        out.union_with(c.star_set(v));
                    }
                }
                out
            }
            Formula::S(..) => unreachable!("S nodes are decided by branching"),
        }
    }
}

/// Decides whether `formula` holds on every model within the bounds.
///
/// Only the atoms of `formula` and the designation of its `S`-bodies' truth
/// sets affect its truth, so the search ranges over valuations of those atoms
/// and, per `S` subformula and vertex where the owner knows the body, whether
/// that truth set is designated (subject to (SN) and the event bound). Every
/// model in the bounds agrees on `formula` with one of these, and each of
/// these is itself in the bounds. The reported countermodel is the first in
/// geometry / valuation / branching order, whatever the thread scheduling.
pub fn check_validity_bounded(
    formula: &Formula,
    bounds: &SearchBounds,
) -> Result<SearchResult, SearchError> {
    let start = Instant::now();
    bounds.check()?;
    let names = bounds.agent_names();
    for a in formula.agents() {
        if !names.contains(a) {
            return Err(SearchError::UnknownAgent(a.to_string()));
        }
    }
    let geos = geometries(bounds)?;
    let atoms: Vec<String> = formula.atoms().into_iter().map(str::to_string).collect();
    let mut estimate = 0.0;
    for c in &geos {
        estimate += 2f64.powi((c.num_facets() * atoms.len()) as i32);
    }
    if estimate > bounds.cap as f64 || geos.iter().any(|c| c.num_facets() * atoms.len() >= 64) {
        return Err(SearchError::BoundsTooLarge {
            estimate,
            cap: bounds.cap,
        });
    }

    let subs = formula.subformulas();
    let position = subs.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let colour = subs
        .iter()
        .map(|f| match f {
            Formula::K(a, _) | Formula::S(a, _) => {
                names.iter().position(|n| n == a).expect("checked")
            }
            _ => usize::MAX,
        })
        .collect();
    let query = Query {
        formula,
        subs,
        position,
        colour,
    };

    // Work items: (geometry, valuation code) in order.
    let mut items: Vec<(usize, u64)> = Vec::new();
    for (g, c) in geos.iter().enumerate() {
        let bits = c.num_facets() * atoms.len();
        items.extend((0..1u64 << bits).map(|v| (g, v)));
    }
    let examined = AtomicU64::new(0);
    let found = items.par_iter().find_map_first(|&(g, code)| {
        let c = &geos[g];
        let n = c.num_facets();
        let valuation: BTreeMap<String, FacetSet> = atoms
            .iter()
            .enumerate()
            .map(|(k, a)| {
                (
                    a.clone(),
                    FacetSet::from_mask(n, (code >> (k * n)) & ((1u64 << n) - 1)),
                )
            })
            .collect();
        let mut dfs = Dfs {
            query: &query,
            complex: c,
            valuation: &valuation,
            max_events: bounds.max_events_per_vertex,
            truth: Vec::with_capacity(query.subs.len()),
            decided: HashMap::new(),
            designated: vec![BTreeSet::new(); c.vertices().len()],
            leaves: 0,
        };
        let leaf = dfs.run(0);
        examined.fetch_add(dfs.leaves, Ordering::Relaxed);
        leaf.map(|leaf| (g, valuation, leaf))
    });

    let verdict = match found {
        None => Verdict::ValidUpToBound,
        Some((g, valuation, leaf)) => {
            let model = ModelCandidate {
                complex: Arc::clone(&geos[g]),
                valuation,
                neighborhoods: leaf.neighborhoods,
            }
            .validate()
            .expect("designations satisfy (SN)");
            let facet = model.complex().facets()[leaf.facet].clone();
            debug_assert!(!Evaluator::new(&model).satisfies(&facet, formula).unwrap());
            Verdict::Countermodel { model, facet }
        }
    };
    Ok(SearchResult {
        verdict,
        models_examined: examined.into_inner(),
        elapsed: start.elapsed(),
    })
}
