//! Simplicial secrecy models.
//!
//! A [`SecrecyModel`] is a pure chromatic simplicial complex whose facets are
//! global states and whose coloured vertices are local states, decorated with
//! a facet valuation and per-vertex secrecy neighborhoods. On top of that this
//! crate provides:
//!
//! * [`logic`]: the formula language with knowledge `K{a}` and secrecy `S{a}`,
//! * [`checker`]: the satisfaction relation and truth sets,
//! * [`proof`]: a Hilbert-style checker for secrecy-logic derivations plus a library of
//!   checked derivations,
//! * [`share`]: the share-model construction that removes an auxiliary colour,
//! * [`search`]: bounded model enumeration, random models and countermodel
//!   search,
//! * [`document`]: the JSON file formats.

pub mod checker;
pub mod complex;
pub mod document;
mod facet_set;
pub mod logic;
pub mod model;
pub mod proof;
pub mod search;
pub mod share;

pub use checker::{satisfies, truth_set, valid_on, EvalError, Evaluator};
pub use complex::{
    validate_complex, AgentId, ChromaticComplex, ComplexViolation, FacetId, InvalidComplex,
    LookupError, RawComplex, VertexId, AUX_COLOUR,
};
pub use document::{DerivationDocument, DocumentError, ModelDocument};
pub use facet_set::FacetSet;
pub use logic::{parse, Formula, SyntaxError};
pub use model::{
    check_sn, validate_model, ModelCandidate, ModelError, SecrecyModel, SnViolation, SnWitness,
};
pub use proof::{
    check_axiom_instance, check_derivation, fixture_library, Derivation, Justification, Scheme,
    Step, StepError, StepFailure,
};
pub use search::{
    check_validity_bounded, enumerate_models, random_model, FacetPolicy, SearchBounds, SearchError,
    SearchResult, Verdict,
};
pub use share::{
    build_share_model, to_aux, AuxModel, GroupElem, RepresentationReport, ShareAssignment,
    ShareError, ShareModel,
};
