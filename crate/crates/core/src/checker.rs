//! Satisfaction, truth sets and validity on a single model.

use std::collections::HashMap;

use thiserror::Error;

use crate::complex::{FacetId, LookupError};
use crate::facet_set::FacetSet;
use crate::logic::Formula;
use crate::model::SecrecyModel;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unknown facet {0}")]
    UnknownFacet(String),
    #[error("unknown agent {0}")]
    UnknownAgent(String),
}

impl From<LookupError> for EvalError {
    fn from(e: LookupError) -> Self {
        match e {
            LookupError::UnknownAgent(a) => EvalError::UnknownAgent(a),
            other => EvalError::UnknownFacet(other.to_string()),
        }
    }
}

fn check_agents(model: &SecrecyModel, formula: &Formula) -> Result<(), EvalError> {
    for a in formula.agents() {
        model
            .complex()
            .agent_index(a)
            .map_err(|_| EvalError::UnknownAgent(a.to_string()))?;
    }
    Ok(())
}

/// `M, X ⊩ φ`, evaluated clause by clause. An `S` node computes the truth
/// set of its body by evaluating the body at every facet.
pub fn satisfies(
    model: &SecrecyModel,
    facet: &FacetId,
    formula: &Formula,
) -> Result<bool, EvalError> {
    let fix = model
        .complex()
        .facet_index(facet)
        .map_err(|_| EvalError::UnknownFacet(facet.key()))?;
    check_agents(model, formula)?;
    Ok(sat(model, fix, formula))
}

fn sat(m: &SecrecyModel, fix: usize, f: &Formula) -> bool {
    let c = m.complex();
    match f {
        Formula::Atom(p) => m.valuation().get(p).is_some_and(|s| s.contains(fix)),
        Formula::Top => true,
        Formula::Bot => false,
        Formula::Not(g) => !sat(m, fix, g),
        Formula::And(l, r) => sat(m, fix, l) && sat(m, fix, r),
        Formula::Or(l, r) => sat(m, fix, l) || sat(m, fix, r),
        Formula::Imp(l, r) => !sat(m, fix, l) || sat(m, fix, r),
        Formula::Iff(l, r) => sat(m, fix, l) == sat(m, fix, r),
        Formula::K(a, g) => {
            let colour = c.agent_index(a).expect("agents checked");
            c.class_of(fix, colour).iter().all(|y| sat(m, y, g))
        }
        Formula::S(a, g) => {
            let colour = c.agent_index(a).expect("agents checked");
            if !c.class_of(fix, colour).iter().all(|y| sat(m, y, g)) {
                return false;
            }
            let extension = FacetSet::from_indices(
                c.num_facets(),
                (0..c.num_facets()).filter(|&y| sat(m, y, g)),
            );
            m.neighborhood(c.vertex_at(fix, colour))
                .contains(&extension)
        }
    }
}

/// Bottom-up truth-set evaluation with a per-evaluator cache of modal
/// subformulas.
pub struct Evaluator<'m> {
    model: &'m SecrecyModel,
    cache: HashMap<Formula, FacetSet>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m SecrecyModel) -> Self {
        Evaluator {
            model,
            cache: HashMap::new(),
        }
    }

    pub fn model(&self) -> &'m SecrecyModel {
        self.model
    }

    /// `⟦φ⟧` as a facet-index set.
    pub fn truth_set(&mut self, formula: &Formula) -> Result<FacetSet, EvalError> {
        check_agents(self.model, formula)?;
        Ok(self.eval(formula))
    }

    pub fn satisfies(&mut self, facet: &FacetId, formula: &Formula) -> Result<bool, EvalError> {
        let fix = self
            .model
            .complex()
            .facet_index(facet)
            .map_err(|_| EvalError::UnknownFacet(facet.key()))?;
        Ok(self.truth_set(formula)?.contains(fix))
    }

    pub fn valid(&mut self, formula: &Formula) -> Result<bool, EvalError> {
        Ok(self.truth_set(formula)?.is_full())
    }

    // Boolean connectives are cheap bitset operations; only modal nodes are
    // worth a lookup, since hashing a formula walks all of it.
    fn eval(&mut self, f: &Formula) -> FacetSet {
        let n = self.model.complex().num_facets();
        match f {
            Formula::Atom(p) => self.model.atom_set(p),
            Formula::Top => FacetSet::full(n),
            Formula::Bot => FacetSet::empty(n),
            Formula::Not(g) => self.eval(g).complement(),
            Formula::And(l, r) => self.eval(l).intersection(&self.eval(r)),
            Formula::Or(l, r) => self.eval(l).union(&self.eval(r)),
            Formula::Imp(l, r) => self.eval(l).complement().union(&self.eval(r)),
            Formula::Iff(l, r) => {
                let (l, r) = (self.eval(l), self.eval(r));
                l.intersection(&r)
                    .union(&l.complement().intersection(&r.complement()))
            }
            Formula::K(a, g) | Formula::S(a, g) => {
                if let Some(set) = self.cache.get(f) {
                    return set.clone();
                }
                let body = self.eval(g);
                let colour = self.model.complex().agent_index(a).expect("agents checked");
                let set = known_set(self.model, colour, &body, matches!(f, Formula::S(..)));
                self.cache.insert(f.clone(), set.clone());
                set
            }
        }
    }
}

/// Facets whose `colour`-vertex has its star inside `truth`, optionally also
/// requiring `truth` to be a designated event there.
fn known_set(m: &SecrecyModel, colour: usize, truth: &FacetSet, secret: bool) -> FacetSet {
    let c = m.complex();
    let mut out = FacetSet::empty(c.num_facets());
    for &v in c.vertices_of_colour(colour) {
        let star = c.star_set(v);
        if star.is_subset(truth) && (!secret || m.neighborhood(v).contains(truth)) {
            out.union_with(star);
        }
    }
    out
}

/// `⟦φ⟧` as facet ids in canonical order.
pub fn truth_set(model: &SecrecyModel, formula: &Formula) -> Result<Vec<FacetId>, EvalError> {
    let set = Evaluator::new(model).truth_set(formula)?;
    Ok(model.complex().facet_ids(&set))
}

/// `M ⊨ φ`: true at every facet.
pub fn valid_on(model: &SecrecyModel, formula: &Formula) -> Result<bool, EvalError> {
    Evaluator::new(model).valid(formula)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse;
    use crate::model::tests::{cell, cells, running};

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn running_example_truths() {
        let m = running();
        assert!(satisfies(&m, &cell("x1"), &f("S{a} p")).unwrap());
        assert!(!satisfies(&m, &cell("y1"), &f("S{a} p")).unwrap());
        assert!(satisfies(&m, &cell("z2"), &f("#t")).unwrap());
        assert_eq!(
            truth_set(&m, &f("p")).unwrap(),
            cells("x1 x2 x3 y1").into_iter().collect::<Vec<_>>()
        );
        assert_eq!(
            truth_set(&m, &f("S{a} p")).unwrap(),
            cells("x1 x2 x3").into_iter().collect::<Vec<_>>()
        );
        assert!(truth_set(&m, &f("#f")).unwrap().is_empty());
        assert!(valid_on(&m, &f("S{a} p -> K{a} p")).unwrap());
        assert!(!valid_on(&m, &f("S{a} p -> S{a} S{a} p")).unwrap());
        assert!(valid_on(&m, &f("p | ~p")).unwrap());
    }

    #[test]
    fn unknown_agents_and_facets_are_errors() {
        let m = running();
        assert_eq!(
            satisfies(&m, &cell("x1"), &f("K{c} p")),
            Err(EvalError::UnknownAgent("c".into()))
        );
        assert!(matches!(
            satisfies(&m, &FacetId::parse_key("u0+w9").unwrap(), &f("p")),
            Err(EvalError::UnknownFacet(_))
        ));
        let aux = Formula::S(crate::complex::AgentId::aux(), Box::new(f("p")));
        assert_eq!(valid_on(&m, &aux), Err(EvalError::UnknownAgent("*".into())));
    }

    #[test]
    fn bottom_up_agrees_with_recursion() {
        let m = running();
        let mut ev = Evaluator::new(&m);
        for text in [
            "S{a} p",
            "K{b} ~S{a} p",
            "S{a}(p & ~K{b} p) <-> K{a} S{a} p",
            "S{b} p | q -> K{a} p",
        ] {
            let g = f(text);
            let set = ev.truth_set(&g).unwrap();
            for (fix, x) in m.complex().facets().iter().enumerate() {
                assert_eq!(
                    set.contains(fix),
                    satisfies(&m, x, &g).unwrap(),
                    "{text} at {x}"
                );
            }
        }
    }
}
