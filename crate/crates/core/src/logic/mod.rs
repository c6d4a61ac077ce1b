//! The formula language: atoms, Boolean connectives, knowledge `K{a}` and
//! secrecy `S{a}`.
//!
//! Concrete syntax (ASCII):
//!
//! ```text
//! formula := iff
//! iff     := imp ("<->" imp)*
//! imp     := or ("->" imp)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "~" unary | "K{" ident "}" unary | "S{" ident "}" unary
//!          | "(" formula ")" | ident | "#t" | "#f"
//! ```
//!
//! Atoms are lowercase identifiers. The AST keeps every connective so that
//! printing reproduces what was parsed; [`Formula::desugar`] reduces to the
//! core `{atom, ~, &, K, S}`.

mod parser;
mod printer;
mod tautology;

use std::collections::{BTreeSet, HashSet};

use crate::complex::AgentId;

pub use parser::{parse, SyntaxError};
pub use tautology::{propositional_tautology, TooManyAtoms, DEFAULT_TAUTOLOGY_CAP};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(String),
    Top,
    Bot,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    K(AgentId, Box<Formula>),
    S(AgentId, Box<Formula>),
}

/// Atom used to spell out `#t`/`#f` when desugaring.
pub const FALSUM_ATOM: &str = "p";

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, rhs: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(rhs))
    }

    pub fn imp(self, rhs: Formula) -> Formula {
        Formula::Imp(Box::new(self), Box::new(rhs))
    }

    pub fn iff(self, rhs: Formula) -> Formula {
        Formula::Iff(Box::new(self), Box::new(rhs))
    }

    pub fn k(agent: impl Into<AgentId>, body: Formula) -> Formula {
        Formula::K(agent.into(), Box::new(body))
    }

    pub fn s(agent: impl Into<AgentId>, body: Formula) -> Formula {
        Formula::S(agent.into(), Box::new(body))
    }

    /// Immediate subterms, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bot => vec![],
            Formula::Not(f) | Formula::K(_, f) | Formula::S(_, f) => vec![f],
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) | Formula::Iff(l, r) => {
                vec![l, r]
            }
        }
    }

    /// Every distinct subterm exactly once, children before parents.
    pub fn subformulas(&self) -> Vec<&Formula> {
        fn walk<'f>(f: &'f Formula, seen: &mut HashSet<&'f Formula>, out: &mut Vec<&'f Formula>) {
            if seen.contains(f) {
                return;
            }
            for c in f.children() {
                walk(c, seen, out);
            }
            seen.insert(f);
            out.push(f);
        }
        let mut out = Vec::new();
        walk(self, &mut HashSet::new(), &mut out);
        out
    }

    pub fn atoms(&self) -> BTreeSet<&str> {
        self.subformulas()
            .into_iter()
            .filter_map(|f| match f {
                Formula::Atom(a) => Some(a.as_str()),
                _ => None,
            })
            .collect()
    }

    pub fn agents(&self) -> BTreeSet<&AgentId> {
        self.subformulas()
            .into_iter()
            .filter_map(|f| match f {
                Formula::K(a, _) | Formula::S(a, _) => Some(a),
                _ => None,
            })
            .collect()
    }

    /// Nesting depth of `K`/`S`.
    pub fn modal_depth(&self) -> usize {
        let inner = self
            .children()
            .into_iter()
            .map(Formula::modal_depth)
            .max()
            .unwrap_or(0);
        match self {
            Formula::K(..) | Formula::S(..) => inner + 1,
            _ => inner,
        }
    }

    /// Rewrites into `{atom, ~, &, K, S}`.
    pub fn desugar(&self) -> Formula {
        let falsum = || Formula::atom(FALSUM_ATOM).and(Formula::atom(FALSUM_ATOM).not());
        let neg_and = |l: Formula, r: Formula| l.and(r).not();
        match self {
            Formula::Atom(_) => self.clone(),
            Formula::Bot => falsum(),
            Formula::Top => falsum().not(),
            Formula::Not(f) => f.desugar().not(),
            Formula::And(l, r) => l.desugar().and(r.desugar()),
            Formula::Or(l, r) => neg_and(l.desugar().not(), r.desugar().not()),
            Formula::Imp(l, r) => neg_and(l.desugar(), r.desugar().not()),
            Formula::Iff(l, r) => {
                let (l, r) = (l.desugar(), r.desugar());
                neg_and(l.clone(), r.clone().not()).and(neg_and(r, l.not()))
            }
            Formula::K(a, f) => Formula::K(a.clone(), Box::new(f.desugar())),
            Formula::S(a, f) => Formula::S(a.clone(), Box::new(f.desugar())),
        }
    }
}

impl std::str::FromStr for Formula {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
