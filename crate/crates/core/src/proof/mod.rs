//! Hilbert-style derivations in the secrecy logic: axiom schemes (A1), (K), (T), (4), (5),
//! (S1), (S2), (S4) and the rules modus ponens, knowledge necessitation and
//! replacement of equivalents under `S{a}`.

mod fixtures;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::complex::AgentId;
use crate::logic::{propositional_tautology, Formula, DEFAULT_TAUTOLOGY_CAP};

pub use fixtures::{derivations_for, fixture_library, DerivationBuilder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    /// Propositional tautologies.
    A1,
    /// `K{a}(φ -> ψ) -> (K{a} φ -> K{a} ψ)`
    K,
    /// `K{a} φ -> φ`
    T,
    /// `K{a} φ -> K{a} K{a} φ`
    Four,
    /// `~K{a} φ -> K{a} ~K{a} φ`
    Five,
    /// `S{a} φ -> K{a} φ`
    S1,
    /// `S{a} φ -> ~K{b} φ` with `b ≠ a`
    S2,
    /// `S{a} φ -> K{a} S{a} φ`
    S4,
}

impl Scheme {
    pub const ALL: [Scheme; 8] = [
        Scheme::A1,
        Scheme::K,
        Scheme::T,
        Scheme::Four,
        Scheme::Five,
        Scheme::S1,
        Scheme::S2,
        Scheme::S4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::A1 => "A1",
            Scheme::K => "K",
            Scheme::T => "T",
            Scheme::Four => "4",
            Scheme::Five => "5",
            Scheme::S1 => "S1",
            Scheme::S2 => "S2",
            Scheme::S4 => "S4",
        }
    }

    /// The shape of a modal scheme; `None` for A1.
    fn pattern(self) -> Option<Pat> {
        use Pat::*;
        let imp = |l, r| Imp(Box::new(l), Box::new(r));
        let k = |a, p| K(a, Box::new(p));
        let s = |a, p| S(a, Box::new(p));
        let not = |p| Not(Box::new(p));
        Some(match self {
            Scheme::A1 => return None,
            Scheme::K => imp(k(0, imp(Phi, Psi)), imp(k(0, Phi), k(0, Psi))),
            Scheme::T => imp(k(0, Phi), Phi),
            Scheme::Four => imp(k(0, Phi), k(0, k(0, Phi))),
            Scheme::Five => imp(not(k(0, Phi)), k(0, not(k(0, Phi)))),
            Scheme::S1 => imp(s(0, Phi), k(0, Phi)),
            Scheme::S2 => imp(s(0, Phi), not(k(1, Phi))),
            Scheme::S4 => imp(s(0, Phi), k(0, s(0, Phi))),
        })
    }

    /// The instance with `φ`, `ψ`, `a`, `b` substituted. `ψ` is used only by
    /// (K) and `b` only by (S2); A1 has no shape and returns `None`.
    pub fn instantiate(
        self,
        phi: &Formula,
        psi: &Formula,
        a: &AgentId,
        b: &AgentId,
    ) -> Option<Formula> {
        Some(self.pattern()?.fill(phi, psi, [a, b]))
    }

    /// Whether `formula` is an instance of this scheme, side conditions
    /// included.
    pub fn matches(self, formula: &Formula) -> bool {
        match self.pattern() {
            None => propositional_tautology(formula, DEFAULT_TAUTOLOGY_CAP).unwrap_or(false),
            Some(pat) => {
                let mut b = Bindings::default();
                pat.unify(formula, &mut b) && (self != Scheme::S2 || b.agents[0] != b.agents[1])
            }
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown axiom scheme {0:?}")]
pub struct UnknownScheme(pub String);

impl FromStr for Scheme {
    type Err = UnknownScheme;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| UnknownScheme(s.to_string()))
    }
}

pub fn check_axiom_instance(scheme: Scheme, formula: &Formula) -> bool {
    scheme.matches(formula)
}

/// Scheme shapes over two formula variables and two agent variables.
#[derive(Clone, Debug)]
enum Pat {
    Phi,
    Psi,
    Not(Box<Pat>),
    Imp(Box<Pat>, Box<Pat>),
    K(usize, Box<Pat>),
    S(usize, Box<Pat>),
}

#[derive(Default)]
struct Bindings<'f> {
    phi: Option<&'f Formula>,
    psi: Option<&'f Formula>,
    agents: [Option<&'f AgentId>; 2],
}

fn bind<'f, T: PartialEq + ?Sized>(slot: &mut Option<&'f T>, value: &'f T) -> bool {
    match slot {
        Some(bound) => *bound == value,
        None => {
            *slot = Some(value);
            true
        }
    }
}

impl Pat {
    fn unify<'f>(&self, f: &'f Formula, b: &mut Bindings<'f>) -> bool {
        match (self, f) {
            (Pat::Phi, _) => bind(&mut b.phi, f),
            (Pat::Psi, _) => bind(&mut b.psi, f),
            (Pat::Not(p), Formula::Not(g)) => p.unify(g, b),
            (Pat::Imp(pl, pr), Formula::Imp(l, r)) => pl.unify(l, b) && pr.unify(r, b),
            (Pat::K(i, p), Formula::K(a, g)) | (Pat::S(i, p), Formula::S(a, g)) => {
                bind(&mut b.agents[*i], a) && p.unify(g, b)
            }
            _ => false,
        }
    }

    fn fill(&self, phi: &Formula, psi: &Formula, agents: [&AgentId; 2]) -> Formula {
        let go = |p: &Pat| Box::new(p.fill(phi, psi, agents));
        match self {
            Pat::Phi => phi.clone(),
            Pat::Psi => psi.clone(),
            Pat::Not(p) => Formula::Not(go(p)),
            Pat::Imp(l, r) => Formula::Imp(go(l), go(r)),
            Pat::K(i, p) => Formula::K(agents[*i].clone(), go(p)),
            Pat::S(i, p) => Formula::S(agents[*i].clone(), go(p)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Justification {
    Axiom(Scheme),
    /// `Mp(i, j)`: step `j` is `step i -> this step`.
    Mp(usize, usize),
    /// `Nec(i, a)`: this step is `K{a}` of step `i`.
    Nec(usize, AgentId),
    /// `Re(i, a)`: step `i` is `φ <-> ψ` and this step is `S{a} φ <-> S{a} ψ`.
    Re(usize, AgentId),
}

impl Justification {
    fn references(&self) -> Vec<usize> {
        match self {
            Justification::Axiom(_) => vec![],
            Justification::Mp(i, j) => vec![*i, *j],
            Justification::Nec(i, _) | Justification::Re(i, _) => vec![*i],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub formula: Formula,
    pub by: Justification,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub name: String,
    pub steps: Vec<Step>,
}

impl Derivation {
    /// The last formula, if any.
    pub fn conclusion(&self) -> Option<&Formula> {
        self.steps.last().map(|s| &s.formula)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepFailure {
    BadAxiomMatch,
    BadMP,
    BadNec,
    BadRE,
    ForwardReference,
}

impl fmt::Display for StepFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("step {index}: {reason}")]
pub struct StepError {
    pub index: usize,
    pub reason: StepFailure,
}

fn check_step(steps: &[Step], index: usize) -> Result<(), StepFailure> {
    let Step { formula, by } = &steps[index];
    if by.references().iter().any(|&i| i >= index) {
        return Err(StepFailure::ForwardReference);
    }
    let (ok, failure) = match by {
        Justification::Axiom(scheme) => (scheme.matches(formula), StepFailure::BadAxiomMatch),
        Justification::Mp(i, j) => {
            let ok = matches!(&steps[*j].formula,
                Formula::Imp(ante, cons) if **ante == steps[*i].formula && **cons == *formula);
            (ok, StepFailure::BadMP)
        }
        Justification::Nec(i, a) => {
            let ok =
                matches!(formula, Formula::K(b, body) if b == a && **body == steps[*i].formula);
            (ok, StepFailure::BadNec)
        }
        Justification::Re(i, a) => {
            let ok = match &steps[*i].formula {
                Formula::Iff(l, r) => {
                    *formula
                        == Formula::S(a.clone(), l.clone()).iff(Formula::S(a.clone(), r.clone()))
                }
                _ => false,
            };
            (ok, StepFailure::BadRE)
        }
    };
    if ok {
        Ok(())
    } else {
        Err(failure)
    }
}

/// Checks every step in order and reports the first failure.
pub fn check_derivation(d: &Derivation) -> Result<(), StepError> {
    for index in 0..d.steps.len() {
        check_step(&d.steps, index).map_err(|reason| StepError { index, reason })?;
    }
    Ok(())
}
