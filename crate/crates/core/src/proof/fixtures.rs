//! Checked derivations of the derived secrecy principles.
//!
//! Each fixture is built for arbitrary formulas and agents; the library
//! instantiates them with atoms `p`, `q` and agents `a`, `b`.

use super::{Derivation, Justification, Scheme, Step};
use crate::complex::AgentId;
use crate::logic::{propositional_tautology, Formula, DEFAULT_TAUTOLOGY_CAP};

/// Appends steps and returns their indices. Propositional reasoning is spelled
/// out as one (A1) instance followed by modus ponens steps.
#[derive(Clone, Debug, Default)]
pub struct DerivationBuilder {
    steps: Vec<Step>,
}

impl DerivationBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn formula(&self, i: usize) -> &Formula {
        &self.steps[i].formula
    }

    fn push(&mut self, formula: Formula, by: Justification) -> usize {
        self.steps.push(Step { formula, by });
        self.steps.len() - 1
    }

    /// A modal axiom instance; `psi` matters only for (K), `b` only for (S2).
    pub fn axiom(
        &mut self,
        scheme: Scheme,
        phi: &Formula,
        psi: &Formula,
        a: &AgentId,
        b: &AgentId,
    ) -> usize {
        let f = scheme
            .instantiate(phi, psi, a, b)
            .expect("A1 has no instantiation; use `tautology`");
        self.push(f, Justification::Axiom(scheme))
    }

    pub fn tautology(&mut self, f: Formula) -> usize {
        assert!(
            propositional_tautology(&f, DEFAULT_TAUTOLOGY_CAP) == Ok(true),
            "not a tautology: {f}"
        );
        self.push(f, Justification::Axiom(Scheme::A1))
    }

    /// From step `i` (`A`) and step `j` (`A -> B`), derive `B`.
    pub fn mp(&mut self, i: usize, j: usize) -> usize {
        let Formula::Imp(_, cons) = self.formula(j).clone() else {
            panic!("step {j} is not an implication");
        };
        self.push(*cons, Justification::Mp(i, j))
    }

    pub fn nec(&mut self, i: usize, a: &AgentId) -> usize {
        let f = Formula::K(a.clone(), Box::new(self.formula(i).clone()));
        self.push(f, Justification::Nec(i, a.clone()))
    }

    pub fn re(&mut self, i: usize, a: &AgentId) -> usize {
        let Formula::Iff(l, r) = self.formula(i).clone() else {
            panic!("step {i} is not a biconditional");
        };
        self.push(
            Formula::S(a.clone(), l).iff(Formula::S(a.clone(), r)),
            Justification::Re(i, a.clone()),
        )
    }

    /// Derives `target` from earlier steps by propositional reasoning:
    /// adds `P1 -> (P2 -> ... -> target)` as (A1), then detaches each premise.
    pub fn conclude(&mut self, premises: &[usize], target: Formula) -> usize {
        let chain = premises
            .iter()
            .rev()
            .fold(target, |acc, &i| self.formula(i).clone().imp(acc));
        let mut last = self.tautology(chain);
        for &i in premises {
            last = self.mp(i, last);
        }
        last
    }

    /// From `A` derive `K{a} A`, then `K{a}` distributed over the
    /// implication `A = B -> C`: yields `K{a} B -> K{a} C`.
    pub fn distribute(&mut self, i: usize, a: &AgentId) -> usize {
        let Formula::Imp(b, c) = self.formula(i).clone() else {
            panic!("step {i} is not an implication");
        };
        let nec = self.nec(i, a);
        let k = self.axiom(Scheme::K, &b, &c, a, a);
        self.mp(nec, k)
    }

    pub fn finish(self, name: &str) -> Derivation {
        Derivation {
            name: name.to_string(),
            steps: self.steps,
        }
    }
}

fn s(a: &AgentId, f: &Formula) -> Formula {
    Formula::S(a.clone(), Box::new(f.clone()))
}

fn k(a: &AgentId, f: &Formula) -> Formula {
    Formula::K(a.clone(), Box::new(f.clone()))
}

fn not(f: &Formula) -> Formula {
    f.clone().not()
}

/// `S{a} φ -> φ`.
fn secret_implies_truth(d: &mut DerivationBuilder, phi: &Formula, a: &AgentId) -> usize {
    let s1 = d.axiom(Scheme::S1, phi, phi, a, a);
    let t = d.axiom(Scheme::T, phi, phi, a, a);
    d.conclude(&[s1, t], s(a, phi).imp(phi.clone()))
}

/// `S{a} φ -> ~K{b} ~φ`.
fn secret_not_refuted(d: &mut DerivationBuilder, phi: &Formula, a: &AgentId, b: &AgentId) -> usize {
    let truth = secret_implies_truth(d, phi, a);
    let t = d.axiom(Scheme::T, &not(phi), phi, b, b);
    d.conclude(&[truth, t], s(a, phi).imp(not(&k(b, &not(phi)))))
}

/// `~S{a} φ -> K{a} ~S{a} φ`.
fn owner_knows_non_secret(d: &mut DerivationBuilder, phi: &Formula, a: &AgentId) -> usize {
    let sa = s(a, phi);
    let t = d.axiom(Scheme::T, &sa, phi, a, a);
    let five = d.axiom(Scheme::Five, &sa, phi, a, a);
    let s4 = d.axiom(Scheme::S4, phi, phi, a, a);
    let contra = d.conclude(&[s4], not(&k(a, &sa)).imp(not(&sa)));
    let lifted = d.distribute(contra, a);
    d.conclude(&[t, five, lifted], not(&sa).imp(k(a, &not(&sa))))
}

/// `~S{a} χ` from an earlier step `χ -> K{b} χ`.
fn no_foreign_secret(
    d: &mut DerivationBuilder,
    local: usize,
    chi: &Formula,
    a: &AgentId,
    b: &AgentId,
) -> usize {
    let truth = secret_implies_truth(d, chi, a);
    let s2 = d.axiom(Scheme::S2, chi, chi, a, b);
    d.conclude(&[truth, local, s2], not(&s(a, chi)))
}

fn build(name: &str, f: impl FnOnce(&mut DerivationBuilder)) -> Derivation {
    let mut d = DerivationBuilder::new();
    f(&mut d);
    d.finish(name)
}

/// The derivation library for formulas `phi`, `psi` and distinct agents
/// `a`, `b`.
pub fn derivations_for(phi: &Formula, psi: &Formula, a: &AgentId, b: &AgentId) -> Vec<Derivation> {
    let sa = s(a, phi);
    vec![
        build("secret-implies-truth", |d| {
            secret_implies_truth(d, phi, a);
        }),
        build("secret-not-refuted", |d| {
            secret_not_refuted(d, phi, a, b);
        }),
        build("owner-knows-non-secret", |d| {
            owner_knows_non_secret(d, phi, a);
        }),
        build("owner-locality-positive", |d| {
            let s4 = d.axiom(Scheme::S4, phi, phi, a, a);
            let t = d.axiom(Scheme::T, &sa, phi, a, a);
            d.conclude(&[s4, t], sa.clone().iff(k(a, &sa)));
        }),
        build("owner-locality-negative", |d| {
            let fwd = owner_knows_non_secret(d, phi, a);
            let t = d.axiom(Scheme::T, &not(&sa), phi, a, a);
            d.conclude(&[fwd, t], not(&sa).iff(k(a, &not(&sa))));
        }),
        build("secrecy-profile", |d| {
            let s1 = d.axiom(Scheme::S1, phi, phi, a, a);
            let truth = secret_implies_truth(d, phi, a);
            let s2 = d.axiom(Scheme::S2, phi, phi, a, b);
            let refute = secret_not_refuted(d, phi, a, b);
            let profile = k(a, phi)
                .and(phi.clone())
                .and(not(&k(b, phi)).and(not(&k(b, &not(phi)))));
            d.conclude(&[s1, truth, s2, refute], sa.clone().imp(profile));
        }),
        build("owner-knows-ignorance", |d| {
            let s2 = d.axiom(Scheme::S2, phi, phi, a, b);
            let lifted = d.distribute(s2, a);
            let s4 = d.axiom(Scheme::S4, phi, phi, a, a);
            d.conclude(&[s4, lifted], sa.clone().imp(k(a, &not(&k(b, phi)))));
        }),
        build("owner-knows-non-refutation", |d| {
            let refute = secret_not_refuted(d, phi, a, b);
            let lifted = d.distribute(refute, a);
            let s4 = d.axiom(Scheme::S4, phi, phi, a, a);
            d.conclude(&[s4, lifted], sa.clone().imp(k(a, &not(&k(b, &not(phi))))));
        }),
        build("secret-status-hidden", |d| {
            let truth = secret_implies_truth(d, phi, a);
            let lifted = d.distribute(truth, b);
            let s2 = d.axiom(Scheme::S2, phi, phi, a, b);
            d.conclude(&[lifted, s2], sa.clone().imp(not(&k(b, &sa))));
        }),
        build("secret-status-unrefuted", |d| {
            let t = d.axiom(Scheme::T, &not(&sa), phi, b, b);
            d.conclude(&[t], sa.clone().imp(not(&k(b, &not(&sa)))));
        }),
        build("no-secret-about-knowledge", |d| {
            let chi = k(b, psi);
            let local = d.axiom(Scheme::Four, psi, psi, b, b);
            no_foreign_secret(d, local, &chi, a, b);
        }),
        build("no-secret-about-ignorance", |d| {
            let chi = not(&k(b, psi));
            let local = d.axiom(Scheme::Five, psi, psi, b, b);
            no_foreign_secret(d, local, &chi, a, b);
        }),
        build("no-secret-about-secrets", |d| {
            let chi = s(b, psi);
            let local = d.axiom(Scheme::S4, psi, psi, b, b);
            no_foreign_secret(d, local, &chi, a, b);
        }),
        build("no-secret-about-non-secrets", |d| {
            let chi = not(&s(b, psi));
            let local = owner_knows_non_secret(d, psi, b);
            no_foreign_secret(d, local, &chi, a, b);
        }),
        build("no-secret-top", |d| {
            let top = d.tautology(Formula::Top);
            let known = d.nec(top, b);
            let s2 = d.axiom(Scheme::S2, &Formula::Top, phi, a, b);
            d.conclude(&[known, s2], not(&s(a, &Formula::Top)));
        }),
        build("knowledge-conjunction", |d| {
            let both = phi.clone().and(psi.clone());
            let intro = d.tautology(phi.clone().imp(psi.clone().imp(both.clone())));
            let first = d.distribute(intro, a);
            let k2 = d.axiom(Scheme::K, psi, &both, a, a);
            d.conclude(&[first, k2], k(a, phi).and(k(a, psi)).imp(k(a, &both)));
        }),
        build("secrecy-replacement", |d| {
            let comm = d.tautology(
                phi.clone()
                    .and(psi.clone())
                    .iff(psi.clone().and(phi.clone())),
            );
            d.re(comm, a);
        }),
    ]
}

/// The derivation library with `φ = p`, `ψ = q` and agents `a`, `b`.
pub fn fixture_library() -> Vec<Derivation> {
    derivations_for(
        &Formula::atom("p"),
        &Formula::atom("q"),
        &AgentId::from("a"),
        &AgentId::from("b"),
    )
}

#[cfg(test)]
mod tests {
    use super::super::{check_derivation, StepFailure};
    use super::*;
    use crate::logic::parse;

    #[test]
    fn every_fixture_checks() {
        let lib = fixture_library();
        assert!(lib.len() >= 12);
        for d in &lib {
            assert_eq!(check_derivation(d), Ok(()), "{}", d.name);
        }
    }

    #[test]
    fn conclusions() {
        let lib = fixture_library();
        let concl = |name: &str| {
            lib.iter()
                .find(|d| d.name == name)
                .unwrap()
                .conclusion()
                .unwrap()
                .clone()
        };
        let expect = [
            ("secret-implies-truth", "S{a} p -> p"),
            ("secret-not-refuted", "S{a} p -> ~K{b} ~p"),
            ("owner-knows-non-secret", "~S{a} p -> K{a} ~S{a} p"),
            ("owner-locality-positive", "S{a} p <-> K{a} S{a} p"),
            ("owner-locality-negative", "~S{a} p <-> K{a} ~S{a} p"),
            (
                "secrecy-profile",
                "S{a} p -> K{a} p & p & (~K{b} p & ~K{b} ~p)",
            ),
            ("owner-knows-ignorance", "S{a} p -> K{a} ~K{b} p"),
            ("owner-knows-non-refutation", "S{a} p -> K{a} ~K{b} ~p"),
            ("secret-status-hidden", "S{a} p -> ~K{b} S{a} p"),
            ("secret-status-unrefuted", "S{a} p -> ~K{b} ~S{a} p"),
            ("no-secret-about-knowledge", "~S{a} K{b} q"),
            ("no-secret-about-ignorance", "~S{a} ~K{b} q"),
            ("no-secret-about-secrets", "~S{a} S{b} q"),
            ("no-secret-about-non-secrets", "~S{a} ~S{b} q"),
            ("no-secret-top", "~S{a} #t"),
            ("knowledge-conjunction", "K{a} p & K{a} q -> K{a}(p & q)"),
            ("secrecy-replacement", "S{a}(p & q) <-> S{a}(q & p)"),
        ];
        assert_eq!(lib.len(), expect.len());
        for (name, text) in expect {
            assert_eq!(concl(name), parse(text).unwrap(), "{name}");
        }
    }

    #[test]
    fn swapped_mp_operands_fail() {
        let mut d = fixture_library()
            .into_iter()
            .find(|d| d.name == "secret-implies-truth")
            .unwrap();
        let k = d
            .steps
            .iter()
            .position(|s| matches!(s.by, Justification::Mp(..)))
            .unwrap();
        if let Justification::Mp(i, j) = d.steps[k].by {
            d.steps[k].by = Justification::Mp(j, i);
        }
        let err = check_derivation(&d).unwrap_err();
        assert_eq!((err.index, err.reason), (k, StepFailure::BadMP));
    }

    #[test]
    fn complex_instances_check() {
        let phi = parse("K{b} r | S{c}(p -> q)").unwrap();
        let psi = parse("~#f & s").unwrap();
        for d in derivations_for(&phi, &psi, &"c".into(), &"a".into()) {
            assert_eq!(check_derivation(&d), Ok(()), "{}", d.name);
        }
    }
}
