mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use secrecy_core::logic::propositional_tautology;
use secrecy_core::proof::derivations_for;
use secrecy_core::{check_derivation, parse, AgentId, Derivation, Formula, Justification, Scheme};

use common::{formula, formula_over};

/// Fully parenthesised core-connective text, written independently of
/// `Formula::desugar`.
fn desugar_text(f: &Formula) -> String {
    let falsum = "(p & ~p)";
    match f {
        Formula::Atom(p) => p.clone(),
        Formula::Top => format!("~{falsum}"),
        Formula::Bot => falsum.to_owned(),
        Formula::Not(g) => format!("~({})", desugar_text(g)),
        Formula::And(l, r) => format!("({}) & ({})", desugar_text(l), desugar_text(r)),
        Formula::Or(l, r) => format!("~(~({}) & ~({}))", desugar_text(l), desugar_text(r)),
        Formula::Imp(l, r) => format!("~(({}) & ~({}))", desugar_text(l), desugar_text(r)),
        Formula::Iff(l, r) => {
            let (l, r) = (desugar_text(l), desugar_text(r));
            format!("~(({l}) & ~({r})) & ~(({r}) & ~({l}))")
        }
        Formula::K(a, g) => format!("K{{{a}}}({})", desugar_text(g)),
        Formula::S(a, g) => format!("S{{{a}}}({})", desugar_text(g)),
    }
}

fn skeleton<'f>(f: &'f Formula, out: &mut Vec<&'f Formula>) {
    match f {
        Formula::Atom(_) | Formula::K(..) | Formula::S(..) => {
            if !out.contains(&f) {
                out.push(f);
            }
        }
        Formula::Top | Formula::Bot => {}
        Formula::Not(g) => skeleton(g, out),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) | Formula::Iff(l, r) => {
            skeleton(l, out);
            skeleton(r, out);
        }
    }
}

fn eval_row(f: &Formula, row: &BTreeMap<&Formula, bool>) -> bool {
    match f {
        Formula::Atom(_) | Formula::K(..) | Formula::S(..) => row[f],
        Formula::Top => true,
        Formula::Bot => false,
        Formula::Not(g) => !eval_row(g, row),
        Formula::And(l, r) => eval_row(l, row) && eval_row(r, row),
        Formula::Or(l, r) => eval_row(l, row) || eval_row(r, row),
        Formula::Imp(l, r) => !eval_row(l, row) || eval_row(r, row),
        Formula::Iff(l, r) => eval_row(l, row) == eval_row(r, row),
    }
}

fn brute_force_tautology(f: &Formula) -> bool {
    let mut vars = Vec::new();
    skeleton(f, &mut vars);
    (0..1u32 << vars.len()).all(|bits| {
        let row = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, bits & (1 << i) != 0))
            .collect();
        eval_row(f, &row)
    })
}

fn all_subformulas(f: &Formula) -> Vec<Formula> {
    let mut out = vec![f.clone()];
    for c in f.children() {
        out.extend(all_subformulas(c));
    }
    out
}

/// Tries every assignment of subterms and agents to the metavariables.
fn brute_force_match(scheme: Scheme, f: &Formula) -> bool {
    let subs = all_subformulas(f);
    let mut agents: Vec<AgentId> = f.agents().into_iter().cloned().collect();
    agents.push(AgentId::from("fresh"));
    for phi in &subs {
        for psi in &subs {
            for a in &agents {
                for b in &agents {
                    if scheme == Scheme::S2 && a == b {
                        continue;
                    }
                    if scheme.instantiate(phi, psi, a, b).as_ref() == Some(f) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn modal_schemes() -> impl Iterator<Item = Scheme> {
    Scheme::ALL.into_iter().filter(|s| *s != Scheme::A1)
}

fn scheme_instance() -> impl Strategy<Value = Formula> {
    let small = || formula_over(&["a", "b"], &["p", "q"], 2);
    (
        prop::sample::select(modal_schemes().collect::<Vec<_>>()),
        small(),
        small(),
        prop::sample::select(vec!["a", "b"]),
        prop::sample::select(vec!["a", "b"]),
    )
        .prop_map(|(s, phi, psi, a, b)| {
            let b = if s == Scheme::S2 && a == b {
                if a == "a" {
                    "b"
                } else {
                    "a"
                }
            } else {
                b
            };
            s.instantiate(&phi, &psi, &AgentId::from(a), &AgentId::from(b))
                .expect("modal scheme")
        })
}

fn fixtures_for(phi: &Formula, psi: &Formula) -> Vec<Derivation> {
    derivations_for(phi, psi, &AgentId::from("a"), &AgentId::from("b"))
}

fn prefix(d: &Derivation, len: usize) -> Derivation {
    Derivation {
        name: d.name.clone(),
        steps: d.steps[..len].to_vec(),
    }
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(f in formula(6)) {
        let text = f.to_string();
        prop_assert_eq!(parse(&text).unwrap(), f, "{}", text);
    }

    #[test]
    fn desugar_commutes_with_parse(f in formula(4)) {
        let sugared = parse(&f.to_string()).unwrap().desugar();
        let by_hand = parse(&desugar_text(&f)).unwrap();
        prop_assert_eq!(sugared, by_hand);
    }

    #[test]
    fn tautology_check_matches_truth_tables(f in formula_over(&["a", "b"], &["p", "q", "r"], 4)) {
        prop_assert_eq!(propositional_tautology(&f, 16).unwrap(), brute_force_tautology(&f));
    }

    #[test]
    fn tautology_check_on_tautologies(f in formula(3), g in formula(3)) {
        let contraposition = f.clone().imp(g.clone()).imp(g.clone().not().imp(f.clone().not()));
        let excluded_middle = f.clone().or(f.clone().not());
        let not_taut = f.clone().and(f.not());
        for h in [contraposition, excluded_middle, not_taut] {
            prop_assert_eq!(propositional_tautology(&h, 16).unwrap(), brute_force_tautology(&h), "{}", h);
        }
    }

    #[test]
    fn scheme_matcher_agrees_with_brute_force(f in formula_over(&["a", "b"], &["p", "q"], 4)) {
        for s in modal_schemes() {
            prop_assert_eq!(s.matches(&f), brute_force_match(s, &f), "{} {}", s.name(), f);
        }
    }

    #[test]
    fn scheme_matcher_agrees_on_instances(f in scheme_instance()) {
        let mut any = false;
        for s in modal_schemes() {
            let m = s.matches(&f);
            any |= m;
            prop_assert_eq!(m, brute_force_match(s, &f), "{} {}", s.name(), f);
        }
        prop_assert!(any, "{} matches no scheme", f);
    }

    #[test]
    fn fixtures_check_for_any_instantiation(
        phi in formula_over(&["a", "b", "c"], &["p", "q"], 3),
        psi in formula_over(&["a", "b", "c"], &["p", "q"], 3),
    ) {
        for d in fixtures_for(&phi, &psi) {
            prop_assert!(check_derivation(&d).is_ok(), "{}: {:?}", d.name, check_derivation(&d));
        }
    }

    #[test]
    fn checking_is_prefix_monotone(
        phi in formula_over(&["a", "b"], &["p", "q"], 2),
        psi in formula_over(&["a", "b"], &["p", "q"], 2),
        which in any::<prop::sample::Index>(),
        at in any::<prop::sample::Index>(),
        mutate in any::<bool>(),
    ) {
        let library = fixtures_for(&phi, &psi);
        let mut d = which.get(&library).clone();
        let k = at.index(d.steps.len());
        if mutate {
            d.steps[k].formula = d.steps[k].formula.clone().not();
        }
        match check_derivation(&d) {
            Ok(()) => {
                for len in 0..=d.steps.len() {
                    prop_assert!(check_derivation(&prefix(&d, len)).is_ok());
                }
            }
            Err(e) => {
                prop_assert!(mutate);
                prop_assert_eq!(e.index, k);
                for len in 0..=d.steps.len() {
                    prop_assert_eq!(check_derivation(&prefix(&d, len)).is_ok(), len <= k);
                }
            }
        }
    }
}

#[test]
fn scheme_instances_of_each_kind_are_recognised() {
    let (p, q) = (Formula::atom("p"), Formula::atom("q"));
    let (a, b) = (AgentId::from("a"), AgentId::from("b"));
    for s in modal_schemes() {
        let inst = s.instantiate(&p, &q, &a, &b).unwrap();
        assert!(s.matches(&inst), "{}", s.name());
        assert!(brute_force_match(s, &inst), "{}", s.name());
    }
    let same = Scheme::S2.instantiate(&p, &q, &a, &a).unwrap();
    assert!(!Scheme::S2.matches(&same));
}

#[test]
fn mp_with_swapped_premises_fails_at_that_step() {
    for d in fixtures_for(&Formula::atom("p"), &Formula::atom("q")) {
        for (i, step) in d.steps.iter().enumerate() {
            if let Justification::Mp(x, y) = step.by {
                let mut bad = d.clone();
                bad.steps[i].by = Justification::Mp(y, x);
                assert_eq!(check_derivation(&bad).unwrap_err().index, i, "{}", d.name);
            }
        }
    }
}
