#![allow(dead_code)]

use proptest::prelude::*;
use secrecy_core::{AgentId, Formula};

pub const AGENTS: [&str; 3] = ["a", "b", "c"];
pub const ATOMS: [&str; 4] = ["p", "q", "r", "s"];

/// Random formulas over `agents` and `atoms`, up to `depth` levels of nesting.
pub fn formula_over(
    agents: &'static [&'static str],
    atoms: &'static [&'static str],
    depth: u32,
) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![
        6 => prop::sample::select(atoms).prop_map(Formula::atom),
        1 => Just(Formula::Top),
        1 => Just(Formula::Bot),
    ];
    leaf.prop_recursive(depth, 48, 2, move |inner| {
        let agent = prop::sample::select(agents).prop_map(AgentId::from);
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| l.and(r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| l.or(r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| l.imp(r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| l.iff(r)),
            (agent.clone(), inner.clone()).prop_map(|(a, g)| Formula::K(a, Box::new(g))),
            (agent, inner).prop_map(|(a, g)| Formula::S(a, Box::new(g))),
        ]
    })
    .boxed()
}

pub fn formula(depth: u32) -> BoxedStrategy<Formula> {
    formula_over(&AGENTS, &ATOMS, depth)
}
