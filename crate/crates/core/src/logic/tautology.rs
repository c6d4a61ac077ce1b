use std::collections::HashMap;

use thiserror::Error;

use super::Formula;

pub const DEFAULT_TAUTOLOGY_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{found} propositional variables exceed the cap of {cap}")]
pub struct TooManyAtoms {
    pub found: usize,
    pub cap: usize,
}

/// Checks whether `formula` is a tautology when atoms and maximal `K`/`S`
/// subformulas are read as independent propositional variables.
///
/// `cap` bounds the number of such variables (the truth table has `2^cap`
/// rows); pass [`DEFAULT_TAUTOLOGY_CAP`] for the usual limit.
pub fn propositional_tautology(formula: &Formula, cap: usize) -> Result<bool, TooManyAtoms> {
    let vars = skeleton_variables(formula);
    if vars.len() > cap {
        return Err(TooManyAtoms {
            found: vars.len(),
            cap,
        });
    }
    let index: HashMap<&Formula, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let rows: u64 = 1 << vars.len();
    // Evaluate 64 rows at a time: bit k of a word is row `base + k`.
    let mut base = 0u64;
    while base < rows {
        let width = (rows - base).min(64);
        let mask = if width == 64 {
            u64::MAX
        } else {
            (1u64 << width) - 1
        };
        let column =
            |i: usize| -> u64 { (0..width).fold(0u64, |w, k| w | ((((base + k) >> i) & 1) << k)) };
        if eval_columns(formula, &index, &column) & mask != mask {
            return Ok(false);
        }
        base += 64;
    }
    Ok(true)
}

/// Atoms and maximal modal subformulas, in first-occurrence order.
pub(crate) fn skeleton_variables(formula: &Formula) -> Vec<&Formula> {
    fn walk<'f>(f: &'f Formula, out: &mut Vec<&'f Formula>) {
        match f {
            Formula::Atom(_) | Formula::K(..) | Formula::S(..) => {
                if !out.contains(&f) {
                    out.push(f);
                }
            }
            _ => {
                for c in f.children() {
                    walk(c, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    walk(formula, &mut out);
    out
}

fn eval_columns(
    f: &Formula,
    index: &HashMap<&Formula, usize>,
    column: &dyn Fn(usize) -> u64,
) -> u64 {
    let ev = |g: &Formula| eval_columns(g, index, column);
    match f {
        Formula::Atom(_) | Formula::K(..) | Formula::S(..) => column(index[f]),
        Formula::Top => u64::MAX,
        Formula::Bot => 0,
        Formula::Not(g) => !ev(g),
        Formula::And(l, r) => ev(l) & ev(r),
        Formula::Or(l, r) => ev(l) | ev(r),
        Formula::Imp(l, r) => !ev(l) | ev(r),
        Formula::Iff(l, r) => !(ev(l) ^ ev(r)),
    }
}
