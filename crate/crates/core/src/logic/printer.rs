use std::fmt;

use super::Formula;

// Binding strength, loosest first.
const IFF: u8 = 1;
const IMP: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => IFF,
        Formula::Imp(..) => IMP,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => UNARY,
    }
}

fn child(f: &Formula, parens: bool, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if parens {
        write!(out, "({f})")
    } else {
        write!(out, "{f}")
    }
}

fn binary(
    out: &mut fmt::Formatter<'_>,
    op: &str,
    level: u8,
    l: &Formula,
    r: &Formula,
    right_assoc: bool,
) -> fmt::Result {
    let (lp, rp) = (prec(l), prec(r));
    let (left_parens, right_parens) = if right_assoc {
        (lp <= level, rp < level)
    } else {
        (lp < level, rp <= level)
    };
    child(l, left_parens, out)?;
    write!(out, " {op} ")?;
    child(r, right_parens, out)
}

/// Prints with the fewest parentheses that still parse back to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => out.write_str(a),
            Formula::Top => out.write_str("#t"),
            Formula::Bot => out.write_str("#f"),
            Formula::Not(f) => {
                out.write_str("~")?;
                child(f, prec(f) < UNARY, out)
            }
            Formula::K(a, f) | Formula::S(a, f) => {
                let op = if matches!(self, Formula::K(..)) {
                    'K'
                } else {
                    'S'
                };
                write!(out, "{op}{{{a}}}")?;
                if prec(f) < UNARY {
                    write!(out, "({f})")
                } else {
                    write!(out, " {f}")
                }
            }
            Formula::And(l, r) => binary(out, "&", AND, l, r, false),
            Formula::Or(l, r) => binary(out, "|", OR, l, r, false),
            Formula::Imp(l, r) => binary(out, "->", IMP, l, r, true),
            Formula::Iff(l, r) => binary(out, "<->", IFF, l, r, false),
        }
    }
}
