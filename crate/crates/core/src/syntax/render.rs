use crate::syntax::{Formula, Threshold};

const IFF: u8 = 1;
const IMP: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;

/// Renders `f` in the concrete syntax accepted by [`crate::syntax::parse`].
///
/// Quantifier bodies that are binary connectives are parenthesized even when
/// not strictly required.
pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    write(f, &mut out, 0, true);
    out
}

/// `min_prec` is the loosest binary operator allowed unparenthesized here;
/// `tail_open` says whether nothing follows this position at the current
/// nesting level, which is when an open-ended quantifier may appear bare.
fn write(f: &Formula, out: &mut String, min_prec: u8, tail_open: bool) {
    use Formula::*;
    match f {
        True => out.push_str("true"),
        False => out.push_str("false"),
        Rel(name, args) => {
            out.push_str(name);
            out.push('(');
            out.push_str(&args.join(", "));
            out.push(')');
        }
        Equal(a, b) => {
            out.push_str(a);
            out.push_str(" = ");
            out.push_str(b);
        }
        Not(a) => {
            out.push('!');
            write(a, out, UNARY, tail_open);
        }
        And(a, b) => binary(out, " & ", AND, false, a, b, min_prec, tail_open),
        Or(a, b) => binary(out, " | ", OR, false, a, b, min_prec, tail_open),
        Implies(a, b) => binary(out, " -> ", IMP, true, a, b, min_prec, tail_open),
        Iff(a, b) => binary(out, " <-> ", IFF, true, a, b, min_prec, tail_open),
        BigAnd(items) | BigOr(items) => {
            out.push_str(if matches!(f, BigAnd(_)) {
                "And{"
            } else {
                "Or{"
            });
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write(item, out, 0, true);
            }
            out.push('}');
        }
        Hartig(x, y, a, b) | Rescher(x, y, a, b) => {
            out.push_str(if matches!(f, Hartig(..)) { "I " } else { "J " });
            out.push_str(x);
            out.push(' ');
            out.push_str(y);
            out.push_str(". (");
            write(a, out, 0, true);
            out.push_str(") (");
            write(b, out, 0, true);
            out.push(')');
        }
        Exists(..) | Forall(..) | CountAtLeast(..) | WellOrder(..) | Oracle(..) => {
            if !tail_open {
                out.push('(');
            }
            let body = match f {
                Exists(x, a) => {
                    out.push_str("exists ");
                    out.push_str(x);
                    a
                }
                Forall(x, a) => {
                    out.push_str("forall ");
                    out.push_str(x);
                    a
                }
                CountAtLeast(Threshold::AtLeast(k), x, a) => {
                    out.push_str(&format!("E>={k} {x}"));
                    a
                }
                CountAtLeast(Threshold::Schematic, x, a) => {
                    out.push_str("Q ");
                    out.push_str(x);
                    a
                }
                WellOrder(x, y, a) => {
                    out.push_str(&format!("W {x} {y}"));
                    a
                }
                Oracle(name, vars, a) => {
                    out.push_str(&format!("QK[{name}] {}", vars.join(" ")));
                    a
                }
                _ => unreachable!(),
            };
            out.push_str(". ");
            write(body, out, UNARY, true);
            if !tail_open {
                out.push(')');
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn binary(
    out: &mut String,
    op: &str,
    prec: u8,
    right_assoc: bool,
    a: &Formula,
    b: &Formula,
    min_prec: u8,
    tail_open: bool,
) {
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    let (left_prec, right_prec) = if right_assoc {
        (prec + 1, prec)
    } else {
        (prec, prec + 1)
    };
    write(a, out, left_prec, false);
    out.push_str(op);
    write(b, out, right_prec, parens || tail_open);
    if parens {
        out.push(')');
    }
}
