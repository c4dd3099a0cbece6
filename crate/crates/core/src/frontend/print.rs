//! Canonical text for terms and guards, in the syntax the parser reads.

use crate::mdl::{Collection, Guard, Term};

pub fn guard_to_string(g: &Guard) -> String {
    let mut out = String::new();
    write_guard(g, &mut out);
    out
}

fn is_compound(g: &Guard) -> bool {
    matches!(g, Guard::Not(_) | Guard::And(..) | Guard::Or(..))
}

fn write_operand(g: &Guard, out: &mut String) {
    if is_compound(g) {
        out.push('(');
        write_guard(g, out);
        out.push(')');
    } else {
        write_guard(g, out);
    }
}

/// Operands of a left-nested chain of the same operator, so that
/// `((a ∨ b) ∨ c)` prints as `or a b c` and reads back identically.
fn left_spine<'a>(g: &'a Guard, conj: bool, out: &mut Vec<&'a Guard>) {
    match (g, conj) {
        (Guard::And(a, b), true) | (Guard::Or(a, b), false) => {
            left_spine(a, conj, out);
            out.push(b);
        }
        _ => out.push(g),
    }
}

fn write_guard(g: &Guard, out: &mut String) {
    match g {
        Guard::True => out.push_str("true"),
        Guard::False => out.push_str("false"),
        Guard::Flag(f) => out.push_str(f.as_str()),
        Guard::Not(x) => {
            out.push_str("not ");
            write_operand(x, out);
        }
        Guard::And(..) | Guard::Or(..) => {
            let conj = matches!(g, Guard::And(..));
            let mut ops = Vec::new();
            left_spine(g, conj, &mut ops);
            out.push_str(if conj { "and" } else { "or" });
            for op in ops {
                out.push(' ');
                write_operand(op, out);
            }
        }
    }
}

pub fn term_to_string(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, &mut out);
    out
}

fn write_collection(c: &Collection, tail_prefix: &str, out: &mut String) {
    for (i, e) in c.entries.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(e.label.as_str());
        if !e.guard.is_true() {
            out.push('(');
            write_guard(&e.guard, out);
            out.push(')');
        }
        out.push_str(": ");
        write_term(&e.term, out);
    }
    if let Some(v) = &c.tail {
        if !c.entries.is_empty() {
            out.push(' ');
        }
        out.push_str("| ");
        out.push_str(tail_prefix);
        out.push_str(v);
    }
}

fn write_term(t: &Term, out: &mut String) {
    match t {
        Term::Symbol(s) => out.push_str(s),
        Term::Up(v) => {
            out.push_str("$^");
            out.push_str(v);
        }
        Term::Down(v) => {
            out.push_str("$_");
            out.push_str(v);
        }
        Term::Tuple(items) => {
            out.push('(');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write_term(x, out);
            }
            out.push(')');
        }
        Term::Record(c) => {
            out.push('{');
            write_collection(c, "$_", out);
            out.push('}');
        }
        Term::Choice(c) => {
            out.push_str("(: ");
            write_collection(c, "$^", out);
            if !c.entries.is_empty() || c.tail.is_some() {
                out.push(' ');
            }
            out.push_str(":)");
        }
        Term::Switch(alts) => {
            out.push('<');
            for (i, a) in alts.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_guard(&a.guard, out);
                out.push_str(": ");
                write_term(&a.term, out);
            }
            out.push('>');
        }
    }
}
