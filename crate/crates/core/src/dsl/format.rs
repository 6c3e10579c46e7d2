use std::fmt::Write;

use crate::expr::{BinOp, Guard, IntExpr};
use crate::rule::{Condition, FusionRule, Shape};

/// Canonical text of a rule: single spaces, one definition per line, no
/// comments. Parsing the output yields a structurally equal rule.
pub fn format_rule(rule: &FusionRule) -> String {
    let mut out = String::new();
    writeln!(out, "rule {} dim {}", rule.name, rule.dimension.as_u8()).unwrap();
    for p in &rule.prototiles {
        out.push_str("prototile ");
        out.push_str(&p.name);
        if let Some(v) = &p.volume {
            write!(out, " volume {v}").unwrap();
        }
        match &p.shape {
            Some(Shape::Cells(cells)) => {
                out.push_str(" cells");
                for (x, y) in cells {
                    write!(out, " ({x},{y})").unwrap();
                }
            }
            Some(Shape::Length(len)) => write!(out, " length {len}").unwrap(),
            None => {}
        }
        out.push('\n');
    }
    for block in &rule.blocks {
        writeln!(out, "level {}:", format_guard(&block.guard)).unwrap();
        for def in &block.defs {
            write!(out, "  {} =", def.label).unwrap();
            for p in &def.body {
                write!(out, " {}", p.child).unwrap();
                if let Some(r) = &p.repeat {
                    write!(out, "^({})", format_expr(r)).unwrap();
                }
                if let Some((x, y)) = &p.offset {
                    write!(out, "@({},{})", format_expr(x), format_expr(y)).unwrap();
                }
            }
            match &def.condition {
                Condition::Always => {}
                Condition::If(g) => write!(out, " if {}", format_guard(g)).unwrap(),
                Condition::Otherwise => out.push_str(" otherwise"),
            }
            out.push('\n');
        }
    }
    out
}

pub fn format_expr(e: &IntExpr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

fn precedence(e: &IntExpr) -> u8 {
    match e {
        IntExpr::Bin(op, _, _) => op.precedence(),
        _ => u8::MAX,
    }
}

fn write_expr(out: &mut String, e: &IntExpr) {
    match e {
        IntExpr::Lit(v) => write!(out, "{v}").unwrap(),
        IntExpr::Level => out.push('n'),
        IntExpr::Width(l) => write!(out, "w({l})").unwrap(),
        IntExpr::Height(l) => write!(out, "h({l})").unwrap(),
        IntExpr::Bin(op, lhs, rhs) => {
            let p = op.precedence();
            let right_assoc = *op == BinOp::Pow;
            let lp = precedence(lhs);
            let rp = precedence(rhs);
            let wrap_l = lp < p || (lp == p && right_assoc);
            let wrap_r = rp < p || (rp == p && !right_assoc);
            write_wrapped(out, lhs, wrap_l);
            out.push(op.symbol());
            write_wrapped(out, rhs, wrap_r);
        }
    }
}

fn write_wrapped(out: &mut String, e: &IntExpr, wrap: bool) {
    if wrap {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}

pub fn format_guard(g: &Guard) -> String {
    let mut s = String::new();
    write_guard(&mut s, g);
    s
}

fn guard_precedence(g: &Guard) -> u8 {
    match g {
        Guard::Or(..) => 1,
        Guard::And(..) => 2,
        Guard::Not(..) => 3,
        _ => 4,
    }
}

fn write_guard(out: &mut String, g: &Guard) {
    let sub = |out: &mut String, child: &Guard, min: u8| {
        if guard_precedence(child) < min {
            out.push('(');
            write_guard(out, child);
            out.push(')');
        } else {
            write_guard(out, child);
        }
    };
    match g {
        Guard::Always => out.push_str("default"),
        Guard::Cmp(op, a, b) => {
            write!(out, "{} {} {}", format_expr(a), op.symbol(), format_expr(b)).unwrap()
        }
        Guard::IsPow(b, e) => write!(out, "ispow({b},{})", format_expr(e)).unwrap(),
        Guard::Not(inner) => {
            out.push_str("not ");
            sub(out, inner, 3);
        }
        Guard::And(a, b) => {
            sub(out, a, 2);
            out.push_str(" and ");
            sub(out, b, 3);
        }
        Guard::Or(a, b) => {
            sub(out, a, 1);
            out.push_str(" or ");
            sub(out, b, 2);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::dsl::{parse_rule, parse_unvalidated};

    #[test]
    fn builtins_round_trip() {
        for name in builtins::NAMES {
            let rule = builtins::load(name).unwrap();
            let text = format_rule(&rule);
            assert_eq!(parse_rule(&text).unwrap(), rule, "{name}");
            assert_eq!(format_rule(&parse_rule(&text).unwrap()), text);
        }
    }

    #[test]
    fn whitespace_is_normalized() {
        let a = "rule t dim 1 prototile A prototile B level default: A = A B B = A";
        let b = "rule   t dim 1\n\n prototile A # first\nprototile B\nlevel default :\n A=A   B\n\tB =A\n";
        let fa = format_rule(&parse_rule(a).unwrap());
        assert_eq!(fa, format_rule(&parse_rule(b).unwrap()));
        assert_eq!(
            fa,
            "rule t dim 1\nprototile A\nprototile B\nlevel default:\n  A = A B\n  B = A\n"
        );
    }

    #[test]
    fn fib2d_matches_golden() {
        let rule = builtins::load("fib2d").unwrap();
        assert_eq!(
            format_rule(&rule),
            include_str!("../../tests/golden/fib2d.fusion")
        );
    }

    #[test]
    fn minimal_parentheses() {
        let text = "rule r dim 1 prototile A level (n - 1) - (n - 2) >= 1 and not (n == 2 or n == 3): A = A^((2^3)^n*(n*(n+1)))";
        let rule = parse_unvalidated(text).unwrap();
        let out = format_rule(&rule);
        assert!(
            out.contains("level n-1-(n-2) >= 1 and not (n == 2 or n == 3):"),
            "{out}"
        );
        assert!(out.contains("A^((2^3)^n*(n*(n+1)))"), "{out}");
        assert_eq!(parse_unvalidated(&out).unwrap(), rule);
    }
}
