use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::lexer::{tokenize, Tok, Token};
use super::{ParseDiagnostic, SourceSpan};
use crate::expr::{BinOp, CmpOp, Guard, IntExpr};
use crate::rule::{
    Condition, Dimension, FusionRule, LevelBlock, Placement, Prototile, Shape, SupertileDef,
};

const RESERVED: &[&str] = &[
    "rule",
    "dim",
    "prototile",
    "volume",
    "cells",
    "length",
    "level",
    "if",
    "otherwise",
    "default",
    "and",
    "or",
    "not",
    "ispow",
    "n",
    "w",
    "h",
];

const MAX_DEPTH: usize = 200;

/// Where each label was first written, for attaching validation diagnostics.
#[derive(Debug, Default)]
pub(crate) struct SpanTable {
    pub header: SourceSpan,
    labels: HashMap<String, SourceSpan>,
    defs: HashMap<String, SourceSpan>,
}

impl SpanTable {
    /// First definition of `label`, else its prototile declaration.
    pub fn label(&self, label: &str) -> Option<SourceSpan> {
        self.defs
            .get(label)
            .or_else(|| self.labels.get(label))
            .copied()
    }
}

impl Default for SourceSpan {
    fn default() -> Self {
        SourceSpan {
            line: 1,
            column: 1,
            offset: 0,
            len: 0,
        }
    }
}

type PResult<T> = Result<T, ParseDiagnostic>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    depth: usize,
    dim: Dimension,
    spans: SpanTable,
}

pub(crate) fn parse(text: &str) -> Result<(FusionRule, SpanTable), Vec<ParseDiagnostic>> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        depth: 0,
        dim: Dimension::One,
        spans: SpanTable::default(),
    };
    match p.rule() {
        Ok(rule) => Ok((rule, p.spans)),
        Err(d) => Err(vec![d]),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, what: &str) -> PResult<T> {
        Err(ParseDiagnostic::error(
            format!("expected {what}, found {}", self.peek().describe()),
            self.span(),
        ))
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> PResult<SourceSpan> {
        if self.is_keyword(kw) {
            Ok(self.bump().span)
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<SourceSpan> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            self.unexpected(&tok.describe())
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(s) if RESERVED.contains(&s.as_str()) => Err(ParseDiagnostic::error(
                format!("`{s}` is reserved and cannot be used as {what}"),
                self.span(),
            )),
            Tok::Ident(s) => Ok((s, self.bump().span)),
            _ => self.unexpected(what),
        }
    }

    fn int(&mut self) -> PResult<(BigUint, SourceSpan)> {
        match self.peek().clone() {
            Tok::Int(v) => Ok((v, self.bump().span)),
            _ => self.unexpected("an integer"),
        }
    }

    fn signed_i64(&mut self) -> PResult<i64> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let (v, span) = self.int()?;
        let v = BigInt::from(v);
        let v = if neg { -v } else { v };
        v.to_i64()
            .ok_or_else(|| ParseDiagnostic::error("cell coordinate out of range", span))
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseDiagnostic::error(
                "expression is nested too deeply",
                self.span(),
            ));
        }
        Ok(())
    }

    fn rule(&mut self) -> PResult<FusionRule> {
        self.spans.header = self.keyword("rule")?;
        let (name, _) = self.ident("a rule name")?;
        self.keyword("dim")?;
        let (d, span) = self.int()?;
        self.dim = match d.to_u8() {
            Some(1) => Dimension::One,
            Some(2) => Dimension::Two,
            _ => return Err(ParseDiagnostic::error("dimension must be 1 or 2", span)),
        };
        let mut prototiles = Vec::new();
        while self.is_keyword("prototile") {
            prototiles.push(self.prototile()?);
        }
        let mut blocks = Vec::new();
        while self.is_keyword("level") {
            blocks.push(self.level_block()?);
        }
        if *self.peek() != Tok::Eof {
            return self.unexpected(if blocks.is_empty() {
                "`prototile` or `level`"
            } else {
                "`level` or end of input"
            });
        }
        Ok(FusionRule {
            name,
            dimension: self.dim,
            prototiles,
            blocks,
        })
    }

    fn prototile(&mut self) -> PResult<Prototile> {
        self.keyword("prototile")?;
        let (name, span) = self.ident("a prototile name")?;
        self.spans.labels.entry(name.clone()).or_insert(span);
        let mut proto = Prototile::new(name);
        if self.is_keyword("volume") {
            self.bump();
            let (num, nspan) = self.int()?;
            let den = if *self.peek() == Tok::Slash {
                self.bump();
                let (den, dspan) = self.int()?;
                if den.is_zero() {
                    return Err(ParseDiagnostic::error("zero denominator", dspan));
                }
                den
            } else {
                BigUint::from(1u8)
            };
            let _ = nspan;
            proto.volume = Some(BigRational::new(num.into(), den.into()));
        }
        if self.is_keyword("cells") {
            if self.dim == Dimension::One {
                return Err(ParseDiagnostic::error(
                    "`cells` is only allowed in dim 2 rules",
                    self.span(),
                ));
            }
            self.bump();
            let mut cells = Vec::new();
            loop {
                self.expect(Tok::LParen)?;
                let x = self.signed_i64()?;
                self.expect(Tok::Comma)?;
                let y = self.signed_i64()?;
                self.expect(Tok::RParen)?;
                cells.push((x, y));
                if *self.peek() != Tok::LParen {
                    break;
                }
            }
            proto.shape = Some(Shape::Cells(cells));
        } else if self.is_keyword("length") {
            if self.dim == Dimension::Two {
                return Err(ParseDiagnostic::error(
                    "`length` is only allowed in dim 1 rules",
                    self.span(),
                ));
            }
            self.bump();
            let (len, span) = self.int()?;
            let len = len
                .to_u64()
                .ok_or_else(|| ParseDiagnostic::error("length out of range", span))?;
            proto.shape = Some(Shape::Length(len));
        }
        Ok(proto)
    }

    fn level_block(&mut self) -> PResult<LevelBlock> {
        self.keyword("level")?;
        let guard = self.guard()?;
        self.expect(Tok::Colon)?;
        let mut defs = vec![self.def()?];
        while matches!(self.peek(), Tok::Ident(s) if s != "level") {
            defs.push(self.def()?);
        }
        Ok(LevelBlock { guard, defs })
    }

    fn starts_placement(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if !matches!(s.as_str(), "level" | "if" | "otherwise"))
            && *self.peek_at(1) != Tok::Assign
    }

    fn def(&mut self) -> PResult<SupertileDef> {
        let (label, span) = self.ident("a supertile label")?;
        self.spans.defs.entry(label.clone()).or_insert(span);
        self.expect(Tok::Assign)?;
        let mut body = Vec::new();
        if !self.starts_placement() {
            return self.unexpected("a placement");
        }
        while self.starts_placement() {
            body.push(self.placement()?);
        }
        let condition = if self.is_keyword("if") {
            self.bump();
            Condition::If(self.guard()?)
        } else if self.is_keyword("otherwise") {
            self.bump();
            Condition::Otherwise
        } else {
            Condition::Always
        };
        Ok(SupertileDef {
            label,
            condition,
            body,
        })
    }

    fn placement(&mut self) -> PResult<Placement> {
        let (child, _) = self.ident("a child label")?;
        let mut p = Placement::new(child);
        if *self.peek() == Tok::Caret {
            self.bump();
            self.expect(Tok::LParen)?;
            p.repeat = Some(self.expr()?);
            self.expect(Tok::RParen)?;
        }
        if *self.peek() == Tok::At {
            if self.dim == Dimension::One {
                return Err(ParseDiagnostic::error(
                    "offsets are only allowed in dim 2 rules",
                    self.span(),
                ));
            }
            self.bump();
            self.expect(Tok::LParen)?;
            let x = self.expr()?;
            self.expect(Tok::Comma)?;
            let y = self.expr()?;
            self.expect(Tok::RParen)?;
            p.offset = Some((x, y));
        }
        Ok(p)
    }

    fn guard(&mut self) -> PResult<Guard> {
        self.enter()?;
        let mut g = self.guard_and()?;
        while self.is_keyword("or") {
            self.bump();
            g = Guard::Or(Box::new(g), Box::new(self.guard_and()?));
        }
        self.depth -= 1;
        Ok(g)
    }

    fn guard_and(&mut self) -> PResult<Guard> {
        let mut g = self.guard_unary()?;
        while self.is_keyword("and") {
            self.bump();
            g = Guard::And(Box::new(g), Box::new(self.guard_unary()?));
        }
        Ok(g)
    }

    fn guard_unary(&mut self) -> PResult<Guard> {
        if self.is_keyword("not") {
            self.bump();
            self.enter()?;
            let g = self.guard_unary()?;
            self.depth -= 1;
            return Ok(Guard::Not(Box::new(g)));
        }
        if self.is_keyword("default") {
            self.bump();
            return Ok(Guard::Always);
        }
        if self.is_keyword("ispow") {
            self.bump();
            self.expect(Tok::LParen)?;
            let (base, span) = self.int()?;
            if base < BigUint::from(2u8) {
                return Err(ParseDiagnostic::error(
                    "ispow base must be at least 2",
                    span,
                ));
            }
            self.expect(Tok::Comma)?;
            let e = self.expr()?;
            self.expect(Tok::RParen)?;
            return Ok(Guard::IsPow(base, e));
        }
        if *self.peek() == Tok::LParen {
            // `(` opens either an integer expression or a nested guard
            let save = (self.pos, self.depth);
            match self.comparison() {
                Ok(g) => return Ok(g),
                Err(first) => {
                    (self.pos, self.depth) = save;
                    self.bump();
                    let g = match self.guard() {
                        Ok(g) => g,
                        Err(second) => {
                            return Err(if second.span.offset >= first.span.offset {
                                second
                            } else {
                                first
                            })
                        }
                    };
                    self.expect(Tok::RParen)?;
                    return Ok(g);
                }
            }
        }
        self.comparison()
    }

    fn comparison(&mut self) -> PResult<Guard> {
        let lhs = self.expr()?;
        let op = match self.peek() {
            Tok::EqEq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            _ => return self.unexpected("a comparison operator"),
        };
        self.bump();
        let rhs = self.expr()?;
        Ok(Guard::Cmp(op, lhs, rhs))
    }

    fn expr(&mut self) -> PResult<IntExpr> {
        self.enter()?;
        let mut e = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            e = IntExpr::bin(op, e, self.term()?);
        }
        self.depth -= 1;
        Ok(e)
    }

    fn term(&mut self) -> PResult<IntExpr> {
        let mut e = self.power()?;
        while *self.peek() == Tok::Star {
            self.bump();
            e = IntExpr::bin(BinOp::Mul, e, self.power()?);
        }
        Ok(e)
    }

    fn power(&mut self) -> PResult<IntExpr> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            self.enter()?;
            let exp = self.power()?;
            self.depth -= 1;
            return Ok(IntExpr::bin(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> PResult<IntExpr> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(IntExpr::Lit(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(s) if s == "n" => {
                self.bump();
                Ok(IntExpr::Level)
            }
            Tok::Ident(s) if s == "w" || s == "h" => {
                let span = self.bump().span;
                if s == "h" && self.dim == Dimension::One {
                    return Err(ParseDiagnostic::error(
                        "h() is only available in dim 2 rules",
                        span,
                    ));
                }
                self.expect(Tok::LParen)?;
                let (label, _) = self.ident("a label")?;
                self.expect(Tok::RParen)?;
                Ok(if s == "w" {
                    IntExpr::Width(label)
                } else {
                    IntExpr::Height(label)
                })
            }
            _ => self.unexpected("an integer expression"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn guard_of(text: &str) -> Guard {
        let src = format!("rule r dim 1 prototile A level {text}: A = A");
        let (rule, _) = parse(&src).unwrap();
        rule.blocks[0].guard.clone()
    }

    #[test]
    fn precedence_and_associativity() {
        let src = "rule r dim 1 prototile A level default: A = A^(1+2*3^2^n-4)";
        let (rule, _) = parse(src).unwrap();
        let e = rule.blocks[0].defs[0].body[0].repeat.clone().unwrap();
        use BinOp::*;
        let l = IntExpr::lit;
        let expected = IntExpr::bin(
            Sub,
            IntExpr::bin(
                Add,
                l(1),
                IntExpr::bin(
                    Mul,
                    l(2),
                    IntExpr::bin(Pow, l(3), IntExpr::bin(Pow, l(2), IntExpr::Level)),
                ),
            ),
            l(4),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn parenthesized_guards_and_exprs() {
        let g = guard_of("(n + 1) * 2 == 6");
        assert!(matches!(g, Guard::Cmp(CmpOp::Eq, _, _)));
        let g = guard_of("(n == 1 or n == 2) and not ispow(2, n)");
        let Guard::And(lhs, rhs) = g else { panic!() };
        assert!(matches!(*lhs, Guard::Or(_, _)));
        assert!(matches!(*rhs, Guard::Not(_)));
    }

    #[test]
    fn ispow_base_checked() {
        let src = "rule r dim 1 prototile A level ispow(1, n): A = A";
        assert!(parse(src).unwrap_err()[0].message.contains("base"));
    }

    #[test]
    fn h_only_in_2d() {
        let src = "rule r dim 1 prototile A level default: A = A^(h(A))";
        let err = parse(src).unwrap_err();
        assert!(err[0].message.contains("h()"));
    }
}
