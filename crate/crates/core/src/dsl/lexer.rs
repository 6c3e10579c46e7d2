use num_bigint::BigUint;

use super::{ParseDiagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(BigUint),
    LParen,
    RParen,
    Comma,
    Colon,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    At,
    EqEq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Assign => "=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Caret => "^",
            Tok::At => "@",
            Tok::EqEq => "==",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            _ => "",
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, Vec<ParseDiagnostic>> {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    let mut line = 1u32;
    let mut column = 1u32;
    let mut chars = text.char_indices().peekable();

    while let Some(&(start, c)) = chars.peek() {
        let span_at = |len: usize| SourceSpan {
            line,
            column,
            offset: start,
            len,
        };
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        if c == '#' {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                column += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut end = start;
            while let Some(&(i, c)) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    end = i + c.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            let word = &text[start..end];
            out.push(Token {
                tok: Tok::Ident(word.to_string()),
                span: span_at(end - start),
            });
            column += (end - start) as u32;
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = start;
            while let Some(&(i, c)) = chars.peek() {
                if c.is_ascii_digit() {
                    end = i + 1;
                    chars.next();
                } else {
                    break;
                }
            }
            let digits = &text[start..end];
            out.push(Token {
                tok: Tok::Int(digits.parse().expect("ascii digits")),
                span: span_at(end - start),
            });
            column += (end - start) as u32;
            continue;
        }
        chars.next();
        let next = chars.peek().map(|&(_, c)| c);
        let (tok, len) = match (c, next) {
            ('=', Some('=')) => (Some(Tok::EqEq), 2),
            ('!', Some('=')) => (Some(Tok::Ne), 2),
            ('<', Some('=')) => (Some(Tok::Le), 2),
            ('>', Some('=')) => (Some(Tok::Ge), 2),
            ('=', _) => (Some(Tok::Assign), 1),
            ('<', _) => (Some(Tok::Lt), 1),
            ('>', _) => (Some(Tok::Gt), 1),
            ('(', _) => (Some(Tok::LParen), 1),
            (')', _) => (Some(Tok::RParen), 1),
            (',', _) => (Some(Tok::Comma), 1),
            (':', _) => (Some(Tok::Colon), 1),
            ('+', _) => (Some(Tok::Plus), 1),
            ('-', _) => (Some(Tok::Minus), 1),
            ('*', _) => (Some(Tok::Star), 1),
            ('/', _) => (Some(Tok::Slash), 1),
            ('^', _) => (Some(Tok::Caret), 1),
            ('@', _) => (Some(Tok::At), 1),
            _ => (None, c.len_utf8()),
        };
        match tok {
            Some(tok) => {
                if len == 2 {
                    chars.next();
                }
                out.push(Token {
                    tok,
                    span: span_at(len),
                });
                column += len as u32;
            }
            None => {
                errors.push(ParseDiagnostic::error(
                    format!("unexpected character {c:?}"),
                    span_at(len),
                ));
                column += 1;
            }
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    out.push(Token {
        tok: Tok::Eof,
        span: SourceSpan {
            line,
            column,
            offset: text.len(),
            len: 0,
        },
    });
    Ok(out)
}
