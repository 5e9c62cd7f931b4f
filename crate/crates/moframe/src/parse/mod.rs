//! Text front end: expression grammar, corpus files, renderers.
//!
//! Grammar (`*` is never implied):
//!
//! ```text
//! sum   := prod (('+' | '-') prod)*
//! prod  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?          exponent must reduce to an integer
//! atom  := INT | IDENT | '(' sum ')' | '{' sum '}' | '\frac' '{' sum '}' '{' sum '}'
//! ```
//!
//! `\cdot` is accepted as `*` so LaTeX output parses back.

mod corpus;
mod render;

pub use corpus::{parse_corpus, CorpusError, OdeInput};
pub use render::{machine_value, render, render_latex, render_machine, render_text, Format};

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::expr::{canonicalize, Expr, ExprError, Symbol, Tree, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("non-integer exponent at byte {offset}")]
    NonIntegerExponent { offset: usize },
    #[error("transcendental function `{name}` at byte {offset} is not supported")]
    Transcendental { name: String, offset: usize },
    #[error("decimal literal at byte {offset}; write it as a fraction")]
    Decimal { offset: usize },
    #[error("{0}")]
    Algebra(#[from] ExprError),
}

const TRANSCENDENTAL: &[&str] = &[
    "sin", "cos", "tan", "cot", "sec", "csc", "exp", "log", "ln", "sqrt", "sinh", "cosh", "tanh",
    "asin", "acos", "atan", "arcsin", "arccos", "arctan", "abs", "pow",
];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    Frac,
}

fn lex(s: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            if i < b.len() && b[i] == b'.' {
                return Err(ParseError::Decimal { offset: st });
            }
            out.push((Tok::Int(s[st..i].parse().unwrap()), st));
        } else if c == b'.' {
            return Err(ParseError::Decimal { offset: i });
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let st = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(s[st..i].to_string()), st));
        } else if c == b'\\' {
            let st = i;
            i += 1;
            while i < b.len() && b[i].is_ascii_alphabetic() {
                i += 1;
            }
            match &s[st..i] {
                "\\frac" => out.push((Tok::Frac, st)),
                "\\cdot" => out.push((Tok::Op('*'), st)),
                "\\left" | "\\right" => {}
                other => {
                    let name = other.trim_start_matches('\\').to_string();
                    if TRANSCENDENTAL.contains(&name.as_str()) {
                        return Err(ParseError::Transcendental { name, offset: st });
                    }
                    return Err(ParseError::Syntax {
                        offset: st,
                        msg: format!("unsupported command `{other}`"),
                    });
                }
            }
        } else if b"+-*/^(){}".contains(&c) {
            out.push((Tok::Op(c as char), i));
            i += 1;
        } else {
            let ch = s[i..].chars().next().unwrap();
            return Err(ParseError::Syntax {
                offset: i,
                msg: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(ParseError::Syntax {
                offset: self.offset(),
                msg: format!("expected `{c}`"),
            })
        }
    }

    fn sum(&mut self) -> Result<Tree, ParseError> {
        let mut t = self.prod()?;
        loop {
            if self.eat('+') {
                t = Tree::Add(Box::new(t), Box::new(self.prod()?));
            } else if self.eat('-') {
                t = Tree::Sub(Box::new(t), Box::new(self.prod()?));
            } else {
                return Ok(t);
            }
        }
    }

    fn prod(&mut self) -> Result<Tree, ParseError> {
        let mut t = self.unary()?;
        loop {
            if self.eat('*') {
                t = Tree::Mul(Box::new(t), Box::new(self.unary()?));
            } else if self.eat('/') {
                t = Tree::Div(Box::new(t), Box::new(self.unary()?));
            } else {
                return Ok(t);
            }
        }
    }

    fn unary(&mut self) -> Result<Tree, ParseError> {
        if self.eat('-') {
            return Ok(Tree::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Tree, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let at = self.offset();
        let e = self.unary()?;
        let v = canonicalize(&e)?
            .constant_value()
            .ok_or(ParseError::NonIntegerExponent { offset: at })?;
        if !v.denom().is_one() {
            return Err(ParseError::NonIntegerExponent { offset: at });
        }
        let n: i64 = v
            .numer()
            .try_into()
            .ok()
            .filter(|n: &i64| n.abs() <= 10_000)
            .ok_or(ParseError::Syntax {
                offset: at,
                msg: "exponent out of range".into(),
            })?;
        Ok(Tree::Pow(Box::new(base), n))
    }

    fn atom(&mut self) -> Result<Tree, ParseError> {
        let off = self.offset();
        let Some((tok, _)) = self.toks.get(self.pos).cloned() else {
            return Err(ParseError::Syntax {
                offset: off,
                msg: "unexpected end of input".into(),
            });
        };
        self.pos += 1;
        match tok {
            Tok::Int(n) => Ok(Tree::Num(Q::from_integer(n))),
            Tok::Ident(name) => {
                if let Some(s) = base_symbol(&name) {
                    return Ok(Tree::Sym(s));
                }
                if TRANSCENDENTAL.contains(&name.as_str()) {
                    return Err(ParseError::Transcendental { name, offset: off });
                }
                Err(ParseError::UnknownIdentifier { name, offset: off })
            }
            Tok::Op('(') => {
                let t = self.sum()?;
                self.expect(')')?;
                Ok(t)
            }
            Tok::Op('{') => {
                let t = self.sum()?;
                self.expect('}')?;
                Ok(t)
            }
            Tok::Frac => {
                self.expect('{')?;
                let n = self.sum()?;
                self.expect('}')?;
                self.expect('{')?;
                let d = self.sum()?;
                self.expect('}')?;
                Ok(Tree::Div(Box::new(n), Box::new(d)))
            }
            Tok::Op(c) => Err(ParseError::Syntax {
                offset: off,
                msg: format!("unexpected `{c}`"),
            }),
        }
    }
}

/// Maps the accepted identifiers (with the y-aliases) to coordinates.
pub fn base_symbol(name: &str) -> Option<Symbol> {
    Some(match name {
        "x" => Symbol::X,
        "u" | "y" => Symbol::U,
        "p" | "y1" => Symbol::P,
        "q" | "y2" => Symbol::Q,
        _ => return None,
    })
}

pub fn parse_tree(text: &str) -> Result<Tree, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end: text.len(),
    };
    let t = p.sum()?;
    if p.pos != toks.len() {
        return Err(ParseError::Syntax {
            offset: p.offset(),
            msg: "unexpected trailing input".into(),
        });
    }
    Ok(t)
}

pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    Ok(canonicalize(&parse_tree(text)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn basic_and_aliases() {
        let q = Expr::sym(Symbol::Q);
        assert_eq!(
            e("q^2 + p*u"),
            q.pow(2) + Expr::sym(Symbol::P) * Expr::sym(Symbol::U)
        );
        assert_eq!(e("y2^2"), q.pow(2));
        assert!(e("(p - q)/(p - q)").is_one());
    }

    #[test]
    fn precedence() {
        assert_eq!(e("-x^2"), -(Expr::sym(Symbol::X).pow(2)));
        assert_eq!(e("2^3^2"), Expr::int(512));
        assert_eq!(e("1/2*p"), Expr::frac(1, 2) * Expr::sym(Symbol::P));
        assert_eq!(e("8/4/2"), Expr::int(1));
        assert_eq!(e("x^-1"), Expr::sym(Symbol::X).inv().unwrap());
        assert_eq!(e("x^(1+1)"), Expr::sym(Symbol::X).pow(2));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_expr("2x"),
            Err(ParseError::Syntax { offset: 1, .. })
        ));
        assert!(matches!(
            parse_expr("x + w"),
            Err(ParseError::UnknownIdentifier { offset: 4, .. })
        ));
        assert!(matches!(
            parse_expr("x^(1/2)"),
            Err(ParseError::NonIntegerExponent { .. })
        ));
        assert!(matches!(
            parse_expr("x^u"),
            Err(ParseError::NonIntegerExponent { .. })
        ));
        assert!(matches!(
            parse_expr("sin(x)"),
            Err(ParseError::Transcendental { .. })
        ));
        assert!(matches!(
            parse_expr("0.5*x"),
            Err(ParseError::Decimal { offset: 0 })
        ));
        assert!(matches!(
            parse_expr("(x"),
            Err(ParseError::Syntax { offset: 2, .. })
        ));
        assert!(matches!(
            parse_expr("x/(u-u)"),
            Err(ParseError::Algebra(ExprError::DivisionByZero))
        ));
    }

    #[test]
    fn latex_subset() {
        assert_eq!(
            e("\\frac{1}{2} \\cdot p"),
            Expr::frac(1, 2) * Expr::sym(Symbol::P)
        );
        assert_eq!(e("q^{2}"), Expr::sym(Symbol::Q).pow(2));
    }
}
