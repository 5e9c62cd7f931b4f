use std::collections::HashMap;
use std::fmt;

use super::{parse_expr, ParseError};
use crate::expr::Expr;

/// One right-hand side F of u''' = F(x, u, p, q).
#[derive(Debug, Clone, PartialEq)]
pub struct OdeInput {
    pub name: Option<String>,
    pub rhs: Expr,
    pub source: String,
}

impl OdeInput {
    pub fn from_text(name: Option<&str>, text: &str) -> Result<OdeInput, ParseError> {
        Ok(OdeInput {
            name: name.map(str::to_string),
            rhs: parse_expr(text)?,
            source: text.to_string(),
        })
    }

    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or(&self.source)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LineError {
    Parse(ParseError),
    MissingColon,
    BadName(String),
    Duplicate { name: String, first_line: usize },
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LineError::Parse(e) => write!(f, "{e}"),
            LineError::MissingColon => write!(f, "expected `name: expression`"),
            LineError::BadName(n) => write!(f, "invalid name `{n}`"),
            LineError::Duplicate { name, first_line } => {
                write!(
                    f,
                    "duplicate name \"{name}\" (first defined on line {first_line})"
                )
            }
        }
    }
}

/// Every bad line of a corpus, 1-based line numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusError {
    pub errors: Vec<(usize, LineError)>,
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (line, e)) in self.errors.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "line {line}: {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for CorpusError {}

fn valid_name(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
}

pub fn parse_corpus(text: &str) -> Result<Vec<OdeInput>, CorpusError> {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (k, raw) in text.split('\n').enumerate() {
        let line_no = k + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let Some((name, body)) = line.split_once(':') else {
            errors.push((line_no, LineError::MissingColon));
            continue;
        };
        let name = name.trim();
        if !valid_name(name) {
            errors.push((line_no, LineError::BadName(name.to_string())));
            continue;
        }
        if let Some(&first_line) = seen.get(name) {
            errors.push((
                line_no,
                LineError::Duplicate {
                    name: name.to_string(),
                    first_line,
                },
            ));
            continue;
        }
        seen.insert(name.to_string(), line_no);
        match OdeInput::from_text(Some(name), body.trim()) {
            Ok(o) => out.push(o),
            Err(e) => errors.push((line_no, LineError::Parse(e))),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(CorpusError { errors })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_entry() {
        let c = parse_corpus("flat: 0").unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].name.as_deref(), Some("flat"));
        assert!(c[0].rhs.is_zero());
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = parse_corpus("# comment\n\nw: q^2").unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].name.as_deref(), Some("w"));
    }

    #[test]
    fn duplicates_rejected() {
        let e = parse_corpus("a: p\na: q").unwrap_err();
        assert_eq!(e.errors.len(), 1);
        assert!(matches!(&e.errors[0], (2, LineError::Duplicate { name, .. }) if name == "a"));
    }

    #[test]
    fn errors_are_aggregated_and_crlf_is_fine() {
        let e = parse_corpus("a: p\r\nb: sin(x)\r\nc p\r\nd: q # tail\r\n").unwrap_err();
        let lines: Vec<usize> = e.errors.iter().map(|x| x.0).collect();
        assert_eq!(lines, vec![2, 3]);
        let ok = parse_corpus("a: p\r\nd: q # tail\r\n").unwrap();
        assert_eq!(ok[1].source, "q");
    }
}
