use num_traits::{One, Signed};
use serde_json::{json, Value};

use crate::expr::{Expr, Mono, Poly, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Latex,
    Machine,
}

pub fn render(e: &Expr, f: Format) -> String {
    match f {
        Format::Text => render_text(e),
        Format::Latex => render_latex(e),
        Format::Machine => render_machine(e),
    }
}

fn mono_text(m: &Mono) -> String {
    m.iter()
        .map(|(s, e)| {
            if e == 1 {
                s.name()
            } else {
                format!("{}^{}", s.name(), e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

fn poly_text(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if m.is_one() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&mono_text(m));
        } else {
            out.push_str(&format!("{}*{}", a, mono_text(m)));
        }
    }
    out
}

pub fn render_text(e: &Expr) -> String {
    let n = poly_text(e.num());
    if e.den().is_one() {
        return n;
    }
    let d = poly_text(e.den());
    let single_factor = e.den().len() == 1 && e.den().terms()[0].0.iter().count() == 1;
    let n = if e.num().len() > 1 {
        format!("({n})")
    } else {
        n
    };
    if single_factor {
        format!("{n}/{d}")
    } else {
        format!("{n}/({d})")
    }
}

fn q_latex(c: &Q) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
    }
}

fn mono_latex(m: &Mono) -> String {
    m.iter()
        .map(|(s, e)| {
            let n = latex_name(&s.name());
            if e == 1 {
                n
            } else {
                format!("{n}^{{{e}}}")
            }
        })
        .collect::<Vec<_>>()
        .join(" \\cdot ")
}

fn latex_name(n: &str) -> String {
    match n.split_once('_') {
        Some((h, t)) => {
            let h = match h {
                "xi" => "\\xi",
                "phi" => "\\varphi",
                "alpha" => "\\alpha",
                "beta" => "\\beta",
                other => other,
            };
            format!("{h}_{{{t}}}")
        }
        None => match n {
            "xi" => "\\xi".into(),
            "phi" => "\\varphi".into(),
            other => other.into(),
        },
    }
}

fn poly_latex(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if m.is_one() {
            out.push_str(&q_latex(&a));
        } else if a.is_one() {
            out.push_str(&mono_latex(m));
        } else {
            out.push_str(&format!("{} \\cdot {}", q_latex(&a), mono_latex(m)));
        }
    }
    out
}

pub fn render_latex(e: &Expr) -> String {
    if e.den().is_one() {
        return poly_latex(e.num());
    }
    format!(
        "\\frac{{{}}}{{{}}}",
        poly_latex(e.num()),
        poly_latex(e.den())
    )
}

fn poly_value(p: &Poly) -> Value {
    Value::Array(
        p.terms()
            .iter()
            .map(|(m, c)| {
                let mono: Vec<Value> = m.iter().map(|(s, e)| json!([s.name(), e])).collect();
                json!({ "coef": c.to_string(), "mono": mono })
            })
            .collect(),
    )
}

/// Structured form: `{"den": [...], "num": [...]}` with terms in canonical
/// order and coefficients as fraction strings.
pub fn machine_value(e: &Expr) -> Value {
    json!({ "den": poly_value(e.den()), "num": poly_value(e.num()) })
}

pub fn render_machine(e: &Expr) -> String {
    serde_json::to_string(&machine_value(e)).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Symbol;
    use crate::parse::parse_expr;

    #[test]
    fn text_forms() {
        let q = Expr::sym(Symbol::Q);
        assert_eq!(render_text(&q.pow(2)), "q^2");
        let e = parse_expr("(x + 1)/(2*u*x)").unwrap();
        assert_eq!(parse_expr(&render_text(&e)).unwrap(), e);
        let e = parse_expr("-x/u^2").unwrap();
        assert_eq!(render_text(&e), "-x/u^2");
    }

    #[test]
    fn latex_forms() {
        let e = Expr::frac(1, 2) * Expr::sym(Symbol::P);
        assert_eq!(render_latex(&e), "\\frac{1}{2} \\cdot p");
        assert_eq!(parse_expr(&render_latex(&e)).unwrap(), e);
    }

    #[test]
    fn machine_zero() {
        assert_eq!(
            render_machine(&Expr::zero()),
            r#"{"den":[{"coef":"1","mono":[]}],"num":[]}"#
        );
    }
}
