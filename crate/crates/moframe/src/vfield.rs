//! Infinitesimal generators α(x)∂x + β(x,u)∂u and their third prolongation.

use thiserror::Error;

use crate::expr::{Expr, Symbol, SymbolKind};

pub fn alpha_name(i: usize) -> String {
    if i == 0 {
        "alpha".into()
    } else {
        format!("alpha_{}", "x".repeat(i))
    }
}

pub fn beta_name(i: usize, j: usize) -> String {
    if i + j == 0 {
        "beta".into()
    } else {
        format!("beta_{}{}", "x".repeat(i), "u".repeat(j))
    }
}

pub fn alpha_sym(i: usize) -> Symbol {
    Symbol::intern(&alpha_name(i), SymbolKind::Formal)
}

pub fn beta_sym(i: usize, j: usize) -> Symbol {
    Symbol::intern(&beta_name(i, j), SymbolKind::Formal)
}

/// Reads back (i) or (i, j) from a formal α/β symbol.
fn parse_formal(s: Symbol) -> Option<(bool, usize, usize)> {
    if s.kind() != SymbolKind::Formal {
        return None;
    }
    let n = s.name();
    let (is_alpha, rest) = if let Some(r) = n.strip_prefix("alpha") {
        (true, r)
    } else if let Some(r) = n.strip_prefix("beta") {
        (false, r)
    } else {
        return None;
    };
    let rest = if rest.is_empty() {
        rest
    } else {
        rest.strip_prefix('_')?
    };
    let i = rest.chars().take_while(|&c| c == 'x').count();
    let j = rest.chars().skip(i).take_while(|&c| c == 'u').count();
    if i + j != rest.len() || (is_alpha && j > 0) {
        return None;
    }
    Some((is_alpha, i, j))
}

fn partial_x(e: &Expr) -> Expr {
    e.derive_with(&|s| {
        if s == Symbol::X {
            return Some(Expr::one());
        }
        match parse_formal(s)? {
            (true, i, _) => Some(Expr::sym(alpha_sym(i + 1))),
            (false, i, j) => Some(Expr::sym(beta_sym(i + 1, j))),
        }
    })
}

fn partial_u(e: &Expr) -> Expr {
    e.derive_with(&|s| {
        if s == Symbol::U {
            return Some(Expr::one());
        }
        match parse_formal(s)? {
            (true, ..) => Some(Expr::zero()),
            (false, i, j) => Some(Expr::sym(beta_sym(i, j + 1))),
        }
    })
}

/// Unrestricted total derivative ∂x + p∂u + q∂p + r∂q (r is free here).
/// Formal α, β jets advance as functions of x and (x, u).
pub fn total_derivative_free(e: &Expr) -> Expr {
    let p = Expr::sym(Symbol::P);
    e.derive_with(&|s| {
        if s == Symbol::X {
            Some(Expr::one())
        } else if s == Symbol::U {
            Some(p.clone())
        } else if s == Symbol::P {
            Some(Expr::sym(Symbol::Q))
        } else if s == Symbol::Q {
            Some(Expr::sym(Symbol::R))
        } else if s == Symbol::R {
            panic!("fourth-order jets are outside the prolongation")
        } else {
            match parse_formal(s)? {
                (true, i, _) => Some(Expr::sym(alpha_sym(i + 1))),
                (false, i, j) => {
                    Some(Expr::sym(beta_sym(i + 1, j)) + &p * Expr::sym(beta_sym(i, j + 1)))
                }
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("alpha must depend on x only; found `{0}`")]
    AlphaDependence(String),
    #[error("beta must depend on x and u only; found `{0}`")]
    BetaDependence(String),
}

/// v = α ∂x + β ∂u.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub alpha: Expr,
    pub beta: Expr,
}

impl VectorField {
    pub fn new(alpha: Expr, beta: Expr) -> Result<Self, FieldError> {
        for s in alpha.symbols() {
            let ok = s == Symbol::X || matches!(parse_formal(s), Some((true, ..)));
            if !ok {
                return Err(FieldError::AlphaDependence(s.name()));
            }
        }
        for s in beta.symbols() {
            let ok = s == Symbol::X || s == Symbol::U || parse_formal(s).is_some();
            if !ok {
                return Err(FieldError::BetaDependence(s.name()));
            }
        }
        Ok(VectorField { alpha, beta })
    }

    /// The generator with α, β left as formal jets.
    pub fn generic() -> Self {
        VectorField {
            alpha: Expr::sym(alpha_sym(0)),
            beta: Expr::sym(beta_sym(0, 0)),
        }
    }

    pub fn scale(&self, c: &Expr) -> Self {
        VectorField {
            alpha: &self.alpha * c,
            beta: &self.beta * c,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        VectorField {
            alpha: &self.alpha + &o.alpha,
            beta: &self.beta + &o.beta,
        }
    }

    /// Lie bracket [self, o].
    pub fn bracket(&self, o: &Self) -> Self {
        let (a1, b1, a2, b2) = (&self.alpha, &self.beta, &o.alpha, &o.beta);
        let alpha = a1 * partial_x(a2) - a2 * partial_x(a1);
        let beta =
            a1 * partial_x(b2) + b1 * partial_u(b2) - a2 * partial_x(b1) - b2 * partial_u(b1);
        VectorField { alpha, beta }
    }
}

/// Coefficients of ∂x, ∂u, ∂p, ∂q, ∂r.
#[derive(Debug, Clone, PartialEq)]
pub struct ProlongedField {
    pub alpha: Expr,
    pub beta: Expr,
    pub gamma: Expr,
    pub tau: Expr,
    pub varsigma: Expr,
}

impl ProlongedField {
    pub fn add(&self, o: &Self) -> Self {
        ProlongedField {
            alpha: &self.alpha + &o.alpha,
            beta: &self.beta + &o.beta,
            gamma: &self.gamma + &o.gamma,
            tau: &self.tau + &o.tau,
            varsigma: &self.varsigma + &o.varsigma,
        }
    }

    pub fn scale(&self, c: &Expr) -> Self {
        ProlongedField {
            alpha: &self.alpha * c,
            beta: &self.beta * c,
            gamma: &self.gamma * c,
            tau: &self.tau * c,
            varsigma: &self.varsigma * c,
        }
    }
}

/// Recursive prolongation: each new coefficient is D_x of the previous one
/// minus (D_x α) times the next jet coordinate.
pub fn prolong(v: &VectorField) -> ProlongedField {
    let da = total_derivative_free(&v.alpha);
    let (p, q, r) = (
        Expr::sym(Symbol::P),
        Expr::sym(Symbol::Q),
        Expr::sym(Symbol::R),
    );
    let gamma = total_derivative_free(&v.beta) - &p * &da;
    let tau = total_derivative_free(&gamma) - &q * &da;
    let varsigma = total_derivative_free(&tau) - &r * &da;
    ProlongedField {
        alpha: v.alpha.clone(),
        beta: v.beta.clone(),
        gamma,
        tau,
        varsigma,
    }
}

pub fn symbolic_prolong_generic() -> ProlongedField {
    prolong(&VectorField::generic())
}

/// The closed forms of γ, τ, ς written out in α, β and their partials.
pub fn closed_form(v: &VectorField) -> (Expr, Expr, Expr) {
    let a = &v.alpha;
    let b = &v.beta;
    let ax = partial_x(a);
    let axx = partial_x(&ax);
    let axxx = partial_x(&axx);
    let bx = partial_x(b);
    let bu = partial_u(b);
    let bxx = partial_x(&bx);
    let bxu = partial_u(&bx);
    let buu = partial_u(&bu);
    let bxxx = partial_x(&bxx);
    let bxxu = partial_u(&bxx);
    let bxuu = partial_u(&bxu);
    let buuu = partial_u(&buu);
    let (p, q, r) = (
        Expr::sym(Symbol::P),
        Expr::sym(Symbol::Q),
        Expr::sym(Symbol::R),
    );
    let n = |k: i64| Expr::int(k);
    let gamma = (&bu - &ax) * &p + &bx;
    let tau = &buu * p.pow(2) + (n(2) * &bxu - &axx) * &p + (&bu - n(2) * &ax) * &q + &bxx;
    let varsigma = &buuu * p.pow(3)
        + n(3) * &bxuu * p.pow(2)
        + (n(3) * &bxxu - &axxx) * &p
        + n(3) * (&bxu - &axx) * &q
        + (&bu - n(3) * &ax) * &r
        + n(3) * &buu * &p * &q
        + &bxxx;
    (gamma, tau, varsigma)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeterminingCheck {
    pub ok: bool,
    /// canonical differences (prolonged − closed form) for γ, τ, ς
    pub residuals: [Expr; 3],
}

pub fn check_determining(pv: &ProlongedField) -> DeterminingCheck {
    let v = VectorField {
        alpha: pv.alpha.clone(),
        beta: pv.beta.clone(),
    };
    let (g, t, s) = closed_form(&v);
    let residuals = [&pv.gamma - g, &pv.tau - t, &pv.varsigma - s];
    DeterminingCheck {
        ok: residuals.iter().all(|r| r.is_zero()),
        residuals,
    }
}

/// Coefficient of a monomial in p, q, r (other symbols kept).
pub fn coefficient_in_pqr(e: &Expr, ep: u32, eq: u32, er: u32) -> Expr {
    assert!(
        e.is_polynomial(),
        "coefficient extraction needs a polynomial"
    );
    use crate::expr::Poly;
    let mut ts = Vec::new();
    for (m, c) in e.num().terms() {
        let (a, rest) = m.without(Symbol::P.id());
        let (b, rest) = rest.without(Symbol::Q.id());
        let (d, rest) = rest.without(Symbol::R.id());
        if (a, b, d) == (ep, eq, er) {
            ts.push((rest, c.clone()));
        }
    }
    Expr::from_poly(Poly::from_terms(ts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expr;

    fn e(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    fn field(a: &str, b: &str) -> VectorField {
        VectorField::new(e(a), e(b)).unwrap()
    }

    #[test]
    fn translation_has_trivial_prolongation() {
        let pv = prolong(&field("1", "0"));
        assert!(pv.gamma.is_zero() && pv.tau.is_zero() && pv.varsigma.is_zero());
    }

    #[test]
    fn scalings() {
        let pv = prolong(&field("x", "0"));
        assert_eq!(
            (pv.gamma.clone(), pv.tau.clone(), pv.varsigma.clone()),
            (
                e("-p"),
                e("-2*q"),
                e("-3*q").subs(Symbol::Q, &Expr::sym(Symbol::R)).unwrap()
            )
        );
        assert!(check_determining(&pv).ok);
        let pv = prolong(&field("0", "u"));
        assert_eq!(pv.gamma, e("p"));
        assert_eq!(pv.tau, e("q"));
        assert_eq!(pv.varsigma, Expr::sym(Symbol::R));
    }

    #[test]
    fn quadratic_alpha() {
        let pv = prolong(&field("x^2", "0"));
        let r = Expr::sym(Symbol::R);
        assert_eq!(pv.gamma, e("-2*x*p"));
        assert_eq!(pv.tau, e("-2*p - 4*x*q"));
        assert_eq!(pv.varsigma, e("-6*q") - e("6*x") * r);
        assert!(check_determining(&pv).ok);
    }

    #[test]
    fn corrupted_field_is_caught() {
        let mut pv = prolong(&field("x^2", "u*x"));
        pv.tau = &pv.tau + Expr::one();
        let c = check_determining(&pv);
        assert!(!c.ok);
        assert!(c.residuals[0].is_zero());
        assert!(c.residuals[1].is_one());
        assert!(c.residuals[2].is_zero());
    }

    #[test]
    fn generic_coefficients() {
        let pv = symbolic_prolong_generic();
        assert!(check_determining(&pv).ok);
        let s = |n: &str| Expr::sym(Symbol::lookup(n).unwrap());
        assert_eq!(
            coefficient_in_pqr(&pv.gamma, 1, 0, 0),
            s("beta_u") - s("alpha_x")
        );
        assert_eq!(
            coefficient_in_pqr(&pv.varsigma, 0, 0, 1),
            s("beta_u") - Expr::int(3) * s("alpha_x")
        );
        assert_eq!(
            coefficient_in_pqr(&pv.varsigma, 1, 1, 0),
            Expr::int(3) * s("beta_uu")
        );
        assert_eq!(
            coefficient_in_pqr(&pv.varsigma, 1, 0, 0),
            Expr::int(3) * s("beta_xxu") - s("alpha_xxx")
        );
    }
}
