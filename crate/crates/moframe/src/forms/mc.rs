//! Linear relations among the Maurer–Cartan forms, the coefficient table
//! μ^a_b, and explicit coordinate formulas for the basis forms.

use std::collections::BTreeMap;

use crate::action::{group_jet_index, phi_sym, xi_sym};
use crate::expr::{Expr, Symbol, SymbolKind};
use crate::parse::parse_expr;
use crate::vfield::{alpha_sym, beta_sym, symbolic_prolong_generic};

use super::{DiffForm, Gen};

/// μ^x_{X^k} is `X(k)`; μ^u_{U^i X^j} is `U(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MuName {
    X(u8),
    U(u8, u8),
}

impl MuName {
    pub fn label(&self) -> String {
        match *self {
            MuName::X(0) => "mu^x".into(),
            MuName::U(0, 0) => "mu^u".into(),
            MuName::X(k) => format!("mu^x_{}", "X".repeat(k as usize)),
            MuName::U(i, j) => format!("mu^u_{}{}", "X".repeat(j as usize), "U".repeat(i as usize)),
        }
    }

    pub fn order(&self) -> usize {
        match *self {
            MuName::X(k) => k as usize,
            MuName::U(i, j) => (i + j) as usize,
        }
    }

    pub fn shift_x(self) -> MuName {
        match self {
            MuName::X(k) => MuName::X(k + 1),
            MuName::U(i, j) => MuName::U(i, j + 1),
        }
    }

    /// `None` when the result vanishes (μ^x does not depend on u).
    pub fn shift_u(self) -> Option<MuName> {
        match self {
            MuName::X(_) => None,
            MuName::U(i, j) => Some(MuName::U(i + 1, j)),
        }
    }
}

pub const LIFTED: [&str; 5] = ["X", "U", "P", "Q", "R"];

pub fn lifted_sym(k: usize) -> Symbol {
    Symbol::intern(LIFTED[k], SymbolKind::Formal)
}

/// Σ coefficient · μ, coefficients polynomial in the lifted P, Q, R.
pub type LinComb = BTreeMap<MuName, Expr>;

fn lin_push(l: &mut LinComb, m: MuName, c: Expr) {
    if c.is_zero() {
        return;
    }
    let v = l.get(&m).map(|v| v + &c).unwrap_or(c);
    if v.is_zero() {
        l.remove(&m);
    } else {
        l.insert(m, v);
    }
}

pub fn lin_sub(a: &LinComb, b: &LinComb) -> LinComb {
    let mut out = a.clone();
    for (m, c) in b {
        lin_push(&mut out, *m, -c);
    }
    out
}

pub fn lin_label(l: &LinComb) -> String {
    if l.is_empty() {
        return "0".into();
    }
    l.iter()
        .map(|(m, c)| format!("({c}) {}", m.label()))
        .collect::<Vec<_>>()
        .join(" + ")
}

#[derive(Debug, Clone)]
pub struct McRelationSet {
    /// dependent form → combination of basis forms
    pub relations: BTreeMap<String, LinComb>,
}

const MAX_JET: usize = 4;

fn lifted_rename() -> BTreeMap<Symbol, Expr> {
    [(Symbol::P, 2), (Symbol::Q, 3), (Symbol::R, 4)]
        .into_iter()
        .map(|(s, k)| (s, Expr::sym(lifted_sym(k))))
        .collect()
}

/// Reads α_{x^k} ↦ μ^x_{X^k}, β_{x^i u^j} ↦ μ^u_{U^j X^i} off an expression linear in them.
fn to_lin(e: &Expr) -> LinComb {
    let e = e
        .substitute(&lifted_rename())
        .expect("renaming cannot fail");
    let mut out = LinComb::new();
    let mut rest = e.clone();
    for k in 0..=MAX_JET {
        let s = alpha_sym(k);
        let c = e.diff(s);
        rest = rest - &c * Expr::sym(s);
        lin_push(&mut out, MuName::X(k as u8), c);
    }
    for n in 0..=MAX_JET {
        for i in 0..=n {
            let s = beta_sym(i, n - i);
            let c = e.diff(s);
            rest = rest - &c * Expr::sym(s);
            lin_push(&mut out, MuName::U((n - i) as u8, i as u8), c);
        }
    }
    assert!(
        rest.is_zero(),
        "prolonged coefficient is not linear in the vector field jets"
    );
    out
}

/// Built from the prolonged generic generator by α ↦ μ^x, β ↦ μ^u and lifting p, q, r.
pub fn mc_relations() -> McRelationSet {
    let pv = symbolic_prolong_generic();
    let mut relations = BTreeMap::new();
    relations.insert("mu^p".to_string(), to_lin(&pv.gamma));
    relations.insert("mu^q".to_string(), to_lin(&pv.tau));
    relations.insert("mu^r".to_string(), to_lin(&pv.varsigma));
    // α depends on x only, β on (x, u) only
    for d in [
        "mu^x_U", "mu^x_P", "mu^x_Q", "mu^x_R", "mu^u_P", "mu^u_Q", "mu^u_R",
    ] {
        relations.insert(d.to_string(), LinComb::new());
    }
    McRelationSet { relations }
}

/// μ^a as a combination of basis forms, a ∈ {x, u, p, q, r}.
pub fn zeroth(rel: &McRelationSet, a: usize) -> LinComb {
    match a {
        0 => [(MuName::X(0), Expr::one())].into(),
        1 => [(MuName::U(0, 0), Expr::one())].into(),
        _ => rel.relations[["", "", "mu^p", "mu^q", "mu^r"][a]].clone(),
    }
}

/// μ^a_b for a, b ∈ {x, u, p, q, r}: X and U shift the basis forms, P, Q, R
/// differentiate the coefficients.
pub fn coefficient_table(rel: &McRelationSet) -> BTreeMap<(usize, usize), LinComb> {
    let mut out = BTreeMap::new();
    for a in 0..5 {
        let z = zeroth(rel, a);
        for b in 0..5 {
            let mut l = LinComb::new();
            for (m, c) in &z {
                match b {
                    0 => lin_push(&mut l, m.shift_x(), c.clone()),
                    1 => {
                        if let Some(n) = m.shift_u() {
                            lin_push(&mut l, n, c.clone());
                        }
                    }
                    _ => lin_push(&mut l, *m, c.diff(lifted_sym(b))),
                }
            }
            out.insert((a, b), l);
        }
    }
    out
}

fn lc(items: &[(&str, MuName)]) -> LinComb {
    let ren = lifted_rename();
    let mut out = LinComb::new();
    for (c, m) in items {
        // the parser has no r; borrow x, which never occurs here
        let e = parse_expr(&c.replace('r', "x"))
            .unwrap()
            .substitute(&BTreeMap::from([(Symbol::X, Expr::sym(Symbol::R))]))
            .unwrap();
        lin_push(&mut out, *m, e.substitute(&ren).unwrap());
    }
    out
}

use MuName::{U, X};

/// The relations for μ^p, μ^q, μ^r as printed.
pub fn display_relations() -> BTreeMap<String, LinComb> {
    BTreeMap::from([
        (
            "mu^p".to_string(),
            lc(&[("p", U(1, 0)), ("-p", X(1)), ("1", U(0, 1))]),
        ),
        (
            "mu^q".to_string(),
            lc(&[
                ("p^2", U(2, 0)),
                ("2*p", U(1, 1)),
                ("-p", X(2)),
                ("q", U(1, 0)),
                ("-2*q", X(1)),
                ("1", U(0, 2)),
            ]),
        ),
        (
            "mu^r".to_string(),
            lc(&[
                ("p^3", U(3, 0)),
                ("3*p^2", U(2, 1)),
                ("3*p", U(1, 2)),
                ("-p", X(3)),
                ("3*q", U(1, 1)),
                ("-3*q", X(2)),
                ("r", U(1, 0)),
                ("-3*r", X(1)),
                ("3*p*q", U(2, 0)),
                ("1", U(0, 2)),
            ]),
        ),
    ])
}

/// The printed coefficient table, cells with a ∈ {p, q, r}.
pub fn display_table() -> BTreeMap<(usize, usize), LinComb> {
    BTreeMap::from([
        ((2, 0), lc(&[("p", U(1, 1)), ("-p", X(2)), ("1", U(0, 2))])),
        ((2, 1), lc(&[("p", U(2, 0)), ("1", U(1, 1))])),
        ((2, 2), lc(&[("1", U(1, 0)), ("-1", X(1))])),
        (
            (3, 0),
            lc(&[
                ("p^2", U(2, 1)),
                ("2*p", U(1, 2)),
                ("-p", X(2)),
                ("q", U(1, 1)),
                ("-2*q", X(2)),
                ("1", U(0, 2)),
            ]),
        ),
        (
            (3, 1),
            lc(&[
                ("p^2", U(3, 0)),
                ("2*p", U(2, 1)),
                ("q", U(2, 0)),
                ("1", U(1, 2)),
            ]),
        ),
        (
            (3, 2),
            lc(&[("2*p", U(2, 0)), ("2", U(1, 1)), ("-1", X(2))]),
        ),
        ((3, 3), lc(&[("1", U(1, 0)), ("-2", U(0, 2))])),
        (
            (4, 0),
            lc(&[
                ("p^3", U(3, 1)),
                ("3*p^2", U(2, 2)),
                ("3*p", U(1, 3)),
                ("-p", X(2)),
                ("3*q", U(1, 2)),
                ("-3*q", X(2)),
                ("r", U(1, 1)),
                ("-3*r", X(2)),
                ("3*p*q", U(2, 1)),
                ("1", U(0, 3)),
            ]),
        ),
        (
            (4, 1),
            lc(&[
                ("p^3", U(4, 0)),
                ("3*p^2", U(3, 1)),
                ("3*p", U(2, 2)),
                ("3*q", U(2, 1)),
                ("r", U(2, 0)),
                ("3*p*q", U(2, 0)),
                ("1", U(1, 2)),
            ]),
        ),
        (
            (4, 2),
            lc(&[
                ("3*p^2", U(3, 0)),
                ("6*p", U(2, 1)),
                ("3", U(1, 2)),
                ("-1", X(2)),
                ("3*q", U(2, 0)),
            ]),
        ),
        (
            (4, 3),
            lc(&[("3*p", U(2, 0)), ("3", U(1, 1)), ("-3", X(2))]),
        ),
        ((4, 4), lc(&[("1", U(1, 0)), ("-3", X(2))])),
    ])
}

/// Total x- and u-derivatives of a form built from group-contact generators.
fn total(w: &DiffForm, in_x: bool) -> DiffForm {
    let dc = |c: &Expr| {
        c.derive_with(&|s| match group_jet_index(s)? {
            (true, i, _) => in_x.then(|| Expr::sym(xi_sym(i + 1))),
            (false, i, j) => Some(Expr::sym(if in_x {
                phi_sym(i + 1, j)
            } else {
                phi_sym(i, j + 1)
            })),
        })
    };
    let mut out = DiffForm::zero(1);
    for (word, c) in w.terms() {
        assert_eq!(word.len(), 1);
        let g = word[0];
        out = out.add(&DiffForm::term(dc(c), &[g]));
        let shifted = match (g, in_x) {
            (Gen::XiC(k), true) => Some(Gen::XiC(k + 1)),
            (Gen::XiC(_), false) => None,
            (Gen::PhiC(i, j), true) => Some(Gen::PhiC(i + 1, j)),
            (Gen::PhiC(i, j), false) => Some(Gen::PhiC(i, j + 1)),
            _ => panic!("total derivative of a non-contact generator"),
        };
        if let Some(h) = shifted {
            out = out.add(&DiffForm::term(c.clone(), &[h]));
        }
    }
    out
}

/// Coordinate formulas for the basis forms: μ^x = c[ξ], μ^u = c[φ], and
/// higher forms by the invariant derivatives dual to dX, dU.
#[derive(Default)]
pub struct ExplicitMu {
    cache: BTreeMap<MuName, DiffForm>,
}

impl ExplicitMu {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, m: MuName) -> DiffForm {
        if let Some(f) = self.cache.get(&m) {
            return f.clone();
        }
        let xi1 = Expr::sym(xi_sym(1));
        let (phx, phu) = (Expr::sym(phi_sym(1, 0)), Expr::sym(phi_sym(0, 1)));
        let d_u = |w: &DiffForm| total(w, false).scale(&phu.inv().unwrap());
        let d_x = |w: &DiffForm| {
            total(w, true)
                .sub(&total(w, false).scale(&(&phx / &phu)))
                .scale(&xi1.inv().unwrap())
        };
        let f = match m {
            MuName::X(0) => DiffForm::gen(Gen::XiC(0)),
            MuName::U(0, 0) => DiffForm::gen(Gen::PhiC(0, 0)),
            MuName::X(k) => d_x(&self.get(MuName::X(k - 1))),
            MuName::U(i, j) if j > 0 => d_x(&self.get(MuName::U(i, j - 1))),
            MuName::U(i, _) => d_u(&self.get(MuName::U(i - 1, 0))),
        };
        self.cache.insert(m, f.clone());
        f
    }

    /// Σ c · μ with P, Q, R replaced by `vals`.
    pub fn eval(&mut self, l: &LinComb, vals: &BTreeMap<Symbol, Expr>) -> DiffForm {
        let mut out = DiffForm::zero(1);
        for (m, c) in l {
            let c = c
                .substitute(vals)
                .expect("lifted values have nonzero denominators");
            out = out.add(&self.get(*m).scale(&c));
        }
        out
    }
}

/// Σ c · μ with the μ kept as formal generators.
pub fn formal(l: &LinComb, vals: &BTreeMap<Symbol, Expr>) -> DiffForm {
    let mut out = DiffForm::zero(1);
    for (m, c) in l {
        out = out.add(&DiffForm::term(c.substitute(vals).unwrap(), &[Gen::Mu(*m)]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations_match_display_except_ledger() {
        let rel = mc_relations();
        let disp = display_relations();
        assert!(lin_sub(&rel.relations["mu^p"], &disp["mu^p"]).is_empty());
        assert!(lin_sub(&rel.relations["mu^q"], &disp["mu^q"]).is_empty());
        let diff = lin_sub(&rel.relations["mu^r"], &disp["mu^r"]);
        assert_eq!(diff, lc(&[("1", U(0, 3)), ("-1", U(0, 2))]));
        assert!(rel.relations["mu^x_U"].is_empty());
    }

    #[test]
    fn table_spot_values() {
        let t = coefficient_table(&mc_relations());
        assert_eq!(t[&(4, 4)], lc(&[("1", U(1, 0)), ("-3", X(1))]));
        assert_eq!(t[&(3, 3)], lc(&[("1", U(1, 0)), ("-2", X(1))]));
        assert!(t[&(0, 1)].is_empty());
    }
}
