//! Exterior forms over the jet and group-jet coordinates, with formal
//! generators for the Maurer–Cartan and horizontal coframe forms.

mod mc;
mod recurrence;
mod structure;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::action::{group_jet_index, phi_name, phi_sym, xi_name, xi_sym};
use crate::expr::{Expr, Symbol};

pub use mc::{
    coefficient_table, display_relations, display_table, lin_label, lin_sub, mc_relations,
    ExplicitMu, LinComb, McRelationSet, MuName, LIFTED,
};
pub use recurrence::{verify_recurrence, RecurrenceReport};
pub use structure::{verify_structure, Check, Level, LevelReport};

/// One-form generators. The derived order is the wedge-word order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    /// dx, du, dp, dq, dr
    Coord(u8),
    /// group-contact part of dξ_{x^k}
    XiC(u8),
    /// group-contact part of dφ_{x^i u^j}
    PhiC(u8, u8),
    /// formal ω^x … ω^r
    Omega(u8),
    /// formal Maurer–Cartan form
    Mu(MuName),
}

const COORDS: [&str; 5] = ["x", "u", "p", "q", "r"];

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gen::Coord(k) => write!(f, "d{}", COORDS[k as usize]),
            Gen::XiC(k) => write!(f, "c[{}]", xi_name(k as usize)),
            Gen::PhiC(i, j) => write!(f, "c[{}]", phi_name(i as usize, j as usize)),
            Gen::Omega(k) => write!(f, "w^{}", COORDS[k as usize]),
            Gen::Mu(m) => write!(f, "{}", m.label()),
        }
    }
}

impl Gen {
    pub fn is_formal(&self) -> bool {
        matches!(self, Gen::Omega(_) | Gen::Mu(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("d is not defined on the formal generator {0}")]
    FormalGenerator(String),
    #[error("d is not defined on the formal symbol {0}")]
    FormalSymbol(String),
}

/// A homogeneous form: strictly increasing generator words with canonical
/// coefficients; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffForm {
    degree: usize,
    terms: BTreeMap<Vec<Gen>, Expr>,
}

/// Sorts a word, returning the permutation sign, or `None` on a repeat.
fn sort_word(w: &[Gen]) -> Option<(Vec<Gen>, bool)> {
    let mut v = w.to_vec();
    let mut odd = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
        if j > 0 && v[j - 1] == v[j] {
            return None;
        }
    }
    Some((v, odd))
}

impl DiffForm {
    pub fn zero(degree: usize) -> Self {
        DiffForm {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn function(f: Expr) -> Self {
        let mut out = Self::zero(0);
        out.push(vec![], f);
        out
    }

    pub fn gen(g: Gen) -> Self {
        Self::term(Expr::one(), &[g])
    }

    /// c · g1∧…∧gk with any generator order.
    pub fn term(c: Expr, gens: &[Gen]) -> Self {
        let mut out = Self::zero(gens.len());
        if let Some((w, odd)) = sort_word(gens) {
            out.push(w, if odd { -c } else { c });
        }
        out
    }

    fn push(&mut self, w: Vec<Gen>, c: Expr) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(v) => {
                let s = &*v + &c;
                if s.is_zero() {
                    self.terms.remove(&w);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Gen>, Expr> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, gens: &[Gen]) -> Expr {
        match sort_word(gens) {
            Some((w, odd)) => {
                let c = self.terms.get(&w).cloned().unwrap_or_else(Expr::zero);
                if odd {
                    -c
                } else {
                    c
                }
            }
            None => Expr::zero(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert!(
            self.is_zero() || o.is_zero() || self.degree == o.degree,
            "adding forms of different degree"
        );
        let mut out = if self.is_zero() {
            Self::zero(o.degree)
        } else {
            self.clone()
        };
        for (w, c) in &o.terms {
            out.push(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        DiffForm {
            degree: self.degree,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Expr) -> Self {
        let mut out = Self::zero(self.degree);
        for (w, c) in &self.terms {
            out.push(w.clone(), c * k);
        }
        out
    }

    pub fn wedge(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.degree + o.degree);
        for (wa, ca) in &self.terms {
            for (wb, cb) in &o.terms {
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                if let Some((w, odd)) = sort_word(&w) {
                    let c = ca * cb;
                    out.push(w, if odd { -c } else { c });
                }
            }
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&Expr) -> Expr) -> Self {
        let mut out = Self::zero(self.degree);
        for (w, c) in &self.terms {
            out.push(w.clone(), f(c));
        }
        out
    }

    /// Replaces generators by one-forms; `None` keeps the generator.
    pub fn substitute_gens(&self, f: &dyn Fn(Gen) -> Option<DiffForm>) -> Self {
        let mut out = Self::zero(self.degree);
        for (w, c) in &self.terms {
            let mut acc = Self::function(c.clone());
            for g in w {
                let img = f(*g).unwrap_or_else(|| Self::gen(*g));
                acc = acc.wedge(&img);
            }
            out = out.add(&acc);
        }
        out
    }

    /// Exterior derivative. Defined on coordinate and group-contact
    /// generators and on coefficients in base and group-jet symbols.
    pub fn d(&self) -> Result<Self, FormError> {
        let mut out = Self::zero(self.degree + 1);
        for (w, c) in &self.terms {
            let word = Self::term(Expr::one(), w);
            out = out.add(&d_function(c)?.wedge(&word));
            for (k, g) in w.iter().enumerate() {
                let dg = d_gen(*g)?;
                if dg.is_zero() {
                    continue;
                }
                let mut acc = Self::function(if k % 2 == 1 { -c } else { c.clone() });
                for (i, h) in w.iter().enumerate() {
                    acc = acc.wedge(&if i == k { dg.clone() } else { Self::gen(*h) });
                }
                out = out.add(&acc);
            }
        }
        Ok(out)
    }

    /// The same form with every term containing a generator outside `keep` dropped.
    pub fn restrict(&self, keep: impl Fn(&Gen) -> bool) -> Self {
        DiffForm {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.iter().all(&keep))
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }
}

/// d of a function, as a one-form.
pub fn d_function(f: &Expr) -> Result<DiffForm, FormError> {
    let mut out = DiffForm::zero(1);
    for s in f.symbols() {
        let fs = f.diff(s);
        if fs.is_zero() {
            continue;
        }
        out = out.add(&d_symbol(s)?.scale(&fs));
    }
    Ok(out)
}

fn d_symbol(s: Symbol) -> Result<DiffForm, FormError> {
    if let Some(k) = [Symbol::X, Symbol::U, Symbol::P, Symbol::Q, Symbol::R]
        .iter()
        .position(|&b| b == s)
    {
        return Ok(DiffForm::gen(Gen::Coord(k as u8)));
    }
    let dx = DiffForm::gen(Gen::Coord(0));
    let du = DiffForm::gen(Gen::Coord(1));
    match group_jet_index(s) {
        Some((true, i, _)) => Ok(dx
            .scale(&Expr::sym(xi_sym(i + 1)))
            .add(&DiffForm::gen(Gen::XiC(i as u8)))),
        Some((false, i, j)) => Ok(dx
            .scale(&Expr::sym(phi_sym(i + 1, j)))
            .add(&du.scale(&Expr::sym(phi_sym(i, j + 1))))
            .add(&DiffForm::gen(Gen::PhiC(i as u8, j as u8)))),
        None => Err(FormError::FormalSymbol(s.name())),
    }
}

fn d_gen(g: Gen) -> Result<DiffForm, FormError> {
    let dx = Gen::Coord(0);
    let du = Gen::Coord(1);
    Ok(match g {
        Gen::Coord(_) => DiffForm::zero(2),
        Gen::XiC(k) => DiffForm::term(Expr::one(), &[dx, Gen::XiC(k + 1)]),
        Gen::PhiC(i, j) => DiffForm::term(Expr::one(), &[dx, Gen::PhiC(i + 1, j)])
            .add(&DiffForm::term(Expr::one(), &[du, Gen::PhiC(i, j + 1)])),
        g => return Err(FormError::FormalGenerator(g.to_string())),
    })
}

impl fmt::Display for DiffForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for g in w {
                write!(f, " {g}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expr;

    fn e(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn basic_rules() {
        let dx = DiffForm::gen(Gen::Coord(0));
        let du = DiffForm::gen(Gen::Coord(1));
        assert!(dx.d().unwrap().is_zero());
        let udx = DiffForm::term(e("u"), &[Gen::Coord(0)]);
        assert_eq!(udx.d().unwrap(), du.wedge(&dx));
        assert_eq!(dx.wedge(&du), du.wedge(&dx).neg());
        assert!(dx.wedge(&dx).is_zero());
    }

    #[test]
    fn identity_jet_spot_check() {
        // σ^x = ξ_x dx; at ξ_x = 1 and ξ_xx = 0, dσ^x = c[ξ_x] ∧ dx
        let sx = DiffForm::term(Expr::sym(xi_sym(1)), &[Gen::Coord(0)]);
        let d = sx.d().unwrap();
        let at = d.map_coeffs(|c| c.subs(xi_sym(2), &Expr::zero()).unwrap());
        assert_eq!(
            at,
            DiffForm::term(Expr::one(), &[Gen::XiC(1), Gen::Coord(0)])
        );
    }

    #[test]
    fn formal_generators_have_no_d() {
        assert!(DiffForm::gen(Gen::Omega(0)).d().is_err());
    }
}
