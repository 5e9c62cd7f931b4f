//! The prolonged action of fiber-preserving maps on (x, u, p, q, r), and
//! lifted invariants of the equation r = F.

mod checks;
mod compose;
mod ops;
mod taylor;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::{Expr, Symbol, SymbolKind, Q};
use crate::field::Field;

pub use checks::{
    display_vs_chain, group_law, infinitesimal_residuals, random_map, GroupLawReport,
};
pub use compose::{compose_jets, map_jets};
pub use ops::{lifted_invariant, lifted_operators, LiftedOperators};
pub use taylor::{word_index, word_label, TaylorLift};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("xi_x vanishes")]
    XiDegenerate,
    #[error("phi_u vanishes")]
    PhiDegenerate,
    #[error("lifted Jacobian is singular (non-transversal point)")]
    NonTransversal,
    #[error("group jets of order {needed} are needed, {available} are stored")]
    OrderTooLow { needed: usize, available: usize },
    #[error("word of length {len} exceeds the configured maximum {max}")]
    WordTooLong { len: usize, max: usize },
    #[error("map must be fiber-preserving: {0}")]
    NotFiberPreserving(String),
    #[error("expression size cap exceeded")]
    SizeCap,
    #[error("{0}")]
    Algebra(String),
}

pub fn xi_name(i: usize) -> String {
    if i == 0 {
        "xi".into()
    } else {
        format!("xi_{}", "x".repeat(i))
    }
}

pub fn phi_name(i: usize, j: usize) -> String {
    if i + j == 0 {
        "phi".into()
    } else {
        format!("phi_{}{}", "x".repeat(i), "u".repeat(j))
    }
}

pub fn xi_sym(i: usize) -> Symbol {
    Symbol::intern(&xi_name(i), SymbolKind::GroupJet)
}

pub fn phi_sym(i: usize, j: usize) -> Symbol {
    Symbol::intern(&phi_name(i, j), SymbolKind::GroupJet)
}

/// `Some((true, i, 0))` for ξ_{x^i}, `Some((false, i, j))` for φ_{x^i u^j}.
pub fn group_jet_index(s: Symbol) -> Option<(bool, usize, usize)> {
    if s.kind() != SymbolKind::GroupJet {
        return None;
    }
    let n = s.name();
    let (is_xi, rest) = if let Some(r) = n.strip_prefix("xi") {
        (true, r)
    } else {
        (false, n.strip_prefix("phi")?)
    };
    let rest = if rest.is_empty() {
        rest
    } else {
        rest.strip_prefix('_')?
    };
    let i = rest.chars().take_while(|&c| c == 'x').count();
    let j = rest.chars().skip(i).take_while(|&c| c == 'u').count();
    if i + j != rest.len() || (is_xi && j > 0) {
        return None;
    }
    Some((is_xi, i, j))
}

/// Jets of ξ(x) and φ(x, u) at a point. Entries not stored read as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupJet<K = Expr> {
    pub xi: BTreeMap<usize, K>,
    pub phi: BTreeMap<(usize, usize), K>,
    pub order: usize,
}

impl<K: Field> GroupJet<K> {
    pub fn new(
        xi: BTreeMap<usize, K>,
        phi: BTreeMap<(usize, usize), K>,
        order: usize,
    ) -> Result<Self, ActionError> {
        let g = GroupJet { xi, phi, order };
        if g.xi(1).is_zero() {
            return Err(ActionError::XiDegenerate);
        }
        if g.phi(0, 1).is_zero() {
            return Err(ActionError::PhiDegenerate);
        }
        Ok(g)
    }

    pub fn xi(&self, i: usize) -> K {
        self.xi.get(&i).cloned().unwrap_or_else(K::zero)
    }

    pub fn phi(&self, i: usize, j: usize) -> K {
        self.phi.get(&(i, j)).cloned().unwrap_or_else(K::zero)
    }
}

impl GroupJet<Expr> {
    /// Every jet up to `order` as its own group-jet symbol.
    pub fn formal(order: usize) -> Self {
        let xi = (0..=order).map(|i| (i, Expr::sym(xi_sym(i)))).collect();
        let mut phi = BTreeMap::new();
        for n in 0..=order {
            for i in 0..=n {
                phi.insert((i, n - i), Expr::sym(phi_sym(i, n - i)));
            }
        }
        GroupJet { xi, phi, order }
    }

    /// ξ = x, φ = u.
    pub fn identity(order: usize) -> Self {
        let xi = [(0, Expr::sym(Symbol::X)), (1, Expr::one())]
            .into_iter()
            .collect();
        let phi = [((0, 0), Expr::sym(Symbol::U)), ((0, 1), Expr::one())]
            .into_iter()
            .collect();
        GroupJet { xi, phi, order }
    }

    /// Jets of an explicit map, as expressions in x and u.
    pub fn from_map(xi: &Expr, phi: &Expr, order: usize) -> Result<Self, ActionError> {
        check_fiber_preserving(xi, phi)?;
        let mut xs = BTreeMap::new();
        let mut d = xi.clone();
        for i in 0..=order {
            xs.insert(i, d.clone());
            d = d.diff(Symbol::X);
        }
        let mut ps = BTreeMap::new();
        let mut di = phi.clone();
        for i in 0..=order {
            let mut dj = di.clone();
            for j in 0..=order - i {
                ps.insert((i, j), dj.clone());
                dj = dj.diff(Symbol::U);
            }
            di = di.diff(Symbol::X);
        }
        GroupJet::new(xs, ps, order)
    }

    /// Binding of every formal group-jet symbol up to `order` to this jet.
    pub fn binding(&self, order: usize) -> BTreeMap<Symbol, Expr> {
        let mut b = BTreeMap::new();
        for i in 0..=order {
            b.insert(xi_sym(i), self.xi(i));
            for j in 0..=order - i {
                b.insert(phi_sym(i, j), self.phi(i, j));
            }
        }
        b
    }

    pub fn eval_at(&self, b: &BTreeMap<Symbol, Q>) -> Result<GroupJet<Q>, ActionError> {
        let ev = |e: &Expr| e.eval(b).map_err(|e| ActionError::Algebra(e.to_string()));
        let xi = self
            .xi
            .iter()
            .map(|(k, v)| Ok((*k, ev(v)?)))
            .collect::<Result<_, ActionError>>()?;
        let phi = self
            .phi
            .iter()
            .map(|(k, v)| Ok((*k, ev(v)?)))
            .collect::<Result<_, ActionError>>()?;
        GroupJet::new(xi, phi, self.order)
    }
}

impl GroupJet<Q> {
    pub fn to_expr(&self) -> GroupJet<Expr> {
        GroupJet {
            xi: self
                .xi
                .iter()
                .map(|(k, v)| (*k, Expr::constant(v.clone())))
                .collect(),
            phi: self
                .phi
                .iter()
                .map(|(k, v)| (*k, Expr::constant(v.clone())))
                .collect(),
            order: self.order,
        }
    }
}

pub fn check_fiber_preserving(xi: &Expr, phi: &Expr) -> Result<(), ActionError> {
    for s in xi.symbols() {
        if s != Symbol::X {
            return Err(ActionError::NotFiberPreserving(format!(
                "X depends on {}",
                s.name()
            )));
        }
    }
    for s in phi.symbols() {
        if s != Symbol::X && s != Symbol::U {
            return Err(ActionError::NotFiberPreserving(format!(
                "U depends on {}",
                s.name()
            )));
        }
    }
    Ok(())
}

/// A lifted invariant together with the name of what it represents.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedExpr {
    pub label: String,
    pub value: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Helpers {
    pub delta: Expr,
    pub epsilon: Expr,
    pub psi: Expr,
    pub chi: Expr,
}

pub fn helpers(g: &GroupJet) -> Helpers {
    let (p, q, r) = (
        Expr::sym(Symbol::P),
        Expr::sym(Symbol::Q),
        Expr::sym(Symbol::R),
    );
    let n = Expr::int;
    let x1 = g.xi(1);
    let x2 = g.xi(2);
    let x3 = g.xi(3);
    let f = |i, j| g.phi(i, j);
    let delta = &p * f(0, 1) + f(1, 0);
    let epsilon = &x2 / &x1;
    let psi = &x1 * f(0, 2) * p.pow(2) - (&x2 * f(0, 1) - n(2) * &x1 * f(1, 1)) * &p
        + f(0, 1) * &x1 * &q
        - &x2 * f(1, 0)
        + &x1 * f(2, 0);
    let chi = -(x1.pow(2) * f(0, 3) * p.pow(3))
        + n(3) * &x1 * (&x2 * f(0, 2) - &x1 * f(1, 2)) * p.pow(2)
        + (n(6) * &x2 * &x1 * f(1, 1) + &x3 * &x1 * f(0, 1)
            - n(3) * x2.pow(2) * f(0, 1)
            - n(3) * x1.pow(2) * f(2, 1))
            * &p
        + n(3) * &x1 * (f(0, 1) * &x2 - f(1, 1) * &x1) * &q
        - n(3) * x1.pow(2) * f(0, 2) * &p * &q
        - f(0, 1) * x1.pow(2) * &r
        + n(3) * &x2 * &x1 * f(2, 0)
        + &x3 * &x1 * f(1, 0)
        - x1.pow(2) * f(3, 0)
        - n(3) * x2.pow(2) * f(1, 0);
    Helpers {
        delta,
        epsilon,
        psi,
        chi,
    }
}

fn at_point(e: Expr, point: Option<&[Q; 5]>) -> Result<Expr, ActionError> {
    match point {
        None => Ok(e),
        Some(pt) => {
            let b: BTreeMap<Symbol, Expr> = [Symbol::X, Symbol::U, Symbol::P, Symbol::Q, Symbol::R]
                .into_iter()
                .zip(pt.iter().map(|v| Expr::constant(v.clone())))
                .collect();
            e.substitute(&b)
                .map_err(|e| ActionError::Algebra(e.to_string()))
        }
    }
}

const LABELS: [&str; 5] = ["X", "U", "P", "Q", "R"];

/// (X, U, P, Q, R) from the helper functions.
pub fn prolonged_action(
    g: &GroupJet,
    point: Option<&[Q; 5]>,
) -> Result<[LiftedExpr; 5], ActionError> {
    if g.order < 3 {
        return Err(ActionError::OrderTooLow {
            needed: 3,
            available: g.order,
        });
    }
    let x1 = g.xi(1);
    if x1.is_zero() {
        return Err(ActionError::XiDegenerate);
    }
    if g.phi(0, 1).is_zero() {
        return Err(ActionError::PhiDegenerate);
    }
    let h = helpers(g);
    let vals = [
        g.xi(0),
        g.phi(0, 0),
        &h.delta / &x1,
        &h.psi / x1.pow(3),
        -(&h.chi / x1.pow(5)),
    ];
    finish(vals, point)
}

fn finish(vals: [Expr; 5], point: Option<&[Q; 5]>) -> Result<[LiftedExpr; 5], ActionError> {
    let mut out = Vec::with_capacity(5);
    for (l, v) in LABELS.iter().zip(vals) {
        out.push(LiftedExpr {
            label: (*l).to_string(),
            value: at_point(v, point)?,
        });
    }
    Ok(out.try_into().unwrap())
}

/// Total derivative on the jet space with r free, advancing formal group jets.
pub(crate) fn dx_free(e: &Expr) -> Expr {
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
        } else {
            match group_jet_index(s)? {
                (true, i, _) => Some(Expr::sym(xi_sym(i + 1))),
                (false, i, j) => {
                    Some(Expr::sym(phi_sym(i + 1, j)) + &p * Expr::sym(phi_sym(i, j + 1)))
                }
            }
        }
    })
}

/// (X, U, P, Q, R) by the chain rule on formal ξ, φ, then specialized to `g`.
pub fn prolonged_action_chain(
    g: &GroupJet,
    point: Option<&[Q; 5]>,
) -> Result<[LiftedExpr; 5], ActionError> {
    if g.order < 3 {
        return Err(ActionError::OrderTooLow {
            needed: 3,
            available: g.order,
        });
    }
    let xi = Expr::sym(xi_sym(0));
    let phi = Expr::sym(phi_sym(0, 0));
    let dxi = dx_free(&xi);
    let p = &dx_free(&phi) / &dxi;
    let q = &dx_free(&p) / &dxi;
    let r = &dx_free(&q) / &dxi;
    let b = g.binding(3);
    let sub = |e: &Expr| {
        e.substitute(&b)
            .map_err(|e| ActionError::Algebra(e.to_string()))
    };
    finish([sub(&xi)?, sub(&phi)?, sub(&p)?, sub(&q)?, sub(&r)?], point)
}
