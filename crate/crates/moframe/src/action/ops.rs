//! Symbolic lifted operators D_X, D_U, D_P, D_Q over formal group jets.

use std::collections::HashMap;

use parking_lot::RwLock;

use super::{group_jet_index, helpers, phi_sym, xi_sym, ActionError, GroupJet, LiftedExpr};
use crate::expr::{with_size_cap, Expr, Symbol};
use crate::jet::{fjet_index, fjet_symbol, FJet};

use super::taylor::{word_index, word_label};

/// ∂ along base coordinate k on functions of (x, u, p, q), with group jets
/// depending on (x, u) and F-jet symbols on all four.
fn partial(e: &Expr, k: usize) -> Expr {
    let base = Symbol::base();
    e.derive_with(&|s| {
        if let Some(i) = base.iter().position(|&b| b == s) {
            return Some(if i == k { Expr::one() } else { Expr::zero() });
        }
        if let Some(mut m) = fjet_index(s) {
            m[k] += 1;
            return Some(Expr::sym(fjet_symbol(&m)));
        }
        let (is_xi, i, j) = group_jet_index(s)?;
        Some(match (is_xi, k) {
            (true, 0) => Expr::sym(xi_sym(i + 1)),
            (false, 0) => Expr::sym(phi_sym(i + 1, j)),
            (false, 1) => Expr::sym(phi_sym(i, j + 1)),
            _ => Expr::zero(),
        })
    })
}

pub struct LiftedOperators {
    g: GroupJet,
    /// lifted X, U, P, Q, R (r → F) over formal group jets
    coords: [Expr; 5],
    /// d[j][i]: D_Zj = Σ_i d[j][i] ∂_i
    d: [[Expr; 4]; 4],
    pub max_len: usize,
    cache: RwLock<HashMap<String, Expr>>,
}

pub fn lifted_operators(g: &GroupJet, fjet: &FJet) -> Result<LiftedOperators, ActionError> {
    let f = GroupJet::formal(3);
    let h = helpers(&f);
    let x1 = f.xi(1);
    let r = (-(&h.chi / x1.pow(5)))
        .subs(Symbol::R, fjet.f())
        .map_err(|e| ActionError::Algebra(e.to_string()))?;
    let coords = [f.xi(0), f.phi(0, 0), &h.delta / &x1, &h.psi / x1.pow(3), r];
    // m[i][j] = ∂_i Z_j, upper triangular
    let m: Vec<Vec<Expr>> = (0..4)
        .map(|i| (0..4).map(|j| partial(&coords[j], i)).collect())
        .collect();
    let z = Expr::zero;
    let mut d: [[Expr; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| z()));
    for j in (0..4).rev() {
        let inv = m[j][j].inv().map_err(|_| ActionError::NonTransversal)?;
        let mut row: [Expr; 4] = std::array::from_fn(|_| z());
        row[j] = Expr::one();
        for k in j + 1..4 {
            for i in 0..4 {
                row[i] = &row[i] - &m[j][k] * &d[k][i];
            }
        }
        for (i, v) in row.iter().enumerate() {
            d[j][i] = v * &inv;
        }
    }
    Ok(LiftedOperators {
        g: g.clone(),
        coords,
        d,
        max_len: 4,
        cache: RwLock::new(HashMap::new()),
    })
}

impl LiftedOperators {
    /// D_Zj applied to an expression over formal group jets.
    pub fn apply(&self, j: usize, e: &Expr) -> Expr {
        let mut out = Expr::zero();
        for i in 0..4 {
            if !self.d[j][i].is_zero() {
                out = out + &self.d[j][i] * partial(e, i);
            }
        }
        out
    }

    /// Formal lifted X, U, P, Q, R.
    pub fn formal_coords(&self) -> &[Expr; 5] {
        &self.coords
    }

    /// Substitutes the group jet this family was built for.
    pub fn specialize(&self, e: &Expr, order: usize) -> Result<Expr, ActionError> {
        e.substitute(&self.g.binding(order))
            .map_err(|e| ActionError::Algebra(e.to_string()))
    }

    /// Formal R_word, leftmost letter applied last; cached by word.
    pub fn formal_invariant(&self, word: &str) -> Result<Expr, ActionError> {
        if word.chars().count() > self.max_len {
            return Err(ActionError::WordTooLong {
                len: word.chars().count(),
                max: self.max_len,
            });
        }
        if word_index(word).is_none() {
            return Err(ActionError::Algebra(format!("bad word `{word}`")));
        }
        if let Some(e) = self.cache.read().get(word) {
            return Ok(e.clone());
        }
        let v = match word.chars().next() {
            None => self.coords[4].clone(),
            Some(c) => {
                let inner = self.formal_invariant(&word[c.len_utf8()..])?;
                let j = "XUPQ".find(c).unwrap();
                with_size_cap(crate::expr::cap::limit(), || self.apply(j, &inner))
                    .map_err(|_| ActionError::SizeCap)?
            }
        };
        self.cache
            .write()
            .entry(word.to_string())
            .or_insert(v.clone());
        Ok(v)
    }
}

pub fn lifted_invariant(ops: &LiftedOperators, word: &str) -> Result<LiftedExpr, ActionError> {
    let formal = ops.formal_invariant(word)?;
    let value = ops.specialize(&formal, 3 + word.len())?;
    Ok(LiftedExpr {
        label: word_label(&word_index(word).unwrap()),
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expr;

    fn e(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn duality() {
        let ops = lifted_operators(&GroupJet::formal(3), &FJet::formal(0)).unwrap();
        for j in 0..4 {
            for k in 0..4 {
                let v = ops.apply(j, &ops.formal_coords()[k]);
                assert_eq!(
                    v,
                    if j == k { Expr::one() } else { Expr::zero() },
                    "D{j} Z{k}"
                );
            }
        }
    }

    #[test]
    fn identity_examples() {
        let id = GroupJet::identity(6);
        let ops = lifted_operators(&id, &FJet::build(&Expr::zero(), 2).unwrap()).unwrap();
        let x = ops.formal_coords()[0].clone();
        assert!(ops.specialize(&ops.apply(0, &x), 3).unwrap().is_one());
        assert!(ops.apply(1, &x).is_zero());
        assert!(lifted_invariant(&ops, "Q").unwrap().value.is_zero());

        let ops = lifted_operators(&id, &FJet::build(&e("q^2"), 2).unwrap()).unwrap();
        assert_eq!(lifted_invariant(&ops, "Q").unwrap().value, e("2*q"));
        assert_eq!(lifted_invariant(&ops, "").unwrap().label, "R");

        let ops = lifted_operators(&id, &FJet::formal(2)).unwrap();
        let rq = lifted_invariant(&ops, "Q").unwrap();
        assert_eq!(rq.value, Expr::sym(Symbol::lookup("F_q").unwrap()));
    }

    #[test]
    fn long_words_rejected() {
        let ops = lifted_operators(&GroupJet::identity(3), &FJet::formal(0)).unwrap();
        assert!(matches!(
            ops.formal_invariant("XXXXX"),
            Err(ActionError::WordTooLong { .. })
        ));
    }
}
