//! Lifted invariants by truncated Taylor series around a jet point.
//!
//! ξ and φ are expanded in (s_x, s_u); p, q are p0 + s_p, q0 + s_q. The
//! lifted P, Q, R become series in s, the Jacobian of (X, U, P, Q) is lower
//! triangular, and D_X, .., D_Q act through its inverse. Each application
//! costs one order of truncation, so order n gives every word of length ≤ n.

use std::cell::RefCell;
use std::collections::HashMap;

use super::{ActionError, GroupJet};
use crate::field::Field;
use crate::series::{factorial, Idx, Series};

const LETTERS: [char; 4] = ['X', 'U', 'P', 'Q'];

/// Counts of X, U, P, Q in a word such as "XPQ".
pub fn word_index(w: &str) -> Option<Idx> {
    let mut m = [0u8; 4];
    for c in w.chars() {
        m[LETTERS.iter().position(|&l| l == c)?] += 1;
    }
    Some(m)
}

pub fn word_label(m: &Idx) -> String {
    let mut s = String::from("R");
    if m.iter().any(|&e| e > 0) {
        s.push('_');
        for (k, &e) in m.iter().enumerate() {
            for _ in 0..e {
                s.push(LETTERS[k]);
            }
        }
    }
    s
}

pub struct TaylorLift<K: Field> {
    n: usize,
    coords: [K; 5],
    /// w[i][j] for i ≥ j: D_Zj = Σ_i w[i][j] ∂_{s_i}
    w: Vec<Vec<Option<Series<K>>>>,
    memo: RefCell<HashMap<Idx, Series<K>>>,
}

fn dx<K: Field>(a: &Series<K>, p: &Series<K>, q: &Series<K>, r: &Series<K>) -> Series<K> {
    let mut out = a.deriv(0).add(&p.mul(&a.deriv(1))).add(&q.mul(&a.deriv(2)));
    let d3 = a.deriv(3);
    if !d3.is_zero() {
        out = out.add(&r.mul(&d3));
    }
    out
}

impl<K: Field> TaylorLift<K> {
    /// `f` is the Taylor series of F at the base point; `n` the largest word length.
    pub fn new(
        g: &GroupJet<K>,
        p0: K,
        q0: K,
        f: &Series<K>,
        n: usize,
    ) -> Result<Self, ActionError> {
        if f.order() < n {
            return Err(ActionError::Algebra(format!(
                "F series of order {} is shorter than {n}",
                f.order()
            )));
        }
        let m = n + 3;
        let inv_fact = |k: usize| K::one().div(&K::from_i64(factorial(k) as i64)).unwrap();
        let xi = Series::from_coeffs(m, |e| {
            if e[0] >= 1 && e[1] + e[2] + e[3] == 0 {
                g.xi(e[0] as usize).mul(&inv_fact(e[0] as usize))
            } else {
                K::zero()
            }
        });
        let phi = Series::from_coeffs(m, |e| {
            if e[0] + e[1] >= 1 && e[2] + e[3] == 0 {
                let (i, j) = (e[0] as usize, e[1] as usize);
                g.phi(i, j).mul(&inv_fact(i)).mul(&inv_fact(j))
            } else {
                K::zero()
            }
        });
        let p = Series::var(2, p0, m);
        let q = Series::var(3, q0, m);
        let r = f.truncate(n);
        let xi1 = xi.deriv(0);
        let xinv = xi1.inv().ok_or(ActionError::XiDegenerate)?;
        if g.phi(0, 1).is_zero() {
            return Err(ActionError::PhiDegenerate);
        }
        let lp = dx(&phi, &p, &q, &r).mul(&xinv);
        let lq = dx(&lp, &p, &q, &r).mul(&xinv);
        let lr = dx(&lq, &p, &q, &r).mul(&xinv);
        let coords = [g.xi(0), g.phi(0, 0), lp.c0(), lq.c0(), lr.c0()];

        let mut w: Vec<Vec<Option<Series<K>>>> = vec![vec![None; 4]; 4];
        if n >= 1 {
            let t = n - 1;
            let rows: [Vec<Series<K>>; 4] = [
                vec![xi1.truncate(t)],
                (0..2).map(|j| phi.deriv(j).truncate(t)).collect(),
                (0..3).map(|j| lp.deriv(j).truncate(t)).collect(),
                (0..4).map(|j| lq.deriv(j).truncate(t)).collect(),
            ];
            let mut diag = Vec::new();
            for (i, row) in rows.iter().enumerate() {
                diag.push(row[i].inv().ok_or(ActionError::NonTransversal)?);
            }
            for j in 0..4 {
                w[j][j] = Some(diag[j].clone());
                for i in j + 1..4 {
                    let mut s = Series::zero(t);
                    for k in j..i {
                        if let Some(wk) = &w[k][j] {
                            s = s.add(&rows[i][k].mul(wk));
                        }
                    }
                    w[i][j] = Some(s.mul(&diag[i]).neg());
                }
            }
        }
        let mut memo = HashMap::new();
        memo.insert([0u8; 4], lr);
        Ok(TaylorLift {
            n,
            coords,
            w,
            memo: RefCell::new(memo),
        })
    }

    /// Values of (X, U, P, Q, R) at the point.
    pub fn coords(&self) -> &[K; 5] {
        &self.coords
    }

    pub fn max_len(&self) -> usize {
        self.n
    }

    fn series(&self, m: &Idx) -> Series<K> {
        if let Some(s) = self.memo.borrow().get(m) {
            return s.clone();
        }
        let k = m.iter().position(|&e| e > 0).unwrap();
        let mut parent = *m;
        parent[k] -= 1;
        let s = self.series(&parent);
        let mut out: Option<Series<K>> = None;
        for i in k..4 {
            let d = s.deriv(i);
            if d.is_zero() {
                continue;
            }
            let t = self.w[i][k].as_ref().unwrap().mul(&d);
            out = Some(match out {
                None => t,
                Some(o) => o.add(&t),
            });
        }
        let out = out.unwrap_or_else(|| Series::zero(s.order() - 1));
        self.memo.borrow_mut().insert(*m, out.clone());
        out
    }

    /// R with the word's operators applied; order within the word is irrelevant
    /// since the operators commute.
    pub fn value(&self, m: &Idx) -> Result<K, ActionError> {
        let len: usize = m.iter().map(|&e| e as usize).sum();
        if len > self.n {
            return Err(ActionError::WordTooLong { len, max: self.n });
        }
        Ok(self.series(m).c0())
    }

    pub fn word(&self, w: &str) -> Result<K, ActionError> {
        let m = word_index(w).ok_or_else(|| ActionError::Algebra(format!("bad word `{w}`")))?;
        self.value(&m)
    }
}
