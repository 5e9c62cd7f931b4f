//! The normalization cascade and its block solver.
//!
//! Group jets are solved order by order. A lifted invariant R_w depends on
//! jets up to order 3 + #X + #U − #Q and is affine in the top-order ones, so
//! every block is a square linear system whose matrix is read off from unit
//! perturbations and whose solution is checked by re-evaluation.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::action::{phi_name, xi_name, ActionError, GroupJet, TaylorLift};
use crate::field::Field;
use crate::series::{Idx, Series};

use super::FrameError;

/// A group-jet parameter: ξ_{x^i} or φ_{x^i u^j}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Param {
    Xi(usize),
    Phi(usize, usize),
}

impl Param {
    pub fn order(&self) -> usize {
        match *self {
            Param::Xi(i) => i,
            Param::Phi(i, j) => i + j,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Param::Xi(i) => xi_name(i),
            Param::Phi(i, j) => phi_name(i, j),
        }
    }
}

/// What a cascade equation pins down: a lifted coordinate or an R_w.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    P,
    Q,
    R(Idx),
}

#[derive(Debug, Clone, Serialize)]
pub struct Equation {
    pub stage: &'static str,
    pub label: String,
    #[serde(skip)]
    pub target: Target,
    pub block: usize,
    /// longest operator word used
    #[serde(skip)]
    pub len: usize,
}

fn eq(stage: &'static str, w: &str, block: usize) -> Equation {
    let (target, label) = match w {
        "P" => (Target::P, "P".to_string()),
        "Q" => (Target::Q, "Q".to_string()),
        _ => {
            let m = crate::action::word_index(&w[1..]).unwrap();
            (Target::R(m), crate::action::word_label(&m))
        }
    };
    let len = if matches!(target, Target::R(_)) {
        w.len() - 1
    } else {
        0
    };
    Equation {
        stage,
        label,
        target,
        block,
        len,
    }
}

/// All equations, each set to zero; `stage` follows the cross-section grouping.
pub fn cascade() -> Vec<Equation> {
    vec![
        eq("stage-0", "P", 1),
        eq("stage-0", "Q", 2),
        eq("stage-1", "RQ", 2),
        eq("stage-2", "RPQ", 2),
        eq("stage-0", "R", 3),
        eq("stage-1", "RP", 3),
        eq("stage-2", "RUQ", 3),
        eq("stage-2", "RPPP", 3),
        eq("stage-2", "RXQ", 3),
        eq("stage-1", "RU", 4),
        eq("stage-1", "RX", 4),
        eq("stage-2", "RUP", 4),
        eq("stage-2", "RXP", 4),
        eq("stage-tail", "RUPP", 4),
        eq("stage-tail", "RUPPP", 4),
        eq("stage-tail", "RXX", 5),
        eq("stage-tail", "RXU", 5),
        eq("stage-tail", "RUU", 5),
        eq("stage-tail", "RXXP", 5),
        eq("stage-tail", "RUUP", 5),
        eq("stage-tail", "RUUPP", 5),
    ]
}

pub const TOP_BLOCK: usize = 5;

/// Parameters left free by the cascade, with their default values.
pub fn residual_defaults<K: Field>(phi11: K) -> BTreeMap<Param, K> {
    BTreeMap::from([
        (Param::Xi(1), K::one()),
        (Param::Phi(0, 1), K::one()),
        (Param::Phi(1, 1), phi11),
        (Param::Phi(0, 5), K::zero()),
    ])
}

/// Unknowns of one order, in the fixed pivot-preference order.
pub fn block_params(k: usize) -> Vec<Param> {
    let mut v = vec![Param::Xi(k)];
    for i in 0..=k {
        v.push(Param::Phi(i, k - i));
    }
    v
}

pub fn group_jet<K: Field>(vals: &BTreeMap<Param, K>) -> GroupJet<K> {
    let mut xi = BTreeMap::from([(0, K::zero())]);
    let mut phi = BTreeMap::from([((0, 0), K::zero())]);
    for (p, v) in vals {
        match *p {
            Param::Xi(i) => {
                xi.insert(i, v.clone());
            }
            Param::Phi(i, j) => {
                phi.insert((i, j), v.clone());
            }
        }
    }
    let order = vals.keys().map(Param::order).max().unwrap_or(0);
    GroupJet { xi, phi, order }
}

/// Everything the solver needs about the equation at one point.
pub struct PointData<K: Field> {
    pub p0: K,
    pub q0: K,
    pub f: Series<K>,
    /// longest word evaluated
    pub n: usize,
}

impl<K: Field> PointData<K> {
    pub fn lift(&self, vals: &BTreeMap<Param, K>) -> Result<TaylorLift<K>, ActionError> {
        TaylorLift::new(
            &group_jet(vals),
            self.p0.clone(),
            self.q0.clone(),
            &self.f,
            self.n,
        )
    }
}

pub fn eval_target<K: Field>(t: &TaylorLift<K>, target: Target) -> Result<K, ActionError> {
    match target {
        Target::P => Ok(t.coords()[2].clone()),
        Target::Q => Ok(t.coords()[3].clone()),
        Target::R(m) => t.value(&m),
    }
}

#[derive(Debug, Clone)]
pub struct Solved<K> {
    pub vals: BTreeMap<Param, K>,
    /// equation label → parameter it eliminated
    pub eliminated: Vec<(String, Param)>,
    /// parameters no equation could reach (fundamental-only mode)
    pub free: Vec<Param>,
}

fn act_err(e: ActionError) -> FrameError {
    match e {
        ActionError::SizeCap => FrameError::BudgetExceeded,
        other => FrameError::Action(other.to_string()),
    }
}

/// Solves the cascade block by block. Equations longer than `data.n` are
/// skipped; any parameter then left without a pivot is set to zero and
/// listed as free.
pub fn solve<K: Field>(
    data: &PointData<K>,
    residual: &BTreeMap<Param, K>,
) -> Result<Solved<K>, FrameError> {
    let eqs: Vec<Equation> = cascade().into_iter().filter(|e| e.len <= data.n).collect();
    let mut vals = residual.clone();
    let mut eliminated = Vec::new();
    let mut free = Vec::new();
    for k in 1..=TOP_BLOCK {
        let block: Vec<&Equation> = eqs.iter().filter(|e| e.block == k).collect();
        let unknowns: Vec<Param> = block_params(k)
            .into_iter()
            .filter(|p| !residual.contains_key(p))
            .collect();
        for u in &unknowns {
            vals.insert(*u, K::zero());
        }
        if block.is_empty() {
            free.extend(unknowns);
            continue;
        }
        let eval = |v: &BTreeMap<Param, K>| -> Result<Vec<K>, FrameError> {
            let t = data.lift(v).map_err(act_err)?;
            block
                .iter()
                .map(|e| eval_target(&t, e.target).map_err(act_err))
                .collect()
        };
        let base = eval(&vals)?;
        let mut cols = Vec::new();
        for u in &unknowns {
            let mut v = vals.clone();
            v.insert(*u, K::one());
            let r = eval(&v)?;
            cols.push(
                r.iter()
                    .zip(&base)
                    .map(|(a, b)| a.sub(b))
                    .collect::<Vec<K>>(),
            );
        }
        // rows: equations; augmented with -base
        let mut a: Vec<Vec<K>> = (0..block.len())
            .map(|i| {
                let mut row: Vec<K> = cols.iter().map(|c| c[i].clone()).collect();
                row.push(base[i].neg());
                row
            })
            .collect();
        let pivots = echelon(&mut a, unknowns.len()).map_err(|row| FrameError::Degenerate {
            stage: block[row].stage.to_string(),
            equation: block[row].label.clone(),
        })?;
        for (row, &col) in pivots.iter().enumerate() {
            vals.insert(unknowns[col], a[row][unknowns.len()].clone());
            eliminated.push((block[row].label.clone(), unknowns[col]));
        }
        for (c, u) in unknowns.iter().enumerate() {
            if !pivots.contains(&c) {
                free.push(*u);
            }
        }
        // exact re-check of this block
        let check = eval(&vals)?;
        if let Some(i) = check.iter().position(|v| !v.is_zero()) {
            return Err(FrameError::Internal(format!(
                "residual of {} nonzero after solve",
                block[i].label
            )));
        }
    }
    Ok(Solved {
        vals,
        eliminated,
        free,
    })
}

/// Gauss–Jordan on an augmented matrix with `n` unknown columns. Rows are
/// taken in order, each picking the first usable column. Returns the pivot
/// column per row, or the index of the first row that has none.
fn echelon<K: Field>(a: &mut [Vec<K>], n: usize) -> Result<Vec<usize>, usize> {
    let mut pivots: Vec<usize> = Vec::new();
    for r in 0..a.len() {
        for (pr, &pc) in pivots.iter().enumerate() {
            let f = a[r][pc].clone();
            if !f.is_zero() {
                let src = a[pr].clone();
                for (x, s) in a[r].iter_mut().zip(src.iter()) {
                    *x = x.sub(&f.mul(s));
                }
            }
        }
        let Some(c) = (0..n).find(|&c| !a[r][c].is_zero()) else {
            return Err(r);
        };
        let inv = a[r][c].inv().unwrap();
        for x in a[r].iter_mut() {
            *x = x.mul(&inv);
        }
        let src = a[r].clone();
        for (pr, _) in pivots.iter().enumerate() {
            let f = a[pr][c].clone();
            if !f.is_zero() {
                for (x, s) in a[pr].iter_mut().zip(src.iter()) {
                    *x = x.sub(&f.mul(s));
                }
            }
        }
        pivots.push(c);
    }
    Ok(pivots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{q, qi, Q};

    #[test]
    fn blocks_are_square() {
        let res = residual_defaults::<Q>(qi(0));
        for k in 1..=TOP_BLOCK {
            let eqs = cascade().into_iter().filter(|e| e.block == k).count();
            let unknowns = block_params(k)
                .into_iter()
                .filter(|p| !res.contains_key(p))
                .count();
            assert_eq!(eqs, unknowns, "block {k}");
        }
    }

    #[test]
    fn echelon_solves() {
        let mut a = vec![vec![qi(0), qi(2), qi(4)], vec![qi(1), qi(1), qi(3)]];
        let piv = echelon(&mut a, 2).unwrap();
        assert_eq!(piv, vec![1, 0]);
        assert_eq!(a[0][2], qi(2));
        assert_eq!(a[1][2], qi(1));
        let mut b = vec![vec![qi(1), qi(2), qi(0)], vec![q(1, 2), qi(1), qi(5)]];
        assert_eq!(echelon(&mut b, 2), Err(1));
    }
}
