//! Generic branch: fix φ_xu by R_XXPQ = 0 and read off the fourth-order
//! invariants together with their weight-free combinations.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::action::word_index;
use crate::expr::Q;
use crate::series::Idx;

use super::cascade::{residual_defaults, solve, Param, PointData};
use super::{FrameError, QS};

/// Words reported in the generic branch.
pub const GENERIC_WORDS: [&str; 4] = ["XXXQ", "XXUQ", "XXPQ", "XXQQ"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenericExtras {
    #[serde(rename = "phi_xu")]
    pub phi11: QS,
    #[serde(rename = "R_XPQ")]
    pub r_xpq: QS,
    #[serde(rename = "R_XXQ")]
    pub r_xxq: QS,
    /// (label, R_w, J_w)
    pub words: Vec<(String, QS, QS)>,
}

impl GenericExtras {
    pub fn j(&self, label: &str) -> Option<&Q> {
        self.words.iter().find(|w| w.0 == label).map(|w| &w.2 .0)
    }

    pub fn absolute(&self) -> Vec<(String, Q)> {
        self.words
            .iter()
            .map(|w| (format!("J_{}", &w.0[2..]), w.2 .0.clone()))
            .collect()
    }
}

/// Exponents (A, B) for which R_w^3 · R_XPQ^(3B) · R_XXQ^(A−B) is absolute.
pub fn absolute_weight(m: &Idx) -> (i64, i64) {
    let [a, b, c, d] = m.map(|e| e as i64);
    (-3 - a + c + 2 * d, 1 - b - c - d)
}

fn qpow(x: &Q, e: i64) -> Result<Q, FrameError> {
    if e < 0 && x.is_zero() {
        return Err(FrameError::NotGeneric(
            "negative power of a vanishing invariant".into(),
        ));
    }
    let mut out = Q::one();
    for _ in 0..e.unsigned_abs() {
        out *= x;
    }
    Ok(if e < 0 { out.recip() } else { out })
}

pub fn absolute_value(m: &Idx, r: &Q, r_xpq: &Q, r_xxq: &Q) -> Result<Q, FrameError> {
    let (a, b) = absolute_weight(m);
    Ok(qpow(r, 3)? * qpow(r_xpq, 3 * b)? * qpow(r_xxq, a - b)?)
}

fn xxpq_at(
    data: &PointData<Q>,
    t: &Q,
) -> Result<(Q, std::collections::BTreeMap<Param, Q>), FrameError> {
    let s = solve(data, &residual_defaults(t.clone()))?;
    let lift = data
        .lift(&s.vals)
        .map_err(|e| FrameError::Action(e.to_string()))?;
    let v = lift
        .word("XXPQ")
        .map_err(|e| FrameError::Action(e.to_string()))?;
    Ok((v, s.vals))
}

pub(crate) fn generic_extras(data: &PointData<Q>) -> Result<GenericExtras, FrameError> {
    if data.n < 4 {
        return Err(FrameError::Internal(
            "generic branch needs words of length 4".into(),
        ));
    }
    let (a, _) = xxpq_at(data, &Q::zero())?;
    let (a1, _) = xxpq_at(data, &Q::one())?;
    let b = &a1 - &a;
    if b.is_zero() {
        return Err(FrameError::NotGeneric(
            "R_XXPQ does not move with phi_xu".into(),
        ));
    }
    let two = Q::from_integer(2.into());
    let (a2, _) = xxpq_at(data, &two)?;
    if a2 != &a + &b * &two {
        return Err(FrameError::Internal(
            "R_XXPQ is not affine in phi_xu".into(),
        ));
    }
    let t = -&a / &b;
    let (zero, vals) = xxpq_at(data, &t)?;
    if !zero.is_zero() {
        return Err(FrameError::Internal("R_XXPQ normalization missed".into()));
    }
    let lift = data
        .lift(&vals)
        .map_err(|e| FrameError::Action(e.to_string()))?;
    let w = |s: &str| lift.word(s).map_err(|e| FrameError::Action(e.to_string()));
    let (r_xpq, r_xxq) = (w("XPQ")?, w("XXQ")?);
    let mut words = Vec::new();
    for s in GENERIC_WORDS {
        let m = word_index(s).unwrap();
        let r = w(s)?;
        let j = absolute_value(&m, &r, &r_xpq, &r_xxq)?;
        words.push((format!("R_{s}"), QS(r), QS(j)));
    }
    Ok(GenericExtras {
        phi11: QS(t),
        r_xpq: QS(r_xpq),
        r_xxq: QS(r_xxq),
        words,
    })
}
