//! Equivalence checks between two equations, and pushing an equation
//! through an explicit map.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::action::{check_fiber_preserving, map_jets, TaylorLift};
use crate::expr::{Expr, Symbol, SymbolKind, Q};
use crate::jet::{FJet, JetPoint};
use crate::series::Series;

use super::{invariants, solve_point, Branch, FrameConfig, FrameError, InvariantReport, Verdict};

fn tmp(name: &str) -> Symbol {
    Symbol::intern(name, SymbolKind::Formal)
}

fn algebra(e: impl std::fmt::Display) -> FrameError {
    FrameError::Hint(e.to_string())
}

/// Right-hand side of the equation satisfied by U(X) when u(x) solves
/// u''' = F and X = ξ(x), U = φ(x, u). The inverse map must be supplied.
pub fn transform_equation(
    f: &Expr,
    xi: &Expr,
    phi: &Expr,
    xi_inv: &Expr,
    phi_inv: &Expr,
) -> Result<Expr, FrameError> {
    check_fiber_preserving(xi, phi).map_err(algebra)?;
    let (x, u, p, q) = (Symbol::X, Symbol::U, Symbol::P, Symbol::Q);
    let (pe, qe) = (Expr::sym(p), Expr::sym(q));
    let d = |e: &Expr| e.diff(x) + &pe * e.diff(u) + &qe * e.diff(p) + f * e.diff(q);
    let xi1 = xi.diff(x);
    let div = |a: &Expr, b: &Expr| a.checked_div(b).map_err(algebra);
    let big_p = div(&d(phi), &xi1)?;
    let big_q = div(&d(&big_p), &xi1)?;
    let big_r = div(&d(&big_q), &xi1)?;

    let (tx, tu, tp, tq) = (tmp("X~"), tmp("U~"), tmp("P~"), tmp("Q~"));
    let alpha = big_q.diff(q);
    let beta = big_q.subs(q, &Expr::zero()).map_err(algebra)?;
    let q_of = div(&(Expr::sym(tq) - beta), &alpha)?;
    let p_of = div(&(&xi1 * Expr::sym(tp) - phi.diff(x)), &phi.diff(u))?;
    let g = big_r
        .subs(q, &q_of)
        .map_err(algebra)?
        .subs(p, &p_of)
        .map_err(algebra)?;

    let to_t: BTreeMap<Symbol, Expr> = [(x, Expr::sym(tx)), (u, Expr::sym(tu))].into();
    let xs = xi_inv.substitute(&to_t).map_err(algebra)?;
    let us = phi_inv.substitute(&to_t).map_err(algebra)?;
    let g = g.substitute(&[(x, xs), (u, us)].into()).map_err(algebra)?;
    let back: BTreeMap<Symbol, Expr> = [
        (tx, Expr::sym(x)),
        (tu, Expr::sym(u)),
        (tp, Expr::sym(p)),
        (tq, Expr::sym(q)),
    ]
    .into();
    g.substitute(&back).map_err(algebra)
}

/// Image (X, U, P, Q, R) of the point z = (x, u, p, q) with u''' = r.
pub fn map_point(xi: &Expr, phi: &Expr, z: &[Q; 4], r: &Q) -> Result<[Q; 5], FrameError> {
    let g = map_jets(xi, phi, &z[0], &z[1], 3).map_err(algebra)?;
    let f = Series::constant(r.clone(), 0);
    let t = TaylorLift::new(&g, z[2].clone(), z[3].clone(), &f, 0).map_err(algebra)?;
    Ok(t.coords().clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Signature {
    NecessarilyInequivalent,
    Consistent,
    VerifiedByHint,
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Signature::NecessarilyInequivalent => "necessarily-inequivalent",
            Signature::Consistent => "consistent",
            Signature::VerifiedByHint => "verified-by-hint",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub signature: Signature,
    pub reason: String,
    #[serde(rename = "verdict-a")]
    pub verdict_a: Verdict,
    #[serde(rename = "verdict-b")]
    pub verdict_b: Verdict,
    #[serde(rename = "branch-a")]
    pub branch_a: String,
    #[serde(rename = "branch-b")]
    pub branch_b: String,
    /// points at which the hint carried A onto B (and matched J when generic)
    #[serde(rename = "hint-points")]
    pub hint_points: usize,
}

pub const HINT_MIN_POINTS: usize = 5;

fn uniform(r: &InvariantReport) -> Option<Branch> {
    let b = &r.points.first()?.frame.branch;
    r.points
        .iter()
        .all(|p| &p.frame.branch == b)
        .then(|| b.clone())
}

pub fn equivalence_signature(
    a: &Expr,
    b: &Expr,
    hint: Option<(&Expr, &Expr)>,
    cfg: &FrameConfig,
) -> Result<EquivalenceReport, FrameError> {
    let fa = FJet::build(a, cfg.order)?;
    let fb = FJet::build(b, cfg.order)?;
    let ra = invariants(&fa, cfg)?;
    let rb = invariants(&fb, cfg)?;
    let mut rep = EquivalenceReport {
        signature: Signature::Consistent,
        reason: String::new(),
        verdict_a: ra.verdict,
        verdict_b: rb.verdict,
        branch_a: ra.branch.clone(),
        branch_b: rb.branch.clone(),
        hint_points: 0,
    };
    if let (Some(ba), Some(bb)) = (uniform(&ra), uniform(&rb)) {
        if ba != bb {
            rep.signature = Signature::NecessarilyInequivalent;
            rep.reason = format!("branches differ: {ba} vs {bb}");
            return Ok(rep);
        }
    }
    let Some((xi, phi)) = hint else {
        rep.reason = "invariant classes agree; no map supplied".into();
        return Ok(rep);
    };
    check_fiber_preserving(xi, phi).map_err(algebra)?;
    let mut ok = 0;
    for pr in &ra.points {
        let z = &pr.frame.point.base;
        let fz = &pr.frame.point.fjet[&[0, 0, 0, 0]];
        let Ok(img) = map_point(xi, phi, z, fz) else {
            continue;
        };
        let base = [
            img[0].clone(),
            img[1].clone(),
            img[2].clone(),
            img[3].clone(),
        ];
        let Ok(pb) = JetPoint::at(&fb, base) else {
            continue;
        };
        if pb.fjet[&[0, 0, 0, 0]] != img[4] {
            rep.reason = format!("map does not carry A onto B at point {}", pr.index);
            return Ok(rep);
        }
        if let Some(ea) = &pr.extras {
            let (_, eb) = match solve_point(&fb, &pb, cfg.order) {
                Ok(v) => v,
                Err(FrameError::Degenerate { .. }) | Err(FrameError::NotGeneric(_)) => continue,
                Err(e) => return Err(e),
            };
            let Some(eb) = eb else {
                return Err(FrameError::Internal(
                    "image of a generic point is not generic".into(),
                ));
            };
            if ea.absolute() != eb.absolute() {
                return Err(FrameError::Internal(format!(
                    "absolute invariants differ at mapped point {}",
                    pr.index
                )));
            }
        }
        ok += 1;
    }
    rep.hint_points = ok;
    if ok >= HINT_MIN_POINTS {
        rep.signature = Signature::VerifiedByHint;
        rep.reason = format!("map carries A onto B at {ok} points");
    } else {
        rep.reason = format!("map checked at only {ok} points; {HINT_MIN_POINTS} needed");
    }
    Ok(rep)
}
