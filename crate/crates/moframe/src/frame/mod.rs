//! The moving frame: pointwise normalization of the group jets, the three
//! fundamental invariants, branching, and the linearizability verdict.

pub mod cascade;
mod equiv;
mod generic;
mod symbolic;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::action::word_index;
use crate::expr::Q;
use crate::field::Field;
use crate::jet::{FJet, JetError, JetPoint, Sampler};

pub use cascade::{cascade, Equation, Param, PointData, Solved};
pub use equiv::{
    equivalence_signature, map_point, transform_equation, EquivalenceReport, Signature,
};
pub use generic::{absolute_weight, GenericExtras};
pub use symbolic::{symbolic_invariants, SymbolicInvariants, SYMBOLIC_ORDER};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("degenerate point: {equation} ({stage}) has no usable pivot")]
    Degenerate { stage: String, equation: String },
    #[error("no admissible point for slot {slot} after {tries} attempts")]
    RetriesExhausted { slot: usize, tries: usize },
    #[error("generic normalization failed: {0}")]
    NotGeneric(String),
    #[error("budget exceeded")]
    BudgetExceeded,
    #[error("map hint rejected: {0}")]
    Hint(String),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("{0}")]
    Action(String),
    #[error("internal: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Branch {
    Generic,
    WunschmannFlat,
    NonGeneric(String),
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Generic => write!(f, "generic"),
            Branch::WunschmannFlat => write!(f, "wunschmann-flat"),
            Branch::NonGeneric(d) => write!(f, "non-generic({d})"),
        }
    }
}

impl Serialize for Branch {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Linearizable,
    NotLinearizable,
    NonGenericPartial,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Linearizable => "linearizable",
            Verdict::NotLinearizable => "not-linearizable",
            Verdict::NonGenericPartial => "non-generic-partial",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Pointwise,
    Symbolic,
}

pub fn qstr(q: &Q) -> String {
    q.to_string()
}

fn ser_q<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&qstr(q))
}

fn ser_point<S: Serializer>(p: &JetPoint, s: S) -> Result<S::Ok, S::Error> {
    let v: BTreeMap<&str, String> = ["x", "u", "p", "q"]
        .into_iter()
        .zip(p.base.iter().map(qstr))
        .collect();
    v.serialize(s)
}

/// R_QQ, R_XPQ, R_XXQ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fundamental<K: Serialize = QS> {
    #[serde(rename = "R_QQ")]
    pub r_qq: K,
    #[serde(rename = "R_XPQ")]
    pub r_xpq: K,
    #[serde(rename = "R_XXQ")]
    pub r_xxq: K,
}

/// A rational that serializes as an exact fraction string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct QS(pub Q);

impl Serialize for QS {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ser_q(&self.0, s)
    }
}

impl Fundamental<QS> {
    pub fn all_zero(&self) -> bool {
        Field::is_zero(&self.r_qq.0)
            && Field::is_zero(&self.r_xpq.0)
            && Field::is_zero(&self.r_xxq.0)
    }

    pub fn values(&self) -> [&Q; 3] {
        [&self.r_qq.0, &self.r_xpq.0, &self.r_xxq.0]
    }
}

pub fn branch_of(f: &Fundamental<QS>) -> Branch {
    let [qq, xpq, xxq] = f.values();
    if f.all_zero() {
        Branch::WunschmannFlat
    } else if !Field::is_zero(qq) {
        Branch::NonGeneric("R_QQ != 0".into())
    } else if Field::is_zero(xpq) {
        Branch::NonGeneric("R_XPQ = 0".into())
    } else if Field::is_zero(xxq) {
        Branch::NonGeneric("R_XXQ = 0".into())
    } else {
        Branch::Generic
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameSolution {
    /// group jet name → value
    pub solved: BTreeMap<String, QS>,
    #[serde(rename = "residual-parameters")]
    pub residual_parameters: Vec<String>,
    /// equation label → parameter name it eliminated
    pub eliminated: Vec<(String, String)>,
    #[serde(serialize_with = "ser_point")]
    pub point: JetPoint,
    pub branch: Branch,
    pub fundamental: Fundamental,
    /// every cascade equation re-evaluated at the solution
    #[serde(rename = "cross-section")]
    pub cross_section: Vec<(String, QS)>,
    #[serde(skip)]
    pub vals: BTreeMap<Param, Q>,
}

impl FrameSolution {
    pub fn residuals_exact(&self) -> bool {
        self.cross_section.iter().all(|(_, v)| Field::is_zero(&v.0))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FrameConfig {
    pub points: usize,
    pub seed: u64,
    /// longest operator word (4 gives the generic-branch invariants)
    pub order: usize,
    pub retries: usize,
    pub threads: usize,
}

impl Default for FrameConfig {
    fn default() -> Self {
        FrameConfig {
            points: 10,
            seed: 0,
            order: 4,
            retries: 32,
            threads: std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
        }
    }
}

/// Lifted values at a solved frame.
fn fundamentals(data: &PointData<Q>, vals: &BTreeMap<Param, Q>) -> Result<Fundamental, FrameError> {
    let t = data
        .lift(vals)
        .map_err(|e| FrameError::Action(e.to_string()))?;
    let w = |s: &str| {
        t.value(&word_index(s).unwrap())
            .map(QS)
            .map_err(|e| FrameError::Action(e.to_string()))
    };
    Ok(Fundamental {
        r_qq: w("QQ")?,
        r_xpq: w("XPQ")?,
        r_xxq: w("XXQ")?,
    })
}

pub fn point_data(fjet: &FJet, point: &JetPoint, n: usize) -> Result<PointData<Q>, FrameError> {
    if fjet.order < n || point.order() < n {
        return Err(JetError::OrderUnavailable {
            needed: n,
            available: fjet.order.min(point.order()),
        }
        .into());
    }
    Ok(PointData {
        p0: point.base[2].clone(),
        q0: point.base[3].clone(),
        f: point.taylor(n),
        n,
    })
}

/// Every cascade equation evaluated at `vals`.
pub fn cross_section_values<K: Field>(
    data: &PointData<K>,
    vals: &BTreeMap<Param, K>,
) -> Result<Vec<(String, K)>, FrameError> {
    let t = data
        .lift(vals)
        .map_err(|e| FrameError::Action(e.to_string()))?;
    cascade()
        .into_iter()
        .filter(|e| e.len <= data.n)
        .map(|e| {
            Ok((
                e.label.clone(),
                cascade::eval_target(&t, e.target)
                    .map_err(|e| FrameError::Action(e.to_string()))?,
            ))
        })
        .collect()
}

pub fn solve_cross_section(
    fjet: &FJet,
    point: &JetPoint,
    max_order: usize,
) -> Result<FrameSolution, FrameError> {
    let data = point_data(fjet, point, max_order)?;
    let residual = cascade::residual_defaults(Q::zero());
    let s = cascade::solve(&data, &residual)?;
    let fundamental = if max_order >= 3 {
        fundamentals(&data, &s.vals)?
    } else {
        return Err(FrameError::Internal(
            "fundamental invariants need words of length 3".into(),
        ));
    };
    let cross_section = cross_section_values(&data, &s.vals)?
        .into_iter()
        .map(|(l, v)| (l, QS(v)))
        .collect();
    Ok(FrameSolution {
        solved: s
            .vals
            .iter()
            .map(|(p, v)| (p.name(), QS(v.clone())))
            .collect(),
        residual_parameters: residual
            .keys()
            .chain(s.free.iter())
            .map(Param::name)
            .collect(),
        eliminated: s
            .eliminated
            .iter()
            .map(|(l, p)| (l.clone(), p.name()))
            .collect(),
        point: point.clone(),
        branch: branch_of(&fundamental),
        fundamental,
        cross_section,
        vals: s.vals,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub index: usize,
    pub seed: u64,
    pub attempt: usize,
    pub frame: FrameSolution,
    #[serde(rename = "generic-extras", skip_serializing_if = "Option::is_none")]
    pub extras: Option<GenericExtras>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantReport {
    pub mode: Mode,
    pub verdict: Verdict,
    pub branch: String,
    #[serde(rename = "points-used")]
    pub points: Vec<PointReport>,
    pub stages: Vec<Equation>,
    #[serde(rename = "generic-stage-requests")]
    pub generic_requests: usize,
    #[serde(rename = "typo-ledger-version")]
    pub ledger_version: String,
}

impl InvariantReport {
    pub fn first(&self) -> Option<&PointReport> {
        self.points.first()
    }
}

fn slot_seed(seed: u64, slot: usize, attempt: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((slot as u64) << 20) ^ attempt as u64
}

fn run_slot(fjet: &FJet, cfg: &FrameConfig, slot: usize) -> Result<PointReport, FrameError> {
    let sampler = Sampler {
        retries: cfg.retries,
        ..Sampler::default()
    };
    for attempt in 0..cfg.retries {
        let seed = slot_seed(cfg.seed, slot, attempt);
        let pt = sampler.sample(fjet, &[], seed)?;
        match solve_point(fjet, &pt, cfg.order) {
            Ok((frame, extras)) => {
                return Ok(PointReport {
                    index: slot,
                    seed,
                    attempt,
                    frame,
                    extras,
                })
            }
            Err(FrameError::Degenerate { .. }) | Err(FrameError::NotGeneric(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(FrameError::RetriesExhausted {
        slot,
        tries: cfg.retries,
    })
}

/// Frame plus, in the generic branch, the fourth-order extras.
pub fn solve_point(
    fjet: &FJet,
    pt: &JetPoint,
    order: usize,
) -> Result<(FrameSolution, Option<GenericExtras>), FrameError> {
    let frame = solve_cross_section(fjet, pt, order)?;
    let extras = if frame.branch == Branch::Generic && order >= 4 {
        Some(generic::generic_extras(&point_data(fjet, pt, order)?)?)
    } else {
        None
    };
    Ok((frame, extras))
}

pub fn invariants(fjet: &FJet, cfg: &FrameConfig) -> Result<InvariantReport, FrameError> {
    if cfg.points == 0 {
        return Err(FrameError::Internal(
            "at least one point is required".into(),
        ));
    }
    let threads = cfg.threads.max(1);
    let mut results: Vec<Option<Result<PointReport, FrameError>>> =
        (0..cfg.points).map(|_| None).collect();
    for chunk in (0..cfg.points).collect::<Vec<_>>().chunks(threads) {
        if threads == 1 {
            results[chunk[0]] = Some(run_slot(fjet, cfg, chunk[0]));
            continue;
        }
        std::thread::scope(|s| {
            let hs: Vec<_> = chunk
                .iter()
                .map(|&i| (i, s.spawn(move || run_slot(fjet, cfg, i))))
                .collect();
            for (i, h) in hs {
                results[i] = Some(
                    h.join()
                        .unwrap_or_else(|_| Err(FrameError::Internal("worker panicked".into()))),
                );
            }
        });
    }
    let points: Vec<PointReport> = results
        .into_iter()
        .map(|r| r.unwrap())
        .collect::<Result<_, _>>()?;
    let flat = points
        .iter()
        .filter(|p| p.frame.branch == Branch::WunschmannFlat)
        .count();
    let verdict = if flat == points.len() {
        Verdict::Linearizable
    } else if flat == 0 {
        Verdict::NotLinearizable
    } else {
        Verdict::NonGenericPartial
    };
    let first = points[0].frame.branch.clone();
    let branch = if points.iter().all(|p| p.frame.branch == first) {
        first.to_string()
    } else {
        "mixed".to_string()
    };
    Ok(InvariantReport {
        mode: Mode::Pointwise,
        verdict,
        branch,
        generic_requests: points.iter().filter(|p| p.extras.is_some()).count(),
        points,
        stages: cascade()
            .into_iter()
            .filter(|e| e.len <= cfg.order)
            .collect(),
        ledger_version: crate::typos::version().to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{q, qi};
    use crate::parse::parse_expr;

    fn report(f: &str, points: usize) -> InvariantReport {
        let fj = FJet::build(&parse_expr(f).unwrap(), 4).unwrap();
        invariants(
            &fj,
            &FrameConfig {
                points,
                threads: 1,
                ..FrameConfig::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn zero_rhs_is_flat() {
        let r = report("0", 2);
        assert_eq!(r.verdict, Verdict::Linearizable);
        assert_eq!(r.generic_requests, 0);
        for p in &r.points {
            assert!(p.frame.residuals_exact());
        }
    }

    #[test]
    fn q_squared_is_not_flat() {
        let r = report("q^2", 2);
        assert_eq!(r.verdict, Verdict::NotLinearizable);
        assert_eq!(r.branch, "non-generic(R_QQ != 0)");
    }

    #[test]
    fn generic_pair_agrees_under_map() {
        let f = parse_expr("q*p/(x+1) + u^2").unwrap();
        let fj = FJet::build(&f, 4).unwrap();
        let z0 = JetPoint::at(&fj, [q(1, 2), q(1, 3), qi(2), qi(-1)]).unwrap();
        let (s0, e0) = solve_point(&fj, &z0, 4).unwrap();
        assert_eq!(s0.branch, Branch::Generic);
        let xi = parse_expr("x/(1+x)").unwrap();
        let phi = parse_expr("(u+x^2)/(1+x)").unwrap();
        let xi_inv = parse_expr("x/(1-x)").unwrap();
        let phi_inv = parse_expr("u*(1+x/(1-x)) - (x/(1-x))^2").unwrap();
        let g = transform_equation(&f, &xi, &phi, &xi_inv, &phi_inv).unwrap();
        let img = map_point(&xi, &phi, &z0.base, &z0.fjet[&[0, 0, 0, 0]]).unwrap();
        assert_eq!(img[..4], [q(1, 3), q(7, 18), q(47, 12), q(27, 8)]);
        let gj = FJet::build(&g, 4).unwrap();
        let z1 = JetPoint::at(
            &gj,
            [
                img[0].clone(),
                img[1].clone(),
                img[2].clone(),
                img[3].clone(),
            ],
        )
        .unwrap();
        assert_eq!(z1.fjet[&[0, 0, 0, 0]], img[4]);
        let (_, e1) = solve_point(&gj, &z1, 4).unwrap();
        assert_eq!(e0.unwrap().absolute(), e1.unwrap().absolute());
    }
}
