//! The frame over rational functions of (x, u, p, q). Only words up to
//! length 3 are used, which is enough for R_QQ, R_XPQ and R_XXQ.

use serde::Serialize;

use crate::expr::{cap, Expr};
use crate::jet::FJet;
use crate::series::{idx_factorial, monomials, Series};

use super::cascade::{residual_defaults, solve, PointData};
use super::FrameError;

pub const SYMBOLIC_ORDER: usize = 3;

#[derive(Debug, Clone, Serialize)]
pub struct SymbolicInvariants {
    #[serde(rename = "R_QQ")]
    pub r_qq: String,
    #[serde(rename = "R_XPQ")]
    pub r_xpq: String,
    #[serde(rename = "R_XXQ")]
    pub r_xxq: String,
    /// group jets no length-3 equation reaches; set to zero
    pub free: Vec<String>,
    #[serde(skip)]
    pub values: [Expr; 3],
}

impl SymbolicInvariants {
    pub fn flat(&self) -> bool {
        self.values.iter().all(Expr::is_zero)
    }
}

fn taylor(fjet: &FJet, n: usize) -> Result<Series<Expr>, FrameError> {
    let mut s = Series::zero(n);
    for m in monomials(n) {
        let c = crate::expr::Q::from_integer((idx_factorial(m) as i64).into()).recip();
        s.set(m, fjet.partial(m)?.scale(&c));
    }
    Ok(s)
}

/// `budget` caps the number of terms of any polynomial built on the way.
pub fn symbolic_invariants(fjet: &FJet, budget: usize) -> Result<SymbolicInvariants, FrameError> {
    let n = SYMBOLIC_ORDER;
    let f = taylor(fjet, n)?;
    let run = || -> Result<SymbolicInvariants, FrameError> {
        let data = PointData {
            p0: Expr::sym(crate::Symbol::P),
            q0: Expr::sym(crate::Symbol::Q),
            f,
            n,
        };
        let s = solve(&data, &residual_defaults(Expr::zero()))?;
        let t = data
            .lift(&s.vals)
            .map_err(|e| FrameError::Action(e.to_string()))?;
        let w = |x: &str| t.word(x).map_err(|e| FrameError::Action(e.to_string()));
        let values = [w("QQ")?, w("XPQ")?, w("XXQ")?];
        Ok(SymbolicInvariants {
            r_qq: values[0].to_string(),
            r_xpq: values[1].to_string(),
            r_xxq: values[2].to_string(),
            free: s.free.iter().map(|p| p.name()).collect(),
            values,
        })
    };
    cap::with_size_cap(budget, run).map_err(|_| FrameError::BudgetExceeded)?
}
