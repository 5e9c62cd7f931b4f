//! Property runs shared by the test suites and the `verify` command.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    compose_jets, map_jets, phi_sym, prolonged_action, prolonged_action_chain, xi_sym, ActionError,
    GroupJet,
};
use crate::expr::{Expr, Mono, Poly, Symbol, Q};
use crate::vfield::{prolong, VectorField};

fn small(rng: &mut ChaCha8Rng, bound: i64) -> Q {
    Q::new(
        rng.gen_range(-bound..=bound).into(),
        rng.gen_range(1..=3).into(),
    )
}

/// Random ξ(x), φ(x, u) of total degree ≤ `deg` with small rational coefficients.
pub fn random_map(rng: &mut ChaCha8Rng, deg: u32) -> (Expr, Expr) {
    let mut xi = Vec::new();
    for i in 0..=deg {
        xi.push((Mono::var(Symbol::X, i), small(rng, 3)));
    }
    let mut phi = Vec::new();
    for i in 0..=deg {
        for j in 0..=deg - i {
            phi.push((
                Mono::var(Symbol::X, i).mul(&Mono::var(Symbol::U, j)),
                small(rng, 3),
            ));
        }
    }
    (
        Expr::from_poly(Poly::from_terms(xi)),
        Expr::from_poly(Poly::from_terms(phi)),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupLawReport {
    pub trials: usize,
    pub exact: usize,
    pub failures: Vec<String>,
}

impl GroupLawReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.exact == self.trials
    }
}

fn act(g: &GroupJet<Q>, z: &[Q; 5]) -> Result<[Q; 5], ActionError> {
    let a = prolonged_action(&g.to_expr(), None)?;
    let b: BTreeMap<Symbol, Q> = [Symbol::X, Symbol::U, Symbol::P, Symbol::Q, Symbol::R]
        .into_iter()
        .zip(z.iter().cloned())
        .collect();
    let mut out = Vec::new();
    for (k, l) in a.iter().enumerate() {
        // X and U are stored as values already
        let v = if k < 2 {
            l.value.constant_value().unwrap()
        } else {
            l.value
                .eval(&b)
                .map_err(|e| ActionError::Algebra(e.to_string()))?
        };
        out.push(v);
    }
    Ok(out.try_into().unwrap())
}

/// `pairs` random map pairs, each composed at `points` random jets.
pub fn group_law(seed: u64, pairs: usize, points: usize) -> GroupLawReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = GroupLawReport {
        trials: 0,
        exact: 0,
        failures: Vec::new(),
    };
    for pair in 0..pairs {
        let (xi1, phi1) = random_map(&mut rng, 3);
        let (xi2, phi2) = random_map(&mut rng, 3);
        let mut done = 0;
        let mut tries = 0;
        while done < points && tries < 50 * points {
            tries += 1;
            let z: [Q; 5] = std::array::from_fn(|_| small(&mut rng, 5));
            let Ok(g1) = map_jets(&xi1, &phi1, &z[0], &z[1], 3) else {
                continue;
            };
            let Ok(z1) = act(&g1, &z) else { continue };
            let Ok(g2) = map_jets(&xi2, &phi2, &z1[0], &z1[1], 3) else {
                continue;
            };
            let Ok(z2) = act(&g2, &z1) else { continue };
            done += 1;
            rep.trials += 1;
            let direct = compose_jets(&g2, &g1).and_then(|g| act(&g, &z));
            match direct {
                Ok(d) if d == z2 => rep.exact += 1,
                Ok(d) => rep
                    .failures
                    .push(format!("pair {pair}: composed {d:?} vs sequential {z2:?}")),
                Err(e) => rep.failures.push(format!("pair {pair}: {e}")),
            }
        }
        if done < points {
            rep.failures
                .push(format!("pair {pair}: only {done} admissible points"));
        }
    }
    rep
}

/// Formal residuals between the helper-based and chain-rule action.
pub fn display_vs_chain() -> Vec<(String, Expr)> {
    let g = GroupJet::formal(3);
    let a = prolonged_action(&g, None).unwrap();
    let b = prolonged_action_chain(&g, None).unwrap();
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x.label.clone(), &x.value - &y.value))
        .collect()
}

/// d/dt at t = 0 of the action of (x + tα, u + tβ) on (p, q, r), minus (γ, τ, ς).
pub fn infinitesimal_residuals(v: &VectorField) -> Result<[Expr; 3], ActionError> {
    // chain rule through the formal action: Σ ∂A/∂(jet) at the identity times the jet of (α, β)
    let formal = prolonged_action(&GroupJet::formal(3), None)?;
    let id = GroupJet::identity(3).binding(3);
    let mut dirs = Vec::new();
    let mut a = v.alpha.clone();
    for i in 0..=3 {
        dirs.push((xi_sym(i), a.clone()));
        a = a.diff(Symbol::X);
    }
    let mut bi = v.beta.clone();
    for i in 0..=3 {
        let mut bj = bi.clone();
        for j in 0..=3 - i {
            dirs.push((phi_sym(i, j), bj.clone()));
            bj = bj.diff(Symbol::U);
        }
        bi = bi.diff(Symbol::X);
    }
    let alg = |e: crate::expr::ExprError| ActionError::Algebra(e.to_string());
    let first = |e: &Expr| -> Result<Expr, ActionError> {
        let mut out = Expr::zero();
        for (s, d) in &dirs {
            let de = e.diff(*s);
            if !de.is_zero() {
                out = out + de.substitute(&id).map_err(alg)? * d;
            }
        }
        Ok(out)
    };
    let pv = prolong(v);
    Ok([
        first(&formal[2].value)? - &pv.gamma,
        first(&formal[3].value)? - &pv.tau,
        first(&formal[4].value)? - &pv.varsigma,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_group_law_run() {
        let r = group_law(3, 3, 3);
        assert!(r.ok(), "{:?}", r.failures);
        assert_eq!(r.trials, 9);
    }

    #[test]
    fn chain_and_display_agree() {
        assert!(display_vs_chain().iter().all(|(_, r)| r.is_zero()));
    }

    #[test]
    fn infinitesimal_matches_prolongation() {
        let e = |s: &str| crate::parse::parse_expr(s).unwrap();
        let v = VectorField::new(e("x^3 - 2*x"), e("u^3*x + x^2*u - 4")).unwrap();
        for r in infinitesimal_residuals(&v).unwrap() {
            assert!(r.is_zero(), "{r}");
        }
    }
}
