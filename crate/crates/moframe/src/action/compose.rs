//! Jets of composed maps by series composition (Faà di Bruno).

use std::collections::BTreeMap;

use super::{ActionError, GroupJet};
use crate::expr::Q;
use crate::field::Field;
use crate::series::{factorial, Series};

/// Taylor series of ξ - ξ(x0) and φ - φ(x0, u0) in (s_x, s_u).
fn series_of(g: &GroupJet<Q>, n: usize) -> (Series<Q>, Series<Q>) {
    let f = |k: usize| Q::from_i64(factorial(k) as i64);
    let xi = Series::from_coeffs(n, |e| {
        if e[0] >= 1 && e[1] + e[2] + e[3] == 0 {
            g.xi(e[0] as usize) / f(e[0] as usize)
        } else {
            Q::zero()
        }
    });
    let phi = Series::from_coeffs(n, |e| {
        if e[0] + e[1] >= 1 && e[2] + e[3] == 0 {
            g.phi(e[0] as usize, e[1] as usize) / (f(e[0] as usize) * f(e[1] as usize))
        } else {
            Q::zero()
        }
    });
    (xi, phi)
}

/// A(t0, t1) with t0 = a, t1 = b (both without constant term).
fn substitute(a: &Series<Q>, t0: &Series<Q>, t1: &Series<Q>) -> Series<Q> {
    let n = a.order();
    let mut pw0 = vec![Series::constant(Q::one(), n)];
    let mut pw1 = vec![Series::constant(Q::one(), n)];
    for k in 1..=n {
        pw0.push(pw0[k - 1].mul(t0));
        pw1.push(pw1[k - 1].mul(t1));
    }
    let mut out = Series::zero(n);
    for i in 0..=n {
        for j in 0..=n - i {
            let c = a.coeff(&[i as u8, j as u8, 0, 0]);
            if !c.is_zero() {
                out = out.add(&pw0[i].mul(&pw1[j]).scale(&c));
            }
        }
    }
    out
}

fn jets_of(
    xi0: Q,
    phi0: Q,
    xi: &Series<Q>,
    phi: &Series<Q>,
    n: usize,
) -> Result<GroupJet<Q>, ActionError> {
    let mut xs = BTreeMap::from([(0, xi0)]);
    let mut ps = BTreeMap::from([((0, 0), phi0)]);
    for i in 1..=n {
        xs.insert(i, xi.derivative_at_zero(&[i as u8, 0, 0, 0]));
    }
    for i in 0..=n {
        for j in 0..=n - i {
            if i + j > 0 {
                ps.insert((i, j), phi.derivative_at_zero(&[i as u8, j as u8, 0, 0]));
            }
        }
    }
    GroupJet::new(xs, ps, n)
}

/// Jets of g2 ∘ g1 at a point, given the jets of g1 there and of g2 at its image.
pub fn compose_jets(g2: &GroupJet<Q>, g1: &GroupJet<Q>) -> Result<GroupJet<Q>, ActionError> {
    let n = g1.order.min(g2.order);
    let (a1, b1) = series_of(g1, n);
    let (a2, b2) = series_of(g2, n);
    let xi = substitute(&a2, &a1, &Series::zero(n));
    let phi = substitute(&b2, &a1, &b1);
    jets_of(g2.xi(0), g2.phi(0, 0), &xi, &phi, n)
}

/// Jets of an explicit map at a rational point (x0, u0).
pub fn map_jets(
    xi: &crate::Expr,
    phi: &crate::Expr,
    x0: &Q,
    u0: &Q,
    order: usize,
) -> Result<GroupJet<Q>, ActionError> {
    let b = [
        (crate::Symbol::X, x0.clone()),
        (crate::Symbol::U, u0.clone()),
    ]
    .into_iter()
    .collect();
    GroupJet::from_map(xi, phi, order)?.eval_at(&b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{q, qi};
    use crate::parse::parse_expr;

    #[test]
    fn composition_matches_substitution() {
        let (xi1, phi1) = (
            parse_expr("x + x^2").unwrap(),
            parse_expr("u*x + u^2 + 1").unwrap(),
        );
        let (xi2, phi2) = (
            parse_expr("2*x - x^3").unwrap(),
            parse_expr("x*u + u^3").unwrap(),
        );
        let (x0, u0) = (q(1, 3), qi(2));
        let g1 = map_jets(&xi1, &phi1, &x0, &u0, 4).unwrap();
        let g2 = map_jets(&xi2, &phi2, &g1.xi(0), &g1.phi(0, 0), 4).unwrap();
        let direct = {
            let b = [
                (crate::Symbol::X, xi1.clone()),
                (crate::Symbol::U, phi1.clone()),
            ]
            .into_iter()
            .collect();
            let xi = xi2.substitute(&b).unwrap();
            let phi = phi2.substitute(&b).unwrap();
            map_jets(&xi, &phi, &x0, &u0, 4).unwrap()
        };
        assert_eq!(compose_jets(&g2, &g1).unwrap(), direct);
    }
}
