//! Test-side oracles, shared with the acceptance target.
#![allow(dead_code)]

use std::collections::BTreeMap;

use moframe::{Expr, Symbol, Q};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn x() -> Symbol {
    Symbol::X
}
fn u() -> Symbol {
    Symbol::U
}
fn p() -> Symbol {
    Symbol::P
}
fn q() -> Symbol {
    Symbol::Q
}

fn at(e: &Expr, s: Symbol, v: i64) -> Expr {
    e.subs(s, &Expr::int(v)).unwrap()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Oracle {
    /// not even linearizable; the failed condition
    NotLinear(&'static str),
    /// linear after a fiber-preserving change, with its Wilczynski invariant
    Linear { theta3: Q },
}

impl Oracle {
    pub fn flat(&self) -> bool {
        matches!(self, Oracle::Linear { theta3 } if *theta3 == Q::from_integer(0.into()))
    }
}

/// Classical test: F = A pq + B q + C3 p³ + C2 p² + C1 p + C0 with five
/// compatibility conditions makes u''' = F linearizable by X = ξ(x),
/// U = φ(x, u); the linear model w''' = a w'' + b w' + c w + d is then
/// equivalent to w''' = 0 exactly when its θ3 vanishes.
pub fn oracle(f: &Expr, x0: &Q, u0: &Q) -> Oracle {
    let d = |e: &Expr, s: Symbol| e.diff(s);
    if !d(&d(f, q()), q()).is_zero() {
        return Oracle::NotLinear("F_qq");
    }
    if !d(&d(&d(f, p()), p()), q()).is_zero() {
        return Oracle::NotLinear("F_ppq");
    }
    let a = d(&d(f, p()), q());
    let b = at(&d(f, q()), p(), 0);
    let g = at(f, q(), 0);
    let g1 = d(&g, p());
    let g2 = d(&g1, p());
    let g3 = d(&g2, p());
    if !d(&g3, p()).is_zero() {
        return Oracle::NotLinear("quartic in p");
    }
    let c0 = at(&g, p(), 0);
    let c1 = at(&g1, p(), 0);
    let c2 = at(&g2, p(), 0).scale(&Q::new(1.into(), 2.into()));
    let c3 = g3.scale(&Q::new(1.into(), 6.into()));
    let (ax, au) = (d(&a, x()), d(&a, u()));
    let axx = d(&ax, x());
    let third = Expr::frac(1, 3);
    let conds: [(&'static str, Expr); 5] = [
        ("C3", &c3 - (&au * &third - &a * &a * Expr::frac(1, 9))),
        ("B_u", d(&b, u()) - &ax),
        ("C2", &c2 - (&ax - &a * &b * &third)),
        ("C1_u", d(&c1, u()) - (&axx - Expr::frac(2, 3) * &ax * &b)),
        (
            "C0",
            Expr::int(3) * d(&d(&c0, u()), u()) - d(&(&a * &c0), u()) - d(&axx, x())
                + &b * &axx
                + &c1 * &ax,
        ),
    ];
    for (name, c) in conds {
        if !c.is_zero() {
            return Oracle::NotLinear(name);
        }
    }
    // gauge: the x-derivatives of the normalizing factor vanish at the point
    let pt: BTreeMap<Symbol, Q> = [
        (x(), x0.clone()),
        (u(), u0.clone()),
        (p(), Q::from_integer(0.into())),
        (q(), Q::from_integer(0.into())),
    ]
    .into();
    let ev = |e: &Expr| e.eval(&pt).unwrap();
    let lin_c = d(&c0, u()) - &a * &c0 * &third;
    let (a0, a1, a2) = (ev(&b), ev(&d(&b, x())), ev(&d(&d(&b, x()), x())));
    let (b0, b1) = (ev(&c1), ev(&d(&c1, x())));
    let c = ev(&lin_c);
    let k3 = Q::new(1.into(), 3.into());
    let (p1, p1d, p1dd) = (-&a0 * &k3, -&a1 * &k3, -&a2 * &k3);
    let (p2, p2d) = (-&b0 * &k3, -&b1 * &k3);
    let p3 = -c;
    let two = Q::from_integer(2.into());
    let three = Q::from_integer(3.into());
    let cap_p3 = &p3 - &three * &p1 * &p2 + &two * &p1 * &p1 * &p1 - &p1dd;
    let cap_p2d = &p2d - &two * &p1 * &p1d - &p1dd;
    let theta3 = cap_p3 - Q::new(3.into(), 2.into()) * cap_p2d;
    Oracle::Linear { theta3 }
}

fn rq(rng: &mut ChaCha8Rng, span: i64) -> Expr {
    let n = rng.gen_range(-span..=span);
    let d = rng.gen_range(1..=3);
    Expr::frac(n, d)
}

/// X = ξ(x), U = φ(x, u) with closed-form inverses: (ξ, φ, ξ⁻¹, φ⁻¹).
/// The inverse is written in x, u standing for X, U.
pub fn random_invertible_map(rng: &mut ChaCha8Rng) -> (Expr, Expr, Expr, Expr) {
    let (xs, us) = (Expr::sym(x()), Expr::sym(u()));
    let (xi, xi_inv) = if rng.gen_bool(0.5) {
        let a = loop {
            let a = rq(rng, 3);
            if !a.is_zero() {
                break a;
            }
        };
        let b = rq(rng, 2);
        (&a * &xs + &b, (&xs - &b) * a.inv().unwrap())
    } else {
        (&xs / (Expr::one() + &xs), &xs / (Expr::one() - &xs))
    };
    let mut g = Expr::zero();
    for k in 0..=3 {
        g = g + rq(rng, 2) * xs.pow(k);
    }
    let lam = Expr::one() + rq(rng, 1).pow(2);
    let c = if rng.gen_bool(0.5) {
        Expr::zero()
    } else {
        rq(rng, 1)
    };
    // φ = (λ u + g(x)) / (1 + c u)
    let phi = (&lam * &us + &g) / (Expr::one() + &c * &us);
    let g_at = g.subs(x(), &xi_inv).unwrap();
    let phi_inv = (&us - &g_at) / (&lam - &c * &us);
    (xi, phi, xi_inv, phi_inv)
}
