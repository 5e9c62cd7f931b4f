use std::collections::BTreeMap;

use moframe::action::group_law;
use moframe::jet::{total_derivative_on_equation, FJet};
use moframe::series::monomials;
use moframe::vfield::{prolong, VectorField};
use moframe::{Expr, Symbol, Q};
use proptest::prelude::*;

const BASE: [Symbol; 4] = [Symbol::X, Symbol::U, Symbol::P, Symbol::Q];

/// Σ c x^a u^b p^c q^d over the listed symbols.
fn poly(syms: &'static [Symbol]) -> impl Strategy<Value = Expr> {
    prop::collection::vec((-4i64..5, prop::collection::vec(0i64..3, syms.len())), 1..5).prop_map(
        move |ts| {
            ts.into_iter().fold(Expr::zero(), |acc, (c, es)| {
                acc + syms
                    .iter()
                    .zip(es)
                    .fold(Expr::int(c), |m, (s, e)| m * Expr::sym(*s).pow(e))
            })
        },
    )
}

fn rat() -> impl Strategy<Value = Q> {
    (-9i64..10, 1i64..5).prop_map(|(n, d)| Q::new(n.into(), d.into()))
}

static XU: [Symbol; 2] = [Symbol::X, Symbol::U];
static X: [Symbol; 1] = [Symbol::X];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn total_derivative_follows_solutions(e in poly(&BASE), a in rat(), b in rat(), c in rat(), x0 in rat()) {
        // u = a + b x + c x²/2 solves u''' = 0
        let x = Expr::sym(Symbol::X);
        let half = Q::new(1.into(), 2.into());
        let u = Expr::constant(a) + Expr::constant(b.clone()) * &x + (&x * &x).scale(&(&c * &half));
        let p = Expr::constant(b) + Expr::constant(c.clone()) * &x;
        let q = Expr::constant(c);
        let curve: BTreeMap<Symbol, Expr> = [(Symbol::U, u.clone()), (Symbol::P, p.clone()), (Symbol::Q, q.clone())].into();
        let along = e.substitute(&curve).unwrap().diff(Symbol::X);
        let fjet = FJet::build(&Expr::zero(), 1).unwrap();
        let de = total_derivative_on_equation(&e, &fjet).unwrap();
        let at_x: BTreeMap<Symbol, Q> = [(Symbol::X, x0.clone())].into();
        let pt: BTreeMap<Symbol, Q> = [
            (Symbol::X, x0.clone()),
            (Symbol::U, u.eval(&at_x).unwrap()),
            (Symbol::P, p.eval(&at_x).unwrap()),
            (Symbol::Q, q.eval(&at_x).unwrap()),
        ].into();
        prop_assert_eq!(de.eval(&pt).unwrap(), along.eval(&at_x).unwrap());
    }

    #[test]
    fn fjet_cross_partials_agree(f in poly(&BASE)) {
        let fjet = FJet::build(&f, 3).unwrap();
        for m in monomials(2) {
            for (i, s) in BASE.iter().enumerate() {
                let mut n = *m;
                n[i] += 1;
                prop_assert_eq!(fjet.partial(&n).unwrap(), &fjet.partial(m).unwrap().diff(*s));
            }
        }
    }

    #[test]
    fn prolongation_is_linear(a1 in poly(&X), b1 in poly(&XU), a2 in poly(&X), b2 in poly(&XU), k in -5i64..6) {
        let v1 = VectorField::new(a1, b1).unwrap();
        let v2 = VectorField::new(a2, b2).unwrap();
        let k = Expr::int(k);
        prop_assert_eq!(prolong(&v1.add(&v2)), prolong(&v1).add(&prolong(&v2)));
        prop_assert_eq!(prolong(&v1.scale(&k)), prolong(&v1).scale(&k));
    }

    #[test]
    fn brackets_stay_in_the_class(a1 in poly(&X), b1 in poly(&XU), a2 in poly(&X), b2 in poly(&XU)) {
        let w = VectorField::new(a1, b1).unwrap().bracket(&VectorField::new(a2, b2).unwrap());
        prop_assert!(w.alpha.diff(Symbol::U).is_zero());
        prop_assert!(VectorField::new(w.alpha, w.beta).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn group_law_on_random_seeds(seed in any::<u64>()) {
        let r = group_law(seed, 2, 3);
        prop_assert!(r.ok(), "{:?}", r.failures);
    }
}
