use moframe::action::{phi_sym, xi_sym};
use moframe::forms::{DiffForm, Gen};
use moframe::{Expr, Symbol};
use proptest::prelude::*;

fn atom() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0usize..4).prop_map(|k| Expr::sym([Symbol::X, Symbol::U, Symbol::P, Symbol::Q][k])),
        (1usize..4).prop_map(|k| Expr::sym(xi_sym(k))),
        (0usize..3, 0usize..3).prop_map(|(i, j)| Expr::sym(phi_sym(i, j))),
        (-3i64..4).prop_map(Expr::int),
    ]
}

fn coeff() -> impl Strategy<Value = Expr> {
    prop::collection::vec((atom(), atom(), 1i64..3), 1..4).prop_map(|ts| {
        ts.into_iter()
            .fold(Expr::zero(), |acc, (a, b, n)| acc + a * b.pow(n))
    })
}

fn gen() -> impl Strategy<Value = Gen> {
    prop_oneof![
        (0u8..4).prop_map(Gen::Coord),
        (0u8..3).prop_map(Gen::XiC),
        (0u8..2, 0u8..2).prop_map(|(i, j)| Gen::PhiC(i, j)),
    ]
}

fn form(degree: usize) -> impl Strategy<Value = DiffForm> {
    prop::collection::vec((coeff(), prop::collection::vec(gen(), degree)), 1..4).prop_map(
        move |ts| {
            ts.into_iter().fold(DiffForm::zero(degree), |acc, (c, g)| {
                acc.add(&DiffForm::term(c, &g))
            })
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn d_squared_vanishes(w in (0usize..3).prop_flat_map(form)) {
        let dd = w.d().unwrap().d().unwrap();
        prop_assert!(dd.is_zero(), "{}", dd);
    }

    #[test]
    fn leibniz(a in form(1), b in form(0)) {
        let lhs = a.wedge(&b).d().unwrap();
        let rhs = a.d().unwrap().wedge(&b).sub(&a.wedge(&b.d().unwrap()));
        prop_assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn leibniz_even(a in form(0), b in form(1)) {
        let lhs = a.wedge(&b).d().unwrap();
        let rhs = a.d().unwrap().wedge(&b).add(&a.wedge(&b.d().unwrap()));
        prop_assert!(lhs.sub(&rhs).is_zero());
    }
}
