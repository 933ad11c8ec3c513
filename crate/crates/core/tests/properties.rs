use std::collections::HashMap;

use maxsym::expr::{parse, Atom, Expr};
use maxsym::jet::{
    euler_expr, frechet, frechet_adjoint, inverse_total_derivative, total_derivative, NoReduction, VectorField,
};
use proptest::prelude::*;

const VARS: [&str; 4] = ["x", "y", "y1", "y2"];

type Term = (i64, [u8; 4]);

fn term_expr((c, e): &Term) -> Expr {
    let mut t = Expr::int(*c);
    for (name, k) in VARS.iter().zip(e) {
        t = &t * &parse(name).unwrap().pow_i(*k as i64);
    }
    t
}

fn poly(terms: &[Term]) -> Expr {
    terms.iter().fold(Expr::zero(), |acc, t| &acc + &term_expr(t))
}

fn term() -> impl Strategy<Value = Term> {
    (-6i64..=6, [0u8..3, 0u8..3, 0u8..3, 0u8..3])
}

fn polynomial() -> impl Strategy<Value = Expr> {
    prop::collection::vec(term(), 1..6).prop_map(|t| poly(&t))
}

/// Polynomial times an optional elementary or rational factor.
fn differential_function() -> impl Strategy<Value = Expr> {
    let factors = prop_oneof![
        Just("1"),
        Just("exp(x)"),
        Just("(1 + y1^2)^(-1)"),
        Just("(2 + x^2)^(1/2)"),
        Just("y^(-2)"),
    ];
    (polynomial(), factors).prop_map(|(p, f)| &p * &parse(f).unwrap())
}

fn point_function() -> impl Strategy<Value = Expr> {
    prop::collection::vec((-4i64..=4, [0u8..3, 0u8..3, 0u8..1, 0u8..1]), 1..4).prop_map(|t| poly(&t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn euler_annihilates_total_derivatives(f in differential_function()) {
        let e = euler_expr(&total_derivative(&f, 1), &NoReduction);
        prop_assert!(e.zero_test().unwrap(), "E(D_x f) = {e}");
    }

    #[test]
    fn inverse_total_derivative_round_trip(f in polynomial()) {
        let d = total_derivative(&f, 1);
        let g = inverse_total_derivative(&d).unwrap();
        prop_assert!((&total_derivative(&g, 1) - &d).zero_test().unwrap());
    }

    #[test]
    fn print_parse_round_trip(f in differential_function()) {
        let printed = f.to_string();
        prop_assert_eq!(parse(&printed).unwrap(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn frechet_identity(delta in polynomial(), q in polynomial()) {
        let lhs = euler_expr(&(&q * &delta), &NoReduction);
        let rhs = &frechet_adjoint(&delta, &q) + &frechet_adjoint(&q, &delta);
        prop_assert!((&lhs - &rhs).zero_test().unwrap());
    }

    #[test]
    fn adjoint_differs_by_a_divergence(delta in polynomial(), q in polynomial(), r in polynomial()) {
        let d = &(&r * &frechet(&delta, &q)) - &(&q * &frechet_adjoint(&delta, &r));
        prop_assert!(euler_expr(&d, &NoReduction).zero_test().unwrap());
    }

    #[test]
    fn prolongation_is_linear(
        a in point_function(), b in point_function(), c in point_function(), d in point_function(),
        s in -3i64..=3, t in -3i64..=3,
    ) {
        let v = VectorField::new(a, b).unwrap();
        let w = VectorField::new(c, d).unwrap();
        let combo = v.scale(&Expr::int(s)).add(&w.scale(&Expr::int(t)));
        let (pv, pw, pc) = (v.prolong(3), w.prolong(3), combo.prolong(3));
        for k in 0..pc.len() {
            let expected = &(&Expr::int(s) * &pv[k]) + &(&Expr::int(t) * &pw[k]);
            prop_assert!((&pc[k] - &expected).zero_test().unwrap());
        }
    }

    #[test]
    fn partial_derivatives_commute(f in differential_function()) {
        let atoms = [Atom::X, Atom::Jet(0), Atom::Jet(1), Atom::Jet(2)];
        for a in &atoms {
            for b in &atoms {
                let ab = f.partial(a).partial(b);
                let ba = f.partial(b).partial(a);
                prop_assert!((&ab - &ba).zero_test().unwrap());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Canonical zero test against a dense-coefficient oracle; half of the
    /// cases cancel completely by construction.
    #[test]
    fn zero_test_agrees_with_dense_oracle(
        terms in prop::collection::vec(term(), 1..8),
        cancel in any::<bool>(),
        shuffle in any::<u64>(),
        drop in 0usize..8,
    ) {
        let mut negated: Vec<Term> = terms.iter().map(|(c, e)| (-c, *e)).collect();
        let n = negated.len();
        negated.rotate_left((shuffle as usize) % n);
        if !cancel {
            negated.remove(drop % n);
        }
        let mut dense: HashMap<[u8; 4], i64> = HashMap::new();
        for (c, e) in terms.iter().chain(&negated) {
            *dense.entry(*e).or_default() += c;
        }
        let oracle = dense.values().all(|c| *c == 0);
        let e = &poly(&terms) + &poly(&negated);
        prop_assert_eq!(e.zero_test().unwrap(), oracle);
        prop_assert_eq!(e.is_zero_literal(), oracle);
    }
}
