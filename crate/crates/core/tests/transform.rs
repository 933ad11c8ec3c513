use maxsym::expr::{parse, Expr};
use maxsym::jet::{DiffEq, NoReduction, VectorField};
use maxsym::noether::divergence_check;
use maxsym::transform::{pushforward, transform_equation_variational, PointTransformation};
use proptest::prelude::*;

fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

/// Point maps with a nonvanishing Jacobian on a neighbourhood of generic points.
fn point_map() -> impl Strategy<Value = PointTransformation> {
    let nonzero = prop_oneof![-3i64..=-1, 1i64..=3];
    (
        nonzero.clone(),
        -2i64..=2,
        -2i64..=2,
        nonzero,
        -2i64..=2,
        -2i64..=2,
        any::<bool>(),
    )
        .prop_filter_map("singular map", |(a1, a2, a3, b1, b2, b3, exponential)| {
            let zeta = if exponential {
                p(&format!("{a1}*x + {a2}*x^2"))
            } else {
                p(&format!("{a1}*x + {a2}*x^2 + {a3}*y"))
            };
            let phi = if exponential {
                p(&format!("exp({b2}*x)*{b1}*y + {b3}*x"))
            } else {
                p(&format!("{b1}*y + {b2}*x*y + {b3}*x^2"))
            };
            PointTransformation::new(zeta, phi).ok()
        })
}

fn field() -> impl Strategy<Value = VectorField> {
    (-3i64..=3, -3i64..=3, -3i64..=3, -3i64..=3)
        .prop_map(|(a, b, c, d)| VectorField::new(p(&format!("{a} + {b}*x")), p(&format!("{c}*y + {d}*x^2"))).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn divergence_symmetries_are_preserved(map in point_map()) {
        let red = NoReduction;
        let eq = DiffEq::new(p("y3")).unwrap();
        let homogeneity = VectorField::new(Expr::zero(), p("y")).unwrap();
        prop_assert!(divergence_check(&homogeneity, &eq, &red).unwrap().holds);
        let image = pushforward(&homogeneity, &map, &red).unwrap();
        let transformed = transform_equation_variational(&eq, &map, &red).unwrap();
        let verdict = divergence_check(&image, &transformed, &red).unwrap();
        prop_assert!(verdict.holds, "{}", verdict.witness);
    }

    #[test]
    fn pushforward_is_functorial(outer in point_map(), inner in point_map(), v in field()) {
        let red = NoReduction;
        let composite = outer.compose(&inner).unwrap();
        let direct = pushforward(&v, &composite, &red).unwrap();
        let staged = pushforward(&pushforward(&v, &outer, &red).unwrap(), &inner, &red).unwrap();
        prop_assert!((&direct.xi - &staged.xi).zero_test().unwrap());
        prop_assert!((&direct.psi - &staged.psi).zero_test().unwrap());
    }
}

#[test]
fn translation_pulls_back_to_translation() {
    let map = PointTransformation::new(p("x + 2"), p("y")).unwrap();
    let v = VectorField::new(Expr::one(), Expr::zero()).unwrap();
    let image = pushforward(&v, &map, &NoReduction).unwrap();
    assert_eq!(image, v);
}
