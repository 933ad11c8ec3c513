use std::collections::HashMap;

use super::{Atom, Coeff, Exponent, Expr};
use num_bigint::BigInt;
use num_traits::One;

fn exponent_coeff(r: Exponent) -> Coeff {
    Coeff::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

impl Expr {
    /// Derivation extending `base` (derivatives of plain atoms; `None` means
    /// zero) to the whole expression by linearity, Leibniz and chain rules.
    pub fn derive_with(&self, base: &dyn Fn(&Atom) -> Option<Expr>) -> Expr {
        let mut cache: HashMap<Atom, Expr> = HashMap::new();
        self.derive_cached(base, &mut cache)
    }

    fn derive_cached(&self, base: &dyn Fn(&Atom) -> Option<Expr>, cache: &mut HashMap<Atom, Expr>) -> Expr {
        let mut acc = Expr::zero();
        for (m, c) in self.terms() {
            for (i, (a, r)) in m.factors().iter().enumerate() {
                let da = match cache.get(a) {
                    Some(d) => d.clone(),
                    None => {
                        let d = atom_derivative(a, base, cache);
                        cache.insert(a.clone(), d.clone());
                        d
                    }
                };
                if da.is_zero_literal() {
                    continue;
                }
                let mut f = m.factors().to_vec();
                f[i].1 = *r - Exponent::one();
                let term = Expr::from_terms([(c * exponent_coeff(*r), f)]);
                acc = &acc + &(&term * &da);
            }
        }
        acc
    }

    /// Formal partial derivative with respect to a plain atom.
    pub fn partial(&self, atom: &Atom) -> Expr {
        self.derive_with(&|a| (a == atom).then(Expr::one))
    }
}

fn atom_derivative(a: &Atom, base: &dyn Fn(&Atom) -> Option<Expr>, cache: &mut HashMap<Atom, Expr>) -> Expr {
    match a {
        Atom::Ln(g) => {
            let dg = g.derive_cached(base, cache);
            if dg.is_zero_literal() {
                return dg;
            }
            &dg * &g.pow_i(-1)
        }
        Atom::Exp(g) => {
            let dg = g.derive_cached(base, cache);
            if dg.is_zero_literal() {
                return dg;
            }
            &dg * &Expr::atom(a.clone())
        }
        Atom::Pow(g) => g.derive_cached(base, cache),
        _ => base(a).unwrap_or_else(Expr::zero),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn partial_of_polynomial() {
        let e = parse("y1^2*y").unwrap();
        assert_eq!(e.partial(&Atom::Jet(1)), parse("2*y1*y").unwrap());
        let e = parse("q*y^2").unwrap();
        assert_eq!(
            e.partial(&Atom::Sym(super::super::SymbolFn::Q, 0)),
            parse("y^2").unwrap()
        );
    }

    #[test]
    fn partial_of_logarithm() {
        let e = parse("ln(y)").unwrap();
        assert_eq!(e.partial(&Atom::Jet(0)), parse("1/y").unwrap());
        let e = parse("ln(x + y)").unwrap();
        let d = e.partial(&Atom::Jet(0));
        assert!((&d - &parse("(x+y)^(-1)").unwrap()).is_zero_literal());
    }

    #[test]
    fn chain_rule_through_root() {
        let e = parse("(2*x - k1)^(1/2)").unwrap();
        let d = e.partial(&Atom::X);
        assert_eq!(d, parse("(2*x-k1)^(-1/2)").unwrap());
        let e = parse("exp(k1*x)").unwrap();
        assert_eq!(e.partial(&Atom::X), parse("k1*exp(k1*x)").unwrap());
    }

    #[test]
    fn partials_commute() {
        let e = parse("x^3*y*y1^2 + ln(y)*y1 + exp(x*y)").unwrap();
        let a = e.partial(&Atom::Jet(0)).partial(&Atom::X);
        let b = e.partial(&Atom::X).partial(&Atom::Jet(0));
        assert_eq!(a, b);
    }

    #[test]
    fn constant_has_zero_derivative() {
        assert!(Expr::int(5).partial(&Atom::X).is_zero_literal());
        assert!(Expr::zero().partial(&Atom::X).is_zero_literal());
    }
}
