use std::fmt;

use num_traits::{One, Signed};

use super::{Atom, Coeff, Exponent, Expr, Monomial};

fn write_coeff(f: &mut fmt::Formatter<'_>, c: &Coeff) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

fn write_exponent(f: &mut fmt::Formatter<'_>, r: Exponent) -> fmt::Result {
    if r.is_one() {
        Ok(())
    } else if r.is_integer() && r.is_positive() {
        write!(f, "^{}", r.numer())
    } else if r.is_integer() {
        write!(f, "^({})", r.numer())
    } else {
        write!(f, "^({}/{})", r.numer(), r.denom())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Param(p) => f.write_str(p.name()),
            Atom::Sym(s, 0) => f.write_str(s.name()),
            Atom::Sym(s, k) => write!(f, "{}{}", s.name(), k),
            Atom::Jet(0) => f.write_str("y"),
            Atom::Jet(k) => write!(f, "y{k}"),
            Atom::X => f.write_str("x"),
            Atom::Ln(g) => write!(f, "ln({g})"),
            Atom::Exp(g) => write!(f, "exp({g})"),
            Atom::Pow(g) => write!(f, "({g})"),
        }
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial) -> fmt::Result {
    for (i, (a, r)) in m.factors().iter().rev().enumerate() {
        if i > 0 {
            f.write_str("*")?;
        }
        write!(f, "{a}")?;
        write_exponent(f, *r)?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero_literal() {
            return f.write_str("0");
        }
        let mut terms: Vec<(&Monomial, &Coeff)> = self.terms().collect();
        terms.sort_by(|a, b| b.0.order_cmp(a.0));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if m.is_one() {
                write_coeff(f, &a)?;
            } else if a.is_one() {
                write_monomial(f, m)?;
            } else {
                write_coeff(f, &a)?;
                f.write_str("*")?;
                write_monomial(f, m)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;

    #[test]
    fn prints_readable_forms() {
        assert_eq!(parse("y1^2/2 - 3*y").unwrap().to_string(), "1/2*y1^2 - 3*y");
        assert_eq!(parse("0").unwrap().to_string(), "0");
        assert_eq!(parse("-(2*x-k1)^(-1/2)").unwrap().to_string(), "-(2*x - k1)^(-1/2)");
    }

    #[test]
    fn printed_forms_reparse() {
        for s in [
            "q2*y^2 - ln(y)*x/3 + exp(k1*x)*u1",
            "(2*x-k1)^(3/2)*y + 2^(1/2)",
            "u^(-2)*v*y3 - 7/5",
        ] {
            let e = parse(s).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e);
        }
    }
}
