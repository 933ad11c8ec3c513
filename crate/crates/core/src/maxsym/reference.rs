//! Published closed forms kept verbatim as regression fixtures. `I` stands
//! for the logarithmic derivative `u'/u`.

use crate::expr::{parse, Expr};

const LAGRANGIAN_2: &str = "-1/2*I^2*y^2 + I*y*y1 - y1^2/2";

const LAGRANGIAN_4: &str = "9/2*(q + 2*I^2)^2*y^2 - 12*I*(q + 2*I^2)*y*y1 + 8*I^2*y1^2 \
    + 3*(q + 2*I^2)*y*y2 - 4*I*y1*y2 + y2^2/2";

const LAGRANGIAN_6: &str = "25/2*y^2*(9*q*I + 12*I^3 - q1)^2 \
    + 5*(13*q + 36*I^2)*y*(9*q*I + 12*I^3 - q1)*y1 \
    - 1/2*(13*q + 36*I^2)^2*y1^2 - 45*I*y*(9*q*I + 12*I^3 - q1)*y2 \
    + 9*(13*q*I + 36*I^3)*y1*y2 - 81/2*I^2*y2^2 + y*(45*q*I + 60*I^3 - 5*q1)*y3 \
    + (-13*q - 36*I^2)*y1*y3 + 9*I*y2*y3 - 1/2*y3^2";

const HOMOGENEITY_INTEGRAL_3: &str = "2*q*y^2 - y1^2/2 + y*y2";

const HOMOGENEITY_INTEGRAL_5: &str = "10*y*q1*y1 - 10*q*y1^2 + 4*y^2*(8*q^2 + q2) \
    + 20*q*y*y2 + y2^2/2 - y1*y3 + y*y4";

// the printed `y_3^2` term is read as the square of the third derivative
const HOMOGENEITY_INTEGRAL_7: &str = "-28*y1^2*(14*q^2 + q2) - 28*q1*y1*y2 \
    + y*(784*q^2 + 84*q2)*y2 + 28*q*y2^2 \
    + 28*y*y1*(28*q*q1 + q3) + 84*y*q1*y3 - 56*q*y1*y3 - 1/2*y3^2 \
    + 6*y^2*(192*q^3 + 33*q1^2 + 52*q*q2 + q4) + 56*q*y*y4 \
    + y2*y4 - y1*y5 + y*y6";

/// Nonlinear fourth-order equation of maximal symmetry.
pub const NONLINEAR_EQUATION: &str = "(6*y1^4 - 12*y*y1^2*y2 + 3*y^2*y2^2 + 4*y^2*y1*y3 - y^3*y4)/y^4";

/// Its published Lagrangian.
pub const NONLINEAR_LAGRANGIAN: &str = "-(y1^2 - y*y2)^2/(2*y^4)";

/// Its published four-parameter first integral, linear in `a0..a3`.
pub const NONLINEAR_FIRST_INTEGRAL: &str = "-1/y^3*( \
    a0*(2*y1^3 - 3*y*y1*y2 + y^2*y3) \
    + a1*(-2*x*y1^3 - y*y1*(y1 - 3*x*y2) + y^2*(y2 - x*y3)) \
    - a3*(6*y^3*(k2 - ln(y)) + 2*x^3*y1^3 + 3*x^2*y*y1*(y1 - x*y2) \
          + x*y^2*(6*y1 + x*(-3*y2 + x*y3))) \
    + a2*(-2*x^2*y1^3 + x*y*y1*(-2*y1 + 3*x*y2) - y^2*(2*y1 + x*(-2*y2 + x*y3))))";

/// Its published symmetry generators as `(name, xi, psi)`.
pub const NONLINEAR_GENERATORS: [(&str, &str, &str); 7] = [
    ("V0", "0", "-y"),
    ("V1", "0", "-x*y"),
    ("V2", "0", "-x^2*y"),
    ("V3", "0", "-x^3*y"),
    ("F4", "1", "0"),
    ("G4", "2*x", "-3*y*(k2 - ln(y))"),
    ("H4", "-x^2", "3*x*y*(k2 - ln(y))"),
];

fn expand(template: &str) -> Expr {
    parse(&template.replace('I', "(u1/u)")).expect("reference fixture parses")
}

/// Closed form of the transformed canonical Lagrangian for `n = 2, 4, 6`.
pub fn transformed_lagrangian(n: u32) -> Option<Expr> {
    let t = match n {
        2 => LAGRANGIAN_2,
        4 => LAGRANGIAN_4,
        6 => LAGRANGIAN_6,
        _ => return None,
    };
    Some(expand(t))
}

/// Closed form of the first integral belonging to `y ∂_y` for `n = 3, 5, 7`.
pub fn homogeneity_integral(n: u32) -> Option<Expr> {
    let t = match n {
        3 => HOMOGENEITY_INTEGRAL_3,
        5 => HOMOGENEITY_INTEGRAL_5,
        7 => HOMOGENEITY_INTEGRAL_7,
        _ => return None,
    };
    Some(expand(t))
}

pub fn parsed(text: &str) -> Expr {
    parse(text).expect("reference fixture parses")
}
