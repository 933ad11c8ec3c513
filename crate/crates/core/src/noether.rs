//! Lie point, variational and divergence symmetry checks, and first
//! integrals with the convention `D_x F = Q Δ`.

use serde::Serialize;

use crate::expr::{Atom, Coeff, Expr, ExprError};
use crate::jet::{
    euler_expr, inverse_total_derivative_with, order_of, total_derivative_with, DiffEq, JetError, Lagrangian, Reduce,
    VectorField,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NoetherError {
    #[error("not a divergence symmetry, E(Q Δ) = {0}")]
    NotADivergenceSymmetry(Expr),
    #[error("not a first integral, remainder {0}")]
    NotFirstIntegral(Expr),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryKind {
    Lie,
    Variational,
    Divergence,
}

/// Outcome of a symmetry test; `witness` is the residual that must vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryVerdict {
    pub kind: SymmetryKind,
    pub holds: bool,
    pub witness: Expr,
}

impl SymmetryVerdict {
    fn decide(kind: SymmetryKind, witness: Expr) -> Result<Self, ExprError> {
        let holds = witness.zero_test()?;
        Ok(SymmetryVerdict { kind, holds, witness })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstIntegral {
    pub integral: Expr,
    pub characteristic: Expr,
    pub equation: DiffEq,
}

/// `pr v(Δ)` evaluated on solutions.
pub fn lie_symmetry_check(v: &VectorField, eq: &DiffEq, ctx: &dyn Reduce) -> Result<SymmetryVerdict, NoetherError> {
    let w = v.apply_prolonged(&eq.delta, ctx);
    let w = ctx.reduce(&eq.on_shell(&w)?);
    Ok(SymmetryVerdict::decide(SymmetryKind::Lie, w)?)
}

/// `pr v(L) + L D_x ξ`.
pub fn variational_expression(v: &VectorField, l: &Lagrangian, ctx: &dyn Reduce) -> Expr {
    let pr = v.apply_prolonged(&l.density, ctx);
    let div = &l.density * &total_derivative_with(&v.xi, 1, ctx);
    ctx.reduce(&(&pr + &div))
}

pub fn variational_check(v: &VectorField, l: &Lagrangian, ctx: &dyn Reduce) -> Result<SymmetryVerdict, NoetherError> {
    Ok(SymmetryVerdict::decide(
        SymmetryKind::Variational,
        variational_expression(v, l, ctx),
    )?)
}

/// `Q Δ` is a total derivative, tested through `E(Q Δ) = 0`.
pub fn divergence_check(v: &VectorField, eq: &DiffEq, ctx: &dyn Reduce) -> Result<SymmetryVerdict, NoetherError> {
    let q = ctx.reduce(&v.characteristic());
    let w = euler_expr(&(&q * &eq.delta), ctx);
    Ok(SymmetryVerdict::decide(SymmetryKind::Divergence, w)?)
}

pub fn first_integral(v: &VectorField, eq: &DiffEq, ctx: &dyn Reduce) -> Result<FirstIntegral, NoetherError> {
    let check = divergence_check(v, eq, ctx)?;
    if !check.holds {
        return Err(NoetherError::NotADivergenceSymmetry(check.witness));
    }
    let q = ctx.reduce(&v.characteristic());
    let density = ctx.reduce(&(&q * &eq.delta));
    let f = inverse_total_derivative_with(&density, ctx)?;
    let rest = ctx.reduce(&(&total_derivative_with(&f, 1, ctx) - &density));
    if !rest.zero_test()? {
        return Err(NoetherError::NotFirstIntegral(rest));
    }
    Ok(FirstIntegral {
        integral: f,
        characteristic: q,
        equation: eq.clone(),
    })
}

/// Finds `μ` with `D_x F = μ Δ`. `F` must have order below that of `Δ`.
pub fn verify_first_integral(f: &Expr, eq: &DiffEq, ctx: &dyn Reduce) -> Result<Expr, NoetherError> {
    let df = total_derivative_with(f, 1, ctx);
    if order_of(f) >= eq.order {
        return Err(NoetherError::NotFirstIntegral(df));
    }
    let top = df.partial(&Atom::Jet(eq.order));
    let mu = ctx.reduce(&(&top * &eq.leading.recip()?));
    let rest = ctx.reduce(&(&df - &(&mu * &eq.delta)));
    if !rest.zero_test()? {
        return Err(NoetherError::NotFirstIntegral(rest));
    }
    Ok(mu)
}

/// `S_L(v) - θ S_{L0}(v) - S_{D_x P}(v)` for `L = θ L0 + D_x P`.
pub fn divergence_relation_check(
    l0: &Expr,
    p: &Expr,
    theta: &Expr,
    v: &VectorField,
    ctx: &dyn Reduce,
) -> Result<SymmetryVerdict, NoetherError> {
    let dp = total_derivative_with(p, 1, ctx);
    let l = &(theta * l0) + &dp;
    let s = |density: &Expr| variational_expression(v, &Lagrangian::from_density(density.clone()), ctx);
    let w = &(&s(&l) - &(theta * &s(l0))) - &s(&dp);
    Ok(SymmetryVerdict::decide(SymmetryKind::Variational, ctx.reduce(&w))?)
}

/// `S_{D_x P}(v) = D_x(pr v(P))`: the extra term in the relation above is
/// itself a total derivative.
pub fn total_derivative_term_check(
    p: &Expr,
    v: &VectorField,
    ctx: &dyn Reduce,
) -> Result<SymmetryVerdict, NoetherError> {
    let dp = total_derivative_with(p, 1, ctx);
    let lhs = variational_expression(v, &Lagrangian::from_density(dp), ctx);
    let rhs = total_derivative_with(&v.apply_prolonged(p, ctx), 1, ctx);
    Ok(SymmetryVerdict::decide(
        SymmetryKind::Variational,
        ctx.reduce(&(&lhs - &rhs)),
    )?)
}

/// Constant `c` with `E(a - c b) = 0`, i.e. `a` and `b` define the same
/// Euler–Lagrange equation up to the factor `c`.
pub fn lagrangian_factor(a: &Expr, b: &Expr, ctx: &dyn Reduce) -> Result<Option<Coeff>, NoetherError> {
    let ea = euler_expr(a, ctx);
    let eb = euler_expr(b, ctx);
    let (Some((ma, ca)), Some((mb, cb))) = (ea.leading_term(), eb.leading_term()) else {
        return Ok(None);
    };
    if ma != mb {
        return Ok(None);
    }
    let c = ca / cb;
    let rest = &ea - &eb.scale(&c);
    Ok(rest.zero_test()?.then_some(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::jet::NoReduction;
    use crate::maxsym::{build_lode, generators, natural_lagrangian, transformed_lagrangian, Role, SourceContext};

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn vf(xi: &str, psi: &str) -> VectorField {
        VectorField::new(p(xi), p(psi)).unwrap()
    }

    #[test]
    fn lie_checks() {
        let ctx = SourceContext::symbolic();
        let d3 = build_lode(3, &ctx).unwrap();
        let d4 = build_lode(4, &ctx).unwrap();
        assert!(lie_symmetry_check(&vf("0", "y"), &d3, &ctx).unwrap().holds);
        let f4 = generators(4).unwrap().get(Role::SlF).unwrap().clone();
        assert!(lie_symmetry_check(&f4, &d4, &ctx).unwrap().holds);
        let dx = lie_symmetry_check(&vf("1", "0"), &d4, &ctx).unwrap();
        assert!(!dx.holds);
        assert!(dx.witness.contains_atom(&Atom::Sym(crate::expr::SymbolFn::Q, 1)));
        assert!(dx.witness.numeric_witness(7).certifies_nonzero());
    }

    #[test]
    fn variational_checks() {
        let ctx = SourceContext::symbolic();
        let g = generators(4).unwrap();
        let l4 = transformed_lagrangian(4, &ctx).unwrap();
        assert!(variational_check(g.get(Role::SlG).unwrap(), &l4, &ctx).unwrap().holds);
        assert!(!variational_check(g.get(Role::SlH).unwrap(), &l4, &ctx).unwrap().holds);
        let v0 = g.get(Role::Solution(0)).unwrap();
        let flat = SourceContext::with_solutions(p("1"), p("x")).unwrap();
        let nat_flat = natural_lagrangian(4, &flat).unwrap();
        assert!(variational_check(v0, &nat_flat, &flat).unwrap().holds);
        let nat = natural_lagrangian(4, &ctx).unwrap();
        assert!(!variational_check(v0, &nat, &ctx).unwrap().holds);
    }

    #[test]
    fn divergence_checks() {
        let ctx = SourceContext::symbolic();
        let d3 = build_lode(3, &ctx).unwrap();
        let d4 = build_lode(4, &ctx).unwrap();
        assert!(divergence_check(&vf("0", "y"), &d3, &ctx).unwrap().holds);
        assert!(!divergence_check(&vf("0", "y"), &d4, &ctx).unwrap().holds);
        let v2 = generators(4).unwrap().get(Role::Solution(2)).unwrap().clone();
        assert!(divergence_check(&v2, &d4, &ctx).unwrap().holds);
    }

    #[test]
    fn homogeneity_integrals() {
        let ctx = SourceContext::symbolic();
        let d3 = build_lode(3, &ctx).unwrap();
        let fi = first_integral(&vf("0", "y"), &d3, &ctx).unwrap();
        assert_eq!(fi.integral, p("2*q*y^2 - y1^2/2 + y*y2"));
        let d5 = build_lode(5, &ctx).unwrap();
        let fi = first_integral(&vf("0", "y"), &d5, &ctx).unwrap();
        let expected = p("10*y*q1*y1 - 10*q*y1^2 + 4*y^2*(8*q^2 + q2) + 20*q*y*y2 + y2^2/2 - y1*y3 + y*y4");
        assert_eq!(fi.integral, expected);
        let d4 = build_lode(4, &ctx).unwrap();
        assert!(matches!(
            first_integral(&vf("0", "y"), &d4, &ctx),
            Err(NoetherError::NotADivergenceSymmetry(_))
        ));
    }

    #[test]
    fn translation_integral_of_trivial_equation() {
        let eq = DiffEq::new(p("y5")).unwrap();
        let fi = first_integral(&vf("0", "1"), &eq, &NoReduction).unwrap();
        assert_eq!(fi.integral, p("y4"));
    }

    #[test]
    fn multipliers() {
        let ctx = SourceContext::symbolic();
        let d3 = build_lode(3, &ctx).unwrap();
        let mu = verify_first_integral(&p("2*q*y^2 - y1^2/2 + y*y2"), &d3, &ctx).unwrap();
        assert_eq!(mu, p("y"));
        let d2 = build_lode(2, &ctx).unwrap();
        assert!(matches!(
            verify_first_integral(&p("y1"), &d2, &ctx),
            Err(NoetherError::NotFirstIntegral(_))
        ));
        let flat = SourceContext::with_q(Expr::zero());
        let d2 = build_lode(2, &flat).unwrap();
        assert_eq!(verify_first_integral(&p("y1"), &d2, &flat).unwrap(), Expr::one());
    }

    #[test]
    fn relation_between_equivalent_lagrangians() {
        let ctx = SourceContext::symbolic();
        let r = divergence_relation_check(&p("-y1^2/2"), &p("y^2"), &p("3"), &vf("0", "y"), &ctx).unwrap();
        assert!(r.holds);
        let l2 = transformed_lagrangian(2, &ctx).unwrap().density;
        let f2 = generators(2).unwrap().get(Role::SlF).unwrap().clone();
        let r = divergence_relation_check(&l2, &p("x*y*y1"), &Expr::one(), &f2, &ctx).unwrap();
        assert!(r.holds);
        assert!(total_derivative_term_check(&p("x*y*y1"), &f2, &ctx).unwrap().holds);
    }

    #[test]
    fn lagrangian_factor_detects_constant_multiples() {
        let c = lagrangian_factor(&p("-y2^2"), &p("y2^2/2 + y*y3"), &NoReduction).unwrap();
        assert_eq!(c, Some(Coeff::from_integer((-2).into())));
        assert_eq!(lagrangian_factor(&p("y2^2"), &p("y1^2"), &NoReduction).unwrap(), None);
    }
}
