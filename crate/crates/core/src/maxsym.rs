//! Linear equations of maximal symmetry built from the source equation
//! `u'' + q u = 0`.
//!
//! `u` and `v` are solutions of the source equation with Wronskian
//! `u v' - u' v = 1`. In the symbolic context every expression is reduced to
//! a normal form in `u, u', v` and the derivatives of `q`, which are
//! algebraically independent, so the kernel's canonical form decides zero
//! exactly.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::expr::{Atom, Expr, ExprError, SymbolFn};
use crate::jet::{reduce_lagrangian_order, total_derivative, DiffEq, JetError, Lagrangian, Reduce, VectorField};
use crate::transform::{transform_equation_variational, transform_lagrangian, PointTransformation, TransformError};

pub mod reference;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MaxsymError {
    #[error("order {0} is below 2")]
    BadOrder(u32),
    #[error("order {0} is odd")]
    OddOrder(u32),
    #[error("u survives the elimination: {0}")]
    EliminationFailed(String),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone)]
enum Source {
    Symbolic,
    Potential(Expr),
    Solutions { u: Expr, v: Expr, q: Expr },
}

/// Rewrite context for the source equation.
#[derive(Debug)]
pub struct SourceContext {
    source: Source,
    cache: Mutex<HashMap<Atom, Expr>>,
}

impl Clone for SourceContext {
    fn clone(&self) -> Self {
        SourceContext {
            source: self.source.clone(),
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl Default for SourceContext {
    fn default() -> Self {
        SourceContext::symbolic()
    }
}

impl SourceContext {
    fn with(source: Source) -> Self {
        SourceContext {
            source,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// `q` stays an arbitrary function.
    pub fn symbolic() -> Self {
        Self::with(Source::Symbolic)
    }

    /// Concrete `q(x)`; `u` and `v` remain abstract solutions.
    pub fn with_q(q: Expr) -> Self {
        Self::with(Source::Potential(q))
    }

    /// Concrete solutions; `q = -u''/u`.
    pub fn with_solutions(u: Expr, v: Expr) -> Result<Self, MaxsymError> {
        let q = -(&total_derivative(&u, 2) * &u.recip()?);
        Ok(Self::with(Source::Solutions { u, v, q }))
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self.source, Source::Symbolic)
    }

    /// `q` as an expression (the atom `q` in the symbolic case).
    pub fn q(&self) -> Expr {
        match &self.source {
            Source::Symbolic => Expr::sym(SymbolFn::Q, 0),
            Source::Potential(q) | Source::Solutions { q, .. } => q.clone(),
        }
    }

    /// Wronskian and source-equation residuals of concrete solutions; empty
    /// for abstract solutions, where they hold by construction.
    pub fn consistency_residuals(&self) -> Vec<(&'static str, Expr)> {
        match &self.source {
            Source::Solutions { u, v, q } => {
                let w = &(&(u * &total_derivative(v, 1)) - &(&total_derivative(u, 1) * v)) - &Expr::one();
                vec![
                    ("wronskian", w),
                    ("u solves the source equation", &total_derivative(u, 2) + &(q * u)),
                    ("v solves the source equation", &total_derivative(v, 2) + &(q * v)),
                ]
            }
            _ => Vec::new(),
        }
    }

    /// Image of a symbol atom under the rewrite rules, `None` if it is kept.
    fn rule(&self, atom: &Atom) -> Option<Expr> {
        let Atom::Sym(s, k) = atom else { return None };
        let (s, k) = (*s, *k);
        let keep = match &self.source {
            Source::Symbolic => s == SymbolFn::Q || k == 0 || (s == SymbolFn::U && k == 1),
            Source::Potential(_) => (s != SymbolFn::Q) && (k == 0 || (s == SymbolFn::U && k == 1)),
            Source::Solutions { .. } => false,
        };
        if keep {
            return None;
        }
        if let Some(hit) = self.cache.lock().expect("cache poisoned").get(atom) {
            return Some(hit.clone());
        }
        let value = self.compute_rule(s, k);
        self.cache
            .lock()
            .expect("cache poisoned")
            .insert(atom.clone(), value.clone());
        Some(value)
    }

    fn compute_rule(&self, s: SymbolFn, k: u32) -> Expr {
        match &self.source {
            Source::Solutions { u, v, q } => {
                let base = match s {
                    SymbolFn::U => u,
                    SymbolFn::V => v,
                    SymbolFn::Q => q,
                };
                total_derivative(base, k)
            }
            Source::Potential(q) if s == SymbolFn::Q => total_derivative(q, k),
            _ => match (s, k) {
                (SymbolFn::V, 1) => {
                    let u = Expr::sym(SymbolFn::U, 0);
                    let u1 = Expr::sym(SymbolFn::U, 1);
                    let v = Expr::sym(SymbolFn::V, 0);
                    &(&Expr::one() + &(&u1 * &v)) * &u.pow_i(-1)
                }
                (_, 2) => self.reduce(&-(&self.q() * &Expr::sym(s, 0))),
                _ => self.reduce(&total_derivative(&self.reduce(&Expr::sym(s, k - 1)), 1)),
            },
        }
    }
}

impl Reduce for SourceContext {
    fn reduce(&self, e: &Expr) -> Expr {
        e.subst(&|a| self.rule(a)).expect("reduction produced a singular power")
    }
}

/// Position of a generator in the symmetry algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    /// Solution symmetry `V_k`, spanning the abelian ideal.
    Solution(u32),
    Homogeneity,
    /// The three generators of the sl(2) triplet.
    SlF,
    SlG,
    SlH,
}

impl Role {
    pub fn in_abelian_ideal(self) -> bool {
        matches!(self, Role::Solution(_))
    }

    pub fn in_sl2(self) -> bool {
        matches!(self, Role::SlF | Role::SlG | Role::SlH)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub role: Role,
    pub field: VectorField,
}

/// The `n + 4` point symmetries of a linear equation of maximal symmetry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSet {
    pub order: u32,
    pub generators: Vec<Generator>,
}

impl GeneratorSet {
    pub fn get(&self, role: Role) -> Option<&VectorField> {
        self.generators.iter().find(|g| g.role == role).map(|g| &g.field)
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

pub fn generators(n: u32) -> Result<GeneratorSet, MaxsymError> {
    if n < 2 {
        return Err(MaxsymError::BadOrder(n));
    }
    let u = Expr::sym(SymbolFn::U, 0);
    let u1 = Expr::sym(SymbolFn::U, 1);
    let v = Expr::sym(SymbolFn::V, 0);
    let v1 = Expr::sym(SymbolFn::V, 1);
    let y = Expr::jet(0);
    let m = Expr::int(n as i64 - 1);
    let field = |xi: Expr, psi: Expr| VectorField { xi, psi };
    let mut out = Vec::new();
    for k in 0..n {
        let s = &u.pow_i((n - k - 1) as i64) * &v.pow_i(k as i64);
        out.push(Generator {
            name: format!("V{k}"),
            role: Role::Solution(k),
            field: field(Expr::zero(), s),
        });
    }
    out.push(Generator {
        name: "Wy".into(),
        role: Role::Homogeneity,
        field: field(Expr::zero(), y.clone()),
    });
    out.push(Generator {
        name: format!("F{n}"),
        role: Role::SlF,
        field: field(&u * &u, &(&(&m * &u) * &u1) * &y),
    });
    out.push(Generator {
        name: format!("G{n}"),
        role: Role::SlG,
        field: field(&(&u * &v) * &Expr::int(2), &(&m * &(&(&u * &v1) + &(&u1 * &v))) * &y),
    });
    out.push(Generator {
        name: format!("H{n}"),
        role: Role::SlH,
        field: field(-(&v * &v), -(&(&(&m * &v) * &v1) * &y)),
    });
    Ok(GeneratorSet {
        order: n,
        generators: out,
    })
}

/// Lie bracket reduced in the context.
pub fn commutator(a: &VectorField, b: &VectorField, ctx: &SourceContext) -> VectorField {
    a.bracket(b).map(|e| ctx.reduce(e))
}

/// `z = v/u`, `w = u^(1-n) y`; `v/u` is an antiderivative of `u^-2`.
pub fn maxsym_map(n: u32) -> PointTransformation {
    let u = Expr::sym(SymbolFn::U, 0);
    PointTransformation {
        zeta: &Expr::sym(SymbolFn::V, 0) * &u.pow_i(-1),
        phi: &u.pow_i(1 - n as i64) * &Expr::jet(0),
    }
}

/// The monic equation `y^(n) + ... = 0` obtained from `w^(n) = 0`.
pub fn build_lode(n: u32, ctx: &SourceContext) -> Result<DiffEq, MaxsymError> {
    if n < 2 {
        return Err(MaxsymError::BadOrder(n));
    }
    let symbolic = SourceContext::symbolic();
    let trivial = DiffEq::new(Expr::jet(n))?;
    let eq = transform_equation_variational(&trivial, &maxsym_map(n), &symbolic)?.monic();
    let delta = symbolic.reduce(&eq.delta);
    if delta.contains_symbol(SymbolFn::U) || delta.contains_symbol(SymbolFn::V) {
        return Err(MaxsymError::EliminationFailed(delta.to_string()));
    }
    Ok(DiffEq::new(ctx.reduce(&delta))?)
}

fn check_even(n: u32) -> Result<(), MaxsymError> {
    if n % 2 == 1 {
        return Err(MaxsymError::OddOrder(n));
    }
    if n < 2 {
        return Err(MaxsymError::BadOrder(n));
    }
    Ok(())
}

/// `(-1)^(n/2) (w^(n/2))^2 / 2`, whose Euler–Lagrange expression is `w^(n)`.
pub fn canonical_lagrangian(n: u32) -> Result<Lagrangian, MaxsymError> {
    check_even(n)?;
    let m = n / 2;
    let sign = if m.is_multiple_of(2) { 1 } else { -1 };
    let density = Expr::jet(m)
        .pow_i(2)
        .scale(&num_rational::BigRational::new(sign.into(), 2.into()));
    Ok(Lagrangian::new(density, m)?)
}

/// The canonical Lagrangian carried over by the maximal-symmetry map.
pub fn transformed_lagrangian(n: u32, ctx: &SourceContext) -> Result<Lagrangian, MaxsymError> {
    let l = canonical_lagrangian(n)?;
    Ok(transform_lagrangian(&l, &maxsym_map(n), ctx)?)
}

/// `y Δ_n / 2` with all derivatives above order `n/2` integrated away.
pub fn natural_lagrangian(n: u32, ctx: &SourceContext) -> Result<Lagrangian, MaxsymError> {
    check_even(n)?;
    let eq = build_lode(n, ctx)?;
    let half = num_rational::BigRational::new(1.into(), 2.into());
    let start = (&Expr::jet(0) * &eq.delta).scale(&half);
    let density = reduce_lagrangian_order(&start, n / 2, ctx)?;
    Ok(Lagrangian::new(density, n / 2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::jet::euler_expr;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn source_rewrites() {
        let ctx = SourceContext::symbolic();
        assert_eq!(ctx.reduce(&p("u2")), p("-q*u"));
        assert_eq!(ctx.reduce(&p("u*v1 - u1*v")), Expr::one());
        assert_eq!(ctx.reduce(&p("u1*v2 - u2*v1")), p("q"));
        assert_eq!(ctx.reduce(&p("u3")), p("-q1*u - q*u1"));
    }

    #[test]
    fn concrete_potential_substitutes_derivatives_of_q() {
        let ctx = SourceContext::with_q(p("x^2"));
        assert_eq!(ctx.reduce(&p("q1*y + u2")), p("2*x*y - x^2*u"));
    }

    #[test]
    fn concrete_solutions() {
        let ctx = SourceContext::with_solutions(p("1"), p("x")).unwrap();
        assert!(ctx.q().is_zero_literal());
        assert_eq!(ctx.reduce(&p("u^3*v*y + v1")), p("x*y + 1"));
        for (_, r) in ctx.consistency_residuals() {
            assert!(r.is_zero_literal());
        }
    }

    #[test]
    fn generator_examples() {
        let g4 = generators(4).unwrap();
        assert_eq!(g4.len(), 8);
        assert_eq!(g4.get(Role::Solution(2)).unwrap().psi, p("u*v^2"));
        let h = g4.get(Role::SlH).unwrap();
        assert_eq!((h.xi.clone(), h.psi.clone()), (p("-v^2"), p("-3*v*v1*y")));
        let f2 = generators(2).unwrap();
        assert_eq!(f2.get(Role::SlF).unwrap().psi, p("u*u1*y"));
        assert!(matches!(generators(1), Err(MaxsymError::BadOrder(1))));
    }

    #[test]
    fn commutator_examples() {
        let ctx = SourceContext::symbolic();
        let g = generators(2).unwrap();
        let v0 = g.get(Role::Solution(0)).unwrap();
        let wy = g.get(Role::Homogeneity).unwrap();
        assert_eq!(commutator(v0, wy, &ctx), *v0);
        let fh = commutator(g.get(Role::SlF).unwrap(), g.get(Role::SlH).unwrap(), &ctx);
        let minus_g = g.get(Role::SlG).unwrap().map(|e| -ctx.reduce(e));
        assert_eq!(fh, minus_g);
    }

    #[test]
    fn low_order_equations() {
        let ctx = SourceContext::symbolic();
        assert_eq!(build_lode(2, &ctx).unwrap().delta, p("y2 + q*y"));
        assert_eq!(build_lode(3, &ctx).unwrap().delta, p("y3 + 4*q*y1 + 2*q1*y"));
        assert_eq!(
            build_lode(4, &ctx).unwrap().delta,
            p("y4 + 10*q*y2 + 10*q1*y1 + (3*q2 + 9*q^2)*y")
        );
    }

    #[test]
    fn solutions_solve_the_equation() {
        let ctx = SourceContext::symbolic();
        for n in 2..=6u32 {
            let eq = build_lode(n, &ctx).unwrap();
            for k in 0..n {
                let s = &p("u").pow_i((n - k - 1) as i64) * &p("v").pow_i(k as i64);
                let mut derivs = vec![s];
                for j in 1..=n as usize {
                    derivs.push(ctx.reduce(&total_derivative(&derivs[j - 1], 1)));
                }
                let r = eq
                    .delta
                    .subst(&|a| match a {
                        Atom::Jet(j) => derivs.get(*j as usize).cloned(),
                        _ => None,
                    })
                    .unwrap();
                assert!(ctx.reduce(&r).is_zero_literal(), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn canonical_lagrangians() {
        assert_eq!(canonical_lagrangian(2).unwrap().density, p("-y1^2/2"));
        assert_eq!(canonical_lagrangian(4).unwrap().density, p("y2^2/2"));
        assert_eq!(canonical_lagrangian(6).unwrap().density, p("-y3^2/2"));
        assert!(matches!(canonical_lagrangian(3), Err(MaxsymError::OddOrder(3))));
    }

    #[test]
    fn transformed_lagrangians_match_reference() {
        let ctx = SourceContext::symbolic();
        for n in [2, 4] {
            let l = transformed_lagrangian(n, &ctx).unwrap();
            let r = ctx.reduce(&reference::transformed_lagrangian(n).unwrap());
            assert_eq!(l.density, r, "n={n}");
        }
    }

    #[test]
    fn sixth_order_lagrangian_differs_from_published_form_in_one_sign() {
        // the density is -(W_3)^2/(2 u^2), so its y^2 coefficient is negative
        let ctx = SourceContext::symbolic();
        let l = transformed_lagrangian(6, &ctx).unwrap();
        let published = ctx.reduce(&reference::transformed_lagrangian(6).unwrap());
        let c = ctx.reduce(&p("25*y^2*(9*q*u1/u + 12*u1^3/u^3 - q1)^2"));
        assert_eq!(l.density, &published - &c);
        let d6 = build_lode(6, &ctx).unwrap().delta;
        assert_eq!(euler_expr(&l.density, &ctx), d6);
        assert!(euler_expr(&published, &ctx).contains_symbol(SymbolFn::U));
    }

    #[test]
    fn second_order_euler_expression() {
        let ctx = SourceContext::symbolic();
        let l = reference::transformed_lagrangian(2).unwrap();
        assert_eq!(euler_expr(&l, &ctx), p("y2 + q*y"));
    }

    #[test]
    fn natural_lagrangians() {
        let ctx = SourceContext::symbolic();
        assert_eq!(natural_lagrangian(2, &ctx).unwrap().density, p("-y1^2/2 + q*y^2/2"));
        let flat = SourceContext::with_q(Expr::zero());
        assert_eq!(natural_lagrangian(4, &flat).unwrap().density, p("y2^2/2"));
        let l4 = natural_lagrangian(4, &ctx).unwrap();
        assert_eq!(l4.density, p("y2^2/2 - 5*q*y1^2 + (3/2*q2 + 9/2*q^2)*y^2"));
        assert_eq!(euler_expr(&l4.density, &ctx), build_lode(4, &ctx).unwrap().delta);
    }
}
