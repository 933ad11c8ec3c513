//! Point transformations `z = zeta(x, y)`, `w = phi(x, y)` and their action
//! on differential functions, equations, Lagrangians and vector fields.
//!
//! Expressions in the source coordinates reuse the atoms of the target: `x`
//! plays the role of `z` and the jet atoms `y, y1, ...` those of `w, w1, ...`.

use crate::expr::{Atom, Expr, ExprError};
use crate::jet::{
    explicit_x_derivative, order_of, total_derivative_with, DiffEq, JetError, Lagrangian, NoReduction, Reduce,
    VectorField,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransformError {
    #[error("singular map: {0}")]
    SingularMap(String),
    #[error("map components must depend on x and y only: {0}")]
    NotPointMap(String),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointTransformation {
    pub zeta: Expr,
    pub phi: Expr,
}

impl PointTransformation {
    pub fn new(zeta: Expr, phi: Expr) -> Result<Self, TransformError> {
        for c in [&zeta, &phi] {
            if order_of(c) > 0 {
                return Err(TransformError::NotPointMap(c.to_string()));
            }
        }
        let map = PointTransformation { zeta, phi };
        if map.jacobian(&NoReduction).zero_test()? {
            return Err(TransformError::SingularMap("vanishing Jacobian".into()));
        }
        Ok(map)
    }

    pub fn identity() -> Self {
        PointTransformation {
            zeta: Expr::x(),
            phi: Expr::jet(0),
        }
    }

    /// `zeta_x phi_y - zeta_y phi_x`.
    pub fn jacobian(&self, red: &dyn Reduce) -> Expr {
        let y = Atom::Jet(0);
        let zx = explicit_x_derivative(&self.zeta);
        let px = explicit_x_derivative(&self.phi);
        red.reduce(&(&(&zx * &self.phi.partial(&y)) - &(&self.zeta.partial(&y) * &px)))
    }

    /// `self ∘ inner`: apply `inner` to `(x, y)` first.
    pub fn compose(&self, inner: &PointTransformation) -> Result<PointTransformation, TransformError> {
        let sub = |e: &Expr| {
            e.subst(&|a| match a {
                Atom::X => Some(inner.zeta.clone()),
                Atom::Jet(0) => Some(inner.phi.clone()),
                _ => None,
            })
        };
        PointTransformation::new(sub(&self.zeta)?, sub(&self.phi)?)
    }
}

fn point_image(e: &Expr, map: &PointTransformation) -> Result<Expr, ExprError> {
    e.subst(&|a| match a {
        Atom::X => Some(map.zeta.clone()),
        Atom::Jet(0) => Some(map.phi.clone()),
        _ => None,
    })
}

/// Images of `w, w1, ..., w^(order)` in the `(x, y)` jet space, together
/// with `D_x zeta`.
pub fn jet_substitution(
    map: &PointTransformation,
    order: u32,
    red: &dyn Reduce,
) -> Result<(Vec<Expr>, Expr), TransformError> {
    let dzeta = total_derivative_with(&map.zeta, 1, red);
    if dzeta.zero_test()? {
        return Err(TransformError::SingularMap("D_x zeta vanishes".into()));
    }
    let inv = dzeta.recip()?;
    let mut images = vec![red.reduce(&map.phi)];
    for k in 0..order as usize {
        let next = &total_derivative_with(&images[k], 1, red) * &inv;
        images.push(red.reduce(&next));
    }
    Ok((images, dzeta))
}

/// Expresses a differential function of `(z, w)` in `(x, y)`.
pub fn transform_first_integral(f: &Expr, map: &PointTransformation, red: &dyn Reduce) -> Result<Expr, TransformError> {
    let (images, _) = jet_substitution(map, order_of(f), red)?;
    substitute_images(f, map, &images, red)
}

fn substitute_images(
    f: &Expr,
    map: &PointTransformation,
    images: &[Expr],
    red: &dyn Reduce,
) -> Result<Expr, TransformError> {
    let out = f.subst(&|a| match a {
        Atom::X => Some(map.zeta.clone()),
        Atom::Jet(k) => images.get(*k as usize).cloned(),
        _ => None,
    })?;
    Ok(red.reduce(&out))
}

/// Direct substitution of the jet images into the equation, without any
/// renormalization.
pub fn transform_equation(eq: &DiffEq, map: &PointTransformation, red: &dyn Reduce) -> Result<DiffEq, TransformError> {
    let delta = transform_first_integral(&eq.delta, map, red)?;
    Ok(DiffEq::new(delta)?)
}

/// The transformed equation multiplied by the Jacobian. This is the
/// normalization under which Euler–Lagrange expressions and characteristics
/// transform compatibly: if `L` has Euler expression `eq`, the transformed
/// Lagrangian has Euler expression `J * (eq ∘ map)`.
pub fn transform_equation_variational(
    eq: &DiffEq,
    map: &PointTransformation,
    red: &dyn Reduce,
) -> Result<DiffEq, TransformError> {
    let raw = transform_first_integral(&eq.delta, map, red)?;
    let delta = red.reduce(&(&map.jacobian(red) * &raw));
    Ok(DiffEq::new(delta)?)
}

/// `L(jet images) * D_x zeta`.
pub fn transform_lagrangian(
    l: &Lagrangian,
    map: &PointTransformation,
    red: &dyn Reduce,
) -> Result<Lagrangian, TransformError> {
    let (images, dzeta) = jet_substitution(map, l.order, red)?;
    let density = substitute_images(&l.density, map, &images, red)?;
    let density = red.reduce(&(&density * &dzeta));
    Ok(Lagrangian::from_density(density))
}

/// Push-forward of `a(z, w) ∂_z + b(z, w) ∂_w`. The components solve
/// `a∘σ = zeta_x xi + zeta_y psi`, `b∘σ = phi_x xi + phi_y psi`.
pub fn pushforward(
    v: &VectorField,
    map: &PointTransformation,
    red: &dyn Reduce,
) -> Result<VectorField, TransformError> {
    let jac = map.jacobian(red);
    if jac.zero_test()? {
        return Err(TransformError::SingularMap("vanishing Jacobian".into()));
    }
    let inv = jac.recip()?;
    let y = Atom::Jet(0);
    let zx = red.reduce(&explicit_x_derivative(&map.zeta));
    let zy = red.reduce(&map.zeta.partial(&y));
    let px = red.reduce(&explicit_x_derivative(&map.phi));
    let py = red.reduce(&map.phi.partial(&y));
    let a = point_image(&v.xi, map)?;
    let b = point_image(&v.psi, map)?;
    let xi = red.reduce(&(&(&(&a * &py) - &(&b * &zy)) * &inv));
    let psi = red.reduce(&(&(&(&zx * &b) - &(&px * &a)) * &inv));
    Ok(VectorField::new(xi, psi)?)
}
