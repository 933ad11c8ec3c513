//! Differential operators on the jet space of one independent variable `x`
//! and one dependent variable `y`.

use num_traits::{One, Zero};

use crate::expr::{Atom, Coeff, Exponent, Expr, ExprError, SymbolFn};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JetError {
    #[error("not a total derivative: {0}")]
    NotExact(String),
    #[error("vector field coefficient depends on derivatives of y: {0}")]
    NotPointField(String),
    #[error("expression of jet order {found} exceeds the declared order {declared}")]
    OrderMismatch { declared: u32, found: u32 },
    #[error("equation is not linear in its highest derivative")]
    NotQuasiLinear,
    #[error("equation has no derivative of y or a vanishing leading coefficient")]
    DegenerateEquation,
    #[error("cannot lower the order of the Lagrangian: {0}")]
    NotReducible(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// A normalizing rewrite applied after every differentiation step. The
/// source-equation context implements it to eliminate derivatives of the
/// solutions `u`, `v`.
pub trait Reduce {
    fn reduce(&self, e: &Expr) -> Expr;
}

/// The identity rewrite.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoReduction;

impl Reduce for NoReduction {
    fn reduce(&self, e: &Expr) -> Expr {
        e.clone()
    }
}

fn d_x_base(a: &Atom) -> Option<Expr> {
    match a {
        Atom::X => Some(Expr::one()),
        Atom::Jet(k) => Some(Expr::jet(k + 1)),
        Atom::Sym(s, k) => Some(Expr::sym(*s, k + 1)),
        _ => None,
    }
}

/// `D_x` applied `times` times.
pub fn total_derivative(e: &Expr, times: u32) -> Expr {
    total_derivative_with(e, times, &NoReduction)
}

pub fn total_derivative_with(e: &Expr, times: u32, red: &dyn Reduce) -> Expr {
    let mut out = e.clone();
    for _ in 0..times {
        out = red.reduce(&out.derive_with(&d_x_base));
    }
    out
}

/// Derivative in `x` holding the jet coordinates fixed; `u, v, q` still
/// depend on `x`.
pub fn explicit_x_derivative(e: &Expr) -> Expr {
    e.derive_with(&|a| match a {
        Atom::X => Some(Expr::one()),
        Atom::Sym(s, k) => Some(Expr::sym(*s, k + 1)),
        _ => None,
    })
}

/// Jet order with `0` for expressions free of `y`.
pub fn order_of(e: &Expr) -> u32 {
    e.jet_order().unwrap_or(0)
}

/// Point vector field `xi(x,y) ∂_x + psi(x,y) ∂_y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    pub xi: Expr,
    pub psi: Expr,
}

impl VectorField {
    pub fn new(xi: Expr, psi: Expr) -> Result<Self, JetError> {
        for c in [&xi, &psi] {
            if order_of(c) > 0 {
                return Err(JetError::NotPointField(c.to_string()));
            }
        }
        Ok(VectorField { xi, psi })
    }

    pub fn zero() -> Self {
        VectorField {
            xi: Expr::zero(),
            psi: Expr::zero(),
        }
    }

    /// `Q = psi - xi * y_x`.
    pub fn characteristic(&self) -> Expr {
        &self.psi - &(&self.xi * &Expr::jet(1))
    }

    /// Prolongation coefficients `phi^(0) ... phi^(n)`, with
    /// `phi^(k) = D_x^k Q + xi * y^(k+1)`.
    pub fn prolong(&self, n: u32) -> Vec<Expr> {
        self.prolong_with(n, &NoReduction)
    }

    pub fn prolong_with(&self, n: u32, red: &dyn Reduce) -> Vec<Expr> {
        let mut dq = red.reduce(&self.characteristic());
        let mut out = Vec::with_capacity(n as usize + 1);
        for k in 0..=n {
            if k > 0 {
                dq = total_derivative_with(&dq, 1, red);
            }
            out.push(&dq + &(&self.xi * &Expr::jet(k + 1)));
        }
        out
    }

    /// Action on a function of `(x, y)`.
    pub fn apply(&self, f: &Expr) -> Expr {
        &(&self.xi * &explicit_x_derivative(f)) + &(&self.psi * &f.partial(&Atom::Jet(0)))
    }

    /// Action of the prolonged field on a differential function.
    pub fn apply_prolonged(&self, f: &Expr, red: &dyn Reduce) -> Expr {
        let n = order_of(f);
        let phis = self.prolong_with(n, red);
        let mut out = &self.xi * &explicit_x_derivative(f);
        for (k, phi) in phis.iter().enumerate() {
            let df = f.partial(&Atom::Jet(k as u32));
            if !df.is_zero_literal() {
                out = &out + &(phi * &df);
            }
        }
        red.reduce(&out)
    }

    /// Lie bracket `[self, other]`.
    pub fn bracket(&self, other: &VectorField) -> VectorField {
        VectorField {
            xi: &self.apply(&other.xi) - &other.apply(&self.xi),
            psi: &self.apply(&other.psi) - &other.apply(&self.psi),
        }
    }

    pub fn scale(&self, c: &Expr) -> VectorField {
        VectorField {
            xi: c * &self.xi,
            psi: c * &self.psi,
        }
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField {
            xi: &self.xi + &other.xi,
            psi: &self.psi + &other.psi,
        }
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> VectorField {
        VectorField {
            xi: f(&self.xi),
            psi: f(&self.psi),
        }
    }

    /// Component-wise zero test.
    pub fn is_zero(&self) -> Result<bool, ExprError> {
        Ok(self.xi.zero_test()? && self.psi.zero_test()?)
    }
}

pub fn characteristic(v: &VectorField) -> Expr {
    v.characteristic()
}

pub fn prolong(v: &VectorField, order: u32) -> Vec<Expr> {
    v.prolong(order)
}

/// Lagrangian density with its declared order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lagrangian {
    pub density: Expr,
    pub order: u32,
}

impl Lagrangian {
    pub fn new(density: Expr, order: u32) -> Result<Self, JetError> {
        let found = order_of(&density);
        if found > order {
            return Err(JetError::OrderMismatch { declared: order, found });
        }
        Ok(Lagrangian { density, order })
    }

    /// Declared order taken from the density itself.
    pub fn from_density(density: Expr) -> Self {
        let order = order_of(&density);
        Lagrangian { density, order }
    }
}

/// Differential equation `delta = 0` of order `order`, linear in its highest
/// derivative with coefficient `leading`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffEq {
    pub delta: Expr,
    pub order: u32,
    pub leading: Expr,
}

impl DiffEq {
    pub fn new(delta: Expr) -> Result<Self, JetError> {
        let order = order_of(&delta);
        if order == 0 {
            return Err(JetError::DegenerateEquation);
        }
        let top = Atom::Jet(order);
        let leading = delta.partial(&top);
        if !leading.partial(&top).zero_test()? {
            return Err(JetError::NotQuasiLinear);
        }
        if leading.zero_test()? {
            return Err(JetError::DegenerateEquation);
        }
        Ok(DiffEq { delta, order, leading })
    }

    /// Right-hand side of the solved form `y^(n) = rhs`.
    pub fn solved_rhs(&self) -> Expr {
        let rest = &self.delta - &(&self.leading * &Expr::jet(self.order));
        -(&rest * &self.leading.pow_i(-1))
    }

    /// Same equation divided by its leading coefficient.
    pub fn monic(&self) -> DiffEq {
        let delta = &self.delta * &self.leading.pow_i(-1);
        DiffEq {
            delta,
            order: self.order,
            leading: Expr::one(),
        }
    }

    /// Substitutes the solved form for `y^(n)`.
    pub fn on_shell(&self, e: &Expr) -> Result<Expr, ExprError> {
        e.subst_atom(&Atom::Jet(self.order), &self.solved_rhs())
    }
}

/// Euler operator `E(L) = Σ (-D_x)^k ∂L/∂y^(k)`.
pub fn euler(l: &Lagrangian) -> Expr {
    euler_expr(&l.density, &NoReduction)
}

pub fn euler_expr(density: &Expr, red: &dyn Reduce) -> Expr {
    let n = order_of(density);
    let mut acc = Expr::zero();
    for k in (0..=n).rev() {
        let d = density.partial(&Atom::Jet(k));
        let inner = if k == n {
            d
        } else {
            &d - &total_derivative_with(&acc, 1, red)
        };
        acc = inner;
    }
    red.reduce(&acc)
}

/// Fréchet derivative `D_Δ(Q) = Σ ∂Δ/∂y^(k) · D_x^k Q`.
pub fn frechet(delta: &Expr, q: &Expr) -> Expr {
    let n = order_of(delta);
    let mut dq = q.clone();
    let mut out = Expr::zero();
    for k in 0..=n {
        if k > 0 {
            dq = total_derivative(&dq, 1);
        }
        out = &out + &(&delta.partial(&Atom::Jet(k)) * &dq);
    }
    out
}

/// Formal adjoint `D_Δ^*(Q) = Σ (-D_x)^k (Q · ∂Δ/∂y^(k))`.
pub fn frechet_adjoint(delta: &Expr, q: &Expr) -> Expr {
    let n = order_of(delta);
    let mut acc = Expr::zero();
    for k in (0..=n).rev() {
        let term = q * &delta.partial(&Atom::Jet(k));
        acc = if k == n {
            term
        } else {
            &term - &total_derivative(&acc, 1)
        };
    }
    acc
}

/// Antiderivative of `a` with respect to the plain atom `b`, treating all
/// other atoms as constants.
fn antiderivative(a: &Expr, b: &Atom) -> Result<Expr, JetError> {
    let mut out = Expr::zero();
    for (m, c) in a.terms() {
        let mut r = Exponent::zero();
        let mut rest = Vec::new();
        for (atom, e) in m.factors() {
            if atom == b {
                r = *e;
            } else {
                if atom.is_elementary() && Expr::atom(atom.clone()).contains_atom(b) {
                    return Err(JetError::NotExact(format!("{b} inside an elementary function")));
                }
                rest.push((atom.clone(), *e));
            }
        }
        let rest = Expr::from_terms([(c.clone(), rest)]);
        let piece = if r == Exponent::from_integer(-1) {
            Expr::atom(b.clone()).ln()?
        } else {
            let r1 = r + Exponent::one();
            Expr::atom(b.clone())
                .pow(r1)?
                .scale(&Coeff::new((*r1.denom()).into(), (*r1.numer()).into()))
        };
        out = &out + &(&rest * &piece);
    }
    Ok(out)
}

fn top_jet_linear_part(p: &Expr, m: u32) -> Result<Expr, JetError> {
    let top = Atom::Jet(m);
    let groups = p.collect_by(&top);
    for (e, part) in &groups {
        if *e != Exponent::zero() && *e != Exponent::one() {
            return Err(JetError::NotExact(format!("nonlinear in {top}")));
        }
        if part.contains_atom(&top) {
            return Err(JetError::NotExact(format!("{top} inside an elementary function")));
        }
    }
    Ok(groups.get(&Exponent::one()).cloned().unwrap_or_else(Expr::zero))
}

/// Finds `F` with `D_x F = P`, constant of integration zero.
pub fn inverse_total_derivative(p: &Expr) -> Result<Expr, JetError> {
    inverse_total_derivative_with(p, &NoReduction)
}

/// Peels the highest derivative: if `P = A y^(m) + B` with `A, B` free of
/// `y^(m)`, then `∫ A dy^(m-1)` is part of the antiderivative. Jets are peeled
/// first, then derivatives of `q`; the remaining pure function of `x` must be
/// a Laurent polynomial.
pub fn inverse_total_derivative_with(p: &Expr, red: &dyn Reduce) -> Result<Expr, JetError> {
    let mut rest = red.reduce(p);
    let mut f = Expr::zero();
    for _ in 0..10_000 {
        if rest.is_zero_literal() {
            return Ok(f);
        }
        let atoms = rest.plain_atoms();
        let top_jet = atoms
            .iter()
            .filter_map(|a| match a {
                Atom::Jet(k) => Some(*k),
                _ => None,
            })
            .max();
        let (top, below) = match top_jet {
            Some(m) if m >= 1 => (Atom::Jet(m), Atom::Jet(m - 1)),
            Some(_) => return Err(JetError::NotExact(format!("residue {rest} depends on y"))),
            None => {
                if atoms
                    .iter()
                    .any(|a| matches!(a, Atom::Sym(SymbolFn::U | SymbolFn::V, _)))
                {
                    return Err(JetError::NotExact(format!("residue {rest} depends on u or v")));
                }
                let top_q = atoms
                    .iter()
                    .filter_map(|a| match a {
                        Atom::Sym(SymbolFn::Q, k) => Some(*k),
                        _ => None,
                    })
                    .max();
                match top_q {
                    Some(k) if k >= 1 => (Atom::Sym(SymbolFn::Q, k), Atom::Sym(SymbolFn::Q, k - 1)),
                    Some(_) => return Err(JetError::NotExact(format!("residue {rest} depends on q"))),
                    None => {
                        if rest.has_elementary() {
                            return Err(JetError::NotExact(format!("non-polynomial residue {rest}")));
                        }
                        return Ok(&f + &antiderivative(&rest, &Atom::X)?);
                    }
                }
            }
        };
        let a = match top {
            Atom::Jet(m) => top_jet_linear_part(&rest, m)?,
            _ => {
                let groups = rest.collect_by(&top);
                if groups.keys().any(|e| *e != Exponent::zero() && *e != Exponent::one()) {
                    return Err(JetError::NotExact(format!("nonlinear in {top}")));
                }
                groups.get(&Exponent::one()).cloned().unwrap_or_else(Expr::zero)
            }
        };
        let g = antiderivative(&a, &below)?;
        f = &f + &g;
        let next = red.reduce(&(&rest - &total_derivative_with(&g, 1, red)));
        if next.contains_atom(&top) {
            return Err(JetError::NotExact(format!("could not eliminate {top}")));
        }
        rest = next;
    }
    Err(JetError::NotExact("iteration limit".into()))
}

/// Integrates a Lagrangian by parts (dropping total derivatives) until its
/// order is at most `target`, then removes every term linear in its own
/// highest derivative, highest derivative first. Quadratic Lagrangians end
/// up as `Σ c_k(x) (y^(k))^2`.
pub fn reduce_lagrangian_order(density: &Expr, target: u32, red: &dyn Reduce) -> Result<Expr, JetError> {
    let mut l = red.reduce(density);
    for _ in 0..10_000 {
        let m = order_of(&l);
        let (level, a) = if m > target {
            let a = top_jet_linear_part(&l, m).map_err(|e| JetError::NotReducible(e.to_string()))?;
            (m, a)
        } else {
            match linear_top_terms(&l) {
                Some(found) => found,
                None => return Ok(l),
            }
        };
        let g = antiderivative(&a, &Atom::Jet(level - 1))?;
        l = red.reduce(&(&l - &total_derivative_with(&g, 1, red)));
    }
    Err(JetError::NotReducible("iteration limit".into()))
}

/// Highest `k >= 1` with terms of the form `A y^(k)`, `A` of lower order,
/// together with the sum of those cofactors `A`.
fn linear_top_terms(l: &Expr) -> Option<(u32, Expr)> {
    let mut best: Option<u32> = None;
    for (m, _) in l.terms() {
        if let Some((k, e)) = top_jet_of_monomial(m.factors()) {
            if k >= 1 && e == Exponent::one() && best.is_none_or(|b| k > b) {
                best = Some(k);
            }
        }
    }
    let k = best?;
    let parts = l.terms().filter_map(|(m, c)| {
        let (tk, e) = top_jet_of_monomial(m.factors())?;
        (tk == k && e == Exponent::one()).then(|| {
            let rest: Vec<_> = m
                .factors()
                .iter()
                .filter(|(a, _)| *a != Atom::Jet(k))
                .cloned()
                .collect();
            (c.clone(), rest)
        })
    });
    Some((k, Expr::from_terms(parts)))
}

fn top_jet_of_monomial(f: &[(Atom, Exponent)]) -> Option<(u32, Exponent)> {
    f.iter()
        .filter_map(|(a, e)| match a {
            Atom::Jet(k) => Some((*k, *e)),
            _ => None,
        })
        .max_by_key(|(k, _)| *k)
}
