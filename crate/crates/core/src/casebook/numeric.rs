//! Numerical cross-check of first integrals along RK4 trajectories.

use std::collections::HashMap;

use crate::expr::{Atom, Expr, Param};
use crate::jet::{DiffEq, Reduce};
use crate::maxsym::SourceContext;
use crate::noether::FirstIntegral;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericError {
    #[error("singularity at x = {x}: {what}")]
    SingularityEncountered { x: f64, what: String },
    #[error("expected {expected} initial values, got {got}")]
    InitialValues { expected: usize, got: usize },
    #[error("steps must be positive")]
    NoSteps,
}

/// Integration setup: initial point, interval and parameter values.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub x0: f64,
    pub initial: Vec<f64>,
    pub span: f64,
    pub steps: usize,
    pub params: Vec<(String, f64)>,
}

impl Trajectory {
    pub fn new(initial: &[f64], span: f64, steps: usize) -> Self {
        Trajectory {
            x0: 0.0,
            initial: initial.to_vec(),
            span,
            steps,
            params: Vec::new(),
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.push((name.to_string(), value));
        self
    }

    pub fn starting_at(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }
}

/// Maximum of `|F(x) - F(x0)| / max(1, |F(x0)|)` along the RK4 solution of
/// the equation with `q` replaced by `q_concrete`.
pub fn numeric_validate(fi: &FirstIntegral, q_concrete: &Expr, run: &Trajectory) -> Result<f64, NumericError> {
    drift(&fi.equation, &fi.integral, q_concrete, run)
}

/// Same check for an arbitrary candidate `integral`.
pub fn drift(eq: &DiffEq, integral: &Expr, q_concrete: &Expr, run: &Trajectory) -> Result<f64, NumericError> {
    let n = eq.order as usize;
    if run.initial.len() != n {
        return Err(NumericError::InitialValues {
            expected: n,
            got: run.initial.len(),
        });
    }
    if run.steps == 0 {
        return Err(NumericError::NoSteps);
    }
    let ctx = SourceContext::with_q(q_concrete.clone());
    let rhs = ctx.reduce(&eq.solved_rhs());
    let f = ctx.reduce(integral);
    let params: HashMap<Atom, f64> = run
        .params
        .iter()
        .map(|(k, v)| (Atom::Param(Param::new(k)), *v))
        .collect();
    let eval = |e: &Expr, x: f64, state: &[f64]| -> Result<f64, NumericError> {
        let value = e.eval_f64(&|a| match a {
            Atom::X => Some(x),
            Atom::Jet(k) => state.get(*k as usize).copied(),
            other => params.get(other).copied(),
        });
        if value.is_finite() {
            Ok(value)
        } else {
            Err(NumericError::SingularityEncountered { x, what: e.to_string() })
        }
    };
    let field = |x: f64, s: &[f64]| -> Result<Vec<f64>, NumericError> {
        let mut d: Vec<f64> = s[1..].to_vec();
        d.push(eval(&rhs, x, s)?);
        Ok(d)
    };
    let h = run.span / run.steps as f64;
    let mut x = run.x0;
    let mut s = run.initial.clone();
    let f0 = eval(&f, x, &s)?;
    let scale = f0.abs().max(1.0);
    let mut worst: f64 = 0.0;
    let axpy = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p + t * q).collect() };
    for _ in 0..run.steps {
        let k1 = field(x, &s)?;
        let k2 = field(x + h / 2.0, &axpy(&s, &k1, h / 2.0))?;
        let k3 = field(x + h / 2.0, &axpy(&s, &k2, h / 2.0))?;
        let k4 = field(x + h, &axpy(&s, &k3, h))?;
        for i in 0..n {
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        x += h;
        worst = worst.max((eval(&f, x, &s)? - f0).abs() / scale);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn linear_momentum_of_free_motion_is_exact() {
        let eq = DiffEq::new(p("y2")).unwrap();
        let d = drift(&eq, &p("y1"), &Expr::zero(), &Trajectory::new(&[0.3, -1.7], 5.0, 100)).unwrap();
        assert!(d < 1e-14);
    }

    #[test]
    fn third_order_homogeneity_integral() {
        let eq = DiffEq::new(p("y3 + 4*q*y1 + 2*q1*y")).unwrap();
        let run = Trajectory::new(&[1.0, 0.0, 1.0], 2.0, 2000);
        let good = drift(&eq, &p("2*q*y^2 - y1^2/2 + y*y2"), &Expr::one(), &run).unwrap();
        assert!(good < 1e-6, "{good}");
        let bad = drift(&eq, &p("101/50*q*y^2 - y1^2/2 + y*y2"), &Expr::one(), &run).unwrap();
        assert!(bad > 1e-3, "{bad}");
    }

    #[test]
    fn pole_is_reported() {
        let eq = DiffEq::new(p("y2 + y/x")).unwrap();
        let run = Trajectory::new(&[1.0, 0.0], 1.0, 10).starting_at(0.0);
        assert!(matches!(
            drift(&eq, &p("y1"), &Expr::zero(), &run),
            Err(NumericError::SingularityEncountered { .. })
        ));
    }
}
