use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{coeff_f64, exponent_f64, Atom, Coeff, Exponent, Expr, ExprError};

/// Number of random points used when the normal form cannot decide.
pub const SAMPLE_COUNT: usize = 20;
/// Relative tolerance for numerical vanishing.
pub const ZERO_TOLERANCE: f64 = 1e-9;

const MAX_ATTEMPTS: usize = 400;
const DEFAULT_SEED: u64 = 0x005e_ed0f_2e70;

/// Result of evaluating an expression at random points.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericWitness {
    pub samples: usize,
    pub max_abs: f64,
    /// Largest `|value| / sum |term|` over the samples.
    pub max_rel: f64,
}

impl NumericWitness {
    /// True when some sample is non-zero beyond the tolerance.
    pub fn certifies_nonzero(&self) -> bool {
        self.samples > 0 && self.max_rel > ZERO_TOLERANCE
    }
}

/// Draws `count` assignments of values in `(1/10, 10)` to the given atoms.
/// Values are rationals with denominator 100.
pub fn sample_points(atoms: &BTreeSet<Atom>, count: usize, seed: u64) -> Vec<HashMap<Atom, f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            atoms
                .iter()
                .map(|a| (a.clone(), rng.gen_range(11..1000) as f64 / 100.0))
                .collect()
        })
        .collect()
}

impl Expr {
    /// Floating-point evaluation. Atoms without a value evaluate to NaN.
    pub fn eval_f64(&self, env: &dyn Fn(&Atom) -> Option<f64>) -> f64 {
        self.eval_scaled(env).0
    }

    /// Value together with the sum of absolute term values.
    pub fn eval_scaled(&self, env: &dyn Fn(&Atom) -> Option<f64>) -> (f64, f64) {
        let mut value = 0.0;
        let mut scale = 0.0;
        for (m, c) in self.terms() {
            let mut t = coeff_f64(c);
            for (a, r) in m.factors() {
                let base = match a {
                    Atom::Ln(g) => g.eval_f64(env).abs().ln(),
                    Atom::Exp(g) => g.eval_f64(env).exp(),
                    Atom::Pow(g) => g.eval_f64(env),
                    _ => env(a).unwrap_or(f64::NAN),
                };
                t *= if r.is_integer() {
                    base.powi(r.to_integer() as i32)
                } else {
                    base.powf(exponent_f64(*r))
                };
            }
            value += t;
            scale += t.abs();
        }
        (value, scale)
    }

    /// Evaluates at up to [`SAMPLE_COUNT`] random points where the expression
    /// is finite.
    pub fn numeric_witness(&self, seed: u64) -> NumericWitness {
        let atoms = self.plain_atoms();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = NumericWitness {
            samples: 0,
            max_abs: 0.0,
            max_rel: 0.0,
        };
        for _ in 0..MAX_ATTEMPTS {
            if w.samples == SAMPLE_COUNT {
                break;
            }
            let point: HashMap<Atom, f64> = atoms
                .iter()
                .map(|a| (a.clone(), rng.gen_range(11..1000) as f64 / 100.0))
                .collect();
            let (v, s) = self.eval_scaled(&|a| point.get(a).copied());
            if !v.is_finite() || !s.is_finite() {
                continue;
            }
            w.samples += 1;
            w.max_abs = w.max_abs.max(v.abs());
            if s > 0.0 {
                w.max_rel = w.max_rel.max(v.abs() / s);
            }
        }
        w
    }

    /// Multiplies through by the non-monomial denominators (negative powers
    /// of `Pow` atoms) until none remain.
    pub fn clear_denominators(&self) -> Expr {
        let mut e = self.clone();
        for _ in 0..64 {
            let mut mins: BTreeMap<Atom, Exponent> = BTreeMap::new();
            for (m, _) in e.terms() {
                for (a, r) in m.factors() {
                    if let Atom::Pow(g) = a {
                        if g.is_constant() || !r.is_negative() {
                            continue;
                        }
                        let slot = mins.entry(a.clone()).or_insert(*r);
                        if *r < *slot {
                            *slot = *r;
                        }
                    }
                }
            }
            if mins.is_empty() {
                return e;
            }
            let factors: Vec<(Atom, Exponent)> = mins.into_iter().map(|(a, r)| (a, -r)).collect();
            e = Expr::from_terms(e.terms().map(|(m, c)| {
                let mut f = m.factors().to_vec();
                f.extend(factors.iter().cloned());
                (c.clone(), f)
            }));
        }
        e
    }

    /// Rewrites `ln` of monomials as sums of logarithms of their factors.
    pub fn expand_logs(&self) -> Result<Expr, ExprError> {
        self.subst(&|a| {
            let Atom::Ln(g) = a else { return None };
            let (m, c) = g.single_term()?;
            if !c.is_positive() || (c.is_one() && m.factors().len() == 1 && m.factors()[0].1.is_one()) {
                return None;
            }
            let ln_int = |n: &num_bigint::BigInt| Expr::atom(Atom::Ln(Expr::constant(Coeff::from_integer(n.clone()))));
            let mut out = Expr::zero();
            if !c.numer().is_one() {
                out = &out + &ln_int(c.numer());
            }
            if !c.denom().is_one() {
                out = &out - &ln_int(c.denom());
            }
            for (b, r) in m.factors() {
                let inner = Expr::atom(b.clone()).ln().ok()?;
                let k = Coeff::new((*r.numer()).into(), (*r.denom()).into());
                out = &out + &inner.scale(&k);
            }
            Some(out)
        })
    }

    /// Decides `self ≡ 0`.
    ///
    /// Rational expressions are decided exactly from the normal form after
    /// clearing denominators. With fractional powers, logarithms or
    /// exponentials left over, the expression is evaluated at random points:
    /// any sample above the relative tolerance proves it non-zero; if all
    /// vanish, the logarithm expansion is tried before giving up with
    /// [`ExprError::Inconclusive`].
    pub fn zero_test(&self) -> Result<bool, ExprError> {
        if self.is_zero_literal() {
            return Ok(true);
        }
        let cleared = self.clear_denominators();
        if cleared.is_zero_literal() {
            return Ok(true);
        }
        if !cleared.has_elementary() {
            return Ok(false);
        }
        let w = self.numeric_witness(DEFAULT_SEED);
        if w.samples == 0 {
            return Err(ExprError::Inconclusive("no finite sample point".into()));
        }
        if w.certifies_nonzero() {
            return Ok(false);
        }
        let expanded = cleared.expand_logs()?.clear_denominators();
        if expanded.is_zero_literal() {
            return Ok(true);
        }
        Err(ExprError::Inconclusive(format!(
            "normal form is non-zero but vanishes at {} sample points",
            w.samples
        )))
    }

    /// Evaluates with every plain atom set from `values`; missing atoms are NaN.
    pub fn eval_at(&self, values: &HashMap<Atom, f64>) -> f64 {
        self.eval_f64(&|a| values.get(a).copied())
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn log_identity_decided_by_sampling() {
        let e = parse("ln(x^2) - 2*ln(x)").unwrap();
        assert!(!e.is_zero_literal());
        assert_eq!(e.zero_test(), Ok(true));
    }

    #[test]
    fn formal_polynomials_are_decided_exactly() {
        assert_eq!(parse("u*v1 - u1*v - 1").unwrap().zero_test(), Ok(false));
        assert_eq!(parse("0*y2").unwrap().zero_test(), Ok(true));
    }

    #[test]
    fn non_zero_elementary_expression() {
        let e = parse("ln(x) - x").unwrap();
        assert_eq!(e.zero_test(), Ok(false));
        assert!(e.numeric_witness(3).certifies_nonzero());
    }

    #[test]
    fn rational_identity_with_sum_denominators() {
        let e = parse("1/(x+1) + 1/(x-1) - 2*x/(x^2-1)").unwrap();
        assert_eq!(e.zero_test(), Ok(true));
    }

    #[test]
    fn sample_points_are_in_range() {
        let atoms: BTreeSet<Atom> = [Atom::X, Atom::Jet(0)].into_iter().collect();
        for p in sample_points(&atoms, 20, 1) {
            for v in p.values() {
                assert!(*v > 0.1 && *v < 10.0);
            }
        }
    }
}
