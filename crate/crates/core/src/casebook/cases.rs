use std::error::Error;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{drift, Outcome, Recorder, Trajectory, DRIFT_TOLERANCE};
use crate::expr::{parse, Atom, Expr, Param, SymbolFn};
use crate::jet::{
    euler_expr, inverse_total_derivative_with, total_derivative, total_derivative_with, DiffEq, Lagrangian,
    NoReduction, Reduce, VectorField,
};
use crate::maxsym::{
    build_lode, canonical_lagrangian, commutator, generators, natural_lagrangian, reference, transformed_lagrangian,
    Generator, Role, SourceContext,
};
use crate::noether::{
    divergence_check, divergence_relation_check, first_integral, lagrangian_factor, lie_symmetry_check,
    total_derivative_term_check, variational_check, variational_expression, verify_first_integral,
};
use crate::transform::{
    pushforward, transform_equation, transform_equation_variational, transform_first_integral, transform_lagrangian,
    PointTransformation,
};

type R<T> = Result<T, Box<dyn Error>>;

fn p(s: &str) -> Expr {
    parse(s).expect("built-in expression parses")
}

fn zero(e: Expr) -> R<Outcome> {
    Ok(Outcome::Zero(e))
}

fn drop_q(e: &Expr) -> R<Expr> {
    Ok(e.subst(&|a| matches!(a, Atom::Sym(SymbolFn::Q, _)).then(Expr::zero))?)
}

fn homogeneity() -> VectorField {
    VectorField {
        xi: Expr::zero(),
        psi: Expr::jet(0),
    }
}

/// First integral of `y^(n) = 0` for `y ∂_y`, `n` odd.
fn flat_homogeneity_integral(n: u32) -> Expr {
    let mut acc = Expr::zero();
    for i in 0..n {
        let term = &Expr::jet(i) * &Expr::jet(n - 1 - i);
        acc = if i % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc.scale(&num_rational::BigRational::new(1.into(), 2.into()))
}

pub(super) fn homogeneity_integrals(rec: &mut Recorder) {
    let ctx = SourceContext::symbolic();
    for n in [3u32, 5, 7] {
        let mut found: Option<(DiffEq, Expr)> = None;
        rec.check(
            format!("integral-n{n}"),
            format!("homogeneity first integral, order {n}"),
            || {
                let eq = build_lode(n, &ctx)?;
                let fi = first_integral(&homogeneity(), &eq, &ctx)?;
                let published = reference::homogeneity_integral(n).expect("fixture exists");
                let r = &fi.integral - &published;
                found = Some((eq, fi.integral));
                zero(r)
            },
        );
        let Some((eq, f)) = found else { continue };
        rec.check(
            format!("integral-n{n}-flat-limit"),
            "reduction to the trivial equation at q = 0",
            || zero(&drop_q(&f)? - &flat_homogeneity_integral(n)),
        );
        rec.check(format!("integral-n{n}-multiplier"), "D_x F = y Δ", || {
            zero(&verify_first_integral(&f, &eq, &ctx)? - &Expr::jet(0))
        });
        rec.check(
            format!("integral-n{n}-drift"),
            "RK4 drift with q = 1",
            || -> R<Outcome> {
                let ic: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { 0.0 }).collect();
                let d = drift(&eq, &f, &Expr::one(), &Trajectory::new(&ic, 2.0, 2000))?;
                Ok(Outcome::Measured(d, d < DRIFT_TOLERANCE))
            },
        );
    }
}

pub(super) fn transformed_lagrangians(rec: &mut Recorder) {
    let ctx = SourceContext::symbolic();
    for n in [2u32, 4, 6] {
        let published = ctx.reduce(&reference::transformed_lagrangian(n).expect("fixture exists"));
        let mut computed = None;
        rec.check(
            format!("lagrangian-n{n}"),
            format!("transformed Lagrangian, order {n}"),
            || {
                let l = transformed_lagrangian(n, &ctx)?;
                let r = &l.density - &published;
                computed = Some(l.density);
                zero(r)
            },
        );
        let Some(l) = computed else { continue };
        rec.check(
            format!("lagrangian-n{n}-euler"),
            "Euler-Lagrange expression of the computed form",
            || zero(&euler_expr(&l, &ctx) - &build_lode(n, &ctx)?.delta),
        );
        rec.check(
            format!("lagrangian-n{n}-published-euler"),
            "Euler-Lagrange expression of the published form",
            || zero(&euler_expr(&published, &ctx) - &build_lode(n, &ctx)?.delta),
        );
    }
}

fn expected_variational(n: u32, role: Role) -> bool {
    match role {
        Role::Solution(k) => 2 * k + 2 <= n,
        Role::SlF | Role::SlG => true,
        _ => false,
    }
}

fn expected_divergence(n: u32, role: Role) -> bool {
    match role {
        Role::Solution(_) => true,
        Role::Homogeneity => n % 2 == 1,
        _ => n.is_multiple_of(2),
    }
}

pub(super) fn symmetry_algebras(rec: &mut Recorder) {
    let ctx = SourceContext::symbolic();
    for n in [3u32, 4, 5, 6] {
        let (gens, eq) = match (generators(n), build_lode(n, &ctx)) {
            (Ok(g), Ok(e)) => (g, e),
            (g, e) => {
                rec.check(format!("n{n}-setup"), "generators and equation", || -> R<Outcome> {
                    g?;
                    e?;
                    unreachable!()
                });
                continue;
            }
        };
        let lagrangian = if n % 2 == 0 {
            transformed_lagrangian(n, &ctx).ok()
        } else {
            None
        };
        for Generator { name, role, field } in &gens.generators {
            rec.verdict(
                format!("n{n}-lie-{name}"),
                "point symmetry of the equation",
                true,
                || lie_symmetry_check(field, &eq, &ctx),
            );
            rec.verdict(
                format!("n{n}-div-{name}"),
                "divergence symmetry algebra",
                expected_divergence(n, *role),
                || divergence_check(field, &eq, &ctx),
            );
            if let Some(l) = &lagrangian {
                rec.verdict(
                    format!("n{n}-var-{name}"),
                    "variational symmetry algebra for the transformed Lagrangian",
                    expected_variational(n, *role),
                    || variational_check(field, l, &ctx),
                );
            }
        }
        if n == 4 {
            algebra_structure(rec, &gens.generators, &ctx);
        }
    }
}

fn algebra_structure(rec: &mut Recorder, gens: &[Generator], ctx: &SourceContext) {
    let find = |r: Role| {
        gens.iter()
            .find(|g| g.role == r)
            .map(|g| &g.field)
            .expect("generator present")
    };
    let solutions: Vec<_> = gens.iter().filter(|g| g.role.in_abelian_ideal()).collect();
    rec.check("n4-abelian-ideal", "solution symmetries commute", || -> R<Outcome> {
        for a in &solutions {
            for b in &solutions {
                let c = commutator(&a.field, &b.field, ctx);
                if !c.is_zero()? {
                    return zero(c.psi);
                }
            }
        }
        zero(Expr::zero())
    });
    let w = find(Role::Homogeneity);
    for g in &solutions {
        rec.check(
            format!("n4-bracket-Wy-{}", g.name),
            "homogeneity acts on solution symmetries",
            || {
                let c = commutator(w, &g.field, ctx).add(&g.field);
                if !c.xi.zero_test()? {
                    return zero(c.xi);
                }
                zero(c.psi)
            },
        );
    }
    rec.check("n4-bracket-F-H", "sl(2) bracket [F, H] = -G", || {
        let c = commutator(find(Role::SlF), find(Role::SlH), ctx).add(&find(Role::SlG).map(|e| ctx.reduce(e)));
        if !c.xi.zero_test()? {
            return zero(c.xi);
        }
        zero(c.psi)
    });
}

pub(super) fn solution_symmetries(rec: &mut Recorder) {
    let sym = SourceContext::symbolic();
    let setup = || -> R<_> {
        let u_const = SourceContext::with_solutions(p("1"), p("x"))?;
        let v_const = SourceContext::with_solutions(p("-x"), p("1"))?;
        let l_sym = natural_lagrangian(4, &sym)?;
        let l_u = natural_lagrangian(4, &u_const)?;
        let l_v = natural_lagrangian(4, &v_const)?;
        Ok((u_const, v_const, l_sym, l_u, l_v, generators(4)?))
    };
    let (u_const, v_const, l_sym, l_u, l_v, gens) = match setup() {
        Ok(s) => s,
        Err(e) => {
            rec.check("setup", "natural Lagrangian", || -> R<Outcome> { Err(e) });
            return;
        }
    };
    for k in 0..4u32 {
        let v = gens.get(Role::Solution(k)).expect("generator present");
        rec.verdict(
            format!("V{k}-symbolic-q"),
            "not variational for arbitrary q",
            false,
            || variational_check(v, &l_sym, &sym),
        );
        rec.verdict(format!("V{k}-q0-u-constant"), "q = 0 with u = 1, v = x", k <= 1, || {
            variational_check(v, &l_u, &u_const)
        });
        rec.verdict(
            format!("V{k}-q0-v-constant"),
            "q = 0 with u = -x, v = 1",
            k >= 2,
            || variational_check(v, &l_v, &v_const),
        );
        rec.check(format!("V{k}-y1-coefficient"), "coefficient of y_x in S(V_k)", || {
            let s = variational_expression(v, &l_sym, &sym);
            let c = s.coefficient(&Atom::Jet(1), 1);
            let b0 = format!("({}*v*u1 - {k}*u*v1)", k as i64 - 3);
            let u_pow = format!("u^({})", 2 - k as i64);
            let v_pow = format!("v^({})", k as i64 - 1);
            let expected = sym.reduce(&p(&format!("10*{u_pow}*{v_pow}*q*{b0}")));
            zero(&c - &expected)
        });
    }
}

struct Family<'a> {
    prefix: &'a str,
    label: &'a str,
    u: &'a str,
    v: &'a str,
    role: Role,
    /// Expressions that must vanish on the family, reduced in its context.
    conditions: &'a [(&'a str, &'a str)],
}

fn check_family(rec: &mut Recorder, fam: &Family) {
    let ctx = match SourceContext::with_solutions(p(fam.u), p(fam.v)) {
        Ok(c) => c,
        Err(e) => {
            rec.check(format!("{}-setup", fam.prefix), fam.label, || -> R<Outcome> {
                Err(e.into())
            });
            return;
        }
    };
    for (what, r) in ctx.consistency_residuals() {
        let id = format!("{}-{}", fam.prefix, what.split(' ').next().unwrap_or(what));
        rec.check(id, format!("{}: {what}", fam.label), || zero(ctx.reduce(&r)));
    }
    for (id, cond) in fam.conditions {
        rec.check(
            format!("{}-{id}", fam.prefix),
            format!("{}: {cond} = 0", fam.label),
            || zero(ctx.reduce(&p(cond))),
        );
    }
    rec.verdict(
        format!("{}-variational", fam.prefix),
        format!("{}: variational symmetry", fam.label),
        true,
        || {
            let gens = generators(4)?;
            let l = natural_lagrangian(4, &ctx)?;
            R::Ok(variational_check(
                gens.get(fam.role).expect("generator present"),
                &l,
                &ctx,
            )?)
        },
    );
}

pub(super) fn sl2_families(rec: &mut Recorder) {
    let families = [
        Family {
            prefix: "F4-family",
            label: "F_4 with nonconstant u",
            u: "k2*(2*x - k1)^(1/2)",
            v: "(2*x - k1)^(1/2)/(2*k2)*(2*k2^2*k3 + ln(k1 - 2*x))",
            role: Role::SlF,
            conditions: &[("q", "q - 1/(k1 - 2*x)^2"), ("f-condition", "q - u1^2/u^2")],
        },
        Family {
            prefix: "H4-family",
            label: "H_4 with nonconstant v",
            u: "(2*x - k1)^(1/2)/(2*k2)*(2*k2^2*k3 - ln(k1 - 2*x))",
            v: "k2*(2*x - k1)^(1/2)",
            role: Role::SlH,
            conditions: &[("q", "q - 1/(k1 - 2*x)^2"), ("h-condition", "q - v1^2/v^2")],
        },
        Family {
            prefix: "G4-negative-alpha",
            label: "G_4, negative alpha, lam = -1/2",
            u: "k2/(-alpha)^(1/2)*exp(k1*x)",
            v: "(-1/2)*(-alpha)^(1/2)/(k1*k2*exp(k1*x))",
            role: Role::SlG,
            conditions: &[("g-condition", "q - u1*v1/(u*v)")],
        },
        Family {
            prefix: "G4-positive-alpha",
            label: "G_4, positive alpha",
            u: "k2/alpha^(1/2)*(2*x - k1)^(1/2)",
            v: "lam*alpha^(1/2)/k2*(2*x - k1)^(-3/2)",
            role: Role::SlG,
            conditions: &[("g-condition", "q - u1*v1/(u*v)")],
        },
        Family {
            prefix: "G4-power-law",
            label: "G_4, power-law solution of u*u2 + alpha*u1^2 = 0 with lam = 1",
            u: "k2*(2*x - k1)^(1/3)",
            v: "3/(2*k2)*(2*x - k1)^(2/3)",
            role: Role::SlG,
            conditions: &[("g-condition", "q - u1*v1/(u*v)"), ("reduced-system", "u*u2 + 2*u1^2")],
        },
    ];
    for fam in &families {
        check_family(rec, fam);
    }
    let flat: [(&str, &str, &str, Role); 3] = [
        ("F4-u-constant", "1", "x", Role::SlF),
        ("G4-q0", "1", "x", Role::SlG),
        ("H4-v-constant", "-x", "1", Role::SlH),
    ];
    for (id, u, v, role) in flat {
        rec.verdict(id, "q = 0 specialization", true, || {
            let ctx = SourceContext::with_solutions(p(u), p(v))?;
            let l = natural_lagrangian(4, &ctx)?;
            let gens = generators(4)?;
            R::Ok(variational_check(gens.get(role).expect("generator present"), &l, &ctx)?)
        });
    }
}

/// First integrals `Σ (-1)^i D^i(x^j) y^(3-i)` of `y^(4) = 0`.
fn canonical_integral(j: u32) -> Expr {
    let mut acc = Expr::zero();
    let mut d = Expr::x().pow_i(j as i64);
    for i in 0..4u32 {
        let term = &d * &Expr::jet(3 - i);
        acc = if i % 2 == 0 { &acc + &term } else { &acc - &term };
        d = total_derivative(&d, 1);
    }
    acc
}

fn determinant(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for c in 0..n {
        let pivot = (c..n)
            .max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))
            .unwrap_or(c);
        if m[pivot][c] == 0.0 {
            return 0.0;
        }
        if pivot != c {
            m.swap(pivot, c);
            det = -det;
        }
        det *= m[c][c];
        let (top, bottom) = m.split_at_mut(c + 1);
        let pivot_row = &top[c];
        for row in bottom {
            let f = row[c] / pivot_row[c];
            for (a, b) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *a -= f * b;
            }
        }
    }
    det
}

pub(super) fn nonlinear_example(rec: &mut Recorder) {
    let id = NoReduction;
    let map = PointTransformation {
        zeta: p("x"),
        phi: p("k2 - ln(y)"),
    };
    let published_eq = p(reference::NONLINEAR_EQUATION);
    let trivial = DiffEq::new(Expr::jet(4)).expect("valid equation");
    rec.check("equation", "transformed trivial equation", || {
        zero(&transform_equation(&trivial, &map, &id)?.delta - &published_eq)
    });
    rec.check("equation-general-k1", "general k1 gives a constant multiple", || {
        let general = PointTransformation {
            zeta: p("x"),
            phi: p("k2 - k1*ln(y)"),
        };
        zero(&transform_equation(&trivial, &general, &id)?.delta - &(&p("k1") * &published_eq))
    });
    let eq = DiffEq::new(published_eq.clone()).expect("valid equation");
    let euler_form = transform_equation_variational(&trivial, &map, &id);
    let flat = SourceContext::with_solutions(p("1"), p("x")).expect("valid solutions");
    let gens = generators(4).expect("order 4");
    let published_l = Lagrangian::from_density(p(reference::NONLINEAR_LAGRANGIAN));
    let mut pushed = Vec::new();
    for g in &gens.generators {
        let canonical = g.field.map(|e| flat.reduce(e));
        match pushforward(&canonical, &map, &id) {
            Ok(v) => pushed.push((g.name.clone(), g.role, v)),
            Err(e) => rec.check(format!("generator-{}", g.name), "push-forward", || -> R<Outcome> {
                Err(e.into())
            }),
        }
    }
    for (name, xi, psi) in reference::NONLINEAR_GENERATORS {
        let found = pushed.iter().find(|(n, _, _)| n == name);
        rec.check(
            format!("generator-{name}"),
            "push-forward of the canonical generator",
            || -> R<Outcome> {
                let (_, _, v) = found.ok_or("generator missing")?;
                let dx = &v.xi - &p(xi);
                if !dx.zero_test()? {
                    return zero(dx);
                }
                zero(&v.psi - &p(psi))
            },
        );
    }
    for (name, role, v) in &pushed {
        rec.verdict(
            format!("lie-{name}"),
            "point symmetry of the nonlinear equation",
            true,
            || lie_symmetry_check(v, &eq, &id),
        );
        rec.verdict(
            format!("divergence-{name}"),
            "divergence symmetry of the nonlinear equation",
            *role != Role::Homogeneity,
            || {
                R::Ok(divergence_check(
                    v,
                    euler_form.as_ref().map_err(|e| e.to_string())?,
                    &id,
                )?)
            },
        );
        if *role != Role::Homogeneity {
            rec.verdict(
                format!("variational-{name}"),
                "variational symmetry for the published Lagrangian",
                expected_variational(4, *role),
                || variational_check(v, &published_l, &id),
            );
        }
    }
    rec.check(
        "lagrangian",
        "transformed Lagrangian up to a constant factor",
        || -> R<Outcome> {
            let computed = transform_lagrangian(&canonical_lagrangian(4)?, &map, &id)?;
            let c = lagrangian_factor(&published_l.density, &computed.density, &id)?
                .ok_or("the two Lagrangians give different equations")?;
            zero(&published_l.density - &computed.density.scale(&c))
        },
    );
    let integral = p(reference::NONLINEAR_FIRST_INTEGRAL);
    let signs = [1i64, -1, -1, -1];
    let parts: Vec<Expr> = (0..4)
        .map(|j| integral.partial(&Atom::Param(Param::new(&format!("a{j}")))))
        .collect();
    for (j, part) in parts.iter().enumerate() {
        rec.check(
            format!("first-integral-a{j}"),
            "first integral with multiplier",
            || -> R<Outcome> {
                let mu = verify_first_integral(part, &eq, &id)?;
                if mu.jet_order().unwrap_or(0) >= eq.order {
                    return Err("multiplier is not of lower order".into());
                }
                zero(&total_derivative_with(part, 1, &id) - &(&mu * &eq.delta))
            },
        );
        rec.check(
            format!("first-integral-a{j}-transformed"),
            "image of a canonical first integral",
            || {
                let t = transform_first_integral(&canonical_integral(j as u32), &map, &id)?;
                zero(part - &(&Expr::int(signs[j]) * &t))
            },
        );
        rec.check(format!("first-integral-a{j}-drift"), "RK4 drift", || -> R<Outcome> {
            let run = Trajectory::new(&[1.0, 0.1, 0.05, 0.02], 1.0, 2000).with_param("k2", 0.5);
            let d = drift(&eq, part, &Expr::zero(), &run)?;
            Ok(Outcome::Measured(d, d < DRIFT_TOLERANCE))
        });
    }
    rec.check(
        "first-integral-independence",
        "four independent first integrals",
        || -> R<Outcome> {
            let mut rng = ChaCha8Rng::seed_from_u64(super::WITNESS_SEED);
            let rows: Vec<Vec<f64>> = (0..4)
                .map(|_| {
                    let x = rng.gen_range(0.1..2.0);
                    let jets: Vec<f64> = (0..4).map(|_| rng.gen_range(0.1..2.0)).collect();
                    parts
                        .iter()
                        .map(|e| {
                            e.eval_f64(&|a| match a {
                                Atom::X => Some(x),
                                Atom::Jet(k) => jets.get(*k as usize).copied(),
                                Atom::Param(_) => Some(0.5),
                                _ => None,
                            })
                        })
                        .collect()
                })
                .collect();
            let scale: f64 = rows
                .iter()
                .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
                .product();
            let det = determinant(rows);
            let rel = det.abs() / scale;
            Ok(Outcome::Measured(rel, rel.is_finite() && rel > 1e-9))
        },
    );
}

fn random_polynomial(rng: &mut ChaCha8Rng, atoms: &[Expr], terms: usize) -> Expr {
    let mut acc = Expr::zero();
    for _ in 0..terms {
        let mut t = Expr::int(rng.gen_range(-5..=5));
        for _ in 0..rng.gen_range(0..=3) {
            t = &t * &atoms[rng.gen_range(0..atoms.len())];
        }
        acc = &acc + &t;
    }
    acc
}

pub(super) fn equivalent_lagrangians(rec: &mut Recorder) {
    let ctx = SourceContext::symbolic();
    let wy = homogeneity();
    rec.verdict("free-scaled", "scaled free Lagrangian plus a divergence", true, || {
        divergence_relation_check(&p("-y1^2/2"), &p("y^2"), &p("3"), &wy, &ctx)
    });
    rec.verdict(
        "transformed-n2",
        "second-order transformed Lagrangian plus a divergence",
        true,
        || {
            let l2 = transformed_lagrangian(2, &ctx)?.density;
            let f2 = generators(2)?.get(Role::SlF).expect("generator present").clone();
            R::Ok(divergence_relation_check(&l2, &p("x*y*y1"), &Expr::one(), &f2, &ctx)?)
        },
    );
    let mut potential = None;
    rec.check(
        "natural-minus-transformed",
        "natural and transformed Lagrangians differ by a divergence",
        || {
            let diff = &natural_lagrangian(4, &ctx)?.density - &transformed_lagrangian(4, &ctx)?.density;
            let pot = inverse_total_derivative_with(&diff, &ctx)?;
            let r = ctx.reduce(&(&total_derivative_with(&pot, 1, &ctx) - &diff));
            potential = Some(pot);
            zero(r)
        },
    );
    if let (Some(pot), Ok(gens), Ok(l4)) = (potential, generators(4), transformed_lagrangian(4, &ctx)) {
        for g in &gens.generators {
            rec.verdict(
                format!("relation-{}", g.name),
                "S of the natural Lagrangian splits",
                true,
                || divergence_relation_check(&l4.density, &pot, &Expr::one(), &g.field, &ctx),
            );
            rec.verdict(
                format!("divergence-term-{}", g.name),
                "the extra term is a total derivative",
                true,
                || total_derivative_term_check(&pot, &g.field, &ctx),
            );
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(super::WITNESS_SEED);
    let jets = [p("x"), p("y"), p("y1"), p("y2")];
    let point = [p("x"), p("y")];
    for i in 0..5 {
        let l0 = random_polynomial(&mut rng, &jets, 4);
        let pp = random_polynomial(&mut rng, &jets, 4);
        let theta = Expr::int(rng.gen_range(1..=5));
        let v = VectorField {
            xi: random_polynomial(&mut rng, &point, 2),
            psi: random_polynomial(&mut rng, &point, 2),
        };
        rec.verdict(
            format!("random-{i}"),
            "random Lagrangian, divergence and point field",
            true,
            || divergence_relation_check(&l0, &pp, &theta, &v, &NoReduction),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_integrals_are_integrals() {
        for j in 0..4 {
            let f = canonical_integral(j);
            let d = &total_derivative(&f, 1) - &(&Expr::x().pow_i(j as i64) * &Expr::jet(4));
            assert!(d.is_zero_literal());
        }
    }

    #[test]
    fn flat_integral_is_an_integral() {
        for n in [3, 5, 7] {
            let f = flat_homogeneity_integral(n);
            assert_eq!(total_derivative(&f, 1), &Expr::jet(0) * &Expr::jet(n));
        }
    }

    #[test]
    fn determinant_of_permutation() {
        let m = vec![vec![0.0, 2.0], vec![3.0, 0.0]];
        assert_eq!(determinant(m), -6.0);
    }
}
