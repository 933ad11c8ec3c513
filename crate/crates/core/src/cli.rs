//! Command-line front end. `run` returns the process exit code: 0 when every
//! claim holds, 1 when a refutation was found, 2 on usage or parse errors.

use std::fmt::Display;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::casebook::{emit_reports, run_cases, CaseId, ReportFormat};
use crate::expr::{parse, Expr};
use crate::jet::{euler_expr, DiffEq, Lagrangian, NoReduction, Reduce, VectorField};
use crate::maxsym::{
    build_lode, canonical_lagrangian, generators, natural_lagrangian, transformed_lagrangian, SourceContext,
};
use crate::noether::{divergence_check, first_integral, lie_symmetry_check, variational_check, SymmetryVerdict};
use crate::transform::{
    pushforward, transform_equation, transform_first_integral, transform_lagrangian, PointTransformation,
};

#[derive(Debug, Parser)]
#[command(
    name = "maxsym",
    version,
    about = "Symmetries, Lagrangians and first integrals of ODEs of maximal symmetry"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Point symmetry generators of the order-n linear equation.
    Generators {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        source: Source,
    },
    /// The order-n linear equation of maximal symmetry.
    BuildLode {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        source: Source,
    },
    /// A Lagrangian of the order-n equation (n even).
    Lagrangian {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum)]
        kind: LagrangianKind,
        #[command(flatten)]
        source: Source,
    },
    /// Decides whether a vector field is a symmetry.
    Check {
        #[arg(long, value_enum)]
        kind: CheckKind,
        /// Vector field as "xi; psi".
        #[arg(long)]
        vf: String,
        #[arg(long, conflicts_with = "lagrangian")]
        eq: Option<String>,
        #[arg(long)]
        lagrangian: Option<String>,
        /// Order of the equation or Lagrangian.
        #[arg(long)]
        order: Option<u32>,
        #[command(flatten)]
        source: Source,
    },
    /// First integral attached to a divergence symmetry of the order-n equation.
    FirstIntegral {
        #[arg(long)]
        vf: String,
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        source: Source,
    },
    /// Applies a point transformation "z = ...; w = ..." to an object.
    Transform {
        #[arg(long)]
        map: String,
        #[command(flatten)]
        target: Target,
    },
    /// Runs reproduction cases.
    Reproduce {
        /// C1..C7 or all.
        case: String,
        /// Also writes the JSON report to this path.
        #[arg(long)]
        json: Option<std::path::PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Source {
    /// Potential of the source equation; symbolic when omitted, `0` selects u = 1, v = x.
    #[arg(long)]
    q: Option<String>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Target {
    #[arg(long)]
    eq: Option<String>,
    #[arg(long)]
    lagrangian: Option<String>,
    #[arg(long)]
    vf: Option<String>,
    #[arg(long)]
    integral: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LagrangianKind {
    Canonical,
    Transformed,
    Natural,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CheckKind {
    Lie,
    Variational,
    Divergence,
}

enum Failure {
    Usage(String),
    Refuted(String),
}

fn usage(e: impl Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn expr(flag: &str, text: &str) -> Result<Expr, Failure> {
    parse(text).map_err(|e| Failure::Usage(format!("--{flag}: parse error at {e}")))
}

fn vector_field(text: &str) -> Result<VectorField, Failure> {
    let (xi, psi) = text.split_once(';').ok_or_else(|| usage("--vf expects \"xi; psi\""))?;
    VectorField::new(expr("vf", xi)?, expr("vf", psi)?).map_err(usage)
}

fn point_map(text: &str) -> Result<PointTransformation, Failure> {
    let mut zeta = None;
    let mut phi = None;
    for part in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (lhs, rhs) = part
            .split_once('=')
            .ok_or_else(|| usage("--map expects \"z = ...; w = ...\""))?;
        match lhs.trim() {
            "z" => zeta = Some(expr("map", rhs)?),
            "w" => phi = Some(expr("map", rhs)?),
            other => return Err(usage(format!("--map: unknown component `{other}`"))),
        }
    }
    let (Some(zeta), Some(phi)) = (zeta, phi) else {
        return Err(usage("--map needs both z and w"));
    };
    PointTransformation::new(zeta, phi).map_err(usage)
}

fn context(source: &Source) -> Result<SourceContext, Failure> {
    match source.q.as_deref() {
        None => Ok(SourceContext::symbolic()),
        Some(text) => {
            let q = expr("q", text)?;
            if q.is_zero_literal() {
                SourceContext::with_solutions(Expr::one(), Expr::x()).map_err(usage)
            } else {
                Ok(SourceContext::with_q(q))
            }
        }
    }
}

#[derive(Serialize)]
struct GeneratorJson {
    name: String,
    xi: String,
    psi: String,
}

fn verdict_text(v: &SymmetryVerdict) -> Result<String, Failure> {
    let body = format!("kind: {}\nholds: {}\nwitness: {}\n", kind_name(v), v.holds, v.witness);
    if v.holds {
        Ok(body)
    } else {
        Err(Failure::Refuted(body))
    }
}

fn kind_name(v: &SymmetryVerdict) -> String {
    serde_json::to_value(v.kind)
        .ok()
        .and_then(|j| j.as_str().map(String::from))
        .unwrap_or_default()
}

fn dispatch(command: Command) -> Result<String, Failure> {
    match command {
        Command::Generators { n, json, source } => {
            let ctx = context(&source)?;
            let set = generators(n).map_err(usage)?;
            let rows: Vec<GeneratorJson> = set
                .generators
                .iter()
                .map(|g| GeneratorJson {
                    name: g.name.clone(),
                    xi: ctx.reduce(&g.field.xi).to_string(),
                    psi: ctx.reduce(&g.field.psi).to_string(),
                })
                .collect();
            if json {
                Ok(serde_json::to_string(&rows).expect("generators serialize") + "\n")
            } else {
                Ok(rows
                    .iter()
                    .map(|g| format!("{}: xi = {}; psi = {}\n", g.name, g.xi, g.psi))
                    .collect())
            }
        }
        Command::BuildLode { n, source } => {
            let eq = build_lode(n, &context(&source)?).map_err(usage)?;
            Ok(format!("{}\n", eq.delta))
        }
        Command::Lagrangian { n, kind, source } => {
            let ctx = context(&source)?;
            let l = match kind {
                LagrangianKind::Canonical => canonical_lagrangian(n),
                LagrangianKind::Transformed => transformed_lagrangian(n, &ctx),
                LagrangianKind::Natural => natural_lagrangian(n, &ctx),
            }
            .map_err(usage)?;
            Ok(format!("{}\n", l.density))
        }
        Command::Check {
            kind,
            vf,
            eq,
            lagrangian,
            order,
            source,
        } => {
            let order =
                order.ok_or_else(|| usage("--order is required to fix the order of the equation or Lagrangian"))?;
            let ctx = context(&source)?;
            let v = vector_field(&vf)?;
            let lagrangian = match lagrangian {
                Some(text) => Some(Lagrangian::new(ctx.reduce(&expr("lagrangian", &text)?), order).map_err(usage)?),
                None => None,
            };
            let equation = match (&eq, &lagrangian) {
                (Some(text), _) => {
                    let e = DiffEq::new(ctx.reduce(&expr("eq", text)?)).map_err(usage)?;
                    if e.order != order {
                        return Err(usage(format!(
                            "--order {order} does not match the equation order {}",
                            e.order
                        )));
                    }
                    Some(e)
                }
                (None, Some(l)) => Some(DiffEq::new(euler_expr(&l.density, &ctx)).map_err(usage)?),
                (None, None) => return Err(usage("one of --eq or --lagrangian is required")),
            };
            let verdict = match kind {
                CheckKind::Variational => {
                    let l = lagrangian.ok_or_else(|| usage("variational checks need --lagrangian"))?;
                    variational_check(&v, &l, &ctx)
                }
                CheckKind::Lie => lie_symmetry_check(&v, equation.as_ref().expect("equation present"), &ctx),
                CheckKind::Divergence => divergence_check(&v, equation.as_ref().expect("equation present"), &ctx),
            }
            .map_err(usage)?;
            verdict_text(&verdict)
        }
        Command::FirstIntegral { vf, n, source } => {
            let ctx = context(&source)?;
            let v = vector_field(&vf)?;
            let eq = build_lode(n, &ctx).map_err(usage)?;
            match first_integral(&v, &eq, &ctx) {
                Ok(fi) => Ok(format!("{}\n", fi.integral)),
                Err(e) => Err(Failure::Refuted(format!("{e}\n"))),
            }
        }
        Command::Transform { map, target } => {
            let map = point_map(&map)?;
            let red = NoReduction;
            if let Some(text) = target.eq {
                let eq = DiffEq::new(expr("eq", &text)?).map_err(usage)?;
                Ok(format!(
                    "{}\n",
                    transform_equation(&eq, &map, &red).map_err(usage)?.delta
                ))
            } else if let Some(text) = target.lagrangian {
                let l = Lagrangian::from_density(expr("lagrangian", &text)?);
                Ok(format!(
                    "{}\n",
                    transform_lagrangian(&l, &map, &red).map_err(usage)?.density
                ))
            } else if let Some(text) = target.vf {
                let v = pushforward(&vector_field(&text)?, &map, &red).map_err(usage)?;
                Ok(format!("xi = {}; psi = {}\n", v.xi, v.psi))
            } else {
                let f = expr("integral", target.integral.as_deref().unwrap_or_default())?;
                Ok(format!(
                    "{}\n",
                    transform_first_integral(&f, &map, &red).map_err(usage)?
                ))
            }
        }
        Command::Reproduce { case, json } => {
            let ids: Vec<CaseId> = if case.eq_ignore_ascii_case("all") {
                CaseId::ALL.to_vec()
            } else {
                vec![case.parse().map_err(usage)?]
            };
            let reports = run_cases(&ids);
            if let Some(path) = json {
                std::fs::write(&path, emit_reports(&reports, ReportFormat::Json) + "\n")
                    .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            }
            let text = emit_reports(&reports, ReportFormat::Text);
            if reports.iter().all(|r| r.all_verified()) {
                Ok(text)
            } else {
                Err(Failure::Refuted(text))
            }
        }
    }
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(Failure::Refuted(text)) => {
            let _ = out.write_all(text.as_bytes());
            1
        }
        Err(Failure::Usage(message)) => {
            let _ = writeln!(err, "error: {message}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("maxsym").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn eight_generators_for_order_four() {
        let (code, out, _) = call(&["generators", "--n", "4"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 8);
    }

    #[test]
    fn generator_json_reparses() {
        let (code, out, _) = call(&["generators", "--n", "4", "--json", "--q", "0"]);
        assert_eq!(code, 0);
        let rows: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
        assert_eq!(rows.len(), 8);
        for row in rows {
            let xi = row["xi"].as_str().unwrap();
            assert_eq!(parse(xi).unwrap().to_string(), xi);
        }
    }

    #[test]
    fn missing_order_is_a_usage_error() {
        let (code, _, err) = call(&["check", "--kind", "divergence", "--vf", "0;y", "--eq", "y2+q*y"]);
        assert_eq!(code, 2);
        assert!(err.contains("--order"));
    }

    #[test]
    fn homogeneity_is_a_divergence_symmetry_of_odd_order() {
        let (code, out, _) = call(&[
            "check",
            "--kind",
            "divergence",
            "--vf",
            "0;y",
            "--eq",
            "y3 + 4*q*y1 + 2*q1*y",
            "--order",
            "3",
        ]);
        assert_eq!(code, 0, "{out}");
        let (code, _, _) = call(&[
            "check",
            "--kind",
            "divergence",
            "--vf",
            "0;y",
            "--eq",
            "y2 + q*y",
            "--order",
            "2",
        ]);
        assert_eq!(code, 1);
    }

    #[test]
    fn parse_errors_have_positions() {
        let (code, _, err) = call(&["build-lode", "--n", "4", "--q", "x +* 2"]);
        assert_eq!(code, 2);
        assert!(err.contains("line 1, column"), "{err}");
    }

    #[test]
    fn unknown_flags_are_rejected() {
        assert_eq!(call(&["generators", "--n", "4", "--bogus"]).0, 2);
    }

    #[test]
    fn transform_accepts_new_coordinates() {
        let (code, out, _) = call(&["transform", "--map", "z = x; w = k2 - ln(y)", "--vf", "1; 0"]);
        assert_eq!(code, 0);
        assert_eq!(out, "xi = 1; psi = 0\n");
    }

    #[test]
    fn third_order_first_integral() {
        let (code, out, _) = call(&["first-integral", "--vf", "0;y", "--n", "3"]);
        assert_eq!(code, 0);
        assert!(parse(out.trim()).is_ok());
    }
}
