//! Command-line front end for the deformed angular momentum calculus.
//!
//! Exit codes: 0 success, 1 verification failure (residual beyond
//! tolerance, non-unitary parameters, broken invariant), 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use defangmom::jsonio::{document, radical_to_json};
use defangmom::repbuilder::{
    casimir_eigenvalues, realize, reduced_matrix_elements, verify_realization,
    DeformationParams, SpectralParam, UnirrepLabel,
};
use defangmom::{float_tol, parse_rational, parse_twice, parse_twice_signed};
use defangmom_core::angmom::{clebsch_gordan, racah_unitary, racah_w, AngMom};
use defangmom_core::exactnum::Rational;
use defangmom_core::quaddef;
use defangmom_core::tensoralg::jacobi_conditions;
use defangmom_core::vectordef::{
    check_associativity, closed_form_discrepancies, fourth_order_closed_form, solve_invariant,
    verify_invariant, RecursionTable, VectorDeformation,
};
use num_traits::ToPrimitive;

#[derive(Parser)]
#[command(
    name = "defangmom",
    version,
    about = "Exact calculus and matrix realizations for polynomial deformations \
             of so(4), so(3,1) and e(3) with undeformed so(3)"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the report to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact Clebsch-Gordan coefficient <j1 m1, j2 m2 | j m>
    Cg {
        j1: String,
        #[arg(allow_hyphen_values = true)]
        m1: String,
        j2: String,
        #[arg(allow_hyphen_values = true)]
        m2: String,
        j: String,
        #[arg(allow_hyphen_values = true)]
        m: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact Racah coefficients W(abcd;ef) and U(abcd;ef)
    Racah {
        a: String,
        b: String,
        c: String,
        d: String,
        e: String,
        f: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// The reduction coefficients of [A, L^2k]^1 over the canonical basis
    Table1 {
        #[arg(long, default_value_t = 5)]
        kmax: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Verify ([A, L^2k] x L)^0 = 0 exactly for k <= order
    Associativity {
        #[arg(long, default_value_t = 6)]
        order: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve the deformed quadratic invariant C = sum b_k L^2k + A.A
    Casimir {
        /// bracket series a0,a1,... (rationals)
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
        /// expected deformation order (checked against the series)
        #[arg(long)]
        order: Option<usize>,
        /// print the quoted fourth-order closed form and the typo report
        #[arg(long)]
        compare_paper: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Triple-bracket consistency conditions for a rank-lambda tensor
    Jacobi {
        #[arg(long)]
        lambda: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// First-order obstruction of the deformed quadrupole algebra
    Quadrupole {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Realize and verify a unitary irreducible representation
    Rep {
        /// so4 | so31 | e3
        #[arg(long)]
        algebra: String,
        /// p,q (so4) | l0,c with c real or iNU (so31) | l0,eps (e3)
        #[arg(long)]
        label: String,
        /// bracket series a0,a1,... (a0 fixed by the algebra)
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
        /// number of blocks above l0 kept for the infinite towers
        #[arg(long, default_value_t = 10)]
        cutoff: u32,
        /// check the defining relations and fail on residuals beyond tolerance
        #[arg(long)]
        verify: bool,
        /// also write the JSON report to this file
        #[arg(long)]
        json: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Verification failed: report with exit code 1 instead of 2.
#[derive(Debug)]
struct VerificationFailure(String);

impl std::fmt::Display for VerificationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for VerificationFailure {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.is::<VerificationFailure>() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn emit(output: &OutputArgs, text: String, doc: Value) -> Result<()> {
    let payload = match output.format {
        Format::Text => text,
        Format::Json => serde_json::to_string_pretty(&doc)? + "\n",
    };
    match &output.out {
        Some(path) => std::fs::write(path, payload)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{payload}"),
    }
    Ok(())
}

fn angmom_arg(name: &str, s: &str) -> Result<AngMom> {
    parse_twice(s)
        .map(AngMom::from_twice)
        .ok_or_else(|| anyhow!("{name}: expected an angular momentum like 2 or 3/2, got {s:?}"))
}

fn proj_arg(name: &str, s: &str) -> Result<i32> {
    parse_twice_signed(s)
        .ok_or_else(|| anyhow!("{name}: expected a projection like -1 or 3/2, got {s:?}"))
}

fn rational_args(raw: &[String]) -> Result<Vec<Rational>> {
    raw.iter()
        .map(|s| {
            parse_rational(s).ok_or_else(|| anyhow!("--params: not a rational number: {s:?}"))
        })
        .collect()
}

fn rational_json(q: &Rational) -> Value {
    json!({
        "exact": q.to_string(),
        "float": q.to_f64().unwrap_or(f64::NAN),
    })
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Cg { j1, m1, j2, m2, j, m, output } => {
            let (j1, j2, j) = (
                angmom_arg("j1", &j1)?,
                angmom_arg("j2", &j2)?,
                angmom_arg("j", &j)?,
            );
            let (tm1, tm2, tm) = (proj_arg("m1", &m1)?, proj_arg("m2", &m2)?, proj_arg("m", &m)?);
            let value = clebsch_gordan(j1, tm1, j2, tm2, j, tm);
            let text = format!("<{j1} {}, {j2} {} | {j} {}> = {value} = {}\n",
                half_str(tm1), half_str(tm2), half_str(tm), value.to_f64());
            let mut fields = Map::new();
            fields.insert("value".into(), radical_to_json(&value));
            emit(&output, text, document("cg", fields))
        }
        Cmd::Racah { a, b, c, d, e, f, output } => {
            let [a, b, c, d, e, f] = [
                angmom_arg("a", &a)?,
                angmom_arg("b", &b)?,
                angmom_arg("c", &c)?,
                angmom_arg("d", &d)?,
                angmom_arg("e", &e)?,
                angmom_arg("f", &f)?,
            ];
            let w = racah_w(a, b, c, d, e, f);
            let u = racah_unitary(a, b, c, d, e, f);
            let text = format!(
                "W({a}{b}{c}{d};{e}{f}) = {w} = {}\nU({a}{b}{c}{d};{e}{f}) = {u} = {}\n",
                w.to_f64(),
                u.to_f64()
            );
            let mut fields = Map::new();
            fields.insert("w".into(), radical_to_json(&w));
            fields.insert("u".into(), radical_to_json(&u));
            emit(&output, text, document("racah", fields))
        }
        Cmd::Table1 { kmax, output } => {
            let table = RecursionTable::new(kmax);
            let mut text = String::new();
            let mut rows = Vec::new();
            for k in 1..=kmax {
                for (series, imax) in [("x", k), ("y", k), ("z", k.saturating_sub(1))] {
                    if imax == 0 {
                        continue;
                    }
                    let entries: Vec<_> = (0..imax)
                        .map(|i| match series {
                            "x" => table.x_at(k, i as isize),
                            "y" => table.y_at(k, i as isize),
                            _ => table.z_at(k, i as isize),
                        })
                        .collect();
                    let shown: Vec<String> =
                        entries.iter().map(|v| format!("{v}")).collect();
                    text.push_str(&format!("{series}^({k}) = [{}]\n", shown.join(", ")));
                    rows.push(json!({
                        "series": series,
                        "k": k,
                        "entries": entries.iter().map(radical_to_json).collect::<Vec<_>>(),
                    }));
                }
            }
            let mut fields = Map::new();
            fields.insert("kmax".into(), json!(kmax));
            fields.insert("rows".into(), Value::Array(rows));
            emit(&output, text, document("table1", fields))
        }
        Cmd::Associativity { order, output } => {
            let ok = check_associativity(order).map_err(|e| anyhow!("{e}"))?;
            let text = format!(
                "([A, L^2k] x L)^0 = 0 for all k <= {order}: {}\n",
                if ok { "pass" } else { "FAIL" }
            );
            let mut fields = Map::new();
            fields.insert("order".into(), json!(order));
            fields.insert("pass".into(), json!(ok));
            emit(&output, text, document("associativity", fields))?;
            if !ok {
                bail!(VerificationFailure("associativity check failed".into()));
            }
            Ok(())
        }
        Cmd::Casimir { params, order, compare_paper, output } => {
            let a = rational_args(&params)?;
            if a.is_empty() {
                bail!("--params requires at least a0");
            }
            let def = VectorDeformation::new(a);
            if let Some(k) = order {
                if k != def.order() {
                    bail!("--order {k} does not match the series (order {})", def.order());
                }
            }
            let coeffs = solve_invariant(&def).map_err(|e| anyhow!("{e:?}"))?;
            let verified = verify_invariant(&def, &coeffs).map_err(|e| anyhow!("{e}"))?;
            let mut text = String::new();
            let mut fields = Map::new();
            text.push_str(&format!("C = sum_k b_k L^2k + A.A with K = {}\n", def.order()));
            let mut b_json = Vec::new();
            for (i, b) in coeffs.b.iter().enumerate() {
                text.push_str(&format!(
                    "  b_{} = {} = {}\n",
                    i + 1,
                    b,
                    b.to_f64().unwrap_or(f64::NAN)
                ));
                b_json.push(rational_json(b));
            }
            text.push_str(&format!(
                "word-level check [A, C]^1 = 0: {}\n",
                if verified { "pass" } else { "FAIL" }
            ));
            fields.insert("order".into(), json!(def.order()));
            fields.insert("b".into(), Value::Array(b_json));
            fields.insert("verified".into(), json!(verified));
            if compare_paper {
                if def.order() > 4 {
                    bail!("--compare-paper covers deformation orders up to 4");
                }
                let quoted = fourth_order_closed_form(&def);
                let diffs = closed_form_discrepancies(&def).map_err(|e| anyhow!("{e:?}"))?;
                text.push_str("quoted fourth-order closed form:\n");
                for (i, q) in quoted.iter().enumerate() {
                    text.push_str(&format!("  b_{} = {}\n", i + 1, q));
                }
                if diffs.is_empty() {
                    text.push_str("closed form agrees with the exact solver\n");
                } else {
                    for (k, solved, quoted) in &diffs {
                        text.push_str(&format!(
                            "  b_{k} disagrees: solver {solved}, quoted {quoted} \
                             (the quoted b3 repeats a3 where a2 is meant)\n"
                        ));
                    }
                }
                fields.insert(
                    "quoted".into(),
                    Value::Array(quoted.iter().map(rational_json).collect()),
                );
                fields.insert(
                    "discrepancies".into(),
                    Value::Array(
                        diffs
                            .iter()
                            .map(|(k, s, q)| {
                                json!({
                                    "k": k,
                                    "solver": rational_json(s),
                                    "quoted": rational_json(q),
                                })
                            })
                            .collect(),
                    ),
                );
            }
            emit(&output, text, document("casimir", fields))?;
            if !verified {
                bail!(VerificationFailure("invariant verification failed".into()));
            }
            Ok(())
        }
        Cmd::Jacobi { lambda, output } => {
            if lambda == 0 {
                bail!("--lambda must be at least 1");
            }
            let report = jacobi_conditions(lambda);
            let mut text = format!(
                "consistency conditions for a rank-{lambda} tensor: {} independent\n",
                report.independent.len()
            );
            let mut conds = Vec::new();
            for cond in &report.independent {
                let terms: Vec<String> = cond
                    .coeffs
                    .iter()
                    .map(|(l12, c)| format!("({c}) [T,[T,T]^{l12}]^{}", cond.lambda_total))
                    .collect();
                text.push_str(&format!("  {} = 0\n", terms.join(" + ")));
                conds.push(json!({
                    "outer_rank": cond.lambda_total,
                    "coeffs": cond
                        .coeffs
                        .iter()
                        .map(|(l12, c)| json!({
                            "inner_rank": l12,
                            "coeff": radical_to_json(c),
                        }))
                        .collect::<Vec<_>>(),
                }));
            }
            let mut fields = Map::new();
            fields.insert("lambda".into(), json!(lambda));
            fields.insert("independent".into(), Value::Array(conds));
            fields.insert("raw_count".into(), json!(report.raw.len()));
            emit(&output, text, document("jacobi", fields))
        }
        Cmd::Quadrupole { output } => {
            let report = quaddef::first_order_obstruction().map_err(|e| anyhow!("{e}"))?;
            let verdict = if report.only_trivial {
                "non-associative at first order"
            } else {
                "unexpectedly admits a first-order deformation"
            };
            let solution_space = if report.only_trivial { "trivial" } else { "nontrivial" };
            let mut text = format!(
                "first-order quadrupole obstruction: rank {} over (a, b)\n",
                report.rank
            );
            let mut conds = Vec::new();
            for c in &report.conditions {
                text.push_str(&format!(
                    "  outer {}: ({}) a + ({}) b = 0 on {}\n",
                    c.outer,
                    c.coeff_a,
                    c.coeff_b,
                    c.core.name("Q")
                ));
                conds.push(json!({
                    "outer": c.outer,
                    "l2_power": c.l2_power,
                    "core": c.core.name("Q"),
                    "coeff_a": radical_to_json(&c.coeff_a),
                    "coeff_b": radical_to_json(&c.coeff_b),
                }));
            }
            text.push_str(&format!(
                "solution space: {solution_space}\nverdict: {verdict}\n"
            ));
            let mut fields = Map::new();
            fields.insert("conditions".into(), Value::Array(conds));
            fields.insert("rank".into(), json!(report.rank));
            fields.insert("solution_space".into(), json!(solution_space));
            fields.insert("verdict".into(), json!(verdict));
            emit(&output, text, document("quadrupole", fields))?;
            if !report.only_trivial {
                bail!(VerificationFailure("obstruction unexpectedly degenerate".into()));
            }
            Ok(())
        }
        Cmd::Rep { algebra, label, params, cutoff, verify, json: json_path, output } => {
            let label = parse_label(&algebra, &label)?;
            label.validate()?;
            let params = if params.is_empty() {
                DeformationParams::undeformed(&label)
            } else {
                let a = rational_args(&params)?;
                let p = DeformationParams::new(a);
                if p.coeff(0) != label.base_coeff() {
                    bail!(
                        "a0 must be {} for {}",
                        label.base_coeff(),
                        label.algebra_name()
                    );
                }
                p
            };
            let (text, doc, max_residual) =
                rep_report(&label, &params, cutoff, verify).map_err(|e| {
                    anyhow!(VerificationFailure(format!("{e}")))
                })?;
            if let Some(path) = &json_path {
                std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            emit(&output, text, doc)?;
            if verify {
                if let Some(r) = max_residual {
                    if r > float_tol() {
                        bail!(VerificationFailure(format!(
                            "residual {r:.3e} exceeds tolerance {:.3e}",
                            float_tol()
                        )));
                    }
                }
            }
            Ok(())
        }
    }
}

fn half_str(tm: i32) -> String {
    if tm % 2 == 0 {
        format!("{}", tm / 2)
    } else {
        format!("{tm}/2")
    }
}

fn parse_label(algebra: &str, label: &str) -> Result<UnirrepLabel> {
    let parts: Vec<&str> = label.split(',').collect();
    if parts.len() != 2 {
        bail!("--label expects two comma-separated values");
    }
    match algebra {
        "so4" => {
            let twice_p = parse_twice(parts[0])
                .ok_or_else(|| anyhow!("--label: bad p value {:?}", parts[0]))?;
            let twice_q = parse_twice_signed(parts[1])
                .ok_or_else(|| anyhow!("--label: bad q value {:?}", parts[1]))?;
            Ok(UnirrepLabel::So4 { twice_p, twice_q })
        }
        "so31" => {
            let twice_l0 = parse_twice(parts[0])
                .ok_or_else(|| anyhow!("--label: bad l0 value {:?}", parts[0]))?;
            let cs = parts[1].trim();
            let c = if let Some(nu) = cs.strip_prefix('i') {
                SpectralParam::Imaginary(nu.parse().context("--label: bad imaginary c")?)
            } else {
                SpectralParam::Real(cs.parse().context("--label: bad c value")?)
            };
            Ok(UnirrepLabel::So31 { twice_l0, c })
        }
        "e3" => {
            let twice_l0 = parse_twice(parts[0])
                .ok_or_else(|| anyhow!("--label: bad l0 value {:?}", parts[0]))?;
            let eps: f64 = parts[1].trim().parse().context("--label: bad eps value")?;
            Ok(UnirrepLabel::E3 { twice_l0, eps })
        }
        other => bail!("--algebra must be so4, so31 or e3 (got {other:?})"),
    }
}

fn rep_report(
    label: &UnirrepLabel,
    params: &DeformationParams,
    cutoff: u32,
    verify: bool,
) -> Result<(String, Value, Option<f64>)> {
    let red = reduced_matrix_elements(label, params, cutoff)?;
    let (c1, c2) = casimir_eigenvalues(label, params)?;
    let m = realize(label, params, cutoff)?;

    let mut text = format!(
        "{} unirrep {label}, tower dimension {}\n",
        label.algebra_name(),
        m.dim
    );
    let mut red_rows = Vec::new();
    text.push_str("reduced matrix elements <l'||A||l>:\n");
    for (i, &tl) in red.tower.iter().enumerate() {
        let l = half_str(tl as i32);
        text.push_str(&format!(
            "  l = {l:>4}: <l||A||l> = {:+.12}, <l-1||A||l> = {:+.12}\n",
            red.diag[i], red.lower[i]
        ));
        red_rows.push(json!({
            "twice_l": tl,
            "diag": red.diag[i],
            "lower": red.lower[i],
            "upper": red.upper(i),
        }));
    }
    // spectral values from the realized Casimir matrices
    let spectral_c1 = m.c1d[(0, 0)].re;
    let spectral_c2 = m.c2d[(0, 0)].re;
    text.push_str(&format!(
        "Casimir closed form: C1d = {c1:.12}, C2d = {c2:.12}\n\
         Casimir spectral:    C1d = {spectral_c1:.12}, C2d = {spectral_c2:.12}\n"
    ));

    let mut fields = Map::new();
    fields.insert("algebra".into(), json!(label.algebra_name()));
    fields.insert("label".into(), json!(label.to_string()));
    fields.insert(
        "params".into(),
        Value::Array(params.coeffs().iter().map(rational_json).collect()),
    );
    fields.insert("dimension".into(), json!(m.dim));
    fields.insert("reduced_matrix_elements".into(), Value::Array(red_rows));
    fields.insert(
        "casimir".into(),
        json!({
            "closed_form": { "c1d": c1, "c2d": c2 },
            "spectral": { "c1d": spectral_c1, "c2d": spectral_c2 },
        }),
    );

    let mut max_residual = None;
    if verify {
        let rep = verify_realization(&m);
        max_residual = Some(rep.max());
        text.push_str(&format!(
            "residuals{}: [L,L] {:.3e}, [L,A] {:.3e}, [A,A] {:.3e}, \
             [C1d,A] {:.3e}, [C2d,A] {:.3e}, hermiticity {:.3e}, \
             casimir scalar deviation {:.3e}\n",
            if rep.interior_only { " (interior)" } else { "" },
            rep.ll,
            rep.la,
            rep.aa,
            rep.c1_comm,
            rep.c2_comm,
            rep.herm_l.max(rep.herm_a),
            rep.casimir_scalar_dev,
        ));
        fields.insert(
            "residuals".into(),
            json!({
                "ll": rep.ll,
                "la": rep.la,
                "aa": rep.aa,
                "c1_comm": rep.c1_comm,
                "c2_comm": rep.c2_comm,
                "hermiticity": rep.herm_l.max(rep.herm_a),
                "casimir_scalar_dev": rep.casimir_scalar_dev,
                "interior_only": rep.interior_only,
                "max": rep.max(),
                "tolerance": float_tol(),
            }),
        );
    }
    Ok((text, document("rep", fields), max_residual))
}
