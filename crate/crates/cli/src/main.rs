use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use wbrst_core::brst::{self, BrstCurrent, NilpotencyReport};
use wbrst_core::cft::{self, A2Mode};
use wbrst_core::ope::{jacobi_check, parse_algebra_with, parse_field_expr, validate_table, IssueKind, OpeAlgebra};
use wbrst_core::oracle::{self, OracleError};
use wbrst_core::qla::omega::{Nilpotency, Omega};
use wbrst_core::qla::{self, QlaFile};
use wbrst_core::syntax::parse_scalar;
use wbrst_core::{OpeEngine, OpeError, Rational, Var};

#[derive(Parser)]
#[command(name = "wbrst", version, about = "Exact BRST checks for quantum Lie algebras and chiral W-algebras")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Quantum Lie algebra definition files.
    #[command(subcommand)]
    Qla(QlaCmd),
    /// OPE algebras and the W3 / W3^(2) BRST currents.
    #[command(subcommand)]
    Cft(CftCmd),
    /// Fock-space cross-validation of free ghost sectors.
    #[command(subcommand)]
    Oracle(OracleCmd),
}

#[derive(Subcommand)]
enum QlaCmd {
    /// Run every axiom, twist and proof-identity check.
    Check { file: String },
    /// Build the BRST charge and square it.
    Brst { file: String },
}

#[derive(Args)]
struct Bindings {
    /// Bind a parameter, e.g. `--set c=100`.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    set: Vec<String>,
    /// Value of the a2 definition, when the algebra has one.
    #[arg(long, value_name = "printed|consistent")]
    a2: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    W3,
    W32,
}

#[derive(Subcommand)]
enum CftCmd {
    /// Grading and exchange-symmetry checks on an OPE table.
    Validate {
        file: String,
        #[command(flatten)]
        bind: Bindings,
    },
    /// Singular part of the OPE of two expressions.
    Ope {
        file: String,
        a: String,
        b: String,
        #[command(flatten)]
        bind: Bindings,
    },
    /// Associativity residuals for three expressions.
    Jacobi {
        file: String,
        a: String,
        b: String,
        c: String,
        #[command(flatten)]
        bind: Bindings,
    },
    /// Nilpotency of a bundled BRST current.
    Brst {
        #[arg(value_enum)]
        family: Family,
        #[arg(long, allow_hyphen_values = true)]
        g1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        g2: Option<String>,
        /// Leave g1 and g2 symbolic.
        #[arg(long, conflicts_with_all = ["g1", "g2"])]
        symbolic_g: bool,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "symbolic_c")]
        c: Option<String>,
        #[arg(long)]
        symbolic_c: bool,
        #[arg(long, default_value = "consistent")]
        a2: String,
    },
    /// Central charges at which a current family is nilpotent.
    Critical {
        #[arg(value_enum)]
        family: Family,
        #[arg(long, default_value = "consistent")]
        a2: String,
    },
    /// The ghost deformation that makes the W3 current cubic.
    SolveConventional,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Compare engine OPEs of all generator pairs with mode matrices.
    Crosscheck {
        file: String,
        #[arg(long, default_value_t = 4)]
        level: u32,
        #[arg(long = "set", value_name = "NAME=VALUE")]
        set: Vec<String>,
    },
}

/// Bad input: exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Run = Result<Outcome, InputError>;

struct Outcome {
    passed: bool,
    text: String,
    json: Value,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Qla(c) => run_qla(c),
        Cmd::Cft(c) => run_cft(c),
        Cmd::Oracle(c) => run_oracle(c),
    };
    match res {
        Ok(o) => {
            match cli.format {
                Format::Text => print!("{}", o.text),
                Format::Json => println!("{}", serde_json::to_string_pretty(&o.json).expect("JSON value")),
            }
            if o.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(InputError(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

/// A path, or the name of a bundled file with or without its extension.
fn load(file: &str, bundled: &[(&str, &'static str)]) -> Result<String, InputError> {
    let p = Path::new(file);
    if p.exists() {
        return std::fs::read_to_string(p).map_err(|e| InputError(format!("{file}: {e}")));
    }
    let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or(file);
    bundled
        .iter()
        .find(|(n, _)| *n == stem)
        .map(|(_, s)| s.to_string())
        .ok_or_else(|| InputError(format!("{file}: no such file or bundled definition")))
}

fn rational(s: &str) -> Result<Rational, InputError> {
    parse_scalar(s, &[], false)
        .ok()
        .and_then(|v| v.as_constant())
        .ok_or_else(|| InputError(format!("'{s}' is not an exact rational")))
}

fn load_qla(file: &str) -> Result<QlaFile, InputError> {
    let src = load(file, &qla::BUNDLED)?;
    qla::parse_qla(&src).map_err(|e| InputError(format!("{file}:{e}")))
}

fn run_qla(cmd: QlaCmd) -> Run {
    match cmd {
        QlaCmd::Check { file } => {
            let f = load_qla(&file)?;
            let r = qla::check_all(&f.data, &f.twist);
            let checks: Vec<Value> = r
                .checks
                .iter()
                .map(|c| {
                    let first: Vec<Value> = c
                        .residual
                        .nonzero_entries()
                        .into_iter()
                        .take(4)
                        .map(|(u, l, k)| json!({"upper": u, "lower": l, "value": k.to_string()}))
                        .collect();
                    json!({"name": c.name, "passed": c.passed(), "residual": first})
                })
                .collect();
            Ok(Outcome {
                passed: r.passed(),
                text: r.summary(),
                json: json!({"passed": r.passed(), "checks": checks}),
            })
        }
        QlaCmd::Brst { file } => {
            let f = load_qla(&file)?;
            let om = Omega::new(&f.data, &f.twist)?;
            let q = om.build_q()?;
            let sq = om.verify_nilpotent(&q)?;
            let (passed, residual) = match &sq {
                Nilpotency::Zero => (true, "0".to_string()),
                Nilpotency::Residual(r) => (false, r.to_string()),
            };
            let verdict = if passed { "nilpotent" } else { "not nilpotent" };
            Ok(Outcome {
                passed,
                text: format!("Q = {q}\nQ^2 = {residual}\n{verdict}\n"),
                json: json!({"charge": q.to_string(), "verdict": verdict, "square": residual}),
            })
        }
    }
}

const ALGEBRAS: [(&str, &str); 5] = [
    ("virasoro", cft::VIRASORO_ALG),
    ("w3", cft::W3_ALG),
    ("w3_ghosts", cft::W3_GHOSTS_ALG),
    ("w32", cft::W32_ALG),
    ("w32_ghosts", cft::W32_GHOSTS_ALG),
];

fn a2_mode(s: &str) -> Result<A2Mode, InputError> {
    A2Mode::parse(s).ok_or_else(|| InputError(format!("--a2 must be 'printed' or 'consistent', not '{s}'")))
}

fn load_algebra(file: &str, set: &[String], a2: Option<&str>) -> Result<OpeAlgebra, InputError> {
    let src = load(file, &ALGEBRAS)?;
    let overrides = match a2 {
        Some(m) => vec![("a2".to_string(), a2_mode(m)?.value())],
        None => Vec::new(),
    };
    let alg = parse_algebra_with(&src, &overrides).map_err(|e| InputError(format!("{file}:{e}")))?;
    if a2.is_some() && alg.def("a2").is_none() {
        return Err(InputError(format!("{file}: --a2 given but the algebra defines no a2")));
    }
    let mut bind = Vec::new();
    for b in set {
        let (n, v) = b
            .split_once('=')
            .ok_or_else(|| InputError(format!("binding '{b}' is not NAME=VALUE")))?;
        let n = n.trim();
        if !alg.params().iter().any(|p| p == n) {
            return Err(InputError(format!("unknown parameter '{n}'")));
        }
        bind.push((Var::new(n), rational(v.trim())?));
    }
    Ok(alg.specialize(&bind)?)
}

fn expr(engine: &OpeEngine<'_>, src: &str) -> Result<wbrst_core::FieldExpr, InputError> {
    parse_field_expr(engine, src).map_err(|e| InputError(format!("'{src}' at {e}")))
}

fn run_cft(cmd: CftCmd) -> Run {
    match cmd {
        CftCmd::Validate { file, bind } => {
            let alg = load_algebra(&file, &bind.set, bind.a2.as_deref())?;
            let r = validate_table(&alg)?;
            let mut text = format!("{} pairs checked\n", r.pairs_checked);
            let mut issues = Vec::new();
            for i in &r.issues {
                let kind = match i.kind {
                    IssueKind::Grading { .. } => "grading",
                    IssueKind::Exchange => "exchange",
                };
                let res = alg.show(&i.residual);
                text.push_str(&format!("FAIL  {} {} pole {}: {kind} residual {res}\n", i.a, i.b, i.pole));
                issues.push(json!({"a": i.a, "b": i.b, "pole": i.pole, "kind": kind, "residual": res}));
            }
            if r.passed() {
                text.push_str("pass\n");
            }
            Ok(Outcome {
                passed: r.passed(),
                text,
                json: json!({"passed": r.passed(), "pairs_checked": r.pairs_checked, "issues": issues}),
            })
        }
        CftCmd::Ope { file, a, b, bind } => {
            let alg = load_algebra(&file, &bind.set, bind.a2.as_deref())?;
            let e = OpeEngine::new(&alg);
            let (x, y) = (expr(&e, &a)?, expr(&e, &b)?);
            let s = e.ope_expr(&x, &y)?;
            let poles: Vec<Value> = s
                .iter()
                .rev()
                .map(|(n, p)| json!({"pole": n, "field": alg.show(p)}))
                .collect();
            let shown = alg.show_series(&s);
            Ok(Outcome {
                passed: true,
                text: format!("{}\n", if shown.is_empty() { "regular" } else { &shown }),
                json: json!({"poles": poles}),
            })
        }
        CftCmd::Jacobi { file, a, b, c, bind } => {
            let alg = load_algebra(&file, &bind.set, bind.a2.as_deref())?;
            let e = OpeEngine::new(&alg);
            let (x, y, z) = (expr(&e, &a)?, expr(&e, &b)?, expr(&e, &c)?);
            let r = jacobi_check(&e, &x, &y, &z, None)?;
            let mut text = format!("{} index pairs checked\n", r.residuals.len());
            let mut fails = Vec::new();
            for (p, q, res) in r.failures() {
                let s = alg.show(res);
                text.push_str(&format!("FAIL  p={p} q={q}: {s}\n"));
                fails.push(json!({"p": p, "q": q, "residual": s}));
            }
            if r.passed() {
                text.push_str("pass\n");
            }
            Ok(Outcome {
                passed: r.passed(),
                text,
                json: json!({"passed": r.passed(), "checked": r.residuals.len(), "failures": fails}),
            })
        }
        CftCmd::Brst {
            family,
            g1,
            g2,
            symbolic_g,
            c,
            symbolic_c,
            a2,
        } => {
            let mode = a2_mode(&a2)?;
            let c = match (&c, symbolic_c) {
                (Some(v), _) => Some(rational(v)?),
                (None, true) => None,
                (None, false) => Some(match family {
                    Family::W3 => Rational::from_integer(100.into()),
                    Family::W32 => Rational::from_integer((-2).into()),
                }),
            };
            let q = match family {
                Family::W3 => {
                    let zero = Rational::default();
                    let g = |v: &Option<String>| -> Result<Option<Rational>, InputError> {
                        match (v, symbolic_g) {
                            (_, true) => Ok(None),
                            (Some(s), false) => Ok(Some(rational(s)?)),
                            (None, false) => Ok(Some(zero.clone())),
                        }
                    };
                    brst::brst_w3(c.as_ref(), g(&g1)?.as_ref(), g(&g2)?.as_ref(), mode)?
                }
                Family::W32 => {
                    if g1.is_some() || g2.is_some() || symbolic_g {
                        return Err(InputError("--g1/--g2 apply to w3 only".into()));
                    }
                    brst::brst_w32(c.as_ref())?
                }
            };
            let rep = brst::nilpotency(&q)?;
            let roots = if c.is_none() && !rep.nilpotent {
                critical_roots(&rep)?
            } else {
                Vec::new()
            };
            Ok(nilpotency_outcome(&q, &rep, &roots))
        }
        CftCmd::Critical { family, a2 } => {
            let mode = a2_mode(&a2)?;
            let zero = Rational::default();
            let q = match family {
                Family::W3 => brst::brst_w3(None, Some(&zero), Some(&zero), mode)?,
                Family::W32 => brst::brst_w32(None)?,
            };
            let roots = brst::critical_charge(&q)?;
            let shown: Vec<String> = roots.iter().map(|r| r.to_string()).collect();
            Ok(Outcome {
                passed: !roots.is_empty(),
                text: format!("critical c: [{}]\n", shown.join(", ")),
                json: json!({"critical_roots": shown}),
            })
        }
        CftCmd::SolveConventional => {
            let (g1, g2) = brst::solve_conventional()?;
            Ok(Outcome {
                passed: true,
                text: format!("g1={g1} g2={g2}\n"),
                json: json!({"g1": g1.to_string(), "g2": g2.to_string()}),
            })
        }
    }
}

fn critical_roots(rep: &NilpotencyReport) -> Result<Vec<Rational>, InputError> {
    let only_c = rep
        .obstruction
        .terms()
        .all(|(_, k)| k.vars().iter().all(|v| *v == cft::c_var()));
    if !only_c {
        return Ok(Vec::new());
    }
    Ok(brst::critical_values(&rep.obstruction, cft::c_var())?)
}

fn nilpotency_outcome(q: &BrstCurrent, rep: &NilpotencyReport, roots: &[Rational]) -> Outcome {
    let alg = q.algebra();
    let obstruction = alg.show(&rep.obstruction);
    let roots: Vec<String> = roots.iter().map(|r| r.to_string()).collect();
    let unconventional: Vec<Value> = brst::unconventional_terms(q)
        .iter()
        .map(|(m, k)| json!({"monomial": alg.show_monomial(m), "coefficient": k.to_string()}))
        .collect();
    let mut text = format!(
        "verdict: {}\nobstruction: {obstruction}\ncritical_roots: [{}]\n",
        rep.verdict(),
        roots.join(", ")
    );
    for u in &unconventional {
        text.push_str(&format!("unconventional: {} * {}\n", u["coefficient"].as_str().unwrap_or(""), u["monomial"].as_str().unwrap_or("")));
    }
    Outcome {
        passed: rep.nilpotent,
        text,
        json: json!({
            "verdict": rep.verdict(),
            "obstruction": obstruction,
            "critical_roots": roots,
            "unconventional_terms": unconventional,
        }),
    }
}

fn run_oracle(cmd: OracleCmd) -> Run {
    let OracleCmd::Crosscheck { file, level, set } = cmd;
    let alg = load_algebra(&file, &set, None)?;
    let e = OpeEngine::new(&alg);
    let pairs = oracle::generator_pairs(&alg);
    let r = oracle::crosscheck(&e, &pairs, level).map_err(|e| match e {
        OracleError::Ope(OpeError::Invalid(m)) => InputError(m),
        other => InputError(other.to_string()),
    })?;
    let mismatch = r.mismatch.as_ref().map(|m| {
        json!({
            "a": m.a, "b": m.b, "pole": m.pole, "mode": m.mode.to_string(),
            "source": m.source, "target": m.target,
            "engine": m.engine.to_string(), "oracle": m.oracle.to_string(),
        })
    });
    let mut text = format!(
        "level {}: {} pairs, {} matrix elements compared\n",
        r.level, r.pairs_checked, r.entries_compared
    );
    match &r.mismatch {
        None => text.push_str("match\n"),
        Some(m) => text.push_str(&format!(
            "MISMATCH  [{} {}]_{} mode {}: <{}| ... |{}> engine {} oracle {}\n",
            m.a, m.b, m.pole, m.mode, m.target, m.source, m.engine, m.oracle
        )),
    }
    Ok(Outcome {
        passed: r.passed(),
        text,
        json: json!({
            "passed": r.passed(), "level": r.level, "pairs_checked": r.pairs_checked,
            "entries_compared": r.entries_compared, "mismatch": mismatch,
        }),
    })
}
