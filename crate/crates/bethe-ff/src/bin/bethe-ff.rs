//! Command-line front end: Bethe solving, scalar products, form factors,
//! kernel evaluation, and the randomized verification suites.
//!
//! Exit codes: 0 success, 2 numerical failure, 64 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use bethe_ff::bethe::{solve_bethe_newton, solve_bethe_qnls};
use bethe_ff::error::Error;
use bethe_ff::kernels::{Kernels, Which};
use bethe_ff::model::{BetheState, ModelKind, ModelSpec, RapiditySet};
use bethe_ff::{C64, VERSION};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "bethe-ff", version, about = "Determinant representations for Bethe-Ansatz scalar products and form factors")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct OutputOpts {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (grids also support csv).
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the Bethe equations and certify the residual.
    Solve {
        /// Path to the model JSON file.
        #[arg(long)]
        model: PathBuf,
        /// Quantum numbers (QNLS), comma-separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        qn: Option<Vec<f64>>,
        /// Newton seeds (spin chains), comma-separated `re` or `re:im`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        seeds: Option<Vec<String>>,
        /// Residual certification threshold.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Scalar product of an on-shell state with a free Bethe-Ansatz vector.
    ScalarProduct {
        #[arg(long)]
        model: PathBuf,
        /// Quantum numbers of the on-shell state (QNLS).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        mu_qn: Option<Vec<f64>>,
        /// Newton seeds of the on-shell state (spin chains).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        mu_seeds: Option<Vec<String>>,
        /// Free rapidities, comma-separated `re` or `re:im`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        nu: Vec<String>,
        /// Also evaluate the dual determinant representation (spin chains)
        /// and report the relative gap.
        #[arg(long)]
        dual: bool,
        /// Maximum allowed relative gap between representations.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Form factors: psi, q1 (grids over x), sigma-minus (rows over sites).
    Formfactor {
        #[arg(long)]
        model: PathBuf,
        /// One of psi, q1, sigma-minus.
        #[arg(long)]
        kind: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        mu_qn: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lambda_qn: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        mu_seeds: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lambda_seeds: Option<Vec<String>>,
        /// Position (psi) or grid end point (q1).
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x: f64,
        /// Time (psi only).
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
        /// Number of grid points for q1 (x spans [0, --x] inclusive).
        #[arg(long, default_value_t = 11)]
        steps: usize,
        /// Site index for sigma-minus (defaults to every site).
        #[arg(long)]
        site: Option<usize>,
        /// Maximum allowed relative gap between representations (psi).
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Run a randomized verification suite.
    Verify {
        /// kernels, slavnov, orthogonality, theorem1, appendix, spin, rtt, all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Evaluate the elementary kernels at a point.
    Kernels {
        /// rational or trigonometric.
        #[arg(long, default_value = "rational")]
        variant: String,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Which kernel: f, g, h or t (defaults to all four).
        #[arg(long)]
        which: Option<String>,
        /// First argument, `re` or `re:im`.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// Second argument, `re` or `re:im`.
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[command(flatten)]
        output: OutputOpts,
    },
}

fn parse_complex(s: &str) -> Result<C64, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::InvalidInput(format!("cannot parse complex number `{s}` (use re or re:im)"));
    match parts.as_slice() {
        [re] => Ok(C64::new(re.trim().parse().map_err(|_| bad())?, 0.0)),
        [re, im] => Ok(C64::new(
            re.trim().parse().map_err(|_| bad())?,
            im.trim().parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

fn parse_complex_list(items: &[String]) -> Result<Vec<C64>, Error> {
    items.iter().map(|s| parse_complex(s)).collect()
}

fn load_model(path: &PathBuf) -> Result<ModelSpec, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read model file {}: {e}", path.display())))?;
    let model: ModelSpec = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("malformed model JSON in {}: {e}", path.display())))?;
    model.validate()?;
    Ok(model)
}

fn solve_state(
    model: &ModelSpec,
    qn: &Option<Vec<f64>>,
    seeds: &Option<Vec<String>>,
) -> Result<BetheState, Error> {
    match (model.kind, qn, seeds) {
        (ModelKind::Qnls, Some(qn), None) => solve_bethe_qnls(model, qn),
        (ModelKind::Qnls, None, _) => Err(Error::InvalidInput(
            "qnls states are labelled by quantum numbers; pass --qn (or --mu-qn/--lambda-qn)".into(),
        )),
        (_, None, Some(seeds)) => {
            if seeds.len() == 1 && seeds[0].is_empty() {
                return Ok(empty_state(model));
            }
            solve_bethe_newton(model, &RapiditySet::new(parse_complex_list(seeds)?, "seed"))
        }
        (_, None, None) => Ok(empty_state(model)),
        _ => Err(Error::InvalidInput(
            "pass quantum numbers for qnls or Newton seeds for spin chains, not both".into(),
        )),
    }
}

fn empty_state(model: &ModelSpec) -> BetheState {
    BetheState {
        model: model.clone(),
        roots: RapiditySet::new(vec![], "roots"),
        quantum_numbers: vec![],
        residual: 0.0,
    }
}

fn cpx(z: C64) -> Value {
    json!([z.re, z.im])
}

fn cpx_list(zs: &[C64]) -> Value {
    Value::Array(zs.iter().map(|&z| cpx(z)).collect())
}

fn envelope(model: Option<&ModelSpec>, body: Value) -> Value {
    let mut map = serde_json::Map::new();
    map.insert("version".into(), json!(VERSION));
    if let Some(m) = model {
        map.insert("model".into(), serde_json::to_value(m).unwrap());
    }
    if let Value::Object(fields) = body {
        for (k, v) in fields {
            map.insert(k, v);
        }
    }
    Value::Object(map)
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn emit(output: &OutputOpts, text: String) -> Result<(), Error> {
    match &output.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Resource(format!("cannot write {}: {e}", path.display()))),
        None => {
            if text.ends_with('\n') {
                print!("{text}");
            } else {
                println!("{text}");
            }
            Ok(())
        }
    }
}

fn emit_json(output: &OutputOpts, value: &Value) -> Result<(), Error> {
    if output.format != "json" {
        return Err(Error::InvalidInput(format!(
            "format `{}` is not available for this result (use json)",
            output.format
        )));
    }
    emit(output, serde_json::to_string_pretty(value).expect("serializable"))
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.cmd {
        Cmd::Solve { model, qn, seeds, tol, output } => {
            let model = load_model(&model)?;
            let state = solve_state(&model, &qn, &seeds)?;
            let threshold = tol.unwrap_or(bethe_ff::model::ONSHELL_TOL);
            if state.residual > threshold {
                return Err(Error::OffShell {
                    residual: state.residual,
                    threshold,
                });
            }
            let body = envelope(
                Some(&model),
                json!({
                    "roots": cpx_list(&state.roots.values),
                    "quantum_numbers": state.quantum_numbers,
                    "residual": state.residual,
                }),
            );
            emit_json(&output, &body)?;
            Ok(true)
        }
        Cmd::ScalarProduct { model, mu_qn, mu_seeds, nu, dual, tol, output } => {
            let model = load_model(&model)?;
            let mus = solve_state(&model, &mu_qn, &mu_seeds)?;
            let nus = RapiditySet::new(parse_complex_list(&nu)?, "nu");
            let primary = bethe_ff::scalar::scalar_product(&model, &mus, &nus)?;
            let mut fields = json!({
                "mu": cpx_list(&mus.roots.values),
                "nu": cpx_list(&nus.values),
                "value": cpx(primary.value),
                "condition": primary.condition,
                "representation": primary.representation,
            });
            let mut ok = true;
            if dual {
                let alt = bethe_ff::spin::scalar_product_dual(&model, &mus, &nus)?;
                let gap = (alt.value - primary.value).norm() / primary.value.norm().max(1e-300);
                fields["dual_value"] = cpx(alt.value);
                fields["relative_gap"] = json!(gap);
                ok = gap <= tol.unwrap_or(1e-8);
            }
            emit_json(&output, &envelope(Some(&model), fields))?;
            Ok(ok)
        }
        Cmd::Formfactor {
            model, kind, mu_qn, lambda_qn, mu_seeds, lambda_seeds,
            x, t, steps, site, tol, output,
        } => {
            let model = load_model(&model)?;
            let mus = solve_state(&model, &mu_qn, &mu_seeds)?;
            let lams = solve_state(&model, &lambda_qn, &lambda_seeds)?;
            match kind.as_str() {
                "psi" => {
                    let det = bethe_ff::qnls::ff_psi_xt(x, t, &model, &mus, &lams)?;
                    let sig = bethe_ff::qnls::ff_psi_via_sigma(&model, &mus, &lams)?;
                    let phase = det.value
                        / bethe_ff::qnls::ff_psi_zero(&model, &mus, &lams)?.value;
                    let sig_xt = sig.value * phase;
                    let gap = (det.value - sig_xt).norm() / det.value.norm().max(1e-300);
                    let body = envelope(
                        Some(&model),
                        json!({
                            "kind": "psi",
                            "x": x,
                            "t": t,
                            "mu": cpx_list(&mus.roots.values),
                            "lambda": cpx_list(&lams.roots.values),
                            "value": cpx(det.value),
                            "value_sigma_representation": cpx(sig_xt),
                            "relative_gap": gap,
                            "condition": det.condition,
                        }),
                    );
                    emit_json(&output, &body)?;
                    Ok(gap <= tol.unwrap_or(1e-8))
                }
                "q1" => {
                    let n = steps.max(2);
                    let mut rows = Vec::with_capacity(n);
                    for i in 0..n {
                        let xi = x * i as f64 / (n - 1) as f64;
                        let v = bethe_ff::qnls::ff_q1(xi, &model, &mus, &lams)?.value;
                        rows.push((xi, v));
                    }
                    match output.format.as_str() {
                        "csv" => {
                            let mut text = String::from("x,re,im\n");
                            for (xi, v) in &rows {
                                text.push_str(&format!(
                                    "{},{},{}\n",
                                    fmt17(*xi),
                                    fmt17(v.re),
                                    fmt17(v.im)
                                ));
                            }
                            emit(&output, text)?;
                        }
                        "json" => {
                            let body = envelope(
                                Some(&model),
                                json!({
                                    "kind": "q1",
                                    "mu": cpx_list(&mus.roots.values),
                                    "lambda": cpx_list(&lams.roots.values),
                                    "grid": rows
                                        .iter()
                                        .map(|(xi, v)| json!({"x": xi, "value": cpx(*v)}))
                                        .collect::<Vec<_>>(),
                                }),
                            );
                            emit_json(&output, &body)?;
                        }
                        other => {
                            return Err(Error::InvalidInput(format!(
                                "unknown format `{other}` (use json or csv)"
                            )))
                        }
                    }
                    Ok(true)
                }
                "sigma-minus" => {
                    let sites = model.num_sites()?;
                    let targets: Vec<usize> = match site {
                        Some(m) => vec![m],
                        None => (1..=sites).collect(),
                    };
                    let mut rows = Vec::new();
                    for m in targets {
                        let v = bethe_ff::spin::ff_sigma_minus(&model, &mus, &lams, m)?;
                        rows.push((m, v.value));
                    }
                    match output.format.as_str() {
                        "csv" => {
                            let mut text = String::from("m,re,im\n");
                            for (m, v) in &rows {
                                text.push_str(&format!("{m},{},{}\n", fmt17(v.re), fmt17(v.im)));
                            }
                            emit(&output, text)?;
                        }
                        "json" => {
                            let body = envelope(
                                Some(&model),
                                json!({
                                    "kind": "sigma-minus",
                                    "mu": cpx_list(&mus.roots.values),
                                    "lambda": cpx_list(&lams.roots.values),
                                    "sites": rows
                                        .iter()
                                        .map(|(m, v)| json!({"m": m, "value": cpx(*v)}))
                                        .collect::<Vec<_>>(),
                                }),
                            );
                            emit_json(&output, &body)?;
                        }
                        other => {
                            return Err(Error::InvalidInput(format!(
                                "unknown format `{other}` (use json or csv)"
                            )))
                        }
                    }
                    Ok(true)
                }
                other => Err(Error::InvalidInput(format!(
                    "unknown form-factor kind `{other}` (use psi, q1 or sigma-minus)"
                ))),
            }
        }
        Cmd::Verify { suite, seed, output } => {
            let reports = bethe_ff::verify::run_suite(&suite, seed)?;
            let all_pass = reports.iter().all(|r| r.passed());
            let body = json!({
                "version": VERSION,
                "seed": seed,
                "passed": all_pass,
                "reports": reports,
            });
            emit_json(&output, &body)?;
            Ok(all_pass)
        }
        Cmd::Kernels { variant, c, gamma, which, a, b, output } => {
            let k = match variant.as_str() {
                "rational" => Kernels::rational(c),
                "trigonometric" => Kernels::trigonometric(gamma),
                other => {
                    return Err(Error::InvalidInput(format!(
                        "unknown kernel variant `{other}` (use rational or trigonometric)"
                    )))
                }
            };
            let a = parse_complex(&a)?;
            let b = parse_complex(&b)?;
            let names: Vec<String> = match which {
                Some(w) => vec![w],
                None => ["f", "g", "h", "t"].iter().map(|s| s.to_string()).collect(),
            };
            let mut fields = serde_json::Map::new();
            fields.insert("version".into(), json!(VERSION));
            fields.insert("variant".into(), json!(variant));
            fields.insert("a".into(), cpx(a));
            fields.insert("b".into(), cpx(b));
            for name in names {
                let which: Which = name.parse()?;
                fields.insert(name, cpx(k.eval(which, a, b)?));
            }
            emit_json(&output, &Value::Object(fields))?;
            Ok(true)
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidInput(_) | Error::SiteRange { .. } | Error::Index(_) | Error::Resource(_) => 64,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
