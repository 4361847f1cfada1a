//! The `mlc` command-line front end.
//!
//! Exit codes: 0 ok, 1 threshold failure, 2 rejected input, 3 numerical
//! non-convergence.

mod args;
mod config;
pub mod format;
mod point;

use std::f64::consts::PI;
use std::fs;
use std::io::Write;

use clap::Parser;
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

pub use args::{Cli, Command, Format, Method, Sweep, Target, COMMANDS};
use args::{CompareArgs, EvalArgs, GridArgs, InvarianceArgs, OutputOpts, SelftestArgs, WindowArgs};
use format::{csv_line, g17, opt_g17};
pub use point::Status;
use point::{eval_gamma, eval_ml, gamma_spec, lambda_spec, zeta_spec, Record};

use crate::acceptance::{run_suite, spread, Selection};
use crate::contour::{
    default_ml_deltas, gamma_psi_window, max_ml_delta, min_ml_delta, ml_arg_window,
    validate_gamma_contour, GammaContourSpec, LambdaSpec, MLContourSpec,
};
use crate::gamma::{recip_gamma_contour, recip_gamma_lambda};
use crate::ml::{compare_methods, ml_contour, CompareSpecs, MLParams, Outcome as MethodOutcome};
use crate::polar::PolarComplex;
use crate::quadrature::QuadratureConfig;

/// Environment variable capping grid worker threads (0 or unset: automatic).
pub const THREADS_ENV: &str = "MLC_THREADS";

struct Failure {
    code: i32,
    message: String,
}

fn reject(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

impl From<crate::Error> for Failure {
    fn from(err: crate::Error) -> Self {
        Failure {
            code: point::classify(&err).exit_code(),
            message: err.to_string(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

/// Runs the CLI on `args` (including the program name), with the grid
/// worker count taken from `MLC_THREADS`.
pub fn run(args: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    run_with_threads(args, threads_from_env(), out, err)
}

/// [`run`] with an explicit worker count (0: automatic).
pub fn run_with_threads(
    args: Vec<String>,
    threads: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let args = match config::expand_config(args, &COMMANDS) {
        Ok(a) => a,
        Err(m) => {
            let _ = writeln!(err, "error: {m}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(a, out, err),
        Command::Grid(a) => cmd_grid(a, threads, out),
        Command::Invariance(a) => cmd_invariance(a, out, err),
        Command::Window(a) => cmd_window(a, out),
        Command::Compare(a) => cmd_compare(a, out),
        Command::Selftest(a) => cmd_selftest(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(opts: &OutputOpts, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match &opts.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| reject(format!("cannot write {}: {e}", path.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| reject(format!("cannot write output: {e}"))),
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn ml_params(opts: &args::MlOpts) -> Result<MLParams, Failure> {
    let rho = opts.rho.ok_or_else(|| reject("--rho is required"))?;
    let params = MLParams::new(rho, Complex64::new(opts.mu_re, opts.mu_im));
    params.validate()?;
    Ok(params)
}

fn z_point(opts: &args::ZOpts) -> Result<PolarComplex, Failure> {
    let m = opts.z_mod.ok_or_else(|| reject("--z-mod is required"))?;
    let a = opts.arg().ok_or_else(|| reject("--z-arg or --z-arg-pi is required"))?;
    Ok(PolarComplex::new(m, a)?)
}

fn s_point(opts: &args::GammaOpts) -> Result<Complex64, Failure> {
    let re = opts.s_re.ok_or_else(|| reject("--s-re is required"))?;
    Ok(Complex64::new(re, opts.s_im))
}

fn cmd_eval(a: &EvalArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let cfg = a.quad.config()?;
    let record = match a.target {
        Target::Ml => {
            let params = ml_params(&a.ml)?;
            let z = z_point(&a.z)?;
            Record::Ml {
                params,
                z_mod: z.modulus(),
                z_arg: z.argument(),
                outcome: eval_ml(&params, z, a.method, &a.contour, &cfg),
            }
        }
        Target::Gamma => {
            let s = s_point(&a.gamma)?;
            Record::Gamma {
                s,
                outcome: eval_gamma(s, a.method, &a.contour, &cfg),
            }
        }
    };
    let outcome = record.outcome();
    let code = outcome.status.exit_code();
    if code == 2 {
        return Err(reject(outcome.message.clone().unwrap_or_default()));
    }
    if let Some(m) = &outcome.message {
        let _ = writeln!(err, "error: {m}");
    }
    let text = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => format!("{}{}", record.header(), record.csv()),
        Format::Json => json_text(&record.json()),
    };
    emit(&a.output, &text, out)?;
    Ok(code)
}

/// `min, min + step, …` up to `max` (inclusive, with slack for rounding).
fn axis(name: &str, min: Option<f64>, max: Option<f64>, step: Option<f64>) -> Result<Vec<f64>, Failure> {
    let min = min.ok_or_else(|| reject(format!("--{name}-min is required")))?;
    let max = max.unwrap_or(min);
    if !(min.is_finite() && max.is_finite()) || max < min {
        return Err(reject(format!("--{name}-min/max must be finite with min ≤ max")));
    }
    if max == min {
        return Ok(vec![min]);
    }
    let step = step.ok_or_else(|| reject(format!("--{name}-step is required when min < max")))?;
    if !(step > 0.0) {
        return Err(reject(format!("--{name}-step must be positive")));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(reject(format!("{name} axis has {count} points (limit 1000000)")));
    }
    Ok((0..count).map(|k| min + step * k as f64).collect())
}

/// `MLC_THREADS`, or 0 (automatic) when unset or malformed.
pub fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0)
}

fn thread_pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

fn cmd_grid(a: &GridArgs, threads: usize, out: &mut dyn Write) -> CmdResult {
    let cfg = a.quad.config()?;
    let pool = thread_pool(threads);
    let records: Vec<Record> = match a.target {
        Target::Ml => {
            let params = ml_params(&a.ml)?;
            let mods = axis("z-mod", a.z_mod_min, a.z_mod_max, a.z_mod_step)?;
            let args_ = axis("z-arg", a.z_arg_min, a.z_arg_max, a.z_arg_step)?;
            if mods.iter().any(|m| !(*m >= 0.0)) {
                return Err(reject("--z-mod values must be non-negative"));
            }
            let points: Vec<(f64, f64)> = mods
                .iter()
                .flat_map(|m| args_.iter().map(move |g| (*m, *g)))
                .collect();
            pool.install(|| {
                points
                    .par_iter()
                    .map(|&(m, g)| {
                        let z = PolarComplex::new(m, g).expect("checked grid point");
                        Record::Ml {
                            params,
                            z_mod: m,
                            z_arg: g,
                            outcome: eval_ml(&params, z, a.method, &a.contour, &cfg),
                        }
                    })
                    .collect()
            })
        }
        Target::Gamma => {
            let res = axis("s-re", a.s_re_min, a.s_re_max, a.s_re_step)?;
            let ims = axis("s-im", a.s_im_min, a.s_im_max, a.s_im_step)?;
            let points: Vec<Complex64> = res
                .iter()
                .flat_map(|r| ims.iter().map(move |i| Complex64::new(*r, *i)))
                .collect();
            pool.install(|| {
                points
                    .par_iter()
                    .map(|&s| Record::Gamma {
                        s,
                        outcome: eval_gamma(s, a.method, &a.contour, &cfg),
                    })
                    .collect()
            })
        }
    };
    let text = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut t = String::from(records[0].header());
            for r in &records {
                t.push_str(&r.csv());
            }
            t
        }
        Format::Json => json_text(&Value::Array(records.iter().map(Record::json).collect())),
    };
    emit(&a.output, &text, out)?;
    let statuses: Vec<Status> = records.iter().map(|r| r.outcome().status).collect();
    Ok(if statuses.contains(&Status::Ok) {
        0
    } else if statuses.iter().all(|s| s.exit_code() == 2) {
        2
    } else {
        3
    })
}

fn interior(low: f64, high: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| low + (high - low) * k as f64 / (n + 1) as f64)
        .collect()
}

fn geometric(low: f64, high: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![low];
    }
    (0..n)
        .map(|k| low * (high / low).powf(k as f64 / (n - 1) as f64))
        .collect()
}

/// Delta values ending at the maximum, spaced evenly above the open minimum.
fn up_to(low: f64, high: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| low + (high - low) * k as f64 / n as f64).collect()
}

fn cmd_invariance(a: &InvarianceArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let cfg = a.quad.config()?;
    if a.values.is_none() && a.n < 3 {
        return Err(reject("--n must be at least 3"));
    }
    let mut points: Vec<(f64, crate::Result<(Complex64, f64, bool)>)> = Vec::new();
    let sweep;
    match a.target {
        Target::Gamma => {
            let s = s_point(&a.gamma)?;
            let base = gamma_spec(&a.contour);
            sweep = a.sweep.unwrap_or(Sweep::Psi);
            let generated = match sweep {
                Sweep::Psi => {
                    let (low, high) = gamma_psi_window(base.delta1, base.delta2);
                    interior(low, high, a.n)
                }
                Sweep::Epsilon => geometric(0.25, 4.0, a.n),
                Sweep::Delta => up_to(PI / 2.0, PI, a.n),
                Sweep::Lambda => interior(-PI / 2.0, PI / 2.0, a.n),
            };
            let values = a.values.clone().unwrap_or(generated);
            for x in values {
                let r = match sweep {
                    Sweep::Psi => recip_gamma_contour(s, &GammaContourSpec { psi: x, ..base }, &cfg),
                    Sweep::Epsilon => recip_gamma_contour(s, &GammaContourSpec { epsilon: x, ..base }, &cfg),
                    Sweep::Delta => recip_gamma_contour(
                        s,
                        &GammaContourSpec {
                            delta1: x,
                            delta2: x,
                            ..base
                        },
                        &cfg,
                    ),
                    Sweep::Lambda => {
                        let opts = args::ContourOpts {
                            lambda_arg: Some(x),
                            psi_lambda: None,
                            ..a.contour.clone()
                        };
                        lambda_spec(&opts, &base).and_then(|l: LambdaSpec| recip_gamma_lambda(s, &l, &base, &cfg))
                    }
                };
                let r = r.map(|e| {
                    let q = e.quadrature.expect("contour evaluation");
                    (e.value, q.error_estimate, q.usable())
                });
                points.push((x, r));
            }
        }
        Target::Ml => {
            let params = ml_params(&a.ml)?;
            let z = z_point(&a.z)?;
            let base: MLContourSpec = zeta_spec(&a.contour, params.rho, z);
            sweep = a.sweep.unwrap_or(Sweep::Epsilon);
            let generated = match sweep {
                Sweep::Epsilon => geometric(0.5, 2.0, a.n),
                Sweep::Delta => {
                    if params.rho <= 0.5 {
                        return Err(reject(format!("rho must exceed 1/2, got {}", params.rho)));
                    }
                    up_to(min_ml_delta(params.rho), max_ml_delta(params.rho), a.n)
                }
                other => return Err(reject(format!("sweep {other:?} applies to --target gamma only"))),
            };
            let values = a.values.clone().unwrap_or(generated);
            for x in values {
                let spec = match sweep {
                    Sweep::Epsilon => MLContourSpec { epsilon_hat: x, ..base },
                    _ => MLContourSpec {
                        delta1rho: x,
                        delta2rho: x,
                        ..base
                    },
                };
                let r = ml_contour(&params, z, &spec, &cfg).map(|e| (e.value, e.error_estimate(), e.converged()));
                points.push((x, r));
            }
        }
    }
    let mut valid = Vec::new();
    let mut rows = Vec::new();
    for (x, r) in &points {
        match r {
            Ok((v, e, usable)) => {
                if *usable {
                    valid.push(*v);
                } else {
                    let _ = writeln!(err, "notice: skipping {} = {}: quadrature did not converge", sweep_name(sweep), g17(*x));
                }
                rows.push(json!({"param": x, "value_re": v.re, "value_im": v.im, "err_estimate": e, "status": if *usable {"ok"} else {"not_converged"}}));
            }
            Err(e) => {
                let _ = writeln!(err, "notice: skipping {} = {}: {e}", sweep_name(sweep), g17(*x));
                rows.push(json!({"param": x, "status": point::classify(e).name(), "message": e.to_string()}));
            }
        }
    }
    if valid.len() < 3 {
        return Err(reject(format!("only {} admissible sweep points (need 3)", valid.len())));
    }
    let spread_value = spread(&valid);
    let pass = spread_value < a.threshold;
    let text = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => format!(
            "sweep,points,valid,spread,threshold,pass\n{}",
            csv_line(&[
                sweep_name(sweep).into(),
                points.len().to_string(),
                valid.len().to_string(),
                g17(spread_value),
                g17(a.threshold),
                pass.to_string(),
            ])
        ),
        Format::Json => json_text(&json!({
            "sweep": sweep_name(sweep),
            "points": rows,
            "valid": valid.len(),
            "spread": spread_value,
            "threshold": a.threshold,
            "pass": pass,
        })),
    };
    emit(&a.output, &text, out)?;
    Ok(if pass { 0 } else { 1 })
}

fn sweep_name(s: Sweep) -> &'static str {
    match s {
        Sweep::Psi => "psi",
        Sweep::Epsilon => "epsilon",
        Sweep::Delta => "delta",
        Sweep::Lambda => "lambda_arg",
    }
}

fn cmd_window(a: &WindowArgs, out: &mut dyn Write) -> CmdResult {
    let (d1, d2) = default_ml_deltas(a.rho)
        .map_err(|e| reject(e.to_string()))
        .map(|(d1, d2)| (a.delta1rho.unwrap_or(d1), a.delta2rho.unwrap_or(d2)))?;
    let (low, high) = ml_arg_window(a.rho, d1, d2)?;
    let gamma = GammaContourSpec::new(1.0, 0.0, a.delta1.unwrap_or(PI), a.delta2.unwrap_or(PI));
    let report = validate_gamma_contour(&GammaContourSpec {
        psi: 0.5 * (gamma.psi_window().0 + gamma.psi_window().1),
        ..gamma
    });
    if !report.ok {
        return Err(reject(format!("invalid contour: {report}")));
    }
    let (plow, phigh) = gamma.psi_window();
    let samples = match a.samples {
        None => None,
        Some(n) if n < 2 => return Err(reject("--samples needs at least 2 points")),
        Some(n) => {
            if !(a.radius > 0.0) {
                return Err(reject("--radius must be positive"));
            }
            let mut pts = vec![[0.0, 0.0]];
            for k in 0..n {
                let phi = low + (high - low) * k as f64 / (n - 1) as f64;
                pts.push([a.radius * phi.cos(), a.radius * phi.sin()]);
            }
            pts.push([0.0, 0.0]);
            Some(pts)
        }
    };
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut v = json!({
                "low": low,
                "high": high,
                "inclusive": false,
                "rho": a.rho,
                "delta1rho": d1,
                "delta2rho": d2,
                "gamma_psi": {
                    "low": plow,
                    "high": phigh,
                    "inclusive": false,
                    "delta1": gamma.delta1,
                    "delta2": gamma.delta2,
                },
            });
            if let Some(p) = &samples {
                v["samples"] = json!(p);
            }
            json_text(&v)
        }
        Format::Csv => {
            let mut t = String::from("kind,low,high,inclusive,x,y\n");
            t.push_str(&csv_line(&["arg_z".into(), g17(low), g17(high), "false".into(), String::new(), String::new()]));
            t.push_str(&csv_line(&["psi".into(), g17(plow), g17(phigh), "false".into(), String::new(), String::new()]));
            for p in samples.iter().flatten() {
                t.push_str(&csv_line(&["boundary".into(), String::new(), String::new(), String::new(), g17(p[0]), g17(p[1])]));
            }
            t
        }
    };
    emit(&a.output, &text, out)?;
    Ok(0)
}

fn cmd_compare(a: &CompareArgs, out: &mut dyn Write) -> CmdResult {
    let cfg: QuadratureConfig = a.quad.config()?;
    let params = ml_params(&a.ml)?;
    let z = z_point(&a.z)?;
    let c = &a.contour;
    let explicit = c.epsilon.is_some() || c.delta1rho.is_some() || c.delta2rho.is_some();
    let specs = CompareSpecs {
        contour: explicit.then(|| zeta_spec(c, params.rho, z)),
        bateman_epsilon: c.bateman_epsilon,
        dzhrbashyan_epsilon: c.dzh_epsilon,
        dzhrbashyan_theta: c.theta,
    };
    let report = compare_methods(&params, z, &specs, &cfg);
    let text = match a.output.format.unwrap_or(Format::Csv) {
        Format::Json => json_text(&serde_json::to_value(&report).expect("serializable")),
        Format::Csv => {
            let mut t = String::from("kind,a,b,status,value_re,value_im,err_estimate,abs_dev,rel_dev,detail\n");
            for m in &report.methods {
                let (status, detail) = match &m.outcome {
                    MethodOutcome::Evaluated { usable: true } => ("ok", String::new()),
                    MethodOutcome::Evaluated { usable: false } => ("unusable", "not converged or cancellation-dominated".into()),
                    MethodOutcome::Skipped { reason } => ("skipped", reason.clone()),
                    MethodOutcome::Failed { reason } => ("failed", reason.clone()),
                };
                let e = m.evaluation.as_ref();
                t.push_str(&csv_line(&[
                    "method".into(),
                    m.method.name().into(),
                    String::new(),
                    status.into(),
                    opt_g17(e.map(|e| e.value.re)),
                    opt_g17(e.map(|e| e.value.im)),
                    opt_g17(e.map(|e| e.error_estimate())),
                    String::new(),
                    String::new(),
                    detail,
                ]));
            }
            for d in &report.deviations {
                t.push_str(&csv_line(&[
                    "deviation".into(),
                    d.a.name().into(),
                    d.b.name().into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    g17(d.absolute),
                    g17(d.relative),
                    String::new(),
                ]));
            }
            t
        }
    };
    emit(&a.output, &text, out)?;
    Ok(0)
}

fn cmd_selftest(a: &SelftestArgs, out: &mut dyn Write) -> CmdResult {
    let selection = Selection::parse(&a.only).map_err(reject)?;
    let report = run_suite(&selection);
    if report.results.is_empty() {
        return Err(reject("no criteria selected"));
    }
    let text = if a.json {
        json_text(&serde_json::to_value(&report).expect("serializable"))
    } else {
        report.to_string()
    };
    out.write_all(text.as_bytes())
        .map_err(|e| reject(format!("cannot write output: {e}")))?;
    Ok(if report.all_passed() { 0 } else { 1 })
}

/// Runs in-process and returns `(exit code, stdout, stderr)`.
pub fn run_captured(args: &[&str]) -> (i32, String, String) {
    run_captured_with_threads(args, threads_from_env())
}

pub fn run_captured_with_threads(args: &[&str], threads: usize) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["mlc".to_string()];
    full.extend(args.iter().map(|s| s.to_string()));
    let code = run_with_threads(full, threads, &mut out, &mut err);
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&err).into_owned(),
    )
}
