//! Command-line front end: `barriers`, `value-curve`, `lambda-sweep`,
//! `verify` and `mc-estimate`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 failed assumption,
//! 3 no admissible barrier pair (including the half-line call regime),
//! 4 configuration or I/O error, 5 any other numerical error. Errors are
//! reported as a JSON object on stderr.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{OutputFormat, ProblemConfig};
use crate::error::Error;
use crate::fluct::FluctContext;
use crate::mc::{self, McEstimate, Payoff, Sampling};
use crate::model::{validate_assumptions, ValidationReport};
use crate::oracle::integrate;
use crate::pricer::{in_stopping_region, Pricer};
use crate::put::{BarrierPair, OptionKind, PricingProblem};
use crate::scale::ScaleFunction;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_ASSUMPTION: i32 = 2;
pub const EXIT_NO_ROOT: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;
pub const EXIT_NUMERIC: i32 = 5;

/// Tolerance on the region checks of value curves and `verify`.
const REGION_TOL: f64 = 1e-9;
/// Standard errors allowed between MC estimates and closed forms.
const MC_Z: f64 = 3.0;

#[derive(Debug, Parser)]
#[command(
    name = "poisson-american",
    version,
    about = "Optimal exercise barriers for perpetual American options with Poisson exercise opportunities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Problem config (JSON); a previous result file is accepted too.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Overrides the MC seed of the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Optimal barriers with first-order residuals.
    Barriers,
    /// V and the payoff on the configured price grid.
    ValueCurve,
    /// Optimal barriers and V(reference price) across the lambda list.
    LambdaSweep,
    /// Runs every check on the configured problem.
    Verify,
    /// Monte Carlo estimates of V at the configured prices.
    McEstimate,
}

impl Command {
    fn default_format(self) -> OutputFormat {
        match self {
            Command::ValueCurve | Command::LambdaSweep => OutputFormat::Csv,
            _ => OutputFormat::Json,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Assumption(_) => EXIT_ASSUMPTION,
        Error::NoRoot(_) | Error::ScanExhausted(_) | Error::BarrierRegime { .. } => EXIT_NO_ROOT,
        Error::Config(_) | Error::Io(_) | Error::InvalidModel(_) => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

/// An error with an optional structured payload for stderr.
#[derive(Debug)]
pub struct Failure {
    pub error: Error,
    pub details: Option<Value>,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { error, details: None }
    }
}

impl Failure {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "error": self.error.kind(),
            "message": self.error.to_string(),
            "exit_code": exit_code(&self.error),
        });
        if let (Some(d), Some(obj)) = (&self.details, v.as_object_mut()) {
            obj.insert("details".into(), d.clone());
        }
        v
    }
}

/// Rendered output and the exit code it carries.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub exit_code: i32,
}

/// Parses `args` (including the program name), runs the command and writes
/// the result; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(out) => out.exit_code,
        Err(f) => {
            eprintln!("{}", f.to_json());
            exit_code(&f.error)
        }
    }
}

/// Runs a parsed command and writes its output to `--out`, the config's
/// output path, or stdout.
pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config("--config is required".into()))?;
    let mut cfg = ProblemConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.mc.seed = seed;
    }
    let format = cli.format.or(cfg.output.format).unwrap_or(cli.command.default_format());
    let out = execute(cli.command, &cfg, format)?;
    match cli.out.clone().or_else(|| cfg.output.path.as_ref().map(PathBuf::from)) {
        Some(p) => std::fs::write(&p, &out.text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        None => print!("{}", out.text),
    }
    Ok(out)
}

/// Runs a command on a loaded config and renders the result.
pub fn execute(command: Command, cfg: &ProblemConfig, format: OutputFormat) -> Result<Outcome, Failure> {
    match command {
        Command::Barriers => cmd_barriers(cfg, format),
        Command::ValueCurve => cmd_value_curve(cfg, format),
        Command::LambdaSweep => cmd_lambda_sweep(cfg, format),
        Command::Verify => cmd_verify(cfg, format),
        Command::McEstimate => cmd_mc_estimate(cfg, format),
    }
}

fn ok(text: String) -> Outcome {
    Outcome { text, exit_code: EXIT_OK }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// NaN and infinities have no JSON form; they become null.
fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

/// Assumption and regime checks that must pass before solving.
fn admissible(problem: &PricingProblem) -> Result<ValidationReport, Failure> {
    let report = validate_assumptions(problem);
    if problem.option == OptionKind::Call {
        if let Some(psi1) = report.log_mean_price {
            let r_tilde = problem.r - psi1;
            if r_tilde >= 0.0 {
                return Err(Failure { error: Error::BarrierRegime { r_tilde }, details: Some(json!(report)) });
            }
        }
    }
    if !report.all_passed() {
        let names: Vec<&str> = report.failures().iter().map(|c| c.name.as_str()).collect();
        return Err(Failure { error: Error::Assumption(names.join("; ")), details: Some(json!(report)) });
    }
    Ok(report)
}

struct Solved {
    problem: PricingProblem,
    report: ValidationReport,
    pricer: Pricer,
    barriers: BarrierPair,
}

fn solve(cfg: &ProblemConfig) -> Result<Solved, Failure> {
    let problem = cfg.problem()?;
    let report = admissible(&problem)?;
    let pricer = Pricer::new(&problem, cfg.x_ref)?;
    let barriers = pricer.solve_barriers()?;
    Ok(Solved { problem, report, pricer, barriers })
}

fn cmd_barriers(cfg: &ProblemConfig, format: OutputFormat) -> Result<Outcome, Failure> {
    let s = solve(cfg)?;
    let b = &s.barriers;
    Ok(ok(match format {
        OutputFormat::Json => pretty(&json!({
            "config": cfg,
            "l_star": b.l,
            "u_star": b.u,
            "L_star": b.l.exp(),
            "U_star": b.u.exp(),
            "residuals": {"h": b.residual_h, "j": b.residual_j, "j_tilde": b.residual_j_tilde, "scaled": b.residual_scaled},
            "candidates": b.candidates.iter().map(|c| json!({
                "l": c.l, "u": c.u, "L": c.l.exp(), "U": c.u.exp(), "value": c.value,
            })).collect::<Vec<_>>(),
            "tie_broken": b.tie_broken,
            "assumptions_report": s.report,
        })),
        OutputFormat::Csv => format!(
            "l_star,u_star,L_star,U_star,residual_h,residual_j,residual_j_tilde,residual_scaled\n{},{},{},{},{},{},{},{}\n",
            b.l,
            b.u,
            b.l.exp(),
            b.u.exp(),
            b.residual_h,
            b.residual_j,
            b.residual_j_tilde,
            b.residual_scaled
        ),
    }))
}

#[derive(Debug, Clone, Serialize)]
struct CurveRow {
    s: f64,
    #[serde(rename = "V")]
    v: f64,
    #[serde(rename = "G")]
    g: f64,
    region: &'static str,
}

fn cmd_value_curve(cfg: &ProblemConfig, format: OutputFormat) -> Result<Outcome, Failure> {
    let s = solve(cfg)?;
    let mut rows = Vec::new();
    for price in cfg.price_grid() {
        rows.push(CurveRow {
            s: price,
            v: s.pricer.value(&s.barriers, price)?,
            g: s.pricer.payoff(price),
            region: if in_stopping_region(&s.barriers, price) { "stop" } else { "continue" },
        });
    }
    Ok(ok(match format {
        OutputFormat::Json => pretty(&json!({
            "config": cfg,
            "L_star": s.barriers.l.exp(),
            "U_star": s.barriers.u.exp(),
            "rows": rows,
        })),
        OutputFormat::Csv => {
            let mut t = String::from("s,V,G,region\n");
            for r in &rows {
                let _ = writeln!(t, "{},{},{},{}", r.s, r.v, r.g, r.region);
            }
            t
        }
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    #[serde(rename = "L_star")]
    pub l_star: Option<f64>,
    #[serde(rename = "U_star")]
    pub u_star: Option<f64>,
    #[serde(rename = "V_at_reference_s")]
    pub v_ref: Option<f64>,
    pub status: String,
    /// Against the previous successful row; `None` on the first one.
    #[serde(rename = "L_nondecreasing")]
    pub l_up: Option<bool>,
    #[serde(rename = "U_nonincreasing")]
    pub u_down: Option<bool>,
    #[serde(rename = "V_nondecreasing")]
    pub v_up: Option<bool>,
}

/// Barriers and V at `s_ref` for each lambda; failures are kept as rows.
pub fn lambda_sweep(cfg: &ProblemConfig, lambdas: &[f64], s_ref: f64) -> Result<Vec<SweepRow>, Failure> {
    let base = cfg.problem()?;
    let mut rows: Vec<SweepRow> = Vec::new();
    let mut prev: Option<(f64, f64, f64)> = None;
    for &lambda in lambdas {
        let problem = PricingProblem { lambda, ..base.clone() };
        let solved = admissible(&problem).and_then(|_| {
            let p = Pricer::new(&problem, cfg.x_ref)?;
            let b = p.solve_barriers()?;
            let v = p.value(&b, s_ref)?;
            Ok((b.l.exp(), b.u.exp(), v))
        });
        let mut row = SweepRow {
            lambda,
            l_star: None,
            u_star: None,
            v_ref: None,
            status: "ok".into(),
            l_up: None,
            u_down: None,
            v_up: None,
        };
        match solved {
            Ok((l, u, v)) => {
                let tol = |x: f64| 1e-9 * x.abs().max(1.0);
                if let Some((pl, pu, pv)) = prev {
                    row.l_up = Some(l >= pl - tol(pl));
                    row.u_down = Some(u <= pu + tol(pu));
                    row.v_up = Some(v >= pv - tol(pv));
                }
                prev = Some((l, u, v));
                row.l_star = Some(l);
                row.u_star = Some(u);
                row.v_ref = Some(v);
            }
            Err(f) => row.status = f.error.kind().into(),
        }
        rows.push(row);
    }
    Ok(rows)
}

fn all_flags(rows: &[SweepRow], f: impl Fn(&SweepRow) -> Option<bool>) -> bool {
    rows.iter().filter_map(f).all(|b| b)
}

fn cmd_lambda_sweep(cfg: &ProblemConfig, format: OutputFormat) -> Result<Outcome, Failure> {
    let s_ref = cfg.reference_price();
    let rows = lambda_sweep(cfg, &cfg.grids.lambdas, s_ref)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let flag = |v: Option<bool>| v.map(|x| x.to_string()).unwrap_or_default();
    Ok(ok(match format {
        OutputFormat::Json => pretty(&json!({
            "config": cfg,
            "reference_s": s_ref,
            "rows": rows,
            "L_nondecreasing": all_flags(&rows, |r| r.l_up),
            "U_nonincreasing": all_flags(&rows, |r| r.u_down),
            "V_nondecreasing": all_flags(&rows, |r| r.v_up),
        })),
        OutputFormat::Csv => {
            let mut t = String::from(
                "lambda,L_star,U_star,V_at_reference_s,status,L_nondecreasing,U_nonincreasing,V_nondecreasing\n",
            );
            for r in &rows {
                let _ = writeln!(
                    t,
                    "{},{},{},{},{},{},{},{}",
                    r.lambda,
                    opt(r.l_star),
                    opt(r.u_star),
                    opt(r.v_ref),
                    r.status,
                    flag(r.l_up),
                    flag(r.u_down),
                    flag(r.v_up)
                );
            }
            t
        }
    }))
}

/// MC estimate of V(s) under interval strategy [l, u] on the original
/// dynamics (calls are not mapped to puts), with the sampler used.
pub fn mc_value(
    problem: &PricingProblem,
    s: f64,
    l: f64,
    u: f64,
    cfg: &mc::McConfig,
) -> crate::Result<(McEstimate, Sampling)> {
    let payoff = match problem.option {
        OptionKind::Put => Payoff::Put,
        OptionKind::Call => Payoff::Call,
    };
    mc::estimate_value(problem, s.ln(), l, u, cfg, payoff)
}

#[derive(Debug, Clone, Serialize)]
struct McRow {
    s: f64,
    sampling: Sampling,
    analytic: f64,
    mc_mean: f64,
    mc_stderr: f64,
    z: f64,
    n_effective: usize,
    truncated_fraction: f64,
    truncation_bound: f64,
    warning: Option<String>,
}

fn mc_rows(s: &Solved, cfg: &ProblemConfig) -> Result<Vec<McRow>, Failure> {
    let mut rows = Vec::new();
    for price in cfg.mc_prices() {
        let analytic = s.pricer.value(&s.barriers, price)?;
        let (e, sampling) = mc_value(&s.problem, price, s.barriers.l, s.barriers.u, &cfg.mc)?;
        rows.push(McRow {
            s: price,
            sampling,
            analytic,
            mc_mean: e.mean,
            mc_stderr: e.stderr,
            z: e.z_score(analytic),
            n_effective: e.n_effective,
            truncated_fraction: e.truncated_fraction,
            truncation_bound: e.truncation_bound,
            warning: e.truncation_warning(),
        });
    }
    Ok(rows)
}

fn cmd_mc_estimate(cfg: &ProblemConfig, format: OutputFormat) -> Result<Outcome, Failure> {
    let s = solve(cfg)?;
    let rows = mc_rows(&s, cfg)?;
    for r in &rows {
        if let Some(w) = &r.warning {
            eprintln!("warning: s = {}: {w}", r.s);
        }
    }
    Ok(ok(match format {
        OutputFormat::Json => pretty(&json!({
            "config": cfg,
            "L_star": s.barriers.l.exp(),
            "U_star": s.barriers.u.exp(),
            "rows": rows,
        })),
        OutputFormat::Csv => {
            let mut t = String::from(
                "s,sampling,analytic,mc_mean,mc_stderr,z,n_effective,truncated_fraction,truncation_bound\n",
            );
            for r in &rows {
                let sampling = if r.sampling == Sampling::Tilted { "tilted" } else { "plain" };
                let _ = writeln!(
                    t,
                    "{},{},{},{},{},{},{},{},{}",
                    r.s,
                    sampling,
                    r.analytic,
                    r.mc_mean,
                    r.mc_stderr,
                    r.z,
                    r.n_effective,
                    r.truncated_fraction,
                    r.truncation_bound
                );
            }
            t
        }
    }))
}

/// One named check with the measured quantity and its tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub measured: Value,
    pub tolerance: Value,
    pub detail: String,
}

fn suite(name: &str, passed: bool, measured: f64, tolerance: f64, detail: String) -> SuiteResult {
    SuiteResult { name: name.into(), passed, measured: num(measured), tolerance: num(tolerance), detail }
}

fn errored(name: &str, e: &Error) -> SuiteResult {
    SuiteResult {
        name: name.into(),
        passed: false,
        measured: Value::Null,
        tolerance: Value::Null,
        detail: e.to_string(),
    }
}

/// Every check on one problem; numerical errors fail their suite only.
pub fn verify_suites(cfg: &ProblemConfig) -> Result<Vec<SuiteResult>, Failure> {
    let problem = cfg.problem()?;
    let mut out = Vec::new();
    let report = validate_assumptions(&problem);
    out.push(SuiteResult {
        name: "assumptions".into(),
        passed: report.all_passed(),
        measured: json!(report.failures().len()),
        tolerance: json!(0),
        detail: report
            .failures()
            .iter()
            .map(|c| format!("{}: {}", c.name, c.diagnostic))
            .collect::<Vec<_>>()
            .join("; "),
    });
    let m = &problem.model;
    out.push(match m.phi(problem.r).and_then(|p| Ok((p, m.psi(p)?))) {
        Ok((p, v)) => {
            let res = (v - problem.r).abs();
            suite("phi_root", res < 1e-10, res, 1e-10, format!("Phi(r) = {p} in the SN representation"))
        }
        Err(e) => errored("phi_root", &e),
    });
    out.push(match scale_laplace(&problem) {
        Ok(worst) => {
            suite("scale_laplace_transform", worst < 1e-6, worst, 1e-6, "relative error at Phi + {0.5, 1, 2}".into())
        }
        Err(e) => errored("scale_laplace_transform", &e),
    });
    out.push(match fluct_vs_mc(&problem, &cfg.mc) {
        Ok((z, detail)) => suite("fluctuation_identities_vs_mc", z < MC_Z, z, MC_Z, detail),
        Err(e) => errored("fluctuation_identities_vs_mc", &e),
    });
    let solved = match solve(cfg) {
        Ok(s) => s,
        Err(f) => {
            out.push(errored("barriers", &f.error));
            return Ok(out);
        }
    };
    let b = &solved.barriers;
    let res = b.max_residual();
    out.push(suite("first_order_residuals", res < 1e-8, res, 1e-8, format!("l = {}, u = {}", b.l, b.u)));
    let scaled = b.residual_scaled;
    out.push(suite("scaled_first_order_residuals", scaled < 1e-8, scaled, 1e-8, "growth in u - l scaled out".into()));
    out.push(match region_check(&solved, &cfg.price_grid()) {
        Ok((worst, detail)) => suite("value_vs_payoff", worst <= REGION_TOL, worst, REGION_TOL, detail),
        Err(e) => errored("value_vs_payoff", &e),
    });
    if problem.option == OptionKind::Call {
        out.push(match symmetry_check(&problem, b, cfg.x_ref) {
            Ok(d) => {
                suite("call_reference_invariance", d < 1e-9, d, 1e-9, "barrier shift between reference points".into())
            }
            Err(e) => errored("call_reference_invariance", &e),
        });
    }
    out.push(match mc_rows(&solved, cfg) {
        Ok(rows) => {
            let z = rows.iter().map(|r| r.z).fold(0.0, f64::max);
            let trunc = rows.iter().map(|r| r.truncated_fraction).fold(0.0, f64::max);
            suite(
                "value_vs_mc",
                z < MC_Z && trunc <= 1e-3,
                z,
                MC_Z,
                format!("{} prices, max truncated fraction {trunc:.2e}", rows.len()),
            )
        }
        Err(f) => errored("value_vs_mc", &f.error),
    });
    Ok(out)
}

/// Worst relative error of int_0^inf e^{-theta x} W(x) dx = 1 / (psi(theta) - r).
pub fn scale_laplace(problem: &PricingProblem) -> crate::Result<f64> {
    let m = &problem.model;
    let q = problem.r;
    let w = ScaleFunction::new(m, q)?;
    let p = m.phi(q)?;
    let mut worst: f64 = 0.0;
    for gap in [0.5, 1.0, 2.0] {
        let th = p + gap;
        let upper = 40.0 / gap;
        let err = std::cell::RefCell::new(None);
        let v = integrate(
            |x| match w.w(x) {
                Ok(y) => (-th * x).exp() * y,
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            0.0,
            upper,
            1e-13,
        );
        if let Some(e) = err.into_inner() {
            return Err(e);
        }
        let exact = 1.0 / (m.psi(th)? - q);
        worst = worst.max(((v - exact) / exact).abs());
    }
    Ok(worst)
}

/// Largest z-score of the two-sided and one-sided identities against MC,
/// for the SN representation at q = 0.2.
fn fluct_vs_mc(problem: &PricingProblem, cfg: &mc::McConfig) -> crate::Result<(f64, String)> {
    let m = &problem.model;
    let sn = crate::model::LevyModel::new(crate::model::Side::SpectrallyNegative, m.c(), m.eta(), m.jumps().to_vec())?;
    let (q, lam) = (0.2, problem.lambda);
    let ctx = FluctContext::new(&sn, q, lam)?;
    let (x, a, b, th) = (1.5, 1.0, 2.5, 0.3);
    let two = mc::estimate_two_sided(&sn, q, lam, x, a, b, th, cfg)?;
    let z2 = two.z_score(ctx.two_sided_transform(x, a, b, th)?);
    let one = mc::estimate_one_sided(&sn, q, lam, x, a, th, cfg)?;
    let z1 = one.z_score(ctx.one_sided_transform(x, a, th)?);
    Ok((z1.max(z2), format!("two-sided z = {z2:.2}, one-sided z = {z1:.2}")))
}

/// Worst violation of V <= G on the stopping region and V >= max(G, 0) off it.
fn region_check(s: &Solved, grid: &[f64]) -> crate::Result<(f64, String)> {
    let mut worst: f64 = 0.0;
    let mut at = f64::NAN;
    for &price in grid {
        let v = s.pricer.value(&s.barriers, price)?;
        let g = s.pricer.payoff(price);
        let viol = if in_stopping_region(&s.barriers, price) { v - g } else { g.max(0.0) - v };
        if viol > worst {
            worst = viol;
            at = price;
        }
    }
    let (lo, hi) = (s.barriers.l.exp(), s.barriers.u.exp());
    let k = s.problem.strike;
    let ordered = match s.problem.option {
        OptionKind::Put => 0.0 < lo && lo <= hi && hi < k,
        OptionKind::Call => k < lo && lo <= hi && hi.is_finite(),
    };
    if !ordered {
        worst = f64::INFINITY;
    }
    Ok((worst, format!("{} prices, worst at s = {at}, L = {lo}, U = {hi}", grid.len())))
}

fn symmetry_check(problem: &PricingProblem, b: &BarrierPair, x_ref: Option<f64>) -> crate::Result<f64> {
    let shifted = x_ref.unwrap_or_else(|| crate::call::default_x_ref(problem.strike)) + 0.7;
    let other = Pricer::new(problem, Some(shifted))?.solve_barriers()?;
    Ok((other.l - b.l).abs().max((other.u - b.u).abs()))
}

fn cmd_verify(cfg: &ProblemConfig, format: OutputFormat) -> Result<Outcome, Failure> {
    let suites = verify_suites(cfg)?;
    let passed = suites.iter().all(|s| s.passed);
    let text = match format {
        OutputFormat::Json => pretty(&json!({"config": cfg, "passed": passed, "suites": suites})),
        OutputFormat::Csv => {
            let mut t = String::from("suite,passed,measured,tolerance\n");
            for s in &suites {
                let _ = writeln!(t, "{},{},{},{}", s.name, s.passed, s.measured, s.tolerance);
            }
            t
        }
    };
    Ok(Outcome { text, exit_code: if passed { EXIT_OK } else { EXIT_VERIFY_FAILED } })
}
