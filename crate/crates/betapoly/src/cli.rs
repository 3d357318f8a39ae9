//! Command-line front end: `eval` evaluates formulas, `simulate` runs Monte
//! Carlo pipelines and `compare` checks formulas against simulations.
//!
//! Exit codes: 0 success, 1 a comparison failed, 2 usage or domain error,
//! 3 numerical, consistency or file error.

use crate::cones::MCEstimate;
use crate::error::Error;
use crate::formulas::{self, ExactJ, FormulaValue, JProvider, JSimulation, JTable, Term};
use crate::montecarlo::{self, DEFAULT_INNER_SAMPLES};
use crate::quadrature::{compute_i, compute_i_tilde};
use crate::sampling::{DistParams, SeededStream};
use crate::Family;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SEED_ENV: &str = "BETAPOLY_SEED";
pub const DEFAULT_SEED: u64 = 20_181_017;
const DEFAULT_REPS: usize = 10_000;
const DEFAULT_Z_BAND: f64 = 3.0;

#[derive(Debug, Parser)]
#[command(
    name = "betapoly",
    version,
    about = "Expected face numbers and angles of random beta and beta-prime polytopes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a formula.
    Eval {
        #[arg(value_enum)]
        target: EvalTarget,
        #[command(flatten)]
        opts: Options,
    },
    /// Run a Monte Carlo simulation.
    Simulate {
        #[arg(value_enum)]
        target: SimTarget,
        #[command(flatten)]
        opts: Options,
    },
    /// Compare formulas with simulations.
    Compare {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        opts: Options,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum EvalTarget {
    #[value(name = "I")]
    I,
    #[value(name = "I-tilde")]
    ITilde,
    #[value(name = "J")]
    J,
    Fvector,
    Poisson,
    Zerocell,
    Civ,
    Asymptotic,
    Halfsphere,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SimTarget {
    Fvector,
    ExternalAngle,
    Civ,
    PoissonHull,
    DistanceLaw,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Suite {
    Fvector,
    ExternalAngle,
    Civ,
    Poisson,
    Zerocell,
    Asymptotics,
    Monotonicity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize)]
struct Options {
    #[arg(long, value_parser = parse_family)]
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<Family>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    /// Intrinsic-volume index for civ.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    j: Option<usize>,
    /// Number of simplex vertices for J.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    /// Face size for J.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    ell: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    /// Outer repetitions.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    reps: Option<usize>,
    /// Inner Monte Carlo samples per repetition.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    inner: Option<usize>,
    /// |z| band for comparisons (relative tolerance for asymptotics).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
    #[arg(long)]
    #[serde(skip)]
    seed: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    #[serde(skip)]
    format: Format,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
    #[arg(long = "j-cache")]
    #[serde(skip_serializing_if = "Option::is_none")]
    j_cache: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}

/// One output quantity.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub name: String,
    pub value: f64,
    pub sigma: f64,
    pub n: usize,
    pub reference_label: String,
}

/// A formula-versus-simulation check.
#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub name: String,
    pub formula: f64,
    pub formula_sigma: f64,
    pub simulation: f64,
    pub simulation_sigma: f64,
    pub z: f64,
    pub band: f64,
    pub pass: bool,
}

impl Comparison {
    fn new(name: String, f: &FormulaValue, s: &MCEstimate, band: f64) -> Self {
        let z = s.z_score(f.value, f.sigma);
        Comparison {
            name,
            formula: f.value,
            formula_sigma: f.sigma,
            simulation: s.mean,
            simulation_sigma: s.std_error,
            z,
            band,
            pass: z.abs() <= band,
        }
    }

    /// A deterministic check: `pass` when the relative deviation of
    /// `observed` from `expected` is within `band`.
    fn relative(name: String, expected: f64, observed: f64, band: f64) -> Self {
        let rel = observed / expected - 1.0;
        Comparison {
            name,
            formula: expected,
            formula_sigma: 0.0,
            simulation: observed,
            simulation_sigma: 0.0,
            z: rel,
            band,
            pass: rel.abs() <= band,
        }
    }
}

/// Full record of one invocation.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub target: String,
    pub version: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub params: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<Term>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_label: Option<String>,
    pub rows: Vec<Row>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub comparisons: Vec<Comparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
}

impl Report {
    fn to_csv(&self) -> String {
        let mut s = String::from("name,value,sigma,n,reference_label\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:e},{:e},{},{}",
                r.name, r.value, r.sigma, r.n, r.reference_label
            );
        }
        s
    }
}

/// Result of running the command line: exit code and the text destined
/// for stdout and stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn usage_error(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) => 2,
        _ => 3,
    }
}

/// Runs the command line with the given arguments (including the program
/// name) and the value of the seed environment variable.
pub fn execute<I, T>(argv: I, env_seed: Option<String>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let (command, opts) = match &cli.command {
        Command::Eval { opts, .. }
        | Command::Simulate { opts, .. }
        | Command::Compare { opts, .. } => (&cli.command, opts.clone()),
    };
    let seed = match (opts.seed, env_seed) {
        (Some(s), _) => s,
        (None, Some(v)) => match v.trim().parse::<u64>() {
            Ok(s) => s,
            Err(_) => {
                return Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: format!(
                        "error: {SEED_ENV} must be a decimal 64-bit integer, got {v:?}\n"
                    ),
                }
            }
        },
        (None, None) => DEFAULT_SEED,
    };
    let result = match opts.threads {
        Some(0) => Err(usage_error("--threads must be positive")),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(command, &opts, seed)),
            Err(e) => Err(Error::numerical(format!("thread pool: {e}"), None)),
        },
        None => dispatch(command, &opts, seed),
    };
    match result {
        Ok(report) => {
            let text = match opts.format {
                Format::Json => {
                    serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
                }
                Format::Csv => report.to_csv(),
            };
            let code = if report.pass == Some(false) { 1 } else { 0 };
            match &opts.out {
                Some(path) => match std::fs::write(path, &text) {
                    Ok(()) => Outcome {
                        code,
                        stdout: String::new(),
                        stderr: String::new(),
                    },
                    Err(e) => Outcome {
                        code: 3,
                        stdout: String::new(),
                        stderr: format!("error: {}: {e}\n", path.display()),
                    },
                },
                None => Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                },
            }
        }
        Err(e) => {
            let code = exit_code(&e);
            let hint = if code == 2 {
                "\nRun `betapoly --help` for usage.\n"
            } else {
                "\n"
            };
            Outcome {
                code,
                stdout: String::new(),
                stderr: format!("error: {e}{hint}"),
            }
        }
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> crate::Result<T> {
    v.ok_or_else(|| usage_error(format!("missing required flag --{flag}")))
}

struct Ctx<'a> {
    opts: &'a Options,
    seed: u64,
    command: &'static str,
    target: String,
}

impl Ctx<'_> {
    fn report(&self) -> Report {
        Report {
            command: self.command.into(),
            target: self.target.clone(),
            version: VERSION.into(),
            seed: self.seed,
            threads: self.opts.threads,
            params: serde_json::to_value(self.opts).expect("options serialize"),
            value: None,
            sigma: None,
            terms: None,
            reference_label: None,
            rows: Vec::new(),
            comparisons: Vec::new(),
            pass: None,
        }
    }

    fn family(&self) -> crate::Result<Family> {
        need(self.opts.family, "family")
    }

    fn reps(&self) -> usize {
        self.opts.reps.unwrap_or(DEFAULT_REPS)
    }

    fn inner(&self) -> usize {
        self.opts.inner.unwrap_or(DEFAULT_INNER_SAMPLES)
    }

    fn band(&self) -> f64 {
        self.opts.tolerance.unwrap_or(DEFAULT_Z_BAND)
    }

    fn rng(&self) -> SeededStream {
        SeededStream::new(self.seed, 0)
    }

    fn j_table(&self) -> crate::Result<JTable> {
        let sim = Some(JSimulation {
            seed: self.seed,
            outer_reps: self.opts.reps.unwrap_or(montecarlo::DEFAULT_OUTER_REPS),
            inner_samples: self.inner(),
        });
        match &self.opts.j_cache {
            Some(path) => JTable::open(path, sim),
            None => Ok(JTable::new(sim)),
        }
    }

    fn point_law(&self) -> crate::Result<DistParams> {
        let d = need(self.opts.d, "d")?;
        let beta = need(self.opts.beta, "beta")?;
        match self.family()? {
            Family::Beta => DistParams::beta(d, beta),
            Family::BetaPrime => DistParams::beta_prime(d, beta),
        }
    }
}

fn dispatch(command: &Command, opts: &Options, seed: u64) -> crate::Result<Report> {
    match command {
        Command::Eval { target, .. } => {
            let ctx = Ctx {
                opts,
                seed,
                command: "eval",
                target: label_of(target),
            };
            cmd_eval(*target, &ctx)
        }
        Command::Simulate { target, .. } => {
            let ctx = Ctx {
                opts,
                seed,
                command: "simulate",
                target: label_of(target),
            };
            cmd_simulate(*target, &ctx)
        }
        Command::Compare { suite, .. } => {
            let ctx = Ctx {
                opts,
                seed,
                command: "compare",
                target: label_of(suite),
            };
            cmd_compare(*suite, &ctx)
        }
    }
}

fn label_of<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

fn family_label(family: Family) -> &'static str {
    match family {
        Family::Beta => "beta",
        Family::BetaPrime => "beta-prime",
    }
}

fn with_value(mut r: Report, name: &str, f: FormulaValue, label: &str) -> Report {
    r.rows.push(Row {
        name: name.into(),
        value: f.value,
        sigma: f.sigma,
        n: 1,
        reference_label: label.into(),
    });
    r.value = Some(f.value);
    r.sigma = Some(f.sigma);
    r.terms = Some(f.terms);
    r.reference_label = Some(label.into());
    r
}

fn cmd_eval(target: EvalTarget, ctx: &Ctx) -> crate::Result<Report> {
    let o = ctx.opts;
    let r = ctx.report();
    match target {
        EvalTarget::I | EvalTarget::ITilde => {
            let (n, k, alpha) = (need(o.n, "n")?, need(o.k, "k")?, need(o.alpha, "alpha")?);
            let q = match target {
                EvalTarget::I => compute_i(n, k, alpha)?,
                _ => compute_i_tilde(n, k, alpha)?,
            };
            let name = if matches!(target, EvalTarget::I) {
                "I"
            } else {
                "I-tilde"
            };
            let f = FormulaValue {
                value: q.value,
                sigma: q.abs_err_estimate,
                terms: Vec::new(),
            };
            Ok(with_value(r, name, f, "external-angle-integral"))
        }
        EvalTarget::J => {
            let family = ctx.family()?;
            let (m, alpha) = (need(o.m, "m")?, need(o.alpha, "alpha")?);
            let ell = need(o.ell.or(o.k), "ell")?;
            let table = ctx.j_table()?;
            let v = table.j(family, m, ell, alpha)?;
            table.save()?;
            let mut r = with_value(
                r,
                "J",
                FormulaValue {
                    value: v.mean,
                    sigma: v.sigma,
                    terms: Vec::new(),
                },
                "expected-internal-angle",
            );
            r.rows[0].n = v.n_samples;
            Ok(r)
        }
        EvalTarget::Fvector => {
            let family = ctx.family()?;
            let (d, n, beta) = (need(o.d, "d")?, need(o.n, "n")?, need(o.beta, "beta")?);
            let table = ctx.j_table()?;
            let label = format!("expected-fvector-{}", family_label(family));
            let out = match o.k {
                Some(k) => with_value(
                    r,
                    &format!("f{k}"),
                    formulas::expected_fvector(family, d, n, beta, k, &table)?,
                    &label,
                ),
                None => {
                    let mut r = r;
                    for k in 0..d {
                        let f = formulas::expected_fvector(family, d, n, beta, k, &table)?;
                        r.rows.push(Row {
                            name: format!("f{k}"),
                            value: f.value,
                            sigma: f.sigma,
                            n: 1,
                            reference_label: label.clone(),
                        });
                    }
                    r
                }
            };
            table.save()?;
            Ok(out)
        }
        EvalTarget::Poisson | EvalTarget::Zerocell => {
            let (d, alpha) = (need(o.d, "d")?, need(o.alpha, "alpha")?);
            let table = ctx.j_table()?;
            let ks: Vec<usize> = match o.k {
                Some(k) => vec![k],
                None => (0..d).collect(),
            };
            let mut r = r;
            for &k in &ks {
                let (f, label) = match target {
                    EvalTarget::Poisson => (
                        formulas::expected_fvector_poisson(d, alpha, k, &table)?,
                        "poisson-hull-fvector",
                    ),
                    _ => (
                        formulas::expected_fvector_zero_cell(d, alpha, k, &table)?,
                        "zero-cell-fvector",
                    ),
                };
                r = if ks.len() == 1 {
                    with_value(r, &format!("f{k}"), f, label)
                } else {
                    r.rows.push(Row {
                        name: format!("f{k}"),
                        value: f.value,
                        sigma: f.sigma,
                        n: 1,
                        reference_label: label.into(),
                    });
                    r
                };
            }
            table.save()?;
            Ok(r)
        }
        EvalTarget::Civ => {
            let family = ctx.family()?;
            let (d, n, k, beta) = (
                need(o.d, "d")?,
                need(o.n, "n")?,
                need(o.k, "k")?,
                need(o.beta, "beta")?,
            );
            let table = ctx.j_table()?;
            let mut r = r;
            let js: Vec<usize> = match o.j {
                Some(j) => vec![j],
                None => (k - 1..=d).collect(),
            };
            for &j in &js {
                let f = formulas::expected_tangent_civ(family, d, n, k, j, beta, &table)?;
                r = if js.len() == 1 {
                    with_value(r, &format!("civ{j}"), f, "tangent-cone-intrinsic-volume")
                } else {
                    r.rows.push(Row {
                        name: format!("civ{j}"),
                        value: f.value,
                        sigma: f.sigma,
                        n: 1,
                        reference_label: "tangent-cone-intrinsic-volume".into(),
                    });
                    r
                };
            }
            table.save()?;
            Ok(r)
        }
        EvalTarget::Asymptotic => {
            let (d, k) = (need(o.d, "d")?, need(o.k, "k")?);
            if let Some(alpha) = o.alpha {
                let f = formulas::zero_cell_highdim_asymptotic(d, k, alpha)?;
                return Ok(with_value(
                    r,
                    "zero-cell-highdim",
                    f,
                    "zero-cell-large-dimension",
                ));
            }
            let beta = need(o.beta, "beta")?;
            let table = ctx.j_table()?;
            let f = formulas::fvector_asymptotic_const(d, k, beta, &table)?;
            let mut r = with_value(r, "limit-constant", f, "fvector-large-n-constant");
            r.rows.push(Row {
                name: "growth-exponent".into(),
                value: formulas::fvector_growth_exponent(d, beta),
                sigma: 0.0,
                n: 1,
                reference_label: "fvector-large-n-constant".into(),
            });
            table.save()?;
            Ok(r)
        }
        EvalTarget::Halfsphere => {
            let (d, k) = (need(o.d, "d")?, need(o.k, "k")?);
            let table = ctx.j_table()?;
            let out = match o.n {
                Some(n) => with_value(
                    r,
                    &format!("f{k}"),
                    formulas::half_sphere_expected_fvector(d, n, k, &table)?,
                    "half-sphere-fvector",
                ),
                None => with_value(
                    r,
                    &format!("f{k}-limit"),
                    formulas::half_sphere_limit(d, k, &table)?,
                    "half-sphere-limit",
                ),
            };
            table.save()?;
            Ok(out)
        }
    }
}

fn push_estimate(r: &mut Report, name: String, e: &MCEstimate, label: &str) {
    r.rows.push(Row {
        name,
        value: e.mean,
        sigma: e.std_error,
        n: e.n_samples,
        reference_label: label.into(),
    });
}

fn cmd_simulate(target: SimTarget, ctx: &Ctx) -> crate::Result<Report> {
    let o = ctx.opts;
    let mut r = ctx.report();
    let mut rng = ctx.rng();
    match target {
        SimTarget::Fvector => {
            let law = ctx.point_law()?;
            let n = need(o.n, "n")?;
            let f = montecarlo::simulate_expected_fvector(&law, n, ctx.reps(), &mut rng)?;
            for (k, e) in f.iter().enumerate() {
                push_estimate(&mut r, format!("f{k}"), e, "simulated-fvector");
            }
        }
        SimTarget::ExternalAngle => {
            let law = ctx.point_law()?;
            let (n, k) = (need(o.n, "n")?, need(o.k, "k")?);
            let e = montecarlo::simulate_expected_external_angle(
                &law,
                n,
                k,
                ctx.reps(),
                ctx.inner(),
                &mut rng,
            )?;
            push_estimate(
                &mut r,
                "external-angle".into(),
                &e,
                "simulated-external-angle",
            );
        }
        SimTarget::Civ => {
            let law = ctx.point_law()?;
            let (n, k) = (need(o.n, "n")?, need(o.k, "k")?);
            let s = montecarlo::simulate_tangent_civ_profile(
                &law,
                n,
                k,
                ctx.reps(),
                ctx.inner(),
                &mut rng,
            )?;
            for (j, e) in s.profile.iter().enumerate() {
                if o.j.is_none_or(|jj| jj == j) {
                    push_estimate(&mut r, format!("civ{j}"), e, "simulated-tangent-cone");
                }
            }
            push_estimate(
                &mut r,
                "not-face".into(),
                &s.not_face,
                "simulated-tangent-cone",
            );
        }
        SimTarget::PoissonHull => {
            let (d, alpha) = (need(o.d, "d")?, need(o.alpha, "alpha")?);
            let f = montecarlo::simulate_poisson_fvector(d, alpha, ctx.reps(), &mut rng)?;
            for (k, e) in f.iter().enumerate() {
                push_estimate(&mut r, format!("f{k}"), e, "simulated-poisson-hull");
            }
        }
        SimTarget::DistanceLaw => {
            let family = ctx.family()?;
            let (d, k, beta) = (need(o.d, "d")?, need(o.k, "k")?, need(o.beta, "beta")?);
            let ks = montecarlo::simulate_distance_law(family, d, k, beta, ctx.reps(), &mut rng)?;
            let (name, a, b) = match ks.law {
                montecarlo::ReferenceLaw::Beta { a, b } => ("Beta", a, b),
                montecarlo::ReferenceLaw::BetaPrime { a, b } => ("BetaPrime", a, b),
            };
            let label = format!("{name}({a},{b})");
            r.rows.push(Row {
                name: "ks-statistic".into(),
                value: ks.statistic,
                sigma: 0.0,
                n: ks.n_samples,
                reference_label: label.clone(),
            });
            r.rows.push(Row {
                name: "ks-critical-1pct".into(),
                value: ks.critical_1pct,
                sigma: 0.0,
                n: ks.n_samples,
                reference_label: label.clone(),
            });
            r.reference_label = Some(label);
            r.pass = Some(ks.pass);
        }
    }
    Ok(r)
}

fn finish(mut r: Report, comparisons: Vec<Comparison>) -> Report {
    for c in &comparisons {
        let label = if c.formula_sigma == 0.0 && c.simulation_sigma == 0.0 {
            "relative-deviation"
        } else {
            "z-score"
        };
        r.rows.push(Row {
            name: format!("{}:formula", c.name),
            value: c.formula,
            sigma: c.formula_sigma,
            n: 1,
            reference_label: "formula".into(),
        });
        r.rows.push(Row {
            name: format!("{}:simulation", c.name),
            value: c.simulation,
            sigma: c.simulation_sigma,
            n: 1,
            reference_label: "simulation".into(),
        });
        r.rows.push(Row {
            name: format!("{}:{label}", c.name),
            value: c.z,
            sigma: 0.0,
            n: 1,
            reference_label: format!("band {}", c.band),
        });
    }
    r.pass = Some(comparisons.iter().all(|c| c.pass));
    r.comparisons = comparisons;
    r
}

fn cmd_compare(suite: Suite, ctx: &Ctx) -> crate::Result<Report> {
    let o = ctx.opts;
    let r = ctx.report();
    let mut rng = ctx.rng();
    let band = ctx.band();
    let mut out = Vec::new();
    match suite {
        Suite::Fvector => {
            let family = ctx.family()?;
            let law = ctx.point_law()?;
            let (d, n, beta) = (law.d, need(o.n, "n")?, law.beta);
            let table = ctx.j_table()?;
            let sim = montecarlo::simulate_expected_fvector(&law, n, ctx.reps(), &mut rng)?;
            for (k, s) in sim.iter().enumerate() {
                let f = formulas::expected_fvector(family, d, n, beta, k, &table)?;
                out.push(Comparison::new(format!("f{k}"), &f, s, band));
            }
            table.save()?;
        }
        Suite::ExternalAngle => {
            let family = ctx.family()?;
            let law = ctx.point_law()?;
            let (n, k) = (need(o.n, "n")?, need(o.k, "k")?);
            let f = formulas::expected_external_angle(family, law.d, n, k, law.beta)?;
            let s = montecarlo::simulate_expected_external_angle(
                &law,
                n,
                k,
                ctx.reps(),
                ctx.inner(),
                &mut rng,
            )?;
            out.push(Comparison::new("external-angle".into(), &f, &s, band));
        }
        Suite::Civ => {
            let family = ctx.family()?;
            let law = ctx.point_law()?;
            let (n, k) = (need(o.n, "n")?, need(o.k, "k")?);
            let table = ctx.j_table()?;
            let s = montecarlo::simulate_tangent_civ_profile(
                &law,
                n,
                k,
                ctx.reps(),
                ctx.inner(),
                &mut rng,
            )?;
            for j in k - 1..=law.d {
                let f = formulas::expected_tangent_civ(family, law.d, n, k, j, law.beta, &table)?;
                out.push(Comparison::new(format!("civ{j}"), &f, &s.profile[j], band));
            }
            table.save()?;
        }
        Suite::Poisson | Suite::Zerocell => {
            let d = o.d.unwrap_or(2);
            let alphas = match o.alpha {
                Some(a) => vec![a],
                None => vec![1.0, 2.0],
            };
            let table = ctx.j_table()?;
            for alpha in alphas {
                let sim = montecarlo::simulate_poisson_fvector(d, alpha, ctx.reps(), &mut rng)?;
                for k in 0..d {
                    let (f, s, name) = if matches!(suite, Suite::Poisson) {
                        (
                            formulas::expected_fvector_poisson(d, alpha, k, &table)?,
                            &sim[k],
                            format!("alpha={alpha}:f{k}"),
                        )
                    } else {
                        (
                            formulas::expected_fvector_zero_cell(d, alpha, k, &table)?,
                            &sim[d - k - 1],
                            format!("alpha={alpha}:f{k}"),
                        )
                    };
                    out.push(Comparison::new(name, &f, s, band));
                }
            }
            table.save()?;
        }
        Suite::Asymptotics => {
            let tol = o.tolerance.unwrap_or(0.05);
            let n = o.n.unwrap_or(100_000);
            let grid: Vec<(usize, f64)> = match (o.d, o.beta) {
                (Some(d), Some(b)) => vec![(d, b)],
                _ => vec![(2, 0.0), (2, -1.0), (3, 0.0)],
            };
            for (d, beta) in grid {
                let f = formulas::expected_fvector(Family::Beta, d, n, beta, d - 1, &ExactJ)?.value;
                let scaled = (n as f64).powf(-formulas::fvector_growth_exponent(d, beta)) * f;
                let c = formulas::fvector_asymptotic_const(d, d - 1, beta, &ExactJ)?.value;
                out.push(Comparison::relative(
                    format!("d={d},beta={beta}:f{}", d - 1),
                    c,
                    scaled,
                    tol,
                ));
            }
        }
        Suite::Monotonicity => {
            let family = ctx.family()?;
            let (d, beta) = (need(o.d, "d")?, need(o.beta, "beta")?);
            let n_max = o.n.unwrap_or(15);
            let table = ctx.j_table()?;
            for k in 0..d {
                let mut prev: Option<f64> = None;
                for n in d + 1..=n_max {
                    let f = formulas::expected_fvector(family, d, n, beta, k, &table)?.value;
                    if let Some(p) = prev {
                        let inc = f - p;
                        out.push(Comparison {
                            name: format!("f{k}:n={}->{n}", n - 1),
                            formula: p,
                            formula_sigma: 0.0,
                            simulation: f,
                            simulation_sigma: 0.0,
                            z: inc,
                            band: 0.0,
                            pass: inc > 0.0,
                        });
                    }
                    prev = Some(f);
                }
            }
            table.save()?;
        }
    }
    Ok(finish(r, out))
}
