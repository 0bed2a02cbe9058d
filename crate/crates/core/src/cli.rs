//! Batch front-end: parameter files, solver flags, oracle cross-checks and
//! the key-value report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use rug::Float;

use crate::error::{Error, Result, Warning};
use crate::frame::{EquationParams, Kappa};
use crate::mp::{self, Complex};
use crate::oracle::{self, HillResidual, MonodromySample, HILL_DEFAULT_N};
use crate::pipeline::{self, LambdaChoice, MChoice, Solution, SolverSettings};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_ORACLE: i32 = 3;

/// Absolute gap between the pipeline and the ODE trace tolerated on top of
/// both error estimates.
pub const ODE_AGREEMENT_TOL: f64 = 1e-6;
/// Required ratio of the recurrence residual off and at the exponent.
pub const HILL_DIP_RATIO: f64 = 1e3;
pub const HILL_OFFSET: f64 = 0.05;
pub const ODE_RADIUS: f64 = 1.0;
pub const ODE_TARGET: f64 = 1e-10;

const PARAM_KEYS: [&str; 13] = [
    "D1", "D2", "D3", "D4", "D5", "D6", "L", "B1", "B2", "B3", "B4", "B5", "B6",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleChoice {
    None,
    Ode,
    Hill,
    Both,
}

impl OracleChoice {
    fn ode(self) -> bool {
        matches!(self, OracleChoice::Ode | OracleChoice::Both)
    }

    fn hill(self) -> bool {
        matches!(self, OracleChoice::Hill | OracleChoice::Both)
    }

    fn name(self) -> &'static str {
        match self {
            OracleChoice::None => "none",
            OracleChoice::Ode => "ode",
            OracleChoice::Hill => "hill",
            OracleChoice::Both => "both",
        }
    }
}

#[derive(Parser, Debug, Clone, Default)]
#[command(
    name = "rank3-floquet",
    version,
    about = "Characteristic exponent of z²f'' + zf' - [Σ D_m z^-m + L² + Σ B_m z^m] f = 0"
)]
pub struct Args {
    /// Parameter file with lines `key = value` (D1..D6, L, B1..B6 and
    /// optional solver keys).
    pub params: Option<PathBuf>,
    /// Working precision in bits.
    #[arg(long)]
    pub precision: Option<u32>,
    /// Truncation of the connection solve: a count or `adaptive`.
    #[arg(long)]
    pub m: Option<String>,
    /// Number of correction terms in the connection solve.
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// Highest grading level of the e-grid.
    #[arg(long)]
    pub lmax: Option<usize>,
    /// Computational exponent: a number or `auto`.
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long, value_enum)]
    pub oracle: Option<OracleChoice>,
    /// Write the report (or the sweep CSV) here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV file with one parameter set per row and a header naming the
    /// columns D1..D6, L, B1..B6.
    #[arg(long)]
    pub sweep: Option<PathBuf>,
    /// Sweep rows solved concurrently.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub params: EquationParams,
    pub settings: SolverSettings,
    pub oracle: OracleChoice,
    pub output: Option<PathBuf>,
}

/// Solver keys read from a parameter file; flags override them.
#[derive(Clone, Debug, Default)]
struct SolverKeys {
    precision: Option<u32>,
    m: Option<String>,
    k: Option<usize>,
    lmax: Option<usize>,
    lambda: Option<String>,
    oracle: Option<OracleChoice>,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| usage(format!("cannot read value `{v}` for `{key}`")))
}

fn params_from_map(values: &BTreeMap<String, f64>) -> Result<EquationParams> {
    let get = |k: &str| values.get(k).copied().unwrap_or(0.0);
    if !values.contains_key("B6") {
        return Err(usage("B6 is required"));
    }
    let d = [1, 2, 3, 4, 5, 6].map(|m| get(&format!("D{m}")));
    let b = [1, 2, 3, 4, 5, 6].map(|m| get(&format!("B{m}")));
    let p = EquationParams { d, l: get("L"), b };
    p.validate().map_err(|e| usage(e.to_string()))?;
    Ok(p)
}

/// Parses a parameter file. Unset coefficients default to zero; `B6` is
/// required.
fn parse_param_text(text: &str) -> Result<(EquationParams, SolverKeys)> {
    let mut values = BTreeMap::new();
    let mut keys = SolverKeys::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("line {}: expected `key = value`", lineno + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        match k {
            _ if PARAM_KEYS.contains(&k) => {
                if values
                    .insert(k.to_string(), parse_num::<f64>(k, v)?)
                    .is_some()
                {
                    return Err(usage(format!("`{k}` given twice")));
                }
            }
            "precision" => keys.precision = Some(parse_num(k, v)?),
            "m" => keys.m = Some(v.to_string()),
            "K" => keys.k = Some(parse_num(k, v)?),
            "lmax" => keys.lmax = Some(parse_num(k, v)?),
            "lambda" => keys.lambda = Some(v.to_string()),
            "oracle" => {
                keys.oracle = Some(
                    OracleChoice::from_str(v, false)
                        .map_err(|_| usage(format!("unknown oracle `{v}`")))?,
                )
            }
            _ => return Err(usage(format!("line {}: unknown key `{k}`", lineno + 1))),
        }
    }
    Ok((params_from_map(&values)?, keys))
}

pub fn parse_param_file(text: &str) -> Result<EquationParams> {
    Ok(parse_param_text(text)?.0)
}

fn parse_m(v: &str) -> Result<MChoice> {
    if v == "adaptive" {
        return Ok(SolverSettings::default().m);
    }
    let m: usize = parse_num("m", v)?;
    Ok(MChoice::Fixed(m))
}

fn parse_lambda(v: &str) -> Result<LambdaChoice> {
    if v == "auto" {
        return Ok(LambdaChoice::Auto);
    }
    Ok(LambdaChoice::Fixed(parse_num("lambda", v)?))
}

fn settings_from(keys: &SolverKeys, args: &Args) -> Result<(SolverSettings, OracleChoice)> {
    let mut s = SolverSettings::default();
    if let Some(p) = args.precision.or(keys.precision) {
        s.prec = p;
    }
    if let Some(m) = args.m.as_ref().or(keys.m.as_ref()) {
        s.m = parse_m(m)?;
    }
    if let Some(k) = args.k.or(keys.k) {
        s.k_order = k;
    }
    if let Some(l) = args.lmax.or(keys.lmax) {
        s.lmax = l;
    }
    if let Some(l) = args.lambda.as_ref().or(keys.lambda.as_ref()) {
        s.lambda = parse_lambda(l)?;
    }
    s.validate()?;
    Ok((s, args.oracle.or(keys.oracle).unwrap_or(OracleChoice::None)))
}

pub fn config_from(text: &str, args: &Args) -> Result<RunConfig> {
    let (params, keys) = parse_param_text(text)?;
    let (settings, oracle) = settings_from(&keys, args)?;
    Ok(RunConfig {
        params,
        settings,
        oracle,
        output: args.out.clone(),
    })
}

#[derive(Clone, Debug)]
pub struct OdeCheck {
    pub sample: std::result::Result<MonodromySample, String>,
    pub gap: f64,
    pub tolerance: f64,
    pub agrees: bool,
}

#[derive(Clone, Debug)]
pub struct HillCheck {
    pub at: HillResidual,
    pub at_doubled: HillResidual,
    pub below: HillResidual,
    pub above: HillResidual,
    pub ratio: f64,
    pub agrees: bool,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub config: RunConfig,
    pub solution: Solution,
    pub ode: Option<OdeCheck>,
    pub hill: Option<HillCheck>,
    pub warnings: Vec<Warning>,
}

impl RunReport {
    pub fn oracle_disagrees(&self) -> bool {
        self.ode.as_ref().is_some_and(|c| !c.agrees)
            || self.hill.as_ref().is_some_and(|c| !c.agrees)
    }

    pub fn exit_code(&self) -> i32 {
        if self.oracle_disagrees() {
            EXIT_ORACLE
        } else {
            EXIT_OK
        }
    }
}

fn ode_check(sol: &Solution, params: &EquationParams) -> OdeCheck {
    let cos = sol.result.cos_two_pi_omega.to_c64();
    match oracle::monodromy_trace_ode(params, ODE_RADIUS, ODE_TARGET * (1.0 + cos.norm())) {
        Ok(s) => {
            let gap = (s.half_trace() - cos).norm();
            let tolerance = ODE_AGREEMENT_TOL + s.error_estimate + sol.cos_error();
            OdeCheck {
                agrees: gap <= tolerance,
                sample: Ok(s),
                gap,
                tolerance,
            }
        }
        Err(e) => OdeCheck {
            sample: Err(e.to_string()),
            gap: f64::NAN,
            tolerance: ODE_AGREEMENT_TOL,
            agrees: false,
        },
    }
}

fn hill_check(sol: &Solution, params: &EquationParams) -> Result<HillCheck> {
    let omega = sol.result.omega.to_c64();
    let at = oracle::hill_residual(params, omega, HILL_DEFAULT_N)?;
    let at_doubled = oracle::hill_residual(params, omega, 2 * HILL_DEFAULT_N)?;
    let below = oracle::hill_residual(params, omega - HILL_OFFSET, HILL_DEFAULT_N)?;
    let above = oracle::hill_residual(params, omega + HILL_OFFSET, HILL_DEFAULT_N)?;
    let ratio = below.value.min(above.value) / at.value.max(at_doubled.value);
    Ok(HillCheck {
        agrees: ratio >= HILL_DIP_RATIO,
        at,
        at_doubled,
        below,
        above,
        ratio,
    })
}

fn push_unique(list: &mut Vec<Warning>, w: Warning) {
    if !list.contains(&w) {
        list.push(w);
    }
}

/// Solves one configuration and runs the requested oracles.
pub fn run_pipeline(config: &RunConfig) -> Result<RunReport> {
    let solution = pipeline::solve(&config.params, &config.settings)?;
    let ode = config
        .oracle
        .ode()
        .then(|| ode_check(&solution, &config.params));
    let hill = if config.oracle.hill() {
        Some(hill_check(&solution, &config.params)?)
    } else {
        None
    };
    let mut warnings = Vec::new();
    for w in &solution.warnings {
        push_unique(&mut warnings, w.clone());
    }
    if let Some(Err(e)) = ode.as_ref().map(|c| &c.sample) {
        push_unique(
            &mut warnings,
            Warning::new("oracle", format!("ODE circuit failed: {e}")),
        );
    }
    if let Some(h) = &hill {
        let mut rows: Vec<i64> = [&h.at, &h.at_doubled, &h.below, &h.above]
            .iter()
            .flat_map(|r| r.shifted_rows.iter().copied())
            .collect();
        rows.sort_unstable();
        rows.dedup();
        if !rows.is_empty() {
            push_unique(
                &mut warnings,
                Warning::new(
                    "oracle",
                    format!("recurrence rows {rows:?} used the shifted normalization"),
                ),
            );
        }
    }
    Ok(RunReport {
        config: config.clone(),
        solution,
        ode,
        hill,
        warnings,
    })
}

fn dec(x: &Float) -> String {
    mp::to_decimal(x)
}

fn cdec(z: &Complex) -> String {
    let (re, im) = z.to_decimal();
    format!("{re} {im}")
}

fn c64(z: Complex64) -> String {
    format!("{:e} {:e}", z.re, z.im)
}

fn m_label(m: MChoice) -> String {
    match m {
        MChoice::Adaptive { start, max } => format!("adaptive {start}..{max}"),
        MChoice::Fixed(m) => m.to_string(),
    }
}

/// The report as `[section]` headers followed by `key = value` lines.
pub fn render_report(r: &RunReport) -> String {
    let mut o = String::new();
    let cfg = &r.config;
    let sol = &r.solution;
    let fr = &sol.frame;
    let p = &cfg.params;
    let s = &cfg.settings;
    macro_rules! kv {
        ($k:expr, $v:expr) => {
            let _ = writeln!(o, "{} = {}", $k, $v);
        };
    }
    macro_rules! section {
        ($name:expr) => {
            let _ = writeln!(o, "\n[{}]", $name);
        };
    }
    let _ = writeln!(o, "# rank3-floquet {}", env!("CARGO_PKG_VERSION"));
    section!("input");
    for m in 1..=6 {
        kv!(format!("D{m}"), p.d[m - 1]);
    }
    kv!("L", p.l);
    for m in 1..=6 {
        kv!(format!("B{m}"), p.b[m - 1]);
    }
    section!("settings");
    kv!("precision", s.prec);
    kv!("m", m_label(s.m));
    kv!("K", s.k_order);
    kv!("lmax", s.lmax);
    kv!(
        "lambda",
        match s.lambda {
            LambdaChoice::Auto => "auto".to_string(),
            LambdaChoice::Fixed(x) => x.to_string(),
        }
    );
    kv!("oracle", cfg.oracle.name());

    section!("frame");
    kv!("p1", dec(&fr.p1));
    kv!("p2", dec(&fr.p2));
    kv!("p3", dec(&fr.p3));
    for k in Kappa::BOTH {
        kv!(format!("tau({k})"), dec(fr.tau(k)));
    }
    for k in Kappa::BOTH {
        kv!(format!("mu({k})"), dec(fr.mu(k)));
    }
    kv!("lambda", dec(fr.lambda()));
    kv!("lambda_shifted", sol.lambda_shifted);

    for g in &sol.grids {
        section!(format!("egrid({})", g.kappa_target()));
        kv!("m", g.m_used);
        kv!("K", g.k_used);
        kv!("levels", g.lmax);
        for (n1, n2, v, e) in g.entries() {
            kv!(
                format!("e({n1},{n2})"),
                format!("{} {:e}", dec(v), e.to_f64())
            );
        }
    }

    section!("stokes");
    for k in Kappa::BOTH {
        for rr in 0..3 {
            kv!(
                format!("S{rr}({k})"),
                format!(
                    "{} {:e}",
                    dec(sol.stokes.sum(k, rr)),
                    sol.stokes.sum_errors[k.index()][rr].to_f64()
                )
            );
        }
    }
    for n in 0..3 {
        for k in Kappa::BOTH {
            kv!(format!("sigma{n}({k})"), cdec(sol.stokes.sigma(n, k)));
        }
    }

    let res = &sol.result;
    section!("circuit");
    kv!("T11", cdec(&res.circuit.t11));
    kv!("T12", cdec(&res.circuit.t12));
    kv!("T21", cdec(&res.circuit.t21));
    kv!("T22", cdec(&res.circuit.t22));
    kv!("det_deviation", format!("{:e}", res.det_deviation.to_f64()));

    section!("result");
    kv!("X", cdec(&res.x));
    kv!("cos_two_pi_omega", cdec(&res.cos_two_pi_omega));
    kv!("cos_error", format!("{:e}", sol.cos_error()));
    kv!("omega", cdec(&res.omega));
    kv!("p_plus", cdec(&res.multipliers.0));
    kv!("p_minus", cdec(&res.multipliers.1));
    for (i, (a, b)) in sol.solutions.pairs.iter().enumerate() {
        kv!(format!("pair{}", i + 1), format!("{} {}", cdec(a), cdec(b)));
    }
    kv!("degenerate", sol.solutions.degenerate);

    if r.ode.is_some() || r.hill.is_some() {
        section!("oracle");
        if let Some(c) = &r.ode {
            match &c.sample {
                Ok(smp) => {
                    kv!("ode.radius", smp.radius);
                    kv!("ode.steps", smp.steps);
                    kv!("ode.precision", smp.prec);
                    kv!("ode.half_trace", c64(smp.half_trace()));
                    kv!("ode.error_estimate", format!("{:e}", smp.error_estimate));
                    kv!(
                        "ode.det_deviation",
                        format!("{:e}", (smp.det().to_c64() - 1.0).norm())
                    );
                    kv!("ode.gap", format!("{:e}", c.gap));
                }
                Err(e) => {
                    kv!("ode.failure", e);
                }
            }
            kv!("ode.tolerance", format!("{:e}", c.tolerance));
            kv!("ode.agrees", c.agrees);
        }
        if let Some(h) = &r.hill {
            kv!("hill.N", h.at.n);
            kv!("hill.at_omega", format!("{:e}", h.at.value));
            kv!("hill.at_omega_2N", format!("{:e}", h.at_doubled.value));
            kv!("hill.at_omega_minus", format!("{:e}", h.below.value));
            kv!("hill.at_omega_plus", format!("{:e}", h.above.value));
            kv!("hill.dip_ratio", format!("{:e}", h.ratio));
            kv!("hill.agrees", h.agrees);
        }
    }

    section!("warnings");
    kv!("count", r.warnings.len());
    for (i, w) in r.warnings.iter().enumerate() {
        kv!(format!("w{}", i + 1), w);
    }

    section!("diagnostics");
    for sv in &sol.solves {
        let k = sv.kappa;
        kv!(format!("m_converged({k})"), sv.m_converged);
        kv!(format!("m_change({k})"), format!("{:e}", sv.m_change));
    }
    for k in Kappa::BOTH {
        let c = &sol.stokes.cuts[k.index()];
        kv!(format!("level_cut({k})"), c.cut);
        kv!(format!("levels_converged({k})"), c.converged);
    }
    kv!("stokes_converged", sol.stokes.converged());
    kv!("budget.k_order", format!("{:e}", sol.budget.k_order));
    kv!("budget.m_order", format!("{:e}", sol.budget.m_order));
    kv!("budget.levels", format!("{:e}", sol.budget.levels));
    kv!("budget.rounding", format!("{:e}", sol.budget.rounding));
    kv!("route_gap", format!("{:e}", res.route_gap().to_f64()));
    o
}

/// Report for a fatal error, with the module it came from.
pub fn render_error(e: &Error) -> String {
    format!(
        "# rank3-floquet {}\n\n[error]\nmodule = {}\nmessage = {}\n",
        env!("CARGO_PKG_VERSION"),
        e.module(),
        e
    )
}

pub fn exit_code_for(e: &Error) -> i32 {
    if e.is_usage() {
        EXIT_USAGE
    } else {
        EXIT_NUMERICAL
    }
}

const CSV_HEADER: [&str; 24] = [
    "row",
    "D1",
    "D2",
    "D3",
    "D4",
    "D5",
    "D6",
    "L",
    "B1",
    "B2",
    "B3",
    "B4",
    "B5",
    "B6",
    "status",
    "cos_re",
    "cos_im",
    "cos_error",
    "omega_re",
    "omega_im",
    "det_deviation",
    "warnings",
    "ode_gap",
    "hill_ratio",
];

fn read_sweep(text: &str) -> Result<Vec<EquationParams>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| usage(format!("sweep header: {e}")))?
        .clone();
    for h in headers.iter() {
        if !PARAM_KEYS.contains(&h) {
            return Err(usage(format!("sweep column `{h}` is not a parameter")));
        }
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| usage(format!("sweep row {}: {e}", i + 1)))?;
        let mut values = BTreeMap::new();
        for (h, v) in headers.iter().zip(rec.iter()) {
            values.insert(h.to_string(), parse_num::<f64>(h, v)?);
        }
        out.push(params_from_map(&values).map_err(|e| usage(format!("sweep row {}: {e}", i + 1)))?);
    }
    Ok(out)
}

fn csv_row(i: usize, p: &EquationParams, outcome: &Result<RunReport>) -> Vec<String> {
    let mut row = vec![i.to_string()];
    row.extend(p.d.iter().map(|x| x.to_string()));
    row.push(p.l.to_string());
    row.extend(p.b.iter().map(|x| x.to_string()));
    match outcome {
        Ok(r) => {
            let res = &r.solution.result;
            row.push(
                if r.oracle_disagrees() {
                    "oracle-disagreement"
                } else {
                    "ok"
                }
                .into(),
            );
            row.push(dec(&res.cos_two_pi_omega.re));
            row.push(dec(&res.cos_two_pi_omega.im));
            row.push(format!("{:e}", r.solution.cos_error()));
            row.push(dec(&res.omega.re));
            row.push(dec(&res.omega.im));
            row.push(format!("{:e}", res.det_deviation.to_f64()));
            row.push(r.warnings.len().to_string());
            row.push(
                r.ode
                    .as_ref()
                    .map(|c| format!("{:e}", c.gap))
                    .unwrap_or_default(),
            );
            row.push(
                r.hill
                    .as_ref()
                    .map(|c| format!("{:e}", c.ratio))
                    .unwrap_or_default(),
            );
        }
        Err(e) => {
            row.push(format!("error: {} ({})", e, e.module()));
            row.extend(std::iter::repeat_n(String::new(), 9));
        }
    }
    row
}

/// Runs every sweep row and returns the CSV document and the worst exit code.
pub fn run_sweep(text: &str, args: &Args) -> Result<(String, i32)> {
    use rayon::prelude::*;
    let rows = read_sweep(text)?;
    let (settings, oracle) = settings_from(&SolverKeys::default(), args)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.max(1))
        .build()
        .map_err(|e| usage(format!("thread pool: {e}")))?;
    let outcomes: Vec<Result<RunReport>> = pool.install(|| {
        rows.par_iter()
            .map(|p| {
                run_pipeline(&RunConfig {
                    params: p.clone(),
                    settings: settings.clone(),
                    oracle,
                    output: None,
                })
            })
            .collect()
    });
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Usage(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    let mut code = EXIT_OK;
    for (i, (p, o)) in rows.iter().zip(&outcomes).enumerate() {
        w.write_record(csv_row(i + 1, p, o)).map_err(io)?;
        let c = match o {
            Ok(r) => r.exit_code(),
            Err(e) => exit_code_for(e),
        };
        code = code.max(c);
    }
    let bytes = w.into_inner().map_err(|e| usage(format!("csv: {e}")))?;
    Ok((String::from_utf8(bytes).expect("csv output is UTF-8"), code))
}

fn emit(out: &Option<PathBuf>, body: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

/// Entry point behind the binary; returns the process exit code.
pub fn run(args: &Args) -> i32 {
    let read = |p: &PathBuf| {
        std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))
    };
    let (body, code) = match (&args.sweep, &args.params) {
        (Some(path), None) => match read(path).and_then(|t| run_sweep(&t, args)) {
            Ok(r) => r,
            Err(e) => (render_error(&e), exit_code_for(&e)),
        },
        (None, Some(path)) => {
            let outcome = read(path)
                .and_then(|t| config_from(&t, args))
                .and_then(|c| run_pipeline(&c));
            match outcome {
                Ok(r) => (render_report(&r), r.exit_code()),
                Err(e) => (render_error(&e), exit_code_for(&e)),
            }
        }
        _ => {
            let e = usage("give either a parameter file or --sweep <file>");
            (render_error(&e), EXIT_USAGE)
        }
    };
    if let Err(e) = emit(&args.out, &body) {
        eprintln!("cannot write output: {e}");
        return EXIT_USAGE;
    }
    if code != EXIT_OK {
        eprintln!("exit status {code}");
    }
    code
}
