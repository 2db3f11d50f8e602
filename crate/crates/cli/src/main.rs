mod complex;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use num_complex::Complex64;
use serde::Serialize;

use ptheta_core::bounds::{certify_disk_rouche, run_suite, Regime, Suite, SuiteSummary};
use ptheta_core::sweep::{
    audit, sweep_double_zeros, write_trend_csv, CertLine, DzLine, SeedStrategy, SweepConfig, Tolerances,
};
use ptheta_core::theta::{
    compute_c0, compute_c0_extended, eval_g, eval_theta_auto, eval_theta_dx, eval_thetastar_product, mu,
    theta_real_extended, DoubleDouble, EvalPath,
};
use ptheta_core::zeros::{refine_zero_newton, refine_zero_seeded, zeros_up_to_k, SeedKind, SolveMode};
use ptheta_core::{Error, EvalResult, QParameter};

use complex::parse_complex;

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "ptheta", version, about = "Partial theta function numerics")]
struct Cli {
    /// Output format on standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads; 0 picks the number of CPUs.
    #[arg(long, global = true, default_value_t = 0)]
    parallelism: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate θ, ∂θ/∂x, Θ* or G at one point.
    Eval(EvalArgs),
    /// Locate the zeros of θ(q,·) ring by ring, or refine one seed.
    Zeros(ZerosArgs),
    /// Rouché certificate for the disk around μ_s.
    Certify(CertifyArgs),
    /// Sweep q for double zeros and write dz/1 JSONL.
    ScanDouble(ScanArgs),
    /// Run randomized bound suites.
    VerifyBounds(VerifyArgs),
    /// The root c0 of τ(r) = 1.
    C0(C0Args),
    /// Re-check a JSONL record file.
    Audit(AuditArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Function {
    Theta,
    Dtheta,
    Thetastar,
    G,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    q: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    x: Complex64,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Function::Theta)]
    function: Function,
}

#[derive(Args)]
struct ZerosArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    q: Complex64,
    /// Locate all zeros inside |x| = |q|^{-k-1/2}.
    #[arg(long, default_value_t = 6, conflicts_with = "x0")]
    k_max: u32,
    /// Refine a single zero from this starting point instead.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    x0: Option<Complex64>,
    /// Refine a single zero from the lattice point μ_s.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "x0")]
    from_mu: Option<i64>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    q: Complex64,
    #[arg(long, allow_hyphen_values = true)]
    s: i64,
    /// Last index of a range starting at --s.
    #[arg(long)]
    s_max: Option<i64>,
    /// `half-q`, `n=3`, or `auto` to choose from |q|.
    #[arg(long, default_value = "auto")]
    regime: String,
    #[arg(long, default_value_t = 4096)]
    samples: usize,
    /// Also refine the zero inside each disk by Newton from μ_s.
    #[arg(long)]
    newton: bool,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct ScanArgs {
    /// JSON SweepConfig; overrides the grid flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0.25)]
    q_lo: f64,
    #[arg(long, default_value_t = 0.6)]
    q_hi: f64,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    #[arg(long, default_value_t = -30.0, allow_hyphen_values = true)]
    x_lo: f64,
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    x_hi: f64,
    #[arg(long, default_value_t = 200)]
    x_steps: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// JSONL output file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated suite names or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Include every failing report in the output.
    #[arg(long)]
    show_failures: bool,
}

#[derive(Args)]
struct C0Args {
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct AuditArgs {
    path: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Precision {
    Double,
    Extended,
}

fn precision_from_env() -> Result<Precision, String> {
    match std::env::var("PTHETA_PRECISION") {
        Err(_) => Ok(Precision::Double),
        Ok(v) => match v.to_ascii_lowercase().as_str() {
            "" | "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            other => Err(format!(
                "PTHETA_PRECISION must be 'double' or 'extended', got '{other}'"
            )),
        },
    }
}

/// Failure of a command, carrying the exit code.
enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<bool, Failure>;

struct Out {
    format: Format,
}

impl Out {
    fn one<T: Serialize>(&self, v: &T) -> Result<(), Failure> {
        self.rows(std::slice::from_ref(v))
    }

    fn rows<T: Serialize>(&self, rows: &[T]) -> Result<(), Failure> {
        let mut stdout = std::io::stdout().lock();
        match self.format {
            Format::Json => {
                let s = if rows.len() == 1 {
                    serde_json::to_string_pretty(&rows[0])?
                } else {
                    serde_json::to_string_pretty(rows)?
                };
                writeln!(stdout, "{s}")?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(stdout);
                for r in rows {
                    w.serialize(r)?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }

    fn list<T: Serialize>(&self, rows: &[T]) -> Result<(), Failure> {
        match self.format {
            Format::Json => {
                writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(rows)?)?;
                Ok(())
            }
            Format::Csv => self.rows(rows),
        }
    }
}

fn qparam(z: Complex64) -> Result<QParameter, Failure> {
    QParameter::from_complex(z).map_err(|e| Failure::Usage(e.to_string()))
}

#[derive(Serialize)]
struct EvalOut {
    function: Function,
    q_re: f64,
    q_im: f64,
    x_re: f64,
    x_im: f64,
    re: f64,
    im: f64,
    log_abs: f64,
    arg: f64,
    tail_bound: f64,
    terms_used: usize,
    path: &'static str,
    precision: &'static str,
    precision_loss: bool,
}

fn eval(a: &EvalArgs, out: &Out, precision: Precision) -> CmdResult {
    let q = qparam(a.q)?;
    let (r, path): (EvalResult, &'static str) = match a.function {
        Function::Theta => {
            let (r, p) = eval_theta_auto(&q, a.x, a.tol)?;
            (r, if p == EvalPath::Direct { "direct" } else { "identity" })
        }
        Function::Dtheta => (eval_theta_dx(&q, a.x, a.tol)?, "direct"),
        Function::Thetastar => (eval_thetastar_product(&q, a.x, a.tol)?, "product"),
        Function::G => (eval_g(&q, a.x, a.tol)?, "direct"),
    };
    let z = r.to_complex();
    let mut o = EvalOut {
        function: a.function,
        q_re: a.q.re,
        q_im: a.q.im,
        x_re: a.x.re,
        x_im: a.x.im,
        re: z.re,
        im: z.im,
        log_abs: r.value.log_modulus,
        arg: r.value.argument,
        tail_bound: r.tail(),
        terms_used: r.terms_used,
        path,
        precision: "double",
        precision_loss: r.precision_loss,
    };
    if precision == Precision::Extended {
        let real = a.q.im == 0.0 && a.x.im == 0.0 && a.function == Function::Theta;
        match real.then(|| theta_real_extended(DoubleDouble::from_f64(a.q.re), DoubleDouble::from_f64(a.x.re))) {
            Some(Ok(v)) => {
                o.re = v.to_f64();
                o.im = 0.0;
                o.log_abs = o.re.abs().ln();
                o.arg = if o.re < 0.0 { std::f64::consts::PI } else { 0.0 };
                o.path = "direct";
                o.precision = "extended";
            }
            Some(Err(e)) => warn!("extended precision unavailable here ({e}); using double"),
            None => warn!("extended precision covers real θ only; using double"),
        }
    }
    out.one(&o)?;
    Ok(true)
}

#[derive(Serialize)]
struct ZeroOut {
    index: usize,
    re: f64,
    im: f64,
    modulus: f64,
    multiplicity: u32,
    residual: f64,
    newton_iterations: usize,
    seed: String,
}

fn seed_name(s: &SeedKind) -> String {
    match s {
        SeedKind::MuLattice { s } => format!("mu({s})"),
        SeedKind::Ring { k } => format!("ring({k})"),
        SeedKind::User => "user".into(),
    }
}

fn zeros(a: &ZerosArgs, out: &Out) -> CmdResult {
    let q = qparam(a.q)?;
    let recs = match (a.x0, a.from_mu) {
        (Some(x0), _) => vec![refine_zero_newton(&q, x0, a.tol, a.max_iter)?],
        (None, Some(s)) => vec![refine_zero_seeded(
            &q,
            mu(&q, s),
            SeedKind::MuLattice { s },
            a.tol,
            a.max_iter,
        )?],
        (None, None) => zeros_up_to_k(&q, a.k_max)?,
    };
    let rows: Vec<ZeroOut> = recs
        .iter()
        .enumerate()
        .map(|(i, r)| ZeroOut {
            index: i,
            re: r.location.re,
            im: r.location.im,
            modulus: r.location.norm(),
            multiplicity: r.multiplicity,
            residual: r.residual,
            newton_iterations: r.newton_iterations,
            seed: seed_name(&r.seed),
        })
        .collect();
    out.list(&rows)?;
    Ok(true)
}

#[derive(Serialize)]
struct CertOut {
    #[serde(flatten)]
    cert: CertLine,
    #[serde(skip_serializing_if = "Option::is_none")]
    zero_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    zero_im: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    zero_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    zero_in_disk: Option<bool>,
}

#[derive(Serialize)]
struct CertRow {
    q_re: f64,
    q_im: f64,
    s: i64,
    regime: String,
    radius: f64,
    samples: usize,
    min_thetastar: Option<f64>,
    max_g: Option<f64>,
    winding: Option<i64>,
    in_x: bool,
    pass: bool,
    zero_re: Option<f64>,
    zero_im: Option<f64>,
    zero_residual: Option<f64>,
    zero_in_disk: Option<bool>,
}

fn certify(a: &CertifyArgs, out: &Out) -> CmdResult {
    let q = qparam(a.q)?;
    let regime = if a.regime.eq_ignore_ascii_case("auto") {
        Regime::for_modulus(q.modulus())
            .ok_or_else(|| Failure::Usage(format!("no regime covers |q| = {}", q.modulus())))?
    } else {
        a.regime.parse::<Regime>().map_err(|e| Failure::Usage(e.to_string()))?
    };
    let s_max = a.s_max.unwrap_or(a.s);
    if s_max < a.s {
        return Err(Failure::Usage(format!("--s-max {s_max} is below --s {}", a.s)));
    }
    let mut all_pass = true;
    let mut certs = Vec::new();
    for s in a.s..=s_max {
        let c = certify_disk_rouche(&q, s, regime, a.samples)?;
        let mut o = CertOut {
            cert: CertLine::from(&c),
            zero_re: None,
            zero_im: None,
            zero_residual: None,
            zero_in_disk: None,
        };
        if a.newton && c.pass {
            let m = mu(&q, s);
            let z = refine_zero_seeded(&q, m, SeedKind::MuLattice { s }, a.tol, 100)?;
            let inside = (z.location - m).norm() < c.radius && z.multiplicity == 1;
            o.zero_re = Some(z.location.re);
            o.zero_im = Some(z.location.im);
            o.zero_residual = Some(z.residual);
            o.zero_in_disk = Some(inside);
            all_pass &= inside;
        }
        info!("s = {s}: pass = {}", c.pass);
        all_pass &= c.pass;
        certs.push(o);
    }
    match out.format {
        Format::Json => out.rows(&certs)?,
        Format::Csv => {
            let rows: Vec<CertRow> = certs
                .iter()
                .map(|o| CertRow {
                    q_re: o.cert.q_re,
                    q_im: o.cert.q_im,
                    s: o.cert.s,
                    regime: o.cert.n_or_regime.clone(),
                    radius: o.cert.radius,
                    samples: o.cert.samples,
                    min_thetastar: o.cert.min_thetastar,
                    max_g: o.cert.max_g,
                    winding: o.cert.winding,
                    in_x: o.cert.in_x,
                    pass: o.cert.pass,
                    zero_re: o.zero_re,
                    zero_im: o.zero_im,
                    zero_residual: o.zero_residual,
                    zero_in_disk: o.zero_in_disk,
                })
                .collect();
            out.rows(&rows)?
        }
    }
    Ok(all_pass)
}

fn scan_double(a: &ScanArgs, out: &Out, parallelism: usize) -> CmdResult {
    let mut cfg = match &a.config {
        Some(p) => serde_json::from_str::<SweepConfig>(&std::fs::read_to_string(p)?)?,
        None => {
            let mut c = SweepConfig::real(
                a.q_lo,
                a.q_hi,
                a.steps,
                SeedStrategy::RealLine {
                    lo: a.x_lo,
                    hi: a.x_hi,
                    steps: a.x_steps,
                },
            );
            c.tolerances = Tolerances {
                newton: a.tol,
                ..Tolerances::default()
            };
            c.mode = SolveMode::Real;
            c
        }
    };
    if a.out.is_some() {
        cfg.output_path = a.out.clone();
    }
    if parallelism > 0 {
        cfg.parallelism = parallelism;
    }
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let recs = sweep_double_zeros(&cfg)?;
    info!("{} double zeros", recs.len());
    let lines: Vec<DzLine> = recs.iter().map(DzLine::from).collect();
    out.list(&lines)?;
    Ok(lines.iter().all(|l| l.bound_ok))
}

#[derive(Serialize)]
struct VerifyOut {
    seed: u64,
    trials: usize,
    total_failures: usize,
    suites: Vec<SuiteSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    failures: Vec<ptheta_core::bounds::BoundReport>,
}

fn verify_bounds(a: &VerifyArgs, out: &Out) -> CmdResult {
    let suites = Suite::parse_list(&a.suite).map_err(|e| Failure::Usage(e.to_string()))?;
    if a.trials == 0 {
        return Err(Failure::Usage("--trials must be positive".into()));
    }
    let mut summaries = Vec::new();
    let mut failures = Vec::new();
    for s in suites {
        let o = run_suite(s, a.trials, a.seed);
        info!(
            "{}: {} reports, {} failures",
            s.name(),
            o.summary.reports,
            o.summary.failures
        );
        if a.show_failures {
            failures.extend(o.reports.into_iter().filter(|r| !r.pass));
        }
        summaries.push(o.summary);
    }
    let total: usize = summaries.iter().map(|s| s.failures + s.errors).sum();
    match out.format {
        Format::Json => out.one(&VerifyOut {
            seed: a.seed,
            trials: a.trials,
            total_failures: total,
            suites: summaries,
            failures,
        })?,
        Format::Csv => out.rows(&summaries)?,
    }
    Ok(total == 0)
}

#[derive(Serialize)]
struct C0Out {
    c0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    c0_lo: Option<f64>,
}

fn c0(a: &C0Args, out: &Out, precision: Precision) -> CmdResult {
    if !(a.tol > 0.0 && a.tol.is_finite()) {
        return Err(Failure::Usage(format!("--tol must be positive, got {}", a.tol)));
    }
    let o = match precision {
        Precision::Double => C0Out {
            c0: compute_c0(a.tol)?,
            c0_lo: None,
        },
        Precision::Extended => {
            let v = compute_c0_extended(a.tol)?;
            C0Out {
                c0: v.hi,
                c0_lo: Some(v.lo),
            }
        }
    };
    out.one(&o)?;
    Ok(true)
}

fn audit_cmd(a: &AuditArgs, out: &Out) -> CmdResult {
    let summary = audit(&a.path)?;
    match out.format {
        Format::Json => out.one(&summary)?,
        Format::Csv => write_trend_csv(&summary, std::io::stdout().lock())?,
    }
    Ok(summary.bound_violations == 0)
}

fn run(cli: &Cli) -> CmdResult {
    let precision = precision_from_env().map_err(Failure::Usage)?;
    if cli.parallelism > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.parallelism)
            .build_global()
        {
            warn!("could not size the thread pool: {e}");
        }
    }
    let out = Out { format: cli.format };
    match &cli.command {
        Command::Eval(a) => eval(a, &out, precision),
        Command::Zeros(a) => zeros(a, &out),
        Command::Certify(a) => certify(a, &out),
        Command::ScanDouble(a) => scan_double(a, &out, cli.parallelism),
        Command::VerifyBounds(a) => verify_bounds(a, &out),
        Command::C0(a) => c0(a, &out, precision),
        Command::Audit(a) => audit_cmd(a, &out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILED),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_USAGE })
        }
    }
}
