//! Command-line driver: single-state measures, boundary sweeps, seeded
//! scatters (CSV) and verification suites (JSON).
//!
//! Exit codes: 0 on success, 1 when a verification suite fails or a
//! computation breaks a numerical contract, 2 on usage errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcorr::experiments::{
    self, Axis, MeasureRecord, MeasureSet, ScatterOptions, Theorem, TheoremOptions,
    VerificationReport, BOUNDARY_SLACK, IDENTITY_TOL,
};
use qcorr::{bell::NONZERO_BV, Error, FamilyKind, FamilySpec, State};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 2016;
/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "QCORR_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "qcorr",
    version,
    about = "Bell-violation monogamy and multiparty correlation measures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one state and print `key=value` lines.
    Measure(MeasureArgs),
    /// Trace a family's (measure, delta_bv) curve as CSV.
    Sweep(SweepArgs),
    /// Seeded sampler batch as CSV, one row per sample.
    Scatter(ScatterArgs),
    /// Run a verification suite and print a JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParamFamily {
    Gghz,
    Sghz,
}

impl From<ParamFamily> for FamilyKind {
    fn from(f: ParamFamily) -> Self {
        match f {
            ParamFamily::Gghz => FamilyKind::Gghz,
            ParamFamily::Sghz => FamilyKind::Sghz,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerClass {
    Haar,
    Ghz3,
    #[value(name = "w_class", alias = "w3", alias = "w-class")]
    WClass,
    Symmetric,
}

impl From<SamplerClass> for FamilyKind {
    fn from(c: SamplerClass) -> Self {
        match c {
            SamplerClass::Haar => FamilyKind::Haar,
            SamplerClass::Ghz3 => FamilyKind::Ghz3,
            SamplerClass::WClass => FamilyKind::WClass,
            SamplerClass::Symmetric => FamilyKind::Symmetric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArrowChoice {
    Fwd,
    Bwd,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisChoice {
    Ggm,
    Tangle,
    #[value(name = "discord_fwd", alias = "discord")]
    DiscordFwd,
    #[value(name = "discord_bwd")]
    DiscordBwd,
    #[value(name = "wd_fwd", alias = "wd")]
    WdFwd,
    #[value(name = "wd_bwd")]
    WdBwd,
}

impl From<AxisChoice> for Axis {
    fn from(a: AxisChoice) -> Self {
        match a {
            AxisChoice::Ggm => Axis::Ggm,
            AxisChoice::Tangle => Axis::Tangle,
            AxisChoice::DiscordFwd => Axis::DiscordFwd,
            AxisChoice::DiscordBwd => Axis::DiscordBwd,
            AxisChoice::WdFwd => Axis::WdFwd,
            AxisChoice::WdBwd => Axis::WdBwd,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct MeasureOpts {
    /// Nodal qubit anchoring every monogamy score.
    #[arg(long, default_value_t = 0)]
    pub nodal: usize,
    /// Comma list from {bv, ggm, tangle, discord, wd, all}.
    #[arg(long, default_value = "all")]
    pub measures: String,
    /// Which side is measured for discord and work deficit.
    #[arg(long, value_enum, default_value_t = ArrowChoice::Both)]
    pub arrow: ArrowChoice,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long, value_enum, conflicts_with_all = ["class", "state_file"])]
    pub family: Option<ParamFamily>,
    #[arg(long, value_enum, conflicts_with = "state_file")]
    pub class: Option<SamplerClass>,
    /// Text file with `<index> <re> <im>` lines.
    #[arg(long)]
    pub state_file: Option<PathBuf>,
    #[arg(short = 'n', long = "n-qubits")]
    pub n: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub sample_id: u64,
    #[arg(long)]
    pub reject_tangle_below: Option<f64>,
    #[command(flatten)]
    pub opts: MeasureOpts,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: ParamFamily,
    #[arg(short = 'n', long = "n-qubits", default_value_t = 3)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = AxisChoice::Ggm)]
    pub axis: AxisChoice,
    #[arg(long, default_value_t = experiments::CURVE_POINTS)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScatterArgs {
    #[arg(long, value_enum)]
    pub class: SamplerClass,
    #[arg(short = 'n', long = "n-qubits", default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub reject_tangle_below: Option<f64>,
    #[command(flatten)]
    pub opts: MeasureOpts,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Eq15,
    Theorem1,
    Theorem2,
    Theorem3,
    Theorem4,
    BellMonogamy,
    WTangle,
    Ckw,
    Boundary,
    /// N ≥ 5 boundary scan; reported, never fails the run.
    Conjecture,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Qubit count; defaults to 3 (5 for `conjecture`).
    #[arg(short = 'n', long = "n-qubits")]
    pub n: Option<usize>,
    /// Sampler for `boundary` and `conjecture`.
    #[arg(long, value_enum)]
    pub class: Option<SamplerClass>,
    #[arg(long, value_enum, default_value_t = AxisChoice::Ggm)]
    pub axis: AxisChoice,
    /// Overrides the suite's default tolerance.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(_) => CliError::Compute(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
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
    let result = thread_pool().and_then(|pool| pool.install(|| execute(&cli.command)));
    match result {
        Ok(output) => {
            for w in &output.warnings {
                let _ = writeln!(err, "qcorr: warning: {w}");
            }
            match emit(&output.text, output.path.as_deref(), out) {
                Ok(()) => output.code,
                Err(e) => {
                    let _ = writeln!(err, "qcorr: {e}");
                    1
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "qcorr: {e}");
            e.exit_code()
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let k: usize = v.trim().parse().ok().filter(|&k| k > 0).ok_or_else(|| {
            usage(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))
        })?;
        builder = builder.num_threads(k);
    }
    builder
        .build()
        .map_err(|e| CliError::Compute(e.to_string()))
}

struct Output {
    text: String,
    path: Option<PathBuf>,
    code: i32,
    warnings: Vec<String>,
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()),
    }
}

fn execute(cmd: &Command) -> Result<Output, CliError> {
    match cmd {
        Command::Measure(a) => measure(a),
        Command::Sweep(a) => sweep(a),
        Command::Scatter(a) => scatter(a),
        Command::Verify(a) => verify(a),
    }
}

fn measure_set(opts: &MeasureOpts) -> Result<MeasureSet, CliError> {
    let mut set =
        MeasureSet::parse_list(&opts.measures).map_err(|e| usage(format!("--measures: {e}")))?;
    (set.forward, set.backward) = match opts.arrow {
        ArrowChoice::Fwd => (true, false),
        ArrowChoice::Bwd => (false, true),
        ArrowChoice::Both => (true, true),
    };
    Ok(set)
}

fn check_nodal(nodal: usize, n: usize) -> Result<(), CliError> {
    if nodal >= n {
        return Err(usage(format!(
            "--nodal {nodal} is out of range for {n} qubits"
        )));
    }
    Ok(())
}

fn check_threshold(eps: Option<f64>) -> Result<(), CliError> {
    match eps {
        Some(e) if !(0.0..=1.0).contains(&e) => Err(usage(format!(
            "--reject-tangle-below must be in [0, 1], got {e}"
        ))),
        _ => Ok(()),
    }
}

fn require_n(n: Option<usize>) -> Result<usize, CliError> {
    n.ok_or_else(|| usage("-n is required"))
}

fn check_range(flag: &str, v: f64, lo: f64, hi: f64) -> Result<f64, CliError> {
    if !(lo..=hi).contains(&v) {
        return Err(usage(format!("--{flag} must be in [{lo}, {hi}], got {v}")));
    }
    Ok(v)
}

fn check_finite(flag: &str, v: Option<f64>) -> Result<f64, CliError> {
    match v {
        Some(x) if !x.is_finite() => Err(usage(format!("--{flag} must be finite"))),
        Some(x) => Ok(x),
        None => Ok(0.0),
    }
}

fn measure(a: &MeasureArgs) -> Result<Output, CliError> {
    let measures = measure_set(&a.opts)?;
    let stray = |flags: &[(&str, bool)]| -> Result<(), CliError> {
        match flags.iter().find(|(_, set)| *set) {
            Some((name, _)) => Err(usage(format!("--{name} does not apply here"))),
            None => Ok(()),
        }
    };
    let mut lines = Vec::new();
    let mut warnings = Vec::new();
    let (psi, spec, sample_id): (State, Option<FamilySpec>, u64) = if let Some(family) = a.family {
        let n = require_n(a.n)?;
        let spec = match family {
            ParamFamily::Gghz => {
                stray(&[("beta", a.beta.is_some()), ("theta", a.theta.is_some())])?;
                let lambda = check_range(
                    "lambda",
                    a.lambda
                        .ok_or_else(|| usage("--lambda is required for gghz"))?,
                    0.5,
                    1.0,
                )?;
                FamilySpec::gghz(n, lambda, check_finite("phi", a.phi)?)
            }
            ParamFamily::Sghz => {
                stray(&[("lambda", a.lambda.is_some()), ("phi", a.phi.is_some())])?;
                let beta = check_range(
                    "beta",
                    a.beta.ok_or_else(|| usage("--beta is required for sghz"))?,
                    0.0,
                    1.0,
                )?;
                FamilySpec::sghz(n, beta, check_finite("theta", a.theta)?)
            }
        };
        lines.push(("family".to_string(), spec.kind.to_string()));
        (spec.build(0)?, Some(spec), 0)
    } else if let Some(class) = a.class {
        stray(&[
            ("lambda", a.lambda.is_some()),
            ("phi", a.phi.is_some()),
            ("beta", a.beta.is_some()),
            ("theta", a.theta.is_some()),
        ])?;
        check_threshold(a.reject_tangle_below)?;
        let spec = FamilySpec::sampler(class.into(), require_n(a.n)?, a.seed);
        let psi = experiments::draw_sample(&spec, a.sample_id, a.reject_tangle_below)?;
        lines.push(("class".to_string(), spec.kind.to_string()));
        lines.push(("seed".to_string(), a.seed.to_string()));
        lines.push(("sample_id".to_string(), a.sample_id.to_string()));
        if let Some(eps) = a.reject_tangle_below {
            lines.push(("reject_tangle_below".to_string(), eps.to_string()));
        }
        (psi, Some(spec), a.sample_id)
    } else if let Some(path) = &a.state_file {
        let text = fs::read_to_string(path)
            .map_err(|e| usage(format!("--state-file {}: {e}", path.display())))?;
        let loaded = qcorr::qstate::parse_state_text::<f64>(&text, a.n)
            .map_err(|e| usage(format!("--state-file {}: {e}", path.display())))?;
        if loaded.norm_warning() {
            warnings.push(format!("state norm {} renormalized to 1", loaded.raw_norm));
        }
        lines.push(("state_file".to_string(), path.display().to_string()));
        (loaded.state, None, 0)
    } else {
        return Err(usage(
            "one of --family, --class or --state-file is required",
        ));
    };
    let n = psi.n_qubits();
    check_nodal(a.opts.nodal, n)?;
    let rec = experiments::evaluate(&psi, spec.as_ref(), sample_id, a.opts.nodal, &measures)?;
    lines.push(("n".to_string(), n.to_string()));
    if let Some(spec) = &spec {
        for (k, v) in &spec.params {
            lines.push((k.clone(), v.to_string()));
        }
    }
    lines.push(("nodal".to_string(), rec.nodal.to_string()));
    lines.push(("lambda1".to_string(), rec.lambda1.to_string()));
    if let Some(g) = rec.ggm {
        lines.push(("ggm".to_string(), g.to_string()));
    }
    lines.push(("bv_rest".to_string(), rec.bv_one_vs_rest.to_string()));
    for (k, b) in rec.bv_pairs.iter().enumerate() {
        lines.push((format!("bv_pair_{}", k + 1), b.to_string()));
    }
    lines.push(("delta_bv".to_string(), rec.delta_bv.to_string()));
    for (name, value) in optional_fields(&rec) {
        if let Some(v) = value {
            lines.push((name.to_string(), v.to_string()));
        }
    }
    lines.push(("flags".to_string(), rec.flags.join(";")));
    let text = lines.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
    Ok(Output {
        text,
        path: a.out.clone(),
        code: 0,
        warnings,
    })
}

fn optional_fields(rec: &MeasureRecord) -> [(&'static str, Option<f64>); 5] {
    [
        ("tangle", rec.tangle),
        ("discord_fwd", rec.discord_fwd),
        ("discord_bwd", rec.discord_bwd),
        ("wd_fwd", rec.wd_fwd),
        ("wd_bwd", rec.wd_bwd),
    ]
}

/// Fixed-width scientific notation with 17 significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_opt(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn csv_text(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ascii"))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(io::Error::other(e))
}

fn sweep(a: &SweepArgs) -> Result<Output, CliError> {
    let kind: FamilyKind = a.family.into();
    let axis: Axis = a.axis.into();
    if a.points < experiments::MIN_SWEEP_POINTS {
        return Err(usage(format!(
            "--points must be at least {}",
            experiments::MIN_SWEEP_POINTS
        )));
    }
    let grid = experiments::parameter_grid(kind, a.points)?;
    let curve = experiments::sweep_boundary(kind, a.n, axis, &grid)?;
    let param = match kind {
        FamilyKind::Sghz => "beta",
        _ => "lambda",
    };
    let mut w = csv_writer();
    w.write_record([param, axis.name(), "delta_bv"])
        .map_err(csv_err)?;
    for p in &curve.points {
        w.write_record([
            format_number(p.param),
            format_number(p.x),
            format_number(p.y),
        ])
        .map_err(csv_err)?;
    }
    Ok(Output {
        text: csv_text(w)?,
        path: a.out.clone(),
        code: 0,
        warnings: Vec::new(),
    })
}

/// CSV header for an `n`-qubit scatter.
pub fn csv_header(n: usize) -> Vec<String> {
    let mut h: Vec<String> = [
        "sample_id",
        "class",
        "n",
        "seed",
        "params",
        "lambda1",
        "ggm",
        "bv_rest",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    h.extend((1..n).map(|k| format!("bv_pair_{k}")));
    h.extend(
        [
            "delta_bv",
            "tangle",
            "discord_fwd",
            "discord_bwd",
            "wd_fwd",
            "wd_bwd",
            "flags",
        ]
        .into_iter()
        .map(String::from),
    );
    h
}

fn scatter(a: &ScatterArgs) -> Result<Output, CliError> {
    let kind: FamilyKind = a.class.into();
    if a.samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    check_nodal(a.opts.nodal, a.n)?;
    check_threshold(a.reject_tangle_below)?;
    let spec = FamilySpec::sampler(kind, a.n, a.seed);
    let opts = ScatterOptions {
        nodal: a.opts.nodal,
        measures: measure_set(&a.opts)?,
        reject_tangle_below: a.reject_tangle_below,
    };
    let records = experiments::scatter(&spec, a.samples, &opts)?;
    let mut params = format!("nodal={}", a.opts.nodal);
    if let Some(eps) = a.reject_tangle_below {
        params.push_str(&format!(";reject_tangle_below={eps}"));
    }
    let mut w = csv_writer();
    w.write_record(csv_header(a.n)).map_err(csv_err)?;
    for rec in &records {
        let mut row = vec![
            rec.sample_id.to_string(),
            kind.to_string(),
            a.n.to_string(),
            a.seed.to_string(),
            params.clone(),
            format_number(rec.lambda1),
            format_opt(rec.ggm),
            format_number(rec.bv_one_vs_rest),
        ];
        row.extend(rec.bv_pairs.iter().map(|&b| format_number(b)));
        row.push(format_number(rec.delta_bv));
        row.extend(optional_fields(rec).iter().map(|&(_, v)| format_opt(v)));
        row.push(rec.flags.join(";"));
        w.write_record(&row).map_err(csv_err)?;
    }
    Ok(Output {
        text: csv_text(w)?,
        path: a.out.clone(),
        code: 0,
        warnings: Vec::new(),
    })
}

fn verify(a: &VerifyArgs) -> Result<Output, CliError> {
    if a.samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    if let Some(t) = a.tolerance {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(usage(format!(
                "--tolerance must be a nonnegative number, got {t}"
            )));
        }
    }
    let tol = |default: f64| a.tolerance.unwrap_or(default);
    let n =
        a.n.unwrap_or(if a.suite == Suite::Conjecture { 5 } else { 3 });
    if a.class.is_some() && !matches!(a.suite, Suite::Boundary | Suite::Conjecture) {
        return Err(usage(
            "--class applies only to the boundary and conjecture suites",
        ));
    }
    let fixed_three = |name: &str| {
        if n != 3 {
            Err(usage(format!("-n must be 3 for the {name} suite")))
        } else {
            Ok(())
        }
    };
    let theorem = |k: u8| -> Result<VerificationReport, CliError> {
        let th = Theorem::from_number(k)?;
        let opts = TheoremOptions {
            tolerance: tol(th.default_tolerance()),
            ..TheoremOptions::for_theorem(th)
        };
        Ok(experiments::verify_theorem(
            th, a.samples, n, a.seed, &opts,
        )?)
    };
    let report = match a.suite {
        Suite::Eq15 => {
            fixed_three("eq15")?;
            experiments::verify_eq15(a.samples, a.seed, tol(IDENTITY_TOL))?
        }
        Suite::Theorem1 => theorem(1)?,
        Suite::Theorem2 => theorem(2)?,
        Suite::Theorem3 => theorem(3)?,
        Suite::Theorem4 => theorem(4)?,
        Suite::BellMonogamy => {
            experiments::verify_bell_monogamy(n, a.samples, a.seed, tol(NONZERO_BV))?
        }
        Suite::WTangle => {
            fixed_three("w-tangle")?;
            experiments::verify_w_tangle(a.samples, a.seed, tol(IDENTITY_TOL))?
        }
        Suite::Ckw => {
            fixed_three("ckw")?;
            experiments::verify_ckw(a.samples, a.seed, tol(IDENTITY_TOL))?
        }
        Suite::Boundary | Suite::Conjecture => {
            let default_class = if a.suite == Suite::Boundary {
                SamplerClass::Ghz3
            } else {
                SamplerClass::Haar
            };
            let class = a.class.unwrap_or(default_class);
            experiments::verify_boundary(
                class.into(),
                n,
                a.axis.into(),
                a.samples,
                a.seed,
                tol(BOUNDARY_SLACK),
            )?
        }
    };
    let mut text = serde_json::to_string(&report).expect("report serializes");
    text.push('\n');
    let code = if report.pass || a.suite == Suite::Conjecture {
        0
    } else {
        1
    };
    Ok(Output {
        text,
        path: a.out.clone(),
        code,
        warnings: Vec::new(),
    })
}
