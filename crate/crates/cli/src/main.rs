//! Command-line surface over the potential-theory kernels: evaluate sphere
//! potentials, solve the critical-distance problem, build and root the
//! Gonchar polynomial families, compute cap equilibria, export data and
//! figures, and run the verification suite.
//!
//! Every command prints one JSON record (sorted keys, stable formatting) on
//! stdout; human-oriented summaries go to stderr. Exit codes: 0 success,
//! 1 verification failure, 2 usage error, 3 domain error.

mod output;
mod svg;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gonchar_core::cap::{self, CapConfig};
use gonchar_core::config::Tolerances;
use gonchar_core::poly;
use gonchar_core::potential::{
    potential_closed_special, potential_sigma, potential_sigma_log, potential_sigma_log_quadrature,
    potential_sigma_quadrature_tol, EvalMethod, EvalReport, RieszParams,
};
use gonchar_core::sphere::{
    critical_distance, critical_distance_log, CriticalKind, GoncharKind, Side,
};
use gonchar_core::verify::{self, Level};
use num::{BigInt, BigRational};
use output::{num, obj, OutputRecord};
use serde_json::Value;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

const CONFIG_ENV: &str = "GONCHAR_CONFIG";

#[derive(Parser)]
#[command(
    name = "gonchar",
    about = "Riesz potentials on spheres, signed equilibria, critical distances, Gonchar polynomials, cap equilibria",
    version
)]
struct Cli {
    /// TOML file overriding tolerance defaults (or set GONCHAR_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the potential of the uniform sphere measure at given radii.
    Potential(PotentialArgs),
    /// Solve the critical-distance problem for a point charge.
    Critical(CriticalArgs),
    /// Build a Gonchar polynomial family member and find its zeros.
    Poly(PolyArgs),
    /// Signed/extremal equilibrium on a spherical cap.
    Cap(CapArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
}

/// Riesz exponent or the logarithmic kernel.
#[derive(Clone, Copy, Debug)]
enum SArg {
    Riesz(f64),
    Log,
}

impl FromStr for SArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("log") {
            return Ok(SArg::Log);
        }
        s.parse::<f64>()
            .map(SArg::Riesz)
            .map_err(|_| format!("expected a real kernel parameter or 'log', got '{s}'"))
    }
}

impl std::fmt::Display for SArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SArg::Riesz(s) => write!(f, "{s}"),
            SArg::Log => write!(f, "log"),
        }
    }
}

#[derive(Args)]
struct PotentialArgs {
    /// Sphere dimension d >= 2.
    #[arg(long)]
    d: u32,
    /// Riesz parameter in (0, d), or 'log'.
    #[arg(long)]
    s: SArg,
    /// Evaluation radii (repeatable).
    #[arg(long = "r", required = true)]
    radii: Vec<f64>,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Auto,
    Closed,
    Quadrature,
    Special,
}

#[derive(Args)]
struct CriticalArgs {
    #[arg(long)]
    d: u32,
    /// Riesz parameter in (0, d), or 'log'.
    #[arg(long)]
    s: SArg,
    /// Charge (nonzero, either sign).
    #[arg(long, allow_hyphen_values = true)]
    q: f64,
    #[arg(long, value_enum)]
    side: SideArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Interior,
    Exterior,
}

#[derive(Args)]
struct PolyArgs {
    /// Family kind: A/B/C/D (or first/second/third/fourth).
    #[arg(long)]
    kind: KindArg,
    #[arg(long)]
    d: u32,
    /// Exact charge: integer, fraction n/m, or finite decimal.
    #[arg(long, allow_hyphen_values = true)]
    q: String,
    /// Kernel offset m >= 0 (s = d - 1 - 2m).
    #[arg(long, default_value_t = 0)]
    m: u32,
    /// Additionally write the zero set to a file.
    #[arg(long, value_enum)]
    export: Option<ExportArg>,
    /// Output directory for exports.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportArg {
    Json,
    Csv,
    Svg,
}

#[derive(Clone, Copy)]
struct KindArg(GoncharKind);

impl FromStr for KindArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let kind = match s.to_ascii_lowercase().as_str() {
            "a" | "first" | "1" => GoncharKind::First,
            "b" | "second" | "2" => GoncharKind::Second,
            "c" | "third" | "3" => GoncharKind::Third,
            "d" | "fourth" | "4" => GoncharKind::Fourth,
            other => return Err(format!("unknown family kind '{other}'")),
        };
        Ok(KindArg(kind))
    }
}

impl std::fmt::Display for KindArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = match self.0 {
            GoncharKind::First => 'A',
            GoncharKind::Second => 'B',
            GoncharKind::Third => 'C',
            GoncharKind::Fourth => 'D',
        };
        write!(f, "{c}")
    }
}

#[derive(Args)]
struct CapArgs {
    #[arg(long)]
    d: u32,
    /// Riesz parameter in [d-2, d) (s = d-2 selects the boundary-charge
    /// kernel).
    #[arg(long)]
    s: f64,
    /// Source radius R > 1 (charge below the South Pole).
    #[arg(long = "R")]
    r: f64,
    /// Charge q < 0.
    #[arg(long, allow_hyphen_values = true)]
    q: f64,
    /// Solve for the critical cap height t_c.
    #[arg(long, conflicts_with = "t")]
    solve: bool,
    /// Diagnose the signed equilibrium at a fixed cap height.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
    level: LevelArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

enum CliError {
    Domain(String),
    Failure(String),
}

impl From<gonchar_core::Error> for CliError {
    fn from(e: gonchar_core::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("i/o error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match load_tolerances(&cli) {
        Ok(t) => t,
        Err(CliError::Domain(m)) | Err(CliError::Failure(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(2);
        }
    };
    let outcome = match &cli.command {
        Command::Potential(args) => cmd_potential(args, &tol),
        Command::Critical(args) => cmd_critical(args),
        Command::Poly(args) => cmd_poly(args),
        Command::Cap(args) => cmd_cap(args),
        Command::Verify(args) => return cmd_verify(args, &tol),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(CliError::Failure(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn load_tolerances(cli: &Cli) -> Result<Tolerances, CliError> {
    let path = cli
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let Some(path) = path else {
        return Ok(Tolerances::default());
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Failure(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Failure(format!("invalid config {}: {e}", path.display())))
}

fn method_name(m: EvalMethod) -> &'static str {
    match m {
        EvalMethod::ClosedForm => "closed",
        EvalMethod::Series => "series",
        EvalMethod::Quadrature => "quadrature",
        EvalMethod::EllipticForm => "elliptic",
        EvalMethod::LogSeries => "log-series",
    }
}

fn report_row(r: f64, rep: &EvalReport, record: &mut OutputRecord) -> Value {
    if let Some(w) = rep.warning {
        record.warn(format!("R = {r}: {w:?}"));
    }
    obj(vec![
        ("r", num(r)),
        ("value", num(rep.value)),
        ("method", Value::String(method_name(rep.method).into())),
        ("err_estimate", num(rep.err_estimate)),
    ])
}

fn cmd_potential(args: &PotentialArgs, tol: &Tolerances) -> Result<(), CliError> {
    let mut record = OutputRecord::new("potential");
    record
        .input("d", args.d)
        .input("s", args.s)
        .input(
            "method",
            match args.method {
                MethodArg::Auto => "auto",
                MethodArg::Closed => "closed",
                MethodArg::Quadrature => "quadrature",
                MethodArg::Special => "special",
            },
        )
        .input("r", format!("{:?}", args.radii));
    let mut rows = Vec::new();
    for &r in &args.radii {
        let rep = match (args.s, args.method) {
            (SArg::Log, MethodArg::Quadrature) => potential_sigma_log_quadrature(args.d, r)?,
            (SArg::Log, MethodArg::Special) => {
                return Err(CliError::Domain(
                    "no special closed form for the logarithmic kernel".into(),
                ))
            }
            (SArg::Log, _) => potential_sigma_log(args.d, r)?,
            (SArg::Riesz(s), method) => {
                let p = RieszParams::new(args.d, s)?;
                match method {
                    MethodArg::Quadrature => potential_sigma_quadrature_tol(&p, r, tol.quadrature)?,
                    MethodArg::Closed => potential_sigma(&p, r)?,
                    MethodArg::Special => potential_closed_special(&p, r)?.ok_or_else(|| {
                        CliError::Domain(format!(
                            "no special closed form for d = {}, s = {s}",
                            args.d
                        ))
                    })?,
                    MethodArg::Auto => match potential_closed_special(&p, r)? {
                        Some(rep) => rep,
                        None => potential_sigma(&p, r)?,
                    },
                }
            }
        };
        rows.push(report_row(r, &rep, &mut record));
    }
    record.results = Value::Array(rows);
    record.print();
    Ok(())
}

fn cmd_critical(args: &CriticalArgs) -> Result<(), CliError> {
    let side = match args.side {
        SideArg::Interior => Side::Interior,
        SideArg::Exterior => Side::Exterior,
    };
    let mut record = OutputRecord::new("critical");
    record
        .input("d", args.d)
        .input("s", args.s)
        .input("q", args.q)
        .input(
            "side",
            match side {
                Side::Interior => "interior",
                _ => "exterior",
            },
        );
    let result = match args.s {
        SArg::Riesz(s) => critical_distance(&RieszParams::new(args.d, s)?, args.q, side)?,
        SArg::Log => critical_distance_log(args.d, args.q, side)?,
    };
    let dist = |r: f64| match side {
        Side::Interior => 1.0 - r,
        _ => r - 1.0,
    };
    let (kind, radii) = match result.kind {
        CriticalKind::NoCritical => ("none", vec![]),
        CriticalKind::One(r) => ("one", vec![r]),
        CriticalKind::Two(r1, r2) => ("two", vec![r1, r2]),
        CriticalKind::Degenerate(r) => ("degenerate", vec![r]),
    };
    match radii.as_slice() {
        [] => eprintln!("no critical distance ({})", result.notes),
        rs => {
            for r in rs {
                eprintln!(
                    "critical distance to the sphere: {:.12} (R = {r:.12})",
                    dist(*r)
                );
            }
        }
    }
    record.results = obj(vec![
        ("kind", Value::String(kind.into())),
        (
            "radii",
            Value::Array(radii.iter().map(|&r| num(r)).collect()),
        ),
        (
            "distance_to_sphere",
            Value::Array(radii.iter().map(|&r| num(dist(r))).collect()),
        ),
        ("q_star", result.q_star.map(num).unwrap_or(Value::Null)),
        ("notes", Value::String(result.notes.clone())),
    ]);
    record.print();
    Ok(())
}

fn parse_rational(text: &str) -> Result<BigRational, CliError> {
    let bad = |m: &str| CliError::Domain(format!("charge '{text}': {m}"));
    if let Some((n, d)) = text.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad("bad numerator"))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad("bad denominator"))?;
        if d == BigInt::from(0) {
            return Err(bad("zero denominator"));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        let digits = format!("{int}{frac}");
        let n = BigInt::from_str(&digits).map_err(|_| bad("bad decimal"))?;
        let d = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(BigRational::new(n, d));
    }
    BigInt::from_str(text.trim())
        .map(BigRational::from_integer)
        .map_err(|_| bad("expected integer, fraction, or decimal"))
}

fn cmd_poly(args: &PolyArgs) -> Result<(), CliError> {
    let q = parse_rational(&args.q)?;
    let mut record = OutputRecord::new("poly");
    record
        .input("kind", args.kind)
        .input("d", args.d)
        .input("q", &args.q)
        .input("m", args.m);
    let p = poly::build_poly(args.kind.0, args.d, q.clone(), args.m)?;
    let roots = poly::roots(&p)?;
    if !roots.converged {
        record.warn("root iteration hit its sweep budget; residuals still reported exactly");
    }
    let coeff_strings: Vec<Value> = p
        .coeffs
        .iter()
        .map(|c| Value::String(format!("{}/{}", c.numer(), c.denom())))
        .collect();
    let root_rows: Vec<Value> = roots
        .roots
        .iter()
        .zip(&roots.residuals)
        .map(|(z, res)| {
            obj(vec![
                ("re", num(z.re)),
                ("im", num(z.im)),
                ("residual", num(*res)),
            ])
        })
        .collect();
    let mut files = Vec::new();
    if let Some(export) = args.export {
        std::fs::create_dir_all(&args.out)?;
        let stem = format!(
            "poly_{}_d{}_m{}_q{}",
            args.kind,
            args.d,
            args.m,
            args.q.replace('/', "over").replace('-', "neg")
        );
        match export {
            ExportArg::Csv => {
                let path = args.out.join(format!("{stem}.csv"));
                let mut w = csv::Writer::from_path(&path)
                    .map_err(|e| CliError::Failure(format!("csv: {e}")))?;
                w.write_record(["re", "im", "residual"])
                    .map_err(|e| CliError::Failure(format!("csv: {e}")))?;
                for (z, res) in roots.roots.iter().zip(&roots.residuals) {
                    w.write_record([z.re.to_string(), z.im.to_string(), res.to_string()])
                        .map_err(|e| CliError::Failure(format!("csv: {e}")))?;
                }
                w.flush()?;
                files.push(path);
            }
            ExportArg::Svg => {
                let path = args.out.join(format!("{stem}.svg"));
                let title = format!(
                    "zeros of the kind-{} family, d = {}, m = {}, q = {}",
                    args.kind, args.d, args.m, args.q
                );
                std::fs::write(&path, svg::zero_scatter(&title, &roots.roots))?;
                files.push(path);
            }
            ExportArg::Json => {
                let path = args.out.join(format!("{stem}.json"));
                let payload = obj(vec![
                    ("coefficients", Value::Array(coeff_strings.clone())),
                    ("roots", Value::Array(root_rows.clone())),
                ]);
                std::fs::write(&path, serde_json::to_string_pretty(&payload).unwrap())?;
                files.push(path);
            }
        }
    }
    record.results = obj(vec![
        ("degree", Value::Number(p.degree().into())),
        ("coefficients", Value::Array(coeff_strings)),
        ("roots", Value::Array(root_rows)),
        (
            "files",
            Value::Array(
                files
                    .iter()
                    .map(|f| Value::String(f.display().to_string()))
                    .collect(),
            ),
        ),
    ]);
    record.print();
    Ok(())
}

fn cap_config(args: &CapArgs) -> Result<CapConfig, CliError> {
    let exceptional = (args.s - (args.d as f64 - 2.0)).abs() < 1e-12;
    if exceptional {
        Ok(CapConfig::exceptional(args.d, args.r, args.q)?)
    } else {
        Ok(CapConfig::new(args.d, args.s, args.r, args.q)?)
    }
}

fn cap_state_json(cfg: &CapConfig, state: &cap::CapState) -> Value {
    // density on a 21-point grid strictly inside the cap, weighted-potential
    // samples on an 11-point grid strictly outside
    let span = state.t + 1.0;
    let density: Vec<Value> = (0..21)
        .map(|i| {
            let u = -1.0 + span * (i as f64 + 0.5) / 21.5;
            let v = cap::eta_density_with(cfg, state, u).unwrap_or(f64::NAN);
            obj(vec![("u", num(u)), ("value", num(v))])
        })
        .collect();
    let outside: Vec<Value> = (1..=11)
        .map(|j| {
            let xi = state.t + (1.0 - state.t) * j as f64 / 11.0;
            let v = cap::weighted_potential_outside(cfg, state, xi).unwrap_or(f64::NAN);
            obj(vec![("xi", num(xi)), ("value", num(v))])
        })
        .collect();
    let density_min = density
        .iter()
        .filter_map(|row| row.get("value").and_then(Value::as_f64))
        .fold(f64::INFINITY, f64::min);
    // the rim expansion sign decides positivity on the whole cap;
    // the band absorbs the exact-equality case at t = t_c
    let df = cfg.d as f64;
    let rim_rhs = cfg.q * (cfg.r_src - 1.0).powf(df - cfg.effective_s())
        / (cfg.r_src * cfg.r_src + 2.0 * cfg.r_src * state.t + 1.0).powf(df / 2.0);
    let rim_ok = state.phi >= rim_rhs - 1e-9 * state.phi.abs().max(1.0);
    obj(vec![
        ("t", num(state.t)),
        ("phi", num(state.phi)),
        ("nu_norm", num(state.nu_norm)),
        ("eps_norm", num(state.eps_norm)),
        ("boundary_charge", num(state.boundary_charge)),
        ("is_extremal", Value::Bool(state.is_extremal)),
        ("density_samples", Value::Array(density)),
        ("weighted_potential_samples", Value::Array(outside)),
        ("density_min", num(density_min)),
        ("positive", Value::Bool(rim_ok && density_min >= -1e-9)),
    ])
}

fn cmd_cap(args: &CapArgs) -> Result<(), CliError> {
    let cfg = cap_config(args)?;
    let mut record = OutputRecord::new("cap");
    record
        .input("d", args.d)
        .input("s", args.s)
        .input("R", args.r)
        .input("q", args.q);
    let state = if args.solve {
        record.input("mode", "solve");
        cap::solve_tc(&cfg)?
    } else {
        let t = args
            .t
            .ok_or_else(|| CliError::Domain("provide either --solve or --t <height>".into()))?;
        record.input("mode", format!("t = {t}"));
        cap::cap_state(&cfg, t)?
    };
    if state.t == 1.0 {
        record.warn("critical cap is the full sphere (weak field)");
        eprintln!("t_c = 1: the equilibrium keeps full-sphere support");
    } else if args.solve {
        eprintln!(
            "critical cap height t_c = {:.10}, Phi = {:.10}",
            state.t, state.phi
        );
    }
    record.results = if state.t == 1.0 {
        obj(vec![
            ("t", num(1.0)),
            ("phi", num(state.phi)),
            ("nu_norm", num(state.nu_norm)),
            ("eps_norm", num(state.eps_norm)),
            ("boundary_charge", num(0.0)),
            ("is_extremal", Value::Bool(state.is_extremal)),
            ("positive", Value::Bool(true)),
        ])
    } else {
        cap_state_json(&cfg, &state)
    };
    record.print();
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, tol: &Tolerances) -> ExitCode {
    let level = match args.level {
        LevelArg::Quick => Level::Quick,
        LevelArg::Full => Level::Full,
    };
    let outcomes = verify::run(level, tol);
    for c in &outcomes {
        eprintln!(
            "[{}] {:<45} {:>8.2}s  {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.seconds,
            c.detail
        );
    }
    let mut record = OutputRecord::new("verify");
    record.input(
        "level",
        match level {
            Level::Quick => "quick",
            Level::Full => "full",
        },
    );
    record.results = Value::Array(
        outcomes
            .iter()
            .map(|c| {
                obj(vec![
                    ("name", Value::String(c.name.into())),
                    ("passed", Value::Bool(c.passed)),
                ])
            })
            .collect(),
    );
    record.print();
    if verify::all_passed(&outcomes) {
        ExitCode::SUCCESS
    } else {
        let failed: Vec<&str> = outcomes
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        eprintln!("failed criteria: {}", failed.join(", "));
        ExitCode::from(1)
    }
}
