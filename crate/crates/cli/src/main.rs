//! `bellstates`: tables, observables and figure data for the normal-ordering
//! Bell/Stirling sequences and the coherent states built on them.

mod figures;
mod output;
mod verify;

use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use bellstates_core::{
    bell_exact, build_table, dirac_comb_strength, eigenvalue_residual, mandel_q, mean_occupation,
    metric_factor, moment, snr, squeezing, state_vector, weight_closed, weight_series,
    CoherentFamily, Error as CoreError, FamilyOptions, QuadratureConfig, SeriesConfig, WeightSpec,
};

use output::{Cell, Table};

#[derive(Debug)]
enum AppError {
    Core { err: CoreError, context: String },
    Io(std::io::Error),
    NonFinite(String),
}

impl AppError {
    fn exit_code(&self) -> ExitCode {
        match self {
            AppError::Core { err, .. } => match err {
                CoreError::InvalidParameters(_)
                | CoreError::ResourceGuard(_)
                | CoreError::UnsupportedOrder(_)
                | CoreError::Pole(_) => ExitCode::from(2),
                CoreError::NoConvergence(_)
                | CoreError::TailBound(_)
                | CoreError::TruncationInsufficient(_) => ExitCode::from(4),
            },
            AppError::Io(_) => ExitCode::from(3),
            AppError::NonFinite(_) => ExitCode::from(4),
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Core { err, context } if context.is_empty() => write!(f, "{err}"),
            AppError::Core { err, context } => write!(f, "{context}: {err}"),
            AppError::Io(e) => write!(f, "i/o: {e}"),
            AppError::NonFinite(msg) => write!(f, "non-finite value: {msg}"),
        }
    }
}

impl From<CoreError> for AppError {
    fn from(err: CoreError) -> Self {
        AppError::Core {
            err,
            context: String::new(),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}

type AppResult<T> = Result<T, AppError>;

/// Attach a "where it happened" prefix to a core error.
pub(crate) fn with_context<T>(res: Result<T, CoreError>, context: impl Fn() -> String) -> AppResult<T> {
    res.map_err(|err| AppError::Core {
        err,
        context: context(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WeightForm {
    Series,
    Closed,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Observable {
    Mandel,
    Squeeze,
    Snr,
    Metric,
    Residual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum VerifyLevel {
    #[default]
    Quick,
    Full,
}

#[derive(Parser)]
#[command(
    name = "bellstates",
    version,
    about = "Generalized Bell/Stirling numbers from boson normal ordering, \
             their moment measures and nonlinear coherent states"
)]
struct Cli {
    /// Relative tolerance for internal series summation
    /// (default: BELLSTATES_TOL env var, then 1e-13)
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact Bell numbers B_{r,s}(n) for n = 1..=n_max
    Bell {
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 1)]
        s: u32,
        #[arg(long)]
        n_max: u32,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// One row of Stirling numbers S_{r,s}(n, k), k = s..=n*s
    Stirling {
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 1)]
        s: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Gamma-ratio series values for B_{r,1}(n) against the exact integers
    Dobinski {
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 8)]
        n_max: u32,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Sample the moment weight: density for r >= 2, Dirac comb for r = 1
    Weight {
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 0.0)]
        start: f64,
        #[arg(long, default_value_t = 35.0)]
        stop: f64,
        #[arg(long, default_value_t = 141)]
        points: usize,
        /// Which evaluation to print (closed forms exist for r = 2, 3, 4)
        #[arg(long, value_enum, default_value_t = WeightForm::Series)]
        form: WeightForm,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Moments of x^{p-1} W_{r,1} dx against the exact Bell numbers
    Moments {
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 1)]
        p: u32,
        #[arg(long, default_value_t = 8)]
        n_max: u32,
        /// Upper quadrature limit (default: 40(r-1) + 20(n+p))
        #[arg(long)]
        x_max: Option<f64>,
        /// Number of quadrature panels (default: max(16, x_max/4))
        #[arg(long)]
        panels: Option<usize>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Quantum-optical diagnostics of one coherent state (JSON)
    State {
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value_t = 1)]
        p: u32,
        #[arg(long, default_value_t = 0.0)]
        z_re: f64,
        #[arg(long, default_value_t = 0.0)]
        z_im: f64,
        /// Fock-space cap for the residual check
        #[arg(long, default_value_t = 64)]
        n_fock_max: usize,
        /// Which observables to report (default: all)
        #[arg(long, value_enum, value_delimiter = ',')]
        observables: Vec<Observable>,
        /// Use the conventional rho(n) = n! reference family instead
        #[arg(long)]
        reference: bool,
    },
    /// Emit one figure's data grid as CSV
    Figure {
        /// Figure id, 1..=7
        id: u8,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        start: Option<f64>,
        #[arg(long)]
        stop: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Orders to plot, e.g. --r-list 1,2,3
        #[arg(long, value_delimiter = ',')]
        r_list: Vec<u32>,
    },
    /// Run the self-check battery
    Verify {
        #[arg(long, value_enum, default_value_t)]
        level: VerifyLevel,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match series_config(cli.tol) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match run(cli.command, &cfg) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn series_config(tol_flag: Option<f64>) -> AppResult<SeriesConfig> {
    let tol = match tol_flag {
        Some(t) => Some(t),
        None => match std::env::var("BELLSTATES_TOL") {
            Ok(raw) => Some(raw.parse::<f64>().map_err(|_| {
                AppError::from(CoreError::InvalidParameters(format!(
                    "BELLSTATES_TOL is not a float: {raw:?}"
                )))
            })?),
            Err(_) => None,
        },
    };
    let cfg = match tol {
        Some(t) => SeriesConfig::with_rel_tol(t)?,
        None => SeriesConfig::default(),
    };
    Ok(cfg)
}

fn run(command: Command, cfg: &SeriesConfig) -> AppResult<ExitCode> {
    let mut stdout = std::io::stdout().lock();
    match command {
        Command::Bell { r, s, n_max, format } => {
            let table = bell_table(r, s, n_max)?;
            table.emit(format, &mut stdout)?;
        }
        Command::Stirling { r, s, n, format } => {
            let table = stirling_table(r, s, n)?;
            table.emit(format, &mut stdout)?;
        }
        Command::Dobinski { r, n_max, format } => {
            let table = dobinski_table(r, n_max, cfg)?;
            table.emit(format, &mut stdout)?;
        }
        Command::Weight {
            r,
            start,
            stop,
            points,
            form,
            format,
        } => {
            let table = weight_table(r, start, stop, points, form, cfg)?;
            table.emit(format, &mut stdout)?;
        }
        Command::Moments {
            r,
            p,
            n_max,
            x_max,
            panels,
            format,
        } => {
            let table = moments_table(r, p, n_max, x_max, panels, cfg)?;
            table.emit(format, &mut stdout)?;
        }
        Command::State {
            r,
            p,
            z_re,
            z_im,
            n_fock_max,
            observables,
            reference,
        } => {
            let report = state_report(r, p, z_re, z_im, n_fock_max, &observables, reference, cfg)?;
            let json = serde_json::to_string_pretty(&report).expect("serializable report");
            writeln!(stdout, "{json}")?;
        }
        Command::Figure {
            id,
            out,
            start,
            stop,
            points,
            r_list,
        } => {
            let table = figures::generate(id, start, stop, points, &r_list, cfg)?;
            match out {
                Some(path) => {
                    let mut file = File::create(&path)?;
                    table.emit(Format::Csv, &mut file)?;
                }
                None => table.emit(Format::Csv, &mut stdout)?,
            }
        }
        Command::Verify { level } => {
            let all_passed = verify::run(level, cfg, &mut stdout)?;
            if !all_passed {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn bell_table(r: u32, s: u32, n_max: u32) -> AppResult<Table> {
    let table = build_table(r, s, n_max)?;
    let mut out = Table::new(&["n", "bell"]);
    for n in 1..=n_max {
        out.push_row(vec![
            Cell::Index(n as u64),
            Cell::Exact(table.bell(n).to_string()),
        ]);
    }
    Ok(out)
}

fn stirling_table(r: u32, s: u32, n: u32) -> AppResult<Table> {
    let table = build_table(r, s, n)?;
    let mut out = Table::new(&["k", "stirling"]);
    for k in s..=n * s {
        out.push_row(vec![
            Cell::Index(k as u64),
            Cell::Exact(table.stirling(n, k).to_string()),
        ]);
    }
    Ok(out)
}

fn dobinski_table(r: u32, n_max: u32, cfg: &SeriesConfig) -> AppResult<Table> {
    let mut out = Table::new(&["n", "series", "exact", "rel_err"]);
    for n in 1..=n_max {
        let exact = bell_exact(r, 1, n)?;
        let series = bellstates_core::bell_dobinski(r, n, cfg)?;
        let exact_f = exact_to_f64(&exact);
        let rel = (series - exact_f).abs() / exact_f;
        out.push_row(vec![
            Cell::Index(n as u64),
            Cell::Float(series),
            Cell::Exact(exact.to_string()),
            Cell::Float(rel),
        ]);
    }
    Ok(out)
}

fn exact_to_f64(v: &num_bigint::BigUint) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(f64::INFINITY)
}

pub(crate) fn grid(start: f64, stop: f64, points: usize) -> AppResult<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && stop > start) {
        return Err(CoreError::InvalidParameters(format!(
            "grid needs finite start < stop, got [{start}, {stop}]"
        ))
        .into());
    }
    if points < 2 {
        return Err(CoreError::InvalidParameters(format!(
            "grid needs at least 2 points, got {points}"
        ))
        .into());
    }
    let step = (stop - start) / (points - 1) as f64;
    Ok((0..points).map(|i| start + step * i as f64).collect())
}

fn weight_table(
    r: u32,
    start: f64,
    stop: f64,
    points: usize,
    form: WeightForm,
    cfg: &SeriesConfig,
) -> AppResult<Table> {
    if r == 1 {
        // Point measure: one row per comb tooth inside [start, stop].
        let lo = start.ceil().max(1.0) as u32;
        let hi = stop.floor().max(0.0) as u32;
        let mut out = Table::new(&["k", "strength"]);
        for k in lo..=hi {
            out.push_row(vec![
                Cell::Index(k as u64),
                Cell::Float(dirac_comb_strength(k)?),
            ]);
        }
        return Ok(out);
    }
    let xs = grid(start, stop, points)?;
    let (want_series, want_closed) = match form {
        WeightForm::Series => (true, false),
        WeightForm::Closed => (false, true),
        WeightForm::Both => (true, true),
    };
    let mut header = vec!["x".to_string()];
    if want_series {
        header.push("w_series".to_string());
    }
    if want_closed {
        header.push("w_closed".to_string());
    }
    let mut out = Table::from_header(header);
    for &x in &xs {
        let mut row = vec![Cell::Float(x)];
        if want_series {
            row.push(Cell::Float(with_context(weight_series(r, x, cfg), || {
                format!("weight series at x = {x}")
            })?));
        }
        if want_closed {
            row.push(Cell::Float(with_context(weight_closed(r, x, cfg), || {
                format!("closed weight at x = {x}")
            })?));
        }
        out.push_row(row);
    }
    Ok(out)
}

fn moments_table(
    r: u32,
    p: u32,
    n_max: u32,
    x_max: Option<f64>,
    panels: Option<usize>,
    cfg: &SeriesConfig,
) -> AppResult<Table> {
    let spec = WeightSpec::new(r, p)?;
    let qcfg = QuadratureConfig {
        x_max,
        panels,
        ..QuadratureConfig::default()
    };
    let mut out = Table::new(&["n", "moment", "exact", "rel_err"]);
    for n in 0..=n_max {
        let got = with_context(moment(&spec, n, &qcfg, cfg), || {
            format!("moment n = {n} of the (r = {r}, p = {p}) measure")
        })?;
        // Reference: B(n+p) for n+p >= 1, else the analytic (e-1)/e.
        let (exact_cell, exact_f) = if n + p == 0 {
            let v = (std::f64::consts::E - 1.0) / std::f64::consts::E;
            (Cell::Float(v), v)
        } else {
            let exact = bell_exact(r, 1, n + p)?;
            let f = exact_to_f64(&exact);
            (Cell::Exact(exact.to_string()), f)
        };
        out.push_row(vec![
            Cell::Index(n as u64),
            Cell::Float(got),
            exact_cell,
            Cell::Float((got - exact_f).abs() / exact_f),
        ]);
    }
    Ok(out)
}

#[derive(Serialize)]
struct StateReport {
    family: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<u32>,
    z_re: f64,
    z_im: f64,
    x: f64,
    n_mean: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mandel_q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s_q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma_bar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metric: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tail_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_fock_max: Option<usize>,
}

#[allow(clippy::too_many_arguments)]
fn state_report(
    r: u32,
    p: u32,
    z_re: f64,
    z_im: f64,
    n_fock_max: usize,
    observables: &[Observable],
    reference: bool,
    cfg: &SeriesConfig,
) -> AppResult<StateReport> {
    let z = Complex64::new(z_re, z_im);
    let x = z.norm_sqr();
    let opts = FamilyOptions {
        x_max: (1.3 * x + 10.0).max(40.0),
        n_fock_max,
        ..FamilyOptions::default()
    };
    let family = if reference {
        CoherentFamily::conventional(&opts)?
    } else {
        CoherentFamily::bell(r, p, &opts)?
    };
    let all = [
        Observable::Mandel,
        Observable::Squeeze,
        Observable::Snr,
        Observable::Metric,
        Observable::Residual,
    ];
    let wanted: &[Observable] = if observables.is_empty() {
        &all
    } else {
        observables
    };
    let has = |o: Observable| wanted.contains(&o);

    let mut report = StateReport {
        family: if reference { "conventional" } else { "bell" },
        r: (!reference).then_some(r),
        p: (!reference).then_some(p),
        z_re,
        z_im,
        x,
        n_mean: mean_occupation(&family, x, cfg)?,
        mandel_q: None,
        s_q: None,
        s_p: None,
        sigma: None,
        sigma_bar: None,
        metric: None,
        residual: None,
        tail_bound: None,
        n_fock_max: None,
    };
    if has(Observable::Mandel) {
        report.mandel_q = Some(mandel_q(&family, x, cfg)?);
    }
    if has(Observable::Squeeze) {
        let s = squeezing(&family, z, cfg)?;
        report.s_q = Some(s.s_q);
        report.s_p = Some(s.s_p);
    }
    if has(Observable::Snr) {
        let s = snr(&family, z, cfg)?;
        report.sigma = Some(s.sigma);
        report.sigma_bar = Some(s.sigma_bar);
    }
    if has(Observable::Metric) {
        report.metric = Some(metric_factor(&family, x, cfg)?);
    }
    if has(Observable::Residual) {
        let sv = state_vector(&family, z, cfg)?;
        report.residual = Some(eigenvalue_residual(&family, z, cfg)?);
        report.tail_bound = Some(sv.tail_bound());
        report.n_fock_max = Some(family.n_fock_max());
    }
    Ok(report)
}
