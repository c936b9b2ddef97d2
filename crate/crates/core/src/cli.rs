//! Command-line front end. Every command builds a serializable report and
//! renders it as text, CSV or JSON; [`execute`] returns the rendered bytes so
//! the binary only handles I/O and exit codes.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::classical::{brute_force_optimal, classical_success};
use crate::error::{QracError, Result};
use crate::experiment::{analyze, load_table2, ExperimentReport};
use crate::linalg::MAX_DIM;
use crate::qrac2::{success2_closed, success2_simulated};
use crate::qrac3::{success3, Qrac3Code};
use crate::seesaw::seesaw_run;

/// Shipped `(d, pQ)` pairs for the `(d+1)^(d) -> 1` comparison.
pub const TABLE1_CSV: &str = include_str!("../data/table1_constants.csv");

pub const DEFAULT_SEED: u64 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "qrac",
    version,
    about = "Classical and quantum random access codes with d-level systems"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Optimal classical success probability for n symbols of d levels.
    Classical {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Also run the exhaustive search over all deterministic strategies.
        #[arg(long)]
        oracle: bool,
    },
    /// Quantum vs classical for the shipped (d+1)^(d) -> 1 constants.
    Table1,
    /// The 2^(d) -> 1 MUB family.
    Q2(DimArgs),
    /// The 3^(d) -> 1 family.
    Q3(DimArgs),
    /// See-saw lower bound for n^(d) -> 1.
    Seesaw {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 500)]
        iters: usize,
    },
    /// Analysis of the four-level photonic experiment data.
    Experiment {
        /// CSV table; defaults to the shipped data.
        #[arg(long)]
        data: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct DimArgs {
    #[arg(long)]
    pub d: Option<usize>,
    /// Inclusive range `a..b`.
    #[arg(long = "d-range")]
    pub d_range: Option<DimRange>,
}

/// Inclusive dimension range written `a..b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimRange {
    pub start: usize,
    pub end: usize,
}

impl FromStr for DimRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| format!("expected a..b, got {s:?}"))?;
        let start = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
        let end = b
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|e| format!("{b:?}: {e}"))?;
        if start > end {
            return Err(format!("empty range {s}"));
        }
        Ok(DimRange { start, end })
    }
}

impl DimArgs {
    fn dims(&self) -> Result<Vec<usize>> {
        let (start, end) = match (self.d, self.d_range) {
            (Some(d), _) => (d, d),
            (None, Some(r)) => (r.start, r.end),
            (None, None) => {
                return Err(QracError::InvalidArgument(
                    "one of --d or --d-range is required".into(),
                ))
            }
        };
        if start < 2 {
            return Err(QracError::InvalidDimension(start));
        }
        if end > MAX_DIM {
            return Err(QracError::InstanceTooLarge(format!(
                "d = {end} exceeds {MAX_DIM}"
            )));
        }
        Ok((start..=end).collect())
    }
}

/// Rendered command output plus the number of per-item failures it contains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rendered {
    pub body: String,
    pub failures: usize,
}

/// Six significant digits, fixed notation.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.00000".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let prec = (5 - magnitude).max(0) as usize;
    format!("{x:.prec$}")
}

fn opt6(x: Option<f64>) -> String {
    x.map(sig6).unwrap_or_default()
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| QracError::Io(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub correct: u64,
    pub trials: u64,
    pub exact: String,
    pub value: f64,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalReport {
    pub command: &'static str,
    pub n: usize,
    pub d: usize,
    pub exact: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
}

pub fn classical_report(n: usize, d: usize, oracle: bool) -> Result<ClassicalReport> {
    let p = classical_success(n, d)?;
    let oracle = if oracle {
        let best = brute_force_optimal(n, d)?;
        let exact = best.exact();
        Some(OracleReport {
            correct: best.correct,
            trials: best.trials,
            agrees: exact == p.exact,
            exact: exact.to_string(),
            value: best.probability(),
        })
    } else {
        None
    };
    Ok(ClassicalReport {
        command: "classical",
        n,
        d,
        exact: p.exact.to_string(),
        value: p.value,
        oracle,
    })
}

pub fn render_classical(r: &ClassicalReport, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => to_json(r)?,
        Format::Csv => {
            let mut s = String::from("n,d,pC_exact,pC,oracle_pC,oracle_agrees\n");
            let (op, agree) = match &r.oracle {
                Some(o) => (sig6(o.value), o.agrees.to_string()),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                r.n,
                r.d,
                r.exact,
                sig6(r.value),
                op,
                agree
            );
            s
        }
        Format::Text => {
            let mut s = format!(
                "pC(n={}, d={}) = {} = {}\n",
                r.n,
                r.d,
                r.exact,
                sig6(r.value)
            );
            if let Some(o) = &r.oracle {
                let verdict = if o.agrees { "agrees" } else { "DISAGREES" };
                let _ = writeln!(
                    s,
                    "oracle: {}/{} = {} ({verdict})",
                    o.correct,
                    o.trials,
                    sig6(o.value)
                );
            }
            s
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Constant {
    pub d: usize,
    #[serde(rename = "pQ")]
    pub p_q: f64,
}

/// Parses the shipped `(d, pQ)` constants.
pub fn table1_constants() -> Result<Vec<Table1Constant>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(TABLE1_CSV.as_bytes());
    reader
        .deserialize()
        .map(|row| {
            row.map_err(|e| QracError::Parse {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table1Row {
    pub d: usize,
    #[serde(rename = "pQ")]
    pub p_q: f64,
    #[serde(rename = "pC")]
    pub p_c: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table1Report {
    pub command: &'static str,
    pub rows: Vec<Table1Row>,
}

pub fn table1_report() -> Result<Table1Report> {
    let rows = table1_constants()?
        .into_iter()
        .map(|c| {
            let p_c = classical_success(c.d + 1, c.d)?.value;
            Ok(Table1Row {
                d: c.d,
                p_q: c.p_q,
                p_c,
                ratio: c.p_q / p_c,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Table1Report {
        command: "table1",
        rows,
    })
}

pub fn render_table1(r: &Table1Report, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => to_json(r)?,
        Format::Csv => {
            let mut s = String::from("d,pQ,pC,ratio\n");
            for row in &r.rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    row.d,
                    sig6(row.p_q),
                    sig6(row.p_c),
                    sig6(row.ratio)
                );
            }
            s
        }
        Format::Text => {
            let mut s = format!("{:>3}  {:>9}  {:>9}  {:>9}\n", "d", "pQ", "pC", "pQ/pC");
            for row in &r.rows {
                let _ = writeln!(
                    s,
                    "{:>3}  {:>9}  {:>9}  {:>9}",
                    row.d,
                    sig6(row.p_q),
                    sig6(row.p_c),
                    sig6(row.ratio)
                );
            }
            s
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyRow {
    pub d: usize,
    #[serde(rename = "pQ_avg", skip_serializing_if = "Option::is_none")]
    pub p_avg: Option<f64>,
    #[serde(rename = "pQ_worst", skip_serializing_if = "Option::is_none")]
    pub p_worst: Option<f64>,
    #[serde(rename = "pC", skip_serializing_if = "Option::is_none")]
    pub p_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    /// Largest `| |⟨u|v⟩|² - 1/d |` between the code's bases.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mub_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyReport {
    pub command: &'static str,
    pub rows: Vec<FamilyRow>,
    /// Dimension with the largest ratio among successful rows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax_d: Option<usize>,
}

impl FamilyReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

fn family_row(
    n: usize,
    d: usize,
    run: impl FnOnce() -> Result<(f64, f64, Option<f64>)>,
) -> FamilyRow {
    let outcome = run().and_then(|(avg, worst, mub)| {
        let p_c = classical_success(n, d)?.value;
        Ok((avg, worst, mub, p_c))
    });
    match outcome {
        Ok((avg, worst, mub, p_c)) => FamilyRow {
            d,
            p_avg: Some(avg),
            p_worst: Some(worst),
            p_c: Some(p_c),
            ratio: Some(avg / p_c),
            mub_deviation: mub,
            error: None,
        },
        Err(e) => FamilyRow {
            d,
            p_avg: None,
            p_worst: None,
            p_c: None,
            ratio: None,
            mub_deviation: None,
            error: Some(e.to_string()),
        },
    }
}

fn family_report(command: &'static str, rows: Vec<FamilyRow>) -> FamilyReport {
    let argmax_d = rows
        .iter()
        .filter_map(|r| r.ratio.map(|x| (r.d, x)))
        .fold(None, |best: Option<(usize, f64)>, (d, x)| match best {
            Some((_, bx)) if bx >= x => best,
            _ => Some((d, x)),
        })
        .map(|(d, _)| d);
    FamilyReport {
        command,
        rows,
        argmax_d,
    }
}

pub fn q2_report(dims: &[usize]) -> FamilyReport {
    let rows = dims
        .iter()
        .map(|&d| {
            family_row(2, d, || {
                let s = success2_simulated(d)?;
                Ok((s.average, s.worst, None))
            })
        })
        .collect();
    family_report("q2", rows)
}

pub fn q3_report(dims: &[usize]) -> FamilyReport {
    let rows = dims
        .iter()
        .map(|&d| {
            family_row(3, d, || {
                let code = Qrac3Code::new(d)?;
                let s = code.summary();
                Ok((s.average, s.worst, Some(code.mub_deviation)))
            })
        })
        .collect();
    family_report("q3", rows)
}

pub fn render_family(r: &FamilyReport, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => to_json(r)?,
        Format::Csv => {
            let mut s = String::from("d,pQ_avg,pQ_worst,pC,ratio\n");
            for row in &r.rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    row.d,
                    opt6(row.p_avg),
                    opt6(row.p_worst),
                    opt6(row.p_c),
                    opt6(row.ratio)
                );
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "{:>3}  {:>9}  {:>9}  {:>9}  {:>9}\n",
                "d", "pQ_avg", "pQ_worst", "pC", "ratio"
            );
            for row in &r.rows {
                match &row.error {
                    Some(e) => {
                        let _ = writeln!(s, "{:>3}  error: {e}", row.d);
                    }
                    None => {
                        let _ = write!(
                            s,
                            "{:>3}  {:>9}  {:>9}  {:>9}  {:>9}",
                            row.d,
                            opt6(row.p_avg),
                            opt6(row.p_worst),
                            opt6(row.p_c),
                            opt6(row.ratio)
                        );
                        match row.mub_deviation {
                            Some(m) if m > 1e-9 => {
                                let _ = writeln!(s, "  (bases not unbiased: {m:.2e})");
                            }
                            _ => s.push('\n'),
                        }
                    }
                }
            }
            if let (Some(d), true) = (r.argmax_d, r.rows.len() > 1) {
                let _ = writeln!(s, "largest ratio at d = {d}");
            }
            s
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeesawCliReport {
    pub command: &'static str,
    pub n: usize,
    pub d: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub best: f64,
    /// Value of the explicit construction for this `(n, d)`, when there is one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    pub best_restart: usize,
    pub iterations: usize,
    pub restart_min: f64,
    pub restart_mean: f64,
    pub restart_max: f64,
    pub flagged: usize,
    pub trace: Vec<f64>,
}

fn reference_value(n: usize, d: usize) -> Option<f64> {
    match n {
        1 => Some(1.0),
        2 => success2_closed(d).ok(),
        3 => success3(d).ok().map(|s| s.summary.average),
        _ => None,
    }
}

pub fn seesaw_report(
    n: usize,
    d: usize,
    restarts: usize,
    max_iters: usize,
    seed: u64,
) -> Result<SeesawCliReport> {
    let r = seesaw_run(n, d, restarts, max_iters, seed)?;
    let reference = reference_value(n, d);
    let objs = &r.restart_objectives;
    Ok(SeesawCliReport {
        command: "seesaw",
        n,
        d,
        restarts,
        max_iters,
        seed,
        best: r.best,
        reference,
        gap: reference.map(|p| p - r.best),
        best_restart: r.best_restart,
        iterations: r.iterations,
        restart_min: objs.iter().copied().fold(f64::INFINITY, f64::min),
        restart_mean: objs.iter().sum::<f64>() / objs.len() as f64,
        restart_max: objs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        flagged: r.flagged,
        trace: r.trace,
    })
}

pub fn render_seesaw(r: &SeesawCliReport, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => to_json(r)?,
        Format::Csv => {
            let mut s = String::from(
                "n,d,restarts,max_iters,seed,best,reference,gap,best_restart,iterations\n",
            );
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                r.n,
                r.d,
                r.restarts,
                r.max_iters,
                r.seed,
                sig6(r.best),
                opt6(r.reference),
                r.gap.map(|g| format!("{g:.6e}")).unwrap_or_default(),
                r.best_restart,
                r.iterations
            );
            s
        }
        Format::Text => {
            let mut s = format!(
                "see-saw n={} d={}: best = {:.10} (restart {}, {} iterations)\n",
                r.n, r.d, r.best, r.best_restart, r.iterations
            );
            if let (Some(p), Some(g)) = (r.reference, r.gap) {
                let _ = writeln!(s, "reference construction = {p:.10}, gap = {g:.3e}");
            }
            let _ = writeln!(
                s,
                "restarts: {} (min {}, mean {}, max {}), seed {}",
                r.restarts,
                sig6(r.restart_min),
                sig6(r.restart_mean),
                sig6(r.restart_max),
                r.seed
            );
            if r.flagged > 0 {
                let _ = writeln!(s, "numerically flagged measurement steps: {}", r.flagged);
            }
            s
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentCliReport {
    pub command: &'static str,
    #[serde(flatten)]
    pub report: ExperimentReport,
}

pub fn experiment_report(data: Option<&std::path::Path>) -> Result<ExperimentCliReport> {
    Ok(ExperimentCliReport {
        command: "experiment",
        report: analyze(&load_table2(data)?)?,
    })
}

pub fn render_experiment(r: &ExperimentCliReport, format: Format) -> Result<String> {
    let e = &r.report;
    let summary = [
        ("records", e.records.to_string()),
        ("mean", sig6(e.mean)),
        ("row_mean", sig6(e.row_mean)),
        ("mean_z", sig6(e.mean_z)),
        ("mean_x", sig6(e.mean_x)),
        ("mean_uncertainty", sig6(e.mean_uncertainty)),
        ("classical_bound", sig6(e.classical_bound)),
        ("ideal", sig6(e.ideal)),
        ("sigmas_above_classical", sig6(e.sigmas_above_classical)),
        (
            "classical_bound_violated",
            e.classical_bound_violated.to_string(),
        ),
        ("consistent_with_ideal", e.consistent_with_ideal.to_string()),
        ("min_fidelity", sig6(e.min_fidelity)),
        ("mean_fidelity", sig6(e.mean_fidelity)),
    ];
    Ok(match format {
        Format::Json => to_json(r)?,
        Format::Csv => {
            let mut s = String::from("key,value\n");
            for (k, v) in summary {
                let _ = writeln!(s, "{k},{v}");
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "{:<6} {:>7} {:>7} {:>9} {:>9} {:>9}\n",
                "row", "pZ", "pX", "dZ", "dX", "fidelity"
            );
            for row in &e.rows {
                let _ = writeln!(
                    s,
                    "{:<6} {:>7.3} {:>7.3} {:>+9.4} {:>+9.4} {:>9.4}",
                    row.label, row.pz, row.px, row.deviation_z, row.deviation_x, row.fidelity
                );
            }
            let _ = writeln!(
                s,
                "mean of {} probabilities = {} +/- {} (Z {}, X {})",
                2 * e.records,
                sig6(e.mean),
                sig6(e.mean_uncertainty),
                sig6(e.mean_z),
                sig6(e.mean_x)
            );
            let verdict = if e.classical_bound_violated {
                "violated"
            } else {
                "not violated"
            };
            let _ = writeln!(
                s,
                "classical bound {} {verdict} ({:.2} mean uncertainties above)",
                sig6(e.classical_bound),
                e.sigmas_above_classical
            );
            let _ = writeln!(
                s,
                "ideal {}: {}",
                sig6(e.ideal),
                if e.consistent_with_ideal {
                    "consistent"
                } else {
                    "inconsistent"
                }
            );
            let _ = writeln!(
                s,
                "preparation fidelity vs ideal states: min {}, mean {}",
                sig6(e.min_fidelity),
                sig6(e.mean_fidelity)
            );
            s
        }
    })
}

/// Runs the parsed command and renders its report.
pub fn execute(cli: &Cli) -> Result<Rendered> {
    let format = cli.format;
    let plain = |body| Rendered { body, failures: 0 };
    match &cli.command {
        Command::Classical { n, d, oracle } => {
            render_classical(&classical_report(*n, *d, *oracle)?, format).map(plain)
        }
        Command::Table1 => render_table1(&table1_report()?, format).map(plain),
        Command::Q2(args) => {
            let r = q2_report(&args.dims()?);
            Ok(Rendered {
                body: render_family(&r, format)?,
                failures: r.failures(),
            })
        }
        Command::Q3(args) => {
            let r = q3_report(&args.dims()?);
            Ok(Rendered {
                body: render_family(&r, format)?,
                failures: r.failures(),
            })
        }
        Command::Seesaw {
            n,
            d,
            restarts,
            iters,
        } => {
            let seed = cli.seed.unwrap_or(DEFAULT_SEED);
            render_seesaw(&seesaw_report(*n, *d, *restarts, *iters, seed)?, format).map(plain)
        }
        Command::Experiment { data } => {
            render_experiment(&experiment_report(data.as_deref())?, format).map(plain)
        }
    }
}
