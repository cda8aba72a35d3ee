//! Command-line front end. Data goes to standard output (or `--out`), messages
//! to standard error.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain error, 3 verification mismatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bulkgaps::{closed_form_histogram, exact_histogram, transfer_histogram, BulkGapTheory, GapHistogram};
use crate::error::Error;
use crate::longestgap::{
    build_polynomials_relaxed, cdf_asymptotic, cdf_best, count_less_than, count_less_than_automaton,
    mean_var, MeanVarMode,
};
use crate::montecarlo::{draw_samples, run_experiment, ExperimentConfig, ExperimentKind};
use crate::numeric::sig12;
use crate::recurrence::{Recurrence, SequenceTable};
use crate::spectral::SpectralData;
use crate::verify::run_verify;
use crate::zeck::{decompose, gap_list_with, longest_gap_with, TrailingGap, DEFAULT_ENUMERATION_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

/// Largest `n` for which a full sequence table is built on request.
pub const MAX_TABLE_N: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BulkSource {
    Enumeration,
    Transfer,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    ExactSum,
    AsymptoticSum,
    ClosedForm,
}

impl From<Mode> for MeanVarMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::ExactSum => MeanVarMode::ExactSum,
            Mode::AsymptoticSum => MeanVarMode::AsymptoticSum,
            Mode::ClosedForm => MeanVarMode::ClosedForm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Longest,
    Bulk,
    Summand,
}

impl From<Kind> for ExperimentKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Longest => ExperimentKind::LongestGap,
            Kind::Bulk => ExperimentKind::BulkGap,
            Kind::Summand => ExperimentKind::SummandCount,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "zeckgap", version, about = "Gaps in generalized Zeckendorf decompositions")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Write data here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First `n` terms of the sequence.
    Seq {
        #[arg(long)]
        recurrence: Recurrence,
        #[arg(long)]
        n: usize,
    },
    /// Legal decomposition of `m`.
    Decompose {
        #[arg(long)]
        recurrence: Recurrence,
        #[arg(long)]
        m: BigUint,
        /// Count the gap below the smallest summand.
        #[arg(long)]
        include_trailing: bool,
    },
    /// Gap histogram over `[G_n, G_{n+1})` with the limiting distribution.
    Bulk {
        #[arg(long)]
        recurrence: Recurrence,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "transfer")]
        source: BulkSource,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
    },
    /// Longest-gap mean and variance, optionally with the CDF over a range of `f`.
    Longest {
        #[arg(long)]
        recurrence: Recurrence,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "closed-form")]
        mode: Mode,
        #[arg(long)]
        f_min: Option<usize>,
        #[arg(long)]
        f_max: Option<usize>,
    },
    /// Characteristic roots, Binet and Lekkerkerker constants.
    Spectral {
        #[arg(long)]
        recurrence: Recurrence,
    },
    /// Monte Carlo experiment on uniformly sampled integers.
    Experiment {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        recurrence: Recurrence,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Required when `--ci` is given or `CI` is set.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = "ZECKGAP_WORKERS", default_value_t = 1)]
        workers: usize,
        /// Write `index,summands,longest` per sample to this CSV file.
        #[arg(long)]
        per_sample_csv: Option<PathBuf>,
        /// Include per-sample values in the report.
        #[arg(long)]
        keep_samples: bool,
        /// Include wall-clock timings in the report.
        #[arg(long)]
        timings: bool,
        #[arg(long, env = "CI", value_parser = clap::builder::FalseyValueParser::new())]
        ci: bool,
    },
    /// Oracle-equivalence suites against enumeration; exits 3 on any mismatch.
    Verify {
        #[arg(long)]
        recurrence: Recurrence,
        #[arg(long, default_value_t = 14)]
        max_n: usize,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
    },
}

/// Data produced by a subcommand, rendered according to `--format`.
pub struct Output {
    pub json: Value,
    /// Header and rows for CSV.
    pub table: Option<(Vec<&'static str>, Vec<Vec<String>>)>,
    pub pretty: String,
    pub exit: i32,
}

impl Output {
    fn new(json: Value, pretty: String) -> Self {
        Output {
            json,
            table: None,
            pretty,
            exit: EXIT_OK,
        }
    }
}

/// Rounds every non-integer number to 12 significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = sig12(n.as_f64().expect("f64"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn table_for(rec: &Recurrence, n: usize) -> Result<SequenceTable, Error> {
    if n > MAX_TABLE_N {
        return Err(Error::InvalidArgument(format!(
            "n = {n} needs a full sequence table; the limit is {MAX_TABLE_N}"
        )));
    }
    Ok(SequenceTable::new(rec.clone(), n + 2))
}

fn seq(rec: &Recurrence, n: usize) -> Result<Output, Error> {
    let t = SequenceTable::new(rec.clone(), n);
    let values: Vec<String> = t.values().iter().map(|v| v.to_string()).collect();
    let rows = values
        .iter()
        .enumerate()
        .map(|(i, v)| vec![(i + 1).to_string(), v.clone()])
        .collect();
    let mut out = Output::new(
        json!({ "recurrence": rec.to_string(), "n": n, "values": values }),
        values.join("\n"),
    );
    out.table = Some((vec!["n", "value"], rows));
    Ok(out)
}

fn decompose_cmd(rec: &Recurrence, m: &BigUint, include_trailing: bool) -> Result<Output, Error> {
    let mut t = SequenceTable::new(rec.clone(), rec.len() + 2);
    let needed = t.needed_len(m);
    t.extend(needed);
    let d = decompose(&t, m)?;
    let trailing = if include_trailing {
        TrailingGap::Included
    } else {
        TrailingGap::Excluded
    };
    let display = format!("{m} = {d}");
    let rows = d
        .terms()
        .iter()
        .map(|&(i, a)| vec![i.to_string(), a.to_string()])
        .collect();
    let mut out = Output::new(
        json!({
            "recurrence": rec.to_string(),
            "m": m.to_string(),
            "terms": to_value(&d),
            "summands": d.summands(),
            "gaps": gap_list_with(&d, trailing),
            "longest_gap": longest_gap_with(&d, trailing),
            "display": display,
        }),
        display,
    );
    out.table = Some((vec!["index", "multiplicity"], rows));
    Ok(out)
}

fn bulk(rec: &Recurrence, n: usize, source: BulkSource, cap: u64) -> Result<Output, Error> {
    let hist: GapHistogram = match source {
        BulkSource::Transfer => transfer_histogram(rec, n),
        BulkSource::Enumeration => exact_histogram(&table_for(rec, n)?, n, cap)?,
        BulkSource::ClosedForm => closed_form_histogram(&table_for(rec, n)?, n)?,
    };
    let theory = if rec.all_positive() {
        Some(BulkGapTheory::new(rec, &SpectralData::compute(rec)?)?)
    } else {
        None
    };
    let rows: Vec<Value> = hist
        .counts
        .iter()
        .map(|(&k, c)| {
            json!({
                "k": k,
                "count": c.to_string(),
                "p_empirical": hist.probability(k),
                "p_theory": theory.as_ref().map(|t| t.p(k)),
            })
        })
        .collect();
    let csv_rows = rows
        .iter()
        .map(|r| {
            vec![
                r["k"].to_string(),
                r["count"].as_str().unwrap_or_default().to_string(),
                fmt_num(&r["p_empirical"]),
                fmt_num(&r["p_theory"]),
            ]
        })
        .collect();
    let pretty = rows
        .iter()
        .map(|r| format!("k={:<4} P_n={:<16} P={}", r["k"], fmt_num(&r["p_empirical"]), fmt_num(&r["p_theory"])))
        .collect::<Vec<_>>()
        .join("\n");
    let mut out = Output::new(
        json!({
            "recurrence": rec.to_string(),
            "n": n,
            "source": to_value(&hist.source),
            "total": hist.total.to_string(),
            "rows": rows,
            "printed_p0": theory.as_ref().map(|t| t.printed_p0()),
        }),
        pretty,
    );
    out.table = Some((vec!["k", "count", "p_empirical", "p_theory"], csv_rows));
    Ok(out)
}

fn fmt_num(v: &Value) -> String {
    match v.as_f64() {
        Some(x) => format!("{}", sig12(x)),
        None => String::new(),
    }
}

fn longest(rec: &Recurrence, n: usize, mode: Mode, f_min: Option<usize>, f_max: Option<usize>) -> Result<Output, Error> {
    let p = build_polynomials_relaxed(rec)?;
    let needs_table = mode == Mode::ExactSum || f_min.is_some() || f_max.is_some();
    let table = if needs_table { Some(table_for(rec, n)?) } else { None };
    let mv = mean_var(&p, n, mode.into(), table.as_ref())?;
    let mut rows = Vec::new();
    if let Some(t) = &table {
        let lo = f_min.unwrap_or(1).max(1);
        let hi = f_max.unwrap_or(n + 1).min(n + 1);
        for f in lo..=hi {
            let count = if f > rec.j_last() {
                count_less_than(t, n, f)?
            } else {
                count_less_than_automaton(rec, n, f)
            };
            rows.push(json!({
                "f": f,
                "count": count.to_string(),
                "p_empirical": cdf_best(t, &p, n, f)?,
                "p_theory": cdf_asymptotic(&p, n as f64, f),
            }));
        }
    }
    let csv_rows = rows
        .iter()
        .map(|r| {
            vec![
                r["f"].to_string(),
                r["count"].as_str().unwrap_or_default().to_string(),
                fmt_num(&r["p_empirical"]),
                fmt_num(&r["p_theory"]),
            ]
        })
        .collect();
    let pretty = format!(
        "mean {} sd {} (mode {:?}, K = {})",
        sig12(mv.mean),
        sig12(mv.sd()),
        mode,
        sig12(p.k_const())
    );
    let mut out = Output::new(
        json!({
            "recurrence": rec.to_string(),
            "n": n,
            "mode": to_value(&MeanVarMode::from(mode)),
            "mean": mv.mean,
            "sd": mv.sd(),
            "variance": mv.variance,
            "k_const": p.k_const(),
            "lambda1": p.lambda1,
            "violations": p.violations,
            "cdf": rows,
        }),
        pretty,
    );
    out.table = Some((vec!["f", "count", "p_empirical", "p_theory"], csv_rows));
    Ok(out)
}

fn spectral(rec: &Recurrence) -> Result<Output, Error> {
    let s = SpectralData::compute(rec)?;
    let pretty = format!(
        "lambda1 {} a1 {} C_Lek {} d {}",
        sig12(s.lambda1),
        sig12(s.a1),
        sig12(s.c_lek),
        sig12(s.d_intercept)
    );
    let mut v = to_value(&s);
    v["recurrence"] = json!(rec.to_string());
    Ok(Output::new(v, pretty))
}

#[allow(clippy::too_many_arguments)]
fn experiment(
    kind: Kind,
    rec: &Recurrence,
    n: usize,
    samples: usize,
    seed: Option<u64>,
    workers: usize,
    per_sample_csv: Option<&PathBuf>,
    keep_samples: bool,
    timings: bool,
    ci: bool,
) -> Result<Output, CliError> {
    let seed = match (seed, ci) {
        (Some(s), _) => s,
        (None, true) => return Err(CliError::Usage("--seed is required in CI mode".into())),
        (None, false) => 0,
    };
    let mut cfg = ExperimentConfig::new(rec.clone(), n, samples, seed, kind.into());
    cfg.workers = workers;
    cfg.keep_samples = keep_samples;
    cfg.record_timings = timings;
    let report = run_experiment(&cfg)?;
    if let Some(path) = per_sample_csv {
        let records = draw_samples(&cfg)?;
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(e.to_string()))?;
        w.write_record(["index", "summands", "longest"]).map_err(|e| CliError::Io(e.to_string()))?;
        for r in records {
            w.write_record([r.index.to_string(), r.summands.to_string(), r.longest.to_string()])
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    }
    let pretty = format!(
        "empirical mean {} sd {}; theory mean {} sd {}; z = {}",
        sig12(report.empirical_mean),
        sig12(report.empirical_sd),
        sig12(report.theory_mean),
        sig12(report.theory_sd),
        sig12(report.z_score)
    );
    let mut out = Output::new(to_value(&report), pretty);
    if let Some(b) = &report.bulk {
        out.table = Some((
            vec!["k", "count", "p_empirical", "p_theory"],
            b.pooled
                .iter()
                .map(|r| {
                    vec![
                        r.k.to_string(),
                        r.count.to_string(),
                        sig12(r.p_empirical).to_string(),
                        sig12(r.p_theory).to_string(),
                    ]
                })
                .collect(),
        ));
    }
    Ok(out)
}

fn verify(rec: &Recurrence, max_n: usize, cap: u64) -> Result<Output, Error> {
    let report = run_verify(rec, max_n, cap)?;
    let pretty = report
        .suites
        .iter()
        .map(|s| {
            format!(
                "{:<10} {} ({} checks, {} skipped)",
                s.name,
                if s.passed() { "ok" } else { "MISMATCH" },
                s.checked,
                s.skipped.len()
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    let mut out = Output::new(to_value(&report), pretty);
    if !report.passed {
        out.exit = EXIT_MISMATCH;
    }
    Ok(out)
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) | CliError::Io(_) => EXIT_DOMAIN,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(e) => write!(f, "error: {e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

/// Runs a parsed command and returns its output without writing anything.
pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let out = match &cli.command {
        Command::Seq { recurrence, n } => seq(recurrence, *n)?,
        Command::Decompose {
            recurrence,
            m,
            include_trailing,
        } => decompose_cmd(recurrence, m, *include_trailing)?,
        Command::Bulk {
            recurrence,
            n,
            source,
            cap,
        } => bulk(recurrence, *n, *source, *cap)?,
        Command::Longest {
            recurrence,
            n,
            mode,
            f_min,
            f_max,
        } => longest(recurrence, *n, *mode, *f_min, *f_max)?,
        Command::Spectral { recurrence } => spectral(recurrence)?,
        Command::Experiment {
            kind,
            recurrence,
            n,
            samples,
            seed,
            workers,
            per_sample_csv,
            keep_samples,
            timings,
            ci,
        } => experiment(
            *kind,
            recurrence,
            *n,
            *samples,
            *seed,
            *workers,
            per_sample_csv.as_ref(),
            *keep_samples,
            *timings,
            *ci,
        )?,
        Command::Verify { recurrence, max_n, cap } => verify(recurrence, *max_n, *cap)?,
    };
    Ok(out)
}

/// Renders `out` in `format`.
pub fn render(out: &Output, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&round_floats(out.json.clone())).expect("json");
            s.push('\n');
            Ok(s)
        }
        Format::Pretty => Ok(format!("{}\n", out.pretty)),
        Format::Csv => {
            let (header, rows) = out
                .table
                .as_ref()
                .ok_or_else(|| CliError::Usage("this subcommand has no CSV form".into()))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Io(e.to_string());
            w.write_record(header).map_err(io)?;
            for r in rows {
                w.write_record(r).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("utf-8"))
        }
    }
}

/// Parses `args`, runs the command and writes its output; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = execute(&cli).and_then(|out| Ok((render(&out, cli.format)?, out.exit)));
    match result {
        Ok((text, code)) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, text),
                None => std::io::stdout().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("i/o error: {e}");
                return EXIT_DOMAIN;
            }
            if code == EXIT_MISMATCH {
                eprintln!("verification mismatch");
            }
            code
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
