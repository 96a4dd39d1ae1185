//! `cvqkd` command line.
//!
//! Exit codes: 0 on success, 1 on a domain error, 2 on a usage error.
//! Diagnostics go to stderr as one line each, prefixed `cvqkd: error:`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::compare::{run_compare, CompareResult, COMPARE_CSV_HEADER};
use crate::error::{CoreError, Result};
use crate::gaussian::ChannelPoint;
use crate::mc::{simulate_batch, validate_batch, write_batch_csv, Detection, SimConfig};
use crate::rates::{
    key_rate, losses_db, threshold_transmission, Direction, Measurement, ModulationRegime,
    ProtocolSpec, ThresholdQuery,
};
use crate::sweep::{run_sweep, OutputRow, Spacing, SweepSpec, SWEEP_CSV_HEADER};
use crate::unit::InfoUnit;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cvqkd", version, about = "Coherent-state CV-QKD key rates over a lossy channel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Key rate at a single (T, V_A) point.
    Rate(RateArgs),
    /// Rates over a grid of transmissions, variances and protocols.
    Sweep(SweepArgs),
    /// Transmission below which no key can be extracted.
    Threshold(ThresholdArgs),
    /// Exact rate against its infinite-modulation limit.
    Compare(CompareArgs),
    /// Monte Carlo check of channel statistics against closed forms.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct Output {
    /// Information unit of reported rates.
    #[arg(long, default_value = "bits")]
    unit: InfoUnit,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct SingleVariance {
    /// Alice's total per-quadrature variance V_A (shot-noise units).
    #[arg(long)]
    va: Option<f64>,
    /// Modulation variance V_mod = V_A − 1.
    #[arg(long)]
    vmod: Option<f64>,
}

impl SingleVariance {
    fn va(&self) -> Result<f64> {
        resolve_va(self.va, self.vmod)
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct VarianceList {
    #[arg(long, value_delimiter = ',')]
    va: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    vmod: Vec<f64>,
}

impl VarianceList {
    fn vas(&self) -> Result<Vec<f64>> {
        if !self.va.is_empty() {
            return Ok(self.va.clone());
        }
        self.vmod.iter().map(|&m| resolve_va(None, Some(m))).collect()
    }
}

fn resolve_va(va: Option<f64>, vmod: Option<f64>) -> Result<f64> {
    match (va, vmod) {
        (Some(va), None) => Ok(va),
        (None, Some(m)) if m >= 0.0 => Ok(m + 1.0),
        (None, Some(m)) => Err(CoreError::Domain(format!(
            "modulation variance must be >= 0, got {m}"
        ))),
        _ => unreachable!("clap group enforces exactly one of --va/--vmod"),
    }
}

#[derive(Debug, Args)]
struct RateArgs {
    #[arg(long)]
    direction: Direction,
    #[arg(long)]
    measurement: Measurement,
    #[arg(long = "T")]
    transmission: f64,
    #[command(flatten)]
    variance: SingleVariance,
    #[arg(long)]
    clamp: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    t_start: f64,
    #[arg(long)]
    t_stop: f64,
    #[arg(long, default_value_t = 11)]
    steps: usize,
    #[arg(long, default_value = "linear")]
    spacing: Spacing,
    #[command(flatten)]
    variance: VarianceList,
    /// Directions to include (default: all).
    #[arg(long, value_delimiter = ',')]
    direction: Vec<Direction>,
    /// Measurements to include (default: all).
    #[arg(long, value_delimiter = ',')]
    measurement: Vec<Measurement>,
    #[arg(long)]
    clamp: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[arg(long)]
    direction: Direction,
    #[arg(long)]
    measurement: Measurement,
    /// Closed-form threshold in the V_A → ∞ limit.
    #[arg(long, conflicts_with_all = ["va", "vmod"], required_unless_present_any = ["va", "vmod"])]
    infinite_modulation: bool,
    #[arg(long, conflicts_with = "vmod")]
    va: Option<f64>,
    #[arg(long)]
    vmod: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long)]
    direction: Direction,
    #[arg(long)]
    measurement: Measurement,
    #[arg(long = "T", value_delimiter = ',', required = true)]
    transmission: Vec<f64>,
    #[command(flatten)]
    variance: VarianceList,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long = "T")]
    transmission: f64,
    #[command(flatten)]
    variance: SingleVariance,
    #[arg(long)]
    measurement: Detection,
    #[arg(long, default_value_t = 1_000_000)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// Also write the simulated batch as CSV.
    #[arg(long)]
    dump: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return EXIT_OK;
            }
            // first paragraph of clap's message, folded onto one line
            let rendered = e.render().to_string();
            let msg = rendered
                .lines()
                .map(str::trim)
                .take_while(|l| !l.is_empty() && !l.starts_with("Usage:"))
                .collect::<Vec<_>>()
                .join(" ");
            let msg = msg.trim_start_matches("error: ");
            let _ = writeln!(err, "cvqkd: error: usage: {msg}");
            return EXIT_USAGE;
        }
    };

    // buffer stdout so a failing command prints nothing there
    let mut buf = Vec::new();
    let res = run(cli.command, &mut buf, err);
    match res {
        Ok(()) => {
            if out.write_all(&buf).and_then(|_| out.flush()).is_err() {
                let _ = writeln!(err, "cvqkd: error: io: cannot write output");
                return EXIT_DOMAIN;
            }
            EXIT_OK
        }
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(err, "cvqkd: error: {msg}");
            EXIT_DOMAIN
        }
    }
}

fn run(cmd: Command, out: &mut Vec<u8>, err: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Rate(a) => cmd_rate(a, out),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Threshold(a) => cmd_threshold(a, out),
        Command::Compare(a) => cmd_compare(a, out),
        Command::Validate(a) => cmd_validate(a, out, err),
    }
}

fn csv_writer(out: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn write_json<S: Serialize>(out: &mut Vec<u8>, value: &S) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| CoreError::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(())
}

/// JSON shape of `rate`: the breakdown plus the parameters that produced it.
#[derive(Debug, Serialize)]
struct RateOutput {
    #[serde(rename = "T")]
    t: f64,
    losses_db: Option<f64>,
    va: f64,
    measurement: Measurement,
    direction: Direction,
    bob_info: f64,
    eve_info: f64,
    rate: f64,
    unit: InfoUnit,
}

fn cmd_rate(a: RateArgs, out: &mut Vec<u8>) -> Result<()> {
    let spec = ProtocolSpec::new(a.direction, a.measurement);
    let p = ChannelPoint::new(a.transmission, a.variance.va()?)?;
    let unit = a.output.unit;
    match a.output.format {
        Format::Json => {
            let b = key_rate(spec, &p, unit)?;
            let rate = if a.clamp { b.rate.max(0.0) } else { b.rate };
            write_json(
                out,
                &RateOutput {
                    t: p.transmission(),
                    losses_db: (p.transmission() > 0.0).then(|| losses_db(p.transmission())),
                    va: p.va(),
                    measurement: spec.measurement,
                    direction: spec.direction,
                    bob_info: b.bob_info,
                    eve_info: b.eve_info,
                    rate,
                    unit,
                },
            )
        }
        Format::Csv => {
            let row = OutputRow::compute(spec, &p, unit, a.clamp);
            if let Some(e) = row.error {
                return Err(CoreError::Domain(e));
            }
            let mut w = csv_writer(out);
            w.write_record(SWEEP_CSV_HEADER)?;
            w.write_record(row.csv_fields())?;
            w.flush()?;
            Ok(())
        }
    }
}

fn cmd_sweep(a: SweepArgs, out: &mut Vec<u8>, err: &mut dyn Write) -> Result<()> {
    let directions = if a.direction.is_empty() { Direction::ALL.to_vec() } else { a.direction };
    let measurements = if a.measurement.is_empty() { Measurement::ALL.to_vec() } else { a.measurement };
    let specs = directions
        .iter()
        .flat_map(|&d| measurements.iter().map(move |&m| ProtocolSpec::new(d, m)))
        .collect();
    let spec = SweepSpec {
        t_start: a.t_start,
        t_stop: a.t_stop,
        steps: a.steps,
        spacing: a.spacing,
        vas: a.variance.vas()?,
        specs,
        unit: a.output.unit,
        clamp: a.clamp,
    };
    let rows = run_sweep(&spec)?;
    for r in &rows {
        if let Some(e) = &r.error {
            let _ = writeln!(
                err,
                "cvqkd: error: sweep row T={} va={} {}/{}: {e}",
                r.t, r.va, r.direction, r.measurement
            );
        }
    }
    match a.output.format {
        Format::Json => write_json(out, &rows),
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(SWEEP_CSV_HEADER)?;
            for r in &rows {
                w.write_record(r.csv_fields())?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

#[derive(Debug, Serialize)]
struct ThresholdOutput {
    direction: Direction,
    measurement: Measurement,
    /// `null` for the infinite-modulation limit.
    va: Option<f64>,
    #[serde(rename = "T")]
    t: f64,
    losses_db: f64,
}

fn cmd_threshold(a: ThresholdArgs, out: &mut Vec<u8>) -> Result<()> {
    let spec = ProtocolSpec::new(a.direction, a.measurement);
    let va = if a.infinite_modulation { None } else { Some(resolve_va(a.va, a.vmod)?) };
    let regime = va.map_or(ModulationRegime::InfiniteModulation, ModulationRegime::Finite);
    let t = threshold_transmission(ThresholdQuery { spec, regime })?;
    let res = ThresholdOutput {
        direction: a.direction,
        measurement: a.measurement,
        va,
        t,
        losses_db: losses_db(t),
    };
    match a.format {
        Format::Json => write_json(out, &res),
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["direction", "measurement", "va", "T", "losses_db"])?;
            w.write_record([
                res.direction.to_string(),
                res.measurement.to_string(),
                res.va.map(|v| v.to_string()).unwrap_or_default(),
                res.t.to_string(),
                res.losses_db.to_string(),
            ])?;
            w.flush()?;
            Ok(())
        }
    }
}

fn cmd_compare(a: CompareArgs, out: &mut Vec<u8>) -> Result<()> {
    let spec = ProtocolSpec::new(a.direction, a.measurement);
    let res: CompareResult = run_compare(spec, &a.transmission, &a.variance.vas()?, a.output.unit)?;
    match a.output.format {
        Format::Json => write_json(out, &res),
        Format::Csv => {
            {
                let mut w = csv_writer(out);
                w.write_record(COMPARE_CSV_HEADER)?;
                for r in &res.rows {
                    w.write_record([
                        r.t.to_string(),
                        r.losses_db.to_string(),
                        r.va.to_string(),
                        r.measurement.clone(),
                        r.direction.clone(),
                        r.exact_rate.to_string(),
                        r.asymptotic_rate.to_string(),
                        r.difference.to_string(),
                        r.error_scale.to_string(),
                    ])?;
                }
                w.flush()?;
            }
            let slopes: Vec<String> = res
                .summary
                .slopes
                .iter()
                .map(|s| format!("{}:{}", s.t, s.slope))
                .collect();
            writeln!(out, "# fitted_c={} slopes={}", res.summary.fitted_c, slopes.join(";"))?;
            Ok(())
        }
    }
}

fn cmd_validate(a: ValidateArgs, out: &mut Vec<u8>, err: &mut dyn Write) -> Result<()> {
    let p = ChannelPoint::new(a.transmission, a.variance.va()?)?;
    let batch = simulate_batch(&SimConfig {
        transmission: p.transmission(),
        v_mod: p.v_mod(),
        detection: a.measurement,
        n: a.n,
        seed: a.seed,
    })?;
    let report = validate_batch(&p, &batch)?;
    if let Some(path) = &a.dump {
        let file = File::create(path)
            .map_err(|e| CoreError::Io(format!("{}: {e}", path.display())))?;
        write_batch_csv(&batch, BufWriter::new(file))?;
    }
    let flagged = report.flagged().count();
    if flagged > 0 {
        let _ = writeln!(err, "cvqkd: warning: validate: {flagged} rows with |z| > 4");
    }
    match a.format {
        Format::Json => write_json(out, &report),
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["quantity", "analytic", "empirical", "std_err", "z", "flagged"])?;
            for r in &report.rows {
                w.write_record([
                    r.quantity.clone(),
                    r.analytic.to_string(),
                    r.empirical.to_string(),
                    r.std_err.to_string(),
                    r.z.to_string(),
                    r.flagged.to_string(),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}
