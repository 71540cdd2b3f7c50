//! Command-line interface: `add`, `sweep`, `verify`, `info` and
//! `export-circuit` subcommands.
//!
//! The sweep command emits one CSV row per (adder, bit width) with the
//! profiler counters plus constant reference columns for two adders from
//! the literature (the virtual-neuron adder and the streaming adder), so
//! the file is directly plottable.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rayon::prelude::*;

use crate::adders::{AdderConfig, AdderKind};
use crate::error::{Error, Result};
use crate::hw::{self, HardwareModel};
use crate::profile::{self, ProfileReport, PROFILE_CSV_HEADER};
use crate::verify;

pub const EXIT_OK: i32 = 0;
/// A result disagreed with the integer reference.
pub const EXIT_MISMATCH: i32 = 1;
/// A hardware constraint or build failure.
pub const EXIT_CONSTRAINT: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "spikeadd",
    version,
    about = "Spiking threshold-gate binary adders: simulate, profile and verify"
)]
pub struct Cli {
    /// JSON hardware config; falls back to $SPIKEADD_HW_CONFIG, then the
    /// built-in Loihi 2-style defaults.
    #[arg(long, global = true)]
    pub hw_config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Add two numbers on a freshly built adder and check the result.
    Add(AddArgs),
    /// Profile adders across bit widths and write a CSV.
    Sweep(SweepArgs),
    /// Verify adders against the integer reference.
    Verify(VerifyArgs),
    /// Print theoretical and constructed figures for one adder.
    Info(BuildArgs),
    /// Write an adder circuit as JSON.
    ExportCircuit(ExportArgs),
}

#[derive(Args, Debug, Clone)]
pub struct BuildArgs {
    #[arg(long, value_enum)]
    pub adder: AdderKind,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub bits: u32,
    /// Relay-neuron layers for stretching sequential-adder delays.
    #[arg(long, default_value_t = 0)]
    pub relay_layers: u32,
    /// Give every DCTA3 neuron its own threshold instead of shared
    /// thresholds with bias offsets.
    #[arg(long, default_value_t = false)]
    pub per_neuron_thresholds: bool,
}

impl BuildArgs {
    fn config(&self) -> AdderConfig {
        AdderConfig::new(self.adder, self.bits)
            .relay_layers(self.relay_layers)
            .per_neuron_thresholds(self.per_neuron_thresholds)
    }
}

#[derive(Args, Debug)]
pub struct AddArgs {
    #[command(flatten)]
    pub build: BuildArgs,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Also write the harnessed run's spike record as CSV.
    #[arg(long)]
    pub spikes_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Adders to sweep; defaults to all three.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = AdderKind::ALL)]
    pub adders: Vec<AdderKind>,
    /// Inclusive bit range `a..b` (or a single width). Clipped per adder
    /// to its supported maximum.
    #[arg(long, default_value = "1..62")]
    pub bits: String,
    #[arg(long, value_enum, default_value_t = InputPolicy::WorstCase)]
    pub input: InputPolicy,
    /// Fixed operands for `--input fixed`.
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub y: Option<String>,
    /// Seed for `--input random`.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Repetitions per point; runs are deterministic, so repeats only
    /// double-check that.
    #[arg(long, default_value_t = 8)]
    pub runs: u32,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub relay_layers: u32,
    #[arg(long, default_value_t = false)]
    pub per_neuron_thresholds: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// An adder kind or `all`.
    #[arg(long, default_value = "all")]
    pub adder: String,
    /// Inclusive bit range `a..b` (or a single width).
    #[arg(long)]
    pub bits: String,
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    pub mode: Mode,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub relay_layers: u32,
    #[arg(long, default_value_t = false)]
    pub per_neuron_thresholds: bool,
    /// Write the full JSON reports here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExportArgs {
    #[command(flatten)]
    pub build: BuildArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Human,
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Random,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputPolicy {
    /// `2^(n-1) - 1` added to itself.
    WorstCase,
    /// Seeded random pair per point.
    Random,
    /// The `--x`/`--y` operands at every point.
    Fixed,
}

/// Inclusive bit range, parsed from `a..b` or a single integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitRange {
    pub lo: u32,
    pub hi: u32,
}

impl FromStr for BitRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|e| format!("bad bit count `{t}`: {e}"))
        };
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let n = parse(s)?;
                (n, n)
            }
        };
        if lo == 0 || hi < lo {
            return Err(format!("invalid bit range `{s}`"));
        }
        Ok(BitRange { lo, hi })
    }
}

/// Everything one sweep needs, resolved from the CLI arguments.
#[derive(Debug)]
pub struct SweepSpec {
    pub kinds: Vec<AdderKind>,
    pub range: BitRange,
    pub input: InputPolicy,
    pub fixed: Option<(BigUint, BigUint)>,
    pub seed: u64,
    pub runs: u32,
    pub out: PathBuf,
    pub relay_layers: u32,
    pub per_neuron_thresholds: bool,
}

pub const SWEEP_CSV_HEADER: &str = "adder,n,x,y,total_steps,spikes,synaptic_events,neurons,synapses,core_fraction,result,overflow,passed,note,ref_vn_time,ref_vn_neurons,ref_vn_synapses,ref_streaming_time,ref_streaming_neurons,ref_streaming_synapses";

/// Published figures for the virtual-neuron adder, trimmed to the
/// two-operand task: time n+1, neurons 4n-1, synapses 12n-6.
fn vn_reference(n: u64) -> (u64, u64, u64) {
    (n + 1, 4 * n - 1, 12 * n - 6)
}

/// Published figures for the streaming adder: time n+1 with a constant
/// four neurons and nine synapses.
fn streaming_reference(n: u64) -> (u64, u64, u64) {
    (n + 1, 4, 9)
}

/// Commas in free-text notes would break the fixed column schema.
fn csv_safe(text: &str) -> String {
    text.replace(',', ";")
}

fn sweep_row(report: &ProfileReport) -> String {
    let n = report.bits as u64;
    let (vt, vn, vs) = vn_reference(n);
    let (st, sn, ss) = streaming_reference(n);
    format!(
        "{},{},{vt},{vn},{vs},{st},{sn},{ss}",
        report.csv_row(),
        csv_safe(report.note.as_deref().unwrap_or("")),
    )
}

fn parse_operand(text: &str, bits: u32) -> Result<BigUint> {
    let value = BigUint::parse_bytes(text.trim().as_bytes(), 10)
        .ok_or_else(|| Error::InvalidArgument(format!("`{text}` is not a decimal integer")))?;
    if value.bits() > bits as u64 {
        return Err(Error::ValueOutOfRange {
            value: text.to_string(),
            width: bits,
        });
    }
    Ok(value)
}

fn exit_code_for(_err: &Error) -> i32 {
    // Result mismatches return EXIT_MISMATCH from the command itself;
    // every error that bubbles up this far is a constraint or usage
    // problem.
    EXIT_CONSTRAINT
}

fn load_hw(path: &Option<PathBuf>) -> Result<HardwareModel> {
    match path {
        Some(p) => HardwareModel::from_json_file(p),
        None => HardwareModel::from_env(),
    }
}

fn cmd_add(args: &AddArgs, hw: &HardwareModel, out: &mut dyn Write) -> Result<i32> {
    let descriptor = args.build.config().build(hw)?;
    let x = parse_operand(&args.x, args.build.bits)?;
    let y = parse_operand(&args.y, args.build.bits)?;
    let report = profile::profile(&descriptor, &x, &y, hw)?;

    if let Some(path) = &args.spikes_csv {
        let harnessed = profile::harness(&descriptor)?;
        let sim = crate::sim::Simulator::new(&harnessed.circuit);
        let schedule = {
            let mut s = crate::sim::InputSchedule::new();
            crate::encoding::encode_uint(&x, descriptor.bits)?.schedule_into(
                &mut s,
                0,
                crate::adders::PORT_X,
            );
            crate::encoding::encode_uint(&y, descriptor.bits)?.schedule_into(
                &mut s,
                0,
                crate::adders::PORT_Y,
            );
            s
        };
        let record = sim.run(&schedule, harnessed.horizon)?;
        record.write_csv(BufWriter::new(File::create(path)?))?;
    }

    match args.format {
        Format::Human => {
            writeln!(out, "adder: {}  bits: {}", descriptor.kind, descriptor.bits)?;
            writeln!(out, "x: {}  y: {}", report.x, report.y)?;
            writeln!(out, "result: {}  overflow: {}", report.result, report.overflow)?;
            writeln!(
                out,
                "latency: {} steps, {} total with I/O",
                descriptor.latency, report.total_steps
            )?;
            writeln!(
                out,
                "spikes: {}  synaptic events: {}",
                report.spikes, report.synaptic_events
            )?;
            writeln!(out, "oracle: {}", if report.passed { "PASS" } else { "FAIL" })?;
        }
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
        Format::Csv => {
            writeln!(out, "{PROFILE_CSV_HEADER}")?;
            writeln!(out, "{}", report.csv_row())?;
        }
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_MISMATCH })
}

/// Operands for one sweep point, derived from the input policy.
fn sweep_operands(spec: &SweepSpec, kind: AdderKind, bits: u32) -> (BigUint, BigUint) {
    match spec.input {
        InputPolicy::WorstCase => {
            let w = profile::worst_case_operand(bits);
            (w.clone(), w)
        }
        InputPolicy::Random => {
            use rand::{RngCore, SeedableRng};
            let point_seed = spec
                .seed
                .wrapping_mul(1_000_003)
                .wrapping_add((kind as u64) << 32 | bits as u64);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(point_seed);
            let mut draw = || {
                let words = (bits as usize).div_ceil(64);
                let mut bytes = Vec::with_capacity(words * 8);
                for _ in 0..words {
                    bytes.extend_from_slice(&rng.next_u64().to_le_bytes());
                }
                BigUint::from_bytes_le(&bytes) % (BigUint::from(1u32) << bits)
            };
            (draw(), draw())
        }
        InputPolicy::Fixed => spec
            .fixed
            .clone()
            .expect("fixed policy requires operands"),
    }
}

pub fn run_sweep(spec: &SweepSpec, hw: &HardwareModel, err: &mut dyn Write) -> Result<()> {
    let mut points: Vec<(AdderKind, u32)> = Vec::new();
    let mut kinds = spec.kinds.clone();
    kinds.sort_by_key(|k| k.name());
    kinds.dedup();
    for kind in kinds {
        let template = AdderConfig::new(kind, 1)
            .relay_layers(spec.relay_layers)
            .per_neuron_thresholds(spec.per_neuron_thresholds);
        let max = hw::max_supported_bits_with(&template, hw);
        let hi = spec.range.hi.min(max);
        if hi < spec.range.hi {
            writeln!(
                err,
                "note: {kind} capped at {max} bits; clipping sweep to {}..{hi}",
                spec.range.lo
            )?;
        }
        for bits in spec.range.lo..=hi {
            points.push((kind, bits));
        }
    }

    let rows: Vec<String> = points
        .par_iter()
        .map(|(kind, bits)| {
            let config = AdderConfig::new(*kind, *bits)
                .relay_layers(spec.relay_layers)
                .per_neuron_thresholds(spec.per_neuron_thresholds);
            let (x, y) = sweep_operands(spec, *kind, *bits);
            match config.build(hw) {
                Ok(descriptor) => {
                    let mut report = None;
                    for _ in 0..spec.runs.max(1) {
                        let next = profile::profile(&descriptor, &x, &y, hw);
                        match next {
                            Ok(r) => {
                                if let Some(prev) = &report {
                                    assert_eq!(prev, &r, "profile runs must be deterministic");
                                }
                                report = Some(r);
                            }
                            Err(e) => {
                                return format!(
                                    "{kind},{bits},{x},{y},0,0,0,0,0,0,,false,false,profile error: {e},,,,,,"
                                )
                            }
                        }
                    }
                    sweep_row(&report.expect("at least one run"))
                }
                Err(e) => format!("{kind},{bits},{x},{y},0,0,0,0,0,0,,false,false,build error: {e},,,,,,"),
            }
        })
        .collect();

    let mut sorted: Vec<(String, u32, String)> = points
        .iter()
        .zip(rows)
        .map(|((kind, bits), row)| (kind.name().to_string(), *bits, row))
        .collect();
    sorted.sort_by(|a, b| (a.0.as_str(), a.1).cmp(&(b.0.as_str(), b.1)));

    let mut file = BufWriter::new(File::create(&spec.out)?);
    writeln!(file, "{SWEEP_CSV_HEADER}")?;
    for (_, _, row) in sorted {
        writeln!(file, "{row}")?;
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs, hw: &HardwareModel, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let range: BitRange = args.bits.parse().map_err(Error::InvalidArgument)?;
    let fixed = match args.input {
        InputPolicy::Fixed => {
            let (x, y) = match (&args.x, &args.y) {
                (Some(x), Some(y)) => (x, y),
                _ => {
                    return Err(Error::InvalidArgument(
                        "--input fixed requires --x and --y".into(),
                    ))
                }
            };
            Some((parse_operand(x, range.lo)?, parse_operand(y, range.lo)?))
        }
        _ => None,
    };
    let spec = SweepSpec {
        kinds: args.adders.clone(),
        range,
        input: args.input,
        fixed,
        seed: args.seed,
        runs: args.runs,
        out: args.out.clone(),
        relay_layers: args.relay_layers,
        per_neuron_thresholds: args.per_neuron_thresholds,
    };
    run_sweep(&spec, hw, err)?;
    writeln!(out, "wrote {}", spec.out.display())?;
    Ok(EXIT_OK)
}

fn cmd_verify(args: &VerifyArgs, hw: &HardwareModel, out: &mut dyn Write) -> Result<i32> {
    let kinds: Vec<AdderKind> = if args.adder == "all" {
        AdderKind::ALL.to_vec()
    } else {
        vec![args.adder.parse().map_err(Error::InvalidArgument)?]
    };
    let range: BitRange = args.bits.parse().map_err(Error::InvalidArgument)?;

    let mut reports = Vec::new();
    let mut all_passed = true;
    for kind in kinds {
        for bits in range.lo..=range.hi {
            let config = AdderConfig::new(kind, bits)
                .relay_layers(args.relay_layers)
                .per_neuron_thresholds(args.per_neuron_thresholds);
            let report = match args.mode {
                Mode::Exhaustive => verify::verify_exhaustive(&config, hw)?,
                Mode::Random => verify::verify_random(&config, hw, args.trials, args.seed)?,
            };
            writeln!(
                out,
                "{kind} n={bits} mode={:?} trials={} failures={} -> {}",
                report.mode,
                report.trials,
                report.failures.len(),
                if report.passed() { "PASS" } else { "FAIL" }
            )?;
            all_passed &= report.passed();
            reports.push(report);
        }
    }
    if let Some(path) = &args.out {
        let mut file = BufWriter::new(File::create(path)?);
        writeln!(file, "{}", serde_json::to_string_pretty(&reports)?)?;
    }
    Ok(if all_passed { EXIT_OK } else { EXIT_MISMATCH })
}

fn cmd_info(args: &BuildArgs, hw: &HardwareModel, out: &mut dyn Write) -> Result<i32> {
    let config = args.config();
    let theoretical = crate::adders::theoretical_resources(args.adder, args.bits);
    let max = hw::max_supported_bits_with(&config.with_bits(1), hw);
    writeln!(out, "adder: {}  bits: {}", args.adder, args.bits)?;
    writeln!(
        out,
        "theoretical: time {} neurons {} synapses {}{}",
        theoretical.time_steps,
        theoretical.neurons,
        theoretical.synapses,
        if theoretical.closed_form {
            ""
        } else {
            " (constructed count; width is not a perfect square)"
        }
    )?;
    let status = if args.bits < max {
        "within supported range"
    } else if args.bits == max {
        "at maximum supported width"
    } else {
        "exceeds supported range"
    };
    writeln!(out, "supported: up to {max} bits ({status})")?;

    let descriptor = config.build_unvalidated(hw)?;
    writeln!(
        out,
        "constructed: neurons {} synapses {} latency {} max-delay {}",
        descriptor.circuit.neuron_count(),
        descriptor.circuit.synapse_count(),
        descriptor.latency,
        descriptor.circuit.max_delay()
    )?;
    let report = hw::validate(&descriptor.circuit, hw);
    if report.is_empty() {
        writeln!(
            out,
            "core fraction: {:.6}",
            hw::core_usage(&descriptor.circuit, hw)
        )?;
    } else {
        writeln!(out, "violations:\n{report}")?;
    }
    Ok(if report.is_empty() {
        EXIT_OK
    } else {
        EXIT_CONSTRAINT
    })
}

fn cmd_export(args: &ExportArgs, hw: &HardwareModel, out: &mut dyn Write) -> Result<i32> {
    let descriptor = args.build.config().build(hw)?;
    let mut file = BufWriter::new(File::create(&args.out)?);
    writeln!(file, "{}", descriptor.to_json()?)?;
    writeln!(out, "wrote {}", args.out.display())?;
    Ok(EXIT_OK)
}

/// Dispatches a parsed command, writing to the given streams. Returns the
/// process exit code.
pub fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let hw = match load_hw(&cli.hw_config) {
        Ok(hw) => hw,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_CONSTRAINT;
        }
    };
    let result = match &cli.command {
        Command::Add(args) => cmd_add(args, &hw, out),
        Command::Sweep(args) => cmd_sweep(args, &hw, out, err),
        Command::Verify(args) => cmd_verify(args, &hw, out),
        Command::Info(args) => cmd_info(args, &hw, out),
        Command::ExportCircuit(args) => cmd_export(args, &hw, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code_for(&e)
        }
    }
}

/// Parses `args` (including the binary name) and runs the command.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(&cli, out, err),
        Err(e) if e.use_stderr() => {
            let _ = write!(err, "{e}");
            EXIT_CONSTRAINT
        }
        // --help and --version render here.
        Err(e) => {
            let _ = write!(out, "{e}");
            EXIT_OK
        }
    }
}

/// Entry point for the binary.
pub fn run() -> i32 {
    let mut out = io::stdout();
    let mut err = io::stderr();
    run_from(std::env::args_os(), &mut out, &mut err)
}
