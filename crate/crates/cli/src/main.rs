//! `rangesim`: run ranging campaigns, single-session traces, and noise
//! calibration from the command line.
//!
//! Exit codes: 0 success, 2 invalid arguments or spec, 3 calibration target
//! unreachable, 4 output I/O failure.

use clap::{Args, Parser, Subcommand};
use rangesim_core::*;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "rangesim",
    version,
    about = "Deterministic two-way ranging simulator: drifting clocks, reply-delay sweeps, CSV error tables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a distance x reply-delay campaign and write the error table as CSV
    Sweep(SweepArgs),
    /// Run one ranging session and print its full timestamp trace
    Session(SessionArgs),
    /// Find the per-stamp jitter that reproduces a target distance std
    Calibrate(CalibrateArgs),
}

/// `start:stop:step` range or comma-separated list of reals.
#[derive(Clone, Debug)]
struct ValueList(Vec<f64>);

impl FromStr for ValueList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_one = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("not a number: {p:?}"))
        };
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 3 {
                return Err(format!("range must be start:stop:step, got {s:?}"));
            }
            let start = parse_one(parts[0])?;
            let stop = parse_one(parts[1])?;
            let step = parse_one(parts[2])?;
            if !(step.is_finite() && step > 0.0) {
                return Err(format!("range step must be positive, got {step}"));
            }
            if stop < start {
                return Err(format!("range stop {stop} is below start {start}"));
            }
            let mut values = Vec::new();
            let mut i = 0u32;
            loop {
                let v = start + i as f64 * step;
                if v > stop + step * 1e-9 {
                    break;
                }
                values.push(v);
                i += 1;
            }
            Ok(ValueList(values))
        } else {
            let values = s
                .split(',')
                .map(parse_one)
                .collect::<Result<Vec<f64>, String>>()?;
            Ok(ValueList(values))
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Ranging protocol: twr | sds-twr | sds-twr-ma:K
    #[arg(long, default_value = "twr")]
    protocol: ProtocolKind,
    /// Node separations in meters: start:stop:step or a comma list
    #[arg(long, default_value = "0.5:5.5:0.5")]
    distances: ValueList,
    /// Reply delays in milliseconds, comma list (0 = processing floor only)
    #[arg(long = "delays-ms", default_value = "1,2,3,4,5,6,7,8,9,10,16,21")]
    delays_ms: ValueList,
    /// Sessions per (distance, delay) cell
    #[arg(long, default_value_t = 30)]
    trials: u32,
    /// Initiator clock offset, ppm
    #[arg(long = "drift-ppm-a", default_value_t = 0.0)]
    drift_ppm_a: f64,
    /// Responder clock offset, ppm
    #[arg(long = "drift-ppm-b", default_value_t = 0.0)]
    drift_ppm_b: f64,
    /// Per-stamp timestamp jitter std, in meters of light travel
    #[arg(long = "jitter-std-m", conflicts_with = "calibrate_std")]
    jitter_std_m: Option<f64>,
    /// Calibrate the jitter so the raw distance std hits this target, meters
    #[arg(long = "calibrate-std")]
    calibrate_std: Option<f64>,
    /// Clock-offset readout noise std, ppm
    #[arg(long = "offset-noise-ppm", default_value_t = 0.05)]
    offset_noise_ppm: f64,
    /// Initiator warming, ppm per second of accumulated listening time
    #[arg(long = "temp-coeff", default_value_t = 0.0)]
    temp_coeff: f64,
    /// Which estimators to tabulate: off | on | both
    #[arg(long, default_value = "both")]
    correction: CorrectionSelection,
    /// Additive range calibration applied to every measurement, meters
    #[arg(long = "bias-m", default_value_t = 0.0)]
    bias_m: f64,
    /// Master seed; every cell derives its own child seed from it
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the CSV to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use ';' field separators and decimal commas
    #[arg(long = "locale-decimal-comma", default_value_t = false)]
    locale_decimal_comma: bool,
}

#[derive(Args)]
struct SessionArgs {
    /// Ranging protocol: twr | sds-twr | sds-twr-ma:K
    #[arg(long, default_value = "twr")]
    protocol: ProtocolKind,
    /// True distance between the nodes, meters
    #[arg(long = "distance-m", default_value_t = 2.0)]
    distance_m: f64,
    /// Reply delay for both nodes, milliseconds (0 = processing floor)
    #[arg(long = "delay-ms", default_value_t = 1.0)]
    delay_ms: f64,
    /// Initiator clock offset, ppm
    #[arg(long = "drift-ppm-a", default_value_t = 0.0)]
    drift_ppm_a: f64,
    /// Responder clock offset, ppm
    #[arg(long = "drift-ppm-b", default_value_t = 0.0)]
    drift_ppm_b: f64,
    /// Per-stamp timestamp jitter std, in meters of light travel
    #[arg(long = "jitter-std-m", default_value_t = 0.0)]
    jitter_std_m: f64,
    /// Clock-offset readout noise std, ppm
    #[arg(long = "offset-noise-ppm", default_value_t = 0.05)]
    offset_noise_ppm: f64,
    /// Initiator warming, ppm per second of accumulated listening time
    #[arg(long = "temp-coeff", default_value_t = 0.0)]
    temp_coeff: f64,
    /// off | on
    #[arg(long, default_value = "on")]
    correction: CorrectionMode,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Distance std the jitter must reproduce, meters
    #[arg(long = "target-std-m")]
    target_std_m: f64,
    /// Ranging protocol: twr | sds-twr | sds-twr-ma:K
    #[arg(long, default_value = "twr")]
    protocol: ProtocolKind,
    /// Reference distance, meters
    #[arg(long = "distance-m", default_value_t = 2.0)]
    distance_m: f64,
    /// Reference reply delay, milliseconds
    #[arg(long = "delay-ms", default_value_t = 1.0)]
    delay_ms: f64,
    /// Initiator clock offset, ppm
    #[arg(long = "drift-ppm-a", default_value_t = 0.0)]
    drift_ppm_a: f64,
    /// Responder clock offset, ppm
    #[arg(long = "drift-ppm-b", default_value_t = 0.0)]
    drift_ppm_b: f64,
    /// Clock-offset readout noise std, ppm
    #[arg(long = "offset-noise-ppm", default_value_t = 0.05)]
    offset_noise_ppm: f64,
    /// Initiator warming, ppm per second of accumulated listening time
    #[arg(long = "temp-coeff", default_value_t = 0.0)]
    temp_coeff: f64,
    /// Estimator the target std refers to: off | on | both (both = corrected)
    #[arg(long, default_value = "off")]
    correction: CorrectionSelection,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

enum CliError {
    Spec(String),
    Calibration(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Spec(_) => 2,
            CliError::Calibration(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Spec(m) | CliError::Calibration(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::CalibrationUnreachable { .. }
            | SweepError::InvalidCalibrationTarget { .. } => CliError::Calibration(e.to_string()),
            SweepError::Io(_) => CliError::Io(e.to_string()),
            other => CliError::Spec(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Spec(e.to_string())
    }
}

impl From<ChannelError> for CliError {
    fn from(e: ChannelError) -> Self {
        CliError::Spec(e.to_string())
    }
}

impl From<ClockError> for CliError {
    fn from(e: ClockError) -> Self {
        CliError::Spec(e.to_string())
    }
}

impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        CliError::Spec(e.to_string())
    }
}

fn main() -> ExitCode {
    // die quietly when stdout is a pipe that closes early (e.g. `| head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Session(args) => cmd_session(args),
        Command::Calibrate(args) => cmd_calibrate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let mut spec = SweepSpec {
        protocol: args.protocol,
        distances_m: args.distances.0,
        delays_s: args.delays_ms.0.iter().map(|ms| ms * 1e-3).collect(),
        trials: args.trials,
        drift_ppm_a: args.drift_ppm_a,
        drift_ppm_b: args.drift_ppm_b,
        temp_coeff_ppm_per_s: args.temp_coeff,
        offset_noise_ppm: args.offset_noise_ppm,
        correction: args.correction,
        bias_m: args.bias_m,
        seed: args.seed,
        ..SweepSpec::default()
    };
    if let Some(meters) = args.jitter_std_m {
        if !(meters.is_finite() && meters >= 0.0) {
            return Err(CliError::Spec(format!(
                "jitter std must be non-negative and finite, got {meters} m"
            )));
        }
        spec.jitter_std_s = meters / SPEED_OF_LIGHT_M_PER_S;
    }
    if let Some(target) = args.calibrate_std {
        let cal = calibrate_jitter(&spec, target)?;
        eprintln!(
            "calibrated jitter std {:.6e} s ({:.6} m of light travel), achieved std {:.6} m in {} evaluations",
            cal.jitter_std_s,
            cal.jitter_std_s * SPEED_OF_LIGHT_M_PER_S,
            cal.achieved_std_m,
            cal.evaluations
        );
        spec.jitter_std_s = cal.jitter_std_s;
    }
    let table = run_sweep(&spec)?;
    let locale = if args.locale_decimal_comma {
        CsvLocale::DecimalComma
    } else {
        CsvLocale::Point
    };
    match args.out {
        Some(path) => {
            table.write_csv(&path, locale)?;
            eprintln!("wrote {} rows to {}", table.rows.len(), path.display());
        }
        None => print!("{}", table.render_csv(locale)),
    }
    Ok(())
}

fn owner_label(owner: NodeRole) -> &'static str {
    match owner {
        NodeRole::Initiator => "A",
        NodeRole::Responder => "B",
    }
}

fn cmd_session(args: SessionArgs) -> Result<(), CliError> {
    let jitter_std_s = args.jitter_std_m / SPEED_OF_LIGHT_M_PER_S;
    let channel = ChannelModel::new(args.distance_m, jitter_std_s, args.seed)?;
    let a = NodeSim::initiator(
        "A",
        ClockModel::new(args.drift_ppm_a)?.with_temperature_coeff(args.temp_coeff),
    );
    let b = NodeSim::responder("B", ClockModel::new(args.drift_ppm_b)?);
    let mut cfg = SessionConfig::new(
        args.protocol,
        channel,
        ReplyDelayPolicy::symmetric(args.delay_ms * 1e-3)?,
    );
    cfg.offset_noise_ppm = args.offset_noise_ppm;
    let out = run_session(&a, &b, &cfg, args.correction)?;

    let tick_s = cfg.resolution.seconds_per_tick();
    println!(
        "protocol {}, seed {}, correction {}",
        args.protocol, args.seed, args.correction
    );
    println!(
        "distance {:.6} m, reply delay {:.6} ms, processing floor {:.1} us",
        args.distance_m,
        args.delay_ms,
        cfg.processing_time * 1e6
    );
    println!(
        "drift a {:+.3} ppm, b {:+.3} ppm, jitter std {:.6} m, offset noise {:.3} ppm",
        args.drift_ppm_a, args.drift_ppm_b, args.jitter_std_m, args.offset_noise_ppm
    );
    println!();
    println!("{:<6} {:<5} {:>14} {:>20}", "stamp", "owner", "ticks", "local seconds");
    for slot in 1..=6 {
        if let Some(owned) = out.exchange.slot(slot) {
            println!(
                "{:<6} {:<5} {:>14} {:>20.12}",
                STAMP_LABELS[slot - 1],
                owner_label(owned.owner),
                owned.stamp.ticks(),
                owned.stamp.ticks() as f64 * tick_s
            );
        }
    }
    let chain = out.exchange.ma_chain();
    if !chain.is_empty() {
        println!();
        println!(
            "acknowledgment chain: {} stamps, {} rounds",
            chain.len(),
            out.exchange.ma_round_count()
        );
        for (i, owned) in chain.iter().enumerate() {
            println!(
                "{:<6} {:<5} {:>14} {:>20.12}",
                format!("p{i:02}"),
                owner_label(owned.owner),
                owned.stamp.ticks(),
                owned.stamp.ticks() as f64 * tick_s
            );
        }
    }
    println!();
    let true_m = out.true_tof * SPEED_OF_LIGHT_M_PER_S;
    let raw_m = out.raw_tof * SPEED_OF_LIGHT_M_PER_S;
    println!("true tof      {:.6e} s  distance {:.6} m", out.true_tof, true_m);
    println!(
        "raw estimate  {:.6e} s  distance {:.6} m  error {:+.6} m",
        out.raw_tof,
        raw_m,
        raw_m - true_m
    );
    match (out.corrected_tof, out.offset_used) {
        (Some(tof), Some(offset)) => {
            let corrected_m = tof * SPEED_OF_LIGHT_M_PER_S;
            println!(
                "corrected     {:.6e} s  distance {:.6} m  error {:+.6} m",
                tof,
                corrected_m,
                corrected_m - true_m
            );
            println!("offset readout {:+.6} ppm", offset.ppm);
        }
        _ => println!("corrected     (correction off)"),
    }
    Ok(())
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<(), CliError> {
    let spec = SweepSpec {
        protocol: args.protocol,
        distances_m: vec![args.distance_m],
        delays_s: vec![args.delay_ms * 1e-3],
        drift_ppm_a: args.drift_ppm_a,
        drift_ppm_b: args.drift_ppm_b,
        temp_coeff_ppm_per_s: args.temp_coeff,
        offset_noise_ppm: args.offset_noise_ppm,
        correction: args.correction,
        seed: args.seed,
        ..SweepSpec::default()
    };
    let cal = calibrate_jitter(&spec, args.target_std_m)?;
    println!("jitter_std_s {:.9e}", cal.jitter_std_s);
    println!(
        "jitter_std_m {:.9}",
        cal.jitter_std_s * SPEED_OF_LIGHT_M_PER_S
    );
    println!("achieved_std_m {:.6}", cal.achieved_std_m);
    println!("evaluations {}", cal.evaluations);
    Ok(())
}
