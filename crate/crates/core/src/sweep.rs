//! Experiment campaigns: distance x reply-delay grids, summary tables, CSV.
//!
//! A sweep runs an independent batch of sessions for every (distance, delay)
//! cell, with and/or without the clock-offset correction, and reduces each
//! cell to signed-error statistics. Every cell gets its own child seed derived
//! from the master seed and the cell's grid coordinates, so the table is
//! byte-identical for a fixed spec no matter how or where cells are executed,
//! and raw/corrected rows of one cell share the same noise draws.

use crate::channel::{ChannelError, ChannelModel, SPEED_OF_LIGHT_M_PER_S};
use crate::clock::{ClockError, ClockModel, TickResolution};
use crate::protocol::{ProtocolError, ProtocolKind, ReplyDelayPolicy};
use crate::sim::{
    derive_seed, run_batch, CorrectionMode, NodeSim, SessionConfig, SessionResult, SimError,
    DEFAULT_INTER_SESSION_SPACING_S, DEFAULT_OFFSET_NOISE_PPM, DEFAULT_PROCESSING_TIME_S,
};
use crate::stats::{summarize, RangingStats, StatsError};
use std::path::Path;
use thiserror::Error;

const STREAM_CALIBRATION: u64 = 0xca11_b8a7;
const CALIBRATION_TRIALS: u32 = 4096;
const CALIBRATION_REL_TOL: f64 = 0.02;
const CALIBRATION_MAX_BISECTIONS: u32 = 48;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("sweep needs at least one distance")]
    NoDistances,
    #[error("sweep needs at least one reply delay")]
    NoDelays,
    #[error("sweep needs at least one trial per cell")]
    NoTrials,
    #[error("calibration target must be non-negative and finite, got {target_m} m")]
    InvalidCalibrationTarget { target_m: f64 },
    #[error(
        "calibration target {target_m} m is below the zero-jitter floor {floor_m} m \
         set by counter quantization and estimator noise"
    )]
    CalibrationUnreachable { target_m: f64, floor_m: f64 },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Clock(#[from] ClockError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("csv output failed: {0}")]
    Io(#[from] std::io::Error),
}

/// Which estimator(s) a sweep tabulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectionSelection {
    Off,
    On,
    Both,
}

impl CorrectionSelection {
    pub fn modes(self) -> &'static [CorrectionMode] {
        match self {
            CorrectionSelection::Off => &[CorrectionMode::Off],
            CorrectionSelection::On => &[CorrectionMode::On],
            CorrectionSelection::Both => &[CorrectionMode::Off, CorrectionMode::On],
        }
    }
}

impl std::fmt::Display for CorrectionSelection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CorrectionSelection::Off => "off",
            CorrectionSelection::On => "on",
            CorrectionSelection::Both => "both",
        })
    }
}

impl std::str::FromStr for CorrectionSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "off" => Ok(CorrectionSelection::Off),
            "on" => Ok(CorrectionSelection::On),
            "both" => Ok(CorrectionSelection::Both),
            other => Err(format!(
                "unknown correction selection {other:?}, expected off|on|both"
            )),
        }
    }
}

/// Full description of a measurement campaign.
///
/// The default spec is the desk-scale reference campaign: 11 positions from
/// 0.5 m to 5.5 m in half-meter steps, reply delays of 1..=10, 16 and 21 ms,
/// 30 sessions per cell spaced 200 ms apart, both estimators tabulated.
/// Clocks are ideal by default; set `drift_ppm_b` to reproduce the drift
/// error tables.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub protocol: ProtocolKind,
    pub distances_m: Vec<f64>,
    pub delays_s: Vec<f64>,
    pub trials: u32,
    pub drift_ppm_a: f64,
    pub drift_ppm_b: f64,
    /// Initiator clock sensitivity to its own accumulated listening time,
    /// ppm per second of RX. Zero keeps the rate constant.
    pub temp_coeff_ppm_per_s: f64,
    /// Per-stamp timestamp jitter std, seconds of true time.
    pub jitter_std_s: f64,
    pub offset_noise_ppm: f64,
    pub processing_time: f64,
    pub inter_session_spacing: f64,
    pub propagation_speed: f64,
    pub resolution: TickResolution,
    pub correction: CorrectionSelection,
    /// Additive range calibration applied to every measured distance, meters.
    pub bias_m: f64,
    pub seed: u64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        let distances_m = (1..=11).map(|i| i as f64 * 0.5).collect();
        let mut delays_s: Vec<f64> = (1..=10).map(|ms| ms as f64 * 1e-3).collect();
        delays_s.push(16e-3);
        delays_s.push(21e-3);
        Self {
            protocol: ProtocolKind::Twr,
            distances_m,
            delays_s,
            trials: 30,
            drift_ppm_a: 0.0,
            drift_ppm_b: 0.0,
            temp_coeff_ppm_per_s: 0.0,
            jitter_std_s: 0.0,
            offset_noise_ppm: DEFAULT_OFFSET_NOISE_PPM,
            processing_time: DEFAULT_PROCESSING_TIME_S,
            inter_session_spacing: DEFAULT_INTER_SESSION_SPACING_S,
            propagation_speed: SPEED_OF_LIGHT_M_PER_S,
            resolution: TickResolution::default(),
            correction: CorrectionSelection::Both,
            bias_m: 0.0,
            seed: 1,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.distances_m.is_empty() {
            return Err(SweepError::NoDistances);
        }
        if self.delays_s.is_empty() {
            return Err(SweepError::NoDelays);
        }
        if self.trials == 0 {
            return Err(SweepError::NoTrials);
        }
        self.protocol.validate()?;
        // per-value checks ride on the constructors they feed
        self.nodes()?;
        for &delay in &self.delays_s {
            ReplyDelayPolicy::symmetric(delay)?;
        }
        for (di, &distance) in self.distances_m.iter().enumerate() {
            self.cell_config(di as u64, 0, distance, self.delays_s[0])?
                .validate()?;
        }
        Ok(())
    }

    fn nodes(&self) -> Result<(NodeSim, NodeSim), SweepError> {
        let clock_a = ClockModel::new(self.drift_ppm_a)?
            .with_temperature_coeff(self.temp_coeff_ppm_per_s);
        let clock_b = ClockModel::new(self.drift_ppm_b)?;
        Ok((
            NodeSim::initiator("A", clock_a),
            NodeSim::responder("B", clock_b),
        ))
    }

    /// Child seed for one grid cell; both correction modes of a cell share it.
    pub fn cell_seed(&self, distance_index: u64, delay_index: u64) -> u64 {
        derive_seed(self.seed, &[distance_index, delay_index])
    }

    fn cell_config(
        &self,
        distance_index: u64,
        delay_index: u64,
        distance_m: f64,
        delay_s: f64,
    ) -> Result<SessionConfig, SweepError> {
        let seed = self.cell_seed(distance_index, delay_index);
        let channel = ChannelModel::with_speed(
            distance_m,
            self.propagation_speed,
            self.jitter_std_s,
            seed,
        )?;
        let mut cfg = SessionConfig::new(
            self.protocol,
            channel,
            ReplyDelayPolicy::symmetric(delay_s)?,
        );
        cfg.processing_time = self.processing_time;
        cfg.resolution = self.resolution;
        cfg.offset_noise_ppm = self.offset_noise_ppm;
        cfg.inter_session_spacing = self.inter_session_spacing;
        Ok(cfg)
    }

    fn measured_distance(&self, result: &SessionResult, mode: CorrectionMode) -> f64 {
        let tof = match mode {
            CorrectionMode::Off => result.raw_tof,
            CorrectionMode::On => result
                .corrected_tof
                .expect("session run with correction on always carries the corrected estimate"),
        };
        tof * self.propagation_speed + self.bias_m
    }
}

/// One summarized cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub distance_m: f64,
    pub delay_s: f64,
    pub correction: CorrectionMode,
    pub protocol: ProtocolKind,
    pub stats: RangingStats,
    /// The cell's child seed, recorded so any row can be reproduced alone.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

/// Exact column set of the rendered table.
pub const CSV_HEADER: &str = "distance_m,delay_s,correction,protocol,trials,\
mean_measured_m,avg_error_m,max_error_m,min_error_m,std_dev_m,seed";

/// Number format for table cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CsvLocale {
    /// `.` decimal separator, `,` field separator.
    #[default]
    Point,
    /// `,` decimal separator, `;` field separator.
    DecimalComma,
}

/// Formats a value with six significant digits, plain notation.
pub fn format_sig6(v: f64) -> String {
    if v == 0.0 {
        return "0.00000".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

impl SweepTable {
    pub fn render_csv(&self, locale: CsvLocale) -> String {
        let (field_sep, decimal) = match locale {
            CsvLocale::Point => (',', '.'),
            CsvLocale::DecimalComma => (';', ','),
        };
        let num = |v: f64| {
            let s = format_sig6(v);
            if decimal == ',' {
                s.replace('.', ",")
            } else {
                s
            }
        };
        let mut out = String::new();
        out.push_str(&CSV_HEADER.replace(',', &field_sep.to_string()));
        out.push('\n');
        for row in &self.rows {
            let fields = [
                num(row.distance_m),
                num(row.delay_s),
                row.correction.to_string(),
                row.protocol.to_string(),
                row.stats.trials.to_string(),
                num(row.stats.mean_measured_m),
                num(row.stats.average_error_m),
                num(row.stats.max_error_m),
                num(row.stats.min_error_m),
                num(row.stats.std_dev_m),
                row.seed.to_string(),
            ];
            out.push_str(&fields.join(&field_sep.to_string()));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>, locale: CsvLocale) -> Result<(), SweepError> {
        std::fs::write(path, self.render_csv(locale))?;
        Ok(())
    }
}

/// Runs the whole campaign. Rows come back sorted by distance, then reply
/// delay, then correction mode, and the run is deterministic for a fixed spec.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable, SweepError> {
    spec.validate()?;
    let (node_a, node_b) = spec.nodes()?;
    let mut rows = Vec::with_capacity(
        spec.distances_m.len() * spec.delays_s.len() * spec.correction.modes().len(),
    );
    for (di, &distance_m) in spec.distances_m.iter().enumerate() {
        for (yi, &delay_s) in spec.delays_s.iter().enumerate() {
            let seed = spec.cell_seed(di as u64, yi as u64);
            let cfg = spec.cell_config(di as u64, yi as u64, distance_m, delay_s)?;
            for &mode in spec.correction.modes() {
                let results = run_batch(&node_a, &node_b, &cfg, spec.trials, mode, seed)?;
                let measured: Vec<f64> = results
                    .iter()
                    .map(|r| spec.measured_distance(r, mode))
                    .collect();
                let stats = summarize(&measured, distance_m)?;
                rows.push(SweepRow {
                    distance_m,
                    delay_s,
                    correction: mode,
                    protocol: spec.protocol,
                    stats,
                    seed,
                });
            }
        }
    }
    rows.sort_by(|a, b| {
        a.distance_m
            .total_cmp(&b.distance_m)
            .then(a.delay_s.total_cmp(&b.delay_s))
            .then(a.correction.cmp(&b.correction))
    });
    Ok(SweepTable { rows })
}

/// Outcome of a jitter calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JitterCalibration {
    /// Per-stamp jitter std to configure, seconds.
    pub jitter_std_s: f64,
    /// Measured-distance std this jitter reproduces at the reference cell, m.
    pub achieved_std_m: f64,
    /// How many batch evaluations the search used.
    pub evaluations: u32,
}

/// Finds the per-stamp timestamp jitter that reproduces a target
/// measured-distance standard deviation at the sweep's first
/// (distance, delay) cell, using the corrected estimator unless the
/// sweep runs raw-only.
///
/// The search bisects on jitter with common random numbers, so the objective
/// is smooth and the result deterministic. A zero target returns zero jitter;
/// positive targets below the zero-jitter floor (counter quantization plus
/// offset-readout noise) are unreachable and reported as such.
pub fn calibrate_jitter(
    spec: &SweepSpec,
    target_std_m: f64,
) -> Result<JitterCalibration, SweepError> {
    spec.validate()?;
    if !(target_std_m.is_finite() && target_std_m >= 0.0) {
        return Err(SweepError::InvalidCalibrationTarget {
            target_m: target_std_m,
        });
    }
    let mode = if spec.correction == CorrectionSelection::Off {
        CorrectionMode::Off
    } else {
        CorrectionMode::On
    };
    let distance_m = spec.distances_m[0];
    let delay_s = spec.delays_s[0];
    let eval_seed = derive_seed(spec.seed, &[STREAM_CALIBRATION]);
    let (node_a, node_b) = spec.nodes()?;

    let mut evaluations = 0u32;
    let mut std_at = |jitter: f64| -> Result<f64, SweepError> {
        evaluations += 1;
        let mut probe = spec.clone();
        probe.jitter_std_s = jitter;
        let mut cfg = probe.cell_config(0, 0, distance_m, delay_s)?;
        cfg.channel = cfg.channel.reseeded(eval_seed);
        let results = run_batch(&node_a, &node_b, &cfg, CALIBRATION_TRIALS, mode, eval_seed)?;
        let measured: Vec<f64> = results
            .iter()
            .map(|r| probe.measured_distance(r, mode))
            .collect();
        Ok(summarize(&measured, distance_m)?.std_dev_m)
    };

    if target_std_m == 0.0 {
        let achieved_std_m = std_at(0.0)?;
        return Ok(JitterCalibration {
            jitter_std_s: 0.0,
            achieved_std_m,
            evaluations,
        });
    }

    let floor_m = std_at(0.0)?;
    if target_std_m < floor_m {
        return Err(SweepError::CalibrationUnreachable {
            target_m: target_std_m,
            floor_m,
        });
    }

    // bracket the target from above, starting near the large-jitter slope
    let mut hi = (target_std_m / spec.propagation_speed)
        .max(spec.resolution.seconds_per_tick());
    let mut hi_std = std_at(hi)?;
    let mut growths = 0;
    while hi_std < target_std_m {
        if growths >= 64 {
            return Err(SweepError::CalibrationUnreachable {
                target_m: target_std_m,
                floor_m,
            });
        }
        hi *= 2.0;
        hi_std = std_at(hi)?;
        growths += 1;
    }

    let mut lo = 0.0_f64;
    let mut best = (hi, hi_std);
    for _ in 0..CALIBRATION_MAX_BISECTIONS {
        if (best.1 - target_std_m).abs() <= CALIBRATION_REL_TOL * target_std_m {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let mid_std = std_at(mid)?;
        if (mid_std - target_std_m).abs() < (best.1 - target_std_m).abs() {
            best = (mid, mid_std);
        }
        if mid_std < target_std_m {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    Ok(JitterCalibration {
        jitter_std_s: best.0,
        achieved_std_m: best.1,
        evaluations,
    })
}
