//! Deterministic simulator for two-way ranging over ultra-wideband links
//! between nodes with independently drifting clocks.
//!
//! Each node stamps message departures and arrivals on its own free-running
//! 40-bit counter, whose rate differs from true time by a nominal offset (and
//! optionally warms with accumulated listening time). The protocol estimators
//! (`tof_twr`, `tof_sds_twr`, `tof_sds_twr_ma`) turn those stamps back into a
//! flight time; the gap between that estimate and the true flight time is the
//! drift error this crate exists to reproduce, and the clock-offset correction
//! is the dynamic fix that cancels it.
//!
//! Everything is seeded: a session, a batch, or a whole measurement campaign
//! replays bit-for-bit from its seed.
//!
//! ```
//! use rangesim_core::*;
//!
//! let a = NodeSim::initiator("A", ClockModel::ideal());
//! let b = NodeSim::responder("B", ClockModel::new(20.0).unwrap());
//! let channel = ChannelModel::new(2.0, 0.0, 42).unwrap();
//! let cfg = SessionConfig::new(
//!     ProtocolKind::Twr,
//!     channel,
//!     ReplyDelayPolicy::symmetric(1e-3).unwrap(),
//! );
//!
//! let out = run_session(&a, &b, &cfg, CorrectionMode::On).unwrap();
//! let err_raw = (out.raw_tof - out.true_tof) * SPEED_OF_LIGHT_M_PER_S;
//! let err_fixed = (out.corrected_tof.unwrap() - out.true_tof) * SPEED_OF_LIGHT_M_PER_S;
//! assert!(err_raw.abs() > 2.5); // ~3 m of drift error at a 1 ms reply delay
//! assert!(err_fixed.abs() < 0.01); // gone once the offset readout is applied
//! ```

pub mod channel;
pub mod clock;
pub mod correction;
pub mod protocol;
pub mod sim;
pub mod stats;
pub mod sweep;

pub use channel::{ChannelError, ChannelModel, SPEED_OF_LIGHT_M_PER_S};
pub use clock::{
    tick_diff, ClockError, ClockModel, TickResolution, Timestamp, MAX_NOMINAL_OFFSET_PPM,
    TIMESTAMP_BITS, TIMESTAMP_MODULUS,
};
pub use correction::{
    calibrate_bias, estimate_clock_offset, tof_twr_corrected, CalibrationBias,
    ClockOffsetEstimate, CorrectionError,
};
pub use protocol::{
    tof_sds_twr, tof_sds_twr_ma, tof_twr, validate_exchange, NodeRole, OwnedStamp, ProtocolError,
    ProtocolKind, RangingExchange, ReplyDelayPolicy, STAMP_LABELS,
};
pub use sim::{
    derive_seed, run_batch, run_session, trial_setup, CorrectionMode, NodeSim, SessionConfig,
    SessionResult, SimError, DEFAULT_INTER_SESSION_SPACING_S, DEFAULT_OFFSET_NOISE_PPM,
    DEFAULT_PROCESSING_TIME_S,
};
pub use stats::{summarize, RangingStats, StatsError};
pub use sweep::{
    calibrate_jitter, format_sig6, run_sweep, CorrectionSelection, CsvLocale, JitterCalibration,
    SweepError, SweepRow, SweepSpec, SweepTable, CSV_HEADER,
};
