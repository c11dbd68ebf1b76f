//! Dynamic drift correction from per-frame clock-offset readouts.
//!
//! A receiver's carrier-tracking loop measures how fast its own clock runs
//! relative to the remote transmitter's. That single readout, taken once per
//! session, lets the initiator rescale the responder's reply span before the
//! plain TWR combination:
//!
//! ```text
//! ToF ≈ ((t4 - t1) - (1 + ppm * 1e-6) * (t3 - t2)) / 2
//! ```
//!
//! The sign convention is operational: `ppm` is the offset of the initiator's
//! clock relative to the responder's, `(fA/fB - 1) * 1e6`, which is exactly
//! the factor that converts responder ticks into initiator ticks and cancels
//! the first-order reply-delay error. (Locked by regression test: flipping the
//! sign doubles the error instead of cancelling it.)

use crate::clock::{tick_diff, ClockModel, TickResolution};
use crate::protocol::{ProtocolError, RangingExchange};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrectionError {
    #[error("bias calibration needs at least one (measured, actual) sample")]
    EmptyCalibrationSet,
}

/// One clock-offset readout, in parts-per-million, plus the noise level it
/// was drawn with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockOffsetEstimate {
    pub ppm: f64,
    pub noise_std_ppm: f64,
}

/// Samples the relative clock offset the initiator would read while receiving
/// a frame from the responder: the true ratio of effective rates (including
/// any temperature terms accumulated so far) plus Gaussian estimator noise.
pub fn estimate_clock_offset(
    clock_a: &ClockModel,
    clock_b: &ClockModel,
    noise_std_ppm: f64,
    rng: &mut impl Rng,
) -> ClockOffsetEstimate {
    let rate_a = 1.0 + clock_a.effective_offset_ppm() * 1e-6;
    let rate_b = 1.0 + clock_b.effective_offset_ppm() * 1e-6;
    let true_ppm = (rate_a / rate_b - 1.0) * 1e6;
    let noise = Normal::new(0.0, noise_std_ppm.max(0.0))
        .expect("non-negative noise std")
        .sample(rng);
    let ppm = true_ppm + noise;
    debug_assert!(ppm.abs() <= 200.0 + 6.0 * noise_std_ppm, "offset {ppm} ppm out of sanity range");
    ClockOffsetEstimate {
        ppm,
        noise_std_ppm,
    }
}

/// Drift-corrected two-way ranging: the responder's reply span is rescaled by
/// `1 + ppm * 1e-6` before the TWR combination. With a zero offset this is
/// bit-for-bit the plain TWR estimate.
pub fn tof_twr_corrected(
    ex: &RangingExchange,
    offset: ClockOffsetEstimate,
    resolution: TickResolution,
) -> Result<f64, ProtocolError> {
    let t1 = ex.slot(1).ok_or(ProtocolError::Missing("t1"))?.stamp;
    let t2 = ex.slot(2).ok_or(ProtocolError::Missing("t2"))?.stamp;
    let t3 = ex.slot(3).ok_or(ProtocolError::Missing("t3"))?.stamp;
    let t4 = ex.slot(4).ok_or(ProtocolError::Missing("t4"))?.stamp;
    let round_trip = tick_diff(t4, t1) as f64;
    let reply = tick_diff(t3, t2) as f64 * (1.0 + offset.ppm * 1e-6);
    Ok((round_trip - reply) * resolution.seconds_per_tick() / 2.0)
}

/// A constant additive distance correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationBias {
    pub bias_m: f64,
}

/// Fits the constant bias from `(measured_m, actual_m)` pairs:
/// `bias_m = mean(actual - measured)`, so `measured + bias_m` is unbiased.
pub fn calibrate_bias(samples: &[(f64, f64)]) -> Result<CalibrationBias, CorrectionError> {
    if samples.is_empty() {
        return Err(CorrectionError::EmptyCalibrationSet);
    }
    let sum: f64 = samples.iter().map(|(measured, actual)| actual - measured).sum();
    Ok(CalibrationBias {
        bias_m: sum / samples.len() as f64,
    })
}
