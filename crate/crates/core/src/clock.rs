//! Free-running node clocks and 40-bit tick timestamps.
//!
//! Each node stamps events with a counter that runs at a slightly wrong rate
//! (crystal tolerance, expressed in parts-per-million) and wraps modulo 2^40.
//! The counter value for a true instant `t` is
//!
//! ```text
//! ticks = floor((t - phase_origin) * (1 + offset_ppm * 1e-6) / seconds_per_tick) mod 2^40
//! ```
//!
//! so a fast clock (positive offset) counts more ticks per true second. The
//! effective offset can grow while the radio sits in receive mode, which is
//! how self-heating of the oscillator enters the model.

use thiserror::Error;

/// Counter width of the timestamping unit.
pub const TIMESTAMP_BITS: u32 = 40;

/// Timestamps live in `[0, TIMESTAMP_MODULUS)` and wrap.
pub const TIMESTAMP_MODULUS: u64 = 1 << TIMESTAMP_BITS;

/// Crystal tolerance bound: nominal offsets beyond ±100 ppm are rejected.
pub const MAX_NOMINAL_OFFSET_PPM: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClockError {
    #[error("nominal frequency offset {ppm} ppm exceeds the ±{MAX_NOMINAL_OFFSET_PPM} ppm bound")]
    OffsetOutOfRange { ppm: f64 },
    #[error("receive duration must be non-negative and finite, got {seconds} s")]
    InvalidRxDuration { seconds: f64 },
    #[error("tick resolution must be positive and finite, got {seconds_per_tick} s")]
    InvalidResolution { seconds_per_tick: f64 },
}

// ──────────────────────────── tick resolution ────────────────────────────

/// Duration of one counter tick.
///
/// The default matches a 64 GHz-class UWB timestamping unit: 1/(128 × 499.2 MHz)
/// ≈ 15.65 ps, i.e. about 4.69 mm of light travel per tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TickResolution {
    seconds_per_tick: f64,
}

impl TickResolution {
    /// 1 / (128 × 499.2 MHz).
    pub const DEFAULT_SECONDS_PER_TICK: f64 = 1.0 / (128.0 * 499.2e6);

    pub fn new(seconds_per_tick: f64) -> Result<Self, ClockError> {
        if !(seconds_per_tick.is_finite() && seconds_per_tick > 0.0) {
            return Err(ClockError::InvalidResolution { seconds_per_tick });
        }
        Ok(Self { seconds_per_tick })
    }

    #[inline]
    pub fn seconds_per_tick(self) -> f64 {
        self.seconds_per_tick
    }

    /// Seconds spanned by a signed tick count.
    #[inline]
    pub fn ticks_to_seconds(self, ticks: i64) -> f64 {
        ticks as f64 * self.seconds_per_tick
    }

    /// True-time horizon after which the counter has wrapped: 2^40 ticks (≈ 17.2 s
    /// at the default resolution). Differences of stamps taken further apart than
    /// this are ambiguous.
    #[inline]
    pub fn wrap_horizon(self) -> f64 {
        TIMESTAMP_MODULUS as f64 * self.seconds_per_tick
    }
}

impl Default for TickResolution {
    fn default() -> Self {
        Self {
            seconds_per_tick: Self::DEFAULT_SECONDS_PER_TICK,
        }
    }
}

// ──────────────────────────── timestamps ────────────────────────────

/// A 40-bit counter reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Timestamp {
    ticks: u64,
}

impl Timestamp {
    /// Wraps ticks already known to be in range. Panics on out-of-range input;
    /// use [`Timestamp::wrapping`] for raw counter arithmetic.
    pub fn new(ticks: u64) -> Self {
        assert!(
            ticks < TIMESTAMP_MODULUS,
            "timestamp {ticks} outside the 40-bit counter range"
        );
        Self { ticks }
    }

    /// Reduces an arbitrary (possibly negative) raw tick count into the counter
    /// range, mirroring hardware wraparound in both directions.
    pub fn wrapping(raw: i128) -> Self {
        Self {
            ticks: raw.rem_euclid(TIMESTAMP_MODULUS as i128) as u64,
        }
    }

    #[inline]
    pub fn ticks(self) -> u64 {
        self.ticks
    }
}

/// Elapsed ticks from `earlier` to `later` on the same clock, modulo 2^40.
///
/// Correct across a single wrap as long as the true elapsed time is below the
/// wrap horizon; the result is always in `[0, 2^40)`.
#[inline]
pub fn tick_diff(later: Timestamp, earlier: Timestamp) -> u64 {
    later.ticks.wrapping_sub(earlier.ticks) & (TIMESTAMP_MODULUS - 1)
}

// ──────────────────────────── clock model ────────────────────────────

/// One node's free-running clock.
///
/// `nominal_offset_ppm` is the crystal's fixed rate error. While the radio is
/// receiving, the oscillator warms up and the effective offset grows by
/// `temperature_coeff_ppm_per_s_rx` per accumulated receive second. The model
/// is pure: accumulation returns a new clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockModel {
    nominal_offset_ppm: f64,
    temperature_coeff_ppm_per_s_rx: f64,
    accumulated_rx_time: f64,
    phase_origin: f64,
}

impl ClockModel {
    /// A clock with the given fixed rate error, no temperature sensitivity, and
    /// its counter zero at true time zero.
    pub fn new(nominal_offset_ppm: f64) -> Result<Self, ClockError> {
        if !(nominal_offset_ppm.is_finite() && nominal_offset_ppm.abs() <= MAX_NOMINAL_OFFSET_PPM)
        {
            return Err(ClockError::OffsetOutOfRange {
                ppm: nominal_offset_ppm,
            });
        }
        Ok(Self {
            nominal_offset_ppm,
            temperature_coeff_ppm_per_s_rx: 0.0,
            accumulated_rx_time: 0.0,
            phase_origin: 0.0,
        })
    }

    /// An ideal clock: zero offset, no temperature drift.
    pub fn ideal() -> Self {
        Self::new(0.0).expect("zero offset is within bounds")
    }

    /// Sets the receive-time temperature coefficient (ppm per second spent in RX).
    pub fn with_temperature_coeff(mut self, ppm_per_s_rx: f64) -> Self {
        self.temperature_coeff_ppm_per_s_rx = ppm_per_s_rx;
        self
    }

    /// Shifts the instant at which the counter reads zero.
    pub fn with_phase_origin(mut self, origin_s: f64) -> Self {
        self.phase_origin = origin_s;
        self
    }

    #[inline]
    pub fn nominal_offset_ppm(&self) -> f64 {
        self.nominal_offset_ppm
    }

    #[inline]
    pub fn temperature_coeff_ppm_per_s_rx(&self) -> f64 {
        self.temperature_coeff_ppm_per_s_rx
    }

    #[inline]
    pub fn accumulated_rx_time(&self) -> f64 {
        self.accumulated_rx_time
    }

    #[inline]
    pub fn phase_origin(&self) -> f64 {
        self.phase_origin
    }

    /// Current rate error: nominal offset plus the temperature term.
    #[inline]
    pub fn effective_offset_ppm(&self) -> f64 {
        self.nominal_offset_ppm + self.temperature_coeff_ppm_per_s_rx * self.accumulated_rx_time
    }

    /// Returns this clock after `rx_duration` more seconds in receive mode.
    pub fn accumulate_rx(&self, rx_duration: f64) -> Result<Self, ClockError> {
        if !(rx_duration.is_finite() && rx_duration >= 0.0) {
            return Err(ClockError::InvalidRxDuration {
                seconds: rx_duration,
            });
        }
        let mut next = *self;
        next.accumulated_rx_time += rx_duration;
        Ok(next)
    }

    /// The counter reading this clock produces for a true instant.
    ///
    /// Total for any finite input; instants before the phase origin wrap
    /// backwards exactly like the hardware counter would.
    pub fn local_timestamp(&self, true_time: f64, resolution: TickResolution) -> Timestamp {
        let scale = 1.0 + self.effective_offset_ppm() * 1e-6;
        let raw = (true_time - self.phase_origin) * scale / resolution.seconds_per_tick();
        debug_assert!(raw.is_finite(), "non-finite tick count from {true_time}");
        Timestamp::wrapping(raw.floor() as i128)
    }
}
