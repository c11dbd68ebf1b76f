//! Line-of-sight propagation and timestamping noise.
//!
//! The channel is deliberately simple: a fixed distance at a fixed propagation
//! speed, plus independent Gaussian jitter applied to each *recorded* instant.
//! Jitter never moves the physical events, so message ordering is unaffected;
//! it only blurs what the counters write down. Every channel owns a seeded
//! RNG stream, so an identical seed and call sequence reproduces identical
//! noise draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

/// Propagation speed of the default medium (vacuum/air), m/s.
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("distance must be non-negative and finite, got {meters} m")]
    InvalidDistance { meters: f64 },
    #[error("propagation speed must be positive and finite, got {speed} m/s")]
    InvalidSpeed { speed: f64 },
    #[error("timestamp jitter std must be non-negative and finite, got {seconds} s")]
    InvalidJitter { seconds: f64 },
}

/// A point-to-point ranging link.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    distance_m: f64,
    propagation_speed: f64,
    timestamp_jitter_std: f64,
    rng_seed: u64,
    rng: ChaCha8Rng,
    noise: Normal<f64>,
}

impl ChannelModel {
    /// A link over `distance_m` at the speed of light.
    pub fn new(distance_m: f64, timestamp_jitter_std: f64, rng_seed: u64) -> Result<Self, ChannelError> {
        Self::with_speed(distance_m, SPEED_OF_LIGHT_M_PER_S, timestamp_jitter_std, rng_seed)
    }

    pub fn with_speed(
        distance_m: f64,
        propagation_speed: f64,
        timestamp_jitter_std: f64,
        rng_seed: u64,
    ) -> Result<Self, ChannelError> {
        if !(distance_m.is_finite() && distance_m >= 0.0) {
            return Err(ChannelError::InvalidDistance { meters: distance_m });
        }
        if !(propagation_speed.is_finite() && propagation_speed > 0.0) {
            return Err(ChannelError::InvalidSpeed {
                speed: propagation_speed,
            });
        }
        if !(timestamp_jitter_std.is_finite() && timestamp_jitter_std >= 0.0) {
            return Err(ChannelError::InvalidJitter {
                seconds: timestamp_jitter_std,
            });
        }
        let noise = Normal::new(0.0, timestamp_jitter_std)
            .map_err(|_| ChannelError::InvalidJitter {
                seconds: timestamp_jitter_std,
            })?;
        Ok(Self {
            distance_m,
            propagation_speed,
            timestamp_jitter_std,
            rng_seed,
            rng: ChaCha8Rng::seed_from_u64(rng_seed),
            noise,
        })
    }

    /// Same link parameters, fresh noise stream from `seed`.
    pub fn reseeded(&self, seed: u64) -> Self {
        let mut out = self.clone();
        out.rng_seed = seed;
        out.rng = ChaCha8Rng::seed_from_u64(seed);
        out
    }

    #[inline]
    pub fn distance_m(&self) -> f64 {
        self.distance_m
    }

    #[inline]
    pub fn propagation_speed(&self) -> f64 {
        self.propagation_speed
    }

    #[inline]
    pub fn timestamp_jitter_std(&self) -> f64 {
        self.timestamp_jitter_std
    }

    #[inline]
    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    /// One-way time of flight, seconds. Exact: `distance / speed`.
    #[inline]
    pub fn propagation_delay(&self) -> f64 {
        self.distance_m / self.propagation_speed
    }

    /// The instant a counter records for a true instant: input plus one
    /// Gaussian draw. With zero jitter the draw is still consumed (keeping
    /// streams aligned across configurations) and the input returns exactly.
    pub fn jittered_instant(&mut self, true_instant: f64) -> f64 {
        true_instant + self.noise.sample(&mut self.rng)
    }

    /// Converts a time-of-flight estimate back to meters at this channel's
    /// propagation speed. Inverse of `propagation_delay` up to f64 rounding.
    #[inline]
    pub fn tof_to_distance(&self, tof_s: f64) -> f64 {
        tof_s * self.propagation_speed
    }
}
