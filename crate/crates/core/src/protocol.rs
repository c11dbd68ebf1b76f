//! Two-way ranging message algebra.
//!
//! Three estimator families over one exchange of timestamps:
//!
//! * plain two-way ranging (TWR):
//!   `ToF = ((t4 - t1) - (t3 - t2)) / 2`
//! * symmetric double-sided TWR (SDS-TWR), which adds a second round trip in
//!   the opposite direction so reply-delay drift cancels to first order:
//!   `ToF = ((t4 - t1) - (t3 - t2) + (t6 - t3) - (t5 - t4)) / 4`
//! * SDS-TWR with multiple acknowledgments (SDS-TWR-MA): one START followed by
//!   `2k` alternating acknowledgments; every window of three consecutive
//!   messages forms one SDS-shaped round, adjacent rounds share their boundary
//!   message, and the estimate is the mean of the `k` rounds.
//!
//! The initiator owns t1, t4, t5 (departure, reply arrival, second departure);
//! the responder owns t2, t3, t6. All differences are taken modulo the 40-bit
//! counter.

use crate::clock::{tick_diff, TickResolution, Timestamp, TIMESTAMP_MODULUS};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Which node a stamp was recorded on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeRole {
    Initiator,
    Responder,
}

/// A counter reading labeled with the node that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OwnedStamp {
    pub stamp: Timestamp,
    pub owner: NodeRole,
}

/// Stamp labels in protocol order; slot `i` of the exchange is `t(i+1)`.
pub const STAMP_LABELS: [&str; 6] = ["t1", "t2", "t3", "t4", "t5", "t6"];

/// Who must own each of t1..t6.
const SLOT_OWNERS: [NodeRole; 6] = [
    NodeRole::Initiator,
    NodeRole::Responder,
    NodeRole::Responder,
    NodeRole::Initiator,
    NodeRole::Initiator,
    NodeRole::Responder,
];

/// Forward-step window for ordering checks: a same-owner step is treated as
/// forward in time iff its wrapped difference stays below half the counter
/// range. Larger differences mean the "later" stamp actually precedes the
/// earlier one (a genuine wrap mid-exchange still passes, since exchanges are
/// far shorter than half the wrap horizon).
const FORWARD_WINDOW: u64 = TIMESTAMP_MODULUS / 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("unexpected {0} for this protocol")]
    Unexpected(&'static str),
    #[error("{label} owned by {actual:?}, expected {expected:?}")]
    WrongOwner {
        label: &'static str,
        expected: NodeRole,
        actual: NodeRole,
    },
    #[error("ordering violation: {later} precedes {earlier} on the {owner:?} clock")]
    OutOfOrder {
        earlier: &'static str,
        later: &'static str,
        owner: NodeRole,
    },
    #[error("acknowledgment chain too short: {got} stamps cannot form a ranging round (need {need})")]
    ChainTooShort { need: usize, got: usize },
    #[error("acknowledgment chain of {got} stamps does not split into whole rounds")]
    ChainShape { got: usize },
    #[error("acknowledgment chain holds {got} stamps but the protocol requires {need}")]
    ChainLength { need: usize, got: usize },
    #[error("chain stamp {index} owned by {actual:?}, expected {expected:?}")]
    ChainOwner {
        index: usize,
        expected: NodeRole,
        actual: NodeRole,
    },
    #[error("chain ordering violation at stamp {index} on the {owner:?} clock")]
    ChainOutOfOrder { index: usize, owner: NodeRole },
    #[error("multiple-acknowledgment round count must be at least 1")]
    ZeroRounds,
    #[error("reply delay must be non-negative and finite, got {seconds} s")]
    InvalidDelay { seconds: f64 },
}

// ──────────────────────────── protocol kinds ────────────────────────────

/// The ranging protocol run over an exchange.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    Twr,
    SdsTwr,
    /// SDS-TWR with `k ≥ 1` averaged rounds sharing boundary messages.
    SdsTwrMa(u32),
}

impl ProtocolKind {
    /// Messages on the air: START plus the acknowledgments.
    pub fn message_count(self) -> usize {
        match self {
            ProtocolKind::Twr => 2,
            ProtocolKind::SdsTwr => 3,
            ProtocolKind::SdsTwrMa(k) => 2 * k as usize + 1,
        }
    }

    /// Counter readings the exchange collects (two per message).
    pub fn stamp_count(self) -> usize {
        2 * self.message_count()
    }

    pub fn rounds(self) -> u32 {
        match self {
            ProtocolKind::Twr | ProtocolKind::SdsTwr => 1,
            ProtocolKind::SdsTwrMa(k) => k,
        }
    }

    pub fn validate(self) -> Result<(), ProtocolError> {
        match self {
            ProtocolKind::SdsTwrMa(0) => Err(ProtocolError::ZeroRounds),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtocolKind::Twr => write!(f, "twr"),
            ProtocolKind::SdsTwr => write!(f, "sds-twr"),
            ProtocolKind::SdsTwrMa(k) => write!(f, "sds-twr-ma:{k}"),
        }
    }
}

impl FromStr for ProtocolKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "twr" => Ok(ProtocolKind::Twr),
            "sds-twr" => Ok(ProtocolKind::SdsTwr),
            _ => {
                if let Some(k) = s.strip_prefix("sds-twr-ma:") {
                    let k: u32 = k
                        .parse()
                        .map_err(|_| format!("invalid round count in {s:?}"))?;
                    if k == 0 {
                        return Err("round count must be at least 1".into());
                    }
                    Ok(ProtocolKind::SdsTwrMa(k))
                } else {
                    Err(format!(
                        "unknown protocol {s:?} (expected twr, sds-twr, or sds-twr-ma:K)"
                    ))
                }
            }
        }
    }
}

// ──────────────────────────── reply delays ────────────────────────────

/// Artificial turnaround delays inserted before acknowledgments.
///
/// `delay_b` is the responder's wait before answering (between t2 and t3);
/// `delay_a` is the initiator's wait before its follow-on acknowledgments
/// (between t4 and t5, and so on in multi-round chains). Zero means "no
/// artificial delay": the node turns around in its minimum processing time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplyDelayPolicy {
    delay_b: f64,
    delay_a: f64,
}

impl ReplyDelayPolicy {
    pub fn new(delay_b: f64, delay_a: f64) -> Result<Self, ProtocolError> {
        for d in [delay_b, delay_a] {
            if !(d.is_finite() && d >= 0.0) {
                // reuse the chain-shape error space? delays deserve their own
                return Err(ProtocolError::InvalidDelay { seconds: d });
            }
        }
        Ok(Self { delay_b, delay_a })
    }

    /// Both nodes wait the same artificial delay.
    pub fn symmetric(delay: f64) -> Result<Self, ProtocolError> {
        Self::new(delay, delay)
    }

    /// No artificial delays; turnarounds fall back to processing time.
    pub fn none() -> Self {
        Self {
            delay_b: 0.0,
            delay_a: 0.0,
        }
    }

    #[inline]
    pub fn delay_b(&self) -> f64 {
        self.delay_b
    }

    #[inline]
    pub fn delay_a(&self) -> f64 {
        self.delay_a
    }
}

// ──────────────────────────── the exchange ────────────────────────────

/// The timestamps collected by one protocol run.
///
/// TWR fills exactly t1..t4, SDS-TWR exactly t1..t6. Multi-acknowledgment
/// runs additionally carry the flat stamp chain (departure and arrival of
/// every message, in on-air order); its first six entries coincide with
/// t1..t6.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RangingExchange {
    slots: [Option<OwnedStamp>; 6],
    ma_chain: Vec<OwnedStamp>,
}

/// Owner of chain position `p`: even messages travel initiator → responder,
/// odd messages the other way; each message contributes its departure stamp
/// (sender) then its arrival stamp (receiver).
fn chain_owner(position: usize) -> NodeRole {
    let message = position / 2;
    let departure = position % 2 == 0;
    match (message % 2 == 0, departure) {
        (true, true) | (false, false) => NodeRole::Initiator,
        (true, false) | (false, true) => NodeRole::Responder,
    }
}

impl RangingExchange {
    pub fn new() -> Self {
        Self::default()
    }

    /// A plain TWR exchange from its four stamps.
    pub fn twr(t1: Timestamp, t2: Timestamp, t3: Timestamp, t4: Timestamp) -> Self {
        let mut ex = Self::new();
        for (i, ts) in [t1, t2, t3, t4].into_iter().enumerate() {
            ex.set_slot(i + 1, ts);
        }
        ex
    }

    /// A symmetric double-sided exchange from its six stamps.
    pub fn sds_twr(stamps: [Timestamp; 6]) -> Self {
        let mut ex = Self::new();
        for (i, ts) in stamps.into_iter().enumerate() {
            ex.set_slot(i + 1, ts);
        }
        ex
    }

    /// A multi-acknowledgment exchange from the flat stamp chain (on-air
    /// order, owners implied by position). The first six entries also populate
    /// t1..t6 when present.
    pub fn sds_twr_ma(chain: Vec<Timestamp>) -> Self {
        let mut ex = Self::new();
        for (i, ts) in chain.iter().enumerate() {
            if i < 6 {
                ex.set_slot(i + 1, *ts);
            }
            ex.ma_chain.push(OwnedStamp {
                stamp: *ts,
                owner: chain_owner(i),
            });
        }
        ex
    }

    /// Stores `t{slot}` with its protocol-assigned owner. Panics on a slot
    /// outside 1..=6.
    pub fn set_slot(&mut self, slot: usize, stamp: Timestamp) {
        assert!((1..=6).contains(&slot), "slot {slot} outside t1..t6");
        self.slots[slot - 1] = Some(OwnedStamp {
            stamp,
            owner: SLOT_OWNERS[slot - 1],
        });
    }

    /// Overrides a slot with an explicit owner (for building malformed
    /// exchanges in validation tests and tooling).
    pub fn set_slot_with_owner(&mut self, slot: usize, stamp: Timestamp, owner: NodeRole) {
        assert!((1..=6).contains(&slot), "slot {slot} outside t1..t6");
        self.slots[slot - 1] = Some(OwnedStamp { stamp, owner });
    }

    pub fn slot(&self, slot: usize) -> Option<OwnedStamp> {
        assert!((1..=6).contains(&slot), "slot {slot} outside t1..t6");
        self.slots[slot - 1]
    }

    /// Appends one stamp to the multi-acknowledgment chain with its
    /// position-implied owner.
    pub fn push_chain_stamp(&mut self, stamp: Timestamp) {
        let position = self.ma_chain.len();
        self.ma_chain.push(OwnedStamp {
            stamp,
            owner: chain_owner(position),
        });
    }

    pub fn ma_chain(&self) -> &[OwnedStamp] {
        &self.ma_chain
    }

    /// Rounds the chain can yield: windows of six stamps advancing by four.
    pub fn ma_round_count(&self) -> usize {
        if self.ma_chain.len() < 6 {
            0
        } else {
            (self.ma_chain.len() - 2) / 4
        }
    }

    /// How many of t1..t6 are populated.
    pub fn used_count(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    fn require(&self, slot: usize) -> Result<Timestamp, ProtocolError> {
        self.slots[slot - 1]
            .map(|s| s.stamp)
            .ok_or(ProtocolError::Missing(STAMP_LABELS[slot - 1]))
    }
}

// ──────────────────────────── estimators ────────────────────────────

/// Plain two-way ranging: `((t4 - t1) - (t3 - t2)) / 2`, in seconds.
///
/// Negative results are possible with drifting clocks and are returned as-is.
pub fn tof_twr(ex: &RangingExchange, resolution: TickResolution) -> Result<f64, ProtocolError> {
    let t1 = ex.require(1)?;
    let t2 = ex.require(2)?;
    let t3 = ex.require(3)?;
    let t4 = ex.require(4)?;
    let round_trip = tick_diff(t4, t1) as i64;
    let reply = tick_diff(t3, t2) as i64;
    Ok(resolution.ticks_to_seconds(round_trip - reply) / 2.0)
}

/// Symmetric double-sided ranging:
/// `((t4 - t1) - (t3 - t2) + (t6 - t3) - (t5 - t4)) / 4`, in seconds.
pub fn tof_sds_twr(ex: &RangingExchange, resolution: TickResolution) -> Result<f64, ProtocolError> {
    let t1 = ex.require(1)?;
    let t2 = ex.require(2)?;
    let t3 = ex.require(3)?;
    let t4 = ex.require(4)?;
    let t5 = ex.require(5)?;
    let t6 = ex.require(6)?;
    let first = tick_diff(t4, t1) as i64 - tick_diff(t3, t2) as i64;
    let second = tick_diff(t6, t3) as i64 - tick_diff(t5, t4) as i64;
    Ok(resolution.ticks_to_seconds(first + second) / 4.0)
}

/// Multi-acknowledgment ranging: the mean of the per-round SDS estimates over
/// the stamp chain. With a six-stamp chain (one round) this is identical to
/// [`tof_sds_twr`] on the same stamps.
pub fn tof_sds_twr_ma(
    ex: &RangingExchange,
    resolution: TickResolution,
) -> Result<f64, ProtocolError> {
    let chain = ex.ma_chain();
    if chain.len() < 6 {
        return Err(ProtocolError::ChainTooShort {
            need: 6,
            got: chain.len(),
        });
    }
    if (chain.len() - 2) % 4 != 0 {
        return Err(ProtocolError::ChainShape { got: chain.len() });
    }
    let rounds = (chain.len() - 2) / 4;
    let mut sum = 0.0;
    for round in 0..rounds {
        let w = &chain[4 * round..4 * round + 6];
        let first = tick_diff(w[3].stamp, w[0].stamp) as i64 - tick_diff(w[2].stamp, w[1].stamp) as i64;
        let second = tick_diff(w[5].stamp, w[2].stamp) as i64 - tick_diff(w[4].stamp, w[3].stamp) as i64;
        sum += resolution.ticks_to_seconds(first + second) / 4.0;
    }
    Ok(sum / rounds as f64)
}

// ──────────────────────────── validation ────────────────────────────

/// Checks presence, ownership, and per-owner ordering for the given protocol,
/// returning the first violated invariant.
pub fn validate_exchange(ex: &RangingExchange, kind: ProtocolKind) -> Result<(), ProtocolError> {
    kind.validate()?;
    match kind {
        ProtocolKind::Twr => {
            check_slots(ex, &[1, 2, 3, 4], &[5, 6])?;
            check_slot_order(ex, &[1, 4], NodeRole::Initiator)?;
            check_slot_order(ex, &[2, 3], NodeRole::Responder)
        }
        ProtocolKind::SdsTwr => {
            check_slots(ex, &[1, 2, 3, 4, 5, 6], &[])?;
            check_slot_order(ex, &[1, 4, 5], NodeRole::Initiator)?;
            check_slot_order(ex, &[2, 3, 6], NodeRole::Responder)
        }
        ProtocolKind::SdsTwrMa(k) => {
            let need = kind.stamp_count();
            let got = ex.ma_chain.len();
            if got < 6 {
                return Err(ProtocolError::ChainTooShort { need, got });
            }
            if got != need {
                return Err(ProtocolError::ChainLength { need, got });
            }
            debug_assert_eq!(ex.ma_round_count(), k as usize);
            check_chain(ex)
        }
    }
}

fn check_slots(
    ex: &RangingExchange,
    required: &[usize],
    forbidden: &[usize],
) -> Result<(), ProtocolError> {
    for &slot in required {
        let owned = ex.slots[slot - 1].ok_or(ProtocolError::Missing(STAMP_LABELS[slot - 1]))?;
        let expected = SLOT_OWNERS[slot - 1];
        if owned.owner != expected {
            return Err(ProtocolError::WrongOwner {
                label: STAMP_LABELS[slot - 1],
                expected,
                actual: owned.owner,
            });
        }
    }
    for &slot in forbidden {
        if ex.slots[slot - 1].is_some() {
            return Err(ProtocolError::Unexpected(STAMP_LABELS[slot - 1]));
        }
    }
    Ok(())
}

fn check_slot_order(
    ex: &RangingExchange,
    slots: &[usize],
    owner: NodeRole,
) -> Result<(), ProtocolError> {
    for pair in slots.windows(2) {
        let earlier = ex.require(pair[0])?;
        let later = ex.require(pair[1])?;
        if tick_diff(later, earlier) >= FORWARD_WINDOW {
            return Err(ProtocolError::OutOfOrder {
                earlier: STAMP_LABELS[pair[0] - 1],
                later: STAMP_LABELS[pair[1] - 1],
                owner,
            });
        }
    }
    Ok(())
}

fn check_chain(ex: &RangingExchange) -> Result<(), ProtocolError> {
    let mut last_seen: [Option<(usize, Timestamp)>; 2] = [None, None];
    for (index, owned) in ex.ma_chain.iter().enumerate() {
        let expected = chain_owner(index);
        if owned.owner != expected {
            return Err(ProtocolError::ChainOwner {
                index,
                expected,
                actual: owned.owner,
            });
        }
        let which = match owned.owner {
            NodeRole::Initiator => 0,
            NodeRole::Responder => 1,
        };
        if let Some((_, prev)) = last_seen[which] {
            if tick_diff(owned.stamp, prev) >= FORWARD_WINDOW {
                return Err(ProtocolError::ChainOutOfOrder {
                    index,
                    owner: owned.owner,
                });
            }
        }
        last_seen[which] = Some((index, owned.stamp));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::ClockModel;

    const C: f64 = crate::channel::SPEED_OF_LIGHT_M_PER_S;

    fn res() -> TickResolution {
        TickResolution::default()
    }

    /// Stamps a full SDS-shaped event sequence with the given clocks; returns
    /// (t1..t6). Times: start, +tof, +delay_b, +tof, +delay_a, +tof.
    fn stamp_exchange(
        a: &ClockModel,
        b: &ClockModel,
        start: f64,
        tof: f64,
        delay_b: f64,
        delay_a: f64,
    ) -> [Timestamp; 6] {
        let r = res();
        let e1 = start;
        let e2 = e1 + tof;
        let e3 = e2 + delay_b;
        let e4 = e3 + tof;
        let e5 = e4 + delay_a;
        let e6 = e5 + tof;
        [
            a.local_timestamp(e1, r),
            b.local_timestamp(e2, r),
            b.local_timestamp(e3, r),
            a.local_timestamp(e4, r),
            a.local_timestamp(e5, r),
            b.local_timestamp(e6, r),
        ]
    }

    #[test]
    fn twr_pure_tick_algebra() {
        // t4 - t1 = 2X ticks and t3 = t2 give ToF = X ticks exactly
        let x = 12_345u64;
        let ex = RangingExchange::twr(
            Timestamp::new(100),
            Timestamp::new(50),
            Timestamp::new(50),
            Timestamp::new(100 + 2 * x),
        );
        let tof = tof_twr(&ex, res()).unwrap();
        assert_eq!(tof, res().ticks_to_seconds(x as i64));
    }

    #[test]
    fn twr_exact_with_matched_clocks() {
        let a = ClockModel::ideal();
        let b = ClockModel::ideal();
        let tof = 2.0 / C;
        for delay in [100e-6, 1e-3, 10e-3, 21e-3] {
            let s = stamp_exchange(&a, &b, 0.125, tof, delay, delay);
            let ex = RangingExchange::twr(s[0], s[1], s[2], s[3]);
            let est = tof_twr(&ex, res()).unwrap();
            assert!(
                (est - tof).abs() < res().seconds_per_tick(),
                "delay {delay}: estimate {est} vs true {tof}"
            );
        }
    }

    #[test]
    fn twr_drift_bias_matches_closed_form() {
        // responder clock +20 ppm, 1 ms reply: the reply span is over-counted,
        // so the estimate is short by c * 20e-6 * 1e-3 / 2 ≈ 2.998 m
        let a = ClockModel::ideal();
        let b = ClockModel::new(20.0).unwrap();
        let tof = 2.0 / C;
        let s = stamp_exchange(&a, &b, 0.125, tof, 1e-3, 1e-3);
        let ex = RangingExchange::twr(s[0], s[1], s[2], s[3]);
        let est = tof_twr(&ex, res()).unwrap();
        let err_m = (est - tof) * C;
        let expected = -C * 20e-6 * 1e-3 / 2.0;
        assert!((est - tof + 10e-9).abs() < 2.0 * res().seconds_per_tick());
        assert!(
            (err_m - expected).abs() < 0.005,
            "distance error {err_m} vs closed form {expected}"
        );
    }

    #[test]
    fn twr_bias_independent_of_delay_with_matched_drift() {
        // both clocks equally wrong: no reply-delay bias, only the tiny
        // common-mode scale error on the flight time itself
        let a = ClockModel::new(100.0).unwrap();
        let b = ClockModel::new(100.0).unwrap();
        let tof = 5.5 / C;
        let mut estimates = Vec::new();
        for delay in [1e-3, 100e-3, 1.0, 10.0, 16.0] {
            let s = stamp_exchange(&a, &b, 0.125, tof, delay, delay);
            let ex = RangingExchange::twr(s[0], s[1], s[2], s[3]);
            let est = tof_twr(&ex, res()).unwrap();
            let bound = res().seconds_per_tick() + tof * 100.0 * 1e-6;
            assert!(
                (est - tof).abs() <= bound,
                "delay {delay}: |{:e}| > {bound:e}",
                est - tof
            );
            estimates.push(est);
        }
        let spread = estimates.iter().cloned().fold(f64::MIN, f64::max)
            - estimates.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 2.0 * res().seconds_per_tick(), "delay-dependent spread {spread}");
    }

    #[test]
    fn sds_exact_and_degenerate() {
        let a = ClockModel::ideal();
        let b = ClockModel::ideal();
        let tof = 2.0 / C;
        let s = stamp_exchange(&a, &b, 0.125, tof, 1e-3, 1e-3);
        let est = tof_sds_twr(&RangingExchange::sds_twr(s), res()).unwrap();
        assert!((est - tof).abs() < res().seconds_per_tick());

        // all six stamps equal encodes a zero-ToF, zero-delay exchange
        let z = Timestamp::new(1234);
        let zero = tof_sds_twr(&RangingExchange::sds_twr([z; 6]), res()).unwrap();
        assert_eq!(zero, 0.0);
    }

    #[test]
    fn sds_symmetric_delays_cancel_drift() {
        // with equal reply delays the first-order drift terms cancel, so
        // sweeping the responder offset barely moves the estimate
        let tof = 2.0 / C;
        let a = ClockModel::ideal();
        let mut estimates = Vec::new();
        for ppm in [-20.0, -10.0, 0.0, 10.0, 20.0] {
            let b = ClockModel::new(ppm).unwrap();
            let s = stamp_exchange(&a, &b, 0.125, tof, 5e-3, 5e-3);
            estimates.push(tof_sds_twr(&RangingExchange::sds_twr(s), res()).unwrap());
        }
        let spread = estimates.iter().cloned().fold(f64::MIN, f64::max)
            - estimates.iter().cloned().fold(f64::MAX, f64::min);
        assert!(
            spread * C < res().seconds_per_tick() * C,
            "drift sweep moved the SDS estimate by {} m",
            spread * C
        );
    }

    #[test]
    fn ma_single_round_equals_sds() {
        let a = ClockModel::new(-7.0).unwrap();
        let b = ClockModel::new(13.0).unwrap();
        let s = stamp_exchange(&a, &b, 0.125, 2.0 / C, 2e-3, 3e-3);
        let sds = tof_sds_twr(&RangingExchange::sds_twr(s), res()).unwrap();
        let ma = tof_sds_twr_ma(&RangingExchange::sds_twr_ma(s.to_vec()), res()).unwrap();
        assert_eq!(sds.to_bits(), ma.to_bits(), "one-round chain must match SDS");
    }

    #[test]
    fn ma_multi_round_chain_stays_exact() {
        // four rounds, matched clocks: the averaged estimate keeps the
        // single-round exactness bound
        let a = ClockModel::ideal();
        let b = ClockModel::ideal();
        let r = res();
        let tof = 3.5 / C;
        let (delay_b, delay_a) = (2e-3, 1e-3);
        let k = 4;
        let mut chain = Vec::new();
        let mut t = 0.125;
        for message in 0..(2 * k + 1) {
            let sender_is_a = message % 2 == 0;
            let (dep, arr) = if sender_is_a { (&a, &b) } else { (&b, &a) };
            chain.push(dep.local_timestamp(t, r));
            chain.push(arr.local_timestamp(t + tof, r));
            t += tof;
            if message < 2 * k {
                t += if message % 2 == 0 { delay_b } else { delay_a };
            }
        }
        let ex = RangingExchange::sds_twr_ma(chain);
        assert_eq!(ex.ma_round_count(), k);
        let est = tof_sds_twr_ma(&ex, r).unwrap();
        assert!((est - tof).abs() < r.seconds_per_tick());
    }

    #[test]
    fn ma_rejects_short_or_ragged_chains() {
        let z = Timestamp::new(0);
        let short = RangingExchange::sds_twr_ma(vec![z; 4]);
        assert!(matches!(
            tof_sds_twr_ma(&short, res()),
            Err(ProtocolError::ChainTooShort { got: 4, .. })
        ));
        let ragged = RangingExchange::sds_twr_ma(vec![z; 8]);
        assert!(matches!(
            tof_sds_twr_ma(&ragged, res()),
            Err(ProtocolError::ChainShape { got: 8 })
        ));
    }

    #[test]
    fn validation_catches_missing_and_misordered_stamps() {
        let a = ClockModel::ideal();
        let b = ClockModel::ideal();
        let s = stamp_exchange(&a, &b, 0.125, 2.0 / C, 1e-3, 1e-3);

        let good = RangingExchange::twr(s[0], s[1], s[2], s[3]);
        assert!(validate_exchange(&good, ProtocolKind::Twr).is_ok());
        let good_sds = RangingExchange::sds_twr(s);
        assert!(validate_exchange(&good_sds, ProtocolKind::SdsTwr).is_ok());

        let mut missing = good.clone();
        missing.slots[2] = None;
        assert_eq!(
            validate_exchange(&missing, ProtocolKind::Twr),
            Err(ProtocolError::Missing("t3"))
        );

        // t3 before t2 on the responder clock, nowhere near a wrap
        let misordered = RangingExchange::twr(
            Timestamp::new(1000),
            Timestamp::new(5000),
            Timestamp::new(4000),
            Timestamp::new(9000),
        );
        assert!(matches!(
            validate_exchange(&misordered, ProtocolKind::Twr),
            Err(ProtocolError::OutOfOrder {
                earlier: "t2",
                later: "t3",
                ..
            })
        ));

        // a genuine wrap between t1 and t4 still validates
        let wrapped = RangingExchange::twr(
            Timestamp::new(TIMESTAMP_MODULUS - 10),
            Timestamp::new(500),
            Timestamp::new(600),
            Timestamp::new(1200),
        );
        assert!(validate_exchange(&wrapped, ProtocolKind::Twr).is_ok());

        // TWR must not carry double-sided stamps
        assert!(matches!(
            validate_exchange(&good_sds, ProtocolKind::Twr),
            Err(ProtocolError::Unexpected("t5"))
        ));

        // wrong owner
        let mut stolen = good_sds.clone();
        stolen.set_slot_with_owner(3, s[2], NodeRole::Initiator);
        assert!(matches!(
            validate_exchange(&stolen, ProtocolKind::SdsTwr),
            Err(ProtocolError::WrongOwner { label: "t3", .. })
        ));
    }

    #[test]
    fn validation_checks_chain_length_against_rounds() {
        let z = Timestamp::new(0);
        let two_rounds = RangingExchange::sds_twr_ma(vec![z; 10]);
        assert!(validate_exchange(&two_rounds, ProtocolKind::SdsTwrMa(2)).is_ok());
        assert!(matches!(
            validate_exchange(&two_rounds, ProtocolKind::SdsTwrMa(3)),
            Err(ProtocolError::ChainLength { need: 14, got: 10 })
        ));
        assert_eq!(
            validate_exchange(&two_rounds, ProtocolKind::SdsTwrMa(0)),
            Err(ProtocolError::ZeroRounds)
        );
    }

    #[test]
    fn protocol_kind_parse_and_display() {
        for text in ["twr", "sds-twr", "sds-twr-ma:16"] {
            let kind: ProtocolKind = text.parse().unwrap();
            assert_eq!(kind.to_string(), text);
        }
        assert_eq!("sds-twr-ma:1".parse::<ProtocolKind>().unwrap().stamp_count(), 6);
        assert!("sds-twr-ma:0".parse::<ProtocolKind>().is_err());
        assert!("tdoa".parse::<ProtocolKind>().is_err());
    }

    #[test]
    fn reply_delay_policy_validation() {
        assert!(ReplyDelayPolicy::new(1e-3, 2e-3).is_ok());
        assert!(ReplyDelayPolicy::new(-1e-3, 0.0).is_err());
        assert!(ReplyDelayPolicy::new(0.0, f64::INFINITY).is_err());
        let sym = ReplyDelayPolicy::symmetric(5e-3).unwrap();
        assert_eq!(sym.delay_b(), sym.delay_a());
    }
}
