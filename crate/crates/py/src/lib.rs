//! Python bindings for the two-way ranging simulator.
//!
//! Exposes the clock, channel, exchange, session, and sweep layers with the
//! same semantics as the Rust crate. Timestamps cross the boundary as plain
//! integers (ticks), protocols and correction selections as strings, and
//! summary rows as dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rangesim_core as rc;
use std::str::FromStr;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn resolution_from(seconds_per_tick: Option<f64>) -> PyResult<rc::TickResolution> {
    match seconds_per_tick {
        None => Ok(rc::TickResolution::default()),
        Some(s) => rc::TickResolution::new(s).map_err(value_err),
    }
}

fn protocol_from(name: &str) -> PyResult<rc::ProtocolKind> {
    rc::ProtocolKind::from_str(name).map_err(value_err)
}

fn role_label(role: rc::NodeRole) -> &'static str {
    match role {
        rc::NodeRole::Initiator => "initiator",
        rc::NodeRole::Responder => "responder",
    }
}

/// A node's free-running counter: nominal ppm offset, optional warming with
/// accumulated listening time, and a phase origin.
#[pyclass(module = "rangesim", from_py_object)]
#[derive(Clone)]
struct ClockModel {
    inner: rc::ClockModel,
}

#[pymethods]
impl ClockModel {
    #[new]
    #[pyo3(signature = (nominal_offset_ppm=0.0, temp_coeff_ppm_per_s=0.0, phase_origin_s=0.0))]
    fn new(
        nominal_offset_ppm: f64,
        temp_coeff_ppm_per_s: f64,
        phase_origin_s: f64,
    ) -> PyResult<Self> {
        let inner = rc::ClockModel::new(nominal_offset_ppm)
            .map_err(value_err)?
            .with_temperature_coeff(temp_coeff_ppm_per_s)
            .with_phase_origin(phase_origin_s);
        Ok(Self { inner })
    }

    #[staticmethod]
    fn ideal() -> Self {
        Self {
            inner: rc::ClockModel::ideal(),
        }
    }

    #[getter]
    fn nominal_offset_ppm(&self) -> f64 {
        self.inner.nominal_offset_ppm()
    }

    #[getter]
    fn temp_coeff_ppm_per_s(&self) -> f64 {
        self.inner.temperature_coeff_ppm_per_s_rx()
    }

    #[getter]
    fn accumulated_rx_time(&self) -> f64 {
        self.inner.accumulated_rx_time()
    }

    #[getter]
    fn phase_origin_s(&self) -> f64 {
        self.inner.phase_origin()
    }

    fn effective_offset_ppm(&self) -> f64 {
        self.inner.effective_offset_ppm()
    }

    /// Returns a copy whose rate reflects `seconds` more listening time.
    fn accumulate_rx(&self, seconds: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.accumulate_rx(seconds).map_err(value_err)?,
        })
    }

    /// Ticks this clock shows at a true-time instant.
    #[pyo3(signature = (true_time_s, seconds_per_tick=None))]
    fn local_timestamp(&self, true_time_s: f64, seconds_per_tick: Option<f64>) -> PyResult<u64> {
        let res = resolution_from(seconds_per_tick)?;
        Ok(self.inner.local_timestamp(true_time_s, res).ticks())
    }

    fn __repr__(&self) -> String {
        format!(
            "ClockModel(nominal_offset_ppm={}, temp_coeff_ppm_per_s={}, phase_origin_s={})",
            self.inner.nominal_offset_ppm(),
            self.inner.temperature_coeff_ppm_per_s_rx(),
            self.inner.phase_origin()
        )
    }
}

/// Line-of-sight link: distance, propagation speed, per-stamp jitter, and its
/// own deterministic noise stream.
#[pyclass(module = "rangesim", from_py_object)]
#[derive(Clone)]
struct ChannelModel {
    inner: rc::ChannelModel,
}

#[pymethods]
impl ChannelModel {
    #[new]
    #[pyo3(signature = (distance_m, timestamp_jitter_std=0.0, rng_seed=0, propagation_speed=None))]
    fn new(
        distance_m: f64,
        timestamp_jitter_std: f64,
        rng_seed: u64,
        propagation_speed: Option<f64>,
    ) -> PyResult<Self> {
        let speed = propagation_speed.unwrap_or(rc::SPEED_OF_LIGHT_M_PER_S);
        let inner = rc::ChannelModel::with_speed(distance_m, speed, timestamp_jitter_std, rng_seed)
            .map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn distance_m(&self) -> f64 {
        self.inner.distance_m()
    }

    #[getter]
    fn propagation_speed(&self) -> f64 {
        self.inner.propagation_speed()
    }

    #[getter]
    fn timestamp_jitter_std(&self) -> f64 {
        self.inner.timestamp_jitter_std()
    }

    #[getter]
    fn rng_seed(&self) -> u64 {
        self.inner.rng_seed()
    }

    fn propagation_delay(&self) -> f64 {
        self.inner.propagation_delay()
    }

    /// A true instant as the receiver hardware records it (draws noise).
    fn jittered_instant(&mut self, true_instant: f64) -> f64 {
        self.inner.jittered_instant(true_instant)
    }

    fn tof_to_distance(&self, tof_s: f64) -> f64 {
        self.inner.tof_to_distance(tof_s)
    }

    /// Same link, fresh noise stream.
    fn reseeded(&self, seed: u64) -> Self {
        Self {
            inner: self.inner.reseeded(seed),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "ChannelModel(distance_m={}, timestamp_jitter_std={}, rng_seed={})",
            self.inner.distance_m(),
            self.inner.timestamp_jitter_std(),
            self.inner.rng_seed()
        )
    }
}

/// One ranging endpoint with a fixed session role.
#[pyclass(module = "rangesim", skip_from_py_object)]
#[derive(Clone)]
struct NodeSim {
    inner: rc::NodeSim,
}

#[pymethods]
impl NodeSim {
    #[staticmethod]
    fn initiator(id: &str, clock: ClockModel) -> Self {
        Self {
            inner: rc::NodeSim::initiator(id, clock.inner),
        }
    }

    #[staticmethod]
    fn responder(id: &str, clock: ClockModel) -> Self {
        Self {
            inner: rc::NodeSim::responder(id, clock.inner),
        }
    }

    #[getter]
    fn id(&self) -> String {
        self.inner.id.clone()
    }

    #[getter]
    fn role(&self) -> &'static str {
        role_label(self.inner.role)
    }

    #[getter]
    fn clock(&self) -> ClockModel {
        ClockModel {
            inner: self.inner.clock,
        }
    }

    fn __repr__(&self) -> String {
        format!("NodeSim(id={:?}, role={:?})", self.inner.id, self.role())
    }
}

/// Everything one session needs besides the two nodes.
#[pyclass(module = "rangesim", skip_from_py_object)]
#[derive(Clone)]
struct SessionConfig {
    inner: rc::SessionConfig,
}

#[pymethods]
impl SessionConfig {
    #[new]
    #[pyo3(signature = (
        channel,
        protocol = "twr",
        delay_b_s = 0.0,
        delay_a_s = None,
        session_start = 0.0,
        processing_time = rc::DEFAULT_PROCESSING_TIME_S,
        offset_noise_ppm = rc::DEFAULT_OFFSET_NOISE_PPM,
        inter_session_spacing = rc::DEFAULT_INTER_SESSION_SPACING_S,
        seconds_per_tick = None,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        channel: ChannelModel,
        protocol: &str,
        delay_b_s: f64,
        delay_a_s: Option<f64>,
        session_start: f64,
        processing_time: f64,
        offset_noise_ppm: f64,
        inter_session_spacing: f64,
        seconds_per_tick: Option<f64>,
    ) -> PyResult<Self> {
        let delays = rc::ReplyDelayPolicy::new(delay_b_s, delay_a_s.unwrap_or(delay_b_s))
            .map_err(value_err)?;
        let mut inner = rc::SessionConfig::new(protocol_from(protocol)?, channel.inner, delays);
        inner.session_start = session_start;
        inner.processing_time = processing_time;
        inner.offset_noise_ppm = offset_noise_ppm;
        inner.inter_session_spacing = inter_session_spacing;
        inner.resolution = resolution_from(seconds_per_tick)?;
        inner.validate().map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn protocol(&self) -> String {
        self.inner.protocol.to_string()
    }

    #[getter]
    fn planned_duration(&self) -> f64 {
        self.inner.planned_duration()
    }

    #[getter]
    fn session_start(&self) -> f64 {
        self.inner.session_start
    }

    #[getter]
    fn processing_time(&self) -> f64 {
        self.inner.processing_time
    }

    #[getter]
    fn offset_noise_ppm(&self) -> f64 {
        self.inner.offset_noise_ppm
    }
}

/// The stamp record one session produced.
#[pyclass(module = "rangesim", skip_from_py_object)]
#[derive(Clone)]
struct RangingExchange {
    inner: rc::RangingExchange,
}

#[pymethods]
impl RangingExchange {
    /// Plain two-way exchange from four tick readings.
    #[staticmethod]
    fn twr(t1: u64, t2: u64, t3: u64, t4: u64) -> Self {
        let t = |v| rc::Timestamp::new(v);
        Self {
            inner: rc::RangingExchange::twr(t(t1), t(t2), t(t3), t(t4)),
        }
    }

    /// Symmetric double-sided exchange from six tick readings.
    #[staticmethod]
    fn sds_twr(stamps: [u64; 6]) -> Self {
        Self {
            inner: rc::RangingExchange::sds_twr(stamps.map(rc::Timestamp::new)),
        }
    }

    /// Multi-acknowledgment chain (4k+2 tick readings, two per message).
    #[staticmethod]
    fn sds_twr_ma(chain: Vec<u64>) -> Self {
        Self {
            inner: rc::RangingExchange::sds_twr_ma(
                chain.into_iter().map(rc::Timestamp::new).collect(),
            ),
        }
    }

    /// `(ticks, owner)` of stamp t1..t6, or None if absent.
    fn slot(&self, slot: usize) -> PyResult<Option<(u64, &'static str)>> {
        if !(1..=6).contains(&slot) {
            return Err(value_err("slot must be within 1..=6"));
        }
        Ok(self
            .inner
            .slot(slot)
            .map(|o| (o.stamp.ticks(), role_label(o.owner))))
    }

    /// The acknowledgment chain as `(ticks, owner)` pairs.
    fn chain(&self) -> Vec<(u64, &'static str)> {
        self.inner
            .ma_chain()
            .iter()
            .map(|o| (o.stamp.ticks(), role_label(o.owner)))
            .collect()
    }

    #[getter]
    fn round_count(&self) -> usize {
        self.inner.ma_round_count()
    }
}

/// What one session produced.
#[pyclass(module = "rangesim", skip_from_py_object)]
#[derive(Clone)]
struct SessionResult {
    inner: rc::SessionResult,
}

#[pymethods]
impl SessionResult {
    #[getter]
    fn true_tof(&self) -> f64 {
        self.inner.true_tof
    }

    #[getter]
    fn raw_tof(&self) -> f64 {
        self.inner.raw_tof
    }

    #[getter]
    fn corrected_tof(&self) -> Option<f64> {
        self.inner.corrected_tof
    }

    #[getter]
    fn offset_ppm(&self) -> Option<f64> {
        self.inner.offset_used.map(|o| o.ppm)
    }

    #[getter]
    fn exchange(&self) -> RangingExchange {
        RangingExchange {
            inner: self.inner.exchange.clone(),
        }
    }

    /// Stamps t1..t6 as a dict `{label: ticks}`.
    fn stamps<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for slot in 1..=6 {
            if let Some(owned) = self.inner.exchange.slot(slot) {
                d.set_item(rc::STAMP_LABELS[slot - 1], owned.stamp.ticks())?;
            }
        }
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "SessionResult(true_tof={:e}, raw_tof={:e}, corrected_tof={:?})",
            self.inner.true_tof, self.inner.raw_tof, self.inner.corrected_tof
        )
    }
}

/// A measurement campaign description; defaults mirror the desk-scale
/// reference campaign (11 distances, 12 delays, 30 trials, both estimators).
#[pyclass(module = "rangesim", skip_from_py_object)]
#[derive(Clone)]
struct SweepSpec {
    inner: rc::SweepSpec,
}

#[pymethods]
impl SweepSpec {
    #[new]
    #[pyo3(signature = (
        protocol = "twr",
        distances_m = None,
        delays_s = None,
        trials = 30,
        drift_ppm_a = 0.0,
        drift_ppm_b = 0.0,
        temp_coeff_ppm_per_s = 0.0,
        jitter_std_s = 0.0,
        offset_noise_ppm = rc::DEFAULT_OFFSET_NOISE_PPM,
        processing_time = rc::DEFAULT_PROCESSING_TIME_S,
        inter_session_spacing = rc::DEFAULT_INTER_SESSION_SPACING_S,
        propagation_speed = None,
        seconds_per_tick = None,
        correction = "both",
        bias_m = 0.0,
        seed = 1,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        protocol: &str,
        distances_m: Option<Vec<f64>>,
        delays_s: Option<Vec<f64>>,
        trials: u32,
        drift_ppm_a: f64,
        drift_ppm_b: f64,
        temp_coeff_ppm_per_s: f64,
        jitter_std_s: f64,
        offset_noise_ppm: f64,
        processing_time: f64,
        inter_session_spacing: f64,
        propagation_speed: Option<f64>,
        seconds_per_tick: Option<f64>,
        correction: &str,
        bias_m: f64,
        seed: u64,
    ) -> PyResult<Self> {
        let defaults = rc::SweepSpec::default();
        let inner = rc::SweepSpec {
            protocol: protocol_from(protocol)?,
            distances_m: distances_m.unwrap_or(defaults.distances_m),
            delays_s: delays_s.unwrap_or(defaults.delays_s),
            trials,
            drift_ppm_a,
            drift_ppm_b,
            temp_coeff_ppm_per_s,
            jitter_std_s,
            offset_noise_ppm,
            processing_time,
            inter_session_spacing,
            propagation_speed: propagation_speed.unwrap_or(rc::SPEED_OF_LIGHT_M_PER_S),
            resolution: resolution_from(seconds_per_tick)?,
            correction: rc::CorrectionSelection::from_str(correction).map_err(value_err)?,
            bias_m,
            seed,
        };
        inner.validate().map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn distances_m(&self) -> Vec<f64> {
        self.inner.distances_m.clone()
    }

    #[getter]
    fn delays_s(&self) -> Vec<f64> {
        self.inner.delays_s.clone()
    }

    #[getter]
    fn trials(&self) -> u32 {
        self.inner.trials
    }

    #[getter]
    fn jitter_std_s(&self) -> f64 {
        self.inner.jitter_std_s
    }

    #[setter]
    fn set_jitter_std_s(&mut self, v: f64) {
        self.inner.jitter_std_s = v;
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[setter]
    fn set_seed(&mut self, v: u64) {
        self.inner.seed = v;
    }
}

/// A finished campaign: summary rows plus CSV rendering.
#[pyclass(module = "rangesim")]
struct SweepTable {
    inner: rc::SweepTable,
}

#[pymethods]
impl SweepTable {
    /// Rows as dicts, sorted by (distance, delay, correction).
    fn rows<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        let out = PyList::empty(py);
        for row in &self.inner.rows {
            let d = PyDict::new(py);
            d.set_item("distance_m", row.distance_m)?;
            d.set_item("delay_s", row.delay_s)?;
            d.set_item("correction", row.correction.to_string())?;
            d.set_item("protocol", row.protocol.to_string())?;
            d.set_item("trials", row.stats.trials)?;
            d.set_item("mean_measured_m", row.stats.mean_measured_m)?;
            d.set_item("avg_error_m", row.stats.average_error_m)?;
            d.set_item("max_error_m", row.stats.max_error_m)?;
            d.set_item("min_error_m", row.stats.min_error_m)?;
            d.set_item("std_dev_m", row.stats.std_dev_m)?;
            d.set_item("seed", row.seed)?;
            out.append(d)?;
        }
        Ok(out)
    }

    #[pyo3(signature = (locale_decimal_comma=false))]
    fn to_csv(&self, locale_decimal_comma: bool) -> String {
        self.inner.render_csv(locale(locale_decimal_comma))
    }

    #[pyo3(signature = (path, locale_decimal_comma=false))]
    fn write_csv(&self, path: &str, locale_decimal_comma: bool) -> PyResult<()> {
        self.inner
            .write_csv(path, locale(locale_decimal_comma))
            .map_err(value_err)
    }

    fn __len__(&self) -> usize {
        self.inner.rows.len()
    }
}

fn locale(decimal_comma: bool) -> rc::CsvLocale {
    if decimal_comma {
        rc::CsvLocale::DecimalComma
    } else {
        rc::CsvLocale::Point
    }
}

/// Wrapping difference `later - earlier` on the 40-bit counter circle.
#[pyfunction]
fn tick_diff(later: u64, earlier: u64) -> u64 {
    rc::tick_diff(rc::Timestamp::new(later), rc::Timestamp::new(earlier))
}

/// Plain two-way flight-time estimate, seconds.
#[pyfunction]
#[pyo3(signature = (exchange, seconds_per_tick=None))]
fn tof_twr(exchange: &RangingExchange, seconds_per_tick: Option<f64>) -> PyResult<f64> {
    rc::tof_twr(&exchange.inner, resolution_from(seconds_per_tick)?).map_err(value_err)
}

/// Symmetric double-sided flight-time estimate, seconds.
#[pyfunction]
#[pyo3(signature = (exchange, seconds_per_tick=None))]
fn tof_sds_twr(exchange: &RangingExchange, seconds_per_tick: Option<f64>) -> PyResult<f64> {
    rc::tof_sds_twr(&exchange.inner, resolution_from(seconds_per_tick)?).map_err(value_err)
}

/// Mean of the per-round double-sided estimates over an ack chain, seconds.
#[pyfunction]
#[pyo3(signature = (exchange, seconds_per_tick=None))]
fn tof_sds_twr_ma(exchange: &RangingExchange, seconds_per_tick: Option<f64>) -> PyResult<f64> {
    rc::tof_sds_twr_ma(&exchange.inner, resolution_from(seconds_per_tick)?).map_err(value_err)
}

/// Raises ValueError on the first structural violation for the protocol.
#[pyfunction]
fn validate_exchange(exchange: &RangingExchange, protocol: &str) -> PyResult<()> {
    rc::validate_exchange(&exchange.inner, protocol_from(protocol)?).map_err(value_err)
}

/// Relative rate of clock A against clock B in ppm, plus estimator noise
/// drawn from `seed`.
#[pyfunction]
#[pyo3(signature = (clock_a, clock_b, noise_std_ppm=0.0, seed=0))]
fn estimate_clock_offset(
    clock_a: &ClockModel,
    clock_b: &ClockModel,
    noise_std_ppm: f64,
    seed: u64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rc::estimate_clock_offset(&clock_a.inner, &clock_b.inner, noise_std_ppm, &mut rng).ppm
}

/// Drift-corrected flight time over the opening round trip, seconds.
#[pyfunction]
#[pyo3(signature = (exchange, offset_ppm, seconds_per_tick=None))]
fn tof_twr_corrected(
    exchange: &RangingExchange,
    offset_ppm: f64,
    seconds_per_tick: Option<f64>,
) -> PyResult<f64> {
    let offset = rc::ClockOffsetEstimate {
        ppm: offset_ppm,
        noise_std_ppm: 0.0,
    };
    rc::tof_twr_corrected(&exchange.inner, offset, resolution_from(seconds_per_tick)?)
        .map_err(value_err)
}

/// Mean additive range correction from `(measured_m, actual_m)` pairs.
#[pyfunction]
fn calibrate_bias(samples: Vec<(f64, f64)>) -> PyResult<f64> {
    Ok(rc::calibrate_bias(&samples).map_err(value_err)?.bias_m)
}

/// Runs one ranging session.
#[pyfunction]
#[pyo3(signature = (a, b, cfg, correction=true))]
fn run_session(
    a: &NodeSim,
    b: &NodeSim,
    cfg: &SessionConfig,
    correction: bool,
) -> PyResult<SessionResult> {
    let mode = if correction {
        rc::CorrectionMode::On
    } else {
        rc::CorrectionMode::Off
    };
    Ok(SessionResult {
        inner: rc::run_session(&a.inner, &b.inner, &cfg.inner, mode).map_err(value_err)?,
    })
}

/// Runs `trials` sessions with derived substreams; deterministic for a seed.
#[pyfunction]
#[pyo3(signature = (a, b, cfg, trials, seed, correction=true))]
fn run_batch(
    a: &NodeSim,
    b: &NodeSim,
    cfg: &SessionConfig,
    trials: u32,
    seed: u64,
    correction: bool,
) -> PyResult<Vec<SessionResult>> {
    let mode = if correction {
        rc::CorrectionMode::On
    } else {
        rc::CorrectionMode::Off
    };
    let results = rc::run_batch(&a.inner, &b.inner, &cfg.inner, trials, mode, seed)
        .map_err(value_err)?;
    Ok(results
        .into_iter()
        .map(|inner| SessionResult { inner })
        .collect())
}

/// Runs a whole campaign and returns its summary table.
#[pyfunction]
fn run_sweep(spec: &SweepSpec) -> PyResult<SweepTable> {
    Ok(SweepTable {
        inner: rc::run_sweep(&spec.inner).map_err(value_err)?,
    })
}

/// Signed-error summary of measured distances against a known distance.
#[pyfunction]
fn summarize<'py>(
    py: Python<'py>,
    measured_m: Vec<f64>,
    actual_distance_m: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let s = rc::summarize(&measured_m, actual_distance_m).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("actual_distance_m", s.actual_distance_m)?;
    d.set_item("trials", s.trials)?;
    d.set_item("mean_measured_m", s.mean_measured_m)?;
    d.set_item("avg_error_m", s.average_error_m)?;
    d.set_item("max_error_m", s.max_error_m)?;
    d.set_item("min_error_m", s.min_error_m)?;
    d.set_item("std_dev_m", s.std_dev_m)?;
    Ok(d)
}

/// Finds the per-stamp jitter reproducing a target measured-distance std at
/// the sweep's first (distance, delay) cell.
#[pyfunction]
fn calibrate_jitter<'py>(
    py: Python<'py>,
    spec: &SweepSpec,
    target_std_m: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let cal = rc::calibrate_jitter(&spec.inner, target_std_m).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("jitter_std_s", cal.jitter_std_s)?;
    d.set_item("achieved_std_m", cal.achieved_std_m)?;
    d.set_item("evaluations", cal.evaluations)?;
    Ok(d)
}

#[pymodule]
fn rangesim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<ClockModel>()?;
    m.add_class::<ChannelModel>()?;
    m.add_class::<NodeSim>()?;
    m.add_class::<SessionConfig>()?;
    m.add_class::<RangingExchange>()?;
    m.add_class::<SessionResult>()?;
    m.add_class::<SweepSpec>()?;
    m.add_class::<SweepTable>()?;
    m.add_function(wrap_pyfunction!(tick_diff, m)?)?;
    m.add_function(wrap_pyfunction!(tof_twr, m)?)?;
    m.add_function(wrap_pyfunction!(tof_sds_twr, m)?)?;
    m.add_function(wrap_pyfunction!(tof_sds_twr_ma, m)?)?;
    m.add_function(wrap_pyfunction!(validate_exchange, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_clock_offset, m)?)?;
    m.add_function(wrap_pyfunction!(tof_twr_corrected, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate_bias, m)?)?;
    m.add_function(wrap_pyfunction!(run_session, m)?)?;
    m.add_function(wrap_pyfunction!(run_batch, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(summarize, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate_jitter, m)?)?;
    m.add("SPEED_OF_LIGHT_M_PER_S", rc::SPEED_OF_LIGHT_M_PER_S)?;
    m.add(
        "DEFAULT_SECONDS_PER_TICK",
        rc::TickResolution::DEFAULT_SECONDS_PER_TICK,
    )?;
    m.add("TIMESTAMP_BITS", rc::TIMESTAMP_BITS)?;
    m.add("CSV_HEADER", rc::CSV_HEADER)?;
    Ok(())
}
