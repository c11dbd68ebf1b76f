//! Error statistics over a batch of measured distances.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("cannot summarize an empty sample")]
    EmptySample,
}

/// Signed-error summary of repeated measurements against a known distance.
/// Errors are `measured - actual`, in meters; `std_dev_m` is the sample
/// standard deviation (n-1), zero for a single trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangingStats {
    pub actual_distance_m: f64,
    pub trials: usize,
    pub mean_measured_m: f64,
    pub average_error_m: f64,
    pub max_error_m: f64,
    pub min_error_m: f64,
    pub std_dev_m: f64,
}

pub fn summarize(measured_m: &[f64], actual_distance_m: f64) -> Result<RangingStats, StatsError> {
    if measured_m.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let n = measured_m.len() as f64;
    let mean_measured = measured_m.iter().sum::<f64>() / n;
    let average_error = mean_measured - actual_distance_m;
    let mut max_error = f64::NEG_INFINITY;
    let mut min_error = f64::INFINITY;
    for &m in measured_m {
        let err = m - actual_distance_m;
        max_error = max_error.max(err);
        min_error = min_error.min(err);
    }
    let std_dev = if measured_m.len() < 2 {
        0.0
    } else {
        let ss = measured_m
            .iter()
            .map(|&m| (m - mean_measured).powi(2))
            .sum::<f64>();
        (ss / (n - 1.0)).sqrt()
    };
    Ok(RangingStats {
        actual_distance_m,
        trials: measured_m.len(),
        mean_measured_m: mean_measured,
        average_error_m: average_error,
        max_error_m: max_error,
        min_error_m: min_error,
        std_dev_m: std_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_point_sample() {
        let s = summarize(&[1.9, 2.1], 2.0).unwrap();
        assert_eq!(s.trials, 2);
        assert_relative_eq!(s.mean_measured_m, 2.0);
        assert_relative_eq!(s.average_error_m, 0.0);
        assert_relative_eq!(s.max_error_m, 0.1, max_relative = 1e-12);
        assert_relative_eq!(s.min_error_m, -0.1, max_relative = 1e-12);
        assert_relative_eq!(s.std_dev_m, 0.02_f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn single_sample_has_zero_spread() {
        let s = summarize(&[5.25], 5.0).unwrap();
        assert_eq!(s.std_dev_m, 0.0);
        assert_relative_eq!(s.average_error_m, 0.25, max_relative = 1e-12);
        assert_eq!(s.max_error_m, s.min_error_m);
    }

    #[test]
    fn empty_sample_is_an_error() {
        assert_eq!(summarize(&[], 1.0), Err(StatsError::EmptySample));
    }

    #[test]
    fn all_negative_errors_keep_their_sign() {
        let s = summarize(&[0.8, 0.9, 0.85], 1.0).unwrap();
        assert!(s.max_error_m < 0.0);
        assert!(s.min_error_m <= s.max_error_m + 1e-15);
        assert!(s.average_error_m < 0.0);
    }
}
