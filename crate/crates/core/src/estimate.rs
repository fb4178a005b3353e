//! Aggregation of single-shot correlator values into sequence averages.
//!
//! The per-record correlator values are heavy-tailed — their range grows
//! exponentially with the number of qubits — so besides the plain mean this
//! module provides the median-of-means estimator, whose sub-Gaussian
//! concentration gives exponential confidence from a variance bound alone,
//! and a deterministic bootstrap for confidence bands on the per-length
//! averages.

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::correlate::CorrelatorTable;
use crate::error::{Error, Result};

/// How raw values at one sequence length are collapsed to one number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    Mean,
    /// Median of `groups` group means, groups formed in record order.
    MedianOfMeans { groups: usize },
}

impl EstimatorKind {
    fn evaluate(&self, values: &[f64]) -> Result<f64> {
        match self {
            EstimatorKind::Mean => median_of_means(values, 1),
            EstimatorKind::MedianOfMeans { groups } => median_of_means(values, *groups),
        }
    }
}

/// Median-of-means with `k` groups: split the values (in order) into `k`
/// groups of `⌊N/k⌋`, discard the remainder, return the median of the group
/// means.  `k = 1` is the plain mean.
pub fn median_of_means(values: &[f64], k: usize) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Estimation("median_of_means on empty input".into()));
    }
    if k == 0 || k > values.len() {
        return Err(Error::Estimation(format!(
            "median_of_means group count {k} invalid for {} values",
            values.len()
        )));
    }
    let group = values.len() / k;
    let mut means: Vec<f64> = (0..k)
        .map(|g| values[g * group..(g + 1) * group].iter().sum::<f64>() / group as f64)
        .collect();
    means.sort_by(|a, b| a.total_cmp(b));
    let mid = means.len() / 2;
    Ok(if means.len() % 2 == 1 {
        means[mid]
    } else {
        0.5 * (means[mid - 1] + means[mid])
    })
}

/// Planner for the median-of-means protocol targeting `|A|` simultaneous
/// estimates at confidence `1 − δ` and additive precision `ε` under a
/// single-shot variance bound `V`: returns `(K, N)` — group count and group
/// size — so that `K·N` samples suffice.
pub fn mom_parameters(
    num_probes: usize,
    delta: f64,
    epsilon: f64,
    variance_bound: f64,
) -> Result<(usize, usize)> {
    if num_probes == 0 || !(0.0..1.0).contains(&delta) || delta == 0.0 {
        return Err(Error::InvalidParameter(
            "mom_parameters needs num_probes ≥ 1 and δ ∈ (0,1)".into(),
        ));
    }
    if epsilon <= 0.0 || variance_bound < 0.0 {
        return Err(Error::InvalidParameter(
            "mom_parameters needs ε > 0 and V ≥ 0".into(),
        ));
    }
    let k = (2.0 * (2.0 * num_probes as f64 / delta).ln()).ceil() as usize;
    let n = (34.0 * variance_bound / (epsilon * epsilon)).ceil() as usize;
    Ok((k.max(1), n.max(1)))
}

/// Percentile bootstrap band for one per-length average.
#[derive(Debug, Clone, Copy)]
pub struct BootstrapBand {
    pub lo: f64,
    pub hi: f64,
    pub std_error: f64,
}

/// Bootstrap settings: number of resamples and the RNG seed; bands are 95%
/// percentile intervals and fully deterministic given the seed.
#[derive(Debug, Clone, Copy)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            resamples: 1000,
            seed: 0x0b007,
        }
    }
}

/// One aggregated point of the decay curve.
#[derive(Debug, Clone)]
pub struct SequencePoint {
    pub m: usize,
    pub mean: f64,
    pub median_of_means: f64,
    /// The value selected by the requested estimator.
    pub estimate: f64,
    pub raw_count: usize,
    pub bootstrap: Option<BootstrapBand>,
}

/// The aggregated decay curve for one probe.
#[derive(Debug, Clone)]
pub struct SequenceAverages {
    pub points: Vec<SequencePoint>,
}

impl SequenceAverages {
    /// `(m, estimate, weight)` triples for fitting; weights are inverse
    /// bootstrap variances when bands were computed, 1 otherwise.
    pub fn fit_points(&self) -> Vec<(usize, f64, f64)> {
        self.points
            .iter()
            .map(|p| {
                let w = match &p.bootstrap {
                    Some(b) if b.std_error > 0.0 => 1.0 / (b.std_error * b.std_error),
                    _ => 1.0,
                };
                (p.m, p.estimate, w)
            })
            .collect()
    }
}

/// Collapse a correlator table to per-length averages, optionally with
/// bootstrap bands (resampling records with replacement).
pub fn sequence_averages(
    table: &CorrelatorTable,
    estimator: EstimatorKind,
    bootstrap: Option<BootstrapConfig>,
) -> Result<SequenceAverages> {
    let mut points = Vec::with_capacity(table.lengths().len());
    for (li, &m) in table.lengths().iter().enumerate() {
        let values = table
            .values_for(m)
            .ok_or_else(|| Error::Estimation(format!("no values at m={m}")))?;
        let mean = median_of_means(values, 1)?;
        let mom = match estimator {
            EstimatorKind::MedianOfMeans { groups } => median_of_means(values, groups)?,
            EstimatorKind::Mean => mean,
        };
        let estimate = estimator.evaluate(values)?;
        let band = match &bootstrap {
            Some(cfg) => Some(bootstrap_band(table, li, values.len(), estimator, cfg)?),
            None => None,
        };
        points.push(SequencePoint {
            m,
            mean,
            median_of_means: mom,
            estimate,
            raw_count: values.len(),
            bootstrap: band,
        });
    }
    Ok(SequenceAverages { points })
}

fn bootstrap_band(
    table: &CorrelatorTable,
    li: usize,
    count: usize,
    estimator: EstimatorKind,
    cfg: &BootstrapConfig,
) -> Result<BootstrapBand> {
    if count == 0 || cfg.resamples == 0 {
        return Err(Error::Estimation("bootstrap over empty data".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    rng.set_stream(li as u64);
    let uniform = Uniform::from(0..count);
    let mut replicas = Vec::with_capacity(cfg.resamples);
    let mut indices = vec![0usize; count];
    for _ in 0..cfg.resamples {
        for slot in indices.iter_mut() {
            *slot = uniform.sample(&mut rng);
        }
        let m = table.mean_with_indices(li, &indices);
        let value = match estimator {
            EstimatorKind::Mean => m,
            EstimatorKind::MedianOfMeans { groups } => {
                // Resampled median-of-means: evaluate on the resampled
                // multiset in draw order.
                let values = table
                    .values_for(table.lengths()[li])
                    .expect("length present");
                let resampled: Vec<f64> = indices.iter().map(|&i| values[i]).collect();
                median_of_means(&resampled, groups.min(resampled.len()))?
            }
        };
        replicas.push(value);
    }
    replicas.sort_by(|a, b| a.total_cmp(b));
    let lo = percentile(&replicas, 0.025);
    let hi = percentile(&replicas, 0.975);
    let mean = replicas.iter().sum::<f64>() / replicas.len() as f64;
    let var = replicas.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (replicas.len() as f64 - 1.0).max(1.0);
    Ok(BootstrapBand {
        lo,
        hi,
        std_error: var.sqrt(),
    })
}

/// Linear-interpolated percentile of a sorted slice.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.len() == 1 {
        return sorted[0];
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Per-length unbiased sample variances of the single-shot values.
pub fn empirical_variances(table: &CorrelatorTable) -> Vec<(usize, f64)> {
    table
        .lengths()
        .iter()
        .map(|&m| {
            let v = table.values_for(m).expect("length present");
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
                / (v.len() as f64 - 1.0).max(1.0);
            (m, var)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_means_matches_hand_example() {
        let values = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        assert_eq!(median_of_means(&values, 3).unwrap(), 3.5);
        assert_eq!(median_of_means(&values, 1).unwrap(), 3.5);
        // Truncation: 7 values in 3 groups of 2 drops the last.
        let values7 = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 100.0];
        assert_eq!(median_of_means(&values7, 3).unwrap(), 3.5);
        assert!(median_of_means(&[], 1).is_err());
        assert!(median_of_means(&values, 0).is_err());
    }

    #[test]
    fn median_of_means_equals_mean_for_equal_groups() {
        let values = [2.0; 12];
        assert_eq!(median_of_means(&values, 4).unwrap(), 2.0);
    }

    #[test]
    fn mom_parameters_match_prescription() {
        let (k, n) = mom_parameters(16, 0.01, 0.1, 10.0).unwrap();
        assert_eq!(k, 17);
        assert_eq!(n, 34000);
        assert!(mom_parameters(0, 0.01, 0.1, 1.0).is_err());
    }

    #[test]
    fn averages_and_bootstrap_are_deterministic() {
        let table = CorrelatorTable::new(
            vec![1, 2],
            vec![
                (0..100).map(|i| (i % 7) as f64).collect(),
                (0..100).map(|i| (i % 3) as f64).collect(),
            ],
        )
        .unwrap();
        let cfg = BootstrapConfig {
            resamples: 200,
            seed: 42,
        };
        let a = sequence_averages(&table, EstimatorKind::Mean, Some(cfg)).unwrap();
        let b = sequence_averages(&table, EstimatorKind::Mean, Some(cfg)).unwrap();
        for (pa, pb) in a.points.iter().zip(&b.points) {
            let (ba, bb) = (pa.bootstrap.unwrap(), pb.bootstrap.unwrap());
            assert_eq!(ba.lo, bb.lo);
            assert_eq!(ba.hi, bb.hi);
            assert!(ba.lo <= pa.mean && pa.mean <= ba.hi);
        }
        assert_eq!(a.points[0].raw_count, 100);
    }

    #[test]
    fn mom_estimator_downweights_outliers() {
        let mut values = vec![1.0; 99];
        values.push(1e6);
        let mean = median_of_means(&values, 1).unwrap();
        let mom = median_of_means(&values, 10).unwrap();
        assert!(mean > 1000.0);
        assert!((mom - 1.0).abs() < 1e-9);
    }

    #[test]
    fn empirical_variance_is_unbiased_sample_variance() {
        let table = CorrelatorTable::new(vec![3], vec![vec![1.0, 2.0, 3.0]]).unwrap();
        let vars = empirical_variances(&table);
        assert_eq!(vars, vec![(3, 1.0)]);
    }
}
