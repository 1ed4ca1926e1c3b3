//! Parametric bootstrap on probability tables.
//!
//! Each replicate redraws every cell from `Binomial(N, observed)` / N on a
//! substream keyed by `(seed, table label, replicate, k, i)`.

use nalgebra::DMatrix;
use serde::Serialize;
use statrs::statistics::{Data, OrderStatistics};

use crate::error::{Error, Result};
use crate::experiment::{binomial_frequency, ProbabilityTable, Shots};
use crate::rng::{StreamKey, DOMAIN_BOOTSTRAP};

pub const MIN_RESAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Self { lower: x, upper: x }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// One bootstrap replicate of `table`.
pub fn resample(table: &ProbabilityTable, replicate: u64, seed: u64) -> DMatrix<f64> {
    let shots = match table.shots {
        Shots::Exact => return table.entries.clone(),
        Shots::Finite(n) => n,
    };
    let key = StreamKey::new(seed)
        .index(DOMAIN_BOOTSTRAP)
        .label(&table.label)
        .index(replicate);
    DMatrix::from_fn(table.entries.nrows(), table.entries.ncols(), |k, i| {
        binomial_frequency(table.entries[(k, i)], shots, key.index(k as u64).index(i as u64))
    })
}

/// Empirical quantile of the finite values in `values`.
pub fn quantile(values: &[f64], tau: f64) -> f64 {
    let finite: Vec<f64> = values.iter().cloned().filter(|x| x.is_finite()).collect();
    if finite.is_empty() {
        return f64::NAN;
    }
    Data::new(finite).quantile(tau)
}

/// Percentile interval `[2.5%, 97.5%]` of `statistic` over parametric
/// bootstrap replicates. Exact tables give a zero-width interval.
pub fn bootstrap_ci<F>(statistic: F, table: &ProbabilityTable, resamples: usize, seed: u64) -> Result<Interval>
where
    F: Fn(&DMatrix<f64>) -> f64 + Sync + Send,
{
    if resamples < MIN_RESAMPLES {
        return Err(Error::NotEnoughData(format!(
            "bootstrap needs at least {MIN_RESAMPLES} resamples, got {resamples}"
        )));
    }
    if table.shots == Shots::Exact {
        return Ok(Interval::point(statistic(&table.entries)));
    }
    let values = map_replicates(resamples, |b| statistic(&resample(table, b as u64, seed)));
    Ok(Interval {
        lower: quantile(&values, 0.025),
        upper: quantile(&values, 0.975),
    })
}

/// Runs `f` over replicate indices `0..resamples`, in order.
pub(crate) fn map_replicates<T, F>(resamples: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..resamples).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..resamples).map(f).collect()
    }
}

/// Bootstrap replicates of a per-member statistic over a whole family.
/// The reference table, when given, is redrawn once per replicate and shared
/// by all members. Returns `[member][replicate]`.
pub(crate) fn family_replicates<F>(
    tables: &[ProbabilityTable],
    reference: Option<&ProbabilityTable>,
    resamples: usize,
    seed: u64,
    statistic: F,
) -> Vec<Vec<f64>>
where
    F: Fn(&DMatrix<f64>, Option<&DMatrix<f64>>) -> f64 + Sync + Send,
{
    let by_replicate: Vec<Vec<f64>> = map_replicates(resamples, |b| {
        let r = reference.map(|t| resample(t, b as u64, seed));
        tables
            .iter()
            .map(|t| statistic(&resample(t, b as u64, seed), r.as_ref()))
            .collect()
    });
    (0..tables.len())
        .map(|k| by_replicate.iter().map(|rep| rep[k]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(shots: Shots) -> ProbabilityTable {
        ProbabilityTable::new(
            "t",
            DMatrix::from_row_slice(2, 2, &[0.7, 0.2, 0.1, 0.6]),
            shots,
        )
    }

    #[test]
    fn constant_statistic_gives_degenerate_interval() {
        let ci = bootstrap_ci(|_| 3.0, &table(Shots::Finite(1000)), 200, 1).unwrap();
        assert_eq!(ci, Interval::point(3.0));
    }

    #[test]
    fn exact_table_gives_zero_width() {
        let ci = bootstrap_ci(|m| m[(0, 0)], &table(Shots::Exact), 200, 1).unwrap();
        assert_eq!(ci.width(), 0.0);
        assert_eq!(ci.lower, 0.7);
    }

    #[test]
    fn too_few_resamples() {
        assert!(bootstrap_ci(|m| m[(0, 0)], &table(Shots::Exact), 99, 1).is_err());
    }

    #[test]
    fn interval_brackets_cell_and_is_deterministic() {
        let t = table(Shots::Finite(10_000));
        let a = bootstrap_ci(|m| m[(0, 0)], &t, 400, 5).unwrap();
        let b = bootstrap_ci(|m| m[(0, 0)], &t, 400, 5).unwrap();
        assert_eq!(a, b);
        assert!(a.contains(0.7));
        // sd = sqrt(0.21/1e4) ~ 4.6e-3, so half-width ~ 9e-3
        assert!(a.width() > 0.01 && a.width() < 0.03, "{a:?}");
    }

    #[test]
    fn family_replicates_share_reference() {
        let t = table(Shots::Finite(500));
        let reps = family_replicates(&[t.clone(), t.clone()], Some(&t), 100, 3, |_, r| r.unwrap()[(0, 0)]);
        assert_eq!(reps[0], reps[1]);
        assert_eq!(reps[0].len(), 100);
    }
}
