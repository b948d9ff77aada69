//! Effective model complexity: the largest sample size a training procedure
//! still fits to (near) zero training error on average.

use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::linalg::{min_norm_least_squares, DenseMatrix};
use crate::rff::{fit_rff_min_norm, mean_squared_error, sample_rff};
use crate::seed::{derive_seed, derived_rng, Rng};
use crate::stats::mean;

/// Mean training error at one grid point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmcStep {
    pub n: usize,
    pub mean_train_error: f64,
    pub within: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmcScan {
    pub emc: usize,
    pub steps: Vec<EmcStep>,
}

/// Scans `n_grid` in order until the mean training error first exceeds
/// `epsilon`. Trial `t` at size `n` draws its sample from
/// `derived_rng(derive_seed(seed, "emc", n), "trial", t)`.
pub fn emc_scan<S, P>(
    train_error: P,
    sampler: S,
    epsilon: f64,
    n_grid: &[usize],
    trials: usize,
    seed: u64,
) -> Result<EmcScan>
where
    S: Fn(usize, &mut Rng) -> (DenseMatrix, Vec<f64>) + Sync,
    P: Fn(&DenseMatrix, &[f64]) -> Result<f64> + Sync,
{
    if trials == 0 {
        return invalid("trials must be at least 1");
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("n_grid must be strictly increasing");
    }
    let mut scan = EmcScan { emc: 0, steps: Vec::new() };
    for &n in n_grid {
        let grid_seed = derive_seed(seed, "emc", n as u64);
        let errors = (0..trials)
            .into_par_iter()
            .map(|t| {
                let (x, y) = sampler(n, &mut derived_rng(grid_seed, "trial", t as u64));
                train_error(&x, &y)
            })
            .collect::<Result<Vec<f64>>>()?;
        let m = mean(&errors);
        let within = m <= epsilon;
        scan.steps.push(EmcStep { n, mean_train_error: m, within });
        if !within {
            break;
        }
        scan.emc = n;
    }
    Ok(scan)
}

pub fn estimate_emc<S, P>(
    train_error: P,
    sampler: S,
    epsilon: f64,
    n_grid: &[usize],
    trials: usize,
    seed: u64,
) -> Result<usize>
where
    S: Fn(usize, &mut Rng) -> (DenseMatrix, Vec<f64>) + Sync,
    P: Fn(&DenseMatrix, &[f64]) -> Result<f64> + Sync,
{
    Ok(emc_scan(train_error, sampler, epsilon, n_grid, trials, seed)?.emc)
}

/// `n × d` standard normal inputs with independent standard normal responses.
pub fn gaussian_sampler(d: usize) -> impl Fn(usize, &mut Rng) -> (DenseMatrix, Vec<f64>) + Sync {
    move |n, rng| {
        let x = DenseMatrix::from_fn(n, d, |_, _| rng.sample(StandardNormal));
        let y = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        (x, y)
    }
}

/// Training mean squared error of the min-norm linear fit.
pub fn linear_train_error(x: &DenseMatrix, y: &[f64]) -> Result<f64> {
    let fit = min_norm_least_squares(x, y)?;
    let pred = x.matvec(&fit.weights)?;
    Ok(pred.iter().zip(y).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / y.len().max(1) as f64)
}

/// Training mean squared error of a min-norm RFF fit; the map seed depends
/// only on `seed` and the sample size.
pub fn rff_train_error(
    n_features: usize,
    bandwidth: f64,
    seed: u64,
) -> impl Fn(&DenseMatrix, &[f64]) -> Result<f64> + Sync {
    move |x, y| {
        let map = sample_rff(n_features, x.cols(), bandwidth, derive_seed(seed, "emc-rff", x.rows() as u64))?;
        let targets = DenseMatrix::column_vector(y);
        let fit = fit_rff_min_norm(&map, x, &targets)?;
        Ok(mean_squared_error(&fit.predict(x)?, &targets))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_regression_interpolates_up_to_dimension() {
        let grid: Vec<usize> = (1..=12).collect();
        let emc = estimate_emc(linear_train_error, gaussian_sampler(6), 1e-6, &grid, 5, 2).unwrap();
        assert_eq!(emc, 6);
    }

    #[test]
    fn infinite_tolerance_returns_last() {
        let grid = [2, 4, 8, 16];
        let emc = estimate_emc(linear_train_error, gaussian_sampler(3), f64::INFINITY, &grid, 3, 1).unwrap();
        assert_eq!(emc, 16);
    }

    #[test]
    fn zero_when_first_point_fails() {
        let scan = emc_scan(|_, _| Ok(1.0), gaussian_sampler(2), 0.5, &[1, 2], 2, 0).unwrap();
        assert_eq!(scan.emc, 0);
        assert_eq!(scan.steps.len(), 1);
        assert!(estimate_emc(|_, _| Ok(0.0), gaussian_sampler(2), 0.5, &[3, 2], 2, 0).is_err());
    }

    #[test]
    fn rff_capacity_tracks_feature_count() {
        let grid: Vec<usize> = (5..=40).step_by(5).collect();
        let emc = estimate_emc(rff_train_error(20, 1.0, 3), gaussian_sampler(4), 1e-6, &grid, 4, 8).unwrap();
        assert_eq!(emc, 20);
    }
}
