//! Legendre-basis regression and the empirical bias–variance decomposition.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::descent::{gd_least_squares, GdConfig};
use crate::error::{invalid, Error, Result};
use crate::linalg::{min_norm_least_squares, svd, DenseMatrix, DenseVector};
use crate::seed::{derived_rng, Rng as SeedRng};
use crate::stats::{mean, stderr};

/// Design matrix with column `k` holding `P_k(xᵢ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyBasisDesign {
    pub xs: Vec<f64>,
    pub degree: usize,
    pub design: DenseMatrix,
}

/// `(P_0(x), …, P_degree(x))` by Bonnet's recurrence
/// `(k+1) P_{k+1} = (2k+1) x P_k − k P_{k−1}`.
pub fn legendre_row(x: f64, degree: usize, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if degree == 0 {
        return;
    }
    out.push(x);
    for k in 1..degree {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
}

pub fn legendre_design(xs: &[f64], degree: usize) -> Result<PolyBasisDesign> {
    if let Some(x) = xs.iter().find(|x| !(-1.0..=1.0).contains(*x)) {
        return invalid(format!("abscissa {x} outside [-1, 1]"));
    }
    let mut data = Vec::with_capacity(xs.len() * (degree + 1));
    let mut row = Vec::with_capacity(degree + 1);
    for &x in xs {
        legendre_row(x, degree, &mut row);
        data.extend_from_slice(&row);
    }
    Ok(PolyBasisDesign { xs: xs.to_vec(), degree, design: DenseMatrix::new(xs.len(), degree + 1, data)? })
}

/// Affine map of `[lo, hi]` onto `[-1, 1]`.
pub fn rescale_to_unit_interval(xs: &[f64], lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(hi > lo) {
        return invalid(format!("empty interval [{lo}, {hi}]"));
    }
    Ok(xs.iter().map(|x| (2.0 * (x - lo) / (hi - lo) - 1.0).clamp(-1.0, 1.0)).collect())
}

/// `Σₖ cₖ P_k(x)` at each abscissa.
pub fn eval_legendre_series(coef: &[f64], xs: &[f64]) -> Vec<f64> {
    let degree = coef.len().saturating_sub(1);
    let mut row = Vec::with_capacity(coef.len());
    xs.iter()
        .map(|&x| {
            legendre_row(x, degree, &mut row);
            row.iter().zip(coef).map(|(p, c)| p * c).sum()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FitMethod {
    PseudoInverse,
    /// Gradient descent from zero with step `0.9/σ_max²`.
    GradientDescent {
        max_iters: usize,
    },
}

/// Minimum-norm least-squares coefficients in the Legendre basis.
pub fn fit_poly_min_norm(xs: &[f64], ys: &[f64], degree: usize, via: FitMethod) -> Result<DenseVector> {
    if xs.len() != ys.len() {
        return invalid(format!("{} abscissae but {} responses", xs.len(), ys.len()));
    }
    let basis = legendre_design(xs, degree)?;
    match via {
        FitMethod::PseudoInverse => Ok(min_norm_least_squares(&basis.design, ys)?.weights),
        FitMethod::GradientDescent { max_iters } => {
            let smax = svd(&basis.design)?.sigma_max();
            if smax == 0.0 {
                return Ok(vec![0.0; degree + 1]);
            }
            let cfg = GdConfig::new(0.9 / (smax * smax), max_iters)?.with_record_every(max_iters)?;
            let traj = gd_least_squares(&basis.design, ys, &vec![0.0; degree + 1], &cfg)?;
            if !traj.converged {
                return Err(Error::NumericalFailure(format!(
                    "gradient descent did not reach tolerance in {max_iters} iterations"
                )));
            }
            Ok(traj.final_w)
        }
    }
}

/// Equispaced grid of `m ≥ 2` points covering `[-1, 1]`.
pub fn unit_grid(m: usize) -> Vec<f64> {
    (0..m).map(|i| -1.0 + 2.0 * i as f64 / (m - 1) as f64).collect()
}

/// Noisy samples of a random cubic, the setting for the overfitting demo.
#[derive(Clone, Debug)]
pub struct CubicSample {
    /// Legendre coefficients of the true cubic.
    pub truth: [f64; 4],
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl CubicSample {
    pub fn draw(n: usize, noise: f64, rng: &mut SeedRng) -> Self {
        let truth = [(); 4].map(|_| rng.sample::<f64, _>(StandardNormal));
        let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let clean = eval_legendre_series(&truth, &xs);
        let ys = clean.iter().map(|c| c + noise * rng.sample::<f64, _>(StandardNormal)).collect();
        Self { truth, xs, ys }
    }

    pub fn truth_at(&self, xs: &[f64]) -> Vec<f64> {
        eval_legendre_series(&self.truth, xs)
    }
}

/// `(x, truth, prediction)` rows of a min-norm fit evaluated on `grid`.
pub fn fit_curve(sample: &CubicSample, degree: usize, grid: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    let coef = fit_poly_min_norm(&sample.xs, &sample.ys, degree, FitMethod::PseudoInverse)?;
    let pred = eval_legendre_series(&coef, grid);
    let truth = sample.truth_at(grid);
    Ok(grid.iter().zip(truth).zip(pred).map(|((&x, t), p)| (x, t, p)).collect())
}

/// `max |fit − truth|` over the grid.
pub fn sup_distance_to_truth(sample: &CubicSample, degree: usize, grid: &[f64]) -> Result<f64> {
    Ok(fit_curve(sample, degree, grid)?.iter().map(|(_, t, p)| (t - p).abs()).fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BiasVariance {
    pub bias_sq: f64,
    pub variance: f64,
    pub noise: f64,
    /// Mean squared error against fresh noisy targets.
    pub total: f64,
    pub total_stderr: f64,
    pub trials: usize,
}

impl BiasVariance {
    /// `bias² + variance + noise − total`
    pub fn identity_gap(&self) -> f64 {
        self.bias_sq + self.variance + self.noise - self.total
    }
}

/// Number of probe abscissae used by [`bias_variance_decompose`].
pub const PROBE_POINTS: usize = 64;

/// Bias–variance decomposition for an arbitrary estimator.
///
/// Each trial draws `n` abscissae uniformly on `[-1, 1]` with targets
/// `truth(x) + σε`, asks `estimator(xs, ys, probe)` for predictions on the
/// probe grid, and scores them against fresh noisy targets there.
pub fn bias_variance_decompose_with<T, E>(
    truth: T,
    estimator: E,
    n: usize,
    sigma: f64,
    probe: &[f64],
    trials: usize,
    seed: u64,
) -> Result<BiasVariance>
where
    T: Fn(f64) -> f64 + Sync,
    E: Fn(&[f64], &[f64], &[f64]) -> Result<Vec<f64>> + Sync,
{
    if trials < 2 {
        return invalid("need at least two trials");
    }
    if probe.is_empty() {
        return invalid("empty probe grid");
    }
    let truth_probe: Vec<f64> = probe.iter().map(|&x| truth(x)).collect();
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = derived_rng(seed, "bias-variance", t as u64);
            let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let ys: Vec<f64> = xs.iter().map(|&x| truth(x) + sigma * rng.sample::<f64, _>(StandardNormal)).collect();
            let pred = estimator(&xs, &ys, probe)?;
            if pred.len() != probe.len() {
                return invalid("estimator returned the wrong number of predictions");
            }
            let err: f64 = pred
                .iter()
                .zip(&truth_probe)
                .map(|(p, f)| {
                    let fresh = f + sigma * rng.sample::<f64, _>(StandardNormal);
                    (fresh - p) * (fresh - p)
                })
                .sum::<f64>()
                / probe.len() as f64;
            Ok((pred, err))
        })
        .collect::<Result<Vec<_>>>()?;

    let m = probe.len();
    let mut avg = vec![0.0; m];
    for (pred, _) in &outcomes {
        for (a, p) in avg.iter_mut().zip(pred) {
            *a += p;
        }
    }
    avg.iter_mut().for_each(|a| *a /= trials as f64);
    let bias_sq = avg.iter().zip(&truth_probe).map(|(a, f)| (f - a) * (f - a)).sum::<f64>() / m as f64;
    let variance = outcomes
        .iter()
        .map(|(pred, _)| pred.iter().zip(&avg).map(|(p, a)| (p - a) * (p - a)).sum::<f64>())
        .sum::<f64>()
        / (m * trials) as f64;
    let totals: Vec<f64> = outcomes.iter().map(|(_, e)| *e).collect();
    Ok(BiasVariance {
        bias_sq,
        variance,
        noise: sigma * sigma,
        total: mean(&totals),
        total_stderr: stderr(&totals),
        trials,
    })
}

/// Decomposition for the min-norm Legendre fit of the given degree.
pub fn bias_variance_decompose<T>(
    truth: T,
    degree: usize,
    n: usize,
    sigma: f64,
    trials: usize,
    seed: u64,
) -> Result<BiasVariance>
where
    T: Fn(f64) -> f64 + Sync,
{
    let probe = unit_grid(PROBE_POINTS);
    bias_variance_decompose_with(
        truth,
        |xs: &[f64], ys: &[f64], grid: &[f64]| {
            let coef = fit_poly_min_norm(xs, ys, degree, FitMethod::PseudoInverse)?;
            Ok(eval_legendre_series(&coef, grid))
        },
        n,
        sigma,
        &probe,
        trials,
        seed,
    )
}
