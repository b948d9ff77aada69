//! Random Fourier features for the Gaussian kernel.
//!
//! A map with `N` features and bandwidth `σ` draws frequencies
//! `ωᵢ ~ N(0, σ⁻² I_d)` and phases `bᵢ ~ U[0, 2π)` once, then sends
//! `x ↦ z(x) = sqrt(2/N) · cos(Ωx + b)`. With this scaling
//! `E[z(x)ᵀz(y)] = exp(−‖x − y‖² / (2σ²))`, the kernel evaluated by
//! [`gaussian_kernel`] with the same `σ`.
//!
//! Fitting uses the minimum-norm least-squares solution `β = Z⁺Y`, so past
//! the interpolation threshold (`N ≥ n`) the fit interpolates and, as `N`
//! grows, approaches the kernel interpolant `x ↦ Σₖ αₖ k(xₖ, x)`.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::linalg::{svd, DenseMatrix, SvdResult};
use crate::seed::{derive_seed, rng_from_seed};
use crate::stats::{dot, mean, median};

/// Condition number above which a kernel interpolant is flagged.
pub const ILL_CONDITIONED: f64 = 1e10;

fn check_bandwidth(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        invalid(format!("bandwidth must be positive and finite, got {sigma}"))
    }
}

/// A frozen random feature map.
#[derive(Clone, Debug, PartialEq)]
pub struct RffMap {
    omega: DenseMatrix,
    phases: Vec<f64>,
    bandwidth: f64,
}

impl RffMap {
    pub fn from_parts(omega: DenseMatrix, phases: Vec<f64>, bandwidth: f64) -> Result<Self> {
        check_bandwidth(bandwidth)?;
        if omega.rows() == 0 || omega.cols() == 0 {
            return invalid("feature map needs at least one feature and one input dimension");
        }
        if phases.len() != omega.rows() {
            return invalid(format!("{} phases for {} frequencies", phases.len(), omega.rows()));
        }
        if !omega.is_finite() || phases.iter().any(|b| !(0.0..TAU).contains(b)) {
            return invalid("frequencies must be finite and phases in [0, 2π)");
        }
        Ok(Self { omega, phases, bandwidth })
    }

    pub fn n_features(&self) -> usize {
        self.omega.rows()
    }

    pub fn dim(&self) -> usize {
        self.omega.cols()
    }

    pub fn omega(&self) -> &DenseMatrix {
        &self.omega
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn featurize(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return invalid(format!("input of dimension {} for a map over {}", x.len(), self.dim()));
        }
        let scale = (2.0 / self.n_features() as f64).sqrt();
        Ok((0..self.n_features()).map(|i| scale * (dot(self.omega.row(i), x) + self.phases[i]).cos()).collect())
    }

    /// Stacks `z(xᵢ)ᵀ` for every row of `x` into an `n × N` matrix.
    pub fn featurize_rows(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if x.cols() != self.dim() {
            return invalid(format!("inputs of dimension {} for a map over {}", x.cols(), self.dim()));
        }
        let n_feat = self.n_features();
        let scale = (2.0 / n_feat as f64).sqrt();
        let rows: Vec<Vec<f64>> = (0..x.rows())
            .into_par_iter()
            .map(|i| {
                let xi = x.row(i);
                (0..n_feat).map(|k| scale * (dot(self.omega.row(k), xi) + self.phases[k]).cos()).collect()
            })
            .collect();
        Ok(DenseMatrix::from_fn(x.rows(), n_feat, |i, k| rows[i][k]))
    }
}

/// Samples a feature map approximating the Gaussian kernel of bandwidth `σ`.
pub fn sample_rff(n_features: usize, dim: usize, bandwidth: f64, seed: u64) -> Result<RffMap> {
    check_bandwidth(bandwidth)?;
    if n_features == 0 || dim == 0 {
        return invalid("n_features and dim must be at least 1");
    }
    let mut rng = rng_from_seed(seed);
    let inv = 1.0 / bandwidth;
    let omega = DenseMatrix::from_fn(n_features, dim, |_, _| inv * rng.sample::<f64, _>(StandardNormal));
    let phases = (0..n_features).map(|_| rng.gen_range(0.0..TAU)).collect();
    RffMap::from_parts(omega, phases, bandwidth)
}

/// `exp(−‖x − y‖² / (2σ²))`
pub fn gaussian_kernel(x: &[f64], y: &[f64], sigma: f64) -> Result<f64> {
    check_bandwidth(sigma)?;
    if x.len() != y.len() {
        return invalid(format!("points of dimension {} and {}", x.len(), y.len()));
    }
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((-d2 / (2.0 * sigma * sigma)).exp())
}

/// Gram matrix `K[i, j] = k(aᵢ, bⱼ)` between the rows of `a` and `b`.
pub fn kernel_matrix(a: &DenseMatrix, b: &DenseMatrix, sigma: f64) -> Result<DenseMatrix> {
    check_bandwidth(sigma)?;
    if a.cols() != b.cols() {
        return invalid(format!("points of dimension {} and {}", a.cols(), b.cols()));
    }
    let c = -0.5 / (sigma * sigma);
    Ok(DenseMatrix::from_fn(a.rows(), b.rows(), |i, j| {
        let d2: f64 = a.row(i).iter().zip(b.row(j)).map(|(u, v)| (u - v) * (u - v)).sum();
        (c * d2).exp()
    }))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelApproxError {
    pub max_abs: f64,
    pub mean_abs: f64,
}

/// Error of `z(x)ᵀz(y)` against `k(x, y)` over all pairs `i < j` of rows.
pub fn kernel_approx_error(map: &RffMap, points: &DenseMatrix) -> Result<KernelApproxError> {
    if points.rows() < 2 {
        return invalid("need at least two points");
    }
    let z = map.featurize_rows(points)?;
    let mut max_abs: f64 = 0.0;
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..points.rows() {
        for j in i + 1..points.rows() {
            let approx = dot(z.row(i), z.row(j));
            let exact = gaussian_kernel(points.row(i), points.row(j), map.bandwidth())?;
            let err = (approx - exact).abs();
            max_abs = max_abs.max(err);
            total += err;
            pairs += 1;
        }
    }
    Ok(KernelApproxError { max_abs, mean_abs: total / pairs as f64 })
}

/// `β ↦ Zβ` with `β` holding one column per output.
#[derive(Clone, Debug)]
pub struct RffPredictor {
    pub map: RffMap,
    pub beta: DenseMatrix,
}

impl RffPredictor {
    pub fn predict(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        self.map.featurize_rows(x)?.matmul(&self.beta)
    }

    pub fn beta_norm(&self) -> f64 {
        self.beta.frobenius_norm()
    }
}

fn solve_columns(dec: &SvdResult, targets: &DenseMatrix, width: usize) -> Result<DenseMatrix> {
    let k = targets.cols();
    let cols: Vec<Vec<f64>> = (0..k).map(|c| dec.solve_min_norm(&targets.column(c))).collect::<Result<_>>()?;
    Ok(DenseMatrix::from_fn(width, k, |i, c| cols[c][i]))
}

/// Minimum-norm least-squares fit `β = Z⁺Y`, column by column.
pub fn fit_rff_min_norm(map: &RffMap, x_train: &DenseMatrix, targets: &DenseMatrix) -> Result<RffPredictor> {
    if x_train.rows() != targets.rows() {
        return invalid(format!("{} inputs but {} target rows", x_train.rows(), targets.rows()));
    }
    let z = map.featurize_rows(x_train)?;
    let dec = svd(&z)?;
    let beta = solve_columns(&dec, targets, map.n_features())?;
    Ok(RffPredictor { map: map.clone(), beta })
}

/// `x ↦ Σₖ αₖ k(cₖ, x)`
#[derive(Clone, Debug, PartialEq)]
pub struct KernelExpansion {
    pub centers: DenseMatrix,
    pub alpha: Vec<f64>,
    pub bandwidth: f64,
}

impl KernelExpansion {
    pub fn new(centers: DenseMatrix, alpha: Vec<f64>, bandwidth: f64) -> Result<Self> {
        check_bandwidth(bandwidth)?;
        if centers.rows() != alpha.len() {
            return invalid(format!("{} centers but {} coefficients", centers.rows(), alpha.len()));
        }
        Ok(Self { centers, alpha, bandwidth })
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let mut acc = 0.0;
        for (k, a) in self.alpha.iter().enumerate() {
            acc += a * gaussian_kernel(self.centers.row(k), x, self.bandwidth)?;
        }
        Ok(acc)
    }

    pub fn eval_rows(&self, x: &DenseMatrix) -> Result<Vec<f64>> {
        kernel_matrix(x, &self.centers, self.bandwidth)?.matvec(&self.alpha)
    }
}

/// The kernel interpolant `α = K⁺y`, the `N → ∞` reference for RFF fits.
#[derive(Clone, Debug)]
pub struct KernelInterpolant {
    pub expansion: KernelExpansion,
    /// `σ_max(K)/σ_min(K)`; infinite when `K` is numerically singular.
    pub condition: f64,
    pub ill_conditioned: bool,
}

pub fn fit_kernel_interpolant(x_train: &DenseMatrix, y_train: &[f64], sigma: f64) -> Result<KernelInterpolant> {
    if x_train.rows() != y_train.len() {
        return invalid(format!("{} inputs but {} targets", x_train.rows(), y_train.len()));
    }
    let k = kernel_matrix(x_train, x_train, sigma)?;
    let dec = svd(&k)?;
    let condition =
        if dec.rank() < k.rows() { f64::INFINITY } else { dec.sigma_max() / dec.singular_values[dec.rank() - 1] };
    let alpha = dec.solve_min_norm(y_train)?;
    Ok(KernelInterpolant {
        expansion: KernelExpansion::new(x_train.clone(), alpha, sigma)?,
        condition,
        ill_conditioned: condition > ILL_CONDITIONED,
    })
}

/// Train/test split with row-aligned targets (one column per output).
#[derive(Clone, Debug)]
pub struct TrainTest {
    pub x_train: DenseMatrix,
    pub y_train: DenseMatrix,
    pub x_test: DenseMatrix,
    pub y_test: DenseMatrix,
    /// Class indices of the test rows, when targets are one-hot.
    pub test_classes: Option<Vec<usize>>,
}

impl TrainTest {
    pub fn n_train(&self) -> usize {
        self.x_train.rows()
    }

    fn validate(&self) -> Result<()> {
        if self.x_train.rows() != self.y_train.rows() || self.x_test.rows() != self.y_test.rows() {
            return invalid("inputs and targets disagree on row counts");
        }
        if self.x_train.cols() != self.x_test.cols() || self.y_train.cols() != self.y_test.cols() {
            return invalid("train and test disagree on dimensions");
        }
        if let Some(c) = &self.test_classes {
            if c.len() != self.x_test.rows() || c.iter().any(|&k| k >= self.y_test.cols()) {
                return invalid("test classes inconsistent with one-hot targets");
            }
        }
        Ok(())
    }
}

/// Mean over rows of the squared error summed across outputs.
pub fn mean_squared_error(pred: &DenseMatrix, target: &DenseMatrix) -> f64 {
    let diff = pred.sub(target).expect("prediction and target shapes agree");
    let sq = diff.frobenius_norm();
    sq * sq / target.rows().max(1) as f64
}

fn zero_one_error(pred: &DenseMatrix, classes: &[usize]) -> f64 {
    let wrong = classes
        .iter()
        .enumerate()
        .filter(|(i, &c)| {
            let row = pred.row(*i);
            let argmax = (0..row.len()).fold(0, |best, k| if row[k] > row[best] { k } else { best });
            argmax != c
        })
        .count();
    wrong as f64 / classes.len().max(1) as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RffSweepRow {
    pub n_features: usize,
    pub train_mse: f64,
    pub test_mse: f64,
    pub test_zero_one: Option<f64>,
    /// Median `‖β‖_F` over repeats.
    pub beta_norm: f64,
    pub repeats: usize,
}

struct RepeatOutcome {
    train_mse: f64,
    test_mse: f64,
    zero_one: Option<f64>,
    beta_norm: f64,
}

/// Model-wise sweep over the number of random features. Repeat `r` at grid
/// value `N` samples its map with `derive_seed(derive_seed(seed, "rff-sweep", N), "repeat", r)`.
pub fn rff_double_descent_sweep(
    data: &TrainTest,
    n_grid: &[usize],
    bandwidth: f64,
    repeats: usize,
    seed: u64,
) -> Result<Vec<RffSweepRow>> {
    data.validate()?;
    if repeats == 0 {
        return invalid("repeats must be at least 1");
    }
    let dim = data.x_train.cols();
    n_grid
        .iter()
        .map(|&n_features| {
            let grid_seed = derive_seed(seed, "rff-sweep", n_features as u64);
            let outcomes = (0..repeats)
                .into_par_iter()
                .map(|r| {
                    let map = sample_rff(n_features, dim, bandwidth, derive_seed(grid_seed, "repeat", r as u64))?;
                    let fit = fit_rff_min_norm(&map, &data.x_train, &data.y_train)?;
                    let train_pred = fit.predict(&data.x_train)?;
                    let test_pred = fit.predict(&data.x_test)?;
                    Ok(RepeatOutcome {
                        train_mse: mean_squared_error(&train_pred, &data.y_train),
                        test_mse: mean_squared_error(&test_pred, &data.y_test),
                        zero_one: data.test_classes.as_ref().map(|c| zero_one_error(&test_pred, c)),
                        beta_norm: fit.beta_norm(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let pick = |f: fn(&RepeatOutcome) -> f64| outcomes.iter().map(f).collect::<Vec<_>>();
            Ok(RffSweepRow {
                n_features,
                train_mse: mean(&pick(|o| o.train_mse)),
                test_mse: mean(&pick(|o| o.test_mse)),
                test_zero_one: data
                    .test_classes
                    .as_ref()
                    .map(|_| mean(&outcomes.iter().filter_map(|o| o.zero_one).collect::<Vec<_>>())),
                beta_norm: median(&pick(|o| o.beta_norm)),
                repeats,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{norm, stderr};

    fn uniform_points(n: usize, d: usize, seed: u64) -> DenseMatrix {
        let mut rng = rng_from_seed(seed);
        DenseMatrix::from_fn(n, d, |_, _| rng.gen::<f64>())
    }

    #[test]
    fn sampling_is_deterministic_and_validated() {
        assert_eq!(sample_rff(10, 3, 1.5, 4).unwrap(), sample_rff(10, 3, 1.5, 4).unwrap());
        assert_ne!(sample_rff(10, 3, 1.5, 4).unwrap(), sample_rff(10, 3, 1.5, 5).unwrap());
        assert!(sample_rff(10, 3, 0.0, 4).is_err());
        assert!(sample_rff(10, 3, -1.0, 4).is_err());
        assert!(sample_rff(0, 3, 1.0, 4).is_err());
    }

    #[test]
    fn frequency_moments() {
        let sigma = 2.0;
        let map = sample_rff(100_000, 3, sigma, 11).unwrap();
        for j in 0..3 {
            let col = map.omega().column(j);
            let sq: Vec<f64> = col.iter().map(|w| w * w).collect();
            let target = 1.0 / (sigma * sigma);
            assert!((mean(&sq) - target).abs() < 5.0 * stderr(&sq), "column {j}");
        }
    }

    #[test]
    fn phases_pass_ks_test() {
        let map = sample_rff(5000, 1, 1.0, 12).unwrap();
        let mut b: Vec<f64> = map.phases().iter().map(|v| v / TAU).collect();
        b.sort_by(f64::total_cmp);
        let n = b.len() as f64;
        let ks = b
            .iter()
            .enumerate()
            .map(|(i, &u)| (u - i as f64 / n).abs().max(((i + 1) as f64 / n - u).abs()))
            .fold(0.0, f64::max);
        // 1% critical value of the one-sample KS statistic.
        assert!(ks < 1.63 / n.sqrt(), "ks = {ks}");
    }

    #[test]
    fn featurize_examples() {
        let zero = DenseMatrix::zeros(1, 2);
        let map = RffMap::from_parts(zero.clone(), vec![0.0], 1.0).unwrap();
        let z = map.featurize(&[3.0, -7.0]).unwrap();
        assert!((z[0] - 2f64.sqrt()).abs() < 1e-15);
        let map = RffMap::from_parts(zero, vec![std::f64::consts::PI], 1.0).unwrap();
        assert!((map.featurize(&[0.5, 0.5]).unwrap()[0] + 2f64.sqrt()).abs() < 1e-15);
        assert!(map.featurize(&[1.0]).is_err());
        assert!(RffMap::from_parts(DenseMatrix::zeros(1, 2), vec![TAU], 1.0).is_err());

        let map = sample_rff(64, 4, 1.0, 3).unwrap();
        let z0 = map.featurize(&[0.0; 4]).unwrap();
        let scale = (2.0f64 / 64.0).sqrt();
        for (zi, b) in z0.iter().zip(map.phases()) {
            assert!((zi - scale * b.cos()).abs() < 1e-15);
        }
        let x = uniform_points(20, 4, 9);
        let z = map.featurize_rows(&x).unwrap();
        for i in 0..20 {
            assert!(z.row(i).iter().all(|v| v.abs() <= scale + 1e-15));
            assert!(dot(z.row(i), z.row(i)) <= 2.0 + 1e-12);
            assert_eq!(z.row(i), map.featurize(x.row(i)).unwrap().as_slice());
        }
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(gaussian_kernel(&[1.0, 2.0], &[1.0, 2.0], 0.7).unwrap(), 1.0);
        // ‖x − y‖² = 2σ²
        let sigma = 1.3;
        let v = gaussian_kernel(&[0.0, 0.0], &[sigma, sigma], sigma).unwrap();
        assert!((v - (-1f64).exp()).abs() < 1e-15);
        let x = [0.3, -1.0, 2.0];
        let y = [1.0, 0.5, -0.2];
        assert_eq!(gaussian_kernel(&x, &y, 0.9).unwrap(), gaussian_kernel(&y, &x, 0.9).unwrap());
        assert!(gaussian_kernel(&x, &y, 0.0).is_err());
        assert!(gaussian_kernel(&x, &y[..2], 1.0).is_err());
    }

    #[test]
    fn self_inner_product_is_bounded() {
        let map = sample_rff(7, 2, 1.0, 5).unwrap();
        let pts = DenseMatrix::from_rows(&[vec![0.2, 0.4], vec![0.2, 0.4]]).unwrap();
        let err = kernel_approx_error(&map, &pts).unwrap();
        assert!(err.max_abs <= 1.0 + 1e-12);
        assert!(kernel_approx_error(&map, &DenseMatrix::zeros(1, 2)).is_err());
    }

    #[test]
    fn single_feature_fit_is_scalar_regression() {
        let map = sample_rff(1, 2, 1.0, 8).unwrap();
        let x = uniform_points(6, 2, 1);
        let y: Vec<f64> = (0..6).map(|i| i as f64 * 0.3 - 1.0).collect();
        let fit = fit_rff_min_norm(&map, &x, &DenseMatrix::column_vector(&y)).unwrap();
        let z = map.featurize_rows(&x).unwrap().column(0);
        let expected = dot(&z, &y) / dot(&z, &z);
        assert!((fit.beta.get(0, 0) - expected).abs() < 1e-12);
    }

    #[test]
    fn overparameterised_fit_interpolates_with_min_norm() {
        let map = sample_rff(60, 3, 0.5, 2).unwrap();
        let x = uniform_points(15, 3, 4);
        let y: Vec<f64> = (0..15).map(|i| (i as f64).sin()).collect();
        let fit = fit_rff_min_norm(&map, &x, &DenseMatrix::column_vector(&y)).unwrap();
        let pred = fit.predict(&x).unwrap().column(0);
        assert!(pred.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-8));

        let z = map.featurize_rows(&x).unwrap();
        let beta = fit.beta.column(0);
        let mut rng = rng_from_seed(3);
        for _ in 0..50 {
            let u: Vec<f64> = (0..60).map(|_| rng.sample(StandardNormal)).collect();
            let alt = crate::linalg::least_squares_solution_member(&z, &y, &u).unwrap();
            assert!(norm(&beta) <= norm(&alt) + 1e-10);
        }
    }

    #[test]
    fn duplicate_points_do_not_change_fit() {
        let map = sample_rff(40, 2, 0.5, 6).unwrap();
        let x = uniform_points(8, 2, 7);
        let y: Vec<f64> = (0..8).map(|i| (i as f64 * 0.7).cos()).collect();
        let base = fit_rff_min_norm(&map, &x, &DenseMatrix::column_vector(&y)).unwrap();

        let mut rows: Vec<usize> = (0..8).collect();
        rows.push(3);
        let x2 = x.select_rows(&rows).unwrap();
        let y2: Vec<f64> = rows.iter().map(|&i| y[i]).collect();
        let dup = fit_rff_min_norm(&map, &x2, &DenseMatrix::column_vector(&y2)).unwrap();
        let gap = base.beta.sub(&dup.beta).unwrap().frobenius_norm();
        assert!(gap < 1e-8 * base.beta_norm(), "gap {gap}");
    }

    #[test]
    fn kernel_interpolant_examples() {
        let one = DenseMatrix::from_rows(&[vec![0.3, 0.1]]).unwrap();
        let fit = fit_kernel_interpolant(&one, &[2.5], 1.0).unwrap();
        assert!((fit.expansion.alpha[0] - 2.5).abs() < 1e-14);

        let x = uniform_points(12, 2, 13);
        let y: Vec<f64> = (0..12).map(|i| (i as f64).sqrt()).collect();
        let fit = fit_kernel_interpolant(&x, &y, 0.3).unwrap();
        assert!(!fit.ill_conditioned);
        let back = fit.expansion.eval_rows(&x).unwrap();
        assert!(back.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-8));

        let mut rows: Vec<usize> = (0..12).collect();
        rows.push(0);
        let dup =
            fit_kernel_interpolant(&x.select_rows(&rows).unwrap(), &[y.clone(), vec![y[0]]].concat(), 0.3).unwrap();
        assert!(dup.ill_conditioned && dup.condition.is_infinite());
    }

    #[test]
    fn rff_fit_approaches_kernel_interpolant() {
        let (n, sigma) = (10usize, 0.4);
        let x = uniform_points(n, 2, 21);
        let y: Vec<f64> = (0..n).map(|i| (3.0 * x.get(i, 0)).sin() + x.get(i, 1)).collect();
        let held_out = uniform_points(30, 2, 22);
        let reference = fit_kernel_interpolant(&x, &y, sigma).unwrap().expansion.eval_rows(&held_out).unwrap();
        let gap = |n_feat: usize| {
            let gaps: Vec<f64> = (0..5)
                .map(|r| {
                    let map = sample_rff(n_feat, 2, sigma, 100 + r).unwrap();
                    let pred = fit_rff_min_norm(&map, &x, &DenseMatrix::column_vector(&y))
                        .unwrap()
                        .predict(&held_out)
                        .unwrap()
                        .column(0);
                    mean(&pred.iter().zip(&reference).map(|(a, b)| (a - b).abs()).collect::<Vec<_>>())
                })
                .collect();
            median(&gaps)
        };
        let coarse = gap(4 * n);
        let fine = gap(256 * n);
        assert!(fine < coarse, "gap did not shrink: {coarse} -> {fine}");
    }

    #[test]
    fn sweep_reports_classification_error() {
        let x = uniform_points(30, 2, 1);
        let classes: Vec<usize> = (0..30).map(|i| usize::from(x.get(i, 0) > 0.5)).collect();
        let onehot = DenseMatrix::from_fn(30, 2, |i, k| f64::from(u8::from(classes[i] == k)));
        let data = TrainTest {
            x_train: x.select_rows(&(0..20).collect::<Vec<_>>()).unwrap(),
            y_train: onehot.select_rows(&(0..20).collect::<Vec<_>>()).unwrap(),
            x_test: x.select_rows(&(20..30).collect::<Vec<_>>()).unwrap(),
            y_test: onehot.select_rows(&(20..30).collect::<Vec<_>>()).unwrap(),
            test_classes: Some(classes[20..].to_vec()),
        };
        let rows = rff_double_descent_sweep(&data, &[5, 40], 0.5, 2, 9).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[1].train_mse < 1e-10);
        assert!(rows.iter().all(|r| r.test_zero_one.is_some_and(|e| (0.0..=1.0).contains(&e))));
        assert_eq!(rows, rff_double_descent_sweep(&data, &[5, 40], 0.5, 2, 9).unwrap());
    }
}
