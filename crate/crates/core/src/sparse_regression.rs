//! Gaussian linear regression fit on a random subset of `p` out of `d`
//! features.
//!
//! Data follow `y = xᵀw + σε` with `x ~ N(0, I_d)` and `ε ~ N(0, 1)`. The
//! predictor keeps `p` coordinates, fits them with `X_p⁺ y` and sets the
//! discarded ones to zero. Its risk has a closed form with a pole band
//! `n − 1 ≤ p ≤ n + 1`; [`monte_carlo_risk`] estimates the same quantity by
//! simulation.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::linalg::{min_norm_least_squares, svd, DenseMatrix, DenseVector, LinearPredictor};
use crate::seed::{derive_seed, derived_rng, rng_from_seed};
use crate::stats::{dot, mean, median, stderr};

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianLinearProblem {
    pub w_true: DenseVector,
    pub noise_scale: f64,
    pub n: usize,
}

impl GaussianLinearProblem {
    pub fn new(w_true: DenseVector, noise_scale: f64, n: usize) -> Result<Self> {
        if w_true.is_empty() {
            return invalid("w_true must have at least one coordinate");
        }
        if n == 0 {
            return invalid("sample size must be at least 1");
        }
        if !(noise_scale >= 0.0 && noise_scale.is_finite()) {
            return invalid(format!("noise scale must be finite and nonnegative, got {noise_scale}"));
        }
        if w_true.iter().any(|v| !v.is_finite()) {
            return invalid("w_true has non-finite entries");
        }
        Ok(Self { w_true, noise_scale, n })
    }

    /// A problem with `w_true` spread evenly so that `‖w‖² = w_norm_sq`.
    pub fn isotropic(d: usize, w_norm_sq: f64, noise_scale: f64, n: usize) -> Result<Self> {
        if d == 0 {
            return invalid("dimension must be at least 1");
        }
        let c = (w_norm_sq / d as f64).sqrt();
        Self::new(vec![c; d], noise_scale, n)
    }

    pub fn dim(&self) -> usize {
        self.w_true.len()
    }

    pub fn w_norm_sq(&self) -> f64 {
        dot(&self.w_true, &self.w_true)
    }

    fn draw(&self, rows: usize, rng: &mut impl Rng) -> (DenseMatrix, DenseVector) {
        let d = self.dim();
        let x = DenseMatrix::from_fn(rows, d, |_, _| rng.sample(StandardNormal));
        let y = (0..rows)
            .map(|i| dot(x.row(i), &self.w_true) + self.noise_scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        (x, y)
    }
}

/// `n` i.i.d. draws from the problem's distribution.
pub fn sample_dataset(problem: &GaussianLinearProblem, seed: u64) -> (DenseMatrix, DenseVector) {
    problem.draw(problem.n, &mut rng_from_seed(seed))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetSelection {
    kept: Vec<usize>,
    discarded: Vec<usize>,
}

impl SubsetSelection {
    pub fn new(d: usize, kept: &[usize]) -> Result<Self> {
        let mut mask = vec![false; d];
        for &j in kept {
            if j >= d {
                return invalid(format!("index {j} out of range for dimension {d}"));
            }
            if mask[j] {
                return invalid(format!("index {j} selected twice"));
            }
            mask[j] = true;
        }
        let kept = (0..d).filter(|&j| mask[j]).collect();
        let discarded = (0..d).filter(|&j| !mask[j]).collect();
        Ok(Self { kept, discarded })
    }

    pub fn all(d: usize) -> Self {
        Self { kept: (0..d).collect(), discarded: Vec::new() }
    }

    /// Uniform over subsets of size `p`: a partial Fisher–Yates shuffle of
    /// `0..d`, keeping the first `p` positions.
    pub fn random(d: usize, p: usize, rng: &mut impl Rng) -> Result<Self> {
        if p > d {
            return invalid(format!("cannot keep {p} of {d} features"));
        }
        let mut idx: Vec<usize> = (0..d).collect();
        let (head, _) = idx.partial_shuffle(rng, p);
        let head = head.to_vec();
        Self::new(d, &head)
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn discarded(&self) -> &[usize] {
        &self.discarded
    }

    pub fn p(&self) -> usize {
        self.kept.len()
    }

    pub fn dim(&self) -> usize {
        self.kept.len() + self.discarded.len()
    }

    fn norm_sq(idx: &[usize], w: &[f64]) -> f64 {
        idx.iter().map(|&j| w[j] * w[j]).sum()
    }
}

/// Min-norm fit on the kept columns, zero on the discarded ones.
pub fn fit_subset_min_norm(x: &DenseMatrix, y: &[f64], sel: &SubsetSelection) -> Result<LinearPredictor> {
    if sel.dim() != x.cols() {
        return invalid(format!("selection over {} features for a design with {} columns", sel.dim(), x.cols()));
    }
    if y.len() != x.rows() {
        return invalid(format!("design has {} rows but target has {} entries", x.rows(), y.len()));
    }
    let mut weights = vec![0.0; x.cols()];
    if sel.p() > 0 {
        let sub = x.select_columns(sel.kept())?;
        let fit = min_norm_least_squares(&sub, y)?;
        for (&j, w) in sel.kept().iter().zip(fit.weights) {
            weights[j] = w;
        }
    }
    Ok(LinearPredictor { weights, active: sel.kept().to_vec() })
}

/// Closed-form risk value; `Divergent` inside the interpolation band.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AnalyticRisk {
    Finite(f64),
    Divergent,
}

impl AnalyticRisk {
    pub fn finite(self) -> Option<f64> {
        match self {
            AnalyticRisk::Finite(v) => Some(v),
            AnalyticRisk::Divergent => None,
        }
    }

    pub fn is_divergent(self) -> bool {
        matches!(self, AnalyticRisk::Divergent)
    }
}

impl fmt::Display for AnalyticRisk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyticRisk::Finite(v) => write!(f, "{v}"),
            AnalyticRisk::Divergent => f.write_str("inf"),
        }
    }
}

fn in_band(p: usize, n: usize) -> bool {
    p + 1 >= n && p <= n + 1
}

/// Risk `E[(y − xᵀŵ)²]` for a fixed subset, averaged over training sets.
///
/// `p = 0` is the null model with risk `‖w‖² + σ²` for every `n`.
pub fn analytic_risk_fixed_subset(w_true: &[f64], sel: &SubsetSelection, sigma: f64, n: usize) -> Result<AnalyticRisk> {
    if sel.dim() != w_true.len() {
        return invalid(format!("selection over {} features but w has {}", sel.dim(), w_true.len()));
    }
    let (p, nf) = (sel.p(), n as f64);
    let kept_sq = SubsetSelection::norm_sq(sel.kept(), w_true);
    let tail = SubsetSelection::norm_sq(sel.discarded(), w_true) + sigma * sigma;
    if p == 0 {
        return Ok(AnalyticRisk::Finite(tail));
    }
    if in_band(p, n) {
        return Ok(AnalyticRisk::Divergent);
    }
    let pf = p as f64;
    Ok(AnalyticRisk::Finite(if p + 2 <= n {
        tail * (1.0 + pf / (nf - pf - 1.0))
    } else {
        kept_sq * (1.0 - nf / pf) + tail * (1.0 + nf / (pf - nf - 1.0))
    }))
}

/// Risk averaged over a uniformly random subset of size `p`.
pub fn analytic_risk_random_subset(
    w_norm_sq: f64,
    sigma_sq: f64,
    d: usize,
    n: usize,
    p: usize,
) -> Result<AnalyticRisk> {
    if p > d {
        return invalid(format!("p = {p} exceeds d = {d}"));
    }
    let (pf, nf, df) = (p as f64, n as f64, d as f64);
    if p == 0 {
        return Ok(AnalyticRisk::Finite(w_norm_sq + sigma_sq));
    }
    if in_band(p, n) {
        return Ok(AnalyticRisk::Divergent);
    }
    Ok(AnalyticRisk::Finite(if p + 2 <= n {
        ((1.0 - pf / df) * w_norm_sq + sigma_sq) * (1.0 + pf / (nf - pf - 1.0))
    } else {
        w_norm_sq * (1.0 - nf / df * (2.0 - (df - nf - 1.0) / (pf - nf - 1.0)))
            + sigma_sq * (1.0 + nf / (pf - nf - 1.0))
    }))
}

/// Summary of a Monte Carlo risk estimate across independent trials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub median: f64,
    pub trials: usize,
}

impl McEstimate {
    pub(crate) fn from_samples(samples: &[f64]) -> Self {
        Self { mean: mean(samples), stderr: stderr(samples), median: median(samples), trials: samples.len() }
    }
}

/// How the subset is chosen in each Monte Carlo trial.
#[derive(Clone, Debug)]
pub enum SubsetPolicy {
    /// Fresh uniform subset of this size per trial.
    Random(usize),
    Fixed(SubsetSelection),
}

fn test_risk(problem: &GaussianLinearProblem, fit: &LinearPredictor, test_points: usize, rng: &mut impl Rng) -> f64 {
    let d = problem.dim();
    let mut x = vec![0.0; d];
    let mut acc = 0.0;
    for _ in 0..test_points {
        x.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
        let y = dot(&x, &problem.w_true) + problem.noise_scale * rng.sample::<f64, _>(StandardNormal);
        let r = y - fit.predict(&x);
        acc += r * r;
    }
    acc / test_points as f64
}

/// Monte Carlo estimate of the risk under a subset policy.
///
/// Trial `t` draws from `derived_rng(seed, "mc-risk", t)`: the subset (for
/// random policies), a training set of size `n`, then `test_points` fresh test
/// pairs.
pub fn monte_carlo_risk_with(
    problem: &GaussianLinearProblem,
    policy: &SubsetPolicy,
    trials: usize,
    test_points: usize,
    seed: u64,
) -> Result<McEstimate> {
    if trials == 0 || test_points == 0 {
        return invalid("trials and test_points must be at least 1");
    }
    let d = problem.dim();
    match policy {
        SubsetPolicy::Random(p) if *p > d => return invalid(format!("p = {p} exceeds d = {d}")),
        SubsetPolicy::Fixed(sel) if sel.dim() != d => {
            return invalid(format!("selection over {} features but d = {d}", sel.dim()))
        }
        _ => {}
    }
    let samples = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = derived_rng(seed, "mc-risk", t as u64);
            let sel = match policy {
                SubsetPolicy::Random(p) => SubsetSelection::random(d, *p, &mut rng)?,
                SubsetPolicy::Fixed(sel) => sel.clone(),
            };
            let (x, y) = problem.draw(problem.n, &mut rng);
            let fit = fit_subset_min_norm(&x, &y, &sel)?;
            Ok(test_risk(problem, &fit, test_points, &mut rng))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(McEstimate::from_samples(&samples))
}

/// Monte Carlo risk with a fresh uniform subset of size `p` per trial.
pub fn monte_carlo_risk(
    problem: &GaussianLinearProblem,
    p: usize,
    trials: usize,
    test_points: usize,
    seed: u64,
) -> Result<McEstimate> {
    monte_carlo_risk_with(problem, &SubsetPolicy::Random(p), trials, test_points, seed)
}

/// Monte Carlo estimate of `E‖X_p⁺X_p w_p‖²` for a fixed subset, the
/// row-space energy that equals `‖w_p‖²·n/p` when `p ≥ n`.
pub fn projection_energy(
    problem: &GaussianLinearProblem,
    sel: &SubsetSelection,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    if trials == 0 {
        return invalid("trials must be at least 1");
    }
    if sel.p() == 0 || sel.dim() != problem.dim() {
        return invalid("projection energy needs a nonempty selection over the problem's features");
    }
    let w_p: Vec<f64> = sel.kept().iter().map(|&j| problem.w_true[j]).collect();
    let samples = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = derived_rng(seed, "projection", t as u64);
            let x = DenseMatrix::from_fn(problem.n, sel.p(), |_, _| rng.sample(StandardNormal));
            let proj = svd(&x)?.project_row_space(&w_p)?;
            Ok(dot(&proj, &proj))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(McEstimate::from_samples(&samples))
}

/// One point of the risk-versus-`p` curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiskCurveRow {
    pub p: usize,
    pub analytic_risk: AnalyticRisk,
    pub mc_risk: f64,
    pub mc_stderr: f64,
    pub mc_median: f64,
    pub trials: usize,
}

/// Analytic and Monte Carlo risk for every `p` in the grid. Each grid point
/// gets its own seed stream `derive_seed(seed, "risk-curve", p)`.
pub fn risk_curve(
    problem: &GaussianLinearProblem,
    p_grid: &[usize],
    trials: usize,
    test_points: usize,
    seed: u64,
) -> Result<Vec<RiskCurveRow>> {
    let d = problem.dim();
    let sigma_sq = problem.noise_scale * problem.noise_scale;
    p_grid
        .iter()
        .map(|&p| {
            let analytic_risk = analytic_risk_random_subset(problem.w_norm_sq(), sigma_sq, d, problem.n, p)?;
            let mc = monte_carlo_risk(problem, p, trials, test_points, derive_seed(seed, "risk-curve", p as u64))?;
            Ok(RiskCurveRow { p, analytic_risk, mc_risk: mc.mean, mc_stderr: mc.stderr, mc_median: mc.median, trials })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_risk(p: usize) -> f64 {
        analytic_risk_random_subset(1.0, 1.0 / 25.0, 100, 40, p).unwrap().finite().unwrap()
    }

    #[test]
    fn reference_curve_values() {
        assert!((reference_risk(0) - 1.04).abs() < 1e-12);
        assert!((reference_risk(20) - 0.84 * 39.0 / 19.0).abs() < 1e-12);
        assert!((reference_risk(38) - 25.74).abs() < 1e-12);
        assert!((reference_risk(42) - 25.44).abs() < 1e-12);
        assert!((reference_risk(60) - 1.566_315_789_473_684).abs() < 1e-12);
        assert!((reference_risk(100) - (0.6 + 0.04 * (1.0 + 40.0 / 59.0))).abs() < 1e-12);
        for p in 39..=41 {
            assert!(analytic_risk_random_subset(1.0, 0.04, 100, 40, p).unwrap().is_divergent());
        }
        assert!(analytic_risk_random_subset(1.0, 0.04, 100, 40, 101).is_err());
        assert!(reference_risk(38) > reference_risk(20) && reference_risk(20) > reference_risk(0));
        assert!(reference_risk(100) < reference_risk(0));
    }

    #[test]
    fn fixed_subset_cases() {
        let w: Vec<f64> = (0..100).map(|j| (j as f64 + 1.0).sin()).collect();
        let w_sq = dot(&w, &w);
        let all = SubsetSelection::all(100);
        let r = analytic_risk_fixed_subset(&w, &all, 0.0, 40).unwrap().finite().unwrap();
        assert!((r - w_sq * (1.0 - 0.4)).abs() < 1e-12);
        let none = SubsetSelection::new(100, &[]).unwrap();
        let r = analytic_risk_fixed_subset(&w, &none, 0.3, 40).unwrap().finite().unwrap();
        assert!((r - (w_sq + 0.09)).abs() < 1e-12);
        let sel = SubsetSelection::new(100, &(0..40).collect::<Vec<_>>()).unwrap();
        assert!(analytic_risk_fixed_subset(&w, &sel, 0.3, 40).unwrap().is_divergent());
    }

    #[test]
    fn fixed_subset_averages_to_random_subset() {
        // Averaging the fixed-subset formula over all subsets of a tiny problem
        // must reproduce the random-subset formula.
        let w = [0.3, -1.2, 0.7, 2.0, 0.1, -0.4];
        let (d, n, sigma) = (6usize, 2usize, 0.5);
        let w_sq = dot(&w, &w);
        for p in [0usize, 4, 5, 6] {
            let mut acc = 0.0;
            let mut count = 0.0;
            for mask in 0u32..(1 << d) {
                if mask.count_ones() as usize != p {
                    continue;
                }
                let kept: Vec<usize> = (0..d).filter(|j| mask >> j & 1 == 1).collect();
                let sel = SubsetSelection::new(d, &kept).unwrap();
                acc += analytic_risk_fixed_subset(&w, &sel, sigma, n).unwrap().finite().unwrap();
                count += 1.0;
            }
            let avg = analytic_risk_random_subset(w_sq, sigma * sigma, d, n, p).unwrap().finite().unwrap();
            assert!((acc / count - avg).abs() < 1e-12, "p = {p}");
        }
    }

    #[test]
    fn random_subset_depends_only_on_norm() {
        let a = GaussianLinearProblem::new(vec![1.0, 0.0, 0.0, 0.0, 0.0], 0.1, 2).unwrap();
        let b = GaussianLinearProblem::new(vec![0.0, 0.0, 0.0, 0.0, 1.0], 0.1, 2).unwrap();
        for p in 0..=5 {
            let ra = analytic_risk_random_subset(a.w_norm_sq(), 0.01, 5, 2, p).unwrap();
            let rb = analytic_risk_random_subset(b.w_norm_sq(), 0.01, 5, 2, p).unwrap();
            assert_eq!(ra, rb);
        }
    }

    #[test]
    fn sample_dataset_contract() {
        let zero = GaussianLinearProblem::new(vec![0.0; 5], 0.0, 7).unwrap();
        let (x, y) = sample_dataset(&zero, 1);
        assert_eq!(x.shape(), (7, 5));
        assert!(y.iter().all(|&v| v == 0.0));

        let prob = GaussianLinearProblem::isotropic(10, 1.0, 0.2, 6).unwrap();
        assert_eq!(sample_dataset(&prob, 99), sample_dataset(&prob, 99));
        assert_ne!(sample_dataset(&prob, 99).1, sample_dataset(&prob, 100).1);
    }

    #[test]
    fn subset_selection_rules() {
        assert!(SubsetSelection::new(3, &[0, 3]).is_err());
        assert!(SubsetSelection::new(3, &[1, 1]).is_err());
        let s = SubsetSelection::new(5, &[4, 1]).unwrap();
        assert_eq!(s.kept(), &[1, 4]);
        assert_eq!(s.discarded(), &[0, 2, 3]);
        let mut rng = rng_from_seed(2);
        let r = SubsetSelection::random(10, 4, &mut rng).unwrap();
        assert_eq!(r.p(), 4);
        assert!(r.kept().windows(2).all(|w| w[0] < w[1]));
        assert!(SubsetSelection::random(3, 4, &mut rng).is_err());
    }

    #[test]
    fn random_subsets_are_uniform() {
        // Each index lands in a size-3 subset of 0..6 with probability 1/2.
        let mut rng = rng_from_seed(8);
        let mut hits = [0usize; 6];
        let trials = 20_000;
        for _ in 0..trials {
            for &j in SubsetSelection::random(6, 3, &mut rng).unwrap().kept() {
                hits[j] += 1;
            }
        }
        let sd = (trials as f64 * 0.25).sqrt();
        for h in hits {
            assert!((h as f64 - trials as f64 / 2.0).abs() < 5.0 * sd);
        }
    }

    #[test]
    fn subset_fit_examples() {
        let x = DenseMatrix::new(1, 2, vec![1.0, 1.0]).unwrap();
        let sel = SubsetSelection::new(2, &[0]).unwrap();
        let fit = fit_subset_min_norm(&x, &[2.0], &sel).unwrap();
        assert!((fit.weights[0] - 2.0).abs() < 1e-14 && fit.weights[1] == 0.0);
        assert_eq!(fit.active, vec![0]);

        let none = SubsetSelection::new(2, &[]).unwrap();
        assert_eq!(fit_subset_min_norm(&x, &[2.0], &none).unwrap().weights, vec![0.0, 0.0]);

        let prob = GaussianLinearProblem::isotropic(8, 1.0, 0.1, 5).unwrap();
        let (x, y) = sample_dataset(&prob, 4);
        let full = fit_subset_min_norm(&x, &y, &SubsetSelection::all(8)).unwrap();
        assert_eq!(full.weights, min_norm_least_squares(&x, &y).unwrap().weights);
    }

    #[test]
    fn noiseless_overdetermined_recovers_exactly() {
        let prob = GaussianLinearProblem::isotropic(5, 1.0, 0.0, 30).unwrap();
        let est = monte_carlo_risk(&prob, 5, 20, 50, 3).unwrap();
        assert!(est.mean < 1e-20, "{}", est.mean);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let prob = GaussianLinearProblem::isotropic(12, 1.0, 0.2, 5).unwrap();
        let a = monte_carlo_risk(&prob, 8, 50, 20, 17).unwrap();
        let b = monte_carlo_risk(&prob, 8, 50, 20, 17).unwrap();
        assert_eq!(a, b);
        assert!(monte_carlo_risk(&prob, 13, 5, 5, 1).is_err());
        assert!(monte_carlo_risk(&prob, 3, 0, 5, 1).is_err());
    }

    #[test]
    fn risk_curve_rows() {
        let prob = GaussianLinearProblem::isotropic(100, 1.0, 0.2, 40).unwrap();
        let rows = risk_curve(&prob, &[0, 40, 100], 4, 10, 1).unwrap();
        assert_eq!(rows.len(), 3);
        assert!((rows[0].analytic_risk.finite().unwrap() - 1.04).abs() < 1e-12);
        assert!(rows[1].analytic_risk.is_divergent());
        assert_eq!(rows[1].analytic_risk.to_string(), "inf");
        assert!(rows.iter().all(|r| r.mc_stderr >= 0.0 && r.trials == 4));
    }
}
