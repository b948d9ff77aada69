//! Linearly separable data, the hard-margin SVM through the origin, and the
//! direction diagnostics used to watch gradient descent align with it.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::descent::{effective_smoothness, gd_classification, max_stable_step, GdConfig, GdTrajectory, SurrogateLoss};
use crate::error::{invalid, Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::seed::rng_from_seed;
use crate::stats::{dot, norm};

/// Dual coordinate ascent stops once every projected gradient is below this.
pub const SVM_TOL: f64 = 1e-8;
pub const SVM_MAX_PASSES: usize = 1_000_000;
/// Perceptron epochs tried before falling back to the witness.
pub const PERCEPTRON_EPOCHS: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct SeparableDataset {
    pub points: DenseMatrix,
    pub labels: DenseVector,
    pub witness: Option<DenseVector>,
}

impl SeparableDataset {
    pub fn new(points: DenseMatrix, labels: DenseVector, witness: Option<DenseVector>) -> Result<Self> {
        if points.rows() != labels.len() {
            return invalid(format!("{} points but {} labels", points.rows(), labels.len()));
        }
        if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
            return invalid("labels must be +1 or -1");
        }
        if let Some(w) = &witness {
            if w.len() != points.cols() {
                return invalid("witness dimension does not match the points");
            }
            if (0..points.rows()).any(|i| labels[i] * dot(points.row(i), w) <= 0.0) {
                return invalid("witness does not separate the data");
            }
        }
        Ok(Self { points, labels, witness })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.cols()
    }

    /// `minᵢ yᵢ wᵀxᵢ / ‖w‖`
    pub fn normalized_margin(&self, w: &[f64]) -> f64 {
        let nw = norm(w);
        (0..self.len()).map(|i| self.labels[i] * dot(self.points.row(i), w) / nw).fold(f64::INFINITY, f64::min)
    }
}

/// Gaussian points pushed along a random unit direction `w*` so that every
/// point has margin `γ + |w*ᵀx|` with respect to `w*`. Labels are fair coin
/// flips.
pub fn generate_separable(n: usize, d: usize, margin: f64, seed: u64) -> Result<SeparableDataset> {
    if n < 2 || d == 0 {
        return invalid("need n >= 2 points in at least one dimension");
    }
    if !(margin > 0.0 && margin.is_finite()) {
        return invalid(format!("margin must be positive, got {margin}"));
    }
    let mut rng = rng_from_seed(seed);
    let mut w_star: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let nw = norm(&w_star);
    if nw == 0.0 {
        return Err(Error::NumericalFailure("degenerate witness direction".into()));
    }
    w_star.iter_mut().for_each(|v| *v /= nw);

    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let y = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let mut x: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let proj = dot(&x, &w_star);
        let shift = y * (margin + proj.abs()) - proj;
        for (xi, wi) in x.iter_mut().zip(&w_star) {
            *xi += shift * wi;
        }
        data.extend(x);
        labels.push(y);
    }
    SeparableDataset::new(DenseMatrix::new(n, d, data)?, labels, Some(w_star))
}

/// Perceptron through the origin; returns a separating vector if one is
/// found within the epoch budget.
pub fn perceptron(points: &DenseMatrix, labels: &[f64], epochs: usize) -> Option<DenseVector> {
    let mut w = vec![0.0; points.cols()];
    for _ in 0..epochs {
        let mut mistakes = 0;
        for (i, &y) in labels.iter().enumerate() {
            let x = points.row(i);
            if y * dot(x, &w) <= 0.0 {
                for (wi, xi) in w.iter_mut().zip(x) {
                    *wi += y * xi;
                }
                mistakes += 1;
            }
        }
        if mistakes == 0 {
            return Some(w);
        }
    }
    None
}

/// Perceptron first, then the stored witness.
pub fn check_separable(data: &SeparableDataset) -> Result<()> {
    if perceptron(&data.points, &data.labels, PERCEPTRON_EPOCHS).is_some() {
        return Ok(());
    }
    match &data.witness {
        Some(w) if (0..data.len()).all(|i| data.labels[i] * dot(data.points.row(i), w) > 0.0) => Ok(()),
        _ => Err(Error::NotSeparable(format!(
            "perceptron found no separator in {PERCEPTRON_EPOCHS} epochs and no valid witness is stored"
        ))),
    }
}

/// Solution of `min ‖w‖²  s.t.  yᵢ wᵀxᵢ ≥ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SvmSolution {
    pub w: DenseVector,
    pub support: Vec<usize>,
    /// Dual variables; `w = Σᵢ αᵢ yᵢ xᵢ`.
    pub alpha: DenseVector,
    pub passes: usize,
}

impl SvmSolution {
    /// Primal objective `½‖w‖²`.
    pub fn objective(&self) -> f64 {
        0.5 * dot(&self.w, &self.w)
    }
}

/// Hard-margin SVM without intercept by dual coordinate ascent.
///
/// The dual is `max_{α ≥ 0} Σαᵢ − ½‖Σαᵢyᵢxᵢ‖²`. Without an intercept there is
/// no equality constraint, so each coordinate has a closed-form clipped
/// update `αᵢ ← max(0, αᵢ − (yᵢwᵀxᵢ − 1)/‖xᵢ‖²)`.
pub fn hard_margin_svm(data: &SeparableDataset) -> Result<SvmSolution> {
    check_separable(data)?;
    let (n, d) = (data.len(), data.dim());
    let sq: Vec<f64> = (0..n).map(|i| dot(data.points.row(i), data.points.row(i))).collect();
    if sq.contains(&0.0) {
        return Err(Error::NotSeparable("a point sits at the origin".into()));
    }
    let mut alpha = vec![0.0; n];
    let mut w = vec![0.0; d];
    let mut passes = 0;
    loop {
        if passes == SVM_MAX_PASSES {
            return Err(Error::NumericalFailure(format!("dual ascent did not converge in {SVM_MAX_PASSES} passes")));
        }
        passes += 1;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let (x, y) = (data.points.row(i), data.labels[i]);
            let g = y * dot(&w, x) - 1.0;
            let pg = if alpha[i] > 0.0 { g } else { g.min(0.0) };
            worst = worst.max(pg.abs());
            if pg != 0.0 {
                let next = (alpha[i] - g / sq[i]).max(0.0);
                let step = (next - alpha[i]) * y;
                for (wj, xj) in w.iter_mut().zip(x) {
                    *wj += step * xj;
                }
                alpha[i] = next;
            }
        }
        if !norm(&w).is_finite() || norm(&w) > 1e12 {
            return Err(Error::NotSeparable("dual objective is unbounded".into()));
        }
        if worst <= SVM_TOL {
            break;
        }
    }
    let mut w = vec![0.0; d];
    for (i, &a) in alpha.iter().enumerate() {
        for (wj, xj) in w.iter_mut().zip(data.points.row(i)) {
            *wj += a * data.labels[i] * xj;
        }
    }
    let support = (0..n).filter(|&i| alpha[i] > 0.0).collect();
    Ok(SvmSolution { w, support, alpha, passes })
}

/// `‖w/‖w‖ − r/‖r‖‖`, in `[0, 2]`.
pub fn direction_gap(w: &[f64], reference: &[f64]) -> Result<f64> {
    if w.len() != reference.len() {
        return invalid(format!("vectors of length {} and {}", w.len(), reference.len()));
    }
    let (nw, nr) = (norm(w), norm(reference));
    if nw == 0.0 || nr == 0.0 {
        return invalid("direction of a zero vector is undefined");
    }
    let sq: f64 = w.iter().zip(reference).map(|(a, b)| (a / nw - b / nr).powi(2)).sum();
    Ok(sq.sqrt())
}

#[derive(Clone, Debug)]
pub struct ImplicitBiasReport {
    pub trajectory: GdTrajectory,
    pub svm: SvmSolution,
    /// `(t, gap)` for each recorded step with `w_t ≠ 0`.
    pub gap_series: Vec<(usize, f64)>,
    pub final_gap: f64,
    pub success: bool,
}

/// Runs gradient descent from `w0 = 0` and tracks the direction gap to the
/// hard-margin SVM. `success` is `final_gap < gap_threshold`.
pub fn implicit_bias_run(
    data: &SeparableDataset,
    loss: SurrogateLoss,
    cfg: &GdConfig,
    gap_threshold: f64,
) -> Result<ImplicitBiasReport> {
    let svm = hard_margin_svm(data)?;
    let w0 = vec![0.0; data.dim()];
    let beta = effective_smoothness(loss, &data.points, &data.labels, &w0)?;
    let bound = max_stable_step(&data.points, beta)?;
    if cfg.step_size >= bound {
        return Err(Error::Config(format!("step size {} is not below the stable bound {bound}", cfg.step_size)));
    }
    let trajectory = gd_classification(&data.points, &data.labels, loss, &w0, cfg)?;
    let gap_series = trajectory
        .records
        .iter()
        .filter_map(|r| r.unit_direction.as_ref().map(|u| (r.t, direction_gap(u, &svm.w))))
        .map(|(t, g)| g.map(|g| (t, g)))
        .collect::<Result<Vec<_>>>()?;
    let final_gap = direction_gap(&trajectory.final_w, &svm.w)?;
    Ok(ImplicitBiasReport { success: final_gap < gap_threshold, trajectory, svm, gap_series, final_gap })
}
