//! Full-batch gradient descent with trajectory instrumentation.
//!
//! Two objectives are supported:
//!
//! * least squares `½‖Xw − y‖²`, whose iterates started in the row space of
//!   `X` converge to the minimum-norm solution `X⁺y`;
//! * the separable classification loss `Σᵢ ℓ(yᵢ wᵀxᵢ)` for a
//!   [`SurrogateLoss`] with an exponential tail, where the loss goes to zero
//!   while `‖w_t‖` grows without bound.

use crate::error::{invalid, Error, Result};
use crate::linalg::{svd, DenseMatrix, DenseVector};
use crate::stats::{dot, norm};

/// Exponential-loss margins are clamped from below at this value before
/// exponentiating.
pub const EXP_MARGIN_CLAMP: f64 = -50.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GdConfig {
    pub step_size: f64,
    pub max_iters: usize,
    /// Least squares stops once `‖∇L‖ ≤ grad_tol · (1 + ‖Xᵀy‖)`.
    pub grad_tol: f64,
    pub record_every: usize,
}

impl GdConfig {
    pub const DEFAULT_GRAD_TOL: f64 = 1e-10;
    pub const DEFAULT_RECORD_EVERY: usize = 100;

    pub fn new(step_size: f64, max_iters: usize) -> Result<Self> {
        let cfg =
            Self { step_size, max_iters, grad_tol: Self::DEFAULT_GRAD_TOL, record_every: Self::DEFAULT_RECORD_EVERY };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_grad_tol(mut self, tol: f64) -> Result<Self> {
        self.grad_tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn with_record_every(mut self, every: usize) -> Result<Self> {
        self.record_every = every;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::Config(format!("step size must be positive, got {}", self.step_size)));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if !(self.grad_tol >= 0.0) {
            return Err(Error::Config(format!("grad_tol must be nonnegative, got {}", self.grad_tol)));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GdRecord {
    pub t: usize,
    pub loss: f64,
    pub weight_norm: f64,
    /// `w_t / ‖w_t‖`, absent while `w_t = 0`.
    pub unit_direction: Option<DenseVector>,
    /// `minᵢ yᵢ w_tᵀxᵢ / ‖w_t‖`; only recorded for classification runs.
    pub min_margin: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GdTrajectory {
    pub records: Vec<GdRecord>,
    pub final_w: DenseVector,
    pub converged: bool,
    /// Number of update steps actually taken.
    pub iterations: usize,
}

impl GdTrajectory {
    pub fn last(&self) -> &GdRecord {
        self.records.last().expect("trajectories always hold at least one record")
    }

    /// The recorded entry for step `t`, if that step was recorded.
    pub fn at(&self, t: usize) -> Option<&GdRecord> {
        self.records.iter().find(|r| r.t == t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Smoothness {
    Bounded(f64),
    /// No global Lipschitz bound on `ℓ'`; see [`effective_smoothness`].
    Unbounded,
}

/// Margin losses satisfying positivity, monotonicity and a tight exponential tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurrogateLoss {
    /// `ℓ(u) = e^{-u}`
    Exponential,
    /// `ℓ(u) = ln(1 + e^{-u})`
    Logistic,
}

impl SurrogateLoss {
    pub fn name(self) -> &'static str {
        match self {
            SurrogateLoss::Exponential => "exponential",
            SurrogateLoss::Logistic => "logistic",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "exponential" | "exp" => Some(SurrogateLoss::Exponential),
            "logistic" => Some(SurrogateLoss::Logistic),
            _ => None,
        }
    }

    pub fn value(self, u: f64) -> f64 {
        match self {
            SurrogateLoss::Exponential => (-u.max(EXP_MARGIN_CLAMP)).exp(),
            SurrogateLoss::Logistic => {
                if u > 0.0 {
                    (-u).exp().ln_1p()
                } else {
                    -u + u.exp().ln_1p()
                }
            }
        }
    }

    pub fn derivative(self, u: f64) -> f64 {
        match self {
            SurrogateLoss::Exponential => -(-u.max(EXP_MARGIN_CLAMP)).exp(),
            SurrogateLoss::Logistic => {
                if u > 0.0 {
                    let e = (-u).exp();
                    -e / (1.0 + e)
                } else {
                    -1.0 / (1.0 + u.exp())
                }
            }
        }
    }

    pub fn second_derivative(self, u: f64) -> f64 {
        match self {
            SurrogateLoss::Exponential => (-u.max(EXP_MARGIN_CLAMP)).exp(),
            SurrogateLoss::Logistic => {
                let s = -self.derivative(u);
                s * (1.0 - s)
            }
        }
    }

    pub fn smoothness(self) -> Smoothness {
        match self {
            SurrogateLoss::Exponential => Smoothness::Unbounded,
            SurrogateLoss::Logistic => Smoothness::Bounded(0.25),
        }
    }

    /// `−ℓ'(u)·e^u`; equal to 1 for the exponential loss and within
    /// `[1 − e^{-u}, 1]` for the logistic loss.
    pub fn tail_ratio(self, u: f64) -> f64 {
        -self.derivative(u) * u.exp()
    }
}

/// `(½‖Xw − y‖², Xᵀ(Xw − y))`
pub fn least_squares_loss_grad(x: &DenseMatrix, y: &[f64], w: &[f64]) -> Result<(f64, DenseVector)> {
    let mut r = x.matvec(w)?;
    if r.len() != y.len() {
        return invalid(format!("design has {} rows but target has {} entries", x.rows(), y.len()));
    }
    for (ri, yi) in r.iter_mut().zip(y) {
        *ri -= yi;
    }
    let loss = 0.5 * dot(&r, &r);
    Ok((loss, x.tr_matvec(&r)?))
}

/// `(Σᵢ ℓ(mᵢ), Σᵢ ℓ'(mᵢ) yᵢ xᵢ, m)` with margins `mᵢ = yᵢ wᵀxᵢ`.
pub fn classification_loss_grad(
    x: &DenseMatrix,
    labels: &[f64],
    loss: SurrogateLoss,
    w: &[f64],
) -> Result<(f64, DenseVector, DenseVector)> {
    let scores = x.matvec(w)?;
    if scores.len() != labels.len() {
        return invalid(format!("{} points but {} labels", x.rows(), labels.len()));
    }
    let margins: Vec<f64> = scores.iter().zip(labels).map(|(s, y)| s * y).collect();
    let value = margins.iter().map(|&m| loss.value(m)).sum();
    let coef: Vec<f64> = margins.iter().zip(labels).map(|(&m, y)| loss.derivative(m) * y).collect();
    Ok((value, x.tr_matvec(&coef)?, margins))
}

/// `2 / (β σ_max(X)²)`: gradient descent on a β-smooth margin loss is stable
/// for step sizes strictly below this value.
pub fn max_stable_step(x: &DenseMatrix, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return invalid(format!("smoothness must be positive, got {beta}"));
    }
    let smax = svd(x)?.sigma_max();
    if smax == 0.0 {
        return invalid("zero design matrix has no curvature bound");
    }
    Ok(2.0 / (beta * smax * smax))
}

/// Curvature bound used for step-size checks. Logistic loss reports its global
/// constant 1/4; for the exponential loss this is `maxᵢ ℓ''(yᵢ wᵀxᵢ)` at `w`.
pub fn effective_smoothness(loss: SurrogateLoss, x: &DenseMatrix, labels: &[f64], w: &[f64]) -> Result<f64> {
    match loss.smoothness() {
        Smoothness::Bounded(b) => Ok(b),
        Smoothness::Unbounded => {
            let scores = x.matvec(w)?;
            Ok(scores.iter().zip(labels).map(|(s, y)| loss.second_derivative(s * y)).fold(0.0, f64::max))
        }
    }
}

fn check_labels(labels: &[f64]) -> Result<()> {
    if let Some((i, v)) = labels.iter().enumerate().find(|(_, &v)| v != 1.0 && v != -1.0) {
        return invalid(format!("label {i} is {v}, expected +1 or -1"));
    }
    Ok(())
}

fn record(t: usize, loss: f64, w: &[f64], margins: Option<&[f64]>) -> GdRecord {
    let weight_norm = norm(w);
    let unit_direction = (weight_norm > 0.0).then(|| w.iter().map(|v| v / weight_norm).collect());
    let min_margin = match margins {
        Some(m) if weight_norm > 0.0 => Some(m.iter().copied().fold(f64::INFINITY, f64::min) / weight_norm),
        _ => None,
    };
    GdRecord { t, loss, weight_norm, unit_direction, min_margin }
}

/// Gradient descent on `½‖Xw − y‖²`.
///
/// The step size must satisfy `η < 1/σ_max(X)²`.
pub fn gd_least_squares(x: &DenseMatrix, y: &[f64], w0: &[f64], cfg: &GdConfig) -> Result<GdTrajectory> {
    cfg.validate()?;
    if w0.len() != x.cols() {
        return invalid(format!("w0 has length {} but design has {} columns", w0.len(), x.cols()));
    }
    if y.len() != x.rows() {
        return invalid(format!("design has {} rows but target has {} entries", x.rows(), y.len()));
    }
    let smax = svd(x)?.sigma_max();
    if smax > 0.0 && cfg.step_size >= 1.0 / (smax * smax) {
        return Err(Error::Config(format!(
            "step size {} violates eta < 1/sigma_max^2 = {}",
            cfg.step_size,
            1.0 / (smax * smax)
        )));
    }

    let threshold = cfg.grad_tol * (1.0 + norm(&x.tr_matvec(y)?));
    let mut w = w0.to_vec();
    let mut records = Vec::new();
    let (initial, _) = least_squares_loss_grad(x, y, &w)?;
    let blowup = 10.0 * initial.max(1e-12 * (1.0 + dot(y, y)));
    let mut converged;
    let mut t = 0;
    loop {
        let (loss, grad) = least_squares_loss_grad(x, y, &w)?;
        if loss > blowup || !loss.is_finite() {
            return Err(Error::Divergence { iteration: t, loss, initial });
        }
        let at_end = t == cfg.max_iters;
        converged = norm(&grad) <= threshold;
        if t % cfg.record_every == 0 || at_end || converged {
            records.push(record(t, loss, &w, None));
        }
        if converged || at_end {
            break;
        }
        for (wi, gi) in w.iter_mut().zip(&grad) {
            *wi -= cfg.step_size * gi;
        }
        t += 1;
    }
    Ok(GdTrajectory { records, final_w: w, converged, iterations: t })
}

/// Gradient descent on `Σᵢ ℓ(yᵢ wᵀxᵢ)` for `max_iters` steps.
///
/// Classification runs never report convergence. For the exponential loss the
/// curvature bound is re-evaluated whenever the loss increases; if the step
/// size is no longer below [`max_stable_step`] there, the run fails with a
/// configuration error.
pub fn gd_classification(
    x: &DenseMatrix,
    labels: &[f64],
    loss: SurrogateLoss,
    w0: &[f64],
    cfg: &GdConfig,
) -> Result<GdTrajectory> {
    cfg.validate()?;
    check_labels(labels)?;
    if labels.len() != x.rows() {
        return invalid(format!("{} points but {} labels", x.rows(), labels.len()));
    }
    if w0.len() != x.cols() {
        return invalid(format!("w0 has length {} but points have dimension {}", w0.len(), x.cols()));
    }
    let smax_sq = match loss.smoothness() {
        Smoothness::Unbounded => Some(svd(x)?.sigma_max().powi(2)),
        Smoothness::Bounded(_) => None,
    };

    let mut w = w0.to_vec();
    let mut records = Vec::new();
    let (initial, _, _) = classification_loss_grad(x, labels, loss, &w)?;
    let mut prev = initial;
    for t in 0..=cfg.max_iters {
        let (value, grad, margins) = classification_loss_grad(x, labels, loss, &w)?;
        if value > 10.0 * initial || !value.is_finite() {
            return Err(Error::Divergence { iteration: t, loss: value, initial });
        }
        if value > prev {
            if let Some(s2) = smax_sq {
                let beta = effective_smoothness(loss, x, labels, &w)?;
                if s2 > 0.0 && cfg.step_size >= 2.0 / (beta * s2) {
                    return Err(Error::Config(format!(
                        "step size {} exceeds the local stability bound {} at iteration {t}",
                        cfg.step_size,
                        2.0 / (beta * s2)
                    )));
                }
            }
        }
        prev = value;
        if t % cfg.record_every == 0 || t == cfg.max_iters {
            records.push(record(t, value, &w, Some(&margins)));
        }
        if t == cfg.max_iters {
            break;
        }
        for (wi, gi) in w.iter_mut().zip(&grad) {
            *wi -= cfg.step_size * gi;
        }
    }
    Ok(GdTrajectory { records, final_w: w, converged: false, iterations: cfg.max_iters })
}
