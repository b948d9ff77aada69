//! Experiment dispatch: config in, CSV table out.

use std::path::{Path, PathBuf};

use rand::Rng as _;
use rayon::prelude::*;

use super::config::{Experiment, ExperimentConfig};
use super::data::{load_mnist, make_synthetic_regression, mnist_dataset, LabeledDataset, SyntheticKind, DATA_DIR_ENV};
use super::emc::{emc_scan, gaussian_sampler, linear_train_error, rff_train_error};
use super::output::{format_f64, write_atomic, CsvTable};
use crate::descent::{effective_smoothness, max_stable_step, GdConfig, SurrogateLoss};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::polyfit::{bias_variance_decompose, eval_legendre_series, fit_curve, unit_grid, CubicSample};
use crate::rff::{kernel_approx_error, rff_double_descent_sweep, sample_rff};
use crate::seed::{derive_seed, derived_rng};
use crate::separable::{generate_separable, implicit_bias_run};
use crate::sparse_regression::{analytic_risk_random_subset, risk_curve, GaussianLinearProblem};
use crate::stats::median;

/// A finished run: the CSV table plus a few human-readable summary lines.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub table: CsvTable,
    pub summary: Vec<String>,
}

fn opt(v: Option<f64>) -> String {
    v.map(format_f64).unwrap_or_default()
}

/// Runs the configured experiment. `data_dir` is searched for MNIST files.
pub fn run_experiment(cfg: &ExperimentConfig, data_dir: Option<&Path>) -> Result<RunOutput> {
    match cfg.experiment {
        Experiment::SparseRisk => sparse_risk(cfg),
        Experiment::RffSweep => rff_sweep(cfg, data_dir),
        Experiment::KernelApprox => kernel_approx(cfg),
        Experiment::ImplicitBias => implicit_bias(cfg),
        Experiment::Polyfit => polyfit(cfg),
        Experiment::BiasVariance => bias_variance(cfg),
        Experiment::Emc => emc(cfg),
    }
}

/// Runs the experiment and writes the CSV (config echo included) to
/// `cfg.output`, or returns the bytes when no output path is set.
pub fn run(cfg: &ExperimentConfig) -> Result<(RunOutput, Vec<u8>)> {
    let data_dir = std::env::var_os(DATA_DIR_ENV).map(PathBuf::from);
    let out = run_experiment(cfg, data_dir.as_deref())?;
    let bytes = out.table.render(&cfg.echo())?;
    if let Some(path) = &cfg.output {
        write_atomic(path, &bytes)?;
    }
    Ok((out, bytes))
}

fn sparse_risk(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let d = cfg.usize("d")?;
    let step = cfg.usize("p_step")?.max(1);
    let noise_var = cfg.f64("noise_var")?;
    if noise_var < 0.0 {
        return Err(Error::InvalidInput(format!("noise_var must be nonnegative, got {noise_var}")));
    }
    let (w_norm_sq, n) = (cfg.f64("w_norm_sq")?, cfg.usize("n")?);
    let problem = GaussianLinearProblem::isotropic(d, w_norm_sq, noise_var.sqrt(), n)?;
    let mut grid: Vec<usize> = (0..=d).step_by(step).collect();
    if grid.last() != Some(&d) {
        grid.push(d);
    }
    let rows = risk_curve(&problem, &grid, cfg.usize("trials")?, cfg.usize("test_points")?, cfg.seed)?;
    let mut table = CsvTable::new(&["p", "analytic_risk", "mc_risk", "mc_stderr", "trials"]);
    for r in &rows {
        // Exact config values; the problem's stored w and σ carry rounding.
        let analytic = analytic_risk_random_subset(w_norm_sq, noise_var, d, n, r.p)?;
        table.push(vec![
            r.p.to_string(),
            analytic.to_string(),
            format_f64(r.mc_risk),
            format_f64(r.mc_stderr),
            r.trials.to_string(),
        ]);
    }
    Ok(RunOutput { table, summary: vec![format!("{} grid points", rows.len())] })
}

fn rff_dataset(cfg: &ExperimentConfig, data_dir: Option<&Path>) -> Result<(LabeledDataset, f64, &'static str)> {
    let source = cfg.str("source")?;
    let (n_train, n_test) = (cfg.usize("n_train")?, cfg.usize("n_test")?);
    let mnist = match (source, data_dir) {
        ("synthetic", _) => None,
        ("mnist" | "auto", Some(dir)) => load_mnist(dir)?,
        ("mnist" | "auto", None) => None,
        (other, _) => return Err(Error::Config(format!("unknown source '{other}'"))),
    };
    match mnist {
        Some((train, test)) => {
            Ok((mnist_dataset(&train, &test, n_train, n_test, cfg.seed)?, cfg.f64("bandwidth")?, "mnist"))
        }
        None if source == "mnist" => {
            Err(Error::InvalidInput(format!("MNIST files not found; set {DATA_DIR_ENV} to their directory")))
        }
        None => {
            let kind = SyntheticKind::RkhsTarget {
                dim: cfg.usize("synthetic_dim")?,
                centers: cfg.usize("synthetic_centers")?,
                bandwidth: cfg.f64("synthetic_target_bandwidth")?,
                n_train,
                n_test,
            };
            Ok((make_synthetic_regression(&kind, cfg.seed)?, cfg.f64("synthetic_bandwidth")?, "synthetic"))
        }
    }
}

fn rff_sweep(cfg: &ExperimentConfig, data_dir: Option<&Path>) -> Result<RunOutput> {
    let (data, bandwidth, source) = rff_dataset(cfg, data_dir)?;
    let rows = rff_double_descent_sweep(
        &data.train_test()?,
        &cfg.usizes("n_grid")?,
        bandwidth,
        cfg.usize("repeats")?,
        cfg.seed,
    )?;
    let mut table = CsvTable::new(&["n_features", "train_mse", "test_mse", "test_zero_one", "beta_norm", "repeats"]);
    for r in &rows {
        table.push(vec![
            r.n_features.to_string(),
            format_f64(r.train_mse),
            format_f64(r.test_mse),
            opt(r.test_zero_one),
            format_f64(r.beta_norm),
            r.repeats.to_string(),
        ]);
    }
    Ok(RunOutput { table, summary: vec![format!("dataset: {source}, bandwidth {bandwidth}")] })
}

fn kernel_approx(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let (dim, maps, bandwidth) = (cfg.usize("dim")?, cfg.usize("maps")?, cfg.f64("bandwidth")?);
    if maps == 0 {
        return Err(Error::InvalidInput("maps must be at least 1".into()));
    }
    let mut rng = derived_rng(cfg.seed, "kernel-approx-points", 0);
    let points = DenseMatrix::from_fn(cfg.usize("points")?, dim, |_, _| rng.gen::<f64>());
    let mut table = CsvTable::new(&["n_features", "median_max_abs", "median_mean_abs", "maps"]);
    for n_features in cfg.usizes("n_grid")? {
        let grid_seed = derive_seed(cfg.seed, "kernel-approx", n_features as u64);
        let errs = (0..maps)
            .into_par_iter()
            .map(|m| {
                let map = sample_rff(n_features, dim, bandwidth, derive_seed(grid_seed, "map", m as u64))?;
                kernel_approx_error(&map, &points)
            })
            .collect::<Result<Vec<_>>>()?;
        let max_abs: Vec<f64> = errs.iter().map(|e| e.max_abs).collect();
        let mean_abs: Vec<f64> = errs.iter().map(|e| e.mean_abs).collect();
        table.push(vec![
            n_features.to_string(),
            format_f64(median(&max_abs)),
            format_f64(median(&mean_abs)),
            maps.to_string(),
        ]);
    }
    Ok(RunOutput { table, summary: Vec::new() })
}

fn implicit_bias(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let loss_name = cfg.str("loss")?;
    let loss =
        SurrogateLoss::from_name(loss_name).ok_or_else(|| Error::Config(format!("unknown loss '{loss_name}'")))?;
    let data = generate_separable(
        cfg.usize("n")?,
        cfg.usize("d")?,
        cfg.f64("margin")?,
        derive_seed(cfg.seed, "separable", 0),
    )?;
    let beta = effective_smoothness(loss, &data.points, &data.labels, &vec![0.0; data.dim()])?;
    let step = cfg.f64("step_fraction")? * max_stable_step(&data.points, beta)?;
    let gd = GdConfig::new(step, cfg.usize("iterations")?)?.with_record_every(cfg.usize("record_every")?)?;
    let report = implicit_bias_run(&data, loss, &gd, cfg.f64("gap_threshold")?)?;
    let mut table = CsvTable::new(&["t", "loss", "w_norm", "min_margin", "direction_gap"]);
    let mut gaps = report.gap_series.iter().peekable();
    for r in &report.trajectory.records {
        let gap = match gaps.peek() {
            Some(&&(t, g)) if t == r.t => {
                gaps.next();
                Some(g)
            }
            _ => None,
        };
        table.push(vec![r.t.to_string(), format_f64(r.loss), format_f64(r.weight_norm), opt(r.min_margin), opt(gap)]);
    }
    Ok(RunOutput {
        table,
        summary: vec![
            format!("step size {step}"),
            format!(
                "final direction gap {} ({})",
                report.final_gap,
                if report.success { "converged" } else { "not converged" }
            ),
        ],
    })
}

fn polyfit(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let sample = CubicSample::draw(cfg.usize("n")?, cfg.f64("noise")?, &mut derived_rng(cfg.seed, "polyfit", 0));
    let grid_points = cfg.usize("grid_points")?;
    if grid_points < 2 {
        return Err(Error::InvalidInput("grid_points must be at least 2".into()));
    }
    let curve = fit_curve(&sample, cfg.usize("degree")?, &unit_grid(grid_points))?;
    let mut table = CsvTable::new(&["x", "truth", "prediction"]);
    for (x, t, p) in curve {
        table.push(vec![format_f64(x), format_f64(t), format_f64(p)]);
    }
    Ok(RunOutput { table, summary: Vec::new() })
}

fn bias_variance(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let truth = cfg.f64s("truth")?;
    let (n, sigma, trials) = (cfg.usize("n")?, cfg.f64("sigma")?, cfg.usize("trials")?);
    let mut table = CsvTable::new(&["degree", "bias_sq", "variance", "noise", "total", "total_stderr", "trials"]);
    for degree in cfg.usizes("degrees")? {
        let f = |x: f64| eval_legendre_series(&truth, &[x])[0];
        let bv = bias_variance_decompose(
            f,
            degree,
            n,
            sigma,
            trials,
            derive_seed(cfg.seed, "bias-variance", degree as u64),
        )?;
        table.push(vec![
            degree.to_string(),
            format_f64(bv.bias_sq),
            format_f64(bv.variance),
            format_f64(bv.noise),
            format_f64(bv.total),
            format_f64(bv.total_stderr),
            bv.trials.to_string(),
        ]);
    }
    Ok(RunOutput { table, summary: Vec::new() })
}

fn emc(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let grid: Vec<usize> = (1..=cfg.usize("n_max")?).collect();
    let sampler = gaussian_sampler(cfg.usize("d")?);
    let (eps, trials) = (cfg.f64("epsilon")?, cfg.usize("trials")?);
    let scan = match cfg.str("model")? {
        "linear" => emc_scan(linear_train_error, sampler, eps, &grid, trials, cfg.seed)?,
        "rff" => {
            let proc =
                rff_train_error(cfg.usize("n_features")?, cfg.f64("bandwidth")?, derive_seed(cfg.seed, "emc-map", 0));
            emc_scan(proc, sampler, eps, &grid, trials, cfg.seed)?
        }
        other => return Err(Error::Config(format!("unknown model '{other}'"))),
    };
    let mut table = CsvTable::new(&["n", "mean_train_error", "within_epsilon"]);
    for s in &scan.steps {
        table.push(vec![s.n.to_string(), format_f64(s.mean_train_error), s.within.to_string()]);
    }
    Ok(RunOutput { table, summary: vec![format!("emc = {}", scan.emc)] })
}
