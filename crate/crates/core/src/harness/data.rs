//! Labelled datasets: MNIST from IDX files and synthetic regression targets.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use super::idx::load_idx;
use crate::error::{invalid, Error, Result};
use crate::linalg::DenseMatrix;
use crate::rff::{KernelExpansion, TrainTest};
use crate::seed::{derive_seed, derived_rng};
use crate::sparse_regression::{sample_dataset, GaussianLinearProblem};

/// Environment variable naming the directory that holds the MNIST IDX files.
pub const DATA_DIR_ENV: &str = "DESCENTLAB_DATA_DIR";

pub const MNIST_CLASSES: usize = 10;
const MNIST_FILES: [&str; 4] =
    ["train-images-idx3-ubyte", "train-labels-idx1-ubyte", "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"];

#[derive(Clone, Debug, PartialEq)]
pub enum Labels {
    Real(Vec<f64>),
    Signs(Vec<f64>),
    Classes { classes: Vec<usize>, n_classes: usize },
}

impl Labels {
    pub fn len(&self) -> usize {
        match self {
            Labels::Real(v) | Labels::Signs(v) => v.len(),
            Labels::Classes { classes, .. } => classes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    pub features: DenseMatrix,
    pub labels: Labels,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    /// Human-readable note on how features were scaled.
    pub scaling: String,
}

impl LabeledDataset {
    pub fn new(
        features: DenseMatrix,
        labels: Labels,
        train: Vec<usize>,
        test: Vec<usize>,
        scaling: &str,
    ) -> Result<Self> {
        let n = features.rows();
        if labels.len() != n {
            return invalid(format!("{n} feature rows but {} labels", labels.len()));
        }
        let mut seen = vec![false; n];
        for &i in train.iter().chain(&test) {
            if i >= n || seen[i] {
                return invalid(format!("split index {i} out of range or repeated"));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return invalid("train and test splits do not cover the dataset");
        }
        if let Labels::Signs(s) = &labels {
            if s.iter().any(|&v| v != 1.0 && v != -1.0) {
                return invalid("sign labels must be +1 or -1");
            }
        }
        if let Labels::Classes { classes, n_classes } = &labels {
            if classes.iter().any(|c| c >= n_classes) {
                return invalid("class index out of range");
            }
        }
        Ok(Self { features, labels, train, test, scaling: scaling.to_string() })
    }

    fn targets(&self, rows: &[usize]) -> DenseMatrix {
        match &self.labels {
            Labels::Real(v) | Labels::Signs(v) => {
                DenseMatrix::column_vector(&rows.iter().map(|&i| v[i]).collect::<Vec<_>>())
            }
            Labels::Classes { classes, n_classes } => {
                DenseMatrix::from_fn(rows.len(), *n_classes, |r, k| f64::from(u8::from(classes[rows[r]] == k)))
            }
        }
    }

    /// Split into matrices; class labels become one-hot targets.
    pub fn train_test(&self) -> Result<TrainTest> {
        let test_classes = match &self.labels {
            Labels::Classes { classes, .. } => Some(self.test.iter().map(|&i| classes[i]).collect()),
            _ => None,
        };
        Ok(TrainTest {
            x_train: self.features.select_rows(&self.train)?,
            y_train: self.targets(&self.train),
            x_test: self.features.select_rows(&self.test)?,
            y_test: self.targets(&self.test),
            test_classes,
        })
    }
}

/// Pixels of one split, scaled to `[0, 1]`.
#[derive(Clone, Debug)]
pub struct MnistSplit {
    pub images: DenseMatrix,
    pub labels: Vec<usize>,
}

fn load_mnist_split(images: &Path, labels: &Path) -> Result<MnistSplit> {
    let img = load_idx(images)?;
    let lab = load_idx(labels)?;
    if img.dims.len() != 3 || lab.dims.len() != 1 {
        return Err(Error::Format("expected a 3-D image tensor and a 1-D label tensor".into()));
    }
    if img.len() != lab.len() {
        return Err(Error::Format(format!("{} images but {} labels", img.len(), lab.len())));
    }
    if let Some(bad) = lab.data.iter().find(|&&c| usize::from(c) >= MNIST_CLASSES) {
        return Err(Error::Format(format!("label {bad} outside 0..10")));
    }
    let images =
        DenseMatrix::new(img.len(), img.item_size(), img.data.iter().map(|&b| f64::from(b) / 255.0).collect())?;
    Ok(MnistSplit { images, labels: lab.data.iter().map(|&c| usize::from(c)).collect() })
}

/// Loads `(train, test)` from the standard file names, or `None` when any is missing.
pub fn load_mnist(dir: &Path) -> Result<Option<(MnistSplit, MnistSplit)>> {
    let paths: Vec<_> = MNIST_FILES.iter().map(|f| dir.join(f)).collect();
    if paths.iter().any(|p| !p.is_file()) {
        return Ok(None);
    }
    Ok(Some((load_mnist_split(&paths[0], &paths[1])?, load_mnist_split(&paths[2], &paths[3])?)))
}

/// `total` indices with classes as balanced as the pool allows, in
/// ascending order. Each class's pool is shuffled with its own stream.
pub fn stratified_subsample(labels: &[usize], n_classes: usize, total: usize, seed: u64) -> Result<Vec<usize>> {
    if total > labels.len() {
        return invalid(format!("requested {total} of {} items", labels.len()));
    }
    let mut pools: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &c) in labels.iter().enumerate() {
        pools.get_mut(c).ok_or_else(|| Error::InvalidInput(format!("class {c} out of range")))?.push(i);
    }
    for (c, pool) in pools.iter_mut().enumerate() {
        pool.shuffle(&mut derived_rng(seed, "stratify", c as u64));
    }
    let mut quota = vec![0usize; n_classes];
    let mut remaining = total;
    while remaining > 0 {
        let before = remaining;
        for c in 0..n_classes {
            if remaining > 0 && quota[c] < pools[c].len() {
                quota[c] += 1;
                remaining -= 1;
            }
        }
        debug_assert!(remaining < before);
    }
    let mut picked: Vec<usize> = pools.iter().zip(&quota).flat_map(|(pool, &q)| pool[..q].iter().copied()).collect();
    picked.sort_unstable();
    Ok(picked)
}

/// Stratified MNIST train/test subsample as one dataset.
pub fn mnist_dataset(
    train: &MnistSplit,
    test: &MnistSplit,
    n_train: usize,
    n_test: usize,
    seed: u64,
) -> Result<LabeledDataset> {
    let tr = stratified_subsample(&train.labels, MNIST_CLASSES, n_train, derive_seed(seed, "mnist-train", 0))?;
    let te = stratified_subsample(&test.labels, MNIST_CLASSES, n_test, derive_seed(seed, "mnist-test", 0))?;
    let d = train.images.cols();
    let mut data = Vec::with_capacity((n_train + n_test) * d);
    let mut classes = Vec::with_capacity(n_train + n_test);
    for (split, idx) in [(train, &tr), (test, &te)] {
        for &i in idx {
            data.extend_from_slice(split.images.row(i));
            classes.push(split.labels[i]);
        }
    }
    LabeledDataset::new(
        DenseMatrix::new(n_train + n_test, d, data)?,
        Labels::Classes { classes, n_classes: MNIST_CLASSES },
        (0..n_train).collect(),
        (n_train..n_train + n_test).collect(),
        "pixels / 255",
    )
}

#[derive(Clone, Debug)]
pub enum SyntheticKind {
    /// Isotropic Gaussian design with a linear target.
    GaussianLinear { problem: GaussianLinearProblem, n_test: usize },
    /// Noiseless target `Σ_k α_k k(c_k, x)` with `centers` random centres in
    /// `[0,1]^dim` and `α_k ~ N(0,1)`.
    RkhsTarget { dim: usize, centers: usize, bandwidth: f64, n_train: usize, n_test: usize },
}

/// Random kernel expansion drawn from stream `"rkhs-target"`.
pub fn random_rkhs_target(dim: usize, centers: usize, bandwidth: f64, seed: u64) -> Result<KernelExpansion> {
    if dim == 0 || centers == 0 {
        return invalid("rkhs target needs positive dimension and centre count");
    }
    let mut rng = derived_rng(seed, "rkhs-target", 0);
    let c = DenseMatrix::from_fn(centers, dim, |_, _| rng.gen::<f64>());
    let alpha = (0..centers).map(|_| rng.sample(StandardNormal)).collect();
    KernelExpansion::new(c, alpha, bandwidth)
}

/// Inputs uniform on `[0,1]^d` labelled by `target`; train rows come first.
pub fn rkhs_target_dataset(
    target: &KernelExpansion,
    n_train: usize,
    n_test: usize,
    seed: u64,
) -> Result<LabeledDataset> {
    let n = n_train + n_test;
    let mut rng = derived_rng(seed, "rkhs-inputs", 0);
    let x = DenseMatrix::from_fn(n, target.centers.cols(), |_, _| rng.gen::<f64>());
    let y = target.eval_rows(&x)?;
    LabeledDataset::new(x, Labels::Real(y), (0..n_train).collect(), (n_train..n).collect(), "uniform on the unit cube")
}

pub fn make_synthetic_regression(kind: &SyntheticKind, seed: u64) -> Result<LabeledDataset> {
    match kind {
        SyntheticKind::GaussianLinear { problem, n_test } => {
            let (x_tr, y_tr) = sample_dataset(problem, derive_seed(seed, "train", 0));
            let test_problem = GaussianLinearProblem::new(problem.w_true.clone(), problem.noise_scale, *n_test)?;
            let (x_te, y_te) = sample_dataset(&test_problem, derive_seed(seed, "test", 0));
            let n = problem.n + n_test;
            let mut data = x_tr.into_vec();
            data.extend(x_te.into_vec());
            let mut y = y_tr;
            y.extend(y_te);
            LabeledDataset::new(
                DenseMatrix::new(n, problem.dim(), data)?,
                Labels::Real(y),
                (0..problem.n).collect(),
                (problem.n..n).collect(),
                "standard normal",
            )
        }
        SyntheticKind::RkhsTarget { dim, centers, bandwidth, n_train, n_test } => {
            let target = random_rkhs_target(*dim, *centers, *bandwidth, seed)?;
            rkhs_target_dataset(&target, *n_train, *n_test, seed)
        }
    }
}
