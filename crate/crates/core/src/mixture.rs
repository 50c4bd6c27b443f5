//! Gaussian mixtures: density evaluation, MLE classification, seeded
//! sampling and estimation from labeled data.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{cholesky_lower, forward_substitution, SymmetricMatrix};
use crate::seed::rng_from_seed;

const LN_2PI: f64 = 1.837_877_066_409_345_5;
const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// One multivariate normal component with its Cholesky factor cached.
#[derive(Debug, Clone)]
pub struct GaussianComponent {
    mean: DVector<f64>,
    covariance: SymmetricMatrix,
    chol: DMatrix<f64>,
    log_det: f64,
}

impl GaussianComponent {
    pub fn new(mean: DVector<f64>, covariance: SymmetricMatrix) -> Result<Self> {
        if mean.len() != covariance.dim() {
            return Err(Error::DimensionMismatch {
                expected: covariance.dim(),
                found: mean.len(),
            });
        }
        let chol = cholesky_lower(&covariance)?;
        let log_det = 2.0 * chol.diagonal().iter().map(|p| p.ln()).sum::<f64>();
        Ok(Self {
            mean,
            covariance,
            chol,
            log_det,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &SymmetricMatrix {
        &self.covariance
    }

    /// Lower Cholesky factor of the covariance.
    pub fn cholesky(&self) -> &DMatrix<f64> {
        &self.chol
    }

    /// Squared Mahalanobis distance `(x−μ)ᵀΣ⁻¹(x−μ)`.
    pub fn mahalanobis_sq(&self, x: &[f64]) -> f64 {
        let diff: Vec<f64> = x.iter().zip(self.mean.iter()).map(|(a, b)| a - b).collect();
        forward_substitution(&self.chol, &diff)
            .iter()
            .map(|z| z * z)
            .sum()
    }

    /// Natural log of the density; `x` must have length `dim()`.
    pub fn log_density(&self, x: &[f64]) -> f64 {
        -0.5 * (self.dim() as f64 * LN_2PI + self.log_det + self.mahalanobis_sq(x))
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Writes `μ + G·z` into `out`.
    fn transform_into(&self, z: &[f64], out: &mut Vec<f64>) {
        let d = self.dim();
        for i in 0..d {
            let mut v = self.mean[i];
            for (j, zj) in z.iter().enumerate().take(i + 1) {
                v += self.chol[(i, j)] * zj;
            }
            out.push(v);
        }
    }
}

/// Multivariate normal density of `component` at `x`.
pub fn density(component: &GaussianComponent, x: &[f64]) -> Result<f64> {
    component.check_dim(x)?;
    Ok(component.log_density(x).exp())
}

/// `log f₂(x) − log f₁(x)`, evaluated in log space.
pub fn log_likelihood_ratio(
    c1: &GaussianComponent,
    c2: &GaussianComponent,
    x: &[f64],
) -> Result<f64> {
    c1.check_dim(x)?;
    c2.check_dim(x)?;
    Ok(c2.log_density(x) - c1.log_density(x))
}

/// `k` components sharing one dimension, with mixing weights.
#[derive(Debug, Clone)]
pub struct MixtureModel {
    components: Vec<GaussianComponent>,
    weights: Vec<f64>,
}

impl MixtureModel {
    pub fn new(components: Vec<GaussianComponent>, weights: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("mixture needs at least one component".into()));
        }
        if weights.len() != components.len() {
            return Err(Error::DimensionMismatch {
                expected: components.len(),
                found: weights.len(),
            });
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument("weights must be non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        let d = components[0].dim();
        if let Some(c) = components.iter().find(|c| c.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: c.dim(),
            });
        }
        Ok(Self {
            components,
            weights,
        })
    }

    pub fn equal_weights(components: Vec<GaussianComponent>) -> Result<Self> {
        let k = components.len().max(1);
        Self::new(components, vec![1.0 / k as f64; k])
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    /// Label (1-based) maximizing `log π_l + log f_l(x)`; ties go to the
    /// lowest index. `x` must have length `dim()`.
    pub(crate) fn classify_unchecked(&self, x: &[f64]) -> usize {
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (l, (c, &w)) in self.components.iter().zip(&self.weights).enumerate() {
            if w == 0.0 {
                continue;
            }
            let score = w.ln() + c.log_density(x);
            if score > best_score {
                best_score = score;
                best = l;
            }
        }
        best + 1
    }
}

/// MLE classification: the label `l` in `1..=k` maximizing `π_l·f_l(x)`.
pub fn classify_mle(model: &MixtureModel, x: &[f64]) -> Result<usize> {
    model.components[0].check_dim(x)?;
    Ok(model.classify_unchecked(x))
}

/// Points with known class labels in `1..=k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    dim: usize,
    k: usize,
    points: Vec<f64>,
    labels: Vec<usize>,
}

impl LabeledDataset {
    /// `points` is row-major `n × dim`.
    pub fn new(dim: usize, k: usize, points: Vec<f64>, labels: Vec<usize>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if labels.is_empty() {
            return Err(Error::InvalidArgument("dataset must be non-empty".into()));
        }
        if points.len() != labels.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: labels.len() * dim,
                found: points.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l == 0 || l > k) {
            return Err(Error::InvalidArgument(format!(
                "label {bad} outside 1..={k}"
            )));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("points must be finite".into()));
        }
        Ok(Self {
            dim,
            k,
            points,
            labels,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<usize>, k: usize) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: r.len(),
            });
        }
        Self::new(dim, k, rows.concat(), labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of classes; labels range over `1..=k`.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Rows carrying `label`, in dataset order.
    pub fn class_rows(&self, label: usize) -> impl Iterator<Item = &[f64]> {
        self.rows()
            .zip(&self.labels)
            .filter(move |(_, &l)| l == label)
            .map(|(r, _)| r)
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l - 1] += 1;
        }
        sizes
    }

    /// Sample mean of the rows carrying `label`.
    pub fn class_mean(&self, label: usize) -> Result<DVector<f64>> {
        let rows = sorted_rows(self.class_rows(label));
        if rows.is_empty() {
            return Err(Error::MissingLabel(label));
        }
        Ok(mean_of(&rows, self.dim))
    }

    /// Applies `f` to every point, keeping labels.
    pub fn map_points(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<Self> {
        let rows: Vec<Vec<f64>> = self.rows().map(&mut f).collect();
        Self::from_rows(&rows, self.labels.clone(), self.k)
    }
}

// Row order is canonicalized so estimates do not depend on input order.
fn sorted_rows<'a>(rows: impl Iterator<Item = &'a [f64]>) -> Vec<&'a [f64]> {
    let mut v: Vec<&[f64]> = rows.collect();
    v.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    v
}

fn mean_of(rows: &[&[f64]], dim: usize) -> DVector<f64> {
    let mut m = DVector::zeros(dim);
    for r in rows {
        for (acc, x) in m.iter_mut().zip(r.iter()) {
            *acc += x;
        }
    }
    m / rows.len() as f64
}

/// Draws `n` labeled points: the label from the weights (stream `seed`),
/// then `μ_l + G_l·z` with `z` from the per-cluster stream `seed ⊕ l`.
pub fn sample(model: &MixtureModel, n: usize, seed: u64) -> Result<LabeledDataset> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be positive".into()));
    }
    let mut label_rng = rng_from_seed(seed);
    let last_live = model
        .weights
        .iter()
        .rposition(|&w| w > 0.0)
        .expect("weights sum to one");
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = label_rng.random();
        let mut cum = 0.0;
        let mut chosen = last_live;
        for (l, &w) in model.weights.iter().enumerate() {
            cum += w;
            if u < cum && w > 0.0 {
                chosen = l;
                break;
            }
        }
        labels.push(chosen + 1);
    }

    let d = model.dim();
    let mut streams: Vec<_> = (1..=model.k())
        .map(|l| rng_from_seed(seed ^ l as u64))
        .collect();
    let mut points = Vec::with_capacity(n * d);
    let mut z = vec![0.0; d];
    for &l in &labels {
        let rng = &mut streams[l - 1];
        for zi in z.iter_mut() {
            *zi = rng.sample(StandardNormal);
        }
        model.components[l - 1].transform_into(&z, &mut points);
    }
    LabeledDataset::new(d, model.k(), points, labels)
}

/// Draws exactly `sizes[l]` points from component `l`, cluster by cluster,
/// each cluster from its own stream `seed ⊕ l`.
pub fn sample_stratified(
    components: &[GaussianComponent],
    sizes: &[usize],
    seed: u64,
) -> Result<LabeledDataset> {
    if components.is_empty() || sizes.len() != components.len() {
        return Err(Error::DimensionMismatch {
            expected: components.len(),
            found: sizes.len(),
        });
    }
    let d = components[0].dim();
    let n: usize = sizes.iter().sum();
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be positive".into()));
    }
    let mut points = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    let mut z = vec![0.0; d];
    for (l, (c, &size)) in components.iter().zip(sizes).enumerate() {
        if c.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: c.dim(),
            });
        }
        let mut rng = rng_from_seed(seed ^ (l as u64 + 1));
        for _ in 0..size {
            for zi in z.iter_mut() {
                *zi = rng.sample(StandardNormal);
            }
            c.transform_into(&z, &mut points);
            labels.push(l + 1);
        }
    }
    LabeledDataset::new(d, components.len(), points, labels)
}

/// Per-class sample means and covariances (divisor `n_l`), weights `n_l/n`.
pub fn estimate_from_labels(data: &LabeledDataset) -> Result<MixtureModel> {
    let d = data.dim();
    let n = data.len() as f64;
    let mut components = Vec::with_capacity(data.k());
    let mut weights = Vec::with_capacity(data.k());
    for label in 1..=data.k() {
        let rows = sorted_rows(data.class_rows(label));
        if rows.len() < d + 1 {
            return Err(Error::InsufficientClassSize {
                label,
                size: rows.len(),
                required: d + 1,
            });
        }
        let mean = mean_of(&rows, d);
        let mut cov = DMatrix::zeros(d, d);
        for r in &rows {
            for i in 0..d {
                let di = r[i] - mean[i];
                for j in i..d {
                    cov[(i, j)] += di * (r[j] - mean[j]);
                }
            }
        }
        cov /= rows.len() as f64;
        let cov = SymmetricMatrix::from_upper(cov);
        let component =
            GaussianComponent::new(mean, cov).map_err(|_| Error::SingularCovariance(label))?;
        components.push(component);
        weights.push(rows.len() as f64 / n);
    }
    // renormalize away rounding in n_l / n
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    MixtureModel::new(components, weights)
}

/// `(2π)^(−d/2)`, exposed for closed-form checks.
pub fn gaussian_normalizer(d: usize) -> f64 {
    (2.0 * PI).powf(-(d as f64) / 2.0)
}
