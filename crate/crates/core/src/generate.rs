//! Synthetic mixture generators: the parametrized planar design (centers on
//! a circle, rotated elliptical clusters) and random `d`-dimensional mixtures.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;
use crate::mixture::{sample_stratified, GaussianComponent, LabeledDataset, MixtureModel};
use crate::seed::rng_from_seed;

/// Parameters of the planar generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoDimConfig {
    /// Radius of the circle carrying the cluster centers.
    pub r: f64,
    /// Leading covariance eigenvalue (within-cluster dispersion).
    pub lambda: f64,
    /// Ratio of the second to the leading eigenvalue, in `(0, 1]`.
    pub q: f64,
    pub k: usize,
    /// Points drawn per cluster.
    pub sizes: Vec<usize>,
}

impl TwoDimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r >= 0.0) || !self.r.is_finite() {
            return Err(Error::InvalidArgument(format!("r must be >= 0, got {}", self.r)));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "lambda must be > 0, got {}",
                self.lambda
            )));
        }
        if !(self.q > 0.0 && self.q <= 1.0) {
            return Err(Error::InvalidArgument(format!("q must lie in (0, 1], got {}", self.q)));
        }
        if self.k < 2 {
            return Err(Error::InvalidArgument(format!("k must be >= 2, got {}", self.k)));
        }
        if self.sizes.len() != self.k || self.sizes.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "sizes must hold {} positive counts",
                self.k
            )));
        }
        Ok(())
    }
}

/// Center of cluster `l` (0-based) out of `k` on the circle of radius `r`.
pub fn circle_center(r: f64, l: usize, k: usize) -> [f64; 2] {
    let angle = l as f64 * 2.0 * PI / k as f64;
    [r * angle.sin(), r * angle.cos()]
}

/// `R(α)·diag(first, second)·R(α)ᵀ`, written out in closed form.
pub fn rotated_covariance(alpha: f64, first: f64, second: f64) -> SymmetricMatrix {
    let (s, c) = alpha.sin_cos();
    let xx = first * c * c + second * s * s;
    let yy = first * s * s + second * c * c;
    let xy = (first - second) * s * c;
    SymmetricMatrix::from_upper(DMatrix::from_row_slice(2, 2, &[xx, xy, 0.0, yy]))
}

/// Planar mixture with centers on a circle of radius `r` and per-cluster
/// rotated covariances with eigenvalues `(first, second)`.
pub fn circle_mixture(
    r: f64,
    alphas: &[f64],
    first: f64,
    second: f64,
) -> Result<MixtureModel> {
    let k = alphas.len();
    let components = alphas
        .iter()
        .enumerate()
        .map(|(l, &alpha)| {
            let mu = circle_center(r, l, k);
            GaussianComponent::new(
                DVector::from_column_slice(&mu),
                rotated_covariance(alpha, first, second),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    MixtureModel::equal_weights(components)
}

/// Builds the planar mixture for `config` and rotation angles `alphas`
/// (one per cluster), then samples `config.sizes[l]` points per cluster.
pub fn generate_two_dim(
    config: &TwoDimConfig,
    alphas: &[f64],
    seed: u64,
) -> Result<(MixtureModel, LabeledDataset)> {
    config.validate()?;
    if alphas.len() != config.k {
        return Err(Error::InvalidArgument(format!(
            "expected {} rotation angles, got {}",
            config.k,
            alphas.len()
        )));
    }
    let model = circle_mixture(config.r, alphas, config.lambda, config.q * config.lambda)?;
    let data = sample_stratified(model.components(), &config.sizes, seed)?;
    Ok((model, data))
}

/// Parameters of the random `d`-dimensional mixture generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomMixtureConfig {
    pub d: usize,
    pub k: usize,
    pub seed: u64,
    /// Covariance eigenvalues are drawn uniformly from `[lo, hi]`.
    pub eigenvalue_range: (f64, f64),
}

impl RandomMixtureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidArgument(format!("k must be >= 2, got {}", self.k)));
        }
        if self.d < self.k {
            return Err(Error::InvalidArgument(format!(
                "dimension {} must exceed k - 1 = {}",
                self.d,
                self.k - 1
            )));
        }
        let (lo, hi) = self.eigenvalue_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "eigenvalue range must satisfy 0 < lo <= hi, got ({lo}, {hi})"
            )));
        }
        Ok(())
    }

    /// Half-width of the box holding every mean coordinate, `3√d`.
    pub fn mean_bound(&self) -> f64 {
        3.0 * (self.d as f64).sqrt()
    }
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `R`'s diagonal folded into `Q`.
pub fn random_orthogonal(d: usize, rng: &mut crate::seed::Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Random means and covariances for `config`.
///
/// Means are drawn uniformly, then every coordinate is mapped affinely onto
/// `[−3√d, 3√d]` across the `k` means. Covariances are `Q·diag(w)·Qᵀ` with
/// `Q` random orthogonal and `w` uniform on the eigenvalue range.
pub fn generate_random_mixture(config: &RandomMixtureConfig) -> Result<MixtureModel> {
    config.validate()?;
    let (d, k) = (config.d, config.k);
    let mut rng = rng_from_seed(config.seed);

    let raw: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..d).map(|_| rng.random::<f64>()).collect())
        .collect();
    let bound = config.mean_bound();
    let mut means = vec![DVector::zeros(d); k];
    for j in 0..d {
        let lo = raw.iter().map(|m| m[j]).fold(f64::INFINITY, f64::min);
        let hi = raw.iter().map(|m| m[j]).fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        for (mean, r) in means.iter_mut().zip(&raw) {
            mean[j] = if span > 0.0 {
                (-bound + 2.0 * bound * (r[j] - lo) / span).clamp(-bound, bound)
            } else {
                0.0
            };
        }
    }

    let (lo, hi) = config.eigenvalue_range;
    let components = means
        .into_iter()
        .map(|mean| {
            let q = random_orthogonal(d, &mut rng);
            let w: Vec<f64> = (0..d)
                .map(|_| if hi > lo { rng.random_range(lo..=hi) } else { lo })
                .collect();
            let cov = &q * DMatrix::from_diagonal(&DVector::from_vec(w)) * q.transpose();
            GaussianComponent::new(mean, SymmetricMatrix::new(cov)?)
        })
        .collect::<Result<Vec<_>>>()?;
    MixtureModel::equal_weights(components)
}
