//! The integral overlap `MLE_err = 1 − ∫ max_l π_l f_l(x) dx` and the
//! between-within e-distance of two labeled point sets.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::sym_eigendecomposition;
use crate::mixture::{sample, LabeledDataset, MixtureModel};
use crate::seed::derive_seed;

/// Samples per Monte Carlo substream. Substreams are seeded by index, so
/// the estimate does not depend on how many workers process them.
pub const MC_CHUNK: usize = 1 << 16;

pub const MIN_MC_SAMPLES: usize = 1000;
pub const MIN_QUADRATURE_CELLS: usize = 200;

/// Quadrature box half-width, in standard deviations of the widest axis.
pub const QUADRATURE_SIGMAS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapMethod {
    MonteCarlo,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapEstimate {
    /// Estimated `MLE_err` in `[0, 1]`.
    pub value: f64,
    /// Binomial standard error for Monte Carlo, zero for quadrature.
    pub std_error: f64,
    /// Samples drawn (Monte Carlo) or grid cells evaluated (quadrature).
    pub n_samples: usize,
    pub method: OverlapMethod,
}

impl OverlapEstimate {
    /// `1 − value`, the probability of correct MLE classification.
    pub fn distinctness(&self) -> f64 {
        1.0 - self.value
    }
}

/// Fraction of `n` points drawn from `model` that the MLE rule assigns to a
/// component other than the one that generated them.
pub fn mle_error_mc(model: &MixtureModel, n: usize, seed: u64) -> Result<OverlapEstimate> {
    if n < MIN_MC_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "Monte Carlo needs at least {MIN_MC_SAMPLES} samples, got {n}"
        )));
    }
    let chunks = n.div_ceil(MC_CHUNK);
    let errors = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let size = MC_CHUNK.min(n - c * MC_CHUNK);
            let data = sample(model, size, derive_seed(seed, &[c as u64]))?;
            Ok(data
                .rows()
                .zip(data.labels())
                .filter(|(x, &l)| model.classify_unchecked(x) != l)
                .count())
        })
        .collect::<Result<Vec<usize>>>()?
        .into_iter()
        .sum::<usize>();
    let p = errors as f64 / n as f64;
    Ok(OverlapEstimate {
        value: p,
        std_error: (p * (1.0 - p) / n as f64).sqrt(),
        n_samples: n,
        method: OverlapMethod::MonteCarlo,
    })
}

/// Midpoint-rule integration of `1 − ∫ max_l π_l f_l` over a box covering
/// every `μ_l ± 8·√(largest eigenvalue of Σ_l)`; `d ∈ {1, 2}`.
///
/// The integrand is smooth except along the MLE decision boundary, so the
/// discretization error is `O(h²)` in the cell width `h`.
pub fn mle_error_quadrature(model: &MixtureModel, cells_per_axis: usize) -> Result<OverlapEstimate> {
    let d = model.dim();
    if d > 2 {
        return Err(Error::DimensionTooHigh(d));
    }
    if cells_per_axis < MIN_QUADRATURE_CELLS {
        return Err(Error::InvalidArgument(format!(
            "quadrature needs at least {MIN_QUADRATURE_CELLS} cells per axis, got {cells_per_axis}"
        )));
    }

    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for c in model.components() {
        let spread = QUADRATURE_SIGMAS * sym_eigendecomposition(c.covariance())?.eigenvalues[0].sqrt();
        for j in 0..d {
            lo[j] = lo[j].min(c.mean()[j] - spread);
            hi[j] = hi[j].max(c.mean()[j] + spread);
        }
    }
    let h: Vec<f64> = (0..d).map(|j| (hi[j] - lo[j]) / cells_per_axis as f64).collect();
    let log_weights: Vec<f64> = model.weights().iter().map(|w| w.ln()).collect();
    let envelope = |x: &[f64]| -> f64 {
        model
            .components()
            .iter()
            .zip(&log_weights)
            .map(|(c, lw)| (lw + c.log_density(x)).exp())
            .fold(0.0, f64::max)
    };

    let mass: f64 = if d == 1 {
        let values: Vec<f64> = (0..cells_per_axis)
            .into_par_iter()
            .map(|i| envelope(&[lo[0] + (i as f64 + 0.5) * h[0]]))
            .collect();
        values.iter().sum::<f64>() * h[0]
    } else {
        let rows: Vec<f64> = (0..cells_per_axis)
            .into_par_iter()
            .map(|i| {
                let x = lo[0] + (i as f64 + 0.5) * h[0];
                (0..cells_per_axis)
                    .map(|j| envelope(&[x, lo[1] + (j as f64 + 0.5) * h[1]]))
                    .sum::<f64>()
            })
            .collect();
        rows.iter().sum::<f64>() * h[0] * h[1]
    };

    Ok(OverlapEstimate {
        value: (1.0 - mass).clamp(0.0, 1.0),
        std_error: 0.0,
        n_samples: cells_per_axis.pow(d as u32),
        method: OverlapMethod::Quadrature,
    })
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn within_sum(points: &[&[f64]]) -> f64 {
    let mut s = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            s += euclidean(a, b);
        }
    }
    2.0 * s
}

/// Between-within e-distance between the points labeled `label_a` and
/// `label_b`:
///
/// ```text
/// e = n₁n₂/(n₁+n₂) · ( 2/(n₁n₂)·ΣΣ‖x−y‖ − 1/n₁²·ΣΣ‖x−x'‖ − 1/n₂²·ΣΣ‖y−y'‖ )
/// ```
///
/// The result is symmetric in the two labels bit for bit.
pub fn e_distance(data: &LabeledDataset, label_a: usize, label_b: usize) -> Result<f64> {
    let (first, second) = if label_a <= label_b {
        (label_a, label_b)
    } else {
        (label_b, label_a)
    };
    let xs: Vec<&[f64]> = data.class_rows(first).collect();
    let ys: Vec<&[f64]> = data.class_rows(second).collect();
    if xs.is_empty() {
        return Err(Error::MissingLabel(first));
    }
    if ys.is_empty() {
        return Err(Error::MissingLabel(second));
    }
    let (n1, n2) = (xs.len() as f64, ys.len() as f64);
    let cross: f64 = xs
        .par_iter()
        .map(|x| ys.iter().map(|y| euclidean(x, y)).sum::<f64>())
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    let e = n1 * n2 / (n1 + n2)
        * (2.0 / (n1 * n2) * cross - within_sum(&xs) / (n1 * n1) - within_sum(&ys) / (n2 * n2));
    Ok(e)
}

/// Mean e-distance over all label pairs `a < b`.
pub fn mean_pairwise_e_distance(data: &LabeledDataset) -> Result<f64> {
    let k = data.k();
    let mut total = 0.0;
    let mut pairs = 0usize;
    for a in 1..=k {
        for b in (a + 1)..=k {
            total += e_distance(data, a, b)?;
            pairs += 1;
        }
    }
    if pairs == 0 {
        return Err(Error::SingleClass);
    }
    Ok(total / pairs as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymmetricMatrix;
    use crate::mixture::GaussianComponent;
    use crate::normal::std_normal_cdf;
    use nalgebra::DVector;

    fn comp(mean: &[f64], cov: &[f64]) -> GaussianComponent {
        let d = mean.len();
        GaussianComponent::new(
            DVector::from_column_slice(mean),
            SymmetricMatrix::from_row_slice(d, cov).unwrap(),
        )
        .unwrap()
    }

    fn pair(a: GaussianComponent, b: GaussianComponent) -> MixtureModel {
        MixtureModel::equal_weights(vec![a, b]).unwrap()
    }

    fn rows1(xs: &[f64]) -> Vec<Vec<f64>> {
        xs.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn mc_identical_components() {
        let m = pair(comp(&[0.0], &[1.0]), comp(&[0.0], &[1.0]));
        let e = mle_error_mc(&m, 200_000, 5).unwrap();
        assert!((e.value - 0.5).abs() < 3.0 * e.std_error, "{e:?}");
    }

    #[test]
    fn mc_far_components() {
        let m = pair(comp(&[0.0], &[1.0]), comp(&[20.0], &[1.0]));
        assert!(mle_error_mc(&m, 100_000, 5).unwrap().value < 1e-4);
    }

    #[test]
    fn mc_unit_gap() {
        let m = pair(comp(&[0.0], &[1.0]), comp(&[2.0], &[1.0]));
        let e = mle_error_mc(&m, 1_000_000, 17).unwrap();
        assert!((e.value - std_normal_cdf(-1.0)).abs() < 3.0 * e.std_error, "{e:?}");
        assert_eq!(e.n_samples, 1_000_000);
        assert_eq!(e.method, OverlapMethod::MonteCarlo);
    }

    #[test]
    fn mc_determinism_and_minimum() {
        let m = pair(comp(&[0.0, 0.0], &[1.0, 0.0, 0.0, 2.0]), comp(&[1.0, 1.0], &[1.0, 0.3, 0.3, 1.0]));
        assert_eq!(mle_error_mc(&m, 150_000, 3).unwrap(), mle_error_mc(&m, 150_000, 3).unwrap());
        assert!(mle_error_mc(&m, 999, 3).is_err());
    }

    #[test]
    fn quadrature_cases() {
        let m = pair(comp(&[0.0], &[1.0]), comp(&[0.0], &[1.0]));
        assert!((mle_error_quadrature(&m, 2000).unwrap().value - 0.5).abs() < 1e-4);

        let m = pair(comp(&[0.0], &[1.0]), comp(&[2.0], &[1.0]));
        let q = mle_error_quadrature(&m, 2000).unwrap();
        assert!((q.value - std_normal_cdf(-1.0)).abs() < 1e-5, "{q:?}");
        assert_eq!(q.std_error, 0.0);

        let m = pair(
            comp(&[0.3, -0.2], &[1.0, 0.0, 0.0, 1.0]),
            comp(&[0.3 + 2f64.sqrt(), -0.2 + 2f64.sqrt()], &[1.0, 0.0, 0.0, 1.0]),
        );
        let q = mle_error_quadrature(&m, 600).unwrap();
        assert!((q.value - std_normal_cdf(-1.0)).abs() < 1e-4, "{q:?}");
    }

    #[test]
    fn quadrature_errors() {
        let m = pair(comp(&[0.0], &[1.0]), comp(&[2.0], &[1.0]));
        assert!(mle_error_quadrature(&m, 100).is_err());
        let m3 = pair(
            comp(&[0.0; 3], &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]),
            comp(&[1.0; 3], &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]),
        );
        assert!(matches!(mle_error_quadrature(&m3, 300), Err(Error::DimensionTooHigh(3))));
    }

    #[test]
    fn quadrature_decreases_with_separation() {
        let mut prev = f64::INFINITY;
        for i in 0..20 {
            let gap = 0.25 * (i + 1) as f64;
            let m = pair(comp(&[0.0], &[1.5]), comp(&[gap], &[1.5]));
            let v = mle_error_quadrature(&m, 1000).unwrap().value;
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn mc_agrees_with_quadrature_in_2d() {
        let m = pair(
            comp(&[0.0, 0.0], &[1.0, 0.4, 0.4, 0.8]),
            comp(&[1.5, 0.5], &[0.5, -0.2, -0.2, 2.0]),
        );
        let q = mle_error_quadrature(&m, 800).unwrap();
        let e = mle_error_mc(&m, 400_000, 8).unwrap();
        assert!((q.value - e.value).abs() <= 3.0 * e.std_error + 1e-3);
    }

    #[test]
    fn e_distance_hand_values() {
        let data = LabeledDataset::from_rows(&rows1(&[0.0, 2.0, 1.0]), vec![1, 1, 2], 2).unwrap();
        assert!((e_distance(&data, 1, 2).unwrap() - 2.0 / 3.0).abs() < 1e-15);

        let data = LabeledDataset::from_rows(&[vec![0.0, 0.0], vec![3.0, 4.0]], vec![1, 2], 2).unwrap();
        assert!((e_distance(&data, 1, 2).unwrap() - 5.0).abs() < 1e-15);

        let pts = rows1(&[0.5, -1.0, 2.0]);
        let mut rows = pts.clone();
        rows.extend(pts);
        let data = LabeledDataset::from_rows(&rows, vec![1, 1, 1, 2, 2, 2], 2).unwrap();
        assert!(e_distance(&data, 1, 2).unwrap().abs() < 1e-15);
    }

    #[test]
    fn e_distance_missing_label() {
        let data = LabeledDataset::from_rows(&rows1(&[0.0, 1.0]), vec![1, 1], 3).unwrap();
        assert!(matches!(e_distance(&data, 1, 3), Err(Error::MissingLabel(3))));
        assert!(matches!(e_distance(&data, 2, 1), Err(Error::MissingLabel(2))));
    }

    #[test]
    fn mean_pairwise_matches_single_pair_for_two_classes() {
        let data = LabeledDataset::from_rows(&rows1(&[0.0, 2.0, 1.0]), vec![1, 1, 2], 2).unwrap();
        assert_eq!(mean_pairwise_e_distance(&data).unwrap(), e_distance(&data, 1, 2).unwrap());
    }
}
