//! Fisher's discriminant task as an eigenproblem, and the distinctness
//! coefficients built from its non-zero eigenvalues.
//!
//! The generalized problem `B·v = λ·T·v` is reduced to a symmetric standard
//! eigenproblem through the spectral decomposition `T = A·L·Aᵀ`:
//!
//! ```text
//! B̃ = L^(−1/2)·Aᵀ·B·A·L^(−1/2),   B̃·ṽ = λ·ṽ,   v = A·L^(−1/2)·ṽ
//! ```
//!
//! so the eigenvalues of `T⁻¹B` are real, lie in `[0, 1]`, and exactly
//! `k − 1` of them are non-zero when the class means are affinely
//! independent.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{sym_eigendecomposition, SymmetricMatrix};
use crate::mixture::{LabeledDataset, MixtureModel};
use crate::scatter::{scatter_decomposition, ScatterDecomposition};

/// `T` is treated as singular when its smallest eigenvalue falls below this
/// fraction of its largest.
pub const SINGULARITY_RATIO: f64 = 1e-10;

/// Relative residual accepted for `B·v = λ·T·v` after back-transformation.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct FisherSolution {
    /// Eigenvalues of `T⁻¹B`, non-increasing.
    pub eigenvalues: DVector<f64>,
    /// Column `j` solves `B·v = λ_j·T·v` and is normalized to `vᵀTv = 1`.
    pub eigenvectors: DMatrix<f64>,
    pub k: usize,
    pub lambda_min: f64,
    pub lambda_avg: f64,
}

impl FisherSolution {
    /// Assembles a solution from a non-increasing spectrum, filling the
    /// coefficients from its top `k − 1` entries.
    pub fn new(eigenvalues: DVector<f64>, eigenvectors: DMatrix<f64>, k: usize) -> Result<Self> {
        let d = eigenvalues.len();
        if k < 2 || k - 1 > d {
            return Err(Error::InvalidArgument(format!(
                "need 2 <= k <= d + 1, got k = {k}, d = {d}"
            )));
        }
        if eigenvalues.as_slice().windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("eigenvalues must be non-increasing".into()));
        }
        let top = &eigenvalues.as_slice()[..k - 1];
        let lambda_min = top.iter().copied().fold(f64::INFINITY, f64::min);
        let lambda_avg = top.iter().sum::<f64>() / (k - 1) as f64;
        Ok(Self {
            eigenvalues,
            eigenvectors,
            k,
            lambda_min,
            lambda_avg,
        })
    }

    /// The `k − 1` eigenvalues spanning Fisher's subspace.
    pub fn nonzero_eigenvalues(&self) -> &[f64] {
        &self.eigenvalues.as_slice()[..self.k - 1]
    }
}

/// Minimum over the top `k − 1` Fisher eigenvalues.
pub fn lambda_min(solution: &FisherSolution) -> f64 {
    solution.lambda_min
}

/// Mean of the top `k − 1` Fisher eigenvalues.
pub fn lambda_avg(solution: &FisherSolution) -> f64 {
    solution.lambda_avg
}

pub fn fisher_eigen(scatter: &ScatterDecomposition, k: usize) -> Result<FisherSolution> {
    fisher_eigen_matrices(&scatter.total, &scatter.between, k)
}

/// Solves `B·v = λ·T·v` for given total and between-class scatter.
pub fn fisher_eigen_matrices(
    total: &SymmetricMatrix,
    between: &SymmetricMatrix,
    k: usize,
) -> Result<FisherSolution> {
    let d = total.dim();
    if between.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: between.dim(),
        });
    }
    if k < 2 || d < k {
        return Err(Error::InvalidArgument(format!(
            "dimension {d} must exceed k - 1 = {}",
            k.saturating_sub(1)
        )));
    }
    let t = total.as_matrix();
    let b = between.as_matrix();

    let t_eig = sym_eigendecomposition(total)?;
    let l_max = t_eig.eigenvalues[0];
    let l_min = t_eig.eigenvalues[d - 1];
    if !(l_max > 0.0) || l_min <= SINGULARITY_RATIO * l_max {
        let ratio = if l_max > 0.0 { l_min / l_max } else { 0.0 };
        return Err(Error::SingularTotalScatter(ratio));
    }

    // whitening map A·L^(−1/2)
    let mut whiten = t_eig.eigenvectors.clone();
    for (j, &l) in t_eig.eigenvalues.iter().enumerate() {
        whiten.column_mut(j).unscale_mut(l.sqrt());
    }
    let reduced = SymmetricMatrix::new(whiten.transpose() * b * &whiten)?;
    let reduced_eig = sym_eigendecomposition(&reduced)?;
    let eigenvectors = &whiten * &reduced_eig.eigenvectors;
    let eigenvalues = reduced_eig.eigenvalues;

    let scale = b.norm() + t.norm();
    for j in 0..d {
        let v = eigenvectors.column(j);
        let residual = (b * v - t * v * eigenvalues[j]).norm();
        let denom = scale * v.norm();
        if !(residual <= RESIDUAL_TOLERANCE * denom) {
            return Err(Error::ResidualCheck(residual / denom));
        }
    }

    FisherSolution::new(eigenvalues, eigenvectors, k)
}

/// Scatter decomposition followed by [`fisher_eigen`] with the dataset's `k`.
pub fn fisher_from_data(data: &LabeledDataset) -> Result<FisherSolution> {
    fisher_eigen(&scatter_decomposition(data)?, data.k())
}

/// Fisher eigenproblem of the population scatter of `model`:
/// `W = Σ π_l·Σ_l` and `B = Σ π_l·(μ_l − μ̄)(μ_l − μ̄)ᵀ`.
pub fn fisher_from_model(model: &MixtureModel) -> Result<FisherSolution> {
    let d = model.dim();
    let weights = model.weights();
    let mut grand = DVector::zeros(d);
    for (c, &w) in model.components().iter().zip(weights) {
        grand += c.mean() * w;
    }
    let mut within = DMatrix::zeros(d, d);
    let mut between = DMatrix::zeros(d, d);
    for (c, &w) in model.components().iter().zip(weights) {
        within += c.covariance().as_matrix() * w;
        let diff = c.mean() - &grand;
        between += &diff * diff.transpose() * w;
    }
    let between = SymmetricMatrix::new(between)?;
    let total = SymmetricMatrix::new(within + between.as_matrix())?;
    fisher_eigen_matrices(&total, &between, model.k())
}

/// Rayleigh quotient `vᵀBv / vᵀTv`.
pub fn fisher_criterion(scatter: &ScatterDecomposition, v: &DVector<f64>) -> Result<f64> {
    if v.len() != scatter.dim() {
        return Err(Error::DimensionMismatch {
            expected: scatter.dim(),
            found: v.len(),
        });
    }
    let denom = scatter.total.quadratic_form(v);
    if !(denom > 0.0) {
        return Err(Error::ZeroDirection);
    }
    Ok(scatter.between.quadratic_form(v) / denom)
}

/// Between-to-within ratio `vᵀBv / vᵀWv`.
pub fn between_within_ratio(scatter: &ScatterDecomposition, v: &DVector<f64>) -> Result<f64> {
    let denom = scatter.within.quadratic_form(v);
    if !(denom > 0.0) {
        return Err(Error::ZeroDirection);
    }
    Ok(scatter.between.quadratic_form(v) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate_random_mixture, RandomMixtureConfig};
    use crate::mixture::sample;
    use crate::seed::rng_from_seed;
    use rand::Rng;

    fn scatter_from(total: &[f64], between: &[f64], d: usize) -> ScatterDecomposition {
        let t = SymmetricMatrix::from_row_slice(d, total).unwrap();
        let b = SymmetricMatrix::from_row_slice(d, between).unwrap();
        let w = SymmetricMatrix::new(t.as_matrix() - b.as_matrix()).unwrap();
        ScatterDecomposition {
            total: t,
            between: b,
            within: w,
            class_means: DMatrix::zeros(d, 2),
            class_sizes: vec![1, 1],
            grand_mean: DVector::zeros(d),
        }
    }

    fn random_data(seed: u64, d: usize, k: usize, n: usize) -> LabeledDataset {
        let model = generate_random_mixture(&RandomMixtureConfig {
            d,
            k,
            seed,
            eigenvalue_range: (1.0, 10.0),
        })
        .unwrap();
        sample(&model, n, seed ^ 0xABCD).unwrap()
    }

    #[test]
    fn coincident_means_give_zero_spectrum() {
        let s = scatter_from(&[3.0, 0.5, 0.5, 2.0], &[0.0; 4], 2);
        let f = fisher_eigen(&s, 2).unwrap();
        assert!(f.eigenvalues.iter().all(|&x| x.abs() < 1e-15));
        assert_eq!(f.lambda_avg, 0.0);
        assert_eq!(lambda_min(&f), 0.0);
    }

    #[test]
    fn diagonal_case_is_coordinatewise_ratio() {
        // W = diag(2, 2), B = diag(8, 0)
        let s = scatter_from(&[10.0, 0.0, 0.0, 2.0], &[8.0, 0.0, 0.0, 0.0], 2);
        let f = fisher_eigen(&s, 2).unwrap();
        assert!((f.eigenvalues[0] - 0.8).abs() < 1e-14);
        assert!(f.eigenvalues[1].abs() < 1e-14);
        let v = f.eigenvectors.column(0).into_owned();
        assert!((s.total.quadratic_form(&v) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coefficients_from_given_spectrum() {
        let f = FisherSolution::new(DVector::from_vec(vec![0.9, 0.4, 0.0, 0.0]), DMatrix::zeros(4, 4), 3)
            .unwrap();
        assert_eq!(lambda_min(&f), 0.4);
        assert!((lambda_avg(&f) - 0.65).abs() < 1e-15);

        let f = FisherSolution::new(DVector::from_vec(vec![0.7, 0.0]), DMatrix::zeros(2, 2), 2).unwrap();
        assert_eq!(lambda_min(&f), 0.7);
        assert_eq!(lambda_avg(&f), lambda_min(&f));

        assert!(FisherSolution::new(DVector::from_vec(vec![0.1, 0.4]), DMatrix::zeros(2, 2), 2).is_err());
        assert!(FisherSolution::new(DVector::from_vec(vec![0.4]), DMatrix::zeros(1, 1), 3).is_err());
    }

    #[test]
    fn rejects_singular_total_and_small_dimension() {
        let s = scatter_from(&[1.0, 1.0, 1.0, 1.0], &[0.5, 0.5, 0.5, 0.5], 2);
        assert!(matches!(fisher_eigen(&s, 2), Err(Error::SingularTotalScatter(_))));
        let s = scatter_from(&[2.0, 0.0, 0.0, 2.0], &[1.0, 0.0, 0.0, 0.0], 2);
        assert!(fisher_eigen(&s, 3).is_err());
    }

    #[test]
    fn criterion_cases() {
        let data = random_data(3, 4, 3, 400);
        let s = scatter_decomposition(&data).unwrap();
        let f = fisher_eigen(&s, 3).unwrap();
        let top = f.eigenvectors.column(0).into_owned();
        assert!((fisher_criterion(&s, &top).unwrap() - f.eigenvalues[0]).abs() < 1e-9);
        let scaled = &top * 7.0;
        assert!((fisher_criterion(&s, &scaled).unwrap() - fisher_criterion(&s, &top).unwrap()).abs() < 1e-12);

        let mut rng = rng_from_seed(1);
        for _ in 0..1000 {
            let v = DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
            let crit = fisher_criterion(&s, &v).unwrap();
            assert!(crit <= f.eigenvalues[0] + 1e-9);
            // F = 1 / (1 + 1/F_o)
            let fo = between_within_ratio(&s, &v).unwrap();
            assert!((crit - 1.0 / (1.0 + 1.0 / fo)).abs() < 1e-10);
        }
        assert!(matches!(
            fisher_criterion(&s, &DVector::zeros(4)),
            Err(Error::ZeroDirection)
        ));
    }

    #[test]
    fn population_scatter_matches_large_sample() {
        let model = generate_random_mixture(&RandomMixtureConfig {
            d: 4,
            k: 3,
            seed: 5,
            eigenvalue_range: (1.0, 10.0),
        })
        .unwrap();
        let exact = fisher_from_model(&model).unwrap();
        let sampled = fisher_from_data(&sample(&model, 200_000, 9).unwrap()).unwrap();
        for (a, b) in exact.nonzero_eigenvalues().iter().zip(sampled.nonzero_eigenvalues()) {
            assert!((a - b).abs() < 0.01, "{a} vs {b}");
        }
        assert_eq!(exact.eigenvalues.iter().filter(|&&x| x > 1e-9).count(), 2);
    }

    #[test]
    fn spectrum_bounds_and_rank() {
        for seed in 0..10 {
            let d = 3 + (seed as usize % 5);
            let k = (2 + (seed as usize % 3)).min(d);
            let f = fisher_from_data(&random_data(seed, d, k, 60 * d)).unwrap();
            assert!(f.eigenvalues.iter().all(|&x| (-1e-10..=1.0 + 1e-10).contains(&x)));
            assert_eq!(f.eigenvalues.iter().filter(|&&x| x > 1e-6).count(), k - 1);
            assert!(f.lambda_min <= f.lambda_avg);
        }
    }
}
