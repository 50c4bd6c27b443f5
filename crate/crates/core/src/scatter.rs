//! Total, between-class and within-class scatter of a labeled dataset.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;
use crate::mixture::LabeledDataset;

/// Relative Frobenius tolerance for the re-verified identity `T = B + W`.
pub const SCATTER_IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct ScatterDecomposition {
    pub total: SymmetricMatrix,
    pub between: SymmetricMatrix,
    pub within: SymmetricMatrix,
    /// `d × k`, column `l` is the mean of class `l + 1`.
    pub class_means: DMatrix<f64>,
    pub class_sizes: Vec<usize>,
    pub grand_mean: DVector<f64>,
}

impl ScatterDecomposition {
    pub fn dim(&self) -> usize {
        self.total.dim()
    }

    /// `‖T − (B + W)‖_F / (‖T‖_F + ‖B‖_F + ‖W‖_F)`, zero when all vanish.
    pub fn identity_residual(&self) -> f64 {
        let (t, b, w) = (
            self.total.as_matrix(),
            self.between.as_matrix(),
            self.within.as_matrix(),
        );
        let scale = t.norm() + b.norm() + w.norm();
        if scale == 0.0 {
            return 0.0;
        }
        (t - b - w).norm() / scale
    }
}

fn accumulate_outer(acc: &mut DMatrix<f64>, v: &[f64], weight: f64) {
    let d = v.len();
    for i in 0..d {
        let vi = weight * v[i];
        for j in i..d {
            acc[(i, j)] += vi * v[j];
        }
    }
}

pub fn scatter_decomposition(data: &LabeledDataset) -> Result<ScatterDecomposition> {
    let d = data.dim();
    let k = data.k();
    let n = data.len();
    if n < 2 {
        return Err(Error::InvalidArgument("scatter needs at least two points".into()));
    }

    let class_sizes = data.class_sizes();
    if class_sizes.iter().filter(|&&s| s > 0).count() < 2 {
        return Err(Error::SingleClass);
    }
    if let Some(l) = class_sizes.iter().position(|&s| s == 0) {
        return Err(Error::EmptyClass(l + 1));
    }

    let mut grand_mean = DVector::zeros(d);
    let mut class_means = DMatrix::zeros(d, k);
    for (row, &label) in data.rows().zip(data.labels()) {
        for (j, x) in row.iter().enumerate() {
            grand_mean[j] += x;
            class_means[(j, label - 1)] += x;
        }
    }
    grand_mean /= n as f64;
    for (l, &size) in class_sizes.iter().enumerate() {
        class_means.column_mut(l).unscale_mut(size as f64);
    }

    let mut total = DMatrix::zeros(d, d);
    let mut within = DMatrix::zeros(d, d);
    let mut buf_t = vec![0.0; d];
    let mut buf_w = vec![0.0; d];
    for (row, &label) in data.rows().zip(data.labels()) {
        for j in 0..d {
            buf_t[j] = row[j] - grand_mean[j];
            buf_w[j] = row[j] - class_means[(j, label - 1)];
        }
        accumulate_outer(&mut total, &buf_t, 1.0);
        accumulate_outer(&mut within, &buf_w, 1.0);
    }

    let mut between = DMatrix::zeros(d, d);
    for (l, &size) in class_sizes.iter().enumerate() {
        let diff: Vec<f64> = (0..d).map(|j| class_means[(j, l)] - grand_mean[j]).collect();
        accumulate_outer(&mut between, &diff, size as f64);
    }

    let decomposition = ScatterDecomposition {
        total: SymmetricMatrix::from_upper(total),
        between: SymmetricMatrix::from_upper(between),
        within: SymmetricMatrix::from_upper(within),
        class_means,
        class_sizes,
        grand_mean,
    };
    let residual = decomposition.identity_residual();
    if residual > SCATTER_IDENTITY_TOLERANCE {
        return Err(Error::ScatterIdentity(residual));
    }
    Ok(decomposition)
}
