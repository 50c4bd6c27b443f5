//! File formats: labeled datasets as CSV and mixture models as TOML.
//!
//! Dataset CSV has the header `x1,…,xd,label` and one row per point, with
//! coordinates written to 17 significant digits so they parse back
//! bit-exactly.
//!
//! A model file looks like
//!
//! ```toml
//! weights = [0.5, 0.5]
//!
//! [[components]]
//! mean = [0.0, 0.0]
//! covariance = [[1.0, 0.0], [0.0, 1.0]]
//!
//! [[components]]
//! mean = [2.0, 0.0]
//! covariance = [[2.0, 0.3], [0.3, 1.0]]
//! ```
//!
//! `weights` may be omitted, meaning equal mixing factors.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::SymmetricMatrix;
use crate::mixture::{GaussianComponent, LabeledDataset, MixtureModel};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Toml {
        path: String,
        #[source]
        source: toml::de::Error,
    },
    #[error("{path}: invalid model: {source}")]
    Model {
        path: String,
        #[source]
        source: Error,
    },
}

/// Formats `x` with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn dataset_to_csv(data: &LabeledDataset) -> String {
    let mut out = String::new();
    for j in 1..=data.dim() {
        let _ = write!(out, "x{j},");
    }
    out.push_str("label\n");
    for (row, label) in data.rows().zip(data.labels()) {
        for x in row {
            out.push_str(&format_f64(*x));
            out.push(',');
        }
        let _ = writeln!(out, "{label}");
    }
    out
}

/// Parses dataset CSV; `k` is the largest label present.
pub fn dataset_from_csv(text: &str, path: &str) -> Result<LabeledDataset, IoError> {
    let parse_err = |line: usize, message: String| IoError::Parse {
        path: path.to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file".into()))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let d = columns.len().saturating_sub(1);
    if d == 0 || columns.last() != Some(&"label") {
        return Err(parse_err(1, "header must be x1,...,xd,label".into()));
    }
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != d + 1 {
            return Err(parse_err(i + 1, format!("expected {} fields, got {}", d + 1, fields.len())));
        }
        let row = fields[..d]
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| parse_err(i + 1, format!("{f:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let label = fields[d]
            .parse::<usize>()
            .map_err(|e| parse_err(i + 1, format!("label {:?}: {e}", fields[d])))?;
        rows.push(row);
        labels.push(label);
    }
    let k = labels.iter().copied().max().unwrap_or(0);
    LabeledDataset::from_rows(&rows, labels, k).map_err(|e| parse_err(0, e.to_string()))
}

pub fn write_dataset_csv(data: &LabeledDataset, path: &Path) -> Result<(), IoError> {
    std::fs::write(path, dataset_to_csv(data)).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_dataset_csv(path: &Path) -> Result<LabeledDataset, IoError> {
    let text = read_to_string(path)?;
    dataset_from_csv(&text, &path.display().to_string())
}

/// Reads a file, attaching the path to any error.
pub fn read_to_string(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
}

/// Serialized form of a [`MixtureModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub components: Vec<ComponentSpec>,
}

impl ModelSpec {
    pub fn from_model(model: &MixtureModel) -> Self {
        let components = model
            .components()
            .iter()
            .map(|c| {
                let cov = c.covariance().as_matrix();
                ComponentSpec {
                    mean: c.mean().iter().copied().collect(),
                    covariance: (0..c.dim())
                        .map(|i| (0..c.dim()).map(|j| cov[(i, j)]).collect())
                        .collect(),
                }
            })
            .collect();
        Self {
            weights: Some(model.weights().to_vec()),
            components,
        }
    }

    pub fn to_model(&self) -> crate::Result<MixtureModel> {
        let components = self
            .components
            .iter()
            .map(|c| {
                let d = c.mean.len();
                if c.covariance.len() != d || c.covariance.iter().any(|r| r.len() != d) {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: c.covariance.len(),
                    });
                }
                let cov = DMatrix::from_row_iterator(d, d, c.covariance.iter().flatten().copied());
                GaussianComponent::new(DVector::from_column_slice(&c.mean), SymmetricMatrix::new(cov)?)
            })
            .collect::<crate::Result<Vec<_>>>()?;
        match &self.weights {
            Some(w) => MixtureModel::new(components, w.clone()),
            None => MixtureModel::equal_weights(components),
        }
    }
}

pub fn model_to_toml(model: &MixtureModel) -> String {
    toml::to_string(&ModelSpec::from_model(model)).expect("model spec serializes")
}

pub fn model_from_toml(text: &str, path: &str) -> Result<MixtureModel, IoError> {
    let spec: ModelSpec = toml::from_str(text).map_err(|source| IoError::Toml {
        path: path.to_string(),
        source,
    })?;
    spec.to_model().map_err(|source| IoError::Model {
        path: path.to_string(),
        source,
    })
}

pub fn read_model_toml(path: &Path) -> Result<MixtureModel, IoError> {
    let text = read_to_string(path)?;
    model_from_toml(&text, &path.display().to_string())
}
