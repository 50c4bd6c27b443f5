//! Sweep configuration files.
//!
//! A config is a TOML document with the top-level keys `family`, `base`,
//! `sweep`, `seed` and `samples`:
//!
//! ```toml
//! family = "dispersion-both-2d"
//! seed = 20240611
//!
//! [base]
//! r = 3.0
//! lambda = 1.0
//! q = 0.25
//! # angle_indices = [[1, 1], [3, 6]]   # default: all 36 pairs
//!
//! [sweep]
//! start = 0.25
//! stop = 4.0
//! count = 11
//! # values = [0.5, 1.0, 2.0]          # alternative to start/stop/count
//!
//! [samples]
//! n_points = 500
//! mc_samples = 100000
//! quadrature_cells = 400
//! ```
//!
//! The `nd` families take `d`, `k`, `eigenvalue_range`, `mean_sets` and
//! `cov_sets` under `[base]` instead. The `configs/` directory of the core
//! crate holds one config per family.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::io::{read_to_string, IoError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "distance-2d")]
    Distance2d,
    #[serde(rename = "dispersion-both-2d")]
    DispersionBoth2d,
    #[serde(rename = "dispersion-first-2d")]
    DispersionFirst2d,
    #[serde(rename = "dispersion-second-2d")]
    DispersionSecond2d,
    #[serde(rename = "spherical-2d")]
    Spherical2d,
    #[serde(rename = "distance-nd")]
    DistanceNd,
    #[serde(rename = "dispersion-nd")]
    DispersionNd,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Distance2d,
        Family::DispersionBoth2d,
        Family::DispersionFirst2d,
        Family::DispersionSecond2d,
        Family::Spherical2d,
        Family::DistanceNd,
        Family::DispersionNd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Distance2d => "distance-2d",
            Family::DispersionBoth2d => "dispersion-both-2d",
            Family::DispersionFirst2d => "dispersion-first-2d",
            Family::DispersionSecond2d => "dispersion-second-2d",
            Family::Spherical2d => "spherical-2d",
            Family::DistanceNd => "distance-nd",
            Family::DispersionNd => "dispersion-nd",
        }
    }

    /// Stable identifier mixed into per-row seeds.
    pub fn id(self) -> u64 {
        Family::ALL.iter().position(|&f| f == self).unwrap() as u64
    }

    pub fn is_two_dim(self) -> bool {
        !matches!(self, Family::DistanceNd | Family::DispersionNd)
    }

    fn default_sweep(self, parameter: SphericalParameter) -> (f64, f64, usize) {
        match self {
            Family::Distance2d => (0.5, 6.0, 11),
            Family::Spherical2d if parameter == SphericalParameter::Distance => (0.5, 6.0, 11),
            Family::DistanceNd => (0.1, 2.0, 11),
            _ => (0.25, 4.0, 11),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown family {s:?}"))
    }
}

/// What the spherical family sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SphericalParameter {
    /// Circle radius `r`.
    #[default]
    Distance,
    /// Common variance of both clusters.
    Dispersion,
    /// Variance of the first cluster only; the second keeps `lambda`.
    DispersionUnbalanced,
}

/// Base of the planar families. Clusters sit at `(0, r)` and `(0, −r)`;
/// cell `(i, j)` rotates the first by `i·π/6` and the second by `j·π/6`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoDimBase {
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    /// Defaults to 0.25, or 1 for the spherical family.
    pub q: Option<f64>,
    /// Angle index pairs in `1..=6`; all 36 when omitted (one pair for the
    /// spherical family, where rotation has no effect).
    pub angle_indices: Option<Vec<[usize; 2]>>,
}

fn default_r() -> f64 {
    3.0
}

fn default_lambda() -> f64 {
    1.0
}

impl TwoDimBase {
    pub fn angle(index: usize) -> f64 {
        index as f64 * PI / 6.0
    }
}

/// Base of the random `d`-dimensional families. Cell `(i, j)` takes its
/// means from random set `i` and its covariances from random set `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NdBase {
    pub d: usize,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_eigenvalue_range")]
    pub eigenvalue_range: (f64, f64),
    #[serde(default = "default_mean_sets")]
    pub mean_sets: usize,
    #[serde(default = "default_cov_sets")]
    pub cov_sets: usize,
}

fn default_k() -> usize {
    3
}

fn default_eigenvalue_range() -> (f64, f64) {
    (1.0, 10.0)
}

fn default_mean_sets() -> usize {
    10
}

fn default_cov_sets() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq)]
pub enum Base {
    TwoDim(TwoDimBase),
    Nd(NdBase),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Samples {
    /// Points drawn per class.
    #[serde(default = "default_n_points")]
    pub n_points: usize,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: usize,
    /// Cells per axis for the planar quadrature.
    #[serde(default = "default_quadrature_cells")]
    pub quadrature_cells: usize,
}

fn default_n_points() -> usize {
    500
}

fn default_mc_samples() -> usize {
    100_000
}

fn default_quadrature_cells() -> usize {
    400
}

impl Default for Samples {
    fn default() -> Self {
        Self {
            n_points: default_n_points(),
            mc_samples: default_mc_samples(),
            quadrature_cells: default_quadrature_cells(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    values: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    count: Option<usize>,
    parameter: Option<SphericalParameter>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    family: Family,
    #[serde(default)]
    base: Option<toml::Table>,
    #[serde(default)]
    sweep: SweepSection,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    samples: Samples,
}

/// A validated sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub family: Family,
    pub base: Base,
    pub sweep_values: Vec<f64>,
    pub spherical_parameter: SphericalParameter,
    pub samples: Samples,
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    (0..count)
        .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
        .collect()
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        let base_table = raw.base.unwrap_or_default();
        let base = if raw.family.is_two_dim() {
            Base::TwoDim(
                toml::Value::Table(base_table)
                    .try_into()
                    .map_err(|e: toml::de::Error| format!("[base]: {e}"))?,
            )
        } else {
            Base::Nd(
                toml::Value::Table(base_table)
                    .try_into()
                    .map_err(|e: toml::de::Error| format!("[base]: {e}"))?,
            )
        };
        if raw.sweep.parameter.is_some() && raw.family != Family::Spherical2d {
            return Err("sweep.parameter applies to the spherical-2d family only".into());
        }
        let spherical_parameter = raw.sweep.parameter.unwrap_or_default();
        let sweep_values = match (&raw.sweep.values, raw.sweep.start, raw.sweep.stop, raw.sweep.count) {
            (Some(v), None, None, None) => v.clone(),
            (Some(_), _, _, _) => return Err("give either sweep.values or start/stop/count".into()),
            (None, start, stop, count) => {
                let (s0, s1, c) = raw.family.default_sweep(spherical_parameter);
                linspace(start.unwrap_or(s0), stop.unwrap_or(s1), count.unwrap_or(c))
            }
        };
        let config = SweepConfig {
            family: raw.family,
            base,
            sweep_values,
            spherical_parameter,
            samples: raw.samples,
            seed: raw.seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = read_to_string(path)?;
        Self::from_toml(&text).map_err(|message| ConfigError::Invalid {
            path: path.display().to_string(),
            message,
        })
    }

    pub fn dim(&self) -> usize {
        match &self.base {
            Base::TwoDim(_) => 2,
            Base::Nd(b) => b.d,
        }
    }

    pub fn k(&self) -> usize {
        match &self.base {
            Base::TwoDim(_) => 2,
            Base::Nd(b) => b.k,
        }
    }

    /// Ratio `q` in effect for the planar families.
    pub fn q(&self) -> Option<f64> {
        match &self.base {
            Base::TwoDim(b) => Some(b.q.unwrap_or(if self.family == Family::Spherical2d {
                1.0
            } else {
                0.25
            })),
            Base::Nd(_) => None,
        }
    }

    /// Grid cells in output order.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        match &self.base {
            Base::TwoDim(b) => match &b.angle_indices {
                Some(pairs) => pairs.iter().map(|p| (p[0], p[1])).collect(),
                None if self.family == Family::Spherical2d => vec![(6, 6)],
                None => (1..=6).flat_map(|i| (1..=6).map(move |j| (i, j))).collect(),
            },
            Base::Nd(b) => (1..=b.mean_sets)
                .flat_map(|i| (1..=b.cov_sets).map(move |j| (i, j)))
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let v = &self.sweep_values;
        if v.is_empty() {
            return Err("sweep needs at least one value".into());
        }
        if v.iter().any(|x| !x.is_finite() || *x <= 0.0) {
            return Err("sweep values must be finite and positive".into());
        }
        let increasing = v.windows(2).all(|w| w[0] < w[1]);
        let decreasing = v.windows(2).all(|w| w[0] > w[1]);
        if !(increasing || decreasing) {
            return Err("sweep values must be strictly monotone".into());
        }
        let d = self.dim();
        if self.samples.n_points < 10 * d {
            return Err(format!(
                "samples.n_points = {} is below 10·d = {}",
                self.samples.n_points,
                10 * d
            ));
        }
        if self.samples.mc_samples < crate::overlap::MIN_MC_SAMPLES {
            return Err(format!(
                "samples.mc_samples must be at least {}",
                crate::overlap::MIN_MC_SAMPLES
            ));
        }
        if self.family.is_two_dim() && self.samples.quadrature_cells < crate::overlap::MIN_QUADRATURE_CELLS {
            return Err(format!(
                "samples.quadrature_cells must be at least {}",
                crate::overlap::MIN_QUADRATURE_CELLS
            ));
        }
        match &self.base {
            Base::TwoDim(b) => {
                if !(b.r >= 0.0 && b.r.is_finite()) {
                    return Err(format!("base.r must be >= 0, got {}", b.r));
                }
                if !(b.lambda > 0.0 && b.lambda.is_finite()) {
                    return Err(format!("base.lambda must be > 0, got {}", b.lambda));
                }
                let q = self.q().unwrap();
                if !(q > 0.0 && q <= 1.0) {
                    return Err(format!("base.q must lie in (0, 1], got {q}"));
                }
                if self.family == Family::Spherical2d && q != 1.0 {
                    return Err("spherical-2d requires q = 1".into());
                }
                if let Some(pairs) = &b.angle_indices {
                    if pairs.is_empty() {
                        return Err("base.angle_indices must not be empty".into());
                    }
                    if pairs.iter().flatten().any(|&i| !(1..=6).contains(&i)) {
                        return Err("angle indices must lie in 1..=6".into());
                    }
                }
            }
            Base::Nd(b) => {
                crate::generate::RandomMixtureConfig {
                    d: b.d,
                    k: b.k,
                    seed: 0,
                    eigenvalue_range: b.eigenvalue_range,
                }
                .validate()
                .map_err(|e| format!("[base]: {e}"))?;
                if b.mean_sets == 0 || b.cov_sets == 0 {
                    return Err("base.mean_sets and base.cov_sets must be positive".into());
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let c = SweepConfig::from_toml("family = \"distance-2d\"\n").unwrap();
        assert_eq!(c.sweep_values.len(), 11);
        assert_eq!(c.sweep_values[0], 0.5);
        assert_eq!(c.sweep_values[10], 6.0);
        assert_eq!(c.cells().len(), 36);
        assert_eq!(c.q(), Some(0.25));
        assert_eq!(c.samples, Samples::default());

        let c = SweepConfig::from_toml("family = \"spherical-2d\"\n").unwrap();
        assert_eq!(c.q(), Some(1.0));
        assert_eq!(c.cells(), vec![(6, 6)]);

        let c = SweepConfig::from_toml("family = \"dispersion-nd\"\n[base]\nd = 5\n").unwrap();
        assert_eq!(c.k(), 3);
        assert_eq!(c.cells().len(), 10);
        assert_eq!(c.sweep_values[0], 0.25);
    }

    #[test]
    fn explicit_values_and_cells() {
        let text = "family = \"dispersion-first-2d\"\nseed = 9\n[base]\nangle_indices = [[1, 2], [6, 3]]\n[sweep]\nvalues = [4.0, 2.0, 1.0]\n";
        let c = SweepConfig::from_toml(text).unwrap();
        assert_eq!(c.cells(), vec![(1, 2), (6, 3)]);
        assert_eq!(c.sweep_values, vec![4.0, 2.0, 1.0]);
        assert_eq!(c.seed, 9);
    }

    #[test]
    fn rejects_invalid() {
        for text in [
            "family = \"nope\"\n",
            "family = \"distance-2d\"\n[sweep]\nvalues = [1.0, 1.0]\n",
            "family = \"distance-2d\"\n[sweep]\nvalues = [1.0, 3.0, 2.0]\n",
            "family = \"distance-2d\"\n[sweep]\nvalues = [1.0]\ncount = 3\n",
            "family = \"distance-2d\"\n[samples]\nn_points = 19\n",
            "family = \"distance-2d\"\n[base]\nq = 1.5\n",
            "family = \"distance-2d\"\n[base]\nangle_indices = [[0, 1]]\n",
            "family = \"distance-2d\"\n[base]\nd = 3\n",
            "family = \"spherical-2d\"\n[base]\nq = 0.5\n",
            "family = \"distance-2d\"\n[sweep]\nparameter = \"distance\"\n",
            "family = \"distance-nd\"\n[base]\nd = 2\nk = 3\n",
            "family = \"distance-nd\"\n",
            "family = \"distance-nd\"\n[base]\nd = 3\n[samples]\nn_points = 29\n",
            "family = \"distance-2d\"\nextra = 1\n",
        ] {
            assert!(SweepConfig::from_toml(text).is_err(), "{text}");
        }
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert_eq!(Family::DispersionNd.id(), 6);
    }
}
