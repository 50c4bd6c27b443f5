//! Evaluation of every measure along a sweep, one row per grid cell and
//! sweep value.

use nalgebra::DVector;
use rayon::prelude::*;

use super::config::{Base, Family, NdBase, SphericalParameter, SweepConfig, TwoDimBase};
use crate::error::{Error, Result};
use crate::fisher::{fisher_from_data, fisher_from_model, FisherSolution};
use crate::generate::{circle_center, generate_random_mixture, rotated_covariance, RandomMixtureConfig};
use crate::mixture::{estimate_from_labels, sample_stratified, GaussianComponent, LabeledDataset, MixtureModel};
use crate::overlap::{e_distance, mean_pairwise_e_distance, mle_error_mc, mle_error_quadrature};
use crate::seed::derive_seed;
use crate::separator::{best_linear_separator, DEFAULT_PRECISION};

const MEANS_STREAM: u64 = 1;
const COVS_STREAM: u64 = 2;
const DATA_STREAM: u64 = 0;
const MC_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Evaluate the measures on the generating parameters instead of the
    /// estimates. The e-distance always uses the sample.
    pub model_exact: bool,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

/// One evaluated sweep point. Measures that do not apply or failed are
/// `None`; failures are described in `reason`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub family: Family,
    /// Angle indices `(i, j)` for the planar families, mean and covariance
    /// set indices for the `nd` families.
    pub cell: (usize, usize),
    pub sweep_index: usize,
    pub sweep_value: f64,
    pub distinctness_exact: Option<f64>,
    pub distinctness_mc: Option<f64>,
    pub mc_std_error: Option<f64>,
    pub distinctness_linear: Option<f64>,
    pub lambda_avg: Option<f64>,
    pub lambda_min: Option<f64>,
    pub e_dist: Option<f64>,
    pub reason: String,
}

impl SweepRow {
    fn empty(family: Family, cell: (usize, usize), sweep_index: usize, sweep_value: f64) -> Self {
        Self {
            family,
            cell,
            sweep_index,
            sweep_value,
            distinctness_exact: None,
            distinctness_mc: None,
            mc_std_error: None,
            distinctness_linear: None,
            lambda_avg: None,
            lambda_min: None,
            e_dist: None,
            reason: String::new(),
        }
    }

    fn note(&mut self, measure: &str, err: &Error) {
        if !self.reason.is_empty() {
            self.reason.push_str("; ");
        }
        let text = format!("{measure}: {err}").replace([',', '\n', '\r'], " ");
        self.reason.push_str(&text);
    }
}

/// Seed of the row at `(cell, sweep_index)`; independent of evaluation order.
pub fn row_seed(config: &SweepConfig, cell: (usize, usize), sweep_index: usize) -> u64 {
    derive_seed(
        config.seed,
        &[config.family.id(), cell.0 as u64, cell.1 as u64, sweep_index as u64],
    )
}

fn planar_component(r: f64, l: usize, alpha: f64, first: f64, second: f64) -> Result<GaussianComponent> {
    GaussianComponent::new(
        DVector::from_column_slice(&circle_center(r, l, 2)),
        rotated_covariance(alpha, first, second),
    )
}

fn planar_model(config: &SweepConfig, base: &TwoDimBase, cell: (usize, usize), s: f64) -> Result<MixtureModel> {
    let q = config.q().expect("planar family");
    let alphas = [TwoDimBase::angle(cell.0), TwoDimBase::angle(cell.1)];
    let (r, lambda) = (base.r, base.lambda);
    // (radius, eigenvalues of cluster 1, eigenvalues of cluster 2)
    let (radius, e1, e2) = match config.family {
        Family::Distance2d => (s, (lambda, q * lambda), (lambda, q * lambda)),
        Family::DispersionBoth2d => (r, (s, q * s), (s, q * s)),
        Family::DispersionFirst2d => (r, (s, q * lambda), (s, q * lambda)),
        Family::DispersionSecond2d => (r, (lambda, q * s), (lambda, q * s)),
        Family::Spherical2d => match config.spherical_parameter {
            SphericalParameter::Distance => (s, (lambda, lambda), (lambda, lambda)),
            SphericalParameter::Dispersion => (r, (s, s), (s, s)),
            SphericalParameter::DispersionUnbalanced => (r, (s, s), (lambda, lambda)),
        },
        Family::DistanceNd | Family::DispersionNd => unreachable!("nd family with planar base"),
    };
    MixtureModel::equal_weights(vec![
        planar_component(radius, 0, alphas[0], e1.0, e1.1)?,
        planar_component(radius, 1, alphas[1], e2.0, e2.1)?,
    ])
}

fn random_set(config: &SweepConfig, base: &NdBase, stream: u64, index: usize) -> Result<MixtureModel> {
    generate_random_mixture(&RandomMixtureConfig {
        d: base.d,
        k: base.k,
        seed: derive_seed(config.seed, &[stream, index as u64]),
        eigenvalue_range: base.eigenvalue_range,
    })
}

fn nd_model(config: &SweepConfig, base: &NdBase, cell: (usize, usize), s: f64) -> Result<MixtureModel> {
    let means = random_set(config, base, MEANS_STREAM, cell.0)?;
    let covs = random_set(config, base, COVS_STREAM, cell.1)?;
    let grand = means
        .components()
        .iter()
        .fold(DVector::zeros(base.d), |acc, c| acc + c.mean())
        / base.k as f64;
    let components = means
        .components()
        .iter()
        .zip(covs.components())
        .map(|(m, c)| match config.family {
            Family::DistanceNd => GaussianComponent::new(&grand + (m.mean() - &grand) * s, c.covariance().clone()),
            _ => GaussianComponent::new(m.mean().clone(), c.covariance().scaled(s)),
        })
        .collect::<Result<Vec<_>>>()?;
    MixtureModel::equal_weights(components)
}

/// Generating mixture of the row at `cell` and sweep value `s`.
pub fn build_model(config: &SweepConfig, cell: (usize, usize), s: f64) -> Result<MixtureModel> {
    match &config.base {
        Base::TwoDim(base) => planar_model(config, base, cell, s),
        Base::Nd(base) => nd_model(config, base, cell, s),
    }
}

fn unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

fn fill_fisher(row: &mut SweepRow, fisher: Result<FisherSolution>) {
    match fisher {
        Ok(f) => {
            row.lambda_avg = Some(unit(f.lambda_avg));
            row.lambda_min = Some(unit(f.lambda_min));
        }
        Err(e) => row.note("fisher", &e),
    }
}

fn fill_model_measures(row: &mut SweepRow, config: &SweepConfig, model: &MixtureModel, mc_seed: u64) {
    if model.dim() <= 2 {
        match mle_error_quadrature(model, config.samples.quadrature_cells) {
            Ok(e) => row.distinctness_exact = Some(unit(e.distinctness())),
            Err(e) => row.note("exact", &e),
        }
    }
    match mle_error_mc(model, config.samples.mc_samples, mc_seed) {
        Ok(e) => {
            row.distinctness_mc = Some(unit(e.distinctness()));
            row.mc_std_error = Some(e.std_error);
        }
        Err(e) => row.note("mc", &e),
    }
    if model.k() == 2 {
        let c = model.components();
        match best_linear_separator(&c[0], &c[1], DEFAULT_PRECISION) {
            Ok(s) => row.distinctness_linear = Some(unit(s.distinctness())),
            Err(e) => row.note("linear", &e),
        }
    }
}

fn fill_e_dist(row: &mut SweepRow, data: &LabeledDataset) {
    let e = if data.k() == 2 {
        e_distance(data, 1, 2)
    } else {
        mean_pairwise_e_distance(data)
    };
    match e {
        Ok(e) => row.e_dist = Some(e),
        Err(e) => row.note("e_dist", &e),
    }
}

/// Evaluates a single sweep point.
pub fn evaluate_row(
    config: &SweepConfig,
    options: &RunOptions,
    cell: (usize, usize),
    sweep_index: usize,
) -> SweepRow {
    let value = config.sweep_values[sweep_index];
    let mut row = SweepRow::empty(config.family, cell, sweep_index, value);
    let seed = row_seed(config, cell, sweep_index);

    let truth = match build_model(config, cell, value) {
        Ok(m) => m,
        Err(e) => {
            row.note("model", &e);
            return row;
        }
    };
    let sizes = vec![config.samples.n_points; truth.k()];
    let data = match sample_stratified(truth.components(), &sizes, derive_seed(seed, &[DATA_STREAM])) {
        Ok(d) => d,
        Err(e) => {
            row.note("sample", &e);
            return row;
        }
    };
    let mc_seed = derive_seed(seed, &[MC_STREAM]);

    if options.model_exact {
        fill_fisher(&mut row, fisher_from_model(&truth));
        fill_model_measures(&mut row, config, &truth, mc_seed);
    } else {
        fill_fisher(&mut row, fisher_from_data(&data));
        match estimate_from_labels(&data) {
            Ok(est) => fill_model_measures(&mut row, config, &est, mc_seed),
            Err(e) => row.note("estimate", &e),
        }
    }
    fill_e_dist(&mut row, &data);
    row
}

/// Evaluates every cell at every sweep value. Rows come back sorted by
/// cell, then sweep index, whatever the number of workers.
pub fn run_sweep(config: &SweepConfig, options: &RunOptions) -> Result<Vec<SweepRow>> {
    config.validate().map_err(Error::InvalidArgument)?;
    let points: Vec<((usize, usize), usize)> = config
        .cells()
        .into_iter()
        .flat_map(|cell| (0..config.sweep_values.len()).map(move |i| (cell, i)))
        .collect();
    let work = || {
        points
            .par_iter()
            .map(|&(cell, i)| evaluate_row(config, options, cell, i))
            .collect::<Vec<_>>()
    };
    let rows = match options.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    Ok(rows)
}
