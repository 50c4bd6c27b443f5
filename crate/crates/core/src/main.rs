use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use gmm_overlap::fisher::{fisher_from_data, fisher_from_model, FisherSolution};
use gmm_overlap::generate::{generate_random_mixture, generate_two_dim, RandomMixtureConfig, TwoDimConfig};
use gmm_overlap::harness::{emit_charts, emit_csv, run_sweep, RunOptions, SweepConfig};
use gmm_overlap::io::{model_to_toml, read_dataset_csv, read_model_toml, read_to_string, write_dataset_csv};
use gmm_overlap::mixture::{estimate_from_labels, sample_stratified, LabeledDataset, MixtureModel};
use gmm_overlap::overlap::{e_distance, mean_pairwise_e_distance, mle_error_mc, mle_error_quadrature};
use gmm_overlap::seed::derive_seed;
use gmm_overlap::separator::{best_linear_separator, DEFAULT_PRECISION};

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

#[derive(Parser)]
#[command(name = "gmm-overlap", version, about = "Overlap and distinctness measures for Gaussian mixtures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep and write a CSV table (and optional charts).
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_csv: PathBuf,
        /// Directory for one SVG chart per grid cell.
        #[arg(long)]
        out_svg_dir: Option<PathBuf>,
        /// Overrides the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Evaluate measures on the generating parameters, not estimates.
        #[arg(long)]
        model_exact: bool,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print every applicable measure for a dataset (.csv) or model (.toml).
    Measure {
        file: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        mc_samples: usize,
        #[arg(long, default_value_t = 400)]
        quadrature_cells: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Draw a labeled dataset from a generator config.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the generating mixture as a model file.
        #[arg(long)]
        model_out: Option<PathBuf>,
    },
}

/// Generator config for the `generate` subcommand.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum GenerateConfig {
    TwoDim {
        r: f64,
        lambda: f64,
        q: f64,
        k: usize,
        sizes: Vec<usize>,
        /// Rotation angle of each cluster, radians.
        alphas: Vec<f64>,
        #[serde(default)]
        seed: u64,
    },
    Random {
        d: usize,
        k: usize,
        eigenvalue_range: (f64, f64),
        /// Points per class.
        n_points: usize,
        #[serde(default)]
        seed: u64,
    },
}

enum Failure {
    Config(String),
    Numerical(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        match self {
            Failure::Config(m) => {
                eprintln!("error: {m}");
                ExitCode::from(EXIT_CONFIG)
            }
            Failure::Numerical(m) => {
                eprintln!("numerical failure: {m}");
                ExitCode::from(EXIT_NUMERICAL)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Sweep {
            config,
            out_csv,
            out_svg_dir,
            seed,
            model_exact,
            jobs,
        } => sweep(&config, &out_csv, out_svg_dir.as_deref(), seed, model_exact, jobs),
        Command::Measure {
            file,
            mc_samples,
            quadrature_cells,
            seed,
        } => measure(&file, mc_samples, quadrature_cells, seed),
        Command::Generate { config, out, model_out } => generate(&config, &out, model_out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}

fn sweep(
    config: &Path,
    out_csv: &Path,
    out_svg_dir: Option<&Path>,
    seed: Option<u64>,
    model_exact: bool,
    jobs: Option<usize>,
) -> Result<(), Failure> {
    let mut cfg = SweepConfig::from_path(config).map_err(|e| Failure::Config(e.to_string()))?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if jobs == Some(0) {
        return Err(Failure::Config("--jobs must be positive".into()));
    }
    let rows = run_sweep(&cfg, &RunOptions { model_exact, jobs }).map_err(|e| Failure::Config(e.to_string()))?;
    emit_csv(&rows, out_csv).map_err(|e| Failure::Config(e.to_string()))?;
    if let Some(dir) = out_svg_dir {
        emit_charts(&rows, dir).map_err(|e| Failure::Config(e.to_string()))?;
    }
    let failed = rows.iter().filter(|r| !r.reason.is_empty()).count();
    if failed > 0 {
        eprintln!("{failed} of {} rows have missing measures; see the reason column", rows.len());
    }
    Ok(())
}

struct Report {
    failures: Vec<String>,
}

impl Report {
    fn value(&mut self, key: &str, value: gmm_overlap::Result<f64>) {
        match value {
            Ok(v) => println!("{key}={v:.16e}"),
            Err(e) => {
                println!("{key}=");
                self.failures.push(format!("{key}: {e}"));
            }
        }
    }

    fn fisher(&mut self, fisher: gmm_overlap::Result<FisherSolution>) {
        match fisher {
            Ok(f) => {
                println!("lambda_avg={:.16e}", f.lambda_avg);
                println!("lambda_min={:.16e}", f.lambda_min);
                let ev: Vec<String> = f.eigenvalues.iter().map(|x| format!("{x:.16e}")).collect();
                println!("fisher_eigenvalues={}", ev.join(" "));
            }
            Err(e) => {
                println!("lambda_avg=");
                println!("lambda_min=");
                self.failures.push(format!("fisher: {e}"));
            }
        }
    }

    fn model_measures(&mut self, model: &MixtureModel, mc_samples: usize, cells: usize, seed: u64) {
        if model.dim() <= 2 {
            self.value("mle_err_exact", mle_error_quadrature(model, cells).map(|e| e.value));
        }
        match mle_error_mc(model, mc_samples, seed) {
            Ok(e) => {
                println!("mle_err_mc={:.16e}", e.value);
                println!("mc_std_error={:.16e}", e.std_error);
            }
            Err(e) => {
                println!("mle_err_mc=");
                self.failures.push(format!("mle_err_mc: {e}"));
            }
        }
        if model.k() == 2 {
            let c = model.components();
            match best_linear_separator(&c[0], &c[1], DEFAULT_PRECISION) {
                Ok(s) => {
                    println!("p_minmax={:.16e}", s.p_minmax);
                    println!("separator_t={:.16e}", s.t);
                    println!("separator_c={:.16e}", s.c);
                }
                Err(e) => {
                    println!("p_minmax=");
                    self.failures.push(format!("p_minmax: {e}"));
                }
            }
        }
    }
}

fn measure_dataset(data: &LabeledDataset, report: &mut Report, mc_samples: usize, cells: usize, seed: u64) {
    println!("n={}", data.len());
    println!("d={}", data.dim());
    println!("k={}", data.k());
    report.fisher(fisher_from_data(data));
    let e = if data.k() == 2 {
        e_distance(data, 1, 2)
    } else {
        mean_pairwise_e_distance(data)
    };
    report.value("e_dist", e);
    match estimate_from_labels(data) {
        Ok(model) => report.model_measures(&model, mc_samples, cells, seed),
        Err(e) => report.failures.push(format!("estimate: {e}")),
    }
}

fn measure(file: &Path, mc_samples: usize, cells: usize, seed: u64) -> Result<(), Failure> {
    let mut report = Report { failures: Vec::new() };
    let is_csv = file.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        let data = read_dataset_csv(file).map_err(|e| Failure::Config(e.to_string()))?;
        measure_dataset(&data, &mut report, mc_samples, cells, seed);
    } else {
        let model = read_model_toml(file).map_err(|e| Failure::Config(e.to_string()))?;
        println!("d={}", model.dim());
        println!("k={}", model.k());
        report.fisher(fisher_from_model(&model));
        report.model_measures(&model, mc_samples, cells, seed);
    }
    if report.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Numerical(report.failures.join("; ")))
    }
}

fn generate(config: &Path, out: &Path, model_out: Option<&Path>) -> Result<(), Failure> {
    let text = read_to_string(config).map_err(|e| Failure::Config(e.to_string()))?;
    let cfg: GenerateConfig =
        toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", config.display())))?;
    let invalid = |e: gmm_overlap::Error| Failure::Config(format!("{}: {e}", config.display()));
    let (model, data) = match cfg {
        GenerateConfig::TwoDim {
            r,
            lambda,
            q,
            k,
            sizes,
            alphas,
            seed,
        } => generate_two_dim(&TwoDimConfig { r, lambda, q, k, sizes }, &alphas, seed).map_err(invalid)?,
        GenerateConfig::Random {
            d,
            k,
            eigenvalue_range,
            n_points,
            seed,
        } => {
            let model = generate_random_mixture(&RandomMixtureConfig {
                d,
                k,
                seed,
                eigenvalue_range,
            })
            .map_err(invalid)?;
            let data = sample_stratified(model.components(), &vec![n_points; k], derive_seed(seed, &[0]))
                .map_err(invalid)?;
            (model, data)
        }
    };
    write_dataset_csv(&data, out).map_err(|e| Failure::Config(e.to_string()))?;
    if let Some(path) = model_out {
        std::fs::write(path, model_to_toml(&model))
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}
