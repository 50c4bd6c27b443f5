//! Sweep harness: builds the planar and random mixture families, evaluates
//! every measure along a parameter sweep and writes CSV tables and charts.

pub mod config;
pub mod output;
pub mod sweep;

pub use config::{Base, Family, NdBase, Samples, SphericalParameter, SweepConfig, TwoDimBase};
pub use output::{chart_svg, emit_chart, emit_charts, emit_csv, rows_from_csv, rows_to_csv};
pub use sweep::{build_model, evaluate_row, run_sweep, RunOptions, SweepRow};
