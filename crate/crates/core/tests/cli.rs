use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_gmm-overlap");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn gmm-overlap")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn configs() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/configs"))
}

const SMALL_SWEEP: &str = r#"
family = "distance-2d"
seed = 5

[base]
angle_indices = [[1, 2], [3, 3]]

[sweep]
values = [1.0, 3.0]

[samples]
n_points = 60
mc_samples = 2000
quadrature_cells = 200
"#;

fn value<'a>(stdout: &'a str, key: &str) -> &'a str {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("{key} missing from:\n{stdout}"))
}

#[test]
fn sweep_writes_csv_and_one_chart_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    std::fs::write(&cfg, SMALL_SWEEP).unwrap();
    let csv = dir.path().join("out.csv");
    let svg = dir.path().join("charts");
    let out = run(&["sweep", "--config", path(&cfg), "--out-csv", path(&csv), "--out-svg-dir", path(&svg)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("family,cell_i,cell_j,sweep_index"));
    assert_eq!(lines.len(), 1 + 2 * 2);
    assert!(lines[1].starts_with("distance-2d,1,2,0,"));

    let mut charts: Vec<String> = std::fs::read_dir(&svg)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    charts.sort();
    assert_eq!(charts, ["distance-2d_1_2.svg", "distance-2d_3_3.svg"]);
}

#[test]
fn seed_flag_overrides_config_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    std::fs::write(&cfg, SMALL_SWEEP).unwrap();
    let read = |name: &str, extra: &[&str]| {
        let csv = dir.path().join(name);
        let mut args = vec!["sweep", "--config", path(&cfg), "--out-csv", path(&csv)];
        args.extend_from_slice(extra);
        assert!(run(&args).status.success());
        std::fs::read_to_string(csv).unwrap()
    };
    let base = read("a.csv", &[]);
    assert_eq!(base, read("b.csv", &["--seed", "5"]));
    assert_ne!(base, read("c.csv", &["--seed", "6"]));
}

#[test]
fn generate_then_measure_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    let model = dir.path().join("model.toml");
    let cfg = configs().join("generate-two-dim.toml");
    let out = run(&["generate", "--config", path(&cfg), "--out", path(&data), "--model-out", path(&model)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let from_data = run(&["measure", path(&data), "--mc-samples", "20000"]);
    assert!(from_data.status.success(), "{}", String::from_utf8_lossy(&from_data.stderr));
    let s = String::from_utf8(from_data.stdout).unwrap();
    assert_eq!(value(&s, "n"), "1000");
    assert_eq!(value(&s, "k"), "2");
    for key in ["lambda_avg", "lambda_min", "e_dist", "mle_err_exact", "mle_err_mc", "p_minmax"] {
        let v: f64 = value(&s, key).parse().unwrap();
        assert!(v.is_finite() && v >= 0.0, "{key}={v}");
    }

    let from_model = run(&["measure", path(&model), "--mc-samples", "20000"]);
    assert!(from_model.status.success());
    let m = String::from_utf8(from_model.stdout).unwrap();
    let est: f64 = value(&s, "p_minmax").parse().unwrap();
    let truth: f64 = value(&m, "p_minmax").parse().unwrap();
    assert!((est - truth).abs() < 0.05, "{est} vs {truth}");
}

#[test]
fn measure_is_deterministic_for_a_seed() {
    let model = configs().join("model.toml");
    let a = run(&["measure", path(&model), "--mc-samples", "5000", "--seed", "3"]);
    let b = run(&["measure", path(&model), "--mc-samples", "5000", "--seed", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bad_inputs_exit_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let missing = dir.path().join("nope.toml");
    assert_eq!(run(&["sweep", "--config", path(&missing), "--out-csv", path(&csv)]).status.code(), Some(1));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "family = \"distance-2d\"\n[sweep]\nvalues = [1.0, 1.0]\n").unwrap();
    let out = run(&["sweep", "--config", path(&bad), "--out-csv", path(&csv)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());

    let cfg = configs().join("distance-2d.toml");
    assert_eq!(
        run(&["sweep", "--config", path(&cfg), "--out-csv", path(&csv), "--jobs", "0"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["measure", path(&missing)]).status.code(), Some(1));
}

#[test]
fn measure_failure_exits_with_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("same.toml");
    std::fs::write(
        &model,
        "[[components]]\nmean = [0.0, 0.0]\ncovariance = [[1.0, 0.0], [0.0, 1.0]]\n\n\
         [[components]]\nmean = [0.0, 0.0]\ncovariance = [[2.0, 0.0], [0.0, 2.0]]\n",
    )
    .unwrap();
    let out = run(&["measure", path(&model), "--mc-samples", "2000"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let s = String::from_utf8(out.stdout).unwrap();
    assert_eq!(value(&s, "p_minmax"), "");
}
