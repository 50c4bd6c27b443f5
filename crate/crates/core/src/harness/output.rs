//! CSV tables and SVG line charts of sweep rows.

use std::fmt::Write as _;
use std::path::Path;

use super::config::Family;
use super::sweep::SweepRow;
use crate::io::{format_f64, IoError};

pub const CSV_HEADER: &str = "family,cell_i,cell_j,sweep_index,sweep_value,distinctness_exact,distinctness_mc,mc_std_error,distinctness_linear,lambda_avg,lambda_min,e_dist,reason";

fn opt(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 + rows.len() * 256);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.family,
            r.cell.0,
            r.cell.1,
            r.sweep_index,
            format_f64(r.sweep_value),
            opt(r.distinctness_exact),
            opt(r.distinctness_mc),
            opt(r.mc_std_error),
            opt(r.distinctness_linear),
            opt(r.lambda_avg),
            opt(r.lambda_min),
            opt(r.e_dist),
            r.reason,
        );
    }
    out
}

pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<(), IoError> {
    std::fs::write(path, rows_to_csv(rows)).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses a table written by [`rows_to_csv`].
pub fn rows_from_csv(text: &str) -> Result<Vec<SweepRow>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err("unexpected header".into());
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let err = |m: String| format!("line {}: {m}", i + 2);
            let f: Vec<&str> = line.splitn(13, ',').collect();
            if f.len() != 13 {
                return Err(err(format!("expected 13 fields, got {}", f.len())));
            }
            let int = |s: &str| s.parse::<usize>().map_err(|e| err(format!("{s:?}: {e}")));
            let num = |s: &str| s.parse::<f64>().map_err(|e| err(format!("{s:?}: {e}")));
            let opt = |s: &str| if s.is_empty() { Ok(None) } else { num(s).map(Some) };
            Ok(SweepRow {
                family: f[0].parse::<Family>().map_err(err)?,
                cell: (int(f[1])?, int(f[2])?),
                sweep_index: int(f[3])?,
                sweep_value: num(f[4])?,
                distinctness_exact: opt(f[5])?,
                distinctness_mc: opt(f[6])?,
                mc_std_error: opt(f[7])?,
                distinctness_linear: opt(f[8])?,
                lambda_avg: opt(f[9])?,
                lambda_min: opt(f[10])?,
                e_dist: opt(f[11])?,
                reason: f[12].to_string(),
            })
        })
        .collect()
}

struct Series {
    label: &'static str,
    color: &'static str,
    dashed: bool,
    value: fn(&SweepRow) -> Option<f64>,
}

/// Charted measures with their legend colors. The e-distance is unbounded
/// and stays out of the `[0, 1]` chart.
const SERIES: [Series; 5] = [
    Series {
        label: "exact 1 - MLE_err",
        color: "red",
        dashed: false,
        value: |r| r.distinctness_exact,
    },
    Series {
        label: "linear 1 - p_minmax",
        color: "green",
        dashed: false,
        value: |r| r.distinctness_linear,
    },
    Series {
        label: "Monte Carlo 1 - MLE_err",
        color: "green",
        dashed: true,
        value: |r| r.distinctness_mc,
    },
    Series {
        label: "average eigenvalue",
        color: "turquoise",
        dashed: false,
        value: |r| r.lambda_avg,
    },
    Series {
        label: "minimum eigenvalue",
        color: "blue",
        dashed: false,
        value: |r| r.lambda_min,
    },
];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick_label(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

fn x_label(family: Family) -> &'static str {
    match family {
        Family::Distance2d => "radius r",
        Family::DistanceNd => "distance factor",
        Family::DispersionNd => "dispersion factor",
        Family::Spherical2d => "sweep value",
        _ => "dispersion lambda",
    }
}

/// Renders rows of a single cell as a self-contained SVG chart.
pub fn chart_svg(rows: &[SweepRow]) -> Result<String, String> {
    let first = rows.first().ok_or("no rows to chart")?;
    if rows.iter().any(|r| r.cell != first.cell || r.family != first.family) {
        return Err("rows must share one cell".into());
    }
    let xs = rows.iter().map(|r| r.sweep_value);
    let (mut x0, mut x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| TOP + (1.0 - y) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let title = format!("{} cell ({}, {})", first.family, first.cell.0, first.cell.1);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&title)
    );

    // axes and ticks
    let _ = writeln!(
        svg,
        r#"<g stroke="black" stroke-width="1"><line x1="{LEFT}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.2}"/></g>"#,
        py(0.0),
        LEFT + plot_w,
        py(0.0),
        py(0.0)
    );
    for i in 0..=4 {
        let y = i as f64 / 4.0;
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{LEFT}" y2="{:.2}" stroke="black"/><line x1="{LEFT}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT - 5.0,
            py(y),
            py(y),
            py(y),
            LEFT + plot_w,
            py(y),
            LEFT - 8.0,
            py(y) + 4.0,
            tick_label(y)
        );
    }
    for i in 0..=4 {
        let x = x0 + (x1 - x0) * i as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(x),
            py(0.0),
            px(x),
            py(0.0) + 5.0,
            px(x),
            py(0.0) + 18.0,
            tick_label(x)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0,
        x_label(first.family)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">distinctness</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    let mut legend_y = TOP + 10.0;
    for s in &SERIES {
        let points: Vec<String> = rows
            .iter()
            .filter_map(|r| (s.value)(r).map(|v| format!("{:.2},{:.2}", px(r.sweep_value), py(v))))
            .collect();
        if points.is_empty() {
            continue;
        }
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="2"{dash} points="{}"/>"#,
            s.color,
            points.join(" ")
        );
        let lx = LEFT + plot_w + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{legend_y:.2}" x2="{:.2}" y2="{legend_y:.2}" stroke="{}" stroke-width="2"{dash}/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 24.0,
            s.color,
            lx + 30.0,
            legend_y + 4.0,
            escape(s.label)
        );
        legend_y += 20.0;
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_chart(rows: &[SweepRow], path: &Path) -> Result<(), IoError> {
    let svg = chart_svg(rows).map_err(|message| IoError::Parse {
        path: path.display().to_string(),
        line: 0,
        message,
    })?;
    std::fs::write(path, svg).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes one chart per cell into `dir`, named `<family>_<i>_<j>.svg`.
pub fn emit_charts(rows: &[SweepRow], dir: &Path) -> Result<Vec<std::path::PathBuf>, IoError> {
    std::fs::create_dir_all(dir).map_err(|source| IoError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    for group in rows.chunk_by(|a, b| a.cell == b.cell && a.family == b.family) {
        let r = &group[0];
        let path = dir.join(format!("{}_{}_{}.svg", r.family, r.cell.0, r.cell.1));
        emit_chart(group, &path)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(i: usize, x: f64) -> SweepRow {
        SweepRow {
            family: Family::Distance2d,
            cell: (1, 2),
            sweep_index: i,
            sweep_value: x,
            distinctness_exact: Some(0.9),
            distinctness_mc: Some(0.8 + 0.01 * i as f64),
            mc_std_error: Some(1e-3),
            distinctness_linear: Some(0.85),
            lambda_avg: Some(0.3),
            lambda_min: Some(0.3),
            e_dist: Some(12.5),
            reason: String::new(),
        }
    }

    #[test]
    fn one_row_gives_two_lines() {
        let text = rows_to_csv(&[row(0, 1.0)]);
        assert_eq!(text.lines().count(), 2);
        assert!(text.ends_with('\n') && !text.contains('\r'));
        assert_eq!(text.lines().next().unwrap().split(',').count(), 13);
    }

    #[test]
    fn round_trip_is_exact() {
        let mut rows = vec![row(0, 0.1), row(1, 1.0 / 3.0)];
        rows[1].distinctness_exact = None;
        rows[1].reason = "exact: dimension 3 too high".into();
        rows[0].e_dist = Some(f64::MIN_POSITIVE);
        let text = rows_to_csv(&rows);
        assert!(text.lines().nth(2).unwrap().contains(",,"));
        assert_eq!(rows_from_csv(&text).unwrap(), rows);
    }

    #[test]
    fn chart_has_one_polyline_per_measure() {
        let rows = vec![row(0, 1.0), row(1, 2.0)];
        let svg = chart_svg(&rows).unwrap();
        assert!(svg.contains("viewBox=\"0 0 640 420\""));
        assert_eq!(svg.matches("<polyline").count(), 5);
        for line in svg.lines().filter(|l| l.starts_with("<polyline")) {
            let points = line.split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
            assert_eq!(points.split(' ').count(), 2);
        }
        for color in ["red", "green", "turquoise", "blue"] {
            assert!(svg.contains(&format!("stroke=\"{color}\"")));
        }
    }

    #[test]
    fn missing_measure_is_left_out() {
        let mut rows = vec![row(0, 1.0), row(1, 2.0)];
        for r in &mut rows {
            r.distinctness_exact = None;
            r.distinctness_linear = None;
        }
        let svg = chart_svg(&rows).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(!svg.contains("stroke=\"red\""));
        assert!(!svg.contains("linear 1 - p_minmax"));
    }

    #[test]
    fn chart_rejects_mixed_cells() {
        let mut rows = vec![row(0, 1.0), row(1, 2.0)];
        rows[1].cell = (2, 2);
        assert!(chart_svg(&rows).is_err());
        assert!(chart_svg(&[]).is_err());
    }

    #[test]
    fn chart_is_well_formed_xml() {
        let svg = chart_svg(&[row(0, 1.0)]).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let root = doc.root_element();
        assert_eq!(root.tag_name().name(), "svg");
        assert!(root.attribute("viewBox").is_some());
        assert_eq!(root.descendants().filter(|n| n.has_tag_name("polyline")).count(), 5);
    }
}
