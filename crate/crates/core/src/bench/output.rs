//! CSV tables and SVG figures for the benchmark results.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use plotters::prelude::*;

use super::contour::ContourSet;
use super::{ContourMetric, ConvergenceRecord, Scheme};
use crate::error::{Error, Result};

pub const EFFICIENCY_HEADER: [&str; 7] = [
    "scheme",
    "h",
    "n_nodes",
    "steps",
    "linf_error",
    "wall_seconds",
    "velocity_evals",
];

pub const CONTOUR_HEADER: [&str; 7] = [
    "scheme",
    "level",
    "polyline_id",
    "point_index",
    "x",
    "y",
    "closed",
];

pub const METRIC_HEADER: [&str; 6] = [
    "scheme",
    "radius",
    "level",
    "polylines",
    "all_closed",
    "hausdorff",
];

fn output_error(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Output {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Opens `path` and writes the `# generated <timestamp>` line.
fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(
        file,
        "# generated {}",
        Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true)
    )
    .map_err(io)?;
    Ok(csv::Writer::from_writer(file))
}

fn finish(mut w: csv::Writer<BufWriter<File>>, path: &Path) -> Result<()> {
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Efficiency table, one row per record in the given order.
pub fn write_records_csv(records: &[ConvergenceRecord], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = output_error(path);
    w.write_record(EFFICIENCY_HEADER).map_err(&err)?;
    for r in records {
        w.write_record([
            r.scheme.name().to_string(),
            r.h.to_string(),
            r.n_nodes.to_string(),
            r.steps.to_string(),
            r.linf_error.to_string(),
            r.wall_seconds.to_string(),
            r.velocity_evals.to_string(),
        ])
        .map_err(&err)?;
    }
    finish(w, path)
}

/// Every point of every polyline, one row each.
pub fn write_contours_csv(sets: &[&ContourSet], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = output_error(path);
    w.write_record(CONTOUR_HEADER).map_err(&err)?;
    for set in sets {
        for (id, line) in set.polylines.iter().enumerate() {
            for (k, p) in line.points.iter().enumerate() {
                w.write_record([
                    set.scheme.clone(),
                    line.level.to_string(),
                    id.to_string(),
                    k.to_string(),
                    p[0].to_string(),
                    p[1].to_string(),
                    line.closed.to_string(),
                ])
                .map_err(&err)?;
            }
        }
    }
    finish(w, path)
}

pub fn write_metrics_csv(metrics: &[ContourMetric], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = output_error(path);
    w.write_record(METRIC_HEADER).map_err(&err)?;
    for m in metrics {
        w.write_record([
            m.scheme.clone(),
            m.radius.to_string(),
            m.level.to_string(),
            m.polylines.to_string(),
            m.all_closed.to_string(),
            m.hausdorff.to_string(),
        ])
        .map_err(&err)?;
    }
    finish(w, path)
}

fn plot_error<E: std::fmt::Display>(path: &Path) -> impl Fn(E) -> Error + '_ {
    move |e| Error::Output {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn scheme_color(index: usize) -> RGBColor {
    const COLORS: [RGBColor; 6] = [
        RGBColor(31, 119, 180),
        RGBColor(255, 127, 14),
        RGBColor(44, 160, 44),
        RGBColor(214, 39, 40),
        RGBColor(148, 103, 189),
        RGBColor(140, 86, 75),
    ];
    COLORS[index % COLORS.len()]
}

/// Log-log range covering every positive finite coordinate, padded by a
/// factor of 1.5; `None` without data.
fn log_range(values: impl Iterator<Item = f64>) -> Option<std::ops::Range<f64>> {
    let (lo, hi) = values
        .filter(|v| v.is_finite() && *v > 0.0)
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    (hi > 0.0).then(|| lo / 1.5..hi * 1.5)
}

/// A log-log chart with one marked line per named series.
pub fn loglog_plot(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[(String, Vec<(f64, f64)>)],
) -> Result<()> {
    let err = plot_error(path);
    let root = SVGBackend::new(path, (800, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(&err)?;
    let points = || series.iter().flat_map(|(_, pts)| pts.iter().copied());
    let xr = log_range(points().map(|p| p.0));
    let yr = log_range(points().map(|p| p.1));
    let has_data = xr.is_some() && yr.is_some();
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 24))
        .margin(20)
        .x_label_area_size(50)
        .y_label_area_size(80)
        .build_cartesian_2d(
            xr.unwrap_or(1e-3..1.0).log_scale(),
            yr.unwrap_or(1e-3..1.0).log_scale(),
        )
        .map_err(&err)?;
    chart
        .configure_mesh()
        .x_desc(x_label)
        .y_desc(y_label)
        .x_label_formatter(&|x| format!("{x:.1e}"))
        .y_label_formatter(&|y| format!("{y:.1e}"))
        .draw()
        .map_err(&err)?;

    if !has_data {
        root.draw(&Text::new(
            "no data",
            (360, 290),
            ("sans-serif", 28).into_font(),
        ))
        .map_err(&err)?;
    } else {
        for (i, (name, pts)) in series.iter().enumerate() {
            let color = scheme_color(i);
            let pts: Vec<(f64, f64)> = pts
                .iter()
                .copied()
                .filter(|p| p.0 > 0.0 && p.1 > 0.0 && p.0.is_finite() && p.1.is_finite())
                .collect();
            chart
                .draw_series(LineSeries::new(pts.clone(), color.stroke_width(2)))
                .map_err(&err)?
                .label(name.as_str())
                .legend(move |(x, y)| {
                    PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2))
                });
            chart
                .draw_series(pts.into_iter().map(|p| Circle::new(p, 4, color.filled())))
                .map_err(&err)?;
        }
        chart
            .configure_series_labels()
            .position(SeriesLabelPosition::LowerRight)
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(&err)?;
    }
    root.present().map_err(&err)?;
    Ok(())
}

fn series_by_scheme(
    records: &[ConvergenceRecord],
    point: impl Fn(&ConvergenceRecord) -> (f64, f64),
) -> Vec<(String, Vec<(f64, f64)>)> {
    let mut schemes: Vec<Scheme> = records.iter().map(|r| r.scheme).collect();
    schemes.sort_by_key(|s| s.name());
    schemes.dedup();
    schemes
        .into_iter()
        .map(|s| {
            let mut pts: Vec<(f64, f64)> = records
                .iter()
                .filter(|r| r.scheme == s && r.failure.is_none())
                .map(&point)
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            (s.name().to_string(), pts)
        })
        .collect()
}

/// `error_vs_h.svg`, `time_vs_h.svg` and `time_vs_error.svg` in `dir`.
pub fn plot_efficiency(records: &[ConvergenceRecord], dir: &Path) -> Result<Vec<PathBuf>> {
    let plots: [(&str, &str, &str, &str, fn(&ConvergenceRecord) -> (f64, f64)); 3] = [
        ("error_vs_h.svg", "L-infinity error", "h", "error", |r| {
            (r.h, r.linf_error)
        }),
        (
            "time_vs_h.svg",
            "Computational cost",
            "h",
            "wall time [s]",
            |r| (r.h, r.wall_seconds),
        ),
        (
            "time_vs_error.svg",
            "Cost versus accuracy",
            "error",
            "wall time [s]",
            |r| (r.linf_error, r.wall_seconds),
        ),
    ];
    let mut written = Vec::new();
    for (file, title, xl, yl, point) in plots {
        let path = dir.join(file);
        loglog_plot(&path, title, xl, yl, &series_by_scheme(records, point))?;
        written.push(path);
    }
    Ok(written)
}

/// Contours of `set` over the `reference` contours, on a background of the
/// computational grid with spacing `h`.
pub fn plot_contours(
    set: &ContourSet,
    reference: Option<&ContourSet>,
    h: f64,
    path: &Path,
) -> Result<()> {
    let err = plot_error(path);
    let root = SVGBackend::new(path, (800, 800)).into_drawing_area();
    root.fill(&WHITE).map_err(&err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(format!("{} contours", set.scheme), ("sans-serif", 24))
        .margin(20)
        .x_label_area_size(40)
        .y_label_area_size(50)
        .build_cartesian_2d(0.0..1.0, 0.0..1.0)
        .map_err(&err)?;
    let cells = (1.0 / h).round().max(1.0) as usize;
    chart
        .configure_mesh()
        .x_labels(cells.min(10) + 1)
        .y_labels(cells.min(10) + 1)
        .disable_mesh()
        .draw()
        .map_err(&err)?;
    let grid_color = RGBColor(225, 225, 225);
    let lines = (0..=cells).flat_map(|k| {
        let s = k as f64 / cells as f64;
        [
            PathElement::new(vec![(s, 0.0), (s, 1.0)], grid_color),
            PathElement::new(vec![(0.0, s), (1.0, s)], grid_color),
        ]
    });
    chart.draw_series(lines).map_err(&err)?;

    let closed_path = |points: &[[f64; 2]], closed: bool| {
        let mut v: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
        if closed {
            v.extend(v.first().copied());
        }
        v
    };

    if let Some(reference) = reference {
        let gray = RGBColor(150, 150, 150);
        chart
            .draw_series(
                reference.polylines.iter().map(|l| {
                    PathElement::new(closed_path(&l.points, l.closed), gray.stroke_width(3))
                }),
            )
            .map_err(&err)?;
    }

    let mut levels: Vec<f64> = set.polylines.iter().map(|l| l.level).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    for (i, &level) in levels.iter().enumerate() {
        let color = scheme_color(i);
        chart
            .draw_series(
                set.at_level(level).map(|l| {
                    PathElement::new(closed_path(&l.points, l.closed), color.stroke_width(1))
                }),
            )
            .map_err(&err)?
            .label(format!("level {level:.4}"))
            .legend(move |(x, y)| {
                PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2))
            });
    }
    if levels.is_empty() {
        root.draw(&Text::new(
            "no data",
            (360, 390),
            ("sans-serif", 28).into_font(),
        ))
        .map_err(&err)?;
    } else {
        chart
            .configure_series_labels()
            .position(SeriesLabelPosition::UpperRight)
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(&err)?;
    }
    root.present().map_err(&err)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::contour::Polyline;

    fn record(scheme: Scheme, h: f64) -> ConvergenceRecord {
        ConvergenceRecord {
            scheme,
            h,
            n_nodes: (1.0 / (h * h)).round() as usize,
            steps: (1.0 / h).round() as usize,
            linf_error: h * h * h,
            wall_seconds: 0.01 / h,
            velocity_evals: 42,
            failure: None,
        }
    }

    fn body(path: &Path) -> String {
        let text = std::fs::read_to_string(path).unwrap();
        assert!(text.starts_with("# generated "));
        text.lines().skip(1).collect::<Vec<_>>().join("\n")
    }

    #[test]
    fn empty_records_give_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        write_records_csv(&[], &path).unwrap();
        assert_eq!(body(&path), EFFICIENCY_HEADER.join(","));
    }

    #[test]
    fn one_record_gives_two_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        write_records_csv(&[record(Scheme::Jet, 0.05)], &path).unwrap();
        let b = body(&path);
        let lines: Vec<_> = b.lines().collect();
        assert_eq!(lines.len(), 2);
        let r = record(Scheme::Jet, 0.05);
        let expected = format!("jet,0.05,400,20,{},{},42", r.linf_error, r.wall_seconds);
        assert_eq!(lines[1], expected);
    }

    #[test]
    fn contour_csv_is_deterministic() {
        let set = ContourSet {
            scheme: "jet".into(),
            polylines: vec![Polyline {
                level: 0.5,
                points: vec![[0.1, 0.2], [0.3, 0.4], [0.5, 0.1]],
                closed: true,
            }],
        };
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
        write_contours_csv(&[&set], &a).unwrap();
        write_contours_csv(&[&set], &b).unwrap();
        assert_eq!(body(&a), body(&b));
        assert!(body(&a)
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("jet,0.5,0,0,0.1,0.2,true"));
    }

    #[test]
    fn unwritable_path_reports_the_path() {
        let err = write_records_csv(&[], Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }

    #[test]
    fn plots_are_svg_with_markers() {
        let dir = tempfile::tempdir().unwrap();
        let records: Vec<_> = [0.05, 0.025, 0.0125]
            .iter()
            .flat_map(|&h| [record(Scheme::Jet, h), record(Scheme::Weno, 2.0 * h)])
            .collect();
        let files = plot_efficiency(&records, dir.path()).unwrap();
        assert_eq!(files.len(), 3);
        let svg = std::fs::read_to_string(&files[0]).unwrap();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 6);
    }

    #[test]
    fn empty_plot_says_no_data() {
        let dir = tempfile::tempdir().unwrap();
        let files = plot_efficiency(&[], dir.path()).unwrap();
        let svg = std::fs::read_to_string(&files[0]).unwrap();
        assert!(svg.contains("no data"));
        let path = dir.path().join("c.svg");
        plot_contours(&ContourSet::default(), None, 0.1, &path).unwrap();
        assert!(std::fs::read_to_string(&path).unwrap().contains("no data"));
    }
}
