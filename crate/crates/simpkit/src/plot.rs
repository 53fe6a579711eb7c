//! Learning-curve tables and SVG line charts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use plotters::prelude::*;
use simpkit_core::metrics::Metric;
use simpkit_core::selection::LearningCurves;

use crate::error::io_err;
use crate::Result;

/// `system,metric,epoch,score` rows, sorted by system, metric and epoch.
pub fn curves_csv(curves: &LearningCurves) -> String {
    let mut out = String::from("system,metric,epoch,score\n");
    for (system, metrics) in curves {
        for (metric, series) in metrics {
            for (epoch, score) in series {
                let _ = writeln!(out, "{},{},{epoch},{score}", csv_field(system), metric.key());
            }
        }
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_curves_csv(path: &Path, curves: &LearningCurves) -> Result<()> {
    fs::write(path, curves_csv(curves)).map_err(io_err(path))
}

/// One line per system for `metric`. Systems without the metric are left out.
pub fn write_curve_svg(path: &Path, curves: &LearningCurves, metric: Metric) -> Result<()> {
    let lines: Vec<(&String, &Vec<(u32, f64)>)> = curves
        .iter()
        .filter_map(|(system, m)| m.get(&metric).map(|s| (system, s)))
        .collect();
    let points = lines.iter().flat_map(|(_, s)| s.iter());
    let (mut x_max, mut y_min, mut y_max) = (1u32, f64::INFINITY, f64::NEG_INFINITY);
    for &(e, v) in points {
        x_max = x_max.max(e);
        y_min = y_min.min(v);
        y_max = y_max.max(v);
    }
    if !y_min.is_finite() {
        (y_min, y_max) = (0.0, 100.0);
    }
    let pad = ((y_max - y_min) * 0.1).max(1.0);
    let draw = || -> std::result::Result<(), Box<dyn std::error::Error>> {
        let root = SVGBackend::new(path, (800, 500)).into_drawing_area();
        root.fill(&WHITE)?;
        let mut chart = ChartBuilder::on(&root)
            .caption(metric.label(), ("sans-serif", 24))
            .margin(16)
            .x_label_area_size(40)
            .y_label_area_size(56)
            .build_cartesian_2d(0u32..x_max + 1, (y_min - pad)..(y_max + pad))?;
        chart.configure_mesh().x_desc("epoch").y_desc(metric.label()).draw()?;
        for (i, (system, series)) in lines.iter().enumerate() {
            let color = Palette99::pick(i).to_rgba();
            chart
                .draw_series(LineSeries::new(series.iter().copied(), color.stroke_width(2)))?
                .label(system.as_str())
                .legend(move |(x, y)| PathElement::new([(x, y), (x + 20, y)], color.stroke_width(2)));
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()?;
        root.present()?;
        Ok(())
    };
    draw().map_err(|e| io_err(path)(std::io::Error::other(e.to_string())))
}
