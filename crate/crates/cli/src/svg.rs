use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use nrmi_core::experiments::HistogramRecord;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

/// One polyline per histogram (bin centers against densities), the limit
/// curve in black and a legend of `a` values. Output depends only on input.
pub fn render_svg_density(histograms: &[HistogramRecord], limit: &[(f64, f64)]) -> Result<String> {
    if histograms.is_empty() {
        bail!("density plot needs at least one histogram");
    }
    let series: Vec<Vec<(f64, f64)>> =
        histograms.iter().map(|h| h.histogram.centers().into_iter().zip(h.histogram.density()).collect()).collect();
    let all = series.iter().flatten().chain(limit);
    let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 <= 0.0 {
        y1 = 1.0;
    }
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - y / (1.05 * y1) * (HEIGHT - 2.0 * MARGIN);
    let points = |pts: &[(f64, f64)]| -> String {
        pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect::<Vec<_>>().join(" ")
    };

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )?;
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    let (bl, br, bt, bb) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    writeln!(s, r#"<polyline points="{bl},{bt} {bl},{bb} {br},{bb}" fill="none" stroke="black"/>"#)?;
    writeln!(s, r#"<text x="{bl}" y="{:.2}" font-size="12">{x0:.3}</text>"#, bb + 16.0)?;
    writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{x1:.3}</text>"#, br, bb + 16.0)?;
    writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{:.3}</text>"#, bl - 4.0, py(y1), y1)?;
    for (i, (h, pts)) in histograms.iter().zip(&series).enumerate() {
        let color = COLORS[i % COLORS.len()];
        writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, points(pts))?;
        let ly = MARGIN + 16.0 * i as f64;
        writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            br - 90.0,
            br - 70.0
        )?;
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12">a = {}</text>"#, br - 64.0, ly + 4.0, h.a)?;
    }
    if !limit.is_empty() {
        writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="black" stroke-width="2" stroke-dasharray="6,3"/>"#,
            points(limit)
        )?;
        let ly = MARGIN + 16.0 * histograms.len() as f64;
        writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="black" stroke-width="2" stroke-dasharray="6,3"/>"#,
            br - 90.0,
            br - 70.0
        )?;
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12">limit</text>"#, br - 64.0, ly + 4.0)?;
    }
    writeln!(s, "</svg>")?;
    Ok(s)
}

pub fn emit_svg_density(histograms: &[HistogramRecord], limit: &[(f64, f64)], path: &Path) -> Result<()> {
    let svg = render_svg_density(histograms, limit)?;
    fs::write(path, svg).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nrmi_core::Histogram;

    fn record(a: f64, shift: f64) -> HistogramRecord {
        let xs: Vec<f64> = (0..200).map(|i| shift + (i as f64 * 0.37).sin()).collect();
        HistogramRecord { a, histogram: Histogram::freedman_diaconis(&xs).unwrap() }
    }

    #[test]
    fn one_polyline_per_histogram_plus_limit() {
        let hs: Vec<_> = [2.0, 5.0, 10.0, 20.0, 30.0].iter().map(|&a| record(a, a / 100.0)).collect();
        let limit = [(-1.0, 0.1), (0.0, 0.4), (1.0, 0.1)];
        let svg = render_svg_density(&hs, &limit).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1 + 5 + 1);
        assert!(svg.contains("a = 30"));
        assert_eq!(svg, render_svg_density(&hs, &limit).unwrap());
        let one = render_svg_density(&hs[..1], &limit).unwrap();
        assert_eq!(one.matches("<polyline").count(), 1 + 1 + 1);
        assert!(render_svg_density(&[], &limit).is_err());
    }
}
