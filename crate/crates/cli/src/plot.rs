//! Self-contained SVG chart of a sweep: a dashed horizontal baseline
//! series and a solid broken-symmetry series over the exponent grid,
//! with axes, ticks, and a legend. No external assets.

use std::fmt::Write;

use equimetric::SweepResult;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 32.0;
const MARGIN_BOTTOM: f64 = 56.0;
const TICKS: usize = 5;

fn fmt(v: f64) -> String {
    // enough digits for tick labels without dragging in float noise
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Renders the two-series sweep chart: x-axis `k`, y-axis SMD.
pub fn sweep_chart(result: &SweepResult) -> String {
    let ks: Vec<f64> = result.rows.iter().map(|r| r.k).collect();
    let mut values: Vec<f64> = result.rows.iter().map(|r| r.smd_broken).collect();
    values.push(result.baseline);

    let x_min = ks.first().copied().unwrap_or(0.0);
    let x_max = ks.last().copied().unwrap_or(1.0);
    let x_span = if x_max > x_min { x_max - x_min } else { 1.0 };
    let y_lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let y_hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pad = ((y_hi - y_lo).abs()).max(1e-12) * 0.08;
    let (y_min, y_max) = (y_lo - pad, y_hi + pad);
    let y_span = y_max - y_min;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_at = |k: f64| MARGIN_LEFT + (k - x_min) / x_span * plot_w;
    let y_at = |v: f64| MARGIN_TOP + (y_max - v) / y_span * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );

    // axes
    let x0 = MARGIN_LEFT;
    let y0 = MARGIN_TOP + plot_h;
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{y0}" x2="{}" y2="{y0}" stroke="black" stroke-width="1"/>"#,
        MARGIN_LEFT + plot_w
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{}" x2="{x0}" y2="{y0}" stroke="black" stroke-width="1"/>"#,
        MARGIN_TOP
    );

    // ticks and labels
    for i in 0..=TICKS {
        let frac = i as f64 / TICKS as f64;
        let k = x_min + frac * x_span;
        let x = x_at(k);
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="{y0}" x2="{x}" y2="{}" stroke="black" stroke-width="1"/>"#,
            y0 + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            y0 + 20.0,
            fmt(k)
        );

        let v = y_min + frac * y_span;
        let y = y_at(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{y}" x2="{x0}" y2="{y}" stroke="black" stroke-width="1"/>"#,
            x0 - 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="end">{}</text>"#,
            x0 - 9.0,
            y + 4.0,
            fmt(v)
        );
    }

    // axis titles
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">k</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 20 {})">SMD</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    // baseline series: measurement equivalence holds (dashed)
    let baseline_points: String = ks
        .iter()
        .map(|&k| format!("{},{}", x_at(k), y_at(result.baseline)))
        .collect::<Vec<_>>()
        .join(" ");
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="black" stroke-width="1.5" stroke-dasharray="7 5" points="{baseline_points}"/>"#
    );

    // broken-symmetry series (solid)
    let broken_points: String = result
        .rows
        .iter()
        .map(|r| format!("{},{}", x_at(r.k), y_at(r.smd_broken)))
        .collect::<Vec<_>>()
        .join(" ");
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="black" stroke-width="1.5" points="{broken_points}"/>"#
    );

    // legend
    let lx = MARGIN_LEFT + 16.0;
    let ly = MARGIN_TOP + 14.0;
    let _ = writeln!(
        svg,
        r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="black" stroke-width="1.5" stroke-dasharray="7 5"/>"#,
        lx + 34.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">equivalence holds</text>"#,
        lx + 40.0,
        ly + 4.0
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{lx}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="1.5"/>"#,
        ly + 18.0,
        lx + 34.0,
        ly + 18.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">symmetry broken</text>"#,
        lx + 40.0,
        ly + 22.0
    );

    svg.push_str("</svg>\n");
    svg
}
