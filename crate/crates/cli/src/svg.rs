//! Minimal static SVG quick-look plots.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    }
}

fn frame(out: &mut String, title: &str, xlabel: &str, ylabel: &str, x: (f64, f64), y: (f64, f64)) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>
<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>
<text x="{}" y="{}" text-anchor="middle">{}</text>
<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>
<text x="{PAD}" y="{}" text-anchor="start">{:.3e}</text>
<text x="{}" y="{}" text-anchor="end">{:.3e}</text>
<text x="{}" y="{}" text-anchor="end">{:.3e}</text>
<text x="{}" y="{}" text-anchor="end">{:.3e}</text>
"#,
        W / 2.0,
        escape(title),
        W - 2.0 * PAD,
        H - 2.0 * PAD,
        W / 2.0,
        H - 15.0,
        escape(xlabel),
        H / 2.0,
        H / 2.0,
        escape(ylabel),
        H - PAD + 15.0,
        x.0,
        W - PAD,
        H - PAD + 15.0,
        x.1,
        PAD - 4.0,
        H - PAD,
        y.0,
        PAD - 4.0,
        PAD + 10.0,
        y.1,
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Line chart of one or more named series sharing both axes.
pub fn line_chart(title: &str, xlabel: &str, ylabel: &str, series: &[(&str, Vec<(f64, f64)>)]) -> String {
    let xr = range(series.iter().flat_map(|s| s.1.iter().map(|p| p.0)));
    let yr = range(series.iter().flat_map(|s| s.1.iter().map(|p| p.1)));
    let sx = |x: f64| PAD + (x - xr.0) / (xr.1 - xr.0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - yr.0) / (yr.1 - yr.0) * (H - 2.0 * PAD);
    let mut out = String::new();
    frame(&mut out, title, xlabel, ylabel, xr, yr);
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = pts
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            W - PAD - 120.0,
            PAD + 16.0 * (i + 1) as f64,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Heatmap of `values[row][col]` with rows along y (time) and columns along
/// x (position). Large inputs are decimated to at most 200×200 cells.
pub fn heatmap(title: &str, xlabel: &str, ylabel: &str, x: &[f64], y: &[f64], values: &[Vec<f64>]) -> String {
    let xr = range(x.iter().copied());
    let yr = range(y.iter().copied());
    let mut out = String::new();
    frame(&mut out, title, xlabel, ylabel, xr, yr);
    let vmax = values
        .iter()
        .flatten()
        .copied()
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let nr = values.len();
    let nc = x.len();
    if nr == 0 || nc == 0 || vmax <= 0.0 {
        out.push_str("</svg>\n");
        return out;
    }
    let rs = nr.div_ceil(200);
    let cs = nc.div_ceil(200);
    let cell_w = (W - 2.0 * PAD) / nc.div_ceil(cs) as f64;
    let cell_h = (H - 2.0 * PAD) / nr.div_ceil(rs) as f64;
    for (bi, r0) in (0..nr).step_by(rs).enumerate() {
        for (bj, c0) in (0..nc).step_by(cs).enumerate() {
            let mut peak = 0.0f64;
            for row in &values[r0..(r0 + rs).min(nr)] {
                for v in &row[c0..(c0 + cs).min(nc)] {
                    peak = peak.max(*v);
                }
            }
            let level = (255.0 * (1.0 - peak / vmax)).round().clamp(0.0, 255.0) as u8;
            if level == 255 {
                continue;
            }
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({level},{level},255)"/>"#,
                PAD + bj as f64 * cell_w,
                H - PAD - (bi + 1) as f64 * cell_h,
                cell_w,
                cell_h
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
