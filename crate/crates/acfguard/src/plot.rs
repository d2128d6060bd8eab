//! Static SVG of a compression-ratio vs statistic-deviation frontier.

use std::fmt::Write;

use crate::json::SweepPoint;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 56.0;

/// One polyline per series of points, x = deviation (log scale when the
/// positive values span more than a decade), y = CR.
pub fn frontier_svg(title: &str, series: &[(&str, &[SweepPoint])]) -> String {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, p)| p.iter().map(|q| (q.acf_dev, q.cr)))
        .filter(|(d, c)| d.is_finite() && c.is_finite() && *d < f64::MAX)
        .collect();
    let positive: Vec<f64> = pts.iter().map(|p| p.0).filter(|d| *d > 0.0).collect();
    let (dmin, dmax) = bounds(positive.iter().copied());
    let log = dmin > 0.0 && dmax / dmin > 10.0;
    let fx = |d: f64| if log { d.max(dmin).log10() } else { d };
    let (xlo, xhi) = if log { (dmin.log10(), dmax.log10()) } else { bounds(pts.iter().map(|p| p.0)) };
    let (_, yhi) = bounds(pts.iter().map(|p| p.1));
    let sx = |d: f64| PAD + (fx(d) - xlo) / span(xlo, xhi) * (W - 2.0 * PAD);
    let sy = |c: f64| H - PAD - c / span(0.0, yhi) * (H - 2.0 * PAD);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title))
        .unwrap();
    writeln!(s, r#"<path d="M{PAD} {PAD} V{} H{}" stroke="black" fill="none"/>"#, H - PAD, W - PAD).unwrap();
    let xlabel = if log { "statistic deviation (log10)" } else { "statistic deviation" };
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#, W / 2.0, H - 16.0).unwrap();
    writeln!(
        s,
        r#"<text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle">compression ratio</text>"#,
        H / 2.0,
        H / 2.0
    )
    .unwrap();
    for (x, label) in [(PAD, xlo), (W - PAD, xhi)] {
        writeln!(s, r#"<text x="{x}" y="{}" text-anchor="middle">{}</text>"#, H - PAD + 16.0, tick(label)).unwrap();
    }
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, PAD - 4.0, PAD + 4.0, tick(yhi)).unwrap();

    const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    for (k, (name, points)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut sorted: Vec<&SweepPoint> =
            points.iter().filter(|p| p.acf_dev.is_finite() && p.acf_dev < f64::MAX).collect();
        sorted.sort_by(|a, b| a.acf_dev.total_cmp(&b.acf_dev));
        let path: Vec<String> = sorted.iter().map(|p| format!("{:.2},{:.2}", sx(p.acf_dev), sy(p.cr))).collect();
        if !path.is_empty() {
            writeln!(s, r#"<polyline points="{}" stroke="{color}" fill="none"/>"#, path.join(" ")).unwrap();
        }
        for p in &sorted {
            writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(p.acf_dev), sy(p.cr)).unwrap();
        }
        writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            W - PAD - 100.0,
            PAD + 16.0 * k as f64,
            escape(name)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 1.0)
    }
}

fn span(lo: f64, hi: f64) -> f64 {
    if hi > lo {
        hi - lo
    } else {
        1.0
    }
}

fn tick(v: f64) -> String {
    format!("{v:.3}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
