//! MDS scatter plots.

use std::collections::BTreeSet;
use std::fmt::Write as _;

const SIZE: f64 = 800.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// One circle per point, colored by label, with a legend in the top-left
/// corner. Unlabeled points are grey. Both axes share one scale.
pub fn scatter_svg(points: &[[f64; 2]], labels: &[Option<String>], ids: &[String]) -> String {
    let classes: Vec<&str> = labels.iter().flatten().map(String::as_str).collect::<BTreeSet<_>>().into_iter().collect();
    let color = |l: &Option<String>| match l {
        Some(l) => PALETTE[classes.iter().position(|c| c == l).unwrap_or(0) % PALETTE.len()],
        None => "#999999",
    };
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let scale = if span > 0.0 { (SIZE - 2.0 * MARGIN) / span } else { 0.0 };
    let mid = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" width="{SIZE}" height="{SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    for (i, p) in points.iter().enumerate() {
        let x = SIZE / 2.0 + (p[0] - mid[0]) * scale;
        let y = SIZE / 2.0 - (p[1] - mid[1]) * scale;
        let id = ids.get(i).map_or(String::new(), |s| escape(s));
        let _ = writeln!(
            s,
            r#"<circle cx="{x:.3}" cy="{y:.3}" r="6" fill="{}" stroke="black" stroke-width="0.5"><title>{id}</title></circle>"#,
            color(&labels[i])
        );
    }
    for (k, c) in classes.iter().enumerate() {
        let y = 24.0 + 22.0 * k as f64;
        let _ = writeln!(s, r#"<circle cx="20" cy="{y}" r="6" fill="{}"/>"#, PALETTE[k % PALETTE.len()]);
        let _ = writeln!(
            s,
            r#"<text x="34" y="{}" font-family="sans-serif" font-size="14">{}</text>"#,
            y + 5.0,
            escape(c)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_circle_per_point_plus_legend() {
        let pts = [[0.0, 0.0], [1.0, 0.5], [-1.0, 2.0]];
        let labels = [Some("a".to_string()), Some("b".to_string()), None];
        let ids = ["x".to_string(), "y".to_string(), "z<1".to_string()];
        let svg = scatter_svg(&pts, &labels, &ids);
        assert!(svg.contains(r#"viewBox="0 0 800 800""#));
        assert_eq!(svg.matches("<title>").count(), 3);
        assert_eq!(svg.matches("<circle").count(), 5);
        assert!(svg.contains("z&lt;1"));
    }
}
