//! Bare-bones SVG charts: axes, points, lines and boxes.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Frame {
        let (x0, x1) = range(xs);
        let (y0, y1) = range(ys);
        Frame { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD)
    }
}

fn range(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn open(title: &str, xlabel: &str, ylabel: &str, f: &Frame) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle">{title}</text>"#, W / 2.0);
    let _ = writeln!(
        s,
        r#"<line x1="{PAD}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{b}" stroke="black"/>"#,
        b = H - PAD,
        r = W - PAD
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text><text x="12" y="{}" transform="rotate(-90 12 {})" text-anchor="middle">{ylabel}</text>"#,
        W / 2.0,
        H - 12.0,
        H / 2.0,
        H / 2.0
    );
    for (v, anchor) in [(f.y0, H - PAD), (f.y1, PAD)] {
        let _ = writeln!(s, r#"<text x="{}" y="{anchor}" text-anchor="end">{v:.3}</text>"#, PAD - 4.0);
    }
    s
}

fn legend(s: &mut String, labels: &[&str]) {
    for (i, l) in labels.iter().enumerate() {
        let y = PAD + 14.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="10" height="10" fill="{}"/><text x="{}" y="{}">{l}</text>"#,
            W - PAD - 60.0,
            y - 9.0,
            COLORS[i % COLORS.len()],
            W - PAD - 46.0,
            y
        );
    }
}

/// Polylines with point markers; each series is `(label, points)`.
pub fn line_chart(title: &str, xlabel: &str, ylabel: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let pts = series.iter().flat_map(|(_, p)| p.iter().copied());
    let f = Frame::new(pts.clone().map(|p| p.0), pts.map(|p| p.1));
    let mut s = open(title, xlabel, ylabel, &f);
    for (i, (_, p)) in series.iter().enumerate() {
        let c = COLORS[i % COLORS.len()];
        let path: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{c}" points="{}"/>"#, path.join(" "));
        for &(x, y) in p {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{c}"/>"#, f.px(x), f.py(y));
        }
    }
    let labels: Vec<&str> = series.iter().map(|(l, _)| l.as_str()).collect();
    legend(&mut s, &labels);
    s.push_str("</svg>\n");
    s
}

/// Scatter plot; each series is `(label, points)`.
pub fn scatter(title: &str, xlabel: &str, ylabel: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let pts = series.iter().flat_map(|(_, p)| p.iter().copied());
    let f = Frame::new(pts.clone().map(|p| p.0), pts.map(|p| p.1));
    let mut s = open(title, xlabel, ylabel, &f);
    for (i, (_, p)) in series.iter().enumerate() {
        let c = COLORS[i % COLORS.len()];
        for &(x, y) in p {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="1.5" fill="{c}"/>"#, f.px(x), f.py(y));
        }
    }
    let labels: Vec<&str> = series.iter().map(|(l, _)| l.as_str()).collect();
    legend(&mut s, &labels);
    s.push_str("</svg>\n");
    s
}

fn quartiles(v: &[f64]) -> [f64; 5] {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    let at = |q: f64| {
        let pos = q * (v.len() - 1) as f64;
        let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
        v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
    };
    [v[0], at(0.25), at(0.5), at(0.75), v[v.len() - 1]]
}

/// Box-and-whisker plot (min, quartiles, max) of each group.
pub fn boxplot(title: &str, ylabel: &str, groups: &[(String, Vec<f64>)]) -> String {
    let groups: Vec<_> = groups.iter().filter(|(_, v)| !v.is_empty()).collect();
    let f = Frame::new(
        [0.0, groups.len() as f64].into_iter(),
        groups.iter().flat_map(|(_, v)| v.iter().copied()),
    );
    let mut s = open(title, "estimator", ylabel, &f);
    for (i, (label, v)) in groups.iter().enumerate() {
        let [lo, q1, med, q3, hi] = quartiles(v);
        let cx = f.px(i as f64 + 0.5);
        let half = 0.3 * (f.px(1.0) - f.px(0.0)) / 2.0;
        let c = COLORS[i % COLORS.len()];
        let _ = writeln!(
            s,
            r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="{c}"/>"#,
            f.py(lo),
            f.py(hi)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="white" stroke="{c}"/>"#,
            cx - half,
            f.py(q3),
            2.0 * half,
            (f.py(q1) - f.py(q3)).max(0.5)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{m:.2}" x2="{:.2}" y2="{m:.2}" stroke="{c}" stroke-width="2"/>"#,
            cx - half,
            cx + half,
            m = f.py(med)
        );
        let _ = writeln!(
            s,
            r#"<text x="{cx:.2}" y="{}" text-anchor="middle">{label}</text>"#,
            H - PAD + 14.0
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charts_are_well_formed() {
        let series = vec![("a".to_string(), vec![(1.0, 2.0), (2.0, 3.0)])];
        for svg in [
            line_chart("t", "x", "y", &series),
            scatter("t", "x", "y", &series),
            boxplot("t", "y", &[("e".into(), vec![1.0, 2.0, 3.0]), ("sG".into(), vec![5.0])]),
            line_chart("t", "x", "y", &[]),
        ] {
            assert!(svg.starts_with("<svg"));
            assert!(svg.ends_with("</svg>\n"));
            assert!(!svg.contains("NaN"));
        }
    }

    #[test]
    fn quartiles_of_small_sets() {
        assert_eq!(quartiles(&[3.0, 1.0, 2.0]), [1.0, 1.5, 2.0, 2.5, 3.0]);
        assert_eq!(quartiles(&[4.0]), [4.0; 5]);
    }
}
