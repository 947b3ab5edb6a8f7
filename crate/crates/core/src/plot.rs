//! A small self-contained SVG scatter/line writer.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    Circle,
    Square,
    Triangle,
    Cross,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub marker: Marker,
    /// Join consecutive points with a polyline.
    pub connect: bool,
}

#[derive(Debug, Clone)]
pub struct Axis {
    pub label: String,
    pub log: bool,
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub x: Axis,
    pub y: Axis,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Scale {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Scale {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Scale {
        let vals: Vec<f64> = values.filter(|v| v.is_finite() && (!log || *v > 0.0)).map(|v| if log { v.log10() } else { v }).collect();
        let (mut lo, mut hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if log {
            lo = lo.floor();
            hi = hi.ceil();
        } else {
            let pad = ((hi - lo) * 0.08).max(1e-9);
            lo -= pad;
            hi += pad;
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        Scale { lo, hi, log }
    }

    fn unit(&self, v: f64) -> Option<f64> {
        let v = if self.log {
            if v <= 0.0 {
                return None;
            }
            v.log10()
        } else {
            v
        };
        v.is_finite().then(|| (v - self.lo) / (self.hi - self.lo))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo as i32, self.hi as i32);
            let step = ((b - a) / 8).max(1);
            (a..=b).step_by(step as usize).map(|e| ((e as f64 - self.lo) / (self.hi - self.lo), format!("1e{e}"))).collect()
        } else {
            let raw = (self.hi - self.lo) / 6.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(raw);
            let mut t = (self.lo / step).ceil() * step;
            let mut out = Vec::new();
            while t <= self.hi + 1e-9 * step {
                let label = if step >= 1.0 { format!("{}", t.round()) } else { format!("{:.*}", (-step.log10().floor()) as usize, t) };
                out.push(((t - self.lo) / (self.hi - self.lo), label));
                t += step;
            }
            out
        }
    }
}

fn marker(svg: &mut String, m: Marker, x: f64, y: f64, color: &str) {
    let r = 4.0;
    let _ = match m {
        Marker::Circle => writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{color}"/>"#),
        Marker::Square => writeln!(svg, r#"<rect x="{:.2}" y="{:.2}" width="{}" height="{}" fill="{color}"/>"#, x - r, y - r, 2.0 * r, 2.0 * r),
        Marker::Triangle => writeln!(
            svg,
            r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{color}"/>"#,
            x, y - r, x - r, y + r, x + r, y + r
        ),
        Marker::Cross => writeln!(
            svg,
            r#"<path d="M{:.2},{:.2}L{:.2},{:.2}M{:.2},{:.2}L{:.2},{:.2}" stroke="{color}" stroke-width="2"/>"#,
            x - r, y - r, x + r, y + r, x - r, y + r, x + r, y - r
        ),
    };
}

impl Plot {
    pub fn to_svg(&self) -> String {
        let xs = Scale::fit(self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)), self.x.log);
        let ys = Scale::fit(self.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)), self.y.log);
        let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let px = |u: f64| MARGIN_LEFT + u * pw;
        let py = |u: f64| MARGIN_TOP + (1.0 - u) * ph;

        let mut svg = String::new();
        let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#);
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(svg, r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#, MARGIN_LEFT + pw / 2.0, escape(&self.title));
        let _ = writeln!(svg, r##"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##);

        for (u, label) in xs.ticks() {
            let x = px(u);
            let _ = writeln!(svg, r##"<line x1="{x:.2}" y1="{MARGIN_TOP}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/>"##, MARGIN_TOP + ph);
            let _ = writeln!(svg, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#, MARGIN_TOP + ph + 18.0);
        }
        for (u, label) in ys.ticks() {
            let y = py(u);
            let _ = writeln!(svg, r##"<line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##, MARGIN_LEFT + pw);
            let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#, MARGIN_LEFT - 6.0, y + 4.0);
        }
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, MARGIN_LEFT + pw / 2.0, HEIGHT - 12.0, escape(&self.x.label));
        let _ = writeln!(
            svg,
            r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
            MARGIN_TOP + ph / 2.0,
            MARGIN_TOP + ph / 2.0,
            escape(&self.y.label)
        );

        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<(f64, f64)> = s
                .points
                .iter()
                .filter_map(|&(x, y)| Some((px(xs.unit(x)?), py(ys.unit(y)?))))
                .collect();
            if s.connect && pts.len() > 1 {
                let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, path.join(" "));
            }
            for &(x, y) in &pts {
                marker(&mut svg, s.marker, x, y, color);
            }
            let ly = MARGIN_TOP + 10.0 + 18.0 * i as f64;
            let lx = WIDTH - MARGIN_RIGHT + 14.0;
            marker(&mut svg, s.marker, lx, ly, color);
            let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, lx + 10.0, ly + 4.0, escape(&s.label));
        }
        svg.push_str("</svg>\n");
        svg
    }
}
