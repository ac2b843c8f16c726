//! Minimal line-chart renderer producing standalone SVG documents.
//!
//! Output depends only on the input data: coordinates are printed with a
//! fixed number of decimals and nothing is randomized or timestamped.

use std::fmt::Write;

use chrono::NaiveDate;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

pub struct Trace {
    pub label: String,
    pub points: Vec<(NaiveDate, f64)>,
}

pub struct LineChart {
    pub title: String,
    pub y_label: String,
    pub traces: Vec<Trace>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

impl LineChart {
    pub fn render(&self) -> String {
        let plot_w = WIDTH - LEFT - RIGHT;
        let plot_h = HEIGHT - TOP - BOTTOM;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(
            s,
            r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        // Axes.
        let _ = writeln!(
            s,
            r#"<line class="axis" x1="{LEFT}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#,
            y0 = TOP + plot_h,
            x1 = LEFT + plot_w
        );
        let _ = writeln!(
            s,
            r#"<line class="axis" x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{y0}" stroke="black"/>"#,
            y0 = TOP + plot_h
        );
        let _ = writeln!(
            s,
            r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
            TOP + plot_h / 2.0,
            TOP + plot_h / 2.0,
            escape(&self.y_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">date</text>"#,
            LEFT + plot_w / 2.0,
            HEIGHT - 12.0
        );

        let all: Vec<&(NaiveDate, f64)> = self
            .traces
            .iter()
            .flat_map(|t| t.points.iter())
            .filter(|p| p.1.is_finite())
            .collect();
        if all.is_empty() {
            let _ = writeln!(
                s,
                r#"<text class="no-data" x="{}" y="{}" text-anchor="middle" font-size="18" fill="gray">no data</text>"#,
                LEFT + plot_w / 2.0,
                TOP + plot_h / 2.0
            );
            s.push_str("</svg>\n");
            return s;
        }

        let d_min = all.iter().map(|p| p.0).min().expect("non-empty");
        let d_max = all.iter().map(|p| p.0).max().expect("non-empty");
        let mut y_min = all
            .iter()
            .map(|p| p.1)
            .fold(f64::INFINITY, f64::min)
            .min(0.0);
        let mut y_max = all.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        if y_max <= y_min {
            y_max = y_min + 1.0;
        }
        if y_min == y_max {
            y_min -= 1.0;
        }
        let span_days = (d_max - d_min).num_days().max(1) as f64;
        let x_of = |d: NaiveDate| LEFT + plot_w * ((d - d_min).num_days() as f64 / span_days);
        let y_of = |v: f64| TOP + plot_h * (1.0 - (v - y_min) / (y_max - y_min));

        for k in 0..=4 {
            let v = y_min + (y_max - y_min) * k as f64 / 4.0;
            let y = y_of(v);
            let _ = writeln!(
                s,
                r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
                LEFT,
                LEFT + plot_w
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                y + 4.0,
                tick_label(v)
            );
        }
        let mut ticks = vec![d_min, d_max];
        if span_days >= 2.0 {
            ticks.insert(1, d_min + chrono::Days::new((span_days / 2.0) as u64));
        }
        ticks.dedup();
        for d in ticks {
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                x_of(d),
                TOP + plot_h + 18.0,
                d.format("%Y-%m-%d")
            );
        }

        for (i, trace) in self.traces.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<String> = trace
                .points
                .iter()
                .filter(|p| p.1.is_finite())
                .map(|&(d, v)| format!("{:.2},{:.2}", x_of(d), y_of(v)))
                .collect();
            if pts.is_empty() {
                continue;
            }
            let _ = writeln!(
                s,
                r#"<polyline class="series" data-label="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                escape(&trace.label),
                pts.join(" ")
            );
            if pts.len() == 1 {
                let (x, y) = pts[0].split_once(',').expect("formatted as x,y");
                let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>"#);
            }
            let ly = TOP + 14.0 * i as f64;
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" fill="{color}">{}</text>"#,
                LEFT + 10.0,
                ly + 4.0,
                escape(&trace.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn tick_label(v: f64) -> String {
    if v.abs() >= 100.0 || v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}
