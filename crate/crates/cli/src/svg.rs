//! Minimal static line charts.

use std::fmt::Write;

use crate::error::CliError;
use crate::table::Table;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 450.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];
const TICKS: usize = 5;

#[derive(Debug, Clone)]
pub struct Chart {
    pub title: String,
    pub x: String,
    pub series: Vec<String>,
    pub log_x: bool,
    pub log_y: bool,
}

impl Chart {
    pub fn new(title: impl Into<String>, x: &str, series: &[&str]) -> Self {
        Chart {
            title: title.into(),
            x: x.to_string(),
            series: series.iter().map(|s| s.to_string()).collect(),
            log_x: false,
            log_y: false,
        }
    }

    pub fn log_log(mut self) -> Self {
        self.log_x = true;
        self.log_y = true;
        self
    }

    pub fn render(&self, table: &Table) -> Result<String, CliError> {
        let column = |name: &str| {
            table
                .column(name)
                .ok_or_else(|| CliError::Usage(format!("no column {name:?} to plot")))
        };
        let warp = |v: f64, log: bool| if log { v.log10() } else { v };
        let xs: Vec<f64> = column(&self.x)?
            .into_iter()
            .map(|v| warp(v, self.log_x))
            .collect();
        let mut lines = Vec::new();
        for name in &self.series {
            let ys: Vec<f64> = column(name)?
                .into_iter()
                .map(|v| warp(v, self.log_y))
                .collect();
            lines.push((name.as_str(), ys));
        }

        let (x_lo, x_hi) = bounds(xs.iter().copied());
        let (y_lo, y_hi) = bounds(lines.iter().flat_map(|(_, ys)| ys.iter().copied()));
        let plot_w = WIDTH - LEFT - RIGHT;
        let plot_h = HEIGHT - TOP - BOTTOM;
        let px = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
        let py = |y: f64| TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + plot_w / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
        );
        for i in 0..=TICKS {
            let f = i as f64 / TICKS as f64;
            let xv = x_lo + f * (x_hi - x_lo);
            let yv = y_lo + f * (y_hi - y_lo);
            let (tx, ty) = (px(xv), py(yv));
            let _ = writeln!(
                s,
                r#"<line x1="{tx:.2}" y1="{:.2}" x2="{tx:.2}" y2="{:.2}" stroke="black"/><text x="{tx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                TOP + plot_h,
                TOP + plot_h + 5.0,
                TOP + plot_h + 20.0,
                tick_label(xv, self.log_x)
            );
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{ty:.2}" x2="{LEFT}" y2="{ty:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 5.0,
                LEFT - 8.0,
                ty + 4.0,
                tick_label(yv, self.log_y)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            LEFT + plot_w / 2.0,
            HEIGHT - 15.0,
            escape(&axis_label(&self.x, self.log_x))
        );
        let y_name = if lines.len() == 1 {
            lines[0].0
        } else {
            "value"
        };
        let _ = writeln!(
            s,
            r#"<text transform="translate(18 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
            TOP + plot_h / 2.0,
            escape(&axis_label(y_name, self.log_y))
        );

        for (i, (name, ys)) in lines.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let points: Vec<String> = xs
                .iter()
                .zip(ys)
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                points.join(" ")
            );
            let ly = TOP + 15.0 + 18.0 * i as f64;
            let lx = LEFT + plot_w + 12.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
                lx + 20.0,
                lx + 26.0,
                ly + 4.0,
                escape(name)
            );
        }
        s.push_str("</svg>\n");
        Ok(s)
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
        let pad = 0.5 * lo.abs().max(1.0);
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

fn tick_label(v: f64, log: bool) -> String {
    let v = if log { 10f64.powf(v) } else { v };
    if v == 0.0 {
        "0".into()
    } else if (1e-3..1e4).contains(&v.abs()) {
        format!("{}", (v * 1e4).round() / 1e4)
    } else {
        format!("{v:.2e}")
    }
}

fn axis_label(name: &str, log: bool) -> String {
    if log {
        format!("{name} (log scale)")
    } else {
        name.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Table {
        let mut t = Table::new(["t", "x", "x_closed"]);
        for i in 0..10 {
            let t0 = i as f64 + 1.0;
            t.push(vec![t0.into(), (t0 * t0).into(), (2.0 * t0).into()]);
        }
        t
    }

    #[test]
    fn renders_one_polyline_per_series() {
        let svg = Chart::new("demo <1>", "t", &["x", "x_closed"])
            .render(&table())
            .unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("demo &lt;1&gt;"));
    }

    #[test]
    fn log_axes_and_missing_columns() {
        let svg = Chart::new("", "t", &["x"])
            .log_log()
            .render(&table())
            .unwrap();
        assert!(svg.contains("log scale"));
        assert!(Chart::new("", "t", &["nope"]).render(&table()).is_err());
    }

    #[test]
    fn flat_series_gets_padded_range() {
        assert_eq!(bounds([2.0, 2.0].into_iter()), (1.0, 3.0));
        assert_eq!(bounds(std::iter::empty()), (0.0, 1.0));
    }
}
