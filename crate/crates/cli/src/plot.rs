//! Self-contained SVG convergence plots with a log-scale energy-error axis.

use std::fmt::Write as _;

use crate::error::CliError;
use crate::output::CsvRow;

const W: f64 = 720.0;
const H: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const FLOOR: f64 = 1e-16;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];
const DASHES: [&str; 3] = ["", "6 3", "2 2"];

#[derive(Clone, Debug)]
pub struct Series {
    pub name: String,
    pub rows: Vec<CsvRow>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum XAxis {
    Iterations,
    Parameters,
}

impl XAxis {
    fn value(self, r: &CsvRow) -> f64 {
        match self {
            XAxis::Iterations => r.total_iter as f64,
            XAxis::Parameters => r.n_params as f64,
        }
    }

    fn label(self) -> &'static str {
        match self {
            XAxis::Iterations => "total iterations",
            XAxis::Parameters => "number of ansatz parameters",
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Maps `|energy_error|` onto the plot's vertical pixel coordinate.
pub struct LogScale {
    lo: f64,
    hi: f64,
}

impl LogScale {
    pub fn y(&self, err: f64) -> f64 {
        let v = err.abs().max(FLOOR).log10();
        TOP + (self.hi - v) / (self.hi - self.lo) * (H - TOP - BOTTOM)
    }
}

fn points(s: &Series, axis: XAxis) -> Vec<(f64, f64)> {
    s.rows.iter().filter_map(|r| r.energy_error.map(|e| (axis.value(r), e))).collect()
}

/// Renders one panel; `marker_x` draws a dashed vertical reference line.
pub fn render(series: &[Series], axis: XAxis, marker_x: Option<f64>, chem_acc: Option<f64>) -> Result<String, CliError> {
    if series.is_empty() || series.iter().all(|s| points(s, axis).is_empty()) {
        return Err(CliError::Validation("nothing to plot: traces are empty or lack energy errors".into()));
    }
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| points(s, axis)).collect();
    let (mut x_lo, mut x_hi) = all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    if let Some(m) = marker_x {
        x_lo = x_lo.min(m);
        x_hi = x_hi.max(m);
    }
    x_lo = x_lo.min(0.0);
    if x_hi <= x_lo {
        x_hi = x_lo + 1.0;
    }
    let logs: Vec<f64> = all.iter().map(|p| p.1.abs().max(FLOOR).log10()).chain(chem_acc.map(f64::log10)).collect();
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min).floor();
    let mut hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max).ceil();
    if hi <= lo {
        hi = lo + 1.0;
    }
    let scale = LogScale { lo, hi };
    let px = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * (W - LEFT - RIGHT);
    let (plot_l, plot_r, plot_t, plot_b) = (LEFT, W - RIGHT, TOP, H - BOTTOM);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{plot_l}" y="{plot_t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        plot_r - plot_l,
        plot_b - plot_t
    );
    for d in (lo as i32)..=(hi as i32) {
        let y = scale.y(10f64.powi(d));
        let _ = writeln!(
            svg,
            r##"<line x1="{plot_l}" y1="{y:.2}" x2="{plot_r}" y2="{y:.2}" stroke="#dddddd"/><text x="{}" y="{:.2}" text-anchor="end">1e{d}</text>"##,
            plot_l - 6.0,
            y + 4.0
        );
    }
    let ticks = 5;
    for t in 0..=ticks {
        let x = x_lo + (x_hi - x_lo) * t as f64 / ticks as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            px(x),
            plot_b + 18.0,
            format_tick(x)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
        (plot_l + plot_r) / 2.0,
        H - 15.0,
        axis.label()
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">|E - E_FCI| (Ha)</text>"#,
        (plot_t + plot_b) / 2.0,
        (plot_t + plot_b) / 2.0
    );
    if let Some(c) = chem_acc {
        let y = scale.y(c);
        let _ = writeln!(
            svg,
            r##"<line class="chem-acc" x1="{plot_l}" y1="{y:.2}" x2="{plot_r}" y2="{y:.2}" stroke="#888888" stroke-dasharray="2 3"/>"##
        );
    }
    if let Some(m) = marker_x {
        let x = px(m);
        let _ = writeln!(
            svg,
            r#"<line class="marker" x1="{x:.2}" y1="{plot_t}" x2="{x:.2}" y2="{plot_b}" stroke="black" stroke-dasharray="6 4"/>"#
        );
    }
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let dash = DASHES[(i / COLORS.len()) % DASHES.len()];
        let pts = points(s, axis);
        let _ = writeln!(svg, r#"<g class="series" data-name="{}">"#, escape(&s.name));
        if pts.len() > 1 {
            let path: Vec<String> = pts.iter().map(|(x, e)| format!("{:.2},{:.2}", px(*x), scale.y(*e))).collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" stroke-dasharray="{dash}" points="{}"/>"#,
                path.join(" ")
            );
        }
        for (x, e) in &pts {
            let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, px(*x), scale.y(*e));
        }
        let _ = writeln!(svg, "</g>");
        let ly = plot_t + 10.0 + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line class="legend" x1="{}" y1="{ly:.2}" x2="{}" y2="{ly:.2}" stroke="{color}" stroke-width="2" stroke-dasharray="{dash}"/><text x="{}" y="{:.2}">{}</text>"#,
            plot_r + 10.0,
            plot_r + 34.0,
            plot_r + 40.0,
            ly + 4.0,
            escape(&s.name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn format_tick(x: f64) -> String {
    if (x - x.round()).abs() < 1e-9 {
        format!("{}", x.round() as i64)
    } else {
        format!("{x:.1}")
    }
}
