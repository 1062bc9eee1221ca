use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const MAX_POINTS: usize = 2000;
const PALETTE: [&str; 9] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
    "#7f7f7f",
];

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    /// Non-finite values (and non-positive ones on a log axis) break the line.
    pub points: Vec<(f64, f64)>,
}

/// Static multi-series line chart.
#[derive(Debug, Clone)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub series: Vec<Series>,
}

impl LineChart {
    pub fn new(
        title: impl Into<String>,
        x_label: impl Into<String>,
        y_label: impl Into<String>,
    ) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_y: false,
            series: Vec::new(),
        }
    }

    pub fn log_y(mut self, on: bool) -> Self {
        self.log_y = on;
        self
    }

    pub fn add(&mut self, name: impl Into<String>, points: Vec<(f64, f64)>) {
        self.series.push(Series {
            name: name.into(),
            points,
        });
    }

    fn y_of(&self, y: f64) -> Option<f64> {
        match (self.log_y, y.is_finite()) {
            (true, true) if y > 0.0 => Some(y.log10()),
            (false, true) => Some(y),
            _ => None,
        }
    }

    pub fn render(&self) -> String {
        let visible = self.series.iter().flat_map(|s| {
            s.points
                .iter()
                .filter_map(|&(x, y)| Some((x, self.y_of(y)?)).filter(|p| p.0.is_finite()))
        });
        let (mut x0, mut x1, mut y0, mut y1) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for (x, y) in visible {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 <= x0 {
            x1 = x0 + 1.0;
        }
        if y1 <= y0 {
            let pad = if y0 == 0.0 { 1.0 } else { 0.1 * y0.abs() };
            (y0, y1) = (y0 - pad, y1 + pad);
        }
        let (yt, y0, y1) = if self.log_y {
            let (lo, hi) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
            let ticks: Vec<f64> = (lo as i64..=hi as i64).map(|e| e as f64).collect();
            (ticks, lo, hi)
        } else {
            let step = nice_step(y1 - y0);
            let (lo, hi) = ((y0 / step).floor() * step, (y1 / step).ceil() * step);
            (ticks(lo, hi, step), lo, hi)
        };
        let xt = ticks(x0, x1, nice_step(x1 - x0));

        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + pw / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for &t in &xt {
            let x = sx(t);
            let _ = writeln!(
                out,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                TOP + ph,
                TOP + ph + 5.0,
                TOP + ph + 20.0,
                tick_label(t)
            );
        }
        for &t in &yt {
            let y = sy(t);
            let label = if self.log_y {
                format!("1e{}", t as i64)
            } else {
                tick_label(t)
            };
            let _ = writeln!(
                out,
                r##"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"##,
                LEFT - 5.0,
                LEFT + pw,
                LEFT - 8.0,
                y + 4.0,
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );

        for (k, s) in self.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let stride = s.points.len().div_ceil(MAX_POINTS).max(1);
            let mut segment: Vec<String> = Vec::new();
            let flush = |seg: &mut Vec<String>, out: &mut String| {
                if seg.len() > 1 {
                    let _ = writeln!(
                        out,
                        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                        seg.join(" ")
                    );
                }
                seg.clear();
            };
            let last = s.points.len().saturating_sub(1);
            for (i, &(x, y)) in s.points.iter().enumerate() {
                if i % stride != 0 && i != last {
                    continue;
                }
                match self.y_of(y).filter(|_| x.is_finite()) {
                    Some(v) => segment.push(format!("{:.2},{:.2}", sx(x), sy(v))),
                    None => flush(&mut segment, &mut out),
                }
            }
            flush(&mut segment, &mut out);
            let ly = TOP + 10.0 + 18.0 * k as f64;
            let lx = LEFT + pw + 12.0;
            let _ = writeln!(
                out,
                r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
                lx + 20.0,
                lx + 25.0,
                ly + 4.0,
                escape(&s.name)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn nice_step(range: f64) -> f64 {
    let raw = range / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let first = (lo / step - 1e-9).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e5).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{:.4}", v);
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".into()
        } else {
            s.to_string()
        }
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

    #[test]
    fn renders_series_and_legend() {
        let mut c = LineChart::new("pulse <N_c>", "s", "N_c");
        c.add(
            "a",
            (0..100)
                .map(|i| (i as f64, (i as f64 / 10.0).sin()))
                .collect(),
        );
        c.add(
            "b",
            vec![(0.0, 1.0), (1.0, f64::NAN), (2.0, 3.0), (3.0, 4.0)],
        );
        let svg = c.render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("pulse &lt;N_c&gt;"));
        // series b has a gap, so only its second segment is drawn
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg, c.render());
    }

    #[test]
    fn log_axis_uses_decades() {
        let mut c = LineChart::new("growth", "T", "rate").log_y(true);
        c.add("r", vec![(0.0, 1e-3), (1.0, 0.5), (2.0, -1.0), (3.0, 2.0)]);
        let svg = c.render();
        assert!(svg.contains(">1e-3<") && svg.contains(">1e1<"));
    }

    #[test]
    fn tick_steps() {
        assert_eq!(nice_step(10.0), 2.0);
        assert_eq!(nice_step(0.3), 0.05);
        assert_eq!(ticks(0.0, 1.0, 0.25), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(tick_label(0.25), "0.25");
        assert_eq!(tick_label(2.0e6), "2.0e6");
    }
}
