//! Minimal SVG canvas with linear axes.

use std::fmt::Write;

pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
    "#17becf", "#393b79", "#637939",
];

pub fn colour(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Roughly five round tick values covering `[lo, hi]`.
pub fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

pub struct Canvas {
    width: f64,
    height: f64,
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
    x: (f64, f64),
    y: (f64, f64),
    body: String,
}

impl Canvas {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let pad = |(lo, hi): (f64, f64)| {
            if hi > lo {
                (lo, hi)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        Self {
            width: 720.0,
            height: 440.0,
            left: 70.0,
            right: 150.0,
            top: 40.0,
            bottom: 55.0,
            x: pad(x),
            y: pad(y),
            body: String::new(),
        }
    }

    pub fn px(&self, x: f64) -> f64 {
        let w = self.width - self.left - self.right;
        self.left + (x - self.x.0) / (self.x.1 - self.x.0) * w
    }

    pub fn py(&self, y: f64) -> f64 {
        let h = self.height - self.top - self.bottom;
        self.top + (self.y.1 - y) / (self.y.1 - self.y.0) * h
    }

    pub fn title(&mut self, text: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{:.1}" y="22" font-size="15" text-anchor="middle">{}</text>"#,
            self.width / 2.0,
            escape(text)
        );
    }

    /// Tick marks and labels; `x_ticks = None` leaves the x axis unlabelled.
    pub fn axes(&mut self, x_label: &str, y_label: &str, x_ticks: Option<Vec<f64>>) {
        let (x0, x1) = (self.left, self.width - self.right);
        let (y0, y1) = (self.height - self.bottom, self.top);
        let _ = writeln!(
            self.body,
            r##"<rect x="{x0:.1}" y="{y1:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#333"/>"##,
            x1 - x0,
            y0 - y1
        );
        for t in ticks(self.y.0, self.y.1) {
            let py = self.py(t);
            let _ = writeln!(
                self.body,
                r##"<line x1="{:.1}" y1="{py:.1}" x2="{x0:.1}" y2="{py:.1}" stroke="#333"/><text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{}</text>"##,
                x0 - 5.0,
                x0 - 8.0,
                py + 4.0,
                tick_label(t)
            );
        }
        for t in x_ticks.unwrap_or_else(|| ticks(self.x.0, self.x.1)) {
            let px = self.px(t);
            let _ = writeln!(
                self.body,
                r##"<line x1="{px:.1}" y1="{y0:.1}" x2="{px:.1}" y2="{:.1}" stroke="#333"/><text x="{px:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"##,
                y0 + 5.0,
                y0 + 18.0,
                tick_label(t)
            );
        }
        let _ = writeln!(
            self.body,
            r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            self.height - 12.0,
            escape(x_label)
        );
        let _ = writeln!(
            self.body,
            r#"<text x="18" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape(y_label)
        );
    }

    pub fn hline(&mut self, y: f64, dashed: bool) {
        let py = self.py(y);
        let dash = if dashed { r#" stroke-dasharray="4 3""# } else { "" };
        let _ = writeln!(
            self.body,
            r##"<line x1="{:.1}" y1="{py:.1}" x2="{:.1}" y2="{py:.1}" stroke="#999"{dash}/>"##,
            self.left,
            self.width - self.right
        );
    }

    pub fn vline(&mut self, x: f64, dashed: bool) {
        let px = self.px(x);
        let dash = if dashed { r#" stroke-dasharray="4 3""# } else { "" };
        let _ = writeln!(
            self.body,
            r##"<line x1="{px:.1}" y1="{:.1}" x2="{px:.1}" y2="{:.1}" stroke="#999"{dash}/>"##,
            self.top,
            self.height - self.bottom
        );
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], colour: &str, opacity: f64) {
        let mut d = String::new();
        for (x, y) in pts {
            let _ = write!(d, "{:.2},{:.2} ", self.px(*x), self.py(*y));
        }
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1" stroke-opacity="{opacity}"/>"#,
            d.trim_end()
        );
    }

    pub fn circle(&mut self, x: f64, y: f64, r: f64, colour: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{colour}" fill-opacity="0.7"/>"#,
            self.px(x),
            self.py(y)
        );
    }

    pub fn segment(&mut self, a: (f64, f64), b: (f64, f64), colour: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{colour}" stroke-width="{width}"/>"#,
            self.px(a.0),
            self.py(a.1),
            self.px(b.0),
            self.py(b.1)
        );
    }

    /// Data-space rectangle between two corners.
    pub fn rect(&mut self, a: (f64, f64), b: (f64, f64), fill: &str) {
        let (x0, x1) = (self.px(a.0).min(self.px(b.0)), self.px(a.0).max(self.px(b.0)));
        let (y0, y1) = (self.py(a.1).min(self.py(b.1)), self.py(a.1).max(self.py(b.1)));
        let _ = writeln!(
            self.body,
            r##"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="{fill}" fill-opacity="0.35" stroke="#333"/>"##,
            x1 - x0,
            y1 - y0
        );
    }

    pub fn text(&mut self, x: f64, y: f64, text: &str, size: f64, anchor: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{:.2}" y="{:.2}" font-size="{size}" text-anchor="{anchor}">{}</text>"#,
            self.px(x),
            self.py(y),
            escape(text)
        );
    }

    /// Rotated label under the x axis at data position `x`.
    pub fn x_category(&mut self, x: f64, text: &str) {
        let px = self.px(x);
        let py = self.height - self.bottom + 14.0;
        let _ = writeln!(
            self.body,
            r#"<text x="{px:.1}" y="{py:.1}" font-size="10" text-anchor="end" transform="rotate(-35 {px:.1} {py:.1})">{}</text>"#,
            escape(text)
        );
    }

    pub fn legend(&mut self, entries: &[(String, &str)]) {
        let x = self.width - self.right + 12.0;
        for (i, (label, colour)) in entries.iter().enumerate() {
            let y = self.top + 8.0 + 16.0 * i as f64;
            let _ = writeln!(
                self.body,
                r#"<rect x="{x:.1}" y="{:.1}" width="10" height="10" fill="{colour}"/><text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
                y - 8.0,
                x + 15.0,
                y + 1.0,
                escape(label)
            );
        }
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}
