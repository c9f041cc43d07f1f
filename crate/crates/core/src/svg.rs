//! Just enough SVG for line charts and heatmaps. Coordinates print with two
//! decimals so output is byte-stable.

use std::fmt::Write as _;

pub(crate) struct Svg {
    buf: String,
}

/// Two decimals, trailing zeros trimmed, no negative zero.
pub(crate) fn num(v: f64) -> String {
    let mut s = format!("{:.2}", v);
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

#[derive(Clone, Copy)]
pub(crate) enum Anchor {
    Start,
    Middle,
    End,
}

impl Anchor {
    fn as_str(self) -> &'static str {
        match self {
            Anchor::Start => "start",
            Anchor::Middle => "middle",
            Anchor::End => "end",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Marker {
    Circle,
    Square,
    Triangle,
    Diamond,
    Cross,
}

pub(crate) const MARKERS: [Marker; 5] = [
    Marker::Circle,
    Marker::Square,
    Marker::Triangle,
    Marker::Diamond,
    Marker::Cross,
];

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        let mut buf = String::new();
        let _ = writeln!(
            buf,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"#,
            w = num(width),
            h = num(height)
        );
        let mut svg = Self { buf };
        svg.rect(0.0, 0.0, width, height, "#ffffff", None);
        svg
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, stroke: Option<&str>) {
        let _ = write!(
            self.buf,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{fill}""#,
            num(x),
            num(y),
            num(w),
            num(h)
        );
        if let Some(s) = stroke {
            let _ = write!(self.buf, r#" stroke="{s}" stroke-width="1""#);
        }
        self.buf.push_str("/>\n");
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.buf,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{stroke}" stroke-width="{}"/>"#,
            num(x1),
            num(y1),
            num(x2),
            num(y2),
            num(width)
        );
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str, width: f64, dash: Option<&str>) {
        let pts: Vec<String> = points.iter().map(|&(x, y)| format!("{},{}", num(x), num(y))).collect();
        let _ = write!(
            self.buf,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{}""#,
            pts.join(" "),
            num(width)
        );
        if let Some(d) = dash {
            let _ = write!(self.buf, r#" stroke-dasharray="{d}""#);
        }
        self.buf.push_str("/>\n");
    }

    pub fn text(&mut self, x: f64, y: f64, s: &str, size: f64, anchor: Anchor) {
        let _ = writeln!(
            self.buf,
            r#"<text x="{}" y="{}" font-size="{}" text-anchor="{}">{}</text>"#,
            num(x),
            num(y),
            num(size),
            anchor.as_str(),
            escape(s)
        );
    }

    /// Text rotated by `angle` degrees about its anchor point.
    pub fn text_rotated(&mut self, x: f64, y: f64, s: &str, size: f64, anchor: Anchor, angle: f64) {
        let _ = writeln!(
            self.buf,
            r#"<text x="{x}" y="{y}" font-size="{}" text-anchor="{}" transform="rotate({} {x} {y})">{}</text>"#,
            num(size),
            anchor.as_str(),
            num(angle),
            escape(s),
            x = num(x),
            y = num(y)
        );
    }

    pub fn marker(&mut self, shape: Marker, x: f64, y: f64, r: f64, color: &str) {
        match shape {
            Marker::Circle => {
                let _ = writeln!(
                    self.buf,
                    r#"<circle cx="{}" cy="{}" r="{}" fill="{color}"/>"#,
                    num(x),
                    num(y),
                    num(r)
                );
            }
            Marker::Square => self.rect(x - r, y - r, 2.0 * r, 2.0 * r, color, None),
            Marker::Triangle => self.polygon(&[(x, y - r), (x + r, y + r), (x - r, y + r)], color),
            Marker::Diamond => self.polygon(&[(x, y - r), (x + r, y), (x, y + r), (x - r, y)], color),
            Marker::Cross => {
                self.line(x - r, y - r, x + r, y + r, color, 1.5);
                self.line(x - r, y + r, x + r, y - r, color, 1.5);
            }
        }
    }

    fn polygon(&mut self, points: &[(f64, f64)], fill: &str) {
        let pts: Vec<String> = points.iter().map(|&(x, y)| format!("{},{}", num(x), num(y))).collect();
        let _ = writeln!(self.buf, r#"<polygon points="{}" fill="{fill}"/>"#, pts.join(" "));
    }

    pub fn finish(mut self) -> String {
        self.buf.push_str("</svg>\n");
        self.buf
    }
}

/// Round tick positions covering `[0, max]`, about `target` of them.
pub(crate) fn ticks(max: f64, target: usize) -> Vec<f64> {
    if !(max > 0.0) {
        return vec![0.0];
    }
    let raw = max / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|f| f * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag);
    let count = (max / step + 1e-9).floor() as usize;
    (0..=count).map(|i| i as f64 * step).collect()
}

/// Tick label with at most the precision the step needs.
pub(crate) fn tick_label(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{}", v as i64)
    } else {
        num(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(1.0), "1");
        assert_eq!(num(1.25), "1.25");
        assert_eq!(num(2.5), "2.5");
        assert_eq!(num(-0.001), "0");
        assert_eq!(num(1.005_1), "1.01");
    }

    #[test]
    fn escaping() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }

    #[test]
    fn tick_steps() {
        assert_eq!(ticks(10.0, 5), [0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        assert_eq!(ticks(125.0, 5), [0.0, 25.0, 50.0, 75.0, 100.0, 125.0]);
        assert_eq!(ticks(0.0, 5), [0.0]);
    }
}
