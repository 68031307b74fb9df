//! Minimal SVG 1.1 plots on a fixed 800×800 canvas.

use std::fmt::Write;

pub const SIZE: f64 = 800.0;
const MARGIN: f64 = 70.0;

#[derive(Clone, Debug)]
enum Layer {
    Points {
        pts: Vec<(f64, f64)>,
        fill: String,
        radius: f64,
    },
    Shaded {
        pts: Vec<(f64, f64, f64)>,
        radius: f64,
    },
    Markers {
        pts: Vec<(f64, f64)>,
        stroke: String,
        glyph: Glyph,
    },
    Line {
        pts: Vec<(f64, f64)>,
        stroke: String,
        dashed: bool,
    },
    Circle {
        centre: (f64, f64),
        radius: f64,
        stroke: String,
        dashed: bool,
    },
}

#[derive(Clone, Copy, Debug)]
pub enum Glyph {
    Plus,
    Star,
}

#[derive(Clone, Debug)]
pub struct Plot {
    title: String,
    x_label: String,
    y_label: String,
    x_range: (f64, f64),
    y_range: (f64, f64),
    layers: Vec<Layer>,
    legend: Vec<(String, String)>,
}

impl Plot {
    pub fn new(title: &str, x_range: (f64, f64), y_range: (f64, f64)) -> Self {
        let fix = |(a, b): (f64, f64)| if b > a { (a, b) } else { (a - 0.5, a + 0.5) };
        Self {
            title: title.into(),
            x_label: String::new(),
            y_label: String::new(),
            x_range: fix(x_range),
            y_range: fix(y_range),
            layers: Vec::new(),
            legend: Vec::new(),
        }
    }

    /// Range covering `values` with 5% padding.
    pub fn range_of(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
        let (lo, hi) = values
            .into_iter()
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if !lo.is_finite() {
            return (0.0, 1.0);
        }
        let pad = 0.05 * (hi - lo).max(1e-12);
        (lo - pad, hi + pad)
    }

    pub fn labels(mut self, x: &str, y: &str) -> Self {
        self.x_label = x.into();
        self.y_label = y.into();
        self
    }

    pub fn points(&mut self, pts: Vec<(f64, f64)>, fill: &str, radius: f64) {
        self.layers.push(Layer::Points {
            pts,
            fill: fill.into(),
            radius,
        });
    }

    /// Points coloured by a value in `[-1, 1]`, blue to red.
    pub fn shaded(&mut self, pts: Vec<(f64, f64, f64)>, radius: f64) {
        self.layers.push(Layer::Shaded { pts, radius });
    }

    pub fn markers(&mut self, pts: Vec<(f64, f64)>, stroke: &str, glyph: Glyph) {
        self.layers.push(Layer::Markers {
            pts,
            stroke: stroke.into(),
            glyph,
        });
    }

    pub fn line(&mut self, pts: Vec<(f64, f64)>, stroke: &str, dashed: bool) {
        self.layers.push(Layer::Line {
            pts,
            stroke: stroke.into(),
            dashed,
        });
    }

    pub fn circle(&mut self, centre: (f64, f64), radius: f64, stroke: &str, dashed: bool) {
        self.layers.push(Layer::Circle {
            centre,
            radius,
            stroke: stroke.into(),
            dashed,
        });
    }

    pub fn legend(&mut self, label: &str, colour: &str) {
        self.legend.push((label.into(), colour.into()));
    }

    fn sx(&self, x: f64) -> f64 {
        MARGIN + (x - self.x_range.0) / (self.x_range.1 - self.x_range.0) * (SIZE - 2.0 * MARGIN)
    }

    fn sy(&self, y: f64) -> f64 {
        SIZE - MARGIN - (y - self.y_range.0) / (self.y_range.1 - self.y_range.0) * (SIZE - 2.0 * MARGIN)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">
<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>
<defs><clipPath id="frame"><rect x="{MARGIN}" y="{MARGIN}" width="{w}" height="{w}"/></clipPath></defs>"#,
            w = SIZE - 2.0 * MARGIN
        );
        self.axes(&mut s);
        s.push_str("<g clip-path=\"url(#frame)\">\n");
        for layer in &self.layers {
            self.layer(&mut s, layer);
        }
        s.push_str("</g>\n");
        for (i, (label, colour)) in self.legend.iter().enumerate() {
            let y = MARGIN + 18.0 + 20.0 * i as f64;
            let _ = writeln!(
                s,
                r#"<rect x="{x}" y="{y0:.1}" width="12" height="12" fill="{colour}"/><text x="{tx}" y="{ty:.1}" font-family="sans-serif" font-size="14">{}</text>"#,
                escape(label),
                x = SIZE - MARGIN - 200.0,
                y0 = y - 10.0,
                tx = SIZE - MARGIN - 182.0,
                ty = y,
            );
        }
        s.push_str("</svg>\n");
        s
    }

    fn axes(&self, s: &mut String) {
        let (l, r, t, b) = (MARGIN, SIZE - MARGIN, MARGIN, SIZE - MARGIN);
        let _ = writeln!(
            s,
            r#"<rect x="{l}" y="{t}" width="{w}" height="{w}" fill="none" stroke="black"/>"#,
            w = r - l
        );
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let xv = self.x_range.0 + f * (self.x_range.1 - self.x_range.0);
            let yv = self.y_range.0 + f * (self.y_range.1 - self.y_range.0);
            let (px, py) = (self.sx(xv), self.sy(yv));
            let _ = writeln!(
                s,
                r#"<line x1="{px:.2}" y1="{b}" x2="{px:.2}" y2="{b6}" stroke="black"/><text x="{px:.2}" y="{b20}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
                tick(xv),
                b6 = b + 6.0,
                b20 = b + 20.0
            );
            let _ = writeln!(
                s,
                r#"<line x1="{l6}" y1="{py:.2}" x2="{l}" y2="{py:.2}" stroke="black"/><text x="{l8}" y="{py4:.2}" font-family="sans-serif" font-size="12" text-anchor="end">{}</text>"#,
                tick(yv),
                l6 = l - 6.0,
                l8 = l - 8.0,
                py4 = py + 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{cx}" y="40" font-family="sans-serif" font-size="18" text-anchor="middle">{}</text>"#,
            escape(&self.title),
            cx = SIZE / 2.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{cx}" y="{y}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            escape(&self.x_label),
            cx = SIZE / 2.0,
            y = SIZE - 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="20" y="{cy}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 20 {cy})">{}</text>"#,
            escape(&self.y_label),
            cy = SIZE / 2.0
        );
    }

    fn layer(&self, s: &mut String, layer: &Layer) {
        match layer {
            Layer::Points { pts, fill, radius } => {
                for &(x, y) in pts {
                    let _ = writeln!(
                        s,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="{radius}" fill="{fill}"/>"#,
                        self.sx(x),
                        self.sy(y)
                    );
                }
            }
            Layer::Shaded { pts, radius } => {
                for &(x, y, v) in pts {
                    let t = ((v.clamp(-1.0, 1.0) + 1.0) / 2.0 * 255.0).round() as u8;
                    let _ = writeln!(
                        s,
                        r##"<circle cx="{:.2}" cy="{:.2}" r="{radius}" fill="#{t:02x}40{:02x}"/>"##,
                        self.sx(x),
                        self.sy(y),
                        255 - t
                    );
                }
            }
            Layer::Markers { pts, stroke, glyph } => {
                for &(x, y) in pts {
                    let (px, py) = (self.sx(x), self.sy(y));
                    match glyph {
                        Glyph::Plus => {
                            let _ = writeln!(
                                s,
                                r#"<path d="M{:.2} {py:.2}H{:.2}M{px:.2} {:.2}V{:.2}" stroke="{stroke}" stroke-width="1.5"/>"#,
                                px - 5.0,
                                px + 5.0,
                                py - 5.0,
                                py + 5.0
                            );
                        }
                        Glyph::Star => {
                            let _ = writeln!(
                                s,
                                r#"<path d="M{:.2} {py:.2}H{:.2}M{px:.2} {:.2}V{:.2}M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}" stroke="{stroke}" stroke-width="1.2"/>"#,
                                px - 5.0,
                                px + 5.0,
                                py - 5.0,
                                py + 5.0,
                                px - 3.5,
                                py - 3.5,
                                px + 3.5,
                                py + 3.5,
                                px - 3.5,
                                py + 3.5,
                                px + 3.5,
                                py - 3.5
                            );
                        }
                    }
                }
            }
            Layer::Line { pts, stroke, dashed } => {
                if pts.is_empty() {
                    return;
                }
                let path: Vec<String> = pts
                    .iter()
                    .map(|&(x, y)| format!("{:.2},{:.2}", self.sx(x), self.sy(y)))
                    .collect();
                let _ = writeln!(
                    s,
                    r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"{}/>"#,
                    path.join(" "),
                    dash(*dashed)
                );
            }
            Layer::Circle {
                centre,
                radius,
                stroke,
                dashed,
            } => {
                let rx = radius / (self.x_range.1 - self.x_range.0) * (SIZE - 2.0 * MARGIN);
                let ry = radius / (self.y_range.1 - self.y_range.0) * (SIZE - 2.0 * MARGIN);
                let _ = writeln!(
                    s,
                    r#"<ellipse cx="{:.2}" cy="{:.2}" rx="{rx:.2}" ry="{ry:.2}" fill="none" stroke="{stroke}"{}/>"#,
                    self.sx(centre.0),
                    self.sy(centre.1),
                    dash(*dashed)
                );
            }
        }
    }
}

fn dash(dashed: bool) -> &'static str {
    if dashed {
        r#" stroke-dasharray="6 4""#
    } else {
        ""
    }
}

fn tick(v: f64) -> String {
    let r = (v * 1000.0).round() / 1000.0;
    format!("{}", if r == 0.0 { 0.0 } else { r })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
