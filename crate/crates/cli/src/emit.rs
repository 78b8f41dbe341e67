//! File formats: curve, Schwarz and quadrature JSON, moment CSV, SVG
//! overlays and grid CSV.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use hsflow_core::cauchy::LaurentTail;
use hsflow_core::quadrature::QuadratureData;
use hsflow_core::{Complex, MarkerCurve, MomentSeries, ScalarGrid, SchwarzData};
use serde::{Deserialize, Serialize};

fn pair(z: &Complex) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(p: &[f64; 2]) -> Complex {
    Complex::new(p[0], p[1])
}

fn invalid(e: impl ToString) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, e.to_string())
}

/// `{"markers": [[x, y], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveJson {
    pub markers: Vec<[f64; 2]>,
}

impl CurveJson {
    pub fn from_curve(curve: &MarkerCurve) -> Self {
        Self { markers: curve.markers().iter().map(pair).collect() }
    }

    pub fn to_curve(&self) -> hsflow_core::Result<MarkerCurve> {
        MarkerCurve::new(self.markers.iter().map(complex).collect())
    }
}

pub fn read_curve(path: &Path) -> io::Result<MarkerCurve> {
    let text = std::fs::read_to_string(path)?;
    let json: CurveJson = serde_json::from_str(&text).map_err(invalid)?;
    json.to_curve().map_err(invalid)
}

/// One boundary frame; `markers` is empty while the domain is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameJson {
    pub t: f64,
    pub markers: Vec<[f64; 2]>,
}

impl FrameJson {
    pub fn new(t: f64, curve: Option<&MarkerCurve>) -> Self {
        Self { t, markers: curve.map_or_else(Vec::new, |c| c.markers().iter().map(pair).collect()) }
    }
}

/// `{"a": [re, im], "tail": [[re, im], ...], "curve": [[x, y], ...], "g": [[re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchwarzJson {
    pub a: [f64; 2],
    /// `b_1, b_2, ...`
    pub tail: Vec<[f64; 2]>,
    pub curve: Vec<[f64; 2]>,
    pub g: Vec<[f64; 2]>,
}

impl SchwarzJson {
    pub fn from_data(sd: &SchwarzData) -> Self {
        Self {
            a: pair(&sd.a()),
            tail: sd.tail().coeffs().iter().map(pair).collect(),
            curve: sd.curve().markers().iter().map(pair).collect(),
            g: sd.boundary().values().iter().map(pair).collect(),
        }
    }

    pub fn to_data(&self) -> hsflow_core::Result<SchwarzData> {
        let curve = MarkerCurve::new(self.curve.iter().map(complex).collect())?;
        let tail = LaurentTail::new(self.tail.iter().map(complex).collect())?;
        SchwarzData::from_parts(curve, self.g.iter().map(complex).collect(), complex(&self.a), tail)
    }
}

/// `{"nodes": [[x, y], ...], "mult": [n_k, ...], "coeffs": [[[re, im], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureJson {
    pub nodes: Vec<[f64; 2]>,
    pub mult: Vec<usize>,
    pub coeffs: Vec<Vec<[f64; 2]>>,
}

impl QuadratureJson {
    pub fn from_data(qd: &QuadratureData) -> Self {
        Self {
            nodes: qd.nodes().iter().map(pair).collect(),
            mult: qd.multiplicities(),
            coeffs: qd.coeffs().iter().map(|c| c.iter().map(pair).collect()).collect(),
        }
    }

    pub fn to_data(&self) -> io::Result<QuadratureData> {
        if self.mult.len() != self.coeffs.len() || self.mult.iter().zip(&self.coeffs).any(|(m, c)| *m != c.len()) {
            return Err(invalid("`mult` does not match the coefficient lists"));
        }
        QuadratureData::new(
            self.nodes.iter().map(complex).collect(),
            self.coeffs.iter().map(|c| c.iter().map(complex).collect()).collect(),
        )
        .map_err(invalid)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

/// `t,k,re,im` rows.
pub fn moments_csv(series: &MomentSeries) -> String {
    let mut s = String::from("t,k,re,im\n");
    for (t, m) in series.times().iter().zip(series.values()) {
        for (k, v) in m.iter().enumerate() {
            let _ = writeln!(s, "{t},{k},{},{}", v.re, v.im);
        }
    }
    s
}

/// `x,y,<name>...` rows over the nodes of aligned grids.
pub fn grid_csv(names: &[&str], grids: &[&ScalarGrid]) -> String {
    let mut s = String::from("x,y");
    for n in names {
        s.push(',');
        s.push_str(n);
    }
    s.push('\n');
    let Some(first) = grids.first() else { return s };
    for j in 0..first.ny {
        for i in 0..first.nx {
            let z = first.node(i, j);
            let _ = write!(s, "{},{}", z.re, z.im);
            for g in grids {
                let _ = write!(s, ",{}", g.get(i, j));
            }
            s.push('\n');
        }
    }
    s
}

/// Overlay of boundary frames, early frames light and late frames dark.
pub fn svg_overlay(frames: &[(f64, Option<&MarkerCurve>)]) -> String {
    let mut lo = Complex::new(-0.1, -0.1);
    let mut hi = Complex::new(0.1, 0.1);
    for c in frames.iter().filter_map(|f| f.1) {
        let (a, b) = c.bounding_box();
        lo = Complex::new(lo.re.min(a.re), lo.im.min(a.im));
        hi = Complex::new(hi.re.max(b.re), hi.im.max(b.im));
    }
    let pad = 0.05 * (hi.re - lo.re).max(hi.im - lo.im);
    let (x0, y0) = (lo.re - pad, lo.im - pad);
    let (w, h) = (hi.re - lo.re + 2.0 * pad, hi.im - lo.im + 2.0 * pad);
    let size = 600.0;
    let scale = size / w.max(h);
    let px = |z: &Complex| ((z.re - x0) * scale, (y0 + h - z.im) * scale);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.3} {:.3}">"#,
        w * scale,
        h * scale,
        w * scale,
        h * scale
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (ox, oy) = px(&Complex::new(0.0, 0.0));
    let _ = writeln!(
        s,
        r##"<path d="M {:.3} {:.3} h 8 h -16 h 8 v 8 v -16" stroke="#c00" stroke-width="1" fill="none"/>"##,
        ox, oy
    );
    let n = frames.len().max(2) - 1;
    for (idx, (t, curve)) in frames.iter().enumerate() {
        let Some(c) = curve else { continue };
        let shade = 200 - (170 * idx / n) as u32;
        let mut d = String::new();
        for (k, z) in c.markers().iter().enumerate() {
            let (x, y) = px(z);
            let _ = write!(d, "{}{:.3} {:.3} ", if k == 0 { "M " } else { "L " }, x, y);
        }
        d.push('Z');
        let _ = writeln!(
            s,
            r#"<path d="{d}" stroke="rgb({shade},{shade},255)" stroke-width="1.2" fill="none"><title>t = {t}</title></path>"#
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_json_round_trip() {
        let c = MarkerCurve::circle(Complex::new(0.1, 0.0), 0.5, 32).unwrap();
        let text = to_json(&CurveJson::from_curve(&c));
        let back: CurveJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_curve().unwrap(), c);
    }

    #[test]
    fn moments_csv_layout() {
        let mut s = MomentSeries::new();
        s.push(0.5, vec![Complex::new(1.0, 0.0), Complex::new(0.25, -0.5)]).unwrap();
        assert_eq!(moments_csv(&s), "t,k,re,im\n0.5,0,1,0\n0.5,1,0.25,-0.5\n");
    }

    #[test]
    fn quadrature_json_checks_multiplicities() {
        let q = QuadratureJson { nodes: vec![[0.0, 0.0]], mult: vec![2], coeffs: vec![vec![[1.0, 0.0]]] };
        assert!(q.to_data().is_err());
    }

    #[test]
    fn svg_has_one_path_per_frame() {
        let c = MarkerCurve::circle(Complex::new(0.0, 0.0), 0.5, 32).unwrap();
        let svg = svg_overlay(&[(0.0, None), (0.1, Some(&c)), (0.2, Some(&c))]);
        assert_eq!(svg.matches("<title>").count(), 2);
        assert!(svg.starts_with("<svg"));
    }
}
