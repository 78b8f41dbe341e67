//! Closed marker curves: the discrete representation of `∂Ω`.

use core::f64::consts::PI;

use crate::prelude::*;
use crate::rules::GaussLegendre;
use crate::{Complex, Error, Result};

/// Minimum number of markers in a [`MarkerCurve`].
pub const MIN_MARKERS: usize = 16;

const SIMPLICITY_TOL: f64 = 1e-12;
const BOUNDARY_TOL: f64 = 1e-12;

/// Closed, simple, positively oriented curve sampled at markers that are
/// equispaced in a fixed parameter `θ ∈ [0, 2π)`.
///
/// Parameter derivatives are computed spectrally once at construction; they
/// drive contour integrals, tangents, normals and curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkerCurve {
    markers: Vec<Complex>,
    dz: Vec<Complex>,
    d2z: Vec<Complex>,
}

impl MarkerCurve {
    /// Validates the markers (count, finiteness, orientation, simplicity).
    pub fn new(markers: Vec<Complex>) -> Result<Self> {
        if markers.len() < MIN_MARKERS {
            return Err(Error::TooFewMarkers { min: MIN_MARKERS, got: markers.len() });
        }
        if markers.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { what: "curve markers" });
        }
        let area = polygon_signed_area(&markers);
        if area.is_nan() || area <= 0.0 {
            return Err(Error::NotPositivelyOriented { area });
        }
        check_simple(&markers)?;
        let dz = spectral_derivative(&markers);
        let d2z = spectral_derivative(&dz);
        Ok(Self { markers, dz, d2z })
    }

    /// Samples `f(θ)` at `n` equispaced parameter values.
    pub fn from_fn<F: Fn(f64) -> Complex>(n: usize, f: F) -> Result<Self> {
        let markers = (0..n).map(|j| f(2.0 * PI * j as f64 / n as f64)).collect();
        Self::new(markers)
    }

    pub fn circle(center: Complex, r: f64, n: usize) -> Result<Self> {
        Self::ellipse(center, r, r, n)
    }

    /// Axis-aligned ellipse with semi-axes `a` (along x) and `b` (along y).
    pub fn ellipse(center: Complex, a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidParameter("ellipse semi-axes must be positive"));
        }
        Self::from_fn(n, |t| center + Complex::new(a * t.cos(), b * t.sin()))
    }

    pub fn len(&self) -> usize {
        self.markers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.markers.is_empty()
    }

    pub fn markers(&self) -> &[Complex] {
        &self.markers
    }

    pub fn into_markers(self) -> Vec<Complex> {
        self.markers
    }

    /// `dz/dθ` at each marker.
    pub fn derivative(&self) -> &[Complex] {
        &self.dz
    }

    /// Parameter step `2π/N`.
    pub fn dtheta(&self) -> f64 {
        2.0 * PI / self.len() as f64
    }

    pub fn unit_tangent(&self, j: usize) -> Complex {
        let d = self.dz[j];
        d / d.norm()
    }

    pub fn outward_normal(&self, j: usize) -> Complex {
        self.unit_tangent(j) * Complex::new(0.0, -1.0)
    }

    /// Signed curvature (positive for a counterclockwise circle).
    pub fn curvature(&self, j: usize) -> f64 {
        let d = self.dz[j];
        (d.conj() * self.d2z[j]).im / d.norm().powi(3)
    }

    /// Arclength quadrature weights `|dz/dθ|·2π/N`.
    pub fn arclength_weights(&self) -> Vec<f64> {
        let dt = self.dtheta();
        self.dz.iter().map(|d| d.norm() * dt).collect()
    }

    /// Length of the marker polygon.
    pub fn perimeter(&self) -> f64 {
        segments(&self.markers).map(|(a, b)| (b - a).norm()).sum()
    }

    /// Mean marker spacing.
    pub fn spacing(&self) -> f64 {
        self.perimeter() / self.len() as f64
    }

    /// Ratio of the longest to the shortest polygon edge.
    pub fn spacing_ratio(&self) -> f64 {
        let (lo, hi) = segments(&self.markers)
            .map(|(a, b)| (b - a).norm())
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), l| (lo.min(l), hi.max(l)));
        hi / lo
    }

    /// Enclosed area `(1/2i)∮ z̄ dz` by the trapezoid rule in the curve
    /// parameter. Use [`polygon_signed_area`] for the shoelace area of the
    /// marker polygon itself.
    pub fn signed_area(&self) -> f64 {
        let s: f64 = self.markers.iter().zip(&self.dz).map(|(z, d)| (z.conj() * d).im).sum();
        0.5 * s * self.dtheta()
    }

    /// Largest marker modulus `max |z_j|`.
    pub fn circumradius(&self) -> f64 {
        self.markers.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest distance between two markers.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for (i, a) in self.markers.iter().enumerate() {
            for b in &self.markers[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// Axis-aligned bounding box `(min corner, max corner)`.
    pub fn bounding_box(&self) -> (Complex, Complex) {
        bounding_box(&self.markers)
    }

    /// Periodic trapezoid approximation of `∮ g dz` from samples at markers.
    pub fn contour_integral(&self, samples: &[Complex]) -> Result<Complex> {
        if samples.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: samples.len() });
        }
        let sum: Complex = samples.iter().zip(&self.dz).map(|(g, d)| g * d).sum();
        Ok(sum * self.dtheta())
    }

    /// Same as [`contour_integral`](Self::contour_integral) for a closure.
    pub fn integrate<F: FnMut(Complex) -> Complex>(&self, mut g: F) -> Complex {
        let sum: Complex = self.markers.iter().zip(&self.dz).map(|(z, d)| g(*z) * d).sum();
        sum * self.dtheta()
    }

    /// Distance from `z` to the marker polygon.
    pub fn distance_to(&self, z: Complex) -> f64 {
        segments(&self.markers)
            .map(|(a, b)| point_segment_distance(z, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Winding number of the marker polygon around `z`.
    pub fn winding_number(&self, z: Complex) -> Result<i32> {
        let d = self.distance_to(z);
        if d <= BOUNDARY_TOL {
            return Err(Error::BoundaryAmbiguity { distance: d });
        }
        Ok(polygon_winding(&self.markers, z))
    }

    pub fn point_in_domain(&self, z: Complex) -> Result<bool> {
        Ok(self.winding_number(z)? == 1)
    }

    /// `n` markers equispaced in arclength along the periodic cubic spline
    /// through the current markers; the first marker is kept as start point.
    pub fn resample(&self, n: usize) -> Result<Self> {
        if n < MIN_MARKERS {
            return Err(Error::TooFewMarkers { min: MIN_MARKERS, got: n });
        }
        Self::new(resample_points(&self.markers, n)?)
    }

    pub fn translated(&self, c: Complex) -> Self {
        Self {
            markers: self.markers.iter().map(|z| z + c).collect(),
            dz: self.dz.clone(),
            d2z: self.d2z.clone(),
        }
    }

    /// Symmetric Hausdorff distance between the two marker polygons.
    pub fn hausdorff(&self, other: &Self) -> f64 {
        let one = |a: &Self, b: &Self| {
            a.markers.iter().map(|z| b.distance_to(*z)).fold(0.0, f64::max)
        };
        one(self, other).max(one(other, self))
    }
}

/// Shoelace signed area of a closed polygon given by its vertices.
pub fn polygon_signed_area(points: &[Complex]) -> f64 {
    0.5 * segments(points).map(|(a, b)| a.re * b.im - b.re * a.im).sum::<f64>()
}

/// Winding number of the closed polygon around `z` (crossing-number form).
pub fn polygon_winding(points: &[Complex], z: Complex) -> i32 {
    let mut w = 0;
    for (a, b) in segments(points) {
        let cross = (b.re - a.re) * (z.im - a.im) - (z.re - a.re) * (b.im - a.im);
        if a.im <= z.im {
            if b.im > z.im && cross > 0.0 {
                w += 1;
            }
        } else if b.im <= z.im && cross < 0.0 {
            w -= 1;
        }
    }
    w
}

pub fn point_segment_distance(z: Complex, a: Complex, b: Complex) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let s = (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + ab * s)).norm()
}

pub(crate) fn bounding_box(points: &[Complex]) -> (Complex, Complex) {
    let mut lo = Complex::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Complex::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for z in points {
        lo.re = lo.re.min(z.re);
        lo.im = lo.im.min(z.im);
        hi.re = hi.re.max(z.re);
        hi.im = hi.im.max(z.im);
    }
    (lo, hi)
}

fn segments(points: &[Complex]) -> impl Iterator<Item = (Complex, Complex)> + '_ {
    let n = points.len();
    (0..n).map(move |j| (points[j], points[(j + 1) % n]))
}

fn segment_distance(a: Complex, b: Complex, c: Complex, d: Complex) -> f64 {
    let orient = |p: Complex, q: Complex, r: Complex| {
        (q.re - p.re) * (r.im - p.im) - (q.im - p.im) * (r.re - p.re)
    };
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

fn check_simple(points: &[Complex]) -> Result<()> {
    let n = points.len();
    let boxes: Vec<(Complex, Complex)> = segments(points)
        .map(|(a, b)| {
            (
                Complex::new(a.re.min(b.re), a.im.min(b.im)),
                Complex::new(a.re.max(b.re), a.im.max(b.im)),
            )
        })
        .collect();
    for i in 0..n {
        let (lo_i, hi_i) = boxes[i];
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (lo_j, hi_j) = boxes[j];
            if lo_j.re > hi_i.re + SIMPLICITY_TOL
                || hi_j.re < lo_i.re - SIMPLICITY_TOL
                || lo_j.im > hi_i.im + SIMPLICITY_TOL
                || hi_j.im < lo_i.im - SIMPLICITY_TOL
            {
                continue;
            }
            let d = segment_distance(points[i], points[(i + 1) % n], points[j], points[(j + 1) % n]);
            if d < SIMPLICITY_TOL {
                return Err(Error::SelfIntersection { first: i, second: j });
            }
        }
    }
    Ok(())
}

/// Twiddle table `e^{-2πi m/n}` for `m = 0..n`.
fn twiddles(n: usize) -> Vec<Complex> {
    (0..n)
        .map(|m| Complex::from_polar(1.0, -2.0 * PI * m as f64 / n as f64))
        .collect()
}

/// Discrete Fourier coefficients `c_k = (1/n) Σ_j v_j e^{-2πi jk/n}`.
pub(crate) fn dft(values: &[Complex]) -> Vec<Complex> {
    let n = values.len();
    let w = twiddles(n);
    (0..n)
        .map(|k| {
            let s: Complex = values.iter().enumerate().map(|(j, v)| v * w[(j * k) % n]).sum();
            s / n as f64
        })
        .collect()
}

/// Signed frequency of DFT index `k`, with the Nyquist mode mapped to 0.
pub(crate) fn frequency(k: usize, n: usize) -> f64 {
    if 2 * k < n {
        k as f64
    } else if 2 * k == n {
        0.0
    } else {
        k as f64 - n as f64
    }
}

/// Derivative with respect to `θ = 2πj/n` of periodic samples.
pub fn spectral_derivative(values: &[Complex]) -> Vec<Complex> {
    let n = values.len();
    let c = dft(values);
    let w = twiddles(n);
    let dc: Vec<Complex> = c
        .iter()
        .enumerate()
        .map(|(k, ck)| ck * Complex::new(0.0, frequency(k, n)))
        .collect();
    (0..n)
        .map(|j| {
            dc.iter()
                .enumerate()
                .map(|(k, ck)| ck * w[(n - (j * k) % n) % n])
                .sum()
        })
        .collect()
}

/// Periodic cubic spline through closed polygon vertices, parametrized by
/// cumulative chord length.
pub(crate) struct PeriodicSpline {
    points: Vec<Complex>,
    second: Vec<Complex>,
    chords: Vec<f64>,
}

impl PeriodicSpline {
    pub(crate) fn new(points: &[Complex]) -> Result<Self> {
        let n = points.len();
        if n < 3 {
            return Err(Error::DegenerateCurve);
        }
        let chords: Vec<f64> = segments(points).map(|(a, b)| (b - a).norm()).collect();
        if chords.iter().any(|&c| !(c > 0.0)) {
            return Err(Error::DegenerateCurve);
        }
        // Cyclic tridiagonal system for the second derivatives.
        let sub: Vec<f64> = (0..n).map(|j| chords[(j + n - 1) % n] / 6.0).collect();
        let diag: Vec<f64> = (0..n).map(|j| (chords[(j + n - 1) % n] + chords[j]) / 3.0).collect();
        let sup: Vec<f64> = (0..n).map(|j| chords[j] / 6.0).collect();
        let rhs: Vec<Complex> = (0..n)
            .map(|j| {
                let prev = (j + n - 1) % n;
                let next = (j + 1) % n;
                (points[next] - points[j]) / chords[j] - (points[j] - points[prev]) / chords[prev]
            })
            .collect();
        let second = solve_cyclic(&sub, &diag, &sup, &rhs);
        Ok(Self { points: points.to_vec(), second, chords })
    }

    fn len(&self) -> usize {
        self.points.len()
    }

    /// Position on segment `j` at local fraction `s ∈ [0, 1]`.
    pub(crate) fn eval(&self, j: usize, s: f64) -> Complex {
        let n = self.len();
        let (p0, p1) = (self.points[j], self.points[(j + 1) % n]);
        let (m0, m1) = (self.second[j], self.second[(j + 1) % n]);
        let l = self.chords[j];
        let r = 1.0 - s;
        p0 * r + p1 * s + (m0 * (r * r * r - r) + m1 * (s * s * s - s)) * (l * l / 6.0)
    }

    /// Derivative with respect to chord-length parameter on segment `j`.
    fn deriv(&self, j: usize, s: f64) -> Complex {
        let n = self.len();
        let (p0, p1) = (self.points[j], self.points[(j + 1) % n]);
        let (m0, m1) = (self.second[j], self.second[(j + 1) % n]);
        let l = self.chords[j];
        let r = 1.0 - s;
        (p1 - p0) / l + (m1 * (3.0 * s * s - 1.0) - m0 * (3.0 * r * r - 1.0)) * (l / 6.0)
    }

    fn arclength(&self, rule: &GaussLegendre, j: usize, s: f64) -> f64 {
        let l = self.chords[j];
        rule.integrate(0.0, s, |x| self.deriv(j, x).norm()) * l
    }
}

fn solve_cyclic(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[Complex]) -> Vec<Complex> {
    // Sherman-Morrison reduction to two tridiagonal solves.
    let n = diag.len();
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= sub[0] * sup[n - 1] / gamma;
    let x = solve_tridiagonal(sub, &d, sup, rhs);
    let mut u = alloc::vec![Complex::new(0.0, 0.0); n];
    u[0] = Complex::new(gamma, 0.0);
    u[n - 1] = Complex::new(sup[n - 1], 0.0);
    let z = solve_tridiagonal(sub, &d, sup, &u);
    let v0 = 1.0;
    let vn = sub[0] / gamma;
    let num = x[0] * v0 + x[n - 1] * vn;
    let den = Complex::new(1.0, 0.0) + z[0] * v0 + z[n - 1] * vn;
    let factor = num / den;
    x.iter().zip(&z).map(|(xi, zi)| xi - zi * factor).collect()
}

fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[Complex]) -> Vec<Complex> {
    let n = diag.len();
    let mut c = alloc::vec![0.0; n];
    let mut d = alloc::vec![Complex::new(0.0, 0.0); n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / m;
        d[i] = (rhs[i] - d[i - 1] * sub[i]) / m;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= next * c[i];
    }
    x
}

/// Arclength-equispaced resampling of a closed polygon through its periodic
/// cubic spline.
pub(crate) fn resample_points(points: &[Complex], n: usize) -> Result<Vec<Complex>> {
    let spline = PeriodicSpline::new(points)?;
    let rule = GaussLegendre::new(16);
    let m = spline.len();
    let mut cumulative = Vec::with_capacity(m + 1);
    cumulative.push(0.0);
    for j in 0..m {
        let last = cumulative[j];
        cumulative.push(last + spline.arclength(&rule, j, 1.0));
    }
    let total = cumulative[m];
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::DegenerateCurve);
    }
    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    for k in 0..n {
        let target = total * k as f64 / n as f64;
        while seg + 1 < m && cumulative[seg + 1] <= target {
            seg += 1;
        }
        let local = target - cumulative[seg];
        let seg_len = cumulative[seg + 1] - cumulative[seg];
        let l = spline.chords[seg];
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut s = (local / seg_len).clamp(0.0, 1.0);
        for _ in 0..60 {
            let f = spline.arclength(&rule, seg, s) - local;
            if f > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let df = spline.deriv(seg, s).norm() * l;
            let mut next = if df > 0.0 { s - f / df } else { 0.5 * (lo + hi) };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - s).abs() < 1e-15 {
                s = next;
                break;
            }
            s = next;
        }
        out.push(spline.eval(seg, s));
    }
    Ok(out)
}
