//! Uniform Cartesian node grids.

use crate::prelude::*;
use crate::curve::{bounding_box, polygon_signed_area, resample_points};
use crate::{Complex, Error, MarkerCurve, Result};

/// Real field on the nodes `origin + h·(i + i·j)`, `0 ≤ i < nx`, `0 ≤ j < ny`,
/// stored row-major with rows along `y` (`values[j·nx + i]`).
///
/// Each node doubles as the center of an `h × h` cell when the grid is used
/// for area quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    pub origin: Complex,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl ScalarGrid {
    pub fn new(origin: Complex, h: f64, nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidParameter("grid spacing must be positive"));
        }
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidParameter("grid dimensions must be positive"));
        }
        if values.len() != nx * ny {
            return Err(Error::LengthMismatch { expected: nx * ny, got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "grid values" });
        }
        Ok(Self { origin, h, nx, ny, values })
    }

    pub fn zeros(origin: Complex, h: f64, nx: usize, ny: usize) -> Result<Self> {
        Self::new(origin, h, nx, ny, alloc::vec![0.0; nx * ny])
    }

    /// Square grid on `[-half, half]²` with an odd node count, so the origin
    /// is a node.
    pub fn centered(half: f64, h: f64) -> Result<Self> {
        if !(half > 0.0) {
            return Err(Error::InvalidParameter("box half-width must be positive"));
        }
        let m = (half / h).round() as usize;
        let n = 2 * m + 1;
        let o = -(m as f64) * h;
        Self::zeros(Complex::new(o, o), h, n, n)
    }

    /// Grid covering a rectangle `[lo, hi]` with at least `margin` to spare on
    /// each side.
    pub fn covering(lo: Complex, hi: Complex, h: f64, margin: f64) -> Result<Self> {
        let ox = lo.re - margin;
        let oy = lo.im - margin;
        let nx = ((hi.re + margin - ox) / h).ceil() as usize + 1;
        let ny = ((hi.im + margin - oy) / h).ceil() as usize + 1;
        Self::zeros(Complex::new(ox, oy), h, nx, ny)
    }

    /// Same geometry, values from `f(node)`.
    pub fn from_fn<F: FnMut(Complex) -> f64>(&self, mut f: F) -> Self {
        let mut out = self.clone();
        for j in 0..self.ny {
            for i in 0..self.nx {
                out.values[j * self.nx + i] = f(self.node(i, j));
            }
        }
        out
    }

    /// Same geometry, values mapped through `f`.
    pub fn map_values<F: FnMut(f64) -> f64>(&self, f: F) -> Self {
        let mut out = self.clone();
        out.values = self.values.iter().copied().map(f).collect();
        out
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> Complex {
        self.origin + Complex::new(self.h * i as f64, self.h * j as f64)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[j * self.nx + i] = v;
    }

    /// Upper corner `origin + h·(nx−1, ny−1)`.
    pub fn far_corner(&self) -> Complex {
        self.node(self.nx - 1, self.ny - 1)
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && (self.h - other.h).abs() <= 1e-12 * self.h
            && (self.origin - other.origin).norm() <= 1e-12 * (1.0 + self.origin.norm())
    }

    /// Fractional node coordinates of `z`.
    pub fn locate(&self, z: Complex) -> (f64, f64) {
        let d = (z - self.origin) / self.h;
        (d.re, d.im)
    }

    /// Bilinear interpolation, clamped to the grid.
    pub fn bilinear(&self, z: Complex) -> f64 {
        let (x, y) = self.locate(z);
        let x = x.clamp(0.0, (self.nx - 1) as f64);
        let y = y.clamp(0.0, (self.ny - 1) as f64);
        let i = (x.floor() as usize).min(self.nx.saturating_sub(2));
        let j = (y.floor() as usize).min(self.ny.saturating_sub(2));
        let (fx, fy) = (x - i as f64, y - j as f64);
        let i1 = (i + 1).min(self.nx - 1);
        let j1 = (j + 1).min(self.ny - 1);
        let v00 = self.get(i, j);
        let v10 = self.get(i1, j);
        let v01 = self.get(i, j1);
        let v11 = self.get(i1, j1);
        (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11)
    }

    /// Five-point Laplacian divided by 4 (the `∂²/∂z∂z̄` convention) at an
    /// interior node.
    #[inline]
    pub fn laplacian(&self, i: usize, j: usize) -> f64 {
        let c = self.get(i, j);
        (self.get(i + 1, j) + self.get(i - 1, j) + self.get(i, j + 1) + self.get(i, j - 1) - 4.0 * c)
            / (4.0 * self.h * self.h)
    }

    /// Centered-difference `∂/∂z = (∂x − i∂y)/2` at an interior node.
    #[inline]
    pub fn dz(&self, i: usize, j: usize) -> Complex {
        let fx = (self.get(i + 1, j) - self.get(i - 1, j)) / (2.0 * self.h);
        let fy = (self.get(i, j + 1) - self.get(i, j - 1)) / (2.0 * self.h);
        Complex::new(0.5 * fx, -0.5 * fy)
    }

    /// Nodes whose cell centers lie inside the curve (scanline rule).
    pub fn inside_mask(&self, curve: &MarkerCurve) -> Vec<bool> {
        scanline_mask(self, curve.markers())
    }

    /// Fraction of each cell covered by the domain bounded by `curve`,
    /// computed by exact clipping against a densely resampled boundary
    /// polygon.
    pub fn coverage(&self, curve: &MarkerCurve) -> Result<Vec<f64>> {
        let dense_n = ((8.0 * curve.perimeter() / self.h).ceil() as usize).max(curve.len());
        let poly = if dense_n > curve.len() {
            resample_points(curve.markers(), dense_n)?
        } else {
            curve.markers().to_vec()
        };
        let mask = scanline_mask(self, &poly);
        let mut frac: Vec<f64> = mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
        let mut touched = alloc::vec![false; self.nx * self.ny];
        let n = poly.len();
        for k in 0..n {
            let (lo, hi) = bounding_box(&[poly[k], poly[(k + 1) % n]]);
            let (x0, y0) = self.locate(lo);
            let (x1, y1) = self.locate(hi);
            let i0 = ((x0 - 0.5).floor().max(0.0)) as usize;
            let j0 = ((y0 - 0.5).floor().max(0.0)) as usize;
            let i1 = ((x1 + 0.5).ceil() as usize).min(self.nx - 1);
            let j1 = ((y1 + 0.5).ceil() as usize).min(self.ny - 1);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    touched[j * self.nx + i] = true;
                }
            }
        }
        // Cells not crossed by any edge keep their scanline value.
        let half = 0.5 * self.h;
        for j in 0..self.ny {
            for i in 0..self.nx {
                if !touched[j * self.nx + i] {
                    continue;
                }
                let c = self.node(i, j);
                let lo = c - Complex::new(half, half);
                let hi = c + Complex::new(half, half);
                let area = clipped_area(&poly, lo, hi);
                frac[j * self.nx + i] = (area / (self.h * self.h)).clamp(0.0, 1.0);
            }
        }
        Ok(frac)
    }
}

fn scanline_mask(grid: &ScalarGrid, poly: &[Complex]) -> Vec<bool> {
    let n = poly.len();
    let mut mask = alloc::vec![false; grid.nx * grid.ny];
    let mut xs: Vec<f64> = Vec::new();
    for j in 0..grid.ny {
        let y = grid.origin.im + grid.h * j as f64;
        xs.clear();
        for k in 0..n {
            let (a, b) = (poly[k], poly[(k + 1) % n]);
            if (a.im <= y && y < b.im) || (b.im <= y && y < a.im) {
                xs.push(a.re + (y - a.im) * (b.re - a.re) / (b.im - a.im));
            }
        }
        xs.sort_by(|p, q| p.total_cmp(q));
        for pair in xs.chunks_exact(2) {
            let (xa, xb) = (pair[0], pair[1]);
            let ia = ((xa - grid.origin.re) / grid.h).ceil().max(0.0) as usize;
            for i in ia..grid.nx {
                let x = grid.origin.re + grid.h * i as f64;
                if x >= xb {
                    break;
                }
                if x >= xa {
                    mask[j * grid.nx + i] = true;
                }
            }
        }
    }
    mask
}

/// Area of `polygon ∩ [lo, hi]` by Sutherland-Hodgman clipping (valid for
/// non-convex subject polygons against a convex clip window).
pub(crate) fn clipped_area(poly: &[Complex], lo: Complex, hi: Complex) -> f64 {
    let mut cur: Vec<Complex> = poly.to_vec();
    let mut next: Vec<Complex> = Vec::with_capacity(poly.len());
    // (axis, bound, keep >= bound?)
    let planes = [(0, lo.re, true), (0, hi.re, false), (1, lo.im, true), (1, hi.im, false)];
    for (axis, bound, keep_above) in planes {
        next.clear();
        let coord = |z: Complex| if axis == 0 { z.re } else { z.im };
        let inside = |z: Complex| {
            if keep_above {
                coord(z) >= bound
            } else {
                coord(z) <= bound
            }
        };
        let n = cur.len();
        if n == 0 {
            return 0.0;
        }
        for k in 0..n {
            let a = cur[k];
            let b = cur[(k + 1) % n];
            let (ia, ib) = (inside(a), inside(b));
            if ia {
                next.push(a);
            }
            if ia != ib {
                let t = (bound - coord(a)) / (coord(b) - coord(a));
                let mut p = a + (b - a) * t;
                if axis == 0 {
                    p.re = bound;
                } else {
                    p.im = bound;
                }
                next.push(p);
            }
        }
        core::mem::swap(&mut cur, &mut next);
    }
    polygon_signed_area(&cur).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centered_grid_has_origin_node() {
        let g = ScalarGrid::centered(1.5, 1.0 / 128.0).unwrap();
        assert_eq!(g.nx, 385);
        let mid = g.node(192, 192);
        assert!(mid.norm() < 1e-14);
    }

    #[test]
    fn bilinear_reproduces_affine_fields() {
        let g = ScalarGrid::centered(1.0, 0.1).unwrap().from_fn(|z| 2.0 + z.re - 3.0 * z.im);
        let p = Complex::new(0.123, -0.456);
        assert!((g.bilinear(p) - (2.0 + 0.123 + 3.0 * 0.456)).abs() < 1e-12);
    }

    #[test]
    fn laplacian_and_dz_of_quadratic() {
        let g = ScalarGrid::centered(1.0, 0.05).unwrap().from_fn(|z| z.norm_sqr());
        assert!((g.laplacian(10, 13) - 1.0).abs() < 1e-9);
        let z = g.node(10, 13);
        assert!((g.dz(10, 13) - z.conj()).norm() < 1e-9);
    }

    #[test]
    fn clipping_a_square() {
        let sq = [
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(1.0, 1.0),
            Complex::new(0.0, 1.0),
        ];
        let a = clipped_area(&sq, Complex::new(0.5, 0.5), Complex::new(1.5, 1.5));
        assert!((a - 0.25).abs() < 1e-15);
    }

    #[test]
    fn coverage_sums_to_disc_area() {
        let g = ScalarGrid::centered(1.0, 1.0 / 32.0).unwrap();
        let disc = MarkerCurve::circle(Complex::new(0.1, 0.0), 0.6, 256).unwrap();
        let frac = g.coverage(&disc).unwrap();
        let area: f64 = frac.iter().sum::<f64>() * g.h * g.h;
        assert!((area - core::f64::consts::PI * 0.36).abs() < 1e-5, "{area}");
    }
}
