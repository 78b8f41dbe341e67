//! Complex moments `M_k = ∫_Ω z^k ρ dA` and the Newtonian potential.

use core::f64::consts::PI;

use crate::prelude::*;
use crate::{Complex, DensityField, Error, MarkerCurve, Result, ScalarGrid, LATTICE_GREEN_CONSTANT};

/// Moment vectors `M_0..M_K` sampled at strictly increasing times.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MomentSeries {
    times: Vec<f64>,
    values: Vec<Vec<Complex>>,
}

impl MomentSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, moments: Vec<Complex>) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(Error::InvalidParameter("moment series times must increase"));
            }
            if moments.len() != self.values[0].len() {
                return Err(Error::LengthMismatch { expected: self.values[0].len(), got: moments.len() });
            }
        }
        if moments.is_empty() {
            return Err(Error::InvalidParameter("moment vector must contain M_0"));
        }
        self.times.push(t);
        self.values.push(moments);
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<Complex>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Highest moment index `K`.
    pub fn order(&self) -> usize {
        self.values.first().map_or(0, |v| v.len() - 1)
    }
}

/// Midpoint-rule moments over cells whose centers lie inside `curve`, on a
/// grid of spacing `h` fitted around the curve with a `10h` margin.
pub fn moments_grid(curve: &MarkerCurve, rho: &DensityField, k_max: usize, h: f64) -> Result<Vec<Complex>> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter("grid spacing must be positive"));
    }
    let (lo, hi) = curve.bounding_box();
    let grid = ScalarGrid::covering(lo, hi, h, 10.0 * h)?;
    moments_grid_on(curve, rho, k_max, &grid)
}

/// [`moments_grid`] on a caller-supplied grid, which must contain the curve
/// with a margin of at least `10h`.
pub fn moments_grid_on(curve: &MarkerCurve, rho: &DensityField, k_max: usize, grid: &ScalarGrid) -> Result<Vec<Complex>> {
    let (lo, hi) = curve.bounding_box();
    let margin = 10.0 * grid.h * (1.0 - 1e-9);
    let (glo, ghi) = (grid.origin, grid.far_corner());
    if lo.re - glo.re < margin || lo.im - glo.im < margin || ghi.re - hi.re < margin || ghi.im - hi.im < margin {
        return Err(Error::BoxTooSmall("curve must sit 10h inside the grid"));
    }
    let mask = grid.inside_mask(curve);
    let cell = grid.h * grid.h;
    let mut out = alloc::vec![Complex::new(0.0, 0.0); k_max + 1];
    for j in 0..grid.ny {
        let mut row = alloc::vec![Complex::new(0.0, 0.0); k_max + 1];
        for i in 0..grid.nx {
            if !mask[grid.index(i, j)] {
                continue;
            }
            let z = grid.node(i, j);
            let mut p = Complex::new(rho.eval(z) * cell, 0.0);
            for m in row.iter_mut() {
                *m += p;
                p *= z;
            }
        }
        for (o, r) in out.iter_mut().zip(row) {
            *o += r;
        }
    }
    Ok(out)
}

/// Moments from the boundary integral `M_k = −(i/2)∮ z^k ∂φ₀/∂z dz`.
pub fn moments_boundary(curve: &MarkerCurve, phi0_dz: &[Complex], k_max: usize) -> Result<Vec<Complex>> {
    if phi0_dz.len() != curve.len() {
        return Err(Error::LengthMismatch { expected: curve.len(), got: phi0_dz.len() });
    }
    let m = curve.markers();
    let d = curve.derivative();
    let mut out = alloc::vec![Complex::new(0.0, 0.0); k_max + 1];
    for j in 0..m.len() {
        let mut p = phi0_dz[j] * d[j];
        for o in out.iter_mut() {
            *o += p;
            p *= m[j];
        }
    }
    let scale = Complex::new(0.0, -0.5 * curve.dtheta());
    Ok(out.into_iter().map(|s| s * scale).collect())
}

/// `∂φ₀/∂z` at the markers from the closed-form potential of `rho`, if any.
pub fn closed_form_dz(curve: &MarkerCurve, rho: &DensityField) -> Option<Vec<Complex>> {
    curve.markers().iter().map(|z| rho.potential_dz(*z)).collect()
}

/// Newtonian potential `φ₀(z) = Σ (2/π) log|z − w|·ρ(w)·h²` over the nodes
/// of `grid` (restricted to the closed domain of `support` when given).
///
/// The self term uses the lattice-consistent value `(2/π)log h − λ`, which
/// makes the five-point Laplacian over 4 reproduce `ρ` at source nodes.
pub fn newtonian_potential(rho: &DensityField, grid: &ScalarGrid, support: Option<&MarkerCurve>) -> ScalarGrid {
    let (nx, ny, h) = (grid.nx, grid.ny, grid.h);
    let mask = support.map(|c| grid.inside_mask(c));
    let mut sources: Vec<(usize, usize, f64)> = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if mask.as_ref().is_some_and(|m| !m[grid.index(i, j)]) {
                continue;
            }
            sources.push((i, j, rho.eval(grid.node(i, j)) * h * h));
        }
    }
    // Kernel by integer offset.
    let c = 2.0 / PI;
    let mut kernel = alloc::vec![0.0; nx * ny];
    for dj in 0..ny {
        for di in 0..nx {
            kernel[dj * nx + di] = if di == 0 && dj == 0 {
                c * h.ln() - LATTICE_GREEN_CONSTANT
            } else {
                c * (h.ln() + 0.5 * ((di * di + dj * dj) as f64).ln())
            };
        }
    }
    let mut out = grid.clone();
    for j in 0..ny {
        for i in 0..nx {
            let mut s = 0.0;
            for &(si, sj, w) in &sources {
                s += w * kernel[si.abs_diff(i) + nx * sj.abs_diff(j)];
            }
            out.values[j * nx + i] = s;
        }
    }
    out
}

/// Per-`k` drift: `max_t |M_k(t) − M_k(t₀)|` for `k ≥ 1` and
/// `max_t |M_0(t) − M_0(t₀) − (t − t₀)|` for `k = 0`.
pub fn richardson_drift(series: &MomentSeries) -> Result<Vec<f64>> {
    if series.len() < 2 {
        return Err(Error::InvalidParameter("drift needs at least two time samples"));
    }
    let t0 = series.times[0];
    let m0 = &series.values[0];
    let mut out = alloc::vec![0.0f64; m0.len()];
    for (t, m) in series.times.iter().zip(&series.values).skip(1) {
        for k in 0..m0.len() {
            let mut d = m[k] - m0[k];
            if k == 0 {
                d -= t - t0;
            }
            out[k] = out[k].max(d.norm());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_moments_of_unit_disc() {
        let curve = MarkerCurve::circle(Complex::new(0.0, 0.0), 1.0, 128).unwrap();
        let g: Vec<Complex> = curve.markers().iter().map(|z| z.conj()).collect();
        let m = moments_boundary(&curve, &g, 4).unwrap();
        assert!((m[0] - PI).norm() < 1e-10);
        for v in &m[1..] {
            assert!(v.norm() < 1e-10);
        }
    }

    #[test]
    fn drift_detects_single_perturbation() {
        let mut s = MomentSeries::new();
        let base = alloc::vec![Complex::new(1.0, 0.0), Complex::new(0.5, 0.0)];
        s.push(0.0, base.clone()).unwrap();
        let mut p = base.clone();
        p[0] += 0.1;
        p[1] += 0.1;
        s.push(0.1, p).unwrap();
        s.push(0.2, alloc::vec![Complex::new(1.2, 0.0), Complex::new(0.5, 0.0)]).unwrap();
        let d = richardson_drift(&s).unwrap();
        assert!(d[0].abs() < 1e-12 && (d[1] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn series_rejects_non_increasing_times() {
        let mut s = MomentSeries::new();
        s.push(0.1, alloc::vec![Complex::new(1.0, 0.0)]).unwrap();
        assert!(s.push(0.1, alloc::vec![Complex::new(1.0, 0.0)]).is_err());
    }
}
