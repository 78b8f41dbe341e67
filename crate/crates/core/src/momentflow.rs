//! Domain potentials, moment coefficients and moment derivatives under
//! normal boundary motion.

use core::f64::consts::PI;
use nalgebra::DMatrix;

use crate::prelude::*;
use crate::cauchy::laurent_tail;
use crate::linalg::singular_values;
use crate::{BoundaryFunction, Complex, DensityField, Error, MarkerCurve, Result, ScalarGrid};

/// Real normal speed at the markers, positive outward.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalField {
    curve: MarkerCurve,
    v: Vec<f64>,
}

impl NormalField {
    pub fn new(curve: MarkerCurve, v: Vec<f64>) -> Result<Self> {
        if v.len() != curve.len() {
            return Err(Error::LengthMismatch { expected: curve.len(), got: v.len() });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "normal speed" });
        }
        Ok(Self { curve, v })
    }

    /// Speed `f(θ_j)` at parameter angle `θ_j = 2πj/N`.
    pub fn from_parameter<F: Fn(f64) -> f64>(curve: MarkerCurve, f: F) -> Result<Self> {
        let dt = curve.dtheta();
        let v = (0..curve.len()).map(|j| f(j as f64 * dt)).collect();
        Self::new(curve, v)
    }

    pub fn curve(&self) -> &MarkerCurve {
        &self.curve
    }

    pub fn speeds(&self) -> &[f64] {
        &self.v
    }

    /// Whether the field points strictly outward everywhere.
    pub fn is_outward(&self) -> bool {
        self.v.iter().all(|&x| x > 0.0)
    }
}

/// Weights of a grid quadrature over the domain: node positions and
/// `coverage·h²`.
fn area_nodes(curve: &MarkerCurve, h: f64) -> Result<(ScalarGrid, Vec<f64>)> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter("grid spacing must be positive"));
    }
    let (lo, hi) = curve.bounding_box();
    let grid = ScalarGrid::covering(lo, hi, h, 2.0 * h)?;
    let cover = grid.coverage(curve)?;
    Ok((grid, cover.into_iter().map(|c| c * h * h).collect()))
}

/// `U(z) = ∫_Ω log|z − w|² ρ(w) dA(w)` for exterior `z`, by grid quadrature
/// with spacing `h`.
pub fn potential_u(curve: &MarkerCurve, rho: &DensityField, z: Complex, h: f64) -> Result<f64> {
    if curve.point_in_domain(z)? {
        return Err(Error::WrongSide { expected: "outside" });
    }
    let distance = curve.distance_to(z);
    if distance < 5.0 * h {
        return Err(Error::TooClose { distance, min: 5.0 * h });
    }
    let (grid, weights) = area_nodes(curve, h)?;
    let mut s = 0.0;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let w = weights[grid.index(i, j)];
            if w > 0.0 {
                let p = grid.node(i, j);
                s += (z - p).norm_sqr().ln() * rho.eval(p) * w;
            }
        }
    }
    Ok(s)
}

/// Number of circle nodes used by [`moment_coeffs`].
pub const MOMENT_CIRCLE_NODES: usize = 256;

/// `a_k = (1/2πi)∮_{|z|=R} G(z) z^{k−1} dz` for `k = 1..K`, where
/// `G(z) = ∫_Ω ρ(w)/(z − w) dA(w)` by grid quadrature with spacing `h`; `a_k`
/// approximates `M_{k−1}`.
pub fn moment_coeffs(curve: &MarkerCurve, rho: &DensityField, k_max: usize, radius: f64, h: f64) -> Result<Vec<Complex>> {
    let rmin = curve.circumradius();
    if !(radius > rmin) {
        return Err(Error::OutOfRange { what: "radius", value: radius, min: rmin, max: f64::INFINITY });
    }
    let (grid, weights) = area_nodes(curve, h)?;
    let mut sources: Vec<(Complex, f64)> = Vec::new();
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let w = weights[grid.index(i, j)];
            if w > 0.0 {
                let p = grid.node(i, j);
                sources.push((p, rho.eval(p) * w));
            }
        }
    }
    let n = MOMENT_CIRCLE_NODES;
    let mut a = alloc::vec![Complex::new(0.0, 0.0); k_max];
    for m in 0..n {
        let z = Complex::from_polar(radius, 2.0 * PI * m as f64 / n as f64);
        let g: Complex = sources.iter().map(|(p, w)| (z - p).inv() * *w).sum();
        let mut zk = z;
        for ak in a.iter_mut() {
            *ak += g * zk;
            zk *= z;
        }
    }
    Ok(a.into_iter().map(|v| v / n as f64).collect())
}

/// Boundary one-form `g` with `g dz = Vρ ds`: `g = V·ρ·conj(τ)`.
pub fn g_from_field(nf: &NormalField, rho: &DensityField) -> Result<BoundaryFunction> {
    let curve = &nf.curve;
    let scale = curve.markers().iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    if curve.derivative().iter().any(|d| d.norm() <= 1e-12 * scale) {
        return Err(Error::DegenerateCurve);
    }
    let values = (0..curve.len())
        .map(|j| curve.unit_tangent(j).conj() * (nf.v[j] * rho.eval(curve.markers()[j])))
        .collect();
    BoundaryFunction::new(curve.clone(), values)
}

/// Moment derivatives `dM_k/dt`, `k = 0..K`, by two routes.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentDerivative {
    /// `∮ z^k Vρ ds`.
    pub direct: Vec<Complex>,
    /// `−2πi·b_{k+1}` from the Laurent tail of [`g_from_field`].
    pub tail: Vec<Complex>,
}

impl MomentDerivative {
    pub fn max_difference(&self) -> f64 {
        self.direct.iter().zip(&self.tail).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

pub fn moment_derivative(nf: &NormalField, rho: &DensityField, k_max: usize) -> Result<MomentDerivative> {
    let curve = &nf.curve;
    let weights = curve.arclength_weights();
    let mut direct = alloc::vec![Complex::new(0.0, 0.0); k_max + 1];
    for (j, z) in curve.markers().iter().enumerate() {
        let mut p = Complex::new(nf.v[j] * rho.eval(*z) * weights[j], 0.0);
        for d in direct.iter_mut() {
            *d += p;
            p *= z;
        }
    }
    let g = g_from_field(nf, rho)?;
    let b = laurent_tail(&g, k_max + 1)?;
    let factor = Complex::new(0.0, -2.0 * PI);
    let tail = (0..=k_max).map(|k| factor * b.b(k + 1)).collect();
    Ok(MomentDerivative { direct, tail })
}

/// Singular values (largest first) of the real `2(M+1) × (2M+1)` matrix
/// taking the coefficients of `V` in `{1, cos θ, sin θ, …, cos Mθ, sin Mθ}`
/// to `(dM_0..dM_M)` on the unit circle with `ρ ≡ 1`, sampled at `n`
/// markers.
pub fn injectivity_singular_values(m_max: usize, n: usize) -> Result<Vec<f64>> {
    let curve = MarkerCurve::circle(Complex::new(0.0, 0.0), 1.0, n)?;
    let rho = DensityField::Constant(1.0);
    let cols = 2 * m_max + 1;
    let mut a = DMatrix::zeros(2 * (m_max + 1), cols);
    for c in 0..cols {
        let mode = c.div_ceil(2) as f64;
        let field = NormalField::from_parameter(curve.clone(), |t| match c {
            0 => 1.0,
            _ if c % 2 == 1 => (mode * t).cos(),
            _ => (mode * t).sin(),
        })?;
        let d = moment_derivative(&field, &rho, m_max)?.direct;
        for (k, v) in d.iter().enumerate() {
            a[(2 * k, c)] = v.re;
            a[(2 * k + 1, c)] = v.im;
        }
    }
    Ok(singular_values(a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field_on_circle() {
        let curve = MarkerCurve::circle(Complex::new(0.0, 0.0), 1.0, 128).unwrap();
        let nf = NormalField::from_parameter(curve, |_| 2.0).unwrap();
        let d = moment_derivative(&nf, &DensityField::Constant(1.0), 4).unwrap();
        assert!((d.direct[0] - 4.0 * PI).norm() < 1e-9);
        assert!(d.direct[1..].iter().all(|v| v.norm() < 1e-9));
        assert!(d.max_difference() < 1e-9);
    }

    #[test]
    fn injectivity_spectrum_on_circle() {
        let s = injectivity_singular_values(4, 128).unwrap();
        assert_eq!(s.len(), 9);
        assert!((s[0] - 2.0 * PI).abs() < 1e-9);
        assert!((s[8] - PI).abs() < 1e-9);
    }
}
