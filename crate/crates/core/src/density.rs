//! Area densities `ρ = 1/κ`.

use crate::{Complex, Error, Result, ScalarGrid};

/// Positive density on the plane.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityField {
    Constant(f64),
    /// `max(c0 + c1·Re z + c2·Im z, floor)`.
    Affine { c0: f64, c1: f64, c2: f64, floor: f64 },
    /// Bilinear interpolation of nodal samples.
    Sampled(ScalarGrid),
}

impl DensityField {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter("constant density must be positive"));
        }
        Ok(Self::Constant(c))
    }

    pub fn affine(c0: f64, c1: f64, c2: f64, floor: f64) -> Result<Self> {
        if !(floor > 0.0) || ![c0, c1, c2, floor].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("affine density needs a positive floor"));
        }
        Ok(Self::Affine { c0, c1, c2, floor })
    }

    pub fn sampled(grid: ScalarGrid) -> Result<Self> {
        if grid.values.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidParameter("sampled density must be positive"));
        }
        Ok(Self::Sampled(grid))
    }

    pub fn eval(&self, z: Complex) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Affine { c0, c1, c2, floor } => (c0 + c1 * z.re + c2 * z.im).max(*floor),
            Self::Sampled(g) => g.bilinear(z),
        }
    }

    /// Permeability `κ = 1/ρ`.
    pub fn kappa(&self, z: Complex) -> f64 {
        1.0 / self.eval(z)
    }

    /// Same field multiplied by `s > 0`.
    pub fn scaled(&self, s: f64) -> Self {
        match self {
            Self::Constant(c) => Self::Constant(c * s),
            Self::Affine { c0, c1, c2, floor } => {
                Self::Affine { c0: c0 * s, c1: c1 * s, c2: c2 * s, floor: floor * s }
            }
            Self::Sampled(g) => {
                let mut g = g.clone();
                g.values.iter_mut().for_each(|v| *v *= s);
                Self::Sampled(g)
            }
        }
    }

    fn unclamped(&self, z: Complex) -> bool {
        match self {
            Self::Constant(_) => true,
            Self::Affine { c0, c1, c2, floor } => c0 + c1 * z.re + c2 * z.im >= *floor,
            Self::Sampled(_) => false,
        }
    }

    /// Closed-form potential `φ₀` with `∂²φ₀/∂z∂z̄ = ρ`, where available:
    /// `c0|z|² + c1|z|²x/2 + c2|z|²y/2` for the affine family (valid where the
    /// floor is inactive).
    pub fn potential(&self, z: Complex) -> Option<f64> {
        if !self.unclamped(z) {
            return None;
        }
        let r2 = z.norm_sqr();
        match self {
            Self::Constant(c) => Some(c * r2),
            Self::Affine { c0, c1, c2, .. } => Some(r2 * (c0 + 0.5 * (c1 * z.re + c2 * z.im))),
            Self::Sampled(_) => None,
        }
    }

    /// `∂φ₀/∂z` of [`potential`](Self::potential).
    pub fn potential_dz(&self, z: Complex) -> Option<Complex> {
        if !self.unclamped(z) {
            return None;
        }
        let zb = z.conj();
        match self {
            Self::Constant(c) => Some(zb * *c),
            Self::Affine { c0, c1, c2, .. } => {
                let zz = z * zb;
                let x_part = (zz * 2.0 + zb * zb) / 4.0;
                let y_part = (zz * 2.0 - zb * zb) / Complex::new(0.0, 4.0);
                Some(zb * *c0 + x_part * *c1 + y_part * *c2)
            }
            Self::Sampled(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_potential_has_unit_density_laplacian() {
        let rho = DensityField::affine(1.0, 0.2, -0.3, 0.1).unwrap();
        let z = Complex::new(0.3, -0.2);
        let e = 1e-3;
        let p = |w: Complex| rho.potential(w).unwrap();
        let lap = (p(z + e) + p(z - e) + p(z + Complex::new(0.0, e)) + p(z - Complex::new(0.0, e))
            - 4.0 * p(z))
            / (4.0 * e * e);
        assert!((lap - rho.eval(z)).abs() < 1e-6);
        let dx = (p(z + e) - p(z - e)) / (2.0 * e);
        let dy = (p(z + Complex::new(0.0, e)) - p(z - Complex::new(0.0, e))) / (2.0 * e);
        let dz = Complex::new(dx / 2.0, -dy / 2.0);
        assert!((dz - rho.potential_dz(z).unwrap()).norm() < 1e-6);
    }

    #[test]
    fn floor_is_enforced() {
        let rho = DensityField::affine(1.0, 1.0, 0.0, 0.5).unwrap();
        assert_eq!(rho.eval(Complex::new(-2.0, 0.0)), 0.5);
        assert!(rho.potential(Complex::new(-2.0, 0.0)).is_none());
    }
}
