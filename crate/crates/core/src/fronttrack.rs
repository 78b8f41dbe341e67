//! Classical Hele-Shaw flow by front tracking.
//!
//! The pressure is the Green's function of the current domain with pole at
//! the origin, `p = −(1/2π)log|z| + h`, where the harmonic correction `h` is
//! a double-layer potential solved by Nyström discretization on the
//! markers. Markers move with normal speed `V = −κ·∂p/∂n`, which injects unit
//! `ρ`-mass per unit time.

use core::f64::consts::PI;
use nalgebra::DMatrix;

use crate::prelude::*;
use crate::linalg::FactoredSystem;
use crate::moments::{closed_form_dz, moments_boundary, moments_grid};
use crate::{Complex, DensityField, Error, MarkerCurve, MomentSeries, Result};

/// Largest accepted condition estimate of the Nyström matrix.
pub const MAX_CONDITION: f64 = 1e8;
/// Fraction of the marker spacing a marker may move in one step.
pub const CFL_FRACTION: f64 = 0.5;

/// Pressure of a domain with unit source at the origin and `p = 0` on the
/// boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureSolution {
    curve: MarkerCurve,
    density: Vec<f64>,
    weights: Vec<f64>,
    dpdn: Vec<f64>,
    condition: f64,
}

impl PressureSolution {
    pub fn curve(&self) -> &MarkerCurve {
        &self.curve
    }

    /// Outward normal derivative `∂p/∂n` at the markers.
    pub fn dpdn(&self) -> &[f64] {
        &self.dpdn
    }

    /// Condition estimate of the Nyström system.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Total outward flux `∮ −∂p/∂n ds`, which should be 1.
    pub fn flux(&self) -> f64 {
        self.dpdn.iter().zip(&self.weights).map(|(d, w)| -d * w).sum()
    }

    /// Pressure at an interior point.
    pub fn eval(&self, z: Complex) -> Result<f64> {
        if !self.curve.point_in_domain(z)? {
            return Err(Error::WrongSide { expected: "inside" });
        }
        if z.norm() == 0.0 {
            return Err(Error::InvalidParameter("pressure is singular at the origin"));
        }
        let m = self.curve.markers();
        let nearest = (0..m.len())
            .min_by(|&a, &b| (m[a] - z).norm().total_cmp(&(m[b] - z).norm()))
            .unwrap_or(0);
        Ok(self.eval_near(z, nearest))
    }

    /// Interior pressure with the double layer evaluated relative to the
    /// density at marker `anchor` (Gauss identity `D[1] = −1` inside), which
    /// keeps the rule accurate close to the boundary.
    fn eval_near(&self, z: Complex, anchor: usize) -> f64 {
        let m = self.curve.markers();
        let mu0 = self.density[anchor];
        let mut s = 0.0;
        for (j, mj) in m.iter().enumerate() {
            let d = z - mj;
            let n = self.curve.outward_normal(j);
            let k = (n.conj() * d).re / (2.0 * PI * d.norm_sqr());
            s += k * (self.density[j] - mu0) * self.weights[j];
        }
        -(z.norm().ln()) / (2.0 * PI) + s - mu0
    }
}

/// Solves for the pressure of the domain bounded by `curve`.
pub fn green_pressure(curve: &MarkerCurve) -> Result<PressureSolution> {
    let origin = Complex::new(0.0, 0.0);
    let spacing = curve.spacing();
    if !curve.point_in_domain(origin)? {
        return Err(Error::OriginNotInside);
    }
    let distance = curve.distance_to(origin);
    if distance < 10.0 * spacing {
        return Err(Error::TooClose { distance, min: 10.0 * spacing });
    }
    let m = curve.markers();
    let n = m.len();
    let weights = curve.arclength_weights();
    let normals: Vec<Complex> = (0..n).map(|j| curve.outward_normal(j)).collect();
    let a = DMatrix::from_fn(n, n, |i, j| {
        let k = if i == j {
            -curve.curvature(j) / (4.0 * PI)
        } else {
            let d = m[i] - m[j];
            (normals[j].conj() * d).re / (2.0 * PI * d.norm_sqr())
        };
        k * weights[j] - if i == j { 0.5 } else { 0.0 }
    });
    let system = FactoredSystem::new(a)?;
    let condition = system.condition();
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let rhs: Vec<f64> = m.iter().map(|z| z.norm().ln() / (2.0 * PI)).collect();
    let density = system.solve(&rhs);
    if density.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "double-layer density" });
    }
    let mut sol = PressureSolution { curve: curve.clone(), density, weights, dpdn: Vec::new(), condition };
    let eps = 2.0 * spacing;
    sol.dpdn = (0..n)
        .map(|i| {
            let f = |k: f64| sol.eval_near(m[i] - normals[i] * (k * eps), i);
            // Third-order one-sided difference inward, with p = 0 on the curve.
            let inward = (18.0 * f(1.0) - 9.0 * f(2.0) + 2.0 * f(3.0)) / (6.0 * eps);
            -inward
        })
        .collect();
    Ok(sol)
}

/// Normal speed `V = −κ·∂p/∂n` at the markers, with `κ = 1/ρ`.
pub fn normal_velocity(curve: &MarkerCurve, rho: &DensityField) -> Result<Vec<f64>> {
    let p = green_pressure(curve)?;
    Ok(curve
        .markers()
        .iter()
        .zip(p.dpdn())
        .map(|(z, d)| -rho.kappa(*z) * d)
        .collect())
}

/// Time integrator for marker motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stepper {
    #[default]
    Euler,
    /// Heun's two-stage method.
    Rk2,
}

/// One forward step of length `dt ≥ 0`, resampled to the original count.
pub fn advance(curve: &MarkerCurve, rho: &DensityField, dt: f64) -> Result<MarkerCurve> {
    if dt < 0.0 {
        return Err(Error::BackwardTime);
    }
    step(curve, rho, dt, Stepper::Euler).map(|(c, _)| c)
}

/// One step of either sign; also returns the flux of the initial pressure.
fn step(curve: &MarkerCurve, rho: &DensityField, dt: f64, stepper: Stepper) -> Result<(MarkerCurve, f64)> {
    if !dt.is_finite() {
        return Err(Error::NonFinite { what: "time step" });
    }
    let p = green_pressure(curve)?;
    let flux = p.flux();
    if dt == 0.0 {
        return Ok((curve.clone(), flux));
    }
    let m = curve.markers();
    let n = m.len();
    let v1: Vec<Complex> = (0..n)
        .map(|j| curve.outward_normal(j) * (-rho.kappa(m[j]) * p.dpdn()[j]))
        .collect();
    let limit = CFL_FRACTION * curve.spacing();
    let displacement = dt.abs() * v1.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if displacement > limit {
        return Err(Error::CflViolation { displacement, limit });
    }
    let moved: Vec<Complex> = match stepper {
        Stepper::Euler => m.iter().zip(&v1).map(|(z, v)| z + v * dt).collect(),
        Stepper::Rk2 => {
            let predictor = MarkerCurve::new(m.iter().zip(&v1).map(|(z, v)| z + v * dt).collect())?;
            let v2 = normal_velocity(&predictor, rho)?;
            (0..n)
                .map(|j| {
                    let w = predictor.outward_normal(j) * v2[j];
                    m[j] + (v1[j] + w) * (0.5 * dt)
                })
                .collect()
        }
    };
    let next = MarkerCurve::new(moved)?.resample(n)?;
    Ok((next, flux))
}

/// Options for [`run_classical`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalParams {
    pub dt: f64,
    pub stepper: Stepper,
    /// Permit negative total time (ill-posed unless the boundary is analytic).
    pub allow_backward: bool,
    /// Highest moment index recorded.
    pub moments: usize,
    /// Grid spacing for moments when the density has no closed-form potential.
    pub moment_grid_h: f64,
}

impl ClassicalParams {
    pub fn new(dt: f64) -> Self {
        Self { dt, stepper: Stepper::Euler, allow_backward: false, moments: 4, moment_grid_h: 1.0 / 256.0 }
    }
}

/// One frame of a classical run.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalFrame {
    pub t: f64,
    pub curve: MarkerCurve,
    /// Flux of the pressure solved on this frame's curve.
    pub flux: f64,
}

/// Frames and moment series of a classical run.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalRun {
    pub frames: Vec<ClassicalFrame>,
    pub moments: MomentSeries,
}

/// Runs the flow from `omega0` for total time `t_end`, emitting one frame per
/// step including the initial one. The final step is shortened to land on
/// `t_end`.
pub fn run_classical(
    omega0: &MarkerCurve,
    rho: &DensityField,
    t_end: f64,
    params: &ClassicalParams,
) -> Result<ClassicalRun> {
    if !t_end.is_finite() || !(params.dt > 0.0) {
        return Err(Error::InvalidParameter("total time must be finite and dt positive"));
    }
    if t_end < 0.0 && !params.allow_backward {
        return Err(Error::BackwardTime);
    }
    let steps = ((t_end.abs() / params.dt) - 1e-9).ceil().max(0.0) as usize;
    let sign = t_end.signum();
    let mut frames = Vec::with_capacity(steps + 1);
    let mut curve = omega0.clone();
    let mut t = 0.0;
    for s in 0..steps {
        let remaining = t_end.abs() - s as f64 * params.dt;
        let dt = params.dt.min(remaining) * sign;
        let (next, flux) = step(&curve, rho, dt, params.stepper)?;
        frames.push(ClassicalFrame { t, curve, flux });
        curve = next;
        t = if s + 1 == steps { t_end } else { t + dt };
    }
    let flux = green_pressure(&curve)?.flux();
    frames.push(ClassicalFrame { t, curve, flux });

    let mut order: Vec<usize> = (0..frames.len()).collect();
    if sign < 0.0 {
        order.reverse();
    }
    let mut series = MomentSeries::new();
    for i in order {
        let f = &frames[i];
        let m = match closed_form_dz(&f.curve, rho) {
            Some(g) => moments_boundary(&f.curve, &g, params.moments)?,
            None => moments_grid(&f.curve, rho, params.moments, params.moment_grid_h)?,
        };
        series.push(f.t, m)?;
    }
    Ok(ClassicalRun { frames, moments: series })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_disc_has_uniform_flux() {
        let c = MarkerCurve::circle(Complex::new(0.0, 0.0), 1.0, 256).unwrap();
        let p = green_pressure(&c).unwrap();
        for d in p.dpdn() {
            assert!((d + 1.0 / (2.0 * PI)).abs() < 1e-3);
        }
        assert!((p.flux() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn interior_pressure_matches_log() {
        let c = MarkerCurve::circle(Complex::new(0.0, 0.0), 1.0, 128).unwrap();
        let p = green_pressure(&c).unwrap();
        let z = Complex::new(0.3, 0.2);
        assert!((p.eval(z).unwrap() + z.norm().ln() / (2.0 * PI)).abs() < 1e-8);
    }

    #[test]
    fn backward_step_is_rejected_by_advance() {
        let c = MarkerCurve::circle(Complex::new(0.0, 0.0), 1.0, 64).unwrap();
        let rho = DensityField::constant(1.0).unwrap();
        assert!(matches!(advance(&c, &rho, -1e-3), Err(Error::BackwardTime)));
    }
}
