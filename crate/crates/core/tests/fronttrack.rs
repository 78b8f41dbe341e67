use std::f64::consts::PI;

use hsflow_core::fronttrack::{advance, green_pressure, normal_velocity, run_classical, ClassicalParams, Stepper};
use hsflow_core::moments::richardson_drift;
use hsflow_core::{Complex, DensityField, Error, MarkerCurve};

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn unit() -> DensityField {
    DensityField::constant(1.0).unwrap()
}

fn mean_radius(curve: &MarkerCurve, center: Complex) -> f64 {
    curve.markers().iter().map(|z| (z - center).norm()).sum::<f64>() / curve.len() as f64
}

#[test]
fn centered_discs_have_uniform_normal_derivative() {
    for (r, expected) in [(1.0, -1.0 / (2.0 * PI)), (2.0, -1.0 / (4.0 * PI))] {
        let p = green_pressure(&MarkerCurve::circle(c(0.0, 0.0), r, 256).unwrap()).unwrap();
        assert!(p.dpdn().iter().all(|d| (d - expected).abs() < 1e-3));
        assert!((p.flux() - 1.0).abs() < 1e-3);
    }
}

#[test]
fn offset_disc_matches_poisson_kernel() {
    let center = c(0.3, 0.0);
    let curve = MarkerCurve::circle(center, 1.0, 256).unwrap();
    let p = green_pressure(&curve).unwrap();
    let w0 = -center;
    for j in (0..256).step_by(32) {
        let w = curve.markers()[j] - center;
        let exact = -(1.0 - w0.norm_sqr()) / (2.0 * PI * (w - w0).norm_sqr());
        assert!((p.dpdn()[j] - exact).abs() < 5e-3, "{j}");
    }
    assert!(p.dpdn().iter().all(|&d| d < 0.0));
    let z = c(0.6, 0.2);
    let wz = z - center;
    let g = -((wz - w0) / (1.0 - w0.conj() * wz)).norm().ln() / (2.0 * PI);
    assert!((p.eval(z).unwrap() - g).abs() < 1e-6);
}

#[test]
fn pressure_preconditions() {
    let outside = MarkerCurve::circle(c(2.0, 0.0), 1.0, 128).unwrap();
    assert!(matches!(green_pressure(&outside), Err(Error::OriginNotInside)));
    let close = MarkerCurve::circle(c(0.95, 0.0), 1.0, 128).unwrap();
    assert!(matches!(green_pressure(&close), Err(Error::TooClose { .. })));
}

#[test]
fn one_step_on_unit_disc() {
    let curve = MarkerCurve::circle(c(0.0, 0.0), 1.0, 256).unwrap();
    let next = advance(&curve, &unit(), 1e-3).unwrap();
    assert_eq!(next.len(), 256);
    let expected = 1.0 + 1e-3 / (2.0 * PI);
    assert!(next.markers().iter().all(|z| (z.norm() - expected).abs() < 1e-6));
}

#[test]
fn doubled_permeability_doubles_displacement() {
    let curve = MarkerCurve::ellipse(c(0.0, 0.0), 1.0, 0.7, 256).unwrap();
    let v1 = normal_velocity(&curve, &unit()).unwrap();
    let v2 = normal_velocity(&curve, &DensityField::constant(0.5).unwrap()).unwrap();
    assert!(v1.iter().zip(&v2).all(|(a, b)| (2.0 * a - b).abs() < 1e-14));
    let disc = MarkerCurve::circle(c(0.0, 0.0), 1.0, 256).unwrap();
    let d1 = mean_radius(&advance(&disc, &unit(), 1e-3).unwrap(), c(0.0, 0.0)) - 1.0;
    let d2 = mean_radius(&advance(&disc, &DensityField::constant(0.5).unwrap(), 1e-3).unwrap(), c(0.0, 0.0)) - 1.0;
    assert!((d2 / d1 - 2.0).abs() < 1e-6);
}

#[test]
fn zero_step_is_identity() {
    let curve = MarkerCurve::ellipse(c(0.1, 0.0), 1.0, 0.7, 128).unwrap();
    assert_eq!(advance(&curve, &unit(), 0.0).unwrap(), curve);
}

#[test]
fn step_size_is_capped() {
    let curve = MarkerCurve::circle(c(0.0, 0.0), 1.0, 256).unwrap();
    assert!(matches!(advance(&curve, &unit(), 1.0), Err(Error::CflViolation { .. })));
    assert!(matches!(advance(&curve, &unit(), -1e-3), Err(Error::BackwardTime)));
}

#[test]
fn disc_run_follows_radial_law() {
    let curve = MarkerCurve::circle(c(0.0, 0.0), 0.5, 256).unwrap();
    let t_end = 0.05;
    let run = run_classical(&curve, &unit(), t_end, &ClassicalParams::new(1e-3)).unwrap();
    assert_eq!(run.frames.len(), 51);
    let last = run.frames.last().unwrap();
    assert!((last.t - t_end).abs() < 1e-12);
    let r = (0.25 + t_end / PI).sqrt();
    assert!((mean_radius(&last.curve, c(0.0, 0.0)) - r).abs() <= 0.01 * r);
    let dev = last.curve.markers().iter().map(|z| (z.norm() - r).abs()).fold(0.0, f64::max);
    assert!(dev <= 3.0 * last.curve.spacing());
    assert!(run.frames.iter().all(|f| (f.flux - 1.0).abs() < 1e-3));
    let drift = richardson_drift(&run.moments).unwrap();
    assert!(drift[1..].iter().all(|&d| d <= 5e-3));
    assert!(drift[0] <= 0.01 * t_end);
    let areas: Vec<f64> = run.frames.iter().map(|f| f.curve.signed_area()).collect();
    assert!(areas.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn refinement_reduces_error() {
    let t_end = 0.1;
    let exact = (0.25 + t_end / PI).sqrt();
    let error = |n: usize, dt: f64| {
        let curve = MarkerCurve::circle(c(0.0, 0.0), 0.5, n).unwrap();
        let run = run_classical(&curve, &unit(), t_end, &ClassicalParams::new(dt)).unwrap();
        let last = &run.frames.last().unwrap().curve;
        last.markers().iter().map(|z| (z.norm() - exact).abs()).fold(0.0, f64::max)
    };
    let (coarse, fine) = (error(64, 2e-3), error(128, 1e-3));
    assert!(coarse / fine >= 1.8, "{coarse} {fine}");
}

#[test]
fn heun_stepper_runs() {
    let curve = MarkerCurve::circle(c(0.0, 0.0), 0.5, 128).unwrap();
    let mut params = ClassicalParams::new(2e-3);
    params.stepper = Stepper::Rk2;
    let run = run_classical(&curve, &unit(), 0.02, &params).unwrap();
    let r = (0.25 + 0.02 / PI).sqrt();
    assert!((mean_radius(&run.frames.last().unwrap().curve, c(0.0, 0.0)) - r).abs() < 1e-4);
}

#[test]
fn backward_runs_need_opt_in() {
    let curve = MarkerCurve::circle(c(0.0, 0.0), 0.5, 128).unwrap();
    let mut params = ClassicalParams::new(1e-3);
    assert!(matches!(run_classical(&curve, &unit(), -0.01, &params), Err(Error::BackwardTime)));
    params.allow_backward = true;
    let run = run_classical(&curve, &unit(), -0.01, &params).unwrap();
    let r = (0.25 - 0.01 / PI).sqrt();
    assert!((mean_radius(&run.frames.last().unwrap().curve, c(0.0, 0.0)) - r).abs() < 1e-4);
    assert!(run.moments.times().windows(2).all(|w| w[1] > w[0]));
}
