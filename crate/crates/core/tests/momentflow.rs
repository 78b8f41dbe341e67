use std::f64::consts::PI;

use hsflow_core::momentflow::{
    g_from_field, injectivity_singular_values, moment_coeffs, moment_derivative, potential_u, NormalField,
};
use hsflow_core::moments::{closed_form_dz, moments_boundary, moments_grid};
use hsflow_core::{Complex, DensityField, Error, MarkerCurve};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn unit() -> DensityField {
    DensityField::constant(1.0).unwrap()
}

fn unit_circle(n: usize) -> MarkerCurve {
    MarkerCurve::circle(c(0.0, 0.0), 1.0, n).unwrap()
}

#[test]
fn potential_of_unit_disc() {
    let curve = unit_circle(256);
    let h = 1.0 / 128.0;
    for x in [2.0f64, 10.0] {
        let u = potential_u(&curve, &unit(), c(x, 0.0), h).unwrap();
        let exact = 2.0 * PI * x.ln();
        assert!((u - exact).abs() <= 0.01 * exact, "{x}: {u} vs {exact}");
    }
    assert!(matches!(potential_u(&curve, &unit(), c(0.5, 0.0), h), Err(Error::WrongSide { .. })));
    assert!(matches!(potential_u(&curve, &unit(), c(1.02, 0.0), h), Err(Error::TooClose { .. })));
}

#[test]
fn potential_is_harmonic_outside() {
    let curve = MarkerCurve::ellipse(c(0.0, 0.0), 1.0, 0.6, 256).unwrap();
    let h = 1.0 / 64.0;
    let d = 0.005;
    let u = |z: Complex| potential_u(&curve, &unit(), z, h).unwrap();
    for z in [c(1.6, 0.3), c(0.0, 1.5), c(-2.0, -1.0)] {
        let lap = (u(z + d) + u(z - d) + u(z + c(0.0, d)) + u(z - c(0.0, d)) - 4.0 * u(z)) / (d * d);
        assert!(lap.abs() <= 1e-4 * u(z).abs(), "{z}: {lap}");
    }
}

#[test]
fn moment_coefficients_of_discs() {
    let h = 1.0 / 128.0;
    let a = moment_coeffs(&unit_circle(256), &unit(), 5, 2.0, h).unwrap();
    assert!((a[0] - PI).norm() < 0.02);
    assert!(a[1..].iter().all(|v| v.norm() < 0.02));
    let offset = MarkerCurve::circle(c(0.3, 0.0), 1.0, 256).unwrap();
    let a = moment_coeffs(&offset, &unit(), 2, 2.0, h).unwrap();
    assert!((a[1] - 0.3 * PI).norm() < 0.02);
    assert!(matches!(moment_coeffs(&offset, &unit(), 2, 1.0, h), Err(Error::OutOfRange { .. })));
}

#[test]
fn moment_coefficients_match_grid_moments() {
    let curve = MarkerCurve::ellipse(c(0.0, 0.0), 1.0, 0.6, 256).unwrap();
    let a = moment_coeffs(&curve, &unit(), 3, 1.5, 1.0 / 128.0).unwrap();
    let m = moments_grid(&curve, &unit(), 2, 1.0 / 128.0).unwrap();
    assert!((a[2] - m[2]).norm() < 0.02);
}

#[test]
fn boundary_form_on_unit_circle() {
    let curve = unit_circle(256);
    let nf = NormalField::from_parameter(curve.clone(), |_| 1.0).unwrap();
    assert!(nf.is_outward());
    let g = g_from_field(&nf, &unit()).unwrap();
    for (j, v) in g.values().iter().enumerate() {
        let theta = j as f64 * curve.dtheta();
        assert!((v - c(0.0, -1.0) * Complex::from_polar(1.0, -theta)).norm() < 1e-10);
    }
    assert!((curve.contour_integral(g.values()).unwrap() - 2.0 * PI).norm() < 1e-9);
    let cos = NormalField::from_parameter(curve.clone(), f64::cos).unwrap();
    assert!(!cos.is_outward());
    let g = g_from_field(&cos, &unit()).unwrap();
    assert!(curve.contour_integral(g.values()).unwrap().norm() < 1e-9);
}

#[test]
fn field_validation() {
    let curve = unit_circle(64);
    assert!(matches!(NormalField::new(curve.clone(), vec![1.0; 10]), Err(Error::LengthMismatch { .. })));
    assert!(NormalField::new(curve, vec![f64::NAN; 64]).is_err());
}

#[test]
fn derivative_examples_on_unit_circle() {
    let curve = unit_circle(256);
    let d = moment_derivative(&NormalField::from_parameter(curve.clone(), |_| 0.7).unwrap(), &unit(), 4).unwrap();
    assert!((d.direct[0] - 2.0 * PI * 0.7).norm() < 1e-9);
    assert!(d.direct[1..].iter().all(|v| v.norm() < 1e-9));
    assert!(d.max_difference() < 1e-9);
    let d = moment_derivative(&NormalField::from_parameter(curve, f64::cos).unwrap(), &unit(), 4).unwrap();
    assert!(d.direct[0].norm() < 1e-9);
    assert!((d.direct[1] - PI).norm() < 1e-9);
    assert!(d.direct[2].norm() < 1e-9);
    assert!(d.max_difference() < 1e-9);
}

/// `(M_k(ε) − M_k(0))/ε` after moving every marker by `εV` along the normal.
fn finite_difference(nf: &NormalField, k_max: usize, eps: f64) -> Vec<Complex> {
    let curve = nf.curve();
    let moved: Vec<Complex> = curve
        .markers()
        .iter()
        .enumerate()
        .map(|(j, z)| z + curve.outward_normal(j) * (eps * nf.speeds()[j]))
        .collect();
    let moved = MarkerCurve::new(moved).unwrap();
    let m0 = moments_boundary(curve, &closed_form_dz(curve, &unit()).unwrap(), k_max).unwrap();
    let m1 = moments_boundary(&moved, &closed_form_dz(&moved, &unit()).unwrap(), k_max).unwrap();
    m0.iter().zip(&m1).map(|(a, b)| (b - a) / eps).collect()
}

#[test]
fn derivative_matches_perturbation_oracle() {
    let curve = MarkerCurve::ellipse(c(0.1, 0.0), 1.0, 0.6, 256).unwrap();
    let nf = NormalField::from_parameter(curve, |t| 1.0 + 0.3 * (2.0 * t).cos() - 0.2 * t.sin()).unwrap();
    let d = moment_derivative(&nf, &unit(), 6).unwrap();
    let fd = finite_difference(&nf, 6, 1e-4);
    for (k, (d, f)) in d.direct.iter().zip(&fd).enumerate() {
        assert!((d - f).norm() <= 1e-2 * (1.0 + d.norm()), "k={k}");
    }
}

#[test]
fn injectivity_rank() {
    for m in 1..=8 {
        let s = injectivity_singular_values(m, 128).unwrap();
        assert_eq!(s.len(), 2 * m + 1);
        assert!(*s.last().unwrap() >= 0.1);
    }
}

fn trig_field(curve: &MarkerCurve, coeffs: &[(f64, f64)]) -> NormalField {
    NormalField::from_parameter(curve.clone(), |t| {
        coeffs.iter().enumerate().map(|(m, (a, b))| a * (m as f64 * t).cos() + b * (m as f64 * t).sin()).sum()
    })
    .unwrap()
}

fn test_curve(ellipse: bool) -> MarkerCurve {
    if ellipse {
        MarkerCurve::ellipse(c(0.05, -0.1), 1.2, 0.7, 256).unwrap()
    } else {
        unit_circle(256)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn two_routes_agree(ellipse in any::<bool>(), coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6)) {
        let curve = test_curve(ellipse);
        let nf = trig_field(&curve, &coeffs);
        let k_max = 6;
        let d = moment_derivative(&nf, &unit(), k_max).unwrap();
        let vmax = nf.speeds().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let scale = vmax * curve.perimeter() * curve.circumradius().powi(k_max as i32).max(1.0);
        prop_assert!(d.max_difference() <= 1e-8 * scale);
        prop_assert!(d.direct[0].im.abs() <= 1e-9 * d.direct[0].norm().max(scale));
        let fd = finite_difference(&nf, k_max, 1e-4);
        for (t, f) in d.tail.iter().zip(&fd) {
            prop_assert!((t - f).norm() <= 1e-2 * (1.0 + t.norm()));
        }
    }

    #[test]
    fn derivative_is_linear(
        ellipse in any::<bool>(),
        c1 in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
        c2 in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
        s in -2.0f64..2.0, scale in 0.2f64..5.0,
    ) {
        let curve = test_curve(ellipse);
        let (f1, f2) = (trig_field(&curve, &c1), trig_field(&curve, &c2));
        let sum: Vec<f64> = f1.speeds().iter().zip(f2.speeds()).map(|(a, b)| a + s * b).collect();
        let f3 = NormalField::new(curve.clone(), sum).unwrap();
        let rho = unit();
        let (d1, d2, d3) = (
            moment_derivative(&f1, &rho, 4).unwrap(),
            moment_derivative(&f2, &rho, 4).unwrap(),
            moment_derivative(&f3, &rho, 4).unwrap(),
        );
        let dscaled = moment_derivative(&f1, &rho.scaled(scale), 4).unwrap();
        for k in 0..=4 {
            prop_assert!((d3.direct[k] - d1.direct[k] - d2.direct[k] * s).norm() <= 1e-12 * (1.0 + d3.direct[k].norm()) * 10.0);
            prop_assert!((dscaled.direct[k] - d1.direct[k] * scale).norm() <= 1e-12 * (1.0 + dscaled.direct[k].norm()) * 10.0);
            prop_assert!((dscaled.tail[k] - d1.tail[k] * scale).norm() <= 1e-12 * (1.0 + dscaled.tail[k].norm()) * 10.0);
        }
    }
}
