use std::f64::consts::PI;

use hsflow_core::cauchy::schwarz_construct;
use hsflow_core::quadrature::{polynomial_map_curve, quad_check, quad_from_schwarz, QuadratureData};
use hsflow_core::rules::GaussLegendre;
use hsflow_core::{Complex, Error, MarkerCurve};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn single(node: Complex, coeffs: Vec<Complex>) -> QuadratureData {
    QuadratureData::new(vec![node], vec![coeffs]).unwrap()
}

fn conj_data(curve: &MarkerCurve) -> Vec<Complex> {
    curve.markers().iter().map(|z| z.conj()).collect()
}

/// `∫_Ω z^m dA` for the image of the unit disc under `aw + bw²`, by
/// pulling back to the disc (`dA = |φ'(w)|² dA(w)`) and integrating with
/// Gauss-Legendre in the radius and the trapezoid rule in the angle.
fn pulled_back_monomial(a: f64, b: f64, m: usize) -> Complex {
    let rule = GaussLegendre::new(24);
    let nt = 64;
    let mut s = c(0.0, 0.0);
    for (r, wr) in rule.mapped(0.0, 1.0) {
        for k in 0..nt {
            let w = Complex::from_polar(r, 2.0 * PI * k as f64 / nt as f64);
            let z = w * a + w * w * b;
            let jac = (w * (2.0 * b) + a).norm_sqr();
            s += z.powu(m as u32) * jac * r * wr * (2.0 * PI / nt as f64);
        }
    }
    s
}

#[test]
fn offset_disc_mean_value_identity() {
    let curve = MarkerCurve::circle(c(0.2, 0.0), 0.7, 256).unwrap();
    let qd = single(c(0.2, 0.0), vec![c(PI * 0.49, 0.0)]);
    assert!(quad_check(&curve, &qd, 6).unwrap() <= 1e-8);
    let perturbed = single(c(0.2, 0.0), vec![c(PI * 0.49 + 0.05, 0.0)]);
    assert!((quad_check(&curve, &perturbed, 6).unwrap() - 0.05).abs() <= 1e-8);
}

#[test]
fn polynomial_map_examples() {
    let (disc, qd) = polynomial_map_curve(1.0, 0.0, 256).unwrap();
    assert_eq!(qd.order(), 1);
    assert!((qd.coeffs()[0][0] - PI).norm() < 1e-15);
    assert!((disc.signed_area() - PI).abs() < 1e-10);

    let (curve, qd) = polynomial_map_curve(1.0, 0.3, 256).unwrap();
    assert_eq!(qd.multiplicities(), vec![2]);
    assert!((qd.coeffs()[0][0] - 1.18 * PI).norm() < 1e-12);
    assert!((qd.coeffs()[0][1] - 0.3 * PI).norm() < 1e-12);
    assert!((curve.signed_area() - 1.18 * PI).abs() < 1e-6);
    assert!((1.18 * PI - 3.7070).abs() < 1e-4);
    assert!(quad_check(&curve, &qd, 6).unwrap() <= 1e-6);
}

#[test]
fn polynomial_map_data_matches_area_oracle() {
    let (_, qd) = polynomial_map_curve(1.0, 0.3, 256).unwrap();
    for m in 0..=6 {
        let oracle = pulled_back_monomial(1.0, 0.3, m);
        assert!((oracle - qd.apply_monomial(m)).norm() < 1e-10, "m={m}");
    }
}

#[test]
fn schwarz_residue_gives_disc_data() {
    let curve = MarkerCurve::circle(c(0.0, 0.0), 1.0, 512).unwrap();
    let qd = quad_from_schwarz(&schwarz_construct(curve.clone(), conj_data(&curve)).unwrap()).unwrap();
    assert!((qd.coeffs()[0][0] - PI).norm() < 1e-8);
    assert!(quad_check(&curve, &qd, 6).unwrap() <= 1e-8);
    for r in [0.3, 0.7, 1.2] {
        let disc = MarkerCurve::circle(c(0.0, 0.0), r, 512).unwrap();
        let qd = quad_from_schwarz(&schwarz_construct(disc.clone(), conj_data(&disc)).unwrap()).unwrap();
        assert!(qd.nodes()[0].norm() == 0.0);
        assert!((qd.coeffs()[0][0] - PI * r * r).norm() <= 1e-6);
        assert!(quad_check(&disc, &qd, 6).unwrap() <= 1e-8);
    }
}

#[test]
fn off_center_disc_through_translated_identity() {
    let center = c(0.2, 0.1);
    for r in [0.3, 0.7, 1.2] {
        let disc = MarkerCurve::circle(center, r, 512).unwrap();
        let shifted = disc.translated(-center);
        let qd = quad_from_schwarz(&schwarz_construct(shifted.clone(), conj_data(&shifted)).unwrap()).unwrap();
        assert!((qd.coeffs()[0][0] - PI * r * r).norm() <= 1e-6);
        let moved = single(center, qd.coeffs()[0].clone());
        assert!(quad_check(&disc, &moved, 6).unwrap() <= 1e-8);
    }
}

#[test]
fn vanishing_residue_is_rejected() {
    let curve = MarkerCurve::circle(c(0.0, 0.0), 1.0, 128).unwrap();
    let sd = schwarz_construct(curve.clone(), vec![c(1.0, 0.0); 128]).unwrap();
    assert!(matches!(quad_from_schwarz(&sd), Err(Error::NotQuadratureDomain { .. })));
}

#[test]
fn data_validation() {
    let one = c(1.0, 0.0);
    assert!(QuadratureData::new(vec![c(0.0, 0.0), c(0.0, 0.0)], vec![vec![one], vec![one]]).is_err());
    assert!(QuadratureData::new(vec![c(0.0, 0.0)], vec![vec![one, c(0.0, 0.0)]]).is_err());
    assert!(QuadratureData::new(vec![c(0.0, 0.0)], vec![vec![c(1.0, 1.0)]]).is_err());
    assert!(QuadratureData::new(vec![c(0.0, 0.0)], vec![]).is_err());
    let curve = MarkerCurve::circle(c(0.0, 0.0), 1.0, 128).unwrap();
    let outside = single(c(2.0, 0.0), vec![one]);
    assert!(matches!(quad_check(&curve, &outside, 2), Err(Error::NodeOutside { index: 0 })));
    assert!(matches!(polynomial_map_curve(1.0, -0.6, 64), Err(Error::NotUnivalent)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn polynomial_maps_are_quadrature_domains(a in 0.5f64..2.0, ratio in -0.45f64..0.45) {
        let b = ratio * a;
        let (curve, qd) = polynomial_map_curve(a, b, 512).unwrap();
        let c00 = qd.coeffs()[0][0].re;
        prop_assert!((curve.signed_area() - c00).abs() <= 1e-6 * c00);
        let scale = (a + b.abs()).powi(8);
        prop_assert!(quad_check(&curve, &qd, 6).unwrap() <= 1e-6 * scale.max(1.0));
    }

    #[test]
    fn identity_holds_for_holomorphic_combinations(
        a in 0.8f64..1.5, ratio in -0.4f64..0.4, coeffs in proptest::array::uniform7(-1.0f64..1.0), eps in -0.5f64..0.5,
    ) {
        let b = ratio * a;
        let (_, qd) = polynomial_map_curve(a, b, 256).unwrap();
        let mut lhs = c(0.0, 0.0);
        let mut rhs = c(0.0, 0.0);
        for (m, cm) in coeffs.iter().enumerate() {
            let w = if m == 5 { cm + eps } else { *cm };
            lhs += pulled_back_monomial(a, b, m) * w;
            rhs += qd.apply_monomial(m) * w;
        }
        prop_assert!((lhs - rhs).norm() <= 1e-6 * (1.0 + lhs.norm()));
    }
}
