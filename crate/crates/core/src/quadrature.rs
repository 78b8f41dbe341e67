//! Quadrature domains: `∫_Ω f dA = Σ_k Σ_j c_kj f⁽ʲ⁾(a_k)` for holomorphic `f`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::moments::moments_boundary;
use crate::{Complex, Error, MarkerCurve, Result, SchwarzData};

/// Nodes `a_k` with coefficients `c_k0..c_k(n_k−1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureData {
    nodes: Vec<Complex>,
    coeffs: Vec<Vec<Complex>>,
}

impl QuadratureData {
    pub fn new(nodes: Vec<Complex>, coeffs: Vec<Vec<Complex>>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidParameter("quadrature data needs at least one node"));
        }
        if nodes.len() != coeffs.len() {
            return Err(Error::LengthMismatch { expected: nodes.len(), got: coeffs.len() });
        }
        for (k, a) in nodes.iter().enumerate() {
            if nodes[..k].iter().any(|b| (a - b).norm() <= 1e-14 * (1.0 + a.norm())) {
                return Err(Error::InvalidParameter("quadrature nodes must be distinct"));
            }
        }
        if coeffs.iter().any(|c| c.last().is_none_or(|l| *l == Complex::new(0.0, 0.0))) {
            return Err(Error::InvalidParameter("leading quadrature coefficient must be nonzero"));
        }
        let area: Complex = coeffs.iter().map(|c| c[0]).sum();
        if area.im.abs() > 1e-9 * area.norm() {
            return Err(Error::InvalidParameter("sum of zeroth-order coefficients must be real"));
        }
        Ok(Self { nodes, coeffs })
    }

    pub fn nodes(&self) -> &[Complex] {
        &self.nodes
    }

    pub fn coeffs(&self) -> &[Vec<Complex>] {
        &self.coeffs
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.coeffs.iter().map(Vec::len).collect()
    }

    /// Total multiplicity.
    pub fn order(&self) -> usize {
        self.coeffs.iter().map(Vec::len).sum()
    }

    /// `Σ c_kj f⁽ʲ⁾(a_k)` for `f = z^m`.
    pub fn apply_monomial(&self, m: usize) -> Complex {
        let mut s = Complex::new(0.0, 0.0);
        for (a, cs) in self.nodes.iter().zip(&self.coeffs) {
            for (j, c) in cs.iter().enumerate() {
                if j > m {
                    break;
                }
                let falling: f64 = ((m - j + 1)..=m).map(|v| v as f64).product();
                s += c * falling * a.powu((m - j) as u32);
            }
        }
        s
    }
}

/// Largest residual of the quadrature identity over `f = z^j`, `j = 0..=K`,
/// with the area integrals computed as `−(i/2)∮ z^j z̄ dz`.
pub fn quad_check(curve: &MarkerCurve, qd: &QuadratureData, k_max: usize) -> Result<f64> {
    for (index, a) in qd.nodes.iter().enumerate() {
        if !curve.point_in_domain(*a)? {
            return Err(Error::NodeOutside { index });
        }
    }
    let conj: Vec<Complex> = curve.markers().iter().map(|z| z.conj()).collect();
    let integrals = moments_boundary(curve, &conj, k_max)?;
    Ok(integrals
        .iter()
        .enumerate()
        .map(|(m, i)| (i - qd.apply_monomial(m)).norm())
        .fold(0.0, f64::max))
}

/// Order-one data at the origin from a Schwarz function of `|z|²`:
/// `c₀ = π·Res₀ S`.
pub fn quad_from_schwarz(sd: &SchwarzData) -> Result<QuadratureData> {
    let residue = sd.residue();
    if residue.norm() < 1e-10 {
        return Err(Error::NotQuadratureDomain { residue: residue.norm() });
    }
    QuadratureData::new(alloc::vec![Complex::new(0.0, 0.0)], alloc::vec![alloc::vec![residue * PI]])
}

/// Image of the unit circle under `w ↦ a·w + b·w²` with `n` markers, and its
/// exact quadrature data at the origin: `c₀₀ = π(a² + 2b²)`, `c₀₁ = πa²b`.
pub fn polynomial_map_curve(a: f64, b: f64, n: usize) -> Result<(MarkerCurve, QuadratureData)> {
    if !(a > 2.0 * b.abs()) {
        return Err(Error::NotUnivalent);
    }
    let curve = MarkerCurve::from_fn(n, |th| {
        let w = Complex::from_polar(1.0, th);
        w * a + w * w * b
    })?;
    let mut c = alloc::vec![Complex::new(PI * (a * a + 2.0 * b * b), 0.0)];
    if b != 0.0 {
        c.push(Complex::new(PI * a * a * b, 0.0));
    }
    let qd = QuadratureData::new(alloc::vec![Complex::new(0.0, 0.0)], alloc::vec![c])?;
    Ok((curve, qd))
}
