//! Cauchy transforms, Plemelj splitting, Laurent tails and Schwarz functions.
//!
//! Convention: `C[g](z) = (1/2πi)∮ g(ζ)/(ζ − z) dζ`, so that interior and
//! exterior boundary values satisfy `f₊ = g + f₋`.

use core::f64::consts::PI;

use crate::prelude::*;
use crate::rules::GaussLegendre;
use crate::{Complex, Error, MarkerCurve, Result};

/// Minimum distance from the curve, in marker spacings, for Cauchy sums.
pub const PROXIMITY_SPACINGS: f64 = 5.0;

/// Laurent terms kept in a [`SchwarzData`] tail.
pub const SCHWARZ_TAIL_TERMS: usize = 20;

const I: Complex = Complex { re: 0.0, im: 1.0 };

/// Complex samples of a function on a marker curve.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction {
    curve: MarkerCurve,
    values: Vec<Complex>,
}

impl BoundaryFunction {
    pub fn new(curve: MarkerCurve, values: Vec<Complex>) -> Result<Self> {
        if values.len() != curve.len() {
            return Err(Error::LengthMismatch { expected: curve.len(), got: values.len() });
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite { what: "boundary values" });
        }
        Ok(Self { curve, values })
    }

    pub fn from_fn<F: FnMut(Complex) -> Complex>(curve: MarkerCurve, mut f: F) -> Result<Self> {
        let values = curve.markers().iter().map(|z| f(*z)).collect();
        Self::new(curve, values)
    }

    pub fn curve(&self) -> &MarkerCurve {
        &self.curve
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Cauchy sum without the proximity guard.
    pub(crate) fn cauchy_sum(&self, z: Complex) -> Complex {
        let m = self.curve.markers();
        let d = self.curve.derivative();
        let s: Complex = (0..m.len()).map(|j| self.values[j] * d[j] / (m[j] - z)).sum();
        s * (self.curve.dtheta() / (2.0 * PI)) / I
    }

    fn guard(&self, z: Complex) -> Result<()> {
        let min = PROXIMITY_SPACINGS * self.curve.spacing();
        let distance = self.curve.distance_to(z);
        if distance < min {
            return Err(Error::TooClose { distance, min });
        }
        Ok(())
    }
}

/// `C[g](z)` by trapezoid quadrature; `f₊` inside the curve, `f₋` outside.
pub fn cauchy_eval(bf: &BoundaryFunction, z: Complex) -> Result<Complex> {
    bf.guard(z)?;
    Ok(bf.cauchy_sum(z))
}

/// `max_m |C(m − δn) − g(m) − C(m + δn)|` over markers, for offset `δ`.
pub fn plemelj_residual(bf: &BoundaryFunction, offset: f64) -> Result<f64> {
    let curve = bf.curve();
    let (min, max) = (2.0 * curve.spacing(), 0.1 * curve.diameter());
    if !(offset >= min && offset <= max) {
        return Err(Error::OutOfRange { what: "offset", value: offset, min, max });
    }
    let mut worst = 0.0f64;
    for (j, m) in curve.markers().iter().enumerate() {
        let n = curve.outward_normal(j);
        let inner = bf.cauchy_sum(m - n * offset);
        let outer = bf.cauchy_sum(m + n * offset);
        worst = worst.max((inner - bf.values[j] - outer).norm());
    }
    Ok(worst)
}

/// Coefficients `b_1..b_K` of `f₋(z) = Σ b_k z^{−k}` near infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentTail {
    coeffs: Vec<Complex>,
}

impl LaurentTail {
    pub fn new(coeffs: Vec<Complex>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("Laurent tail needs K >= 1"));
        }
        Ok(Self { coeffs })
    }

    /// `b_1..b_K` in order.
    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `b_k` for `1 ≤ k ≤ K`.
    pub fn b(&self, k: usize) -> Complex {
        self.coeffs[k - 1]
    }

    /// Truncated series `Σ b_k z^{−k}`.
    pub fn eval(&self, z: Complex) -> Complex {
        let w = z.inv();
        let mut p = w;
        let mut s = Complex::new(0.0, 0.0);
        for b in &self.coeffs {
            s += b * p;
            p *= w;
        }
        s
    }
}

/// `b_k = −(1/2πi)∮ g(ζ) ζ^{k−1} dζ` for `k = 1..K`.
pub fn laurent_tail(bf: &BoundaryFunction, k_max: usize) -> Result<LaurentTail> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("Laurent tail needs K >= 1"));
    }
    let m = bf.curve.markers();
    let d = bf.curve.derivative();
    let scale = -bf.curve.dtheta() / (2.0 * PI) / I;
    let mut acc = alloc::vec![Complex::new(0.0, 0.0); k_max];
    for j in 0..m.len() {
        let base = bf.values[j] * d[j];
        let mut p = Complex::new(1.0, 0.0);
        for a in acc.iter_mut() {
            *a += base * p;
            p *= m[j];
        }
    }
    LaurentTail::new(acc.into_iter().map(|s| s * scale).collect())
}

/// Schwarz function `S = f₊ − a/z` built from boundary data `∂φ₀/∂z`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchwarzData {
    boundary: BoundaryFunction,
    a: Complex,
    tail: LaurentTail,
}

impl SchwarzData {
    /// Reassembles stored data; the tail is kept as given.
    pub fn from_parts(curve: MarkerCurve, g: Vec<Complex>, a: Complex, tail: LaurentTail) -> Result<Self> {
        let boundary = BoundaryFunction::new(curve, g)?;
        Ok(Self { boundary, a, tail })
    }

    pub fn curve(&self) -> &MarkerCurve {
        self.boundary.curve()
    }

    pub fn boundary(&self) -> &BoundaryFunction {
        &self.boundary
    }

    /// `a = b_1`; the principal part of `S` at the origin is `−a/z`.
    pub fn a(&self) -> Complex {
        self.a
    }

    /// Residue of `S` at the origin, `−a`.
    pub fn residue(&self) -> Complex {
        -self.a
    }

    pub fn tail(&self) -> &LaurentTail {
        &self.tail
    }

    /// `S(z)` for interior `z ≠ 0` at least five spacings from the curve.
    pub fn eval(&self, z: Complex) -> Result<Complex> {
        if !self.curve().point_in_domain(z)? {
            return Err(Error::WrongSide { expected: "inside" });
        }
        if z.norm() == 0.0 {
            return Err(Error::InvalidParameter("S has a pole at the origin"));
        }
        Ok(cauchy_eval(&self.boundary, z)? - self.a / z)
    }

    /// `S(z)` without the proximity guard or side check.
    pub(crate) fn eval_unguarded(&self, z: Complex) -> Complex {
        self.boundary.cauchy_sum(z) - self.a / z
    }
}

/// Builds the Schwarz data for boundary values `∂φ₀/∂z` on `curve`.
pub fn schwarz_construct(curve: MarkerCurve, phi0_dz: Vec<Complex>) -> Result<SchwarzData> {
    if curve.distance_to(Complex::new(0.0, 0.0)) <= 1e-12 || !curve.point_in_domain(Complex::new(0.0, 0.0))? {
        return Err(Error::OriginNotInside);
    }
    let boundary = BoundaryFunction::new(curve, phi0_dz)?;
    let tail = laurent_tail(&boundary, SCHWARZ_TAIL_TERMS)?;
    let a = tail.b(1);
    Ok(SchwarzData { boundary, a, tail })
}

/// Exterior extension `φ = φ₀ + 2 Re F`, with `F' = f₋ − a/z` and `F(∞) = 0`,
/// so that `∂φ/∂z = S` on the boundary.
pub fn phi_extension<P: Fn(Complex) -> f64>(sd: &SchwarzData, phi0: P, z: Complex) -> Result<f64> {
    let curve = sd.curve();
    if curve.point_in_domain(z)? {
        return Err(Error::WrongSide { expected: "outside" });
    }
    sd.boundary.guard(z)?;
    let r_omega = curve.circumradius();
    let f = if z.norm() >= 2.0 * r_omega {
        primitive_series(sd, z)?
    } else {
        let start = z * (2.0 * r_omega / z.norm());
        let mut f = primitive_series(sd, start)?;
        let length = (start - z).norm();
        let rule = GaussLegendre::new(32);
        let panels = (length.ceil() as usize).max(1);
        let min = PROXIMITY_SPACINGS * curve.spacing();
        for p in 0..panels {
            let s0 = p as f64 / panels as f64;
            let s1 = (p + 1) as f64 / panels as f64;
            for (s, w) in rule.mapped(s0, s1) {
                let zeta = start + (z - start) * s;
                let distance = curve.distance_to(zeta);
                if distance < min {
                    return Err(Error::TooClose { distance, min });
                }
                let ftilde = sd.boundary.cauchy_sum(zeta) - sd.a / zeta;
                f += ftilde * (z - start) * w;
            }
        }
        f
    };
    Ok(phi0(z) + 2.0 * f.re)
}

fn primitive_series(sd: &SchwarzData, z: Complex) -> Result<Complex> {
    let r_omega = sd.curve().circumradius();
    let ratio = (r_omega / z.norm()).max(1e-3);
    // Terms until (R/|z|)^k drops below 1e-17 relative.
    let terms = ((-17.0 * 10f64.ln()) / ratio.ln()).ceil().clamp(2.0, 200.0) as usize + 1;
    let tail = laurent_tail(&sd.boundary, terms)?;
    let w = z.inv();
    let mut p = w;
    let mut f = Complex::new(0.0, 0.0);
    for k in 2..=terms {
        f -= tail.b(k) * p / (k - 1) as f64;
        p *= w;
    }
    Ok(f)
}
