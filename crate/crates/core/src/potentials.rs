//! Regularized maximum of two functions and the gluing of a potential that
//! is `|z|²` to second order onto a fixed radial potential.

use crate::prelude::*;
use crate::rules::GaussLegendre;
use crate::{Error, Result, ScalarGrid};

/// Slack factor for discrete norm comparisons.
pub const BOUND_SLACK: f64 = 1.1;

const BUMP_NODES: usize = 64;

/// Unit-mass bump `f(λ) = c·exp(−1/(1 − (λ/a)²))` supported on `(−a, a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpFunction {
    a: f64,
    scale: f64,
    rule: GaussLegendre,
}

impl BumpFunction {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter("bump half-width must be positive"));
        }
        let rule = GaussLegendre::new(BUMP_NODES);
        let raw = |l: f64| profile(l / a);
        let mass = rule.integrate_composite(-a, a, 8, raw);
        Ok(Self { a, scale: 1.0 / mass, rule })
    }

    pub fn half_width(&self) -> f64 {
        self.a
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        self.scale * profile(lambda / self.a)
    }

    /// `‖f‖_{C⁰} = f(0)`.
    pub fn sup_norm(&self) -> f64 {
        self.eval(0.0)
    }

    /// `∫ f` over `(−a, a)` by composite Gauss-Legendre.
    pub fn mass(&self) -> f64 {
        self.rule.integrate_composite(-self.a, self.a, 8, |l| self.eval(l))
    }

    /// `∫ max(α, β + λ) f(λ) dλ`.
    pub fn reg_max(&self, alpha: f64, beta: f64) -> f64 {
        let gap = alpha - beta;
        if gap >= self.a {
            return alpha;
        }
        if gap <= -self.a {
            return beta;
        }
        let below = self.rule.integrate(-self.a, gap, |l| self.eval(l));
        let (mut above, mut first) = (0.0, 0.0);
        for (l, w) in self.rule.mapped(gap, self.a) {
            let f = self.eval(l) * w;
            above += f;
            first += l * f;
        }
        alpha * below + beta * above + first
    }
}

fn profile(x: f64) -> f64 {
    let s = 1.0 - x * x;
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// Pointwise regularized maximum of two aligned grids.
pub fn reg_max(alpha: &ScalarGrid, beta: &ScalarGrid, f: &BumpFunction) -> Result<ScalarGrid> {
    if !alpha.same_layout(beta) {
        return Err(Error::GridMismatch);
    }
    let mut out = alpha.clone();
    for (o, b) in out.values.iter_mut().zip(&beta.values) {
        *o = f.reg_max(*o, *b);
    }
    Ok(out)
}

/// Discrete seminorms of a grid function on the interior: `[C⁰, C¹, C²]`,
/// with `C¹` the largest centered-difference gradient length and `C²` the
/// largest second difference (`xx`, `yy`, `xy`).
pub fn seminorms(v: &ScalarGrid) -> [f64; 3] {
    let h = v.h;
    let mut out = [0.0f64; 3];
    for j in 1..v.ny.saturating_sub(1) {
        for i in 1..v.nx.saturating_sub(1) {
            out[0] = out[0].max(v.get(i, j).abs());
            out[1] = out[1].max(gradient(v, i, j).norm());
            let c = v.get(i, j);
            let xx = (v.get(i + 1, j) - 2.0 * c + v.get(i - 1, j)) / (h * h);
            let yy = (v.get(i, j + 1) - 2.0 * c + v.get(i, j - 1)) / (h * h);
            let xy = (v.get(i + 1, j + 1) - v.get(i + 1, j - 1) - v.get(i - 1, j + 1) + v.get(i - 1, j - 1))
                / (4.0 * h * h);
            out[2] = out[2].max(xx.abs()).max(yy.abs()).max(xy.abs());
        }
    }
    out
}

fn gradient(v: &ScalarGrid, i: usize, j: usize) -> Complex {
    let h = v.h;
    Complex::new(
        (v.get(i + 1, j) - v.get(i - 1, j)) / (2.0 * h),
        (v.get(i, j + 1) - v.get(i, j - 1)) / (2.0 * h),
    )
}

/// Both sides of `‖u − α‖_{C²} ≤ a + ‖α − β‖_{C²} + ‖dα − dβ‖²_{C⁰}·‖f‖_{C⁰}`,
/// where `‖·‖_{C²}` is the largest of the three discrete seminorms.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    /// Seminorms of `u − α`.
    pub lhs: [f64; 3],
    pub rhs: f64,
    /// `lhs[k] ≤ 1.1·rhs` per order.
    pub per_order: [bool; 3],
    pub holds: bool,
}

pub fn reg_max_bound_check(alpha: &ScalarGrid, beta: &ScalarGrid, f: &BumpFunction) -> Result<BoundCheck> {
    let u = reg_max(alpha, beta, f)?;
    let mut diff = u;
    for (d, a) in diff.values.iter_mut().zip(&alpha.values) {
        *d -= a;
    }
    let lhs = seminorms(&diff);
    let mut gap = alpha.clone();
    for (g, b) in gap.values.iter_mut().zip(&beta.values) {
        *g -= b;
    }
    let g = seminorms(&gap);
    let norm = g[0].max(g[1]).max(g[2]);
    let rhs = f.half_width() + norm + g[1] * g[1] * f.sup_norm();
    let per_order = lhs.map(|l| l <= BOUND_SLACK * rhs);
    Ok(BoundCheck { lhs, rhs, per_order, holds: per_order.iter().all(|&b| b) })
}

/// Radial potential equal to `|z|²` on the unit disc and to
/// `log(1 + |z|²) + 4 − log 5` for `|z| ≥ 2`, joined by a quintic in `|z|`
/// matching value and two derivatives.
pub fn standard_psi(z: Complex) -> f64 {
    let r = z.norm();
    if r <= 1.0 {
        return z.norm_sqr();
    }
    let outer = |r: f64| (1.0 + r * r).ln() + 4.0 - 5f64.ln();
    if r >= 2.0 {
        return outer(r);
    }
    // Endpoint data: r² at 1 and log(1+r²) + const at 2.
    let (p0, d0, s0) = (1.0, 2.0, 2.0);
    let (p1, d1, s1) = (outer(2.0), 0.8, -6.0 / 25.0);
    let t = r - 1.0;
    let (t2, t3) = (t * t, t * t * t);
    let (t4, t5) = (t3 * t, t3 * t2);
    let h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h20 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h21 = 0.5 * (t3 - 2.0 * t4 + t5);
    p0 * h00 + d0 * h10 + s0 * h20 + p1 * h01 + d1 * h11 + s1 * h21
}

/// Parameters of a glued potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlueParams {
    pub eps: f64,
    /// Radius of the modification ball.
    pub big_r: f64,
    pub delta1: f64,
    pub delta2: f64,
    /// Bump half-width.
    pub a: f64,
    /// Largest radius on which the result equals `(1 − δ₁)φ + δ₂` on the grid.
    pub r: f64,
}

/// Results of the conclusions checked on a glued potential.
#[derive(Debug, Clone, PartialEq)]
pub struct GlueChecks {
    /// Equality with `(1 − δ₁)φ + δ₂` on a ball of positive radius.
    pub equal_near_origin: bool,
    /// Equality with `ψ` at sampled points with `|z| > 1`.
    pub equal_to_psi_outside: bool,
    /// `‖φ^ε − ψ‖_{C²}` on the grid (largest discrete seminorm).
    pub c2_distance: f64,
    pub c2_close: bool,
    /// Smallest five-point Laplacian over 4 on the grid interior.
    pub min_laplacian: f64,
    pub subharmonic: bool,
}

impl GlueChecks {
    pub fn all_pass(&self) -> bool {
        self.equal_near_origin && self.equal_to_psi_outside && self.c2_close && self.subharmonic
    }
}

/// A potential equal to `ψ` outside `B_R` and to the regularized maximum of
/// `ψ` and `(1 − δ₁)φ + δ₂` inside.
#[derive(Debug, Clone)]
pub struct GluedPotential<P, Q> {
    phi: P,
    psi: Q,
    bump: BumpFunction,
    pub params: GlueParams,
    pub grid: ScalarGrid,
    pub checks: GlueChecks,
}

impl<P: Fn(Complex) -> f64, Q: Fn(Complex) -> f64> GluedPotential<P, Q> {
    pub fn eval(&self, z: Complex) -> f64 {
        if z.norm() >= self.params.big_r {
            (self.psi)(z)
        } else {
            self.bump.reg_max((self.psi)(z), self.inner(z))
        }
    }

    fn inner(&self, z: Complex) -> f64 {
        (1.0 - self.params.delta1) * (self.phi)(z) + self.params.delta2
    }
}

/// Grid nodes per side of the gluing check grid on `[−1.5R, 1.5R]²`.
pub const GLUE_GRID_NODES: usize = 301;

/// Glues `φ = |z|² + g`, `g = O(|z|³)`, onto `ψ`: with `δ₁ = ε/20`,
/// `R` the largest of `0.2·0.9^k` with `‖g‖_{C²(B_R)} < ε/20` and
/// `C·R < ε/40` (`C = sup |g|/|z|³` on the unit disc), `δ₂ = δ₁R²/3` and
/// bump half-width `a = δ₂/2`.
pub fn glue_potential<P, Q>(phi: P, psi: Q, eps: f64) -> Result<GluedPotential<P, Q>>
where
    P: Fn(Complex) -> f64,
    Q: Fn(Complex) -> f64,
{
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter("eps must be positive"));
    }
    let g = |z: Complex| phi(z) - z.norm_sqr();
    let c = cubic_constant(&g);
    let delta1 = eps / 20.0;
    let big_r = (1..=400)
        .map(|k| 0.2 * 0.9f64.powi(k))
        .find(|&r| c * r < eps / 40.0 && c2_norm_on_ball(&g, r) < eps / 20.0)
        .ok_or(Error::EpsTooLarge { eps })?;
    let delta2 = delta1 * big_r * big_r / 3.0;
    let a = delta2 / 2.0;
    let bump = BumpFunction::new(a)?;
    let half = 1.5 * big_r;
    let h = 2.0 * half / (GLUE_GRID_NODES - 1) as f64;
    let empty = ScalarGrid::zeros(Complex::new(-half, -half), h, GLUE_GRID_NODES, GLUE_GRID_NODES)?;
    let params = GlueParams { eps, big_r, delta1, delta2, a, r: 0.0 };
    let placeholder = GlueChecks {
        equal_near_origin: false,
        equal_to_psi_outside: false,
        c2_distance: f64::INFINITY,
        c2_close: false,
        min_laplacian: f64::NEG_INFINITY,
        subharmonic: false,
    };
    let mut glued = GluedPotential { phi, psi, bump, params, grid: empty.clone(), checks: placeholder };
    glued.grid = empty.from_fn(|z| glued.eval(z));

    // (1) equality with the inner potential on a ball around the origin.
    let mut r = f64::INFINITY;
    let mut diff = empty.clone();
    for j in 0..empty.ny {
        for i in 0..empty.nx {
            let z = empty.node(i, j);
            let k = empty.index(i, j);
            if glued.grid.values[k] != glued.inner(z) {
                r = r.min(z.norm());
            }
            diff.values[k] = glued.grid.values[k] - (glued.psi)(z);
        }
    }
    glued.params.r = if r.is_finite() { (r - h).max(0.0) } else { half };
    let equal_near_origin = glued.params.r > 0.0;

    // (2) equality with ψ beyond the unit circle.
    let equal_to_psi_outside = [1.01, 1.5, 2.0, 3.0].iter().all(|&rad| {
        (0..64).all(|m| {
            let z = Complex::from_polar(rad, m as f64 * core::f64::consts::TAU / 64.0);
            glued.eval(z) == (glued.psi)(z)
        })
    });

    // (3) C² closeness to ψ.
    let s = seminorms(&diff);
    let c2_distance = s[0].max(s[1]).max(s[2]);

    let mut min_laplacian = f64::INFINITY;
    for j in 1..empty.ny - 1 {
        for i in 1..empty.nx - 1 {
            min_laplacian = min_laplacian.min(glued.grid.laplacian(i, j));
        }
    }
    glued.checks = GlueChecks {
        equal_near_origin,
        equal_to_psi_outside,
        c2_distance,
        c2_close: c2_distance < eps,
        min_laplacian,
        subharmonic: min_laplacian > 0.0,
    };
    Ok(glued)
}

/// `sup |g(z)|/|z|³` over a polar sample of the unit disc.
fn cubic_constant<G: Fn(Complex) -> f64>(g: &G) -> f64 {
    let mut c = 0.0f64;
    for i in 1..=64 {
        let r = i as f64 / 64.0;
        for m in 0..64 {
            let z = Complex::from_polar(r, m as f64 * core::f64::consts::TAU / 64.0);
            c = c.max(g(z).abs() / (r * r * r));
        }
    }
    c
}

/// Largest of `|g|`, `|∇g|` and the second partials of `g` over a polar
/// sample of `B_R`, by centered differences.
fn c2_norm_on_ball<G: Fn(Complex) -> f64>(g: &G, big_r: f64) -> f64 {
    let d = 1e-3 * big_r;
    let ex = Complex::new(d, 0.0);
    let ey = Complex::new(0.0, d);
    let mut norm = 0.0f64;
    let mut sample = |z: Complex| {
        let c = g(z);
        let gx = (g(z + ex) - g(z - ex)) / (2.0 * d);
        let gy = (g(z + ey) - g(z - ey)) / (2.0 * d);
        let xx = (g(z + ex) - 2.0 * c + g(z - ex)) / (d * d);
        let yy = (g(z + ey) - 2.0 * c + g(z - ey)) / (d * d);
        let xy = (g(z + ex + ey) - g(z + ex - ey) - g(z - ex + ey) + g(z - ex - ey)) / (4.0 * d * d);
        norm = [c.abs(), gx.hypot(gy), xx.abs(), yy.abs(), xy.abs()].iter().fold(norm, |m, v| m.max(*v));
    };
    sample(Complex::new(0.0, 0.0));
    for i in 1..=16 {
        let r = big_r * i as f64 / 16.0;
        for m in 0..32 {
            sample(Complex::from_polar(r, m as f64 * core::f64::consts::TAU / 32.0));
        }
    }
    norm
}
