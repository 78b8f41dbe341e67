//! Weak Hele-Shaw flow as an obstacle problem, solved by projected SOR.
//!
//! For injected mass `t` the weak solution `u ≥ 0` satisfies
//! `−Δu − f̃ ≥ 0`, `(−Δu − f̃)·u = 0` away from the origin, with
//! `f̃ = ρ(χ_{Ω₀} − 1)` and a point source of mass `t` at the origin. The
//! source is removed by writing `u = w + t·G`, `G = −(2/π)log|z|`
//! (`−ΔG = δ`), so `w` solves an obstacle problem with obstacle `ψ = −t·G`
//! and bounded right-hand side.

use core::f64::consts::PI;

use crate::prelude::*;
use crate::contour::marching_squares;
use crate::curve::resample_points;
use crate::moments::{closed_form_dz, moments_boundary, moments_grid_on};
use crate::{Complex, DensityField, Error, MarkerCurve, MomentSeries, Result, SchwarzData, ScalarGrid, LATTICE_GREEN_CONSTANT};

/// Markers on an extracted free boundary.
pub const BOUNDARY_MARKERS: usize = 256;
pub const DEFAULT_OMEGA: f64 = 1.8;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 200_000;

/// Free-space Green's function `G(z) = −(2/π)log|z|`; at the origin node the
/// lattice-consistent finite value `−(2/π)log h + λ`.
pub fn green(z: Complex, h: f64) -> f64 {
    let r = z.norm();
    if r <= 1e-9 * h {
        -2.0 / PI * h.ln() + LATTICE_GREEN_CONSTANT
    } else {
        -2.0 / PI * r.ln()
    }
}

/// Discrete obstacle problem for the split variable `w = u − t·G`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleProblem {
    source: ScalarGrid,
    density: ScalarGrid,
    mass: f64,
    green: Vec<f64>,
    obstacle: Vec<f64>,
    edge: Vec<f64>,
}

impl ObstacleProblem {
    /// Problem with source `f̃` (its grid fixes the geometry), nodal density
    /// `ρ` and injected mass `t`. Obstacle and edge values are `−t·G`.
    pub fn new(source: ScalarGrid, density: ScalarGrid, mass: f64) -> Result<Self> {
        if !source.same_layout(&density) {
            return Err(Error::GridMismatch);
        }
        if !(mass >= 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter("injected mass must be non-negative"));
        }
        if density.values.iter().any(|&r| !(r > 0.0)) {
            return Err(Error::InvalidParameter("density must be positive"));
        }
        let (lo, hi) = (source.origin, source.far_corner());
        if !(lo.re < 0.0 && lo.im < 0.0 && hi.re > 0.0 && hi.im > 0.0) {
            return Err(Error::OriginNotInside);
        }
        let h = source.h;
        let mut greens = Vec::with_capacity(source.values.len());
        let mut obstacle = Vec::with_capacity(source.values.len());
        for j in 0..source.ny {
            for i in 0..source.nx {
                let z = source.node(i, j);
                let g = green(z, h);
                greens.push(g);
                let at_origin = z.norm() <= 1e-9 * h;
                obstacle.push(if at_origin && mass > 0.0 { f64::NEG_INFINITY } else { -(mass * g) });
            }
        }
        let edge = greens.iter().map(|g| -(mass * g)).collect();
        Ok(Self { source, density, mass, green: greens, obstacle, edge })
    }

    /// Replaces the obstacle by a constant (for example `−1e6` to remove
    /// the constraint).
    pub fn with_constant_obstacle(mut self, level: f64) -> Self {
        self.obstacle.iter_mut().for_each(|p| *p = level);
        self
    }

    /// Replaces the edge values of `w` (all nodes given; only edge nodes are
    /// used).
    pub fn with_edge_values(mut self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.edge.len() {
            return Err(Error::LengthMismatch { expected: self.edge.len(), got: values.len() });
        }
        self.edge = values;
        Ok(self)
    }

    pub fn grid(&self) -> &ScalarGrid {
        &self.source
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn obstacle(&self) -> &[f64] {
        &self.obstacle
    }

    /// Feasible cold start: the obstacle, with edge values imposed.
    pub fn initial_guess(&self) -> Vec<f64> {
        let g = &self.source;
        let mut w: Vec<f64> = self
            .obstacle
            .iter()
            .map(|&p| if p.is_finite() { p } else { 0.0 })
            .collect();
        for j in 0..g.ny {
            for i in 0..g.nx {
                if i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1 {
                    w[j * g.nx + i] = self.edge[j * g.nx + i];
                }
            }
        }
        w
    }

    /// Warm start from a solution at a smaller mass: `w = u_prev − t·G`,
    /// projected onto the constraint.
    pub fn warm_start(&self, previous: &WeakSolution) -> Result<Vec<f64>> {
        if !previous.u.same_layout(&self.source) {
            return Err(Error::GridMismatch);
        }
        let mut w = self.initial_guess();
        let g = &self.source;
        for j in 1..g.ny - 1 {
            for i in 1..g.nx - 1 {
                let k = j * g.nx + i;
                let v = previous.u.values[k] - self.mass * self.green[k];
                w[k] = v.max(self.obstacle[k]);
            }
        }
        Ok(w)
    }
}

/// Red-black projected SOR iteration on a problem.
pub struct Psor<'a> {
    problem: &'a ObstacleProblem,
    w: Vec<f64>,
    rhs: Vec<f64>,
}

impl<'a> Psor<'a> {
    pub fn new(problem: &'a ObstacleProblem, w0: Vec<f64>) -> Result<Self> {
        let g = &problem.source;
        if w0.len() != g.values.len() {
            return Err(Error::LengthMismatch { expected: g.values.len(), got: w0.len() });
        }
        let h2 = g.h * g.h;
        let rhs = g.values.iter().map(|f| 4.0 * h2 * f).collect();
        Ok(Self { problem, w: w0, rhs })
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    /// One red sweep followed by one black sweep; returns the largest update.
    pub fn sweep(&mut self, omega: f64) -> f64 {
        let g = &self.problem.source;
        let (nx, ny) = (g.nx, g.ny);
        let psi = &self.problem.obstacle;
        let mut max_update = 0.0f64;
        for color in 0..2 {
            for j in 1..ny - 1 {
                let start = 1 + (j + 1 + color) % 2;
                let row = j * nx;
                let mut k = row + start;
                while k < row + nx - 1 {
                    let w = &mut self.w;
                    let gs = 0.25 * (w[k - 1] + w[k + 1] + w[k - nx] + w[k + nx] + self.rhs[k]);
                    let old = w[k];
                    let new = (old + omega * (gs - old)).max(psi[k]);
                    max_update = max_update.max((new - old).abs());
                    w[k] = new;
                    k += 2;
                }
            }
        }
        max_update
    }
}

/// Converged obstacle-problem solution for one injected mass.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakSolution {
    /// `u = w + t·G`, with the lattice value of `G` at the origin node.
    pub u: ScalarGrid,
    /// Split variable `w`.
    pub w: ScalarGrid,
    /// Nodes where the constraint is active (`u = 0`).
    pub coincidence: Vec<bool>,
    /// Discrete fluid fraction `θ = χ_{Ω₀} + Δ_h u/ρ` of each cell: 1 in the
    /// positivity set, partial in cells crossed by the free boundary.
    pub occupancy: ScalarGrid,
    /// Counterclockwise boundary of `{θ ≥ 1/2}` around the origin.
    pub boundary: Option<MarkerCurve>,
    pub mass: f64,
    pub iterations: usize,
    pub last_update: f64,
    obstacle: Vec<f64>,
    source: Vec<f64>,
}

impl WeakSolution {
    /// `max |min(w − ψ, −Δ_h w − f̃)|` over interior nodes with a finite
    /// obstacle.
    pub fn complementarity_residual(&self) -> f64 {
        let g = &self.w;
        let mut worst = 0.0f64;
        for j in 1..g.ny - 1 {
            for i in 1..g.nx - 1 {
                let k = g.index(i, j);
                if !self.obstacle[k].is_finite() {
                    continue;
                }
                let r = (g.values[k] - self.obstacle[k]).min(-g.laplacian(i, j) - self.source[k]);
                worst = worst.max(r.abs());
            }
        }
        worst
    }

    /// Grid indicator of `Ω_t = {θ ≥ 1/2}`.
    pub fn indicator(&self) -> Vec<bool> {
        self.occupancy.values.iter().map(|&v| v >= 0.5).collect()
    }

    /// `Σ (θ − χ_{Ω₀})·ρ·h²`, which should equal the injected mass.
    pub fn injected_mass(&self, chi0: &[f64], density: &ScalarGrid) -> f64 {
        let h2 = self.u.h * self.u.h;
        self.occupancy
            .values
            .iter()
            .zip(chi0)
            .zip(&density.values)
            .map(|((th, c), r)| (th - c) * r * h2)
            .sum()
    }
}

/// Solves `p` from its cold start.
pub fn psor_solve(p: &ObstacleProblem, omega: f64, tol: f64, max_iter: usize) -> Result<WeakSolution> {
    psor_solve_from(p, p.initial_guess(), omega, tol, max_iter)
}

/// Solves `p` from a feasible start `w0`.
pub fn psor_solve_from(
    p: &ObstacleProblem,
    w0: Vec<f64>,
    omega: f64,
    tol: f64,
    max_iter: usize,
) -> Result<WeakSolution> {
    if !(omega > 0.0 && omega < 2.0) {
        return Err(Error::OutOfRange { what: "omega", value: omega, min: 0.0, max: 2.0 });
    }
    let g = &p.source;
    if g.nx < 64 || g.ny < 64 {
        return Err(Error::InvalidParameter("obstacle grid must be at least 64x64"));
    }
    let mut psor = Psor::new(p, w0)?;
    let mut last = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        last = psor.sweep(omega);
        iterations += 1;
        if last <= tol {
            break;
        }
    }
    if last > tol {
        return Err(Error::NonConvergence { iterations, residual: last });
    }
    finish(p, psor.w, iterations, last)
}

fn finish(p: &ObstacleProblem, w: Vec<f64>, iterations: usize, last_update: f64) -> Result<WeakSolution> {
    let g = &p.source;
    let t = p.mass;
    let coincidence: Vec<bool> = w.iter().zip(&p.obstacle).map(|(w, psi)| w <= psi).collect();
    let u_vals: Vec<f64> = w
        .iter()
        .zip(&p.green)
        .zip(&coincidence)
        .map(|((w, gr), &c)| if c { 0.0 } else { (w + t * gr).max(0.0) })
        .collect();
    let u = ScalarGrid::new(g.origin, g.h, g.nx, g.ny, u_vals)?;
    let w = ScalarGrid::new(g.origin, g.h, g.nx, g.ny, w)?;
    let occupancy = occupancy(&u, &p.source, &p.density);
    let boundary = extract_boundary(&occupancy, BOUNDARY_MARKERS).ok();
    Ok(WeakSolution {
        u,
        w,
        coincidence,
        occupancy,
        boundary,
        mass: t,
        iterations,
        last_update,
        obstacle: p.obstacle.clone(),
        source: p.source.values.clone(),
    })
}

/// `θ = 1` where `u > 0`; elsewhere `θ = 1 + (f̃ + Δ_h u)/ρ`, which equals
/// `χ_{Ω₀} + Δ_h u/ρ`.
fn occupancy(u: &ScalarGrid, source: &ScalarGrid, density: &ScalarGrid) -> ScalarGrid {
    let mut th = u.clone();
    for j in 0..u.ny {
        for i in 0..u.nx {
            let k = u.index(i, j);
            if u.values[k] > 0.0 {
                th.values[k] = 1.0;
                continue;
            }
            let interior = i > 0 && j > 0 && i + 1 < u.nx && j + 1 < u.ny;
            let lap = if interior { u.laplacian(i, j) } else { 0.0 };
            th.values[k] = 1.0 + (source.values[k] + lap) / density.values[k];
        }
    }
    th
}

/// Reshapes fill fractions so that linear interpolation of the level 1/2
/// puts a grid-aligned front at the position implied by the partial cell's
/// fill: `2θ/(1 + 2θ)` below 1/2 and `1/(3 − 2θ)` above.
fn front_profile(theta: f64) -> f64 {
    let t = theta.clamp(0.0, 1.0);
    if t < 0.5 {
        2.0 * t / (1.0 + 2.0 * t)
    } else {
        1.0 / (3.0 - 2.0 * t)
    }
}

/// Boundary of `{θ ≥ 1/2}`: the closed level-set loop of largest area
/// enclosing the origin, resampled to `n` arclength-equispaced markers.
pub fn extract_boundary(occupancy: &ScalarGrid, n: usize) -> Result<MarkerCurve> {
    let loops = marching_squares(&occupancy.map_values(front_profile), 0.5);
    let origin = Complex::new(0.0, 0.0);
    let best = loops
        .into_iter()
        .filter(|l| l.closed && l.points.len() >= 4 && l.signed_area() > 0.0)
        .filter(|l| crate::curve::polygon_winding(&l.points, origin) == 1)
        .max_by(|a, b| a.signed_area().total_cmp(&b.signed_area()))
        .ok_or(Error::Extraction("no closed level set around the origin"))?;
    let mut pts: Vec<Complex> = Vec::with_capacity(best.points.len());
    let tiny = 1e-9 * occupancy.h;
    for p in best.points {
        if pts.last().is_none_or(|q: &Complex| (p - q).norm() > tiny) {
            pts.push(p);
        }
    }
    while pts.len() > 1 && (pts[0] - pts[pts.len() - 1]).norm() <= tiny {
        pts.pop();
    }
    if pts.len() < 4 {
        return Err(Error::Extraction("level set too small"));
    }
    MarkerCurve::new(resample_points(&pts, n)?)
}

/// Parameters of a weak-flow run.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakFlowParams {
    pub h: f64,
    /// Half-width of the square computational box centered at the origin.
    pub half_width: f64,
    pub omega: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Highest moment index recorded.
    pub moments: usize,
}

impl WeakFlowParams {
    pub fn new(h: f64, half_width: f64) -> Self {
        Self {
            h,
            half_width,
            omega: DEFAULT_OMEGA,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            moments: 4,
        }
    }
}

/// One frame of a weak-flow run.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakFrame {
    pub t: f64,
    pub solution: WeakSolution,
    /// `∫(χ_{Ω_t} − χ_{Ω₀})ρ dA` from the occupancy field.
    pub mass: f64,
    /// Lebesgue area of the extracted boundary (0 when there is none).
    pub area: f64,
}

/// Frames of a weak-flow run plus their moment series.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakFlow {
    pub frames: Vec<WeakFrame>,
    pub moments: MomentSeries,
    /// Cell coverage fractions of `Ω₀`.
    pub chi0: Vec<f64>,
    pub density: ScalarGrid,
}

/// Runs the weak flow from `omega0` (`None` for the empty start) through the
/// increasing masses `t_list`.
pub fn weak_flow(
    omega0: Option<&MarkerCurve>,
    rho: &DensityField,
    t_list: &[f64],
    params: &WeakFlowParams,
) -> Result<WeakFlow> {
    if t_list.is_empty() {
        return Err(Error::InvalidParameter("time list is empty"));
    }
    if t_list[0] < 0.0 || t_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("times must be non-negative and increasing"));
    }
    let grid = ScalarGrid::centered(params.half_width, params.h)?;
    let density = grid.from_fn(|z| rho.eval(z));
    let chi0 = match omega0 {
        Some(c) => grid.coverage(c)?,
        None => alloc::vec![0.0; grid.values.len()],
    };
    check_margin(&grid, |k| chi0[k] > 0.0)?;
    let mut source = grid.clone();
    for (k, s) in source.values.iter_mut().enumerate() {
        *s = density.values[k] * (chi0[k] - 1.0);
    }

    let mut frames: Vec<WeakFrame> = Vec::with_capacity(t_list.len());
    let mut series = MomentSeries::new();
    for &t in t_list {
        let problem = ObstacleProblem::new(source.clone(), density.clone(), t)?;
        let w0 = match frames.last() {
            Some(prev) => problem.warm_start(&prev.solution)?,
            None => problem.initial_guess(),
        };
        let mut sol = psor_solve_from(&problem, w0, params.omega, params.tol, params.max_iter)?;
        check_margin(&grid, |k| sol.occupancy.values[k] > 1e-12)?;
        if t == 0.0 {
            if let Some(c) = omega0 {
                sol.boundary = Some(c.resample(BOUNDARY_MARKERS)?);
            }
        }
        let mass = sol.injected_mass(&chi0, &density);
        let area = sol.boundary.as_ref().map_or(0.0, |b| b.signed_area());
        let moments = match (&sol.boundary, t == 0.0, omega0) {
            (_, true, Some(c)) => frame_moments(c, rho, params.moments, &grid)?,
            (Some(b), _, _) => frame_moments(b, rho, params.moments, &grid)?,
            (None, _, _) => alloc::vec![Complex::new(0.0, 0.0); params.moments + 1],
        };
        series.push(t, moments)?;
        frames.push(WeakFrame { t, solution: sol, mass, area });
    }
    Ok(WeakFlow { frames, moments: series, chi0, density })
}

fn frame_moments(curve: &MarkerCurve, rho: &DensityField, k: usize, grid: &ScalarGrid) -> Result<Vec<Complex>> {
    match closed_form_dz(curve, rho) {
        Some(g) => moments_boundary(curve, &g, k),
        None => moments_grid_on(curve, rho, k, grid),
    }
}

fn check_margin<F: Fn(usize) -> bool>(grid: &ScalarGrid, occupied: F) -> Result<()> {
    const MARGIN: usize = 10;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let near = i < MARGIN || j < MARGIN || i + MARGIN >= grid.nx || j + MARGIN >= grid.ny;
            if near && occupied(grid.index(i, j)) {
                return Err(Error::BoxTooSmall("free boundary within 10 nodes of the box edge"));
            }
        }
    }
    Ok(())
}

/// Samples of the weak Schwarz function on grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakSchwarz {
    layout: ScalarGrid,
    values: Vec<Option<Complex>>,
}

impl WeakSchwarz {
    pub fn get(&self, i: usize, j: usize) -> Option<Complex> {
        self.values[self.layout.index(i, j)]
    }

    /// `(z, S_t(z))` at every sampled node.
    pub fn samples(&self) -> Vec<(Complex, Complex)> {
        let g = &self.layout;
        let mut out = Vec::new();
        for j in 0..g.ny {
            for i in 0..g.nx {
                if let Some(s) = self.get(i, j) {
                    out.push((g.node(i, j), s));
                }
            }
        }
        out
    }

    /// Largest centered-difference `|∂S/∂z̄|` over sampled nodes whose four
    /// neighbours are sampled, skipping nodes where `exclude` holds.
    pub fn dbar_residual<F: Fn(Complex) -> bool>(&self, exclude: F) -> f64 {
        let g = &self.layout;
        let mut worst = 0.0f64;
        for j in 1..g.ny - 1 {
            for i in 1..g.nx - 1 {
                let z = g.node(i, j);
                if exclude(z) {
                    continue;
                }
                let (Some(_), Some(e), Some(w), Some(n), Some(s)) =
                    (self.get(i, j), self.get(i + 1, j), self.get(i - 1, j), self.get(i, j + 1), self.get(i, j - 1))
                else {
                    continue;
                };
                let dx = (e - w) / (2.0 * g.h);
                let dy = (n - s) / (2.0 * g.h);
                worst = worst.max(((dx + dy * Complex::new(0.0, 1.0)) * 0.5).norm());
            }
        }
        worst
    }
}

/// `S_t = ∂φ/∂z − ∂u/∂z − χ_{Ω₀}(∂φ/∂z − S₀)` at nodes of `Ω_t` whose four
/// neighbours are also in `Ω_t`. `∂u/∂z` combines centered differences of `w`
/// with the exact derivative of `t·G`; the origin node is skipped.
pub fn weak_schwarz(ws: &WeakSolution, phi: &ScalarGrid, s0: &SchwarzData, omega0: &MarkerCurve) -> Result<WeakSchwarz> {
    if !phi.same_layout(&ws.u) {
        return Err(Error::GridMismatch);
    }
    let g = &ws.u;
    let t = ws.mass;
    let inside = ws.indicator();
    let mut values = alloc::vec![None; g.values.len()];
    for j in 1..g.ny - 1 {
        for i in 1..g.nx - 1 {
            let k = g.index(i, j);
            if !(inside[k] && inside[k + 1] && inside[k - 1] && inside[k + g.nx] && inside[k - g.nx]) {
                continue;
            }
            let z = g.node(i, j);
            if z.norm() < 0.5 * g.h {
                continue;
            }
            let du = ws.w.dz(i, j) - z.inv() * (t / PI);
            let Ok(inside0) = omega0.point_in_domain(z) else { continue };
            let s = if inside0 { s0.eval_unguarded(z) - du } else { phi.dz(i, j) - du };
            values[k] = Some(s);
        }
    }
    Ok(WeakSchwarz { layout: g.clone(), values })
}
