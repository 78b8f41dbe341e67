//! `hsflow run`: one configured experiment and its artifacts.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use hsflow_core::fronttrack::{run_classical, ClassicalParams};
use hsflow_core::moments::{closed_form_dz, moments_boundary, moments_grid, richardson_drift};
use hsflow_core::obstacle::{weak_flow, WeakFlowParams};
use hsflow_core::{Complex, DensityField, MarkerCurve, MomentSeries};
use serde::Serialize;

use crate::config::{ConfigError, ExperimentConfig, Solver};
use crate::emit::{grid_csv, moments_csv, svg_overlay, to_json, FrameJson};

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Solver(hsflow_core::Error),
    Io(PathBuf, std::io::Error),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(e) => e.fmt(f),
            Self::Solver(e) => write!(f, "solver failed: {e}"),
            Self::Io(p, e) => write!(f, "cannot write {}: {e}", p.display()),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl From<hsflow_core::Error> for RunError {
    fn from(e: hsflow_core::Error) -> Self {
        Self::Solver(e)
    }
}

/// Summary of one frame in the drift report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameSummary {
    pub t: f64,
    pub markers: usize,
    pub area: f64,
    /// `√(area/π)`.
    pub equivalent_radius: f64,
    /// Mean distance of the markers from the origin.
    pub mean_radius: f64,
    /// Injected `ρ`-mass measured on the grid (weak solver only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
}

/// Contents of `drift.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftReport {
    pub solver: &'static str,
    pub seed: u64,
    pub times: Vec<f64>,
    /// `max_t |M_k(t) − M_k(t₀)|`, with `t − t₀` removed from `M_0`; absent
    /// for single-frame runs.
    pub drift: Option<Vec<f64>>,
    pub frames: Vec<FrameSummary>,
    /// Largest complementarity residual over the weak frames.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complementarity: Option<f64>,
    /// Largest `|∮ −∂p/∂n ds − 1|` over all classical steps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_flux_error: Option<f64>,
}

/// Curves and moments shared by both solvers.
struct Frames {
    curves: Vec<(f64, Option<MarkerCurve>)>,
    masses: Vec<Option<f64>>,
    moments: MomentSeries,
}

fn summarize(t: f64, curve: Option<&MarkerCurve>, mass: Option<f64>) -> FrameSummary {
    let (markers, area, mean_radius) = curve.map_or((0, 0.0, 0.0), |c| {
        let mean = c.markers().iter().map(|z| z.norm()).sum::<f64>() / c.len() as f64;
        (c.len(), c.signed_area(), mean)
    });
    FrameSummary { t, markers, area, equivalent_radius: (area / std::f64::consts::PI).sqrt(), mean_radius, mass }
}

fn curve_moments(curve: &MarkerCurve, rho: &DensityField, k: usize, h: f64) -> hsflow_core::Result<Vec<Complex>> {
    match closed_form_dz(curve, rho) {
        Some(g) => moments_boundary(curve, &g, k),
        None => moments_grid(curve, rho, k, h),
    }
}

fn write(path: &Path, contents: &str) -> Result<(), RunError> {
    fs::write(path, contents).map_err(|e| RunError::Io(path.to_path_buf(), e))
}

/// Runs `cfg` and writes its artifacts; returns the output directory and
/// the drift report.
pub fn run(cfg: &ExperimentConfig) -> Result<(PathBuf, DriftReport), RunError> {
    let rho = cfg.density()?;
    let omega0 = cfg.initial_curve()?;
    let dir = cfg.resolved_output_dir();
    let mut report = DriftReport {
        solver: match cfg.solver {
            Solver::Weak => "weak",
            Solver::Classical => "classical",
        },
        seed: cfg.seed,
        times: cfg.times.clone(),
        drift: None,
        frames: Vec::new(),
        complementarity: None,
        max_flux_error: None,
    };
    let mut grid_file = None;
    let frames = match cfg.solver {
        Solver::Weak => {
            let mut params = WeakFlowParams::new(cfg.h, cfg.half_width);
            params.moments = cfg.moments;
            let flow = weak_flow(omega0.as_ref(), &rho, &cfg.times, &params)?;
            report.complementarity = Some(
                flow.frames.iter().map(|f| f.solution.complementarity_residual()).fold(0.0, f64::max),
            );
            if let Some(last) = flow.frames.last() {
                grid_file = Some(grid_csv(&["u", "theta"], &[&last.solution.u, &last.solution.occupancy]));
            }
            Frames {
                masses: flow.frames.iter().map(|f| Some(f.mass)).collect(),
                curves: flow.frames.into_iter().map(|f| (f.t, f.solution.boundary)).collect(),
                moments: flow.moments,
            }
        }
        Solver::Classical => {
            let Some(start) = omega0 else {
                return Err(ConfigError::new("initial", "the classical solver needs a non-empty domain").into());
            };
            let mut params = ClassicalParams::new(cfg.dt);
            params.moments = cfg.moments;
            let mut curve = start;
            let mut previous = 0.0;
            let mut flux_error = 0.0f64;
            let mut curves = Vec::new();
            let mut moments = MomentSeries::new();
            for &t in &cfg.times {
                if t > previous {
                    let seg = run_classical(&curve, &rho, t - previous, &params)?;
                    flux_error = seg.frames.iter().map(|f| (f.flux - 1.0).abs()).fold(flux_error, f64::max);
                    curve = seg.frames.last().map(|f| f.curve.clone()).unwrap_or(curve);
                }
                moments.push(t, curve_moments(&curve, &rho, cfg.moments, params.moment_grid_h)?)?;
                curves.push((t, Some(curve.clone())));
                previous = t;
            }
            report.max_flux_error = Some(flux_error);
            Frames { masses: vec![None; curves.len()], curves, moments }
        }
    };

    let frame_dir = dir.join("frames");
    fs::create_dir_all(&frame_dir).map_err(|e| RunError::Io(frame_dir.clone(), e))?;
    for (k, (t, curve)) in frames.curves.iter().enumerate() {
        let path = frame_dir.join(format!("frame_{k:04}.json"));
        write(&path, &to_json(&FrameJson::new(*t, curve.as_ref())))?;
    }
    report.frames = frames
        .curves
        .iter()
        .zip(&frames.masses)
        .map(|((t, c), m)| summarize(*t, c.as_ref(), *m))
        .collect();
    report.drift = if frames.moments.len() >= 2 { Some(richardson_drift(&frames.moments)?) } else { None };
    write(&dir.join("moments.csv"), &moments_csv(&frames.moments))?;
    write(&dir.join("drift.json"), &to_json(&report))?;
    let overlay: Vec<(f64, Option<&MarkerCurve>)> = frames.curves.iter().map(|(t, c)| (*t, c.as_ref())).collect();
    write(&dir.join("boundaries.svg"), &svg_overlay(&overlay))?;
    if let Some(g) = grid_file {
        write(&dir.join("grid.csv"), &g)?;
    }
    Ok((dir, report))
}
