//! JSON experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use hsflow_core::{Complex, DensityField, MarkerCurve};
use serde::Deserialize;

use crate::emit::read_curve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Weak,
    Classical,
}

/// Starting domain `Ω₀`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialDomain {
    Empty,
    Disc {
        #[serde(default)]
        center: [f64; 2],
        radius: f64,
    },
    Ellipse {
        #[serde(default)]
        center: [f64; 2],
        a: f64,
        b: f64,
    },
    /// Marker file `{"markers": [[x, y], ...]}`, relative to the config file.
    Curve { path: PathBuf },
    /// Image of the unit disc under `w ↦ a·w + b·w²`.
    PolynomialMap { a: f64, b: f64 },
}

/// `ρ` as a constant or as `max(c0 + c1·x + c2·y, floor)`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum RhoSpec {
    Constant(f64),
    Affine { c0: f64, c1: f64, c2: f64, floor: f64 },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub solver: Solver,
    pub initial: InitialDomain,
    /// Constant permeability; mutually exclusive with `rho`.
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub rho: Option<RhoSpec>,
    /// Grid spacing of the weak solver.
    #[serde(default = "default_h")]
    pub h: f64,
    /// Half-width of the square box `[−box, box]²`.
    #[serde(rename = "box", default = "default_box")]
    pub half_width: f64,
    /// Output times (injected masses).
    pub times: Vec<f64>,
    /// Time step of the classical solver.
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Markers on initial and extracted curves.
    #[serde(default = "default_markers")]
    pub markers: usize,
    /// Highest recorded moment index.
    #[serde(default = "default_moments")]
    pub moments: usize,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(skip)]
    base_dir: PathBuf,
}

fn default_h() -> f64 {
    1.0 / 128.0
}

fn default_box() -> f64 {
    1.5
}

fn default_dt() -> f64 {
    1e-3
}

fn default_markers() -> usize {
    256
}

fn default_moments() -> usize {
    4
}

fn default_output() -> PathBuf {
    PathBuf::from("hsflow-out")
}

/// Configuration problem attached to a field path such as `initial.radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("must be positive and finite, got {v}")))
    }
}

impl ExperimentConfig {
    /// Parses and validates `text`; relative curve paths resolve against
    /// `base_dir`.
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let mut cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { "<root>".to_string() } else { path };
            ConfigError::new(field, e.into_inner().to_string())
        })?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("<file>", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text, path.parent().unwrap_or(Path::new(".")))
    }

    fn validate(&self) -> Result<(), ConfigError> {
        positive("h", self.h)?;
        if self.h > 0.1 {
            return Err(ConfigError::new("h", "must be at most 0.1"));
        }
        positive("box", self.half_width)?;
        if self.half_width / self.h > 4096.0 {
            return Err(ConfigError::new("box", "more than 4096 nodes per half-width"));
        }
        if self.times.is_empty() {
            return Err(ConfigError::new("times", "must list at least one time"));
        }
        if self.times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(ConfigError::new("times", "times must be finite and non-negative"));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::new("times", "times must be strictly increasing"));
        }
        positive("dt", self.dt)?;
        if !(16..=8192).contains(&self.markers) {
            return Err(ConfigError::new("markers", "must lie in 16..=8192"));
        }
        if self.moments > 32 {
            return Err(ConfigError::new("moments", "must be at most 32"));
        }
        match (&self.kappa, &self.rho) {
            (Some(_), Some(_)) => return Err(ConfigError::new("kappa", "give either kappa or rho, not both")),
            (Some(k), None) => positive("kappa", *k)?,
            (None, Some(RhoSpec::Constant(r))) => positive("rho", *r)?,
            (None, Some(RhoSpec::Affine { c0, c1, c2, floor })) => {
                if ![c0, c1, c2].iter().all(|v| v.is_finite()) {
                    return Err(ConfigError::new("rho", "coefficients must be finite"));
                }
                positive("rho.floor", *floor)?;
            }
            (None, None) => {}
        }
        match &self.initial {
            InitialDomain::Empty => {
                if self.solver == Solver::Classical {
                    return Err(ConfigError::new("initial", "the classical solver needs a non-empty domain"));
                }
            }
            InitialDomain::Disc { radius, .. } => positive("initial.radius", *radius)?,
            InitialDomain::Ellipse { a, b, .. } => {
                positive("initial.a", *a)?;
                positive("initial.b", *b)?;
            }
            InitialDomain::Curve { path } => {
                let full = self.base_dir.join(path);
                if !full.is_file() {
                    return Err(ConfigError::new("initial.path", format!("no such file: {}", full.display())));
                }
            }
            InitialDomain::PolynomialMap { a, b } => {
                if *a <= 2.0 * b.abs() {
                    return Err(ConfigError::new("initial", "polynomial map needs a > 2|b|"));
                }
            }
        }
        Ok(())
    }

    /// Density `ρ`, defaulting to 1.
    pub fn density(&self) -> Result<DensityField, ConfigError> {
        let d = match (&self.kappa, &self.rho) {
            (Some(k), _) => DensityField::constant(1.0 / k),
            (None, Some(RhoSpec::Constant(r))) => DensityField::constant(*r),
            (None, Some(RhoSpec::Affine { c0, c1, c2, floor })) => DensityField::affine(*c0, *c1, *c2, *floor),
            (None, None) => DensityField::constant(1.0),
        };
        d.map_err(|e| ConfigError::new(if self.kappa.is_some() { "kappa" } else { "rho" }, e.to_string()))
    }

    /// Initial curve with `markers` markers, `None` for the empty start.
    pub fn initial_curve(&self) -> Result<Option<MarkerCurve>, ConfigError> {
        let n = self.markers;
        let err = |e: hsflow_core::Error| ConfigError::new("initial", e.to_string());
        let c = |p: [f64; 2]| Complex::new(p[0], p[1]);
        let curve = match &self.initial {
            InitialDomain::Empty => return Ok(None),
            InitialDomain::Disc { center, radius } => MarkerCurve::circle(c(*center), *radius, n).map_err(err)?,
            InitialDomain::Ellipse { center, a, b } => MarkerCurve::ellipse(c(*center), *a, *b, n).map_err(err)?,
            InitialDomain::Curve { path } => {
                let full = self.base_dir.join(path);
                let curve = read_curve(&full).map_err(|e| ConfigError::new("initial.path", e.to_string()))?;
                curve.resample(n).map_err(err)?
            }
            InitialDomain::PolynomialMap { a, b } => hsflow_core::quadrature::polynomial_map_curve(*a, *b, n).map_err(err)?.0,
        };
        Ok(Some(curve))
    }

    /// Output directory, overridden by `OUTPUT_DIR` when set.
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os("OUTPUT_DIR") {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.output_dir.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
        ExperimentConfig::from_json(text, Path::new("."))
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse(r#"{"solver": "weak", "initial": {"kind": "empty"}, "times": [0.1, 0.2]}"#).unwrap();
        assert_eq!(cfg.h, 1.0 / 128.0);
        assert_eq!(cfg.half_width, 1.5);
        assert_eq!(cfg.density().unwrap(), DensityField::Constant(1.0));
        assert!(cfg.initial_curve().unwrap().is_none());
    }

    #[test]
    fn errors_name_the_field() {
        let e = parse(r#"{"solver": "weak", "initial": {"kind": "empty"}, "times": [0.1], "kappa": "x"}"#).unwrap_err();
        assert_eq!(e.field, "kappa");
        let e = parse(r#"{"solver": "weak", "initial": {"kind": "empty"}, "times": [0.1], "kappa": -1}"#).unwrap_err();
        assert_eq!(e.field, "kappa");
        let e = parse(r#"{"solver": "weak", "initial": {"kind": "disc", "radius": 0}, "times": [0.1]}"#).unwrap_err();
        assert_eq!(e.field, "initial.radius");
        let e = parse(r#"{"solver": "weak", "initial": {"kind": "empty"}, "times": [0.2, 0.1]}"#).unwrap_err();
        assert_eq!(e.field, "times");
        let e = parse(r#"{"solver": "weak", "initial": {"kind": "empty"}, "times": [0.1], "colour": 1}"#).unwrap_err();
        assert!(e.message.contains("colour"));
        let e = parse(r#"{"solver": "classical", "initial": {"kind": "empty"}, "times": [0.1]}"#).unwrap_err();
        assert_eq!(e.field, "initial");
    }

    #[test]
    fn affine_density() {
        let cfg = parse(
            r#"{"solver": "weak", "initial": {"kind": "ellipse", "a": 1, "b": 0.6}, "times": [0.1],
                "rho": {"c0": 1, "c1": 0.2, "c2": 0, "floor": 0.1}}"#,
        )
        .unwrap();
        assert_eq!(cfg.density().unwrap(), DensityField::affine(1.0, 0.2, 0.0, 0.1).unwrap());
        assert_eq!(cfg.initial_curve().unwrap().unwrap().len(), 256);
    }
}
