//! Run configuration: a JSON file, overridden by command-line flags, resolved
//! and validated before any computation.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use subwave::{equidistant_geometry, MaterialParams, NestedGeometry};

use crate::error::CliError;

/// Shell radii, either `{"equidistant": N}` or `{"radii": [r_1^+, r_1^-, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometryConfig {
    Equidistant(usize),
    Radii(Vec<f64>),
}

/// Either `{"contrast": δ}` (unit wave speeds, density ratio δ) or the four
/// explicit parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MaterialConfig {
    Contrast(f64),
    Explicit {
        rho_r: f64,
        kappa_r: f64,
        rho: f64,
        kappa: f64,
    },
}

impl Default for MaterialConfig {
    fn default() -> Self {
        MaterialConfig::Contrast(1.0 / 6000.0)
    }
}

/// Frequency range of a sweep. Missing bounds default to half the lowest
/// and one and a half times the highest resonance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub steps: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            omega_min: None,
            omega_max: None,
            steps: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Samples along the incidence axis through the origin.
    Line,
    /// Square grid in the `x3 = 0` plane.
    Plane,
}

/// Field sampling. The frequency is `omega_in` if given, otherwise the real
/// part of the asymptotic resonance `mode_index` (1-based, default 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldConfig {
    pub omega_in: Option<f64>,
    pub mode_index: Option<usize>,
    pub layout: Layout,
    /// Samples per axis.
    pub points: usize,
    /// Half-width of the sampled window; defaults to `1.1 r_1^+`.
    pub extent: Option<f64>,
    /// Radial samples per shell for the shell table.
    pub shell_samples: usize,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self {
            omega_in: None,
            mode_index: None,
            layout: Layout::Line,
            points: 201,
            extent: None,
            shell_samples: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    /// Contrasts for the convergence-rate fit.
    pub deltas: Vec<f64>,
    /// Largest accepted `|ω_SWE - ω_DtN|`.
    pub tolerance: f64,
    /// Largest accepted `|ω_exact - ω_asym| / |ω_asym|`.
    pub asymptotic_tolerance: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            deltas: vec![1e-2, 1e-3, 1e-4],
            tolerance: 1e-8,
            asymptotic_tolerance: 5e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: Option<GeometryConfig>,
    pub materials: MaterialConfig,
    /// Unit propagation direction of the incident plane wave.
    pub direction: [f64; 3],
    pub n_max: usize,
    pub sweep: SweepConfig,
    pub field: FieldConfig,
    pub compare: CompareConfig,
    /// Root-search starting points `[re, im]`, one per shell, replacing the
    /// capacitance asymptotics.
    pub seeds: Option<Vec<[f64; 2]>>,
    /// Worker threads; all available cores when absent.
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: None,
            materials: MaterialConfig::default(),
            direction: [0.0, 0.0, 1.0],
            n_max: 4,
            sweep: SweepConfig::default(),
            field: FieldConfig::default(),
            compare: CompareConfig::default(),
            seeds: None,
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks everything that does not depend on the workflow and builds the
    /// model objects.
    pub fn validate(&self) -> Result<Validated, CliError> {
        let geometry = match &self.geometry {
            None => return Err(CliError::Config("no geometry given".into())),
            Some(GeometryConfig::Equidistant(n)) => equidistant_geometry(*n),
            Some(GeometryConfig::Radii(r)) => NestedGeometry::new(r.clone()),
        }
        .map_err(|e| CliError::Config(e.to_string()))?;
        let materials = match self.materials {
            MaterialConfig::Contrast(d) => MaterialParams::from_contrast(d),
            MaterialConfig::Explicit {
                rho_r,
                kappa_r,
                rho,
                kappa,
            } => MaterialParams::new(rho_r, kappa_r, rho, kappa),
        }
        .map_err(|e| CliError::Config(e.to_string()))?;

        let norm = self.direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !((norm - 1.0).abs() <= 1e-12) {
            return Err(CliError::Config(format!(
                "direction must be a unit vector, |d| = {norm}"
            )));
        }
        if self.n_max > subwave::special::N_MAX {
            return Err(CliError::Config(format!(
                "n_max must be at most {}, got {}",
                subwave::special::N_MAX,
                self.n_max
            )));
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        let seeds = match &self.seeds {
            None => None,
            Some(s) if s.len() != geometry.layers() => {
                return Err(CliError::Config(format!(
                    "{} seeds given for {} shells",
                    s.len(),
                    geometry.layers()
                )))
            }
            Some(s) => Some(s.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()),
        };
        Ok(Validated {
            geometry,
            materials,
            seeds,
        })
    }
}

/// Model objects built from a validated config.
#[derive(Debug, Clone)]
pub struct Validated {
    pub geometry: NestedGeometry,
    pub materials: MaterialParams,
    pub seeds: Option<Vec<Complex64>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_sections() {
        let c = RunConfig::from_json(r#"{"geometry": {"equidistant": 3}}"#).unwrap();
        assert_eq!(c.geometry, Some(GeometryConfig::Equidistant(3)));
        assert_eq!(c.n_max, 4);
        assert_eq!(c.sweep.steps, 400);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn round_trip() {
        let c = RunConfig {
            geometry: Some(GeometryConfig::Radii(vec![2.0, 1.5, 1.0, 0.2])),
            materials: MaterialConfig::Explicit {
                rho_r: 1.0,
                kappa_r: 2.0,
                rho: 3000.0,
                kappa: 4000.0,
            },
            seeds: Some(vec![[0.1, -0.01], [0.2, -0.001]]),
            threads: Some(2),
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(RunConfig::from_json("{").is_err());
        assert!(RunConfig::from_json(r#"{"geometry": {"cubes": 3}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"colour": 3}"#).is_err());
        let empty = RunConfig::from_json(r#"{"geometry": {"radii": []}}"#).unwrap();
        assert!(matches!(empty.validate(), Err(CliError::Config(_))));
        let c = RunConfig {
            geometry: Some(GeometryConfig::Equidistant(2)),
            direction: [1.0, 1.0, 0.0],
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
        let c = RunConfig {
            geometry: Some(GeometryConfig::Equidistant(2)),
            seeds: Some(vec![[0.1, 0.0]]),
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
        assert!(RunConfig::default().validate().is_err());
    }
}
