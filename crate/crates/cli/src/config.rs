//! Run configuration: a JSON file whose missing fields take the defaults
//! below, then command-line overrides.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Smallest tolerance accepted for any suite.
pub const TOLERANCE_FLOOR: f64 = 1e-15;

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSize {
    pub n_theta: usize,
    pub n_phi: usize,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RingConfig {
    pub radius: f64,
    pub size: usize,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Identities that hold in exact arithmetic.
    pub geometry_exact: f64,
    /// Identities checked through quadrature.
    pub geometry_quadrature: f64,
    pub representation: f64,
    pub bernstein: f64,
    pub residues: f64,
    pub intertwining: f64,
    pub trilinear_invariance: f64,
    pub trilinear_closed_form: f64,
    pub regres: f64,
    pub poles: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            geometry_exact: 1e-10,
            geometry_quadrature: 1e-8,
            representation: 1e-8,
            bernstein: 1e-6,
            residues: 1e-4,
            intertwining: 1e-4,
            trilinear_invariance: 1e-3,
            trilinear_closed_form: 1e-6,
            regres: 5e-3,
            poles: 1e-6,
        }
    }
}

impl Tolerances {
    fn all(&self) -> [(&'static str, f64); 10] {
        [
            ("geometry_exact", self.geometry_exact),
            ("geometry_quadrature", self.geometry_quadrature),
            ("representation", self.representation),
            ("bernstein", self.bernstein),
            ("residues", self.residues),
            ("intertwining", self.intertwining),
            ("trilinear_invariance", self.trilinear_invariance),
            ("trilinear_closed_form", self.trilinear_closed_form),
            ("regres", self.regres),
            ("poles", self.poles),
        ]
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Ambient dimension for the checks that are not tied to `S²`.
    pub n: usize,
    /// Degree of the random band-limited test functions.
    #[serde(rename = "L")]
    pub l_max: usize,
    /// Quadrature grid of the trilinear forms.
    pub grid: GridSize,
    pub ring: RingConfig,
    pub tolerances: Tolerances,
    pub seed: u64,
    /// Randomized instances per check.
    pub instances: usize,
    /// Output directory; `null` defers to `$SPHERE_FORMS_OUT`.
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 3,
            l_max: 16,
            grid: GridSize { n_theta: 24, n_phi: 48 },
            ring: RingConfig { radius: 0.1, size: 16 },
            tolerances: Tolerances::default(),
            seed: 20240611,
            instances: 10,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            bail!("config: n must be at least 3, got {}", self.n);
        }
        if self.l_max == 0 {
            bail!("config: L must be positive");
        }
        if self.grid.n_theta < 2 || self.grid.n_phi < 3 {
            bail!("config: grid needs n_theta >= 2 and n_phi >= 3, got {}×{}", self.grid.n_theta, self.grid.n_phi);
        }
        if !(self.ring.radius > 0.0 && self.ring.radius < 1.0) {
            bail!("config: ring radius must lie in (0, 1) so the ring avoids neighbouring poles, got {}", self.ring.radius);
        }
        if self.ring.size < 8 {
            bail!("config: ring size must be at least 8, got {}", self.ring.size);
        }
        if self.instances == 0 {
            bail!("config: instances must be positive");
        }
        for (name, tol) in self.tolerances.all() {
            if !(tol >= TOLERANCE_FLOOR && tol.is_finite()) {
                bail!("config: tolerance {name} = {tol} is below the floor {TOLERANCE_FLOOR:e}");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"L": 8, "tolerances": {"residues": 1e-3}}"#).unwrap();
        assert_eq!(cfg.l_max, 8);
        assert_eq!(cfg.tolerances.residues, 1e-3);
        assert_eq!(cfg.tolerances.poles, 1e-6);
        assert_eq!(cfg.grid, RunConfig::default().grid);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = RunConfig::default();
        cfg.tolerances.regres = 0.0;
        assert!(cfg.validate().is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"unknown": 1}"#).is_err());
    }
}
