use std::path::{Path, PathBuf};

use fiberlab::surface::{SAMPLE_BOUND, SAMPLE_SEED};
use serde::{Deserialize, Serialize};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "FIBERLAB_OUT";
pub const DEFAULT_OUT: &str = "fiberlab-out";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceSection,
    pub caps: CapsSection,
    pub tolerances: ToleranceSection,
    pub run: RunSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurfaceSection {
    pub seed: u64,
    /// Coefficient bound for the random construction.
    pub bound: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapsSection {
    /// Largest `ord σ₂(b)` inside a certificate.
    pub m_max: u32,
    /// Largest column order `n_r` inside a certificate.
    pub n_max: u32,
    /// Torsion order cap `N` of the finite-orbit search.
    pub order_cap: u32,
    /// Largest denominator of a rational Betti point.
    pub qmax: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceSection {
    /// Projective distance under which two approximate points coincide.
    pub tol: f64,
    /// Radius of the isolating discs of algebraic numbers.
    pub precision: f64,
    /// Relative `|Δ|` threshold below which a fiber counts as singular in
    /// the period computation.
    pub disc_margin: f64,
    /// Distance in the parameter below which a fiber counts as singular.
    pub sing_margin: f64,
    /// Starting `δ` of the conjugate-control experiment.
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Worker threads; `0` uses every core.
    pub workers: usize,
    pub out: Option<PathBuf>,
}

impl Default for SurfaceSection {
    fn default() -> Self {
        SurfaceSection { seed: SAMPLE_SEED, bound: SAMPLE_BOUND }
    }
}

impl Default for CapsSection {
    fn default() -> Self {
        CapsSection { m_max: 4, n_max: 4, order_cap: 4, qmax: 6 }
    }
}

impl Default for ToleranceSection {
    fn default() -> Self {
        ToleranceSection { tol: 1e-8, precision: 1e-14, disc_margin: 1e-10, sing_margin: 1e-4, delta: 0.05 }
    }
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection { workers: 0, out: None }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            surface: SurfaceSection::default(),
            caps: CapsSection::default(),
            tolerances: ToleranceSection::default(),
            run: RunSection::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        let c: RunConfig = toml::from_str(text).map_err(|e| format!("invalid config: {e}"))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), String> {
        let caps = [
            ("surface.bound", self.surface.bound as u64),
            ("caps.m_max", self.caps.m_max as u64),
            ("caps.n_max", self.caps.n_max as u64),
            ("caps.order_cap", self.caps.order_cap as u64),
            ("caps.qmax", self.caps.qmax),
        ];
        for (name, v) in caps {
            if v < 1 {
                return Err(format!("{name} must be at least 1"));
            }
        }
        let t = &self.tolerances;
        let tols = [
            ("tolerances.tol", t.tol),
            ("tolerances.precision", t.precision),
            ("tolerances.disc_margin", t.disc_margin),
            ("tolerances.sing_margin", t.sing_margin),
            ("tolerances.delta", t.delta),
        ];
        for (name, v) in tols {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be positive and finite"));
            }
        }
        Ok(())
    }

    /// Output directory: the config value, then `$FIBERLAB_OUT`, then
    /// `fiberlab-out`.
    pub fn out_dir(&self) -> PathBuf {
        self.run
            .out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn awkward_floats_round_trip() {
        let mut c = RunConfig::default();
        c.tolerances.tol = 0.1 + 0.2;
        c.tolerances.delta = 1.0 / 3.0;
        c.run.out = Some("x y/z".into());
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c = RunConfig::from_toml("[caps]\norder_cap = 6\n").unwrap();
        assert_eq!(c.caps.order_cap, 6);
        assert_eq!(c.caps.qmax, 6);
        assert_eq!(c.surface, SurfaceSection::default());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::from_toml("[caps]\nm_max = 0\n").is_err());
        assert!(RunConfig::from_toml("[tolerances]\ntol = -1.0\n").is_err());
        assert!(RunConfig::from_toml("[caps]\nwhatever = 3\n").is_err());
    }
}
