//! Run configuration: one JSON document, overridable from the command line.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::potential::{
    coulomb, kratzer_fues, modified_kratzer, KratzerConvention, MiePreset, Potential,
    PotentialParams,
};
use crate::wavefunction::RadialGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PresetKind {
    /// `B/r`, hydrogen-like.
    Coulomb,
    /// `−D0 (2 r0/r − r0²/r²)`.
    KratzerFues,
    /// `D0 ((r − r0)/r)²` or its sign-inverted form.
    ModifiedKratzer,
    /// Two-exponent form with exponents `a`, `b`; numeric spectrum only.
    Mie,
    /// Raw `A/r² + B/r + C`.
    Raw,
}

impl PresetKind {
    pub const ALL: [PresetKind; 5] = [
        Self::Coulomb,
        Self::KratzerFues,
        Self::ModifiedKratzer,
        Self::Mie,
        Self::Raw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Coulomb => "coulomb",
            Self::KratzerFues => "kratzer-fues",
            Self::ModifiedKratzer => "modified-kratzer",
            Self::Mie => "mie",
            Self::Raw => "raw",
        }
    }

    fn accepts(self, field: &str) -> bool {
        let allowed: &[&str] = match self {
            Self::Coulomb => &["B"],
            Self::KratzerFues => &["D0", "r0"],
            Self::ModifiedKratzer => &["D0", "r0", "convention"],
            Self::Mie => &["D0", "r0", "a", "b"],
            Self::Raw => &["A", "B", "C"],
        };
        allowed.contains(&field)
    }

    /// Preset with every parameter filled with its default value.
    pub fn defaults(self) -> PotentialSpec {
        let mut spec = PotentialSpec::bare(self);
        match self {
            Self::Coulomb => spec.inv_linear = Some(-1.0),
            Self::KratzerFues => (spec.depth, spec.r0) = (Some(5.0), Some(1.0)),
            Self::ModifiedKratzer => {
                (spec.depth, spec.r0) = (Some(5.0), Some(1.0));
                spec.convention = Some(KratzerConvention::Standard);
            }
            Self::Mie => {
                (spec.depth, spec.r0) = (Some(5.0), Some(1.0));
                (spec.exp_a, spec.exp_b) = (Some(4.0), Some(2.0));
            }
            Self::Raw => {
                spec.inv_square = Some(0.0);
                spec.inv_linear = Some(-1.0);
                spec.offset = Some(0.0);
            }
        }
        spec
    }
}

/// A preset name plus the parameters it takes. Missing parameters take the
/// preset defaults; parameters the preset does not take are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub preset: PresetKind,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub inv_square: Option<f64>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub inv_linear: Option<f64>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
    #[serde(rename = "D0", default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[serde(rename = "a", default, skip_serializing_if = "Option::is_none")]
    pub exp_a: Option<f64>,
    #[serde(rename = "b", default, skip_serializing_if = "Option::is_none")]
    pub exp_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<KratzerConvention>,
}

impl PotentialSpec {
    pub fn bare(preset: PresetKind) -> Self {
        Self {
            preset,
            inv_square: None,
            inv_linear: None,
            offset: None,
            depth: None,
            r0: None,
            exp_a: None,
            exp_b: None,
            convention: None,
        }
    }

    fn present_fields(&self) -> Vec<&'static str> {
        [
            ("A", self.inv_square.is_some()),
            ("B", self.inv_linear.is_some()),
            ("C", self.offset.is_some()),
            ("D0", self.depth.is_some()),
            ("r0", self.r0.is_some()),
            ("a", self.exp_a.is_some()),
            ("b", self.exp_b.is_some()),
            ("convention", self.convention.is_some()),
        ]
        .into_iter()
        .filter_map(|(name, set)| set.then_some(name))
        .collect()
    }

    /// Fills unset parameters from the preset defaults, rejecting any that
    /// do not belong to the preset.
    pub fn resolved(&self) -> Result<Self, CliError> {
        if let Some(bad) = self
            .present_fields()
            .into_iter()
            .find(|f| !self.preset.accepts(f))
        {
            return Err(CliError::Config(format!(
                "parameter {bad} does not apply to preset {}",
                self.preset.name()
            )));
        }
        let d = self.preset.defaults();
        Ok(Self {
            preset: self.preset,
            inv_square: self.inv_square.or(d.inv_square),
            inv_linear: self.inv_linear.or(d.inv_linear),
            offset: self.offset.or(d.offset),
            depth: self.depth.or(d.depth),
            r0: self.r0.or(d.r0),
            exp_a: self.exp_a.or(d.exp_a),
            exp_b: self.exp_b.or(d.exp_b),
            convention: self.convention.or(d.convention),
        })
    }

    /// The potential this spec describes, in the given units.
    pub fn build(&self, units: Units) -> crate::Result<Potential> {
        let s = self
            .resolved()
            .map_err(|e| crate::Error::Domain(e.to_string()))?;
        let (m, h) = (units.mass, units.hbar);
        let need = |v: Option<f64>| v.expect("resolved spec has every preset parameter");
        let potential = match s.preset {
            PresetKind::Coulomb => {
                let p = coulomb(need(s.inv_linear), m, h);
                p.validate()?;
                Potential::Mie(p)
            }
            PresetKind::KratzerFues => {
                Potential::Mie(kratzer_fues(need(s.depth), need(s.r0), m, h)?)
            }
            PresetKind::ModifiedKratzer => Potential::Mie(modified_kratzer(
                need(s.depth),
                need(s.r0),
                m,
                h,
                s.convention.unwrap_or_default(),
            )?),
            PresetKind::Mie => Potential::General {
                preset: MiePreset::new(need(s.depth), need(s.r0), need(s.exp_a), need(s.exp_b))?,
                mass: m,
                hbar: h,
            },
            PresetKind::Raw => Potential::Mie(PotentialParams::new(
                need(s.inv_square),
                need(s.inv_linear),
                need(s.offset),
                m,
                h,
            )?),
        };
        potential.validate()?;
        Ok(potential)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    #[serde(rename = "M")]
    pub mass: f64,
    pub hbar: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self {
            mass: 1.0,
            hbar: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Grid overrides. The radial grid applies to `wavefunction`; `cells` sets
/// the finite-difference grid of `verify`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<usize>,
}

impl GridOverrides {
    /// The override grid if any radial field is set; unset fields come
    /// from `fallback`.
    pub fn radial(&self, fallback: RadialGrid) -> Result<RadialGrid, CliError> {
        if self.r_min.is_none() && self.r_max.is_none() && self.points.is_none() {
            return Ok(fallback);
        }
        RadialGrid::new(
            self.r_min.unwrap_or(fallback.r_min),
            self.r_max.unwrap_or(fallback.r_max),
            self.points.unwrap_or(fallback.count),
        )
        .map_err(|e| CliError::Config(format!("grid override: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    #[serde(default)]
    pub units: Units,
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    #[serde(default = "default_ell_max")]
    pub ell_max: u32,
    #[serde(default = "default_dims")]
    pub dims: Vec<u32>,
    #[serde(default)]
    pub grid: GridOverrides,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

fn default_n_max() -> u32 {
    3
}

fn default_ell_max() -> u32 {
    2
}

fn default_dims() -> Vec<u32> {
    vec![3]
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            potential: PresetKind::Coulomb.defaults(),
            units: Units::default(),
            n_max: default_n_max(),
            ell_max: default_ell_max(),
            dims: default_dims(),
            grid: GridOverrides::default(),
            output_dir: None,
            output: None,
            format: OutputFormat::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks ranges and the potential, and fills preset defaults so that
    /// the serialized form is fully explicit.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        self.potential = self.potential.resolved()?;
        if let Some(&bad) = self.dims.iter().find(|&&d| d < 2) {
            return Err(CliError::Config(format!("dimension N = {bad} < 2")));
        }
        if !(self.units.mass > 0.0 && self.units.hbar > 0.0)
            || !self.units.mass.is_finite()
            || !self.units.hbar.is_finite()
        {
            return Err(CliError::Config(
                "units: M and hbar must be positive".into(),
            ));
        }
        if let (Some(lo), Some(hi)) = (self.grid.r_min, self.grid.r_max) {
            if !(lo > 0.0 && hi > lo) {
                return Err(CliError::Config(format!(
                    "grid override needs 0 < r_min < r_max (got {lo}, {hi})"
                )));
            }
        }
        if self.grid.r_min.is_some_and(|r| !(r > 0.0)) {
            return Err(CliError::Config("grid override needs r_min > 0".into()));
        }
        if self.grid.points.is_some_and(|p| p < 2) {
            return Err(CliError::Config(
                "grid override needs at least 2 points".into(),
            ));
        }
        if self.grid.cells.is_some_and(|c| c < 3) {
            return Err(CliError::Config(
                "oracle grid needs at least 3 cells".into(),
            ));
        }
        Ok(self)
    }

    pub fn build_potential(&self) -> crate::Result<Potential> {
        self.potential.build(self.units)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = RunConfig::from_json(r#"{"potential": {"preset": "kratzer-fues"}}"#)
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(c.potential.depth, Some(5.0));
        assert_eq!(c.potential.r0, Some(1.0));
        assert_eq!(c.dims, vec![3]);
        assert_eq!(c.n_max, 3);
        let p = c.build_potential().unwrap();
        assert_eq!(p.as_mie().unwrap().inv_square, 5.0);
    }

    #[test]
    fn round_trip_is_identical() {
        let c = RunConfig::from_json(
            r#"{"potential": {"preset": "raw", "A": 0.3, "B": -2.0}, "units": {"M": 2.0, "hbar": 1.0},
                "dims": [2, 5], "grid": {"points": 300}, "format": "json"}"#,
        )
        .unwrap()
        .resolve()
        .unwrap();
        let again = RunConfig::from_json(&c.to_json())
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(c, again);
        assert_eq!(c.to_json(), again.to_json());
    }

    #[test]
    fn foreign_parameters_rejected() {
        let c = RunConfig::from_json(r#"{"potential": {"preset": "coulomb", "D0": 2.0}}"#).unwrap();
        assert!(matches!(c.resolve(), Err(CliError::Config(_))));
        assert!(RunConfig::from_json(r#"{"potential": {"preset": "coulomb", "Q": 2.0}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"dims": [3]}"#).is_err());
    }

    #[test]
    fn range_validation() {
        let bad_dim = RunConfig {
            dims: vec![3, 1],
            ..Default::default()
        };
        assert!(bad_dim.resolve().is_err());
        let bad_grid = RunConfig {
            grid: GridOverrides {
                r_min: Some(0.0),
                ..Default::default()
            },
            ..Default::default()
        };
        assert!(bad_grid.resolve().is_err());
        let empty = RunConfig {
            dims: Vec::new(),
            ..Default::default()
        };
        assert!(empty.resolve().is_ok());
    }

    #[test]
    fn every_preset_builds() {
        for kind in PresetKind::ALL {
            let spec = kind.defaults();
            assert_eq!(spec.resolved().unwrap(), spec);
            let p = spec.build(Units::default()).unwrap();
            assert_eq!(p.as_mie().is_none(), kind == PresetKind::Mie);
        }
    }
}
