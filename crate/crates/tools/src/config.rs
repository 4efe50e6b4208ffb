//! JSON run configuration (`"format": 1`).
//!
//! Angles in the file use the top-level `units` (degrees unless stated).
//! Missing keys take the built-in defaults; geometry fields override the
//! variant's own values.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use vertebra_core::constraints::{ConstraintParams, SegmentMethod};
use vertebra_core::linalg::Vec3;
use vertebra_core::mechanism::{make_geometry, DesignVariant, GeometryOverrides, MechanismGeometry};
use vertebra_core::workspace::{CentroidMethod, SweepParams};

use crate::error::CliError;
use crate::format::Units;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub format: u32,
    #[serde(default)]
    pub units: Units,
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub constraints: ConstraintConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rod_length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupler_length: Option<f64>,
    /// Motor axes `[i1, i2]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<[[f64; 3]; 2]>,
    /// Crank directions at zero joint angle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rod_home_dirs: Option<[[f64; 3]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub home_yaw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_mm: Option<f64>,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            variant: DesignVariant::ParallelActuators.tag().to_string(),
            a: None,
            b: None,
            c: None,
            rod_length: None,
            coupler_length: None,
            axes: None,
            rod_home_dirs: None,
            home_yaw: None,
            scale_mm: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentMethodConfig {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintConfig {
    pub lima: f64,
    /// B1, B2, C1, C2; `null` uses `lima`.
    pub cone_limits: [Option<f64>; 4],
    pub limd: f64,
    pub clearance: f64,
    pub samples_n: usize,
    pub singularity_margin: Option<f64>,
    pub segment_method: SegmentMethodConfig,
}

impl Default for ConstraintConfig {
    fn default() -> Self {
        ConstraintConfig::from_params(&ConstraintParams::default(), Units::Degrees)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CentroidConfig {
    Area,
    VertexAverage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n_psi: usize,
    pub n_phi: usize,
    pub tilt_step: f64,
    pub max_tilt: f64,
    pub centroid: CentroidConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig::from_params(&SweepParams::default(), Units::Degrees)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    #[default]
    Json,
    Obj,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: ExportFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            format: FORMAT_VERSION,
            units: Units::Degrees,
            geometry: GeometryConfig::default(),
            constraints: ConstraintConfig::default(),
            sweep: SweepConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl ConstraintConfig {
    pub fn from_params(p: &ConstraintParams, u: Units) -> Self {
        ConstraintConfig {
            lima: u.from_rad_clean(p.lima),
            cone_limits: p.cone_limits.map(|c| c.map(|v| u.from_rad_clean(v))),
            limd: p.limd,
            clearance: p.clearance,
            samples_n: p.samples_n,
            singularity_margin: p.singularity_margin,
            segment_method: match p.segment_method {
                SegmentMethod::Exact => SegmentMethodConfig::Exact,
                SegmentMethod::Sampled => SegmentMethodConfig::Sampled,
            },
        }
    }

    pub fn to_params(&self, u: Units) -> Result<ConstraintParams, CliError> {
        let p = ConstraintParams {
            lima: u.to_rad(self.lima),
            cone_limits: self.cone_limits.map(|c| c.map(|v| u.to_rad(v))),
            limd: self.limd,
            clearance: self.clearance,
            samples_n: self.samples_n,
            singularity_margin: self.singularity_margin,
            segment_method: match self.segment_method {
                SegmentMethodConfig::Exact => SegmentMethod::Exact,
                SegmentMethodConfig::Sampled => SegmentMethod::Sampled,
            },
        };
        p.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(p)
    }
}

impl SweepConfig {
    pub fn from_params(p: &SweepParams, u: Units) -> Self {
        SweepConfig {
            n_psi: p.n_psi,
            n_phi: p.n_phi,
            tilt_step: u.from_rad_clean(p.tilt_step),
            max_tilt: u.from_rad_clean(p.max_tilt),
            centroid: match p.centroid {
                CentroidMethod::Area => CentroidConfig::Area,
                CentroidMethod::VertexAverage => CentroidConfig::VertexAverage,
            },
        }
    }

    pub fn to_params(&self, u: Units) -> Result<SweepParams, CliError> {
        let p = SweepParams {
            n_psi: self.n_psi,
            n_phi: self.n_phi,
            tilt_step: u.to_rad(self.tilt_step),
            max_tilt: u.to_rad(self.max_tilt),
            centroid: match self.centroid {
                CentroidConfig::Area => CentroidMethod::Area,
                CentroidConfig::VertexAverage => CentroidMethod::VertexAverage,
            },
        };
        p.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(p)
    }
}

impl GeometryConfig {
    pub fn variant(&self) -> Result<DesignVariant, CliError> {
        DesignVariant::from_tag(&self.variant)
            .ok_or_else(|| CliError::Config(format!("unknown variant '{}'", self.variant)))
    }

    pub fn build(&self, u: Units) -> Result<MechanismGeometry, CliError> {
        let v3 = |a: [f64; 3]| Vec3::new(a[0], a[1], a[2]);
        let ov = GeometryOverrides {
            a: self.a,
            b: self.b,
            c: self.c,
            rod_length: self.rod_length,
            coupler_length: self.coupler_length,
            axis1: self.axes.map(|a| v3(a[0])),
            axis2: self.axes.map(|a| v3(a[1])),
            rod_home_dir1: self.rod_home_dirs.map(|d| v3(d[0])),
            rod_home_dir2: self.rod_home_dirs.map(|d| v3(d[1])),
            home_yaw: self.home_yaw.map(|y| u.to_rad(y)),
            scale_mm: self.scale_mm,
        };
        make_geometry(self.variant()?, Some(&ov)).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Overlays `patch` onto `base`, recursing into objects.
fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Everything a command needs, in internal units.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub geometry: MechanismGeometry,
    pub constraints: ConstraintParams,
    pub sweep: SweepParams,
    pub output: ExportFormat,
}

impl RunConfig {
    /// Defaults expressed in `units`.
    pub fn defaults_in(units: Units) -> RunConfig {
        RunConfig {
            units,
            constraints: ConstraintConfig::from_params(&ConstraintParams::default(), units),
            sweep: SweepConfig::from_params(&SweepParams::default(), units),
            ..RunConfig::default()
        }
    }

    pub fn from_json(text: &str) -> Result<RunConfig, CliError> {
        let raw: Value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid JSON: {e}")))?;
        match raw.get("format").and_then(|f| f.as_u64()) {
            Some(v) if v == FORMAT_VERSION as u64 => {}
            Some(v) => return Err(CliError::Config(format!("unsupported config format {v}"))),
            None => return Err(CliError::Config("missing \"format\": 1".into())),
        }
        let units: Units = match raw.get("units") {
            Some(u) => serde_json::from_value(u.clone()).map_err(|e| CliError::Config(e.to_string()))?,
            None => Units::Degrees,
        };
        let mut doc = serde_json::to_value(RunConfig::defaults_in(units)).expect("config serializes");
        merge(&mut doc, raw);
        serde_json::from_value(doc).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        Ok(Resolved {
            geometry: self.geometry.build(self.units)?,
            constraints: self.constraints.to_params(self.units)?,
            sweep: self.sweep.to_params(self.units)?,
            output: self.output.format,
        })
    }
}
