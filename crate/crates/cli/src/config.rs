//! Run configuration read from `--config`.

use bergkern_core::formula::FormulaFormat;
use bergkern_core::transform::PlanMode;
use bergkern_core::zeros::GridSpec;
use bergkern_core::{ComplexPoint, DomainSpec, WeightSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainSpec,
    #[serde(default = "WeightSpec::unit")]
    pub weight: WeightSpec,
    #[serde(default)]
    pub mode: PlanMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval: Option<EvalSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<FormulaSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_compare: Option<OracleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeros: Option<ZerosSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<RatioSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub track: Option<TrackSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hartogs: Option<HartogsSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointPair {
    pub z: ComplexPoint,
    pub w: ComplexPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    pub points: Vec<PointPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormulaSection {
    #[serde(default = "latex")]
    pub format: FormulaFormat,
}

fn latex() -> FormulaFormat {
    FormulaFormat::Latex
}

impl Default for FormulaSection {
    fn default() -> Self {
        FormulaSection { format: latex() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default = "d64")]
    pub radial: usize,
    #[serde(default = "d128")]
    pub angular: usize,
    /// Test functions `z^n`.
    #[serde(default = "default_degrees")]
    pub degrees: Vec<usize>,
    pub points: Vec<ComplexPoint>,
}

fn d64() -> usize {
    64
}

fn d128() -> usize {
    128
}

fn default_degrees() -> Vec<usize> {
    vec![0, 1, 2]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    #[serde(default = "default_degree")]
    pub degree: usize,
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    /// Sample points satisfy `|z| <= radius`.
    #[serde(default = "default_radius")]
    pub radius: f64,
}

fn default_degree() -> usize {
    bergkern_core::oracle::DEFAULT_GRAM_DEGREE
}

fn default_pairs() -> usize {
    200
}

fn default_radius() -> f64 {
    0.7
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZerosSection {
    pub w0: ComplexPoint,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioSection {
    pub z: ComplexPoint,
    /// Explicit centers; otherwise `toward * (1 - 2^-j)` for `j` in range.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub centers: Vec<ComplexPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toward: Option<ComplexPoint>,
    #[serde(default = "default_j_min")]
    pub j_min: u32,
    #[serde(default = "default_j_max")]
    pub j_max: u32,
}

fn default_j_min() -> u32 {
    1
}

fn default_j_max() -> u32 {
    12
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackSection {
    pub z_grid: GridSpec,
    pub w_grid: GridSpec,
    #[serde(default = "default_track_min")]
    pub j_min: u32,
    #[serde(default = "default_track_max")]
    pub j_max: u32,
}

fn default_track_min() -> u32 {
    3
}

fn default_track_max() -> u32 {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HartogsSection {
    pub z_grid: GridSpec,
    pub w_grid: GridSpec,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| e.to_string())?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Checks that serde cannot express.
    fn check(&self) -> Result<(), String> {
        let grids = [
            self.zeros.as_ref().map(|z| z.grid),
            self.track.as_ref().map(|t| t.z_grid),
            self.track.as_ref().map(|t| t.w_grid),
            self.hartogs.as_ref().map(|h| h.z_grid),
            self.hartogs.as_ref().map(|h| h.w_grid),
        ];
        for g in grids.into_iter().flatten() {
            g.validate().map_err(|e| e.to_string())?;
        }
        if let Some(r) = &self.ratio {
            if r.centers.is_empty() == r.toward.is_none() {
                return Err("ratio: give exactly one of `centers` and `toward`".into());
            }
            if r.j_min > r.j_max || r.j_max > 52 {
                return Err("ratio: need j_min <= j_max <= 52".into());
            }
        }
        if let Some(t) = &self.track {
            if t.j_min > t.j_max || t.j_max > 52 {
                return Err("track: need j_min <= j_max <= 52".into());
            }
        }
        if let Some(o) = &self.oracle_compare {
            if !(o.radius > 0.0 && o.radius < 1.0) || o.pairs == 0 {
                return Err("oracle_compare: need 0 < radius < 1 and pairs > 0".into());
            }
        }
        if let Some(v) = &self.verify {
            if v.points.is_empty() {
                return Err("verify: no points".into());
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
