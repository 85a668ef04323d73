//! Experiment configuration: file loading (JSON or TOML), per-experiment
//! defaults, validation and the content hash stamped on every output.

use std::path::{Path, PathBuf};

use dynlab_core::cfrac::{DigitStream, RotationNumber};
use dynlab_core::maps::MapDescriptor;
use num_bigint::BigUint;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constants::*;
use crate::error::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExperimentId {
    #[serde(rename = "cf")]
    Cf,
    #[serde(rename = "siegel")]
    Siegel,
    #[serde(rename = "area")]
    Area,
    #[serde(rename = "E1_density_quadratic")]
    E1,
    #[serde(rename = "E1b_density_cubic")]
    E1b,
    #[serde(rename = "E2_area_persistence")]
    E2,
    #[serde(rename = "E3_deep_point")]
    E3,
    #[serde(rename = "E4_quadratic_like")]
    E4,
    #[serde(rename = "E5_renorm_sector")]
    E5,
    #[serde(rename = "E6_dimension")]
    E6,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 10] = [
        ExperimentId::Cf,
        ExperimentId::Siegel,
        ExperimentId::Area,
        ExperimentId::E1,
        ExperimentId::E1b,
        ExperimentId::E2,
        ExperimentId::E3,
        ExperimentId::E4,
        ExperimentId::E5,
        ExperimentId::E6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Cf => "cf",
            ExperimentId::Siegel => "siegel",
            ExperimentId::Area => "area",
            ExperimentId::E1 => "E1_density_quadratic",
            ExperimentId::E1b => "E1b_density_cubic",
            ExperimentId::E2 => "E2_area_persistence",
            ExperimentId::E3 => "E3_deep_point",
            ExperimentId::E4 => "E4_quadratic_like",
            ExperimentId::E5 => "E5_renorm_sector",
            ExperimentId::E6 => "E6_dimension",
        }
    }

    /// CLI subcommand.
    pub fn command(self) -> &'static str {
        match self {
            ExperimentId::Cf => "cf",
            ExperimentId::Siegel => "siegel",
            ExperimentId::Area => "area",
            ExperimentId::E1 => "e1",
            ExperimentId::E1b => "e1b",
            ExperimentId::E2 => "e2",
            ExperimentId::E3 => "e3",
            ExperimentId::E4 => "e4",
            ExperimentId::E5 => "e5",
            ExperimentId::E6 => "e6",
        }
    }
}

/// `(re_min, re_max, im_min, im_max)`.
pub type BboxSpec = [f64; 4];

/// How the inserted digit `A_n` grows with `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleRule {
    /// `A_n = slope * n + offset`
    Linear { slope: u64, offset: u64 },
    /// `A_n = 2^ceil(q_n^exponent)`
    DoublyExponential { exponent: f64 },
}

const MAX_DIGIT_BITS: f64 = (1u64 << 24) as f64;

impl ScheduleRule {
    pub fn digit(&self, n: usize, q_n: &BigUint) -> Result<BigUint, LabError> {
        match *self {
            ScheduleRule::Linear { slope, offset } => Ok(BigUint::from(slope * n as u64 + offset)),
            ScheduleRule::DoublyExponential { exponent } => {
                let q: f64 = q_n.to_string().parse().unwrap_or(f64::INFINITY);
                let bits = q.powf(exponent).ceil();
                if !(bits <= MAX_DIGIT_BITS) {
                    return Err(LabError::Config(format!("A_{n} would need {bits} bits")));
                }
                Ok(BigUint::from(1u8) << bits as usize)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CfParams {
    pub digits: DigitStream,
    pub terms: usize,
}

impl Default for CfParams {
    fn default() -> Self {
        CfParams { digits: RotationNumber::golden().digits().clone(), terms: 20 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SiegelParams {
    pub map: MapDescriptor,
    pub orders: Vec<usize>,
    /// Residual circle as a fraction of the estimated radius.
    pub residual_fraction: f64,
    pub residual_samples: usize,
}

impl Default for SiegelParams {
    fn default() -> Self {
        SiegelParams {
            map: MapDescriptor::CubicSiegel { theta: RotationNumber::golden() },
            orders: vec![200, 400],
            residual_fraction: 0.5,
            residual_samples: 256,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AreaParams {
    pub map: MapDescriptor,
    pub bbox: BboxSpec,
    pub resolution: usize,
    pub horizon: usize,
    pub r_escape: f64,
}

impl Default for AreaParams {
    fn default() -> Self {
        AreaParams {
            map: MapDescriptor::QuadBc { theta: RotationNumber::golden() },
            bbox: [-1.3, 2.0, -1.3, 2.0],
            resolution: 512,
            horizon: 1000,
            r_escape: 10.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityParams {
    pub alpha: RotationNumber,
    /// Digits appended after `A_n`.
    pub tail: RotationNumber,
    pub n_min: usize,
    pub n_max: usize,
    pub rule: ScheduleRule,
    /// Required high type `N`, if any.
    pub high_type: Option<u64>,
    pub r_values: Vec<f64>,
    pub resolution: usize,
    pub horizon: usize,
    pub check_doubling: bool,
    pub order: usize,
    pub polyline_points: usize,
    pub margin: f64,
    /// Sub-windows `U` reported alongside the full r-disk.
    pub windows: Vec<BboxSpec>,
    /// Adds the unperturbed control `alpha_n = alpha`.
    pub baseline: bool,
    pub density_min: f64,
    pub doubling_tol: f64,
    pub last_n: usize,
}

impl Default for DensityParams {
    fn default() -> Self {
        Self::quadratic()
    }
}

impl DensityParams {
    fn quadratic() -> Self {
        DensityParams {
            alpha: RotationNumber::golden(),
            tail: RotationNumber::golden(),
            n_min: 2,
            n_max: 6,
            rule: ScheduleRule::Linear { slope: 1, offset: 0 },
            high_type: None,
            r_values: vec![0.8],
            resolution: 1024,
            horizon: 10_000,
            check_doubling: true,
            order: 600,
            polyline_points: 2048,
            margin: 0.02,
            windows: Vec::new(),
            baseline: false,
            density_min: DENSITY_MIN,
            doubling_tol: DOUBLING_TOL,
            last_n: DENSITY_LAST_N,
        }
    }

    fn cubic() -> Self {
        DensityParams {
            alpha: RotationNumber::periodic(3),
            tail: RotationNumber::periodic(3),
            n_min: 1,
            n_max: 5,
            rule: ScheduleRule::Linear { slope: 1, offset: 3 },
            high_type: Some(3),
            ..Self::quadratic()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PersistenceParams {
    pub alpha: RotationNumber,
    /// `N`: the tail after `A_n` is `N, N, N, ...`.
    pub high_type: u64,
    pub n_min: usize,
    pub n_max: usize,
    pub n0: usize,
    pub rule: ScheduleRule,
    pub epsilon: f64,
    pub bbox: BboxSpec,
    pub resolution: usize,
    pub coarse_resolution: usize,
    pub horizon: usize,
    pub r_escape: f64,
}

impl Default for PersistenceParams {
    fn default() -> Self {
        PersistenceParams {
            alpha: RotationNumber::periodic(3),
            high_type: 3,
            n_min: 1,
            n_max: 6,
            n0: AREA_N0,
            rule: ScheduleRule::DoublyExponential { exponent: 1.5 },
            epsilon: 1.0 - AREA_RATIO_MIN,
            bbox: [-2.0, 0.9, -1.45, 1.45],
            resolution: 1024,
            coarse_resolution: 512,
            horizon: 1000,
            r_escape: 10.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeepPointParams {
    pub alpha: RotationNumber,
    pub order: usize,
    /// Normalized radius of the polyline standing in for the disk boundary.
    pub polyline_r: f64,
    pub polyline_points: usize,
    pub delta: f64,
    pub domain_resolution: usize,
    pub window_resolution: usize,
    /// Largest radius; the profile halves it `radii - 1` times.
    pub r0: f64,
    pub radii: usize,
    /// Boundary points `f^k(c)`, `k < boundary_points`, `c` the critical point.
    pub boundary_points: usize,
    pub horizon: usize,
    pub final_min: f64,
    pub noise: f64,
}

impl Default for DeepPointParams {
    fn default() -> Self {
        DeepPointParams {
            alpha: RotationNumber::golden(),
            order: 3000,
            polyline_r: 0.98,
            polyline_points: 4096,
            delta: 0.2,
            domain_resolution: 1024,
            window_resolution: 512,
            r0: 0.008,
            radii: 4,
            boundary_points: 5,
            horizon: 2000,
            final_min: DEEP_FINAL_MIN,
            noise: DEEP_NOISE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadraticLikeParams {
    pub thetas: Vec<RotationNumber>,
    pub degree: u32,
    pub epsilon: f64,
    pub samples: usize,
    pub start_radius: f64,
    pub max_doublings: usize,
    pub boundary_samples: usize,
    /// Extra informative runs (not part of the verdict).
    pub control_epsilons: Vec<f64>,
}

impl Default for QuadraticLikeParams {
    fn default() -> Self {
        QuadraticLikeParams {
            thetas: vec![RotationNumber::golden()],
            degree: 3,
            epsilon: 1e-3,
            samples: QUADRATIC_LIKE_SAMPLES,
            start_radius: 1.0,
            max_doublings: 12,
            boundary_samples: 512,
            control_epsilons: vec![0.0, 0.5],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SectorParams {
    pub alpha: RotationNumber,
    pub alpha_star: f64,
    pub validation: usize,
    pub multiplier_radius: f64,
    pub multiplier_directions: usize,
    pub order: usize,
    pub r: f64,
    pub polyline_points: usize,
    pub samples: usize,
    pub horizon: usize,
    pub im_top: f64,
    pub k1_max: usize,
}

impl Default for SectorParams {
    fn default() -> Self {
        SectorParams {
            alpha: RotationNumber::new(DigitStream::from_u64(&[0, 20], &[1]).expect("valid")).expect("valid"),
            alpha_star: dynlab_core::fatou::ALPHA_STAR,
            validation: 64,
            multiplier_radius: 1e-3,
            multiplier_directions: 8,
            order: 800,
            r: 0.8,
            polyline_points: 512,
            samples: 100,
            horizon: 50,
            im_top: 4.0,
            k1_max: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DimensionParams {
    pub alpha: RotationNumber,
    pub bbox: BboxSpec,
    pub resolutions: Vec<usize>,
    pub horizon: usize,
    pub r_escape: f64,
    /// Box sizes in cells of the coarsest grid; scaled up on finer grids.
    pub box_sizes: Vec<usize>,
    pub dimension_max: f64,
    pub drift_max: f64,
}

impl Default for DimensionParams {
    fn default() -> Self {
        DimensionParams {
            alpha: RotationNumber::golden(),
            bbox: [-2.0, 0.9, -1.45, 1.45],
            resolutions: vec![512, 1024, 2048],
            horizon: 1000,
            r_escape: 10.0,
            box_sizes: vec![1, 2, 4, 8, 16, 32],
            dimension_max: DIMENSION_MAX,
            drift_max: DIMENSION_DRIFT,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    Cf(CfParams),
    Siegel(SiegelParams),
    Area(AreaParams),
    Density(DensityParams),
    Persistence(PersistenceParams),
    DeepPoint(DeepPointParams),
    QuadraticLike(QuadraticLikeParams),
    Sector(SectorParams),
    Dimension(DimensionParams),
}

impl Params {
    pub fn default_for(id: ExperimentId) -> Params {
        match id {
            ExperimentId::Cf => Params::Cf(CfParams::default()),
            ExperimentId::Siegel => Params::Siegel(SiegelParams::default()),
            ExperimentId::Area => Params::Area(AreaParams::default()),
            ExperimentId::E1 => Params::Density(DensityParams::quadratic()),
            ExperimentId::E1b => Params::Density(DensityParams::cubic()),
            ExperimentId::E2 => Params::Persistence(PersistenceParams::default()),
            ExperimentId::E3 => Params::DeepPoint(DeepPointParams::default()),
            ExperimentId::E4 => Params::QuadraticLike(QuadraticLikeParams::default()),
            ExperimentId::E5 => Params::Sector(SectorParams::default()),
            ExperimentId::E6 => Params::Dimension(DimensionParams::default()),
        }
    }

    /// Missing fields fall back to the experiment's defaults.
    fn parse(id: ExperimentId, value: serde_json::Value) -> Result<Params, LabError> {
        let base = serde_json::to_value(Params::default_for(id)).expect("defaults serialize");
        let merged = merge(base, value);
        fn de<T: DeserializeOwned>(v: serde_json::Value) -> Result<T, LabError> {
            serde_json::from_value(v).map_err(|e| LabError::Config(format!("params: {e}")))
        }
        Ok(match id {
            ExperimentId::Cf => Params::Cf(de(merged)?),
            ExperimentId::Siegel => Params::Siegel(de(merged)?),
            ExperimentId::Area => Params::Area(de(merged)?),
            ExperimentId::E1 | ExperimentId::E1b => Params::Density(de(merged)?),
            ExperimentId::E2 => Params::Persistence(de(merged)?),
            ExperimentId::E3 => Params::DeepPoint(de(merged)?),
            ExperimentId::E4 => Params::QuadraticLike(de(merged)?),
            ExperimentId::E5 => Params::Sector(de(merged)?),
            ExperimentId::E6 => Params::Dimension(de(merged)?),
        })
    }
}

/// Overlays `patch` onto `base`, one object level at a time. Tagged values
/// (objects with `kind` or `family`) and digit streams are replaced whole.
fn merge(base: serde_json::Value, patch: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match (base, patch) {
        (Value::Object(mut b), Value::Object(p)) if !["kind", "family", "prefix", "period"].iter().any(|k| p.contains_key(*k)) => {
            for (k, v) in p {
                let merged = match b.remove(&k) {
                    Some(old) => merge(old, v),
                    None => v,
                };
                b.insert(k, merged);
            }
            Value::Object(b)
        }
        (_, p) => p,
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: ExperimentId,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    output: Option<PathBuf>,
    #[serde(default)]
    params: Option<serde_json::Value>,
}

/// A fully resolved, validated experiment configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub experiment: ExperimentId,
    /// Seeds sample-point selection only.
    pub seed: u64,
    pub params: Params,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl Config {
    pub fn default_for(id: ExperimentId) -> Config {
        Config { experiment: id, seed: 0, params: Params::default_for(id), output: None }
    }

    pub fn from_json(text: &str) -> Result<Config, LabError> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        Config::from_raw(raw)
    }

    pub fn from_toml(text: &str) -> Result<Config, LabError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        Config::from_raw(raw)
    }

    /// Chooses the parser by extension (`.toml`, anything else JSON).
    pub fn load(path: &Path) -> Result<Config, LabError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Config::from_toml(&text),
            _ => Config::from_json(&text),
        }
    }

    fn from_raw(raw: RawConfig) -> Result<Config, LabError> {
        let params = match raw.params {
            Some(v) => Params::parse(raw.experiment, v)?,
            None => Params::default_for(raw.experiment),
        };
        let cfg = Config { experiment: raw.experiment, seed: raw.seed, params, output: raw.output };
        cfg.validate()?;
        Ok(cfg)
    }

    /// SHA-256 of the canonical JSON form (output path excluded).
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn validate(&self) -> Result<(), LabError> {
        let expected = std::mem::discriminant(&Params::default_for(self.experiment));
        if std::mem::discriminant(&self.params) != expected {
            return Err(LabError::Config("params do not match the experiment".into()));
        }
        match &self.params {
            Params::Cf(p) => {
                check(p.terms >= 1 && p.terms <= 10_000, "terms must be in 1..=10000")?;
            }
            Params::Siegel(p) => {
                check(!p.orders.is_empty(), "orders must be nonempty")?;
                check(p.orders.iter().all(|&k| (8..=20_000).contains(&k)), "orders must be in 8..=20000")?;
                check(open_unit(p.residual_fraction), "residual_fraction must be in (0, 1)")?;
                check(p.residual_samples >= 8, "residual_samples must be >= 8")?;
            }
            Params::Area(p) => {
                check_bbox(&p.bbox)?;
                check_resolution(p.resolution)?;
                check(p.horizon >= 1, "horizon must be positive")?;
                check(p.r_escape > 2.0, "r_escape must exceed 2")?;
            }
            Params::Density(p) => {
                check(p.n_min >= 1 && p.n_min <= p.n_max, "need 1 <= n_min <= n_max")?;
                check(p.n_max <= 40, "n_max must be <= 40")?;
                check(!p.r_values.is_empty() && p.r_values.iter().all(|&r| open_unit(r)), "r_values must lie in (0, 1)")?;
                check_resolution(p.resolution)?;
                check(p.horizon >= 1 && p.horizon <= 1 << 30, "horizon out of range")?;
                check(p.order >= 16, "order must be >= 16")?;
                check(p.polyline_points >= 16, "polyline_points must be >= 16")?;
                check(p.margin > 0.0, "margin must be positive")?;
                check(p.last_n >= 1, "last_n must be positive")?;
                for w in &p.windows {
                    check_bbox(w)?;
                }
                check(!p.alpha.digits().period().is_empty() && !p.tail.digits().period().is_empty(), "alpha and tail must be infinite digit streams")?;
                if let Some(n) = p.high_type {
                    check(n >= 1, "high_type must be positive")?;
                }
            }
            Params::Persistence(p) => {
                check(p.n_min >= 1 && p.n_min <= p.n_max && p.n_max <= 12, "need 1 <= n_min <= n_max <= 12")?;
                check(p.high_type >= 1, "high_type must be positive")?;
                check(p.epsilon > 0.0 && p.epsilon <= 1.0, "epsilon must be in (0, 1]")?;
                check_bbox(&p.bbox)?;
                check_resolution(p.resolution)?;
                check_resolution(p.coarse_resolution)?;
                check(p.coarse_resolution < p.resolution, "coarse_resolution must be below resolution")?;
                check(p.horizon >= 1, "horizon must be positive")?;
                check(p.r_escape > 2.0, "r_escape must exceed 2")?;
            }
            Params::DeepPoint(p) => {
                check(p.order >= 16, "order must be >= 16")?;
                check(open_unit(p.polyline_r), "polyline_r must be in (0, 1)")?;
                check(p.polyline_points >= 16, "polyline_points must be >= 16")?;
                check(p.delta > 0.0, "delta must be positive")?;
                check_resolution(p.domain_resolution)?;
                check_resolution(p.window_resolution)?;
                check(p.r0 > 0.0, "r0 must be positive")?;
                check(p.radii >= 2, "radii must be >= 2")?;
                check(p.boundary_points >= 1, "boundary_points must be positive")?;
                check(p.horizon >= 1, "horizon must be positive")?;
            }
            Params::QuadraticLike(p) => {
                check(!p.thetas.is_empty(), "thetas must be nonempty")?;
                check((3..=8).contains(&p.degree), "degree must be in 3..=8")?;
                check(p.epsilon >= 0.0 && p.epsilon.is_finite(), "epsilon must be >= 0")?;
                check(p.samples >= 1, "samples must be positive")?;
                check(p.start_radius > 0.0, "start_radius must be positive")?;
                check(p.boundary_samples >= 8, "boundary_samples must be >= 8")?;
                check(p.control_epsilons.iter().all(|e| *e >= 0.0 && e.is_finite()), "control epsilons must be >= 0")?;
            }
            Params::Sector(p) => {
                check(p.alpha_star > 0.0 && p.alpha_star < 0.5, "alpha_star must be in (0, 0.5)")?;
                check(p.validation >= 4, "validation must be >= 4")?;
                check(p.multiplier_radius > 0.0, "multiplier_radius must be positive")?;
                check(p.multiplier_directions >= 1, "multiplier_directions must be positive")?;
                check(p.order >= 16, "order must be >= 16")?;
                check(open_unit(p.r), "r must be in (0, 1)")?;
                check(p.polyline_points >= 16, "polyline_points must be >= 16")?;
                check(p.samples >= 1 && p.horizon >= 1, "samples and horizon must be positive")?;
                check(p.k1_max >= 1, "k1_max must be positive")?;
            }
            Params::Dimension(p) => {
                check_bbox(&p.bbox)?;
                check(p.resolutions.len() >= 2, "need at least two resolutions")?;
                check(p.resolutions.windows(2).all(|w| w[0] < w[1]), "resolutions must increase")?;
                for &r in &p.resolutions {
                    check_resolution(r)?;
                    check(r % p.resolutions[0] == 0, "resolutions must be multiples of the first")?;
                }
                check(p.box_sizes.len() >= 4, "need at least four box sizes")?;
                check(p.box_sizes.iter().all(|&s| s >= 1), "box sizes must be positive")?;
                check(p.horizon >= 1, "horizon must be positive")?;
                check(p.r_escape > 2.0, "r_escape must exceed 2")?;
            }
        }
        Ok(())
    }
}

fn check(ok: bool, msg: &str) -> Result<(), LabError> {
    if ok {
        Ok(())
    } else {
        Err(LabError::Config(msg.into()))
    }
}

fn open_unit(x: f64) -> bool {
    x > 0.0 && x < 1.0
}

fn check_bbox(b: &BboxSpec) -> Result<(), LabError> {
    check(b.iter().all(|v| v.is_finite()) && b[0] < b[1] && b[2] < b[3], "bbox must be [re_min, re_max, im_min, im_max] with min < max")
}

fn check_resolution(r: usize) -> Result<(), LabError> {
    check((16..=8192).contains(&r), "resolution must be in 16..=8192")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_params_keep_defaults() {
        let c = Config::from_json(r#"{"experiment":"E1_density_quadratic","params":{"resolution":256}}"#).unwrap();
        let Params::Density(p) = &c.params else { panic!() };
        assert_eq!(p.resolution, 256);
        assert_eq!(p.horizon, 10_000);
        assert_eq!(p.alpha, RotationNumber::golden());
    }

    #[test]
    fn toml_and_json_agree() {
        let t = Config::from_toml(
            "experiment = \"E2_area_persistence\"\nseed = 4\n[params]\nresolution = 256\ncoarse_resolution = 128\n",
        )
        .unwrap();
        let j = Config::from_json(
            r#"{"experiment":"E2_area_persistence","seed":4,"params":{"resolution":256,"coarse_resolution":128}}"#,
        )
        .unwrap();
        assert_eq!(t, j);
        assert_eq!(t.hash(), j.hash());
    }

    #[test]
    fn hash_tracks_content_not_output() {
        let mut a = Config::default_for(ExperimentId::E4);
        let h = a.hash();
        a.output = Some("elsewhere".into());
        assert_eq!(a.hash(), h);
        a.seed = 1;
        assert_ne!(a.hash(), h);
    }

    #[test]
    fn rejects_bad_fields() {
        for bad in [
            r#"{"experiment":"E9"}"#,
            r#"{"experiment":"E4_quadratic_like","params":{"degree":2}}"#,
            r#"{"experiment":"E4_quadratic_like","params":{"bogus":1}}"#,
            r#"{"experiment":"E1_density_quadratic","params":{"r_values":[1.5]}}"#,
            r#"{"experiment":"E6_dimension","params":{"resolutions":[512,300]}}"#,
            r#"{"experiment":"E4_quadratic_like","extra":true}"#,
        ] {
            assert!(matches!(Config::from_json(bad), Err(LabError::Config(_))), "{bad}");
        }
    }

    #[test]
    fn schedule_rules() {
        let q = BigUint::from(10u8);
        assert_eq!(ScheduleRule::Linear { slope: 2, offset: 3 }.digit(4, &q).unwrap(), BigUint::from(11u8));
        let a = ScheduleRule::DoublyExponential { exponent: 1.5 }.digit(1, &q).unwrap();
        assert_eq!(a.bits(), 33); // 2^ceil(31.62)
    }

    #[test]
    fn tagged_values_replace_whole() {
        let c = Config::from_json(
            r#"{"experiment":"E2_area_persistence","params":{"rule":{"kind":"linear","slope":1,"offset":0}}}"#,
        )
        .unwrap();
        let Params::Persistence(p) = &c.params else { panic!() };
        assert_eq!(p.rule, ScheduleRule::Linear { slope: 1, offset: 0 });
    }
}
