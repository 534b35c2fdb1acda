//! Strict JSON configuration for scenario runs.
//!
//! Parsing is layered: serde enforces structure and rejects unknown keys, so
//! a typo in a physics parameter fails instead of silently running defaults;
//! `ScenarioConfig::build` then checks the semantic rules and reports every
//! violation at once, each keyed by the JSON path of the offending field.

use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use curvphase_core::geometry::{self, CurvatureProfile, ThermoParams};
use curvphase_core::gravity::PhysicalConstants;
use curvphase_core::model::QuantumModel;
use curvphase_core::phase::BoundsReading;

use crate::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ScenarioConfig {
    pub model: ModelConfig,
    pub profile: ProfileConfig,
    pub thermo: ThermoConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsConfig>,
    pub run: RunConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<OutputsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ModelConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_energy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tilt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge_rates: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_coupling: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone_angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ProfileConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    /// Alternative to `period`: the angular sweep rate `2 pi / period`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angular_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ThermoConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConstantsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planck_length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<u32>,
    /// Redundant override; must agree with `8 pi G / c^4`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
    #[serde(default)]
    pub initial_index: IndexChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds_reading: Option<BoundsChoice>,
}

/// Either a fixed level index or the keyword `"auto"`, which selects the
/// level from the steering parameter at the start time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum IndexChoice {
    #[default]
    Auto,
    Fixed(usize),
}

impl Serialize for IndexChoice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            IndexChoice::Auto => s.serialize_str("auto"),
            IndexChoice::Fixed(j) => s.serialize_u64(*j as u64),
        }
    }
}

impl<'de> Deserialize<'de> for IndexChoice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::String(s) if s == "auto" => Ok(IndexChoice::Auto),
            serde_json::Value::Number(n) => match n.as_u64() {
                Some(j) => Ok(IndexChoice::Fixed(j as usize)),
                None => Err(serde::de::Error::custom(format!(
                    "initial-index: expected a nonnegative integer or \"auto\", got {n}"
                ))),
            },
            other => Err(serde::de::Error::custom(format!(
                "initial-index: expected a nonnegative integer or \"auto\", got {other}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundsChoice {
    Gamma,
    Curvature,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct OutputsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correspondence: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot_data: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ReductionConfig {
    pub states: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<SensitivityConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correspondence: Option<CorrespondenceConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ScanConfig {
    /// Decimal integer, arbitrary size.
    pub start: String,
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stride: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SensitivityConfig {
    /// Decimal integer, arbitrary size.
    pub scale: String,
    pub radius: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CorrespondenceConfig {
    pub samples: usize,
    pub source: CorrespondenceSource,
    /// Seed for the `random` source.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Whole-period offset multiple for the `steering` source.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset_multiple: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrespondenceSource {
    /// Scales built from the steering index, so agreement holds by
    /// construction.
    Steering,
    /// Scales drawn independently of the drive.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SweepConfig {
    /// Dotted JSON path of the swept field, e.g. `"profile.angular-rate"`.
    pub parameter: String,
    pub values: Vec<f64>,
}

/// Fully constructed scenario: every config table resolved through the core
/// constructors, the initial index fixed, big integers parsed.
#[derive(Debug, Clone)]
pub struct BuiltScenario {
    pub model: QuantumModel,
    pub profile: CurvatureProfile,
    pub thermo: ThermoParams,
    pub constants: PhysicalConstants,
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
    pub initial_index: usize,
    pub bounds: BoundsReading,
    pub reduction: Option<ReductionPlan>,
}

#[derive(Debug, Clone)]
pub struct ReductionPlan {
    pub states: usize,
    pub scan: Option<ScanPlan>,
    pub sensitivity: Option<SensitivityPlan>,
    pub correspondence: Option<CorrespondencePlan>,
}

#[derive(Debug, Clone)]
pub struct ScanPlan {
    pub start: BigUint,
    pub count: usize,
    pub stride: BigUint,
}

#[derive(Debug, Clone)]
pub struct SensitivityPlan {
    pub scale: BigUint,
    pub radius: u32,
}

#[derive(Debug, Clone)]
pub struct CorrespondencePlan {
    pub samples: usize,
    pub source: CorrespondenceSource,
    pub seed: u64,
    pub offset_multiple: u64,
}

impl ScenarioConfig {
    pub fn from_json_str(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| CliError::Validation(format!("invalid config: {e}")))
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        serde_json::from_value(value)
            .map_err(|e| CliError::Validation(format!("invalid config: {e}")))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// Resolve every table through the core constructors, collecting all
    /// violations instead of stopping at the first.
    pub fn build(&self) -> Result<BuiltScenario> {
        let mut issues = Vec::new();
        let model = build_model(&self.model, &mut issues);
        let profile = build_profile(&self.profile, &mut issues);
        let constants = build_constants(self.constants.as_ref(), &mut issues);
        let thermo = build_thermo(&self.thermo, &mut issues);

        if !self.run.t0.is_finite() || !self.run.t1.is_finite() {
            issues.push(format!(
                "run.t0/run.t1: must be finite, got {} and {}",
                self.run.t0, self.run.t1
            ));
        } else if self.run.t1 <= self.run.t0 {
            issues.push(format!(
                "run.t1: must exceed t0, got [{}, {}]",
                self.run.t0, self.run.t1
            ));
        }
        if self.run.steps < 10 {
            issues.push(format!("run.steps: need at least 10, got {}", self.run.steps));
        }

        let initial_index = match (&model, &profile, &thermo) {
            (Some(m), Some(p), Some(th)) => match self.run.initial_index {
                IndexChoice::Fixed(j) => {
                    if j >= m.dim() {
                        issues.push(format!(
                            "run.initial-index: level {j} outside 0..{}",
                            m.dim()
                        ));
                        None
                    } else {
                        Some(j)
                    }
                }
                IndexChoice::Auto => match geometry::gamma_at(p, th, self.run.t0)
                    .and_then(|gamma| geometry::initial_index(gamma, m.dim()))
                {
                    Ok(j) => Some(j),
                    Err(e) => {
                        issues.push(format!("run.initial-index: auto selection failed: {e}"));
                        None
                    }
                },
            },
            _ => None,
        };

        let reduction = match &self.reduction {
            Some(r) => build_reduction(r, &mut issues),
            None => None,
        };

        if let Some(outputs) = &self.outputs {
            let scan_configured =
                self.reduction.as_ref().is_some_and(|r| r.scan.is_some());
            let corr_configured =
                self.reduction.as_ref().is_some_and(|r| r.correspondence.is_some());
            if outputs.histogram.is_some() && !scan_configured {
                issues.push("outputs.histogram: requires a reduction.scan table".into());
            }
            if outputs.correspondence.is_some() && !corr_configured {
                issues.push(
                    "outputs.correspondence: requires a reduction.correspondence table".into(),
                );
            }
        }

        if let Some(sweep) = &self.sweep {
            if sweep.values.len() < 2 {
                issues.push(format!(
                    "sweep.values: need at least 2 values, got {}",
                    sweep.values.len()
                ));
            }
            if let Some(bad) = sweep.values.iter().find(|v| !v.is_finite()) {
                issues.push(format!("sweep.values: must be finite, got {bad}"));
            }
        }

        if !issues.is_empty() {
            return Err(CliError::Validation(format!("invalid config: {}", issues.join("; "))));
        }
        Ok(BuiltScenario {
            model: model.expect("validated"),
            profile: profile.expect("validated"),
            thermo: thermo.expect("validated"),
            constants: constants.expect("validated"),
            t0: self.run.t0,
            t1: self.run.t1,
            steps: self.run.steps,
            initial_index: initial_index.expect("validated"),
            bounds: match self.run.bounds_reading.unwrap_or(BoundsChoice::Gamma) {
                BoundsChoice::Gamma => BoundsReading::Gamma,
                BoundsChoice::Curvature => BoundsReading::Curvature,
            },
            reduction,
        })
    }
}

fn require(issues: &mut Vec<String>, table: &str, name: &str, kind: &str, v: Option<f64>) -> f64 {
    match v {
        Some(x) => x,
        None => {
            issues.push(format!("{table}.{name}: required for kind {kind}"));
            f64::NAN
        }
    }
}

fn forbid(issues: &mut Vec<String>, table: &str, name: &str, kind: &str, present: bool) {
    if present {
        issues.push(format!("{table}.{name}: not a {kind} parameter"));
    }
}

fn build_model(cfg: &ModelConfig, issues: &mut Vec<String>) -> Option<QuantumModel> {
    let before = issues.len();
    let kind = cfg.kind.as_str();
    let result = match kind {
        "gauge-ladder" | "beta-ladder" => {
            let base = require(issues, "model", "base-energy", kind, cfg.base_energy);
            let spacing = require(issues, "model", "spacing", kind, cfg.spacing);
            let tilt = require(issues, "model", "tilt", kind, cfg.tilt);
            let rates = match &cfg.gauge_rates {
                Some(r) => r.clone(),
                None => {
                    issues.push(format!("model.gauge-rates: required for kind {kind}"));
                    vec![]
                }
            };
            forbid(issues, "model", "cone-angle", kind, cfg.cone_angle.is_some());
            forbid(issues, "model", "field", kind, cfg.field.is_some());
            if kind == "gauge-ladder" {
                forbid(issues, "model", "beta-coupling", kind, cfg.beta_coupling.is_some());
                if issues.len() > before {
                    return None;
                }
                QuantumModel::gauge_ladder(base, spacing, tilt, rates)
            } else {
                let eta = require(issues, "model", "beta-coupling", kind, cfg.beta_coupling);
                if issues.len() > before {
                    return None;
                }
                QuantumModel::beta_ladder(base, spacing, tilt, rates, eta)
            }
        }
        "spin-cone" => {
            let angle = require(issues, "model", "cone-angle", kind, cfg.cone_angle);
            let field = require(issues, "model", "field", kind, cfg.field);
            forbid(issues, "model", "base-energy", kind, cfg.base_energy.is_some());
            forbid(issues, "model", "spacing", kind, cfg.spacing.is_some());
            forbid(issues, "model", "tilt", kind, cfg.tilt.is_some());
            forbid(issues, "model", "gauge-rates", kind, cfg.gauge_rates.is_some());
            forbid(issues, "model", "beta-coupling", kind, cfg.beta_coupling.is_some());
            if issues.len() > before {
                return None;
            }
            QuantumModel::spin_cone(angle, field)
        }
        other => {
            issues.push(format!(
                "model.kind: unknown kind {other:?}, expected gauge-ladder, beta-ladder, or spin-cone"
            ));
            return None;
        }
    };
    match result {
        Ok(m) => Some(m),
        Err(e) => {
            issues.push(format!("model: {e}"));
            None
        }
    }
}

fn build_profile(cfg: &ProfileConfig, issues: &mut Vec<String>) -> Option<CurvatureProfile> {
    let before = issues.len();
    let kind = cfg.kind.as_str();
    let base = require(issues, "profile", "base", kind, cfg.base);
    let result = match kind {
        "constant" => {
            for (name, set) in [
                ("rate", cfg.rate.is_some()),
                ("amplitude", cfg.amplitude.is_some()),
                ("period", cfg.period.is_some()),
                ("angular-rate", cfg.angular_rate.is_some()),
                ("center", cfg.center.is_some()),
                ("width", cfg.width.is_some()),
            ] {
                forbid(issues, "profile", name, kind, set);
            }
            if issues.len() > before {
                return None;
            }
            CurvatureProfile::constant(base)
        }
        "linear-ramp" => {
            let rate = require(issues, "profile", "rate", kind, cfg.rate);
            for (name, set) in [
                ("amplitude", cfg.amplitude.is_some()),
                ("period", cfg.period.is_some()),
                ("angular-rate", cfg.angular_rate.is_some()),
                ("center", cfg.center.is_some()),
                ("width", cfg.width.is_some()),
            ] {
                forbid(issues, "profile", name, kind, set);
            }
            if issues.len() > before {
                return None;
            }
            CurvatureProfile::linear_ramp(base, rate)
        }
        "sinusoidal" => {
            let amplitude = require(issues, "profile", "amplitude", kind, cfg.amplitude);
            let period = match (cfg.period, cfg.angular_rate) {
                (Some(p), None) => p,
                (None, Some(w)) if w.is_finite() && w > 0.0 => std::f64::consts::TAU / w,
                (None, Some(w)) => {
                    issues.push(format!("profile.angular-rate: must be positive, got {w}"));
                    f64::NAN
                }
                (Some(_), Some(_)) => {
                    issues
                        .push("profile.period: give either period or angular-rate, not both".into());
                    f64::NAN
                }
                (None, None) => {
                    issues.push(format!("profile.period: required for kind {kind}"));
                    f64::NAN
                }
            };
            forbid(issues, "profile", "rate", kind, cfg.rate.is_some());
            forbid(issues, "profile", "center", kind, cfg.center.is_some());
            forbid(issues, "profile", "width", kind, cfg.width.is_some());
            if issues.len() > before {
                return None;
            }
            CurvatureProfile::sinusoidal(base, amplitude, period)
        }
        "gaussian-pulse" => {
            let amplitude = require(issues, "profile", "amplitude", kind, cfg.amplitude);
            let center = require(issues, "profile", "center", kind, cfg.center);
            let width = require(issues, "profile", "width", kind, cfg.width);
            forbid(issues, "profile", "rate", kind, cfg.rate.is_some());
            forbid(issues, "profile", "period", kind, cfg.period.is_some());
            forbid(issues, "profile", "angular-rate", kind, cfg.angular_rate.is_some());
            if issues.len() > before {
                return None;
            }
            CurvatureProfile::gaussian_pulse(base, amplitude, center, width)
        }
        other => {
            issues.push(format!(
                "profile.kind: unknown kind {other:?}, expected constant, linear-ramp, sinusoidal, or gaussian-pulse"
            ));
            return None;
        }
    };
    let profile = match result {
        Ok(p) => p,
        Err(e) => {
            issues.push(format!("profile: {e}"));
            return None;
        }
    };
    match cfg.interval {
        Some([lo, hi]) => match profile.with_interval(lo, hi) {
            Ok(p) => Some(p),
            Err(e) => {
                issues.push(format!("profile.interval: {e}"));
                None
            }
        },
        None => Some(profile),
    }
}

fn build_thermo(cfg: &ThermoConfig, issues: &mut Vec<String>) -> Option<ThermoParams> {
    let k_b = cfg.k_b.unwrap_or(1.0);
    let built = match (cfg.beta, cfg.temperature) {
        (Some(beta), None) => ThermoParams::from_beta(beta, k_b),
        (None, Some(t)) => ThermoParams::from_temperature(t, k_b),
        (Some(_), Some(_)) => {
            issues.push("thermo: give either beta or temperature, not both".into());
            return None;
        }
        (None, None) => {
            issues.push("thermo: one of beta or temperature is required".into());
            return None;
        }
    };
    let built = match built {
        Ok(t) => t,
        Err(e) => {
            issues.push(format!("thermo: {e}"));
            return None;
        }
    };
    match cfg.gamma_scale {
        Some(scale) => match built.with_gamma_scale(scale) {
            Ok(t) => Some(t),
            Err(e) => {
                issues.push(format!("thermo.gamma-scale: {e}"));
                None
            }
        },
        None => Some(built),
    }
}

fn build_constants(
    cfg: Option<&ConstantsConfig>,
    issues: &mut Vec<String>,
) -> Option<PhysicalConstants> {
    let defaults = ConstantsConfig {
        g: None,
        c: None,
        hbar: None,
        k_b: None,
        planck_length: None,
        dimension: None,
        kappa: None,
    };
    let cfg = cfg.unwrap_or(&defaults);
    let g = cfg.g.unwrap_or(1.0);
    let c = cfg.c.unwrap_or(1.0);
    let hbar = cfg.hbar.unwrap_or(1.0);
    let k_b = cfg.k_b.unwrap_or(1.0);
    let planck_length = cfg.planck_length.unwrap_or(1.0);
    let dimension = cfg.dimension.unwrap_or(4);
    let built = match cfg.kappa {
        Some(kappa) => {
            PhysicalConstants::with_kappa(g, c, hbar, k_b, planck_length, dimension, kappa)
        }
        None => PhysicalConstants::new(g, c, hbar, k_b, planck_length, dimension),
    };
    match built {
        Ok(pc) => Some(pc),
        Err(e) => {
            issues.push(format!("constants: {e}"));
            None
        }
    }
}

fn parse_big(issues: &mut Vec<String>, path: &str, digits: &str) -> Option<BigUint> {
    match BigUint::from_str(digits) {
        Ok(v) => Some(v),
        Err(_) => {
            issues.push(format!("{path}: not a decimal integer: {digits:?}"));
            None
        }
    }
}

fn build_reduction(cfg: &ReductionConfig, issues: &mut Vec<String>) -> Option<ReductionPlan> {
    let before = issues.len();
    if cfg.states == 0 {
        issues.push("reduction.states: need at least one basis state".into());
    }
    let scan = cfg.scan.as_ref().and_then(|s| {
        let start = parse_big(issues, "reduction.scan.start", &s.start);
        let stride = match &s.stride {
            Some(d) => parse_big(issues, "reduction.scan.stride", d),
            None => Some(BigUint::from(1u32)),
        };
        if cfg.states > 0 && s.count < 10 * cfg.states {
            issues.push(format!(
                "reduction.scan.count: need at least 10 per residue class, got {} for {} states",
                s.count, cfg.states
            ));
        }
        if let Some(stride) = &stride {
            if *stride == BigUint::from(0u32) {
                issues.push("reduction.scan.stride: must be positive".into());
            }
        }
        Some(ScanPlan { start: start?, count: s.count, stride: stride? })
    });
    let sensitivity = cfg.sensitivity.as_ref().and_then(|s| {
        if s.radius == 0 {
            issues.push("reduction.sensitivity.radius: must be at least 1".into());
        }
        Some(SensitivityPlan { scale: parse_big(issues, "reduction.sensitivity.scale", &s.scale)?, radius: s.radius })
    });
    let correspondence = cfg.correspondence.as_ref().map(|c| {
        if c.samples < 2 {
            issues.push(format!(
                "reduction.correspondence.samples: need at least 2, got {}",
                c.samples
            ));
        }
        match c.source {
            CorrespondenceSource::Steering => {
                if c.seed.is_some() {
                    issues.push(
                        "reduction.correspondence.seed: only meaningful for source random".into(),
                    );
                }
            }
            CorrespondenceSource::Random => {
                if c.offset_multiple.is_some() {
                    issues.push(
                        "reduction.correspondence.offset-multiple: only meaningful for source steering"
                            .into(),
                    );
                }
            }
        }
        CorrespondencePlan {
            samples: c.samples,
            source: c.source,
            seed: c.seed.unwrap_or(0),
            offset_multiple: c.offset_multiple.unwrap_or(1),
        }
    });
    if issues.len() > before {
        return None;
    }
    Some(ReductionPlan { states: cfg.states, scan, sensitivity, correspondence })
}
