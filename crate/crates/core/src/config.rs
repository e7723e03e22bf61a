//! Scenario files (TOML).
//!
//! A file maps one-to-one onto [`ScenarioConfig`]; unknown keys are rejected
//! and every numeric field is range-checked before a run starts.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::controllers::{CMinMode, ControlGains, SensingRange};
use crate::density::{Covariance2, DensityField, GaussianComponent, MIN_GRID_RESOLUTION};
use crate::geometry::{ConvexPolygon, Point2};

/// The bundled three-team scenario: 12 ground robots, 4 aerial robots,
/// 0.3 m sensing radius, bimodal density on a 3.2 m × 2.0 m arena.
pub const BUNDLED_DEFAULT: &str = include_str!("../configs/three_scenario.toml");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControllerKind {
    UnlimitedLloyd,
    LimitedLloyd,
    Heterogeneous,
}

impl ControllerKind {
    pub const ALL: [ControllerKind; 3] = [
        ControllerKind::UnlimitedLloyd,
        ControllerKind::LimitedLloyd,
        ControllerKind::Heterogeneous,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ControllerKind::UnlimitedLloyd => "unlimited-lloyd",
            ControllerKind::LimitedLloyd => "limited-lloyd",
            ControllerKind::Heterogeneous => "heterogeneous",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unlimited {
    Unlimited,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RadiusSetting {
    Meters(f64),
    Keyword(Unlimited),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InverseN {
    #[serde(rename = "1/N")]
    InverseN,
}

/// Deadband on the clamped weight: a number, or `"1/N"`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeadbandSetting {
    Value(f64),
    Keyword(InverseN),
}

impl Default for DeadbandSetting {
    fn default() -> Self {
        DeadbandSetting::Keyword(InverseN::InverseN)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CMinSetting {
    #[default]
    Geometric,
    Mass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsSpec {
    pub kappa: f64,
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub weight: f64,
    pub mean: [f64; 2],
    /// `[xx, xy, yy]`
    pub covariance: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DensitySpec {
    Uniform,
    GaussianMixture { components: Vec<ComponentSpec> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GroundInit {
    /// Uniform over the domain.
    Uniform,
    /// Uniform over the part of a disc inside the domain.
    Disc {
        center: [f64; 2],
        radius: f64,
    },
    Explicit {
        positions: Vec<[f64; 2]>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub ground: GroundInit,
    /// Starting aerial sites; drawn uniformly when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aerial: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub controller: ControllerKind,
    pub n_ground: usize,
    pub k_aerial: usize,
    pub sensing_radius: RadiusSetting,
    pub dt: f64,
    pub max_speed: f64,
    pub max_iterations: usize,
    pub convergence_eps: f64,
    #[serde(default)]
    pub deadband: DeadbandSetting,
    #[serde(default)]
    pub c_min: CMinSetting,
    pub domain: DomainSpec,
    pub gains: GainsSpec,
    pub grid: GridSpec,
    pub density: DensitySpec,
    pub initial: InitialSpec,
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(
            field,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let config: ScenarioConfig =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn bundled_default() -> Self {
        Self::from_toml_str(BUNDLED_DEFAULT).expect("bundled config is valid")
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario config serializes")
    }

    /// Hex SHA-256 of the canonical TOML form.
    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn with_controller(&self, controller: ControllerKind) -> Self {
        Self {
            controller,
            ..self.clone()
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_ground < 1 {
            return Err(invalid("n_ground", "need at least one ground robot"));
        }
        if self.controller == ControllerKind::Heterogeneous && self.k_aerial < 1 {
            return Err(invalid(
                "k_aerial",
                "the heterogeneous controller needs at least one aerial robot",
            ));
        }
        if let RadiusSetting::Meters(r) = self.sensing_radius {
            positive("sensing_radius", r)?;
        }
        positive("dt", self.dt)?;
        positive("max_speed", self.max_speed)?;
        positive("convergence_eps", self.convergence_eps)?;
        if self.max_iterations < 1 {
            return Err(invalid("max_iterations", "must be at least 1"));
        }
        if let DeadbandSetting::Value(d) = self.deadband {
            if !(d >= 0.0) || !d.is_finite() {
                return Err(invalid("deadband", format!("must be nonnegative, got {d}")));
            }
        }
        let d = &self.domain;
        if ![d.x_min, d.x_max, d.y_min, d.y_max]
            .iter()
            .all(|v| v.is_finite())
            || d.x_max <= d.x_min
            || d.y_max <= d.y_min
        {
            return Err(invalid("domain", "need finite bounds with min < max"));
        }
        positive("gains.kappa", self.gains.kappa)?;
        positive("gains.gamma", self.gains.gamma)?;
        if self.grid.nx < MIN_GRID_RESOLUTION || self.grid.ny < MIN_GRID_RESOLUTION {
            return Err(invalid(
                "grid",
                format!("nx and ny must be at least {MIN_GRID_RESOLUTION}"),
            ));
        }
        if let DensitySpec::GaussianMixture { components } = &self.density {
            if components.is_empty() {
                return Err(invalid("density.components", "mixture needs a component"));
            }
            if components.iter().all(|c| c.weight == 0.0) {
                return Err(invalid("density.components", "all weights are zero"));
            }
            for (i, c) in components.iter().enumerate() {
                if !(c.weight >= 0.0) || !c.weight.is_finite() {
                    return Err(invalid(
                        format!("density.components[{i}].weight"),
                        "must be finite and nonnegative",
                    ));
                }
                if !c.mean.iter().all(|v| v.is_finite()) {
                    return Err(invalid(
                        format!("density.components[{i}].mean"),
                        "must be finite",
                    ));
                }
                let [xx, xy, yy] = c.covariance;
                if Covariance2::new(xx, xy, yy).is_err() {
                    return Err(invalid(
                        format!("density.components[{i}].covariance"),
                        "must be symmetric positive-definite",
                    ));
                }
            }
        }
        let domain = self.domain_polygon();
        let inside = |p: &[f64; 2]| domain.contains(Point2::new(p[0], p[1]), 0.0);
        match &self.initial.ground {
            GroundInit::Uniform => {}
            GroundInit::Disc { center, radius } => {
                positive("initial.ground.radius", *radius)?;
                if !inside(center) {
                    return Err(invalid(
                        "initial.ground.center",
                        "must lie inside the domain",
                    ));
                }
            }
            GroundInit::Explicit { positions } => {
                if positions.len() != self.n_ground {
                    return Err(invalid(
                        "initial.ground.positions",
                        format!(
                            "expected {} positions, got {}",
                            self.n_ground,
                            positions.len()
                        ),
                    ));
                }
                if !positions.iter().all(inside) {
                    return Err(invalid(
                        "initial.ground.positions",
                        "all must lie inside the domain",
                    ));
                }
            }
        }
        if let Some(aerial) = &self.initial.aerial {
            if aerial.len() != self.k_aerial {
                return Err(invalid(
                    "initial.aerial",
                    format!("expected {} positions, got {}", self.k_aerial, aerial.len()),
                ));
            }
            if !aerial.iter().all(inside) {
                return Err(invalid("initial.aerial", "all must lie inside the domain"));
            }
        }
        Ok(())
    }

    pub fn domain_polygon(&self) -> ConvexPolygon {
        let d = &self.domain;
        ConvexPolygon::rectangle(Point2::new(d.x_min, d.y_min), Point2::new(d.x_max, d.y_max))
            .expect("validated domain bounds")
    }

    /// The configured density, not yet normalized.
    pub fn density_field(&self) -> Result<DensityField, ConfigError> {
        let domain = self.domain_polygon();
        match &self.density {
            DensitySpec::Uniform => Ok(DensityField::uniform(domain)),
            DensitySpec::GaussianMixture { components } => {
                let components = components
                    .iter()
                    .map(|c| {
                        let [xx, xy, yy] = c.covariance;
                        Ok(GaussianComponent {
                            weight: c.weight,
                            mean: Point2::new(c.mean[0], c.mean[1]),
                            covariance: Covariance2::new(xx, xy, yy)
                                .map_err(|e| invalid("density.components", e.to_string()))?,
                        })
                    })
                    .collect::<Result<Vec<_>, ConfigError>>()?;
                DensityField::gaussian_mixture(domain, components)
                    .map_err(|e| invalid("density", e.to_string()))
            }
        }
    }

    pub fn gains(&self) -> ControlGains {
        ControlGains {
            kappa: self.gains.kappa,
            gamma: self.gains.gamma,
        }
    }

    pub fn deadband_value(&self) -> f64 {
        match self.deadband {
            DeadbandSetting::Value(d) => d,
            DeadbandSetting::Keyword(InverseN::InverseN) => 1.0 / self.n_ground as f64,
        }
    }

    pub fn c_min_mode(&self) -> CMinMode {
        match self.c_min {
            CMinSetting::Geometric => CMinMode::GeometricCenter,
            CMinSetting::Mass => CMinMode::MassCenter,
        }
    }

    /// Sensing of the ground team under the configured controller.
    pub fn ground_sensing(&self) -> SensingRange {
        match (self.controller, self.sensing_radius) {
            (ControllerKind::UnlimitedLloyd, _) | (_, RadiusSetting::Keyword(_)) => {
                SensingRange::Unlimited
            }
            (_, RadiusSetting::Meters(r)) => SensingRange::Limited(r),
        }
    }
}
