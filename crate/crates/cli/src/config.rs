//! TOML scenario files.
//!
//! The file mirrors [`ScenarioSpec`] field for field, so any preset can be
//! written out, edited and read back without loss.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use vfcfc_core::control::ControllerConfig;
use vfcfc_core::geometry::{PathParams, PathSpec};
use vfcfc_core::plants::{
    ManipulatorGeometry, ManipulatorUncertainty, Mode, PvtolParams, Signal, Wave,
};
use vfcfc_core::presets::{ConstraintSpec, PlantSpec, ScenarioSpec};
use vfcfc_core::sim::ControllerKind;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub duration: f64,
    pub step: f64,
    /// Directory for the run artifacts; the command line flag wins.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    pub plant: PlantConfig,
    pub path: PathConfig,
    #[serde(default)]
    pub constraint: ConstraintConfig,
    pub guidance: GuidanceConfig,
    pub controller: ControllerSection,
    pub initial: InitialConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeConfig {
    Nominal,
    True,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveConfig {
    Sin,
    Cos,
}

/// `amplitude * wave(omega * t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalConfig {
    pub wave: WaveConfig,
    pub amplitude: f64,
    pub omega: f64,
}

impl Default for SignalConfig {
    fn default() -> Self {
        Signal::ZERO.into()
    }
}

impl From<Signal> for SignalConfig {
    fn from(s: Signal) -> Self {
        Self {
            wave: match s.wave {
                Wave::Sin => WaveConfig::Sin,
                Wave::Cos => WaveConfig::Cos,
            },
            amplitude: s.amplitude,
            omega: s.omega,
        }
    }
}

impl From<SignalConfig> for Signal {
    fn from(s: SignalConfig) -> Self {
        match s.wave {
            WaveConfig::Sin => Signal::sin(s.amplitude, s.omega),
            WaveConfig::Cos => Signal::cos(s.amplitude, s.omega),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PvtolUncertaintyConfig {
    pub dm: SignalConfig,
    pub dj: SignalConfig,
    pub dx: SignalConfig,
    pub dy: SignalConfig,
    pub dtheta: SignalConfig,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ManipulatorUncertaintyConfig {
    pub dj: SignalConfig,
    pub dm2: SignalConfig,
    pub dm3: SignalConfig,
    pub d: [SignalConfig; 3],
}

/// Missing uncertainty tables mean a perfectly known plant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlantConfig {
    Pvtol {
        mode: ModeConfig,
        m_bar: f64,
        j_bar: f64,
        g0: f64,
        #[serde(default)]
        uncertainty: PvtolUncertaintyConfig,
    },
    Manipulator {
        mode: ModeConfig,
        l1: f64,
        l2: f64,
        j_bar: f64,
        m2_bar: f64,
        m3_bar: f64,
        g0: f64,
        #[serde(default)]
        uncertainty: ManipulatorUncertaintyConfig,
    },
}

/// Catalog path by name; parameters left out take their catalog defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ra: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rb: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xc: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yc: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zc: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub major: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstraintConfig {
    #[default]
    Vfc,
    Ccfc {
        lambda: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuidanceConfig {
    /// 1-based coordinates of `q` that follow the path.
    pub selection: Vec<usize>,
    /// Vector-field gains, one per path coordinate.
    pub k: Vec<f64>,
    /// Constraint weight, row by row.
    pub p: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKindConfig {
    Nominal,
    AdaptiveRobust,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSection {
    pub kind: ControllerKindConfig,
    pub kappa: f64,
    pub mu: f64,
    pub l1: f64,
    pub l2: f64,
    pub eps_dz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub q: Vec<f64>,
    pub qdot: Vec<f64>,
    pub w: f64,
    /// Ignored by the nominal controller.
    #[serde(default)]
    pub alpha_hat: Vec<f64>,
}

fn mode_config(mode: Mode) -> ModeConfig {
    match mode {
        Mode::Nominal => ModeConfig::Nominal,
        Mode::True => ModeConfig::True,
    }
}

fn mode(m: ModeConfig) -> Mode {
    match m {
        ModeConfig::Nominal => Mode::Nominal,
        ModeConfig::True => Mode::True,
    }
}

fn path_config(spec: &PathSpec) -> PathConfig {
    let mut out = PathConfig {
        name: spec.name().to_string(),
        ..PathConfig::default()
    };
    match *spec {
        PathSpec::Sinusoid | PathSpec::Lemniscate => {}
        PathSpec::Cassini { ra, rb } => {
            out.ra = Some(ra);
            out.rb = Some(rb);
        }
        PathSpec::CylinderIntersection { r1, r2, xc, yc, zc } => {
            out.r1 = Some(r1);
            out.r2 = Some(r2);
            out.xc = Some(xc);
            out.yc = Some(yc);
            out.zc = Some(zc);
        }
        PathSpec::TorusKnot {
            major,
            minor,
            center,
        } => {
            out.major = Some(major);
            out.minor = Some(minor);
            out.center = Some(center);
        }
    }
    out
}

impl PathConfig {
    pub fn to_spec(&self) -> Result<PathSpec, CliError> {
        let params = PathParams {
            ra: self.ra,
            rb: self.rb,
            r1: self.r1,
            r2: self.r2,
            xc: self.xc,
            yc: self.yc,
            zc: self.zc,
            major: self.major,
            minor: self.minor,
            center: self.center,
        };
        Ok(PathSpec::from_name(&self.name, &params)?)
    }
}

impl From<&ScenarioSpec> for ScenarioConfig {
    fn from(spec: &ScenarioSpec) -> Self {
        let m = mode_config(spec.plant_mode);
        let plant = match spec.plant {
            PlantSpec::Pvtol(p) => PlantConfig::Pvtol {
                mode: m,
                m_bar: p.m_bar,
                j_bar: p.j_bar,
                g0: p.g0,
                uncertainty: PvtolUncertaintyConfig {
                    dm: p.dm.into(),
                    dj: p.dj.into(),
                    dx: p.dx.into(),
                    dy: p.dy.into(),
                    dtheta: p.dtheta.into(),
                },
            },
            PlantSpec::Manipulator {
                geometry: g,
                uncertainty: u,
            } => PlantConfig::Manipulator {
                mode: m,
                l1: g.l1,
                l2: g.l2,
                j_bar: g.j_bar,
                m2_bar: g.m2_bar,
                m3_bar: g.m3_bar,
                g0: g.g0,
                uncertainty: ManipulatorUncertaintyConfig {
                    dj: u.dj.into(),
                    dm2: u.dm2.into(),
                    dm3: u.dm3.into(),
                    d: u.d.map(SignalConfig::from),
                },
            },
        };
        ScenarioConfig {
            id: spec.id.clone(),
            description: spec.description.clone(),
            duration: spec.duration,
            step: spec.step,
            out_dir: None,
            plant,
            path: path_config(&spec.path),
            constraint: match &spec.constraint {
                ConstraintSpec::Vfc => ConstraintConfig::Vfc,
                ConstraintSpec::Ccfc { lambda } => ConstraintConfig::Ccfc {
                    lambda: lambda.clone(),
                },
            },
            guidance: GuidanceConfig {
                selection: spec.selection.clone(),
                k: spec.gvf_k.clone(),
                p: spec.p.clone(),
            },
            controller: ControllerSection {
                kind: match spec.controller {
                    ControllerKind::Nominal => ControllerKindConfig::Nominal,
                    ControllerKind::AdaptiveRobust => ControllerKindConfig::AdaptiveRobust,
                },
                kappa: spec.cfg.kappa,
                mu: spec.cfg.mu,
                l1: spec.cfg.l1,
                l2: spec.cfg.l2,
                eps_dz: spec.cfg.eps_dz,
            },
            initial: InitialConfig {
                q: spec.q0.clone(),
                qdot: spec.qdot0.clone(),
                w: spec.w0,
                alpha_hat: spec.alpha0.clone(),
            },
        }
    }
}

impl ScenarioConfig {
    /// Resolves catalog names and validates every parameter the core
    /// library can check without running anything.
    pub fn to_spec(&self) -> Result<ScenarioSpec, CliError> {
        let (plant, plant_mode) = match self.plant {
            PlantConfig::Pvtol {
                mode: m,
                m_bar,
                j_bar,
                g0,
                uncertainty: u,
            } => (
                PlantSpec::Pvtol(PvtolParams {
                    m_bar,
                    j_bar,
                    g0,
                    dm: u.dm.into(),
                    dj: u.dj.into(),
                    dx: u.dx.into(),
                    dy: u.dy.into(),
                    dtheta: u.dtheta.into(),
                }),
                mode(m),
            ),
            PlantConfig::Manipulator {
                mode: m,
                l1,
                l2,
                j_bar,
                m2_bar,
                m3_bar,
                g0,
                uncertainty: u,
            } => (
                PlantSpec::Manipulator {
                    geometry: ManipulatorGeometry {
                        l1,
                        l2,
                        j_bar,
                        m2_bar,
                        m3_bar,
                        g0,
                    },
                    uncertainty: ManipulatorUncertainty {
                        dj: u.dj.into(),
                        dm2: u.dm2.into(),
                        dm3: u.dm3.into(),
                        d: u.d.map(Signal::from),
                    },
                },
                mode(m),
            ),
        };
        let c = &self.controller;
        let cfg = ControllerConfig {
            kappa: c.kappa,
            mu: c.mu,
            l1: c.l1,
            l2: c.l2,
            eps_dz: c.eps_dz,
        };
        cfg.validate()?;
        let spec = ScenarioSpec {
            id: self.id.clone(),
            description: self.description.clone(),
            plant,
            plant_mode,
            path: self.path.to_spec()?,
            selection: self.guidance.selection.clone(),
            constraint: match &self.constraint {
                ConstraintConfig::Vfc => ConstraintSpec::Vfc,
                ConstraintConfig::Ccfc { lambda } => ConstraintSpec::Ccfc {
                    lambda: lambda.clone(),
                },
            },
            gvf_k: self.guidance.k.clone(),
            p: self.guidance.p.clone(),
            controller: match c.kind {
                ControllerKindConfig::Nominal => ControllerKind::Nominal,
                ControllerKindConfig::AdaptiveRobust => ControllerKind::AdaptiveRobust,
            },
            cfg,
            q0: self.initial.q.clone(),
            qdot0: self.initial.qdot.clone(),
            w0: self.initial.w,
            alpha0: self.initial.alpha_hat.clone(),
            duration: self.duration,
            step: self.step,
        };
        // surface bad plant and path parameters before anything runs
        spec.plant.build()?;
        spec.path.build()?;
        spec.p_matrix()?;
        Ok(spec)
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario config always serializes")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text).map_err(|source| CliError::Config {
            path: path.to_path_buf(),
            source: Box::new(source),
        })
    }
}
