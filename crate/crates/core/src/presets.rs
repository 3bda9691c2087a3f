//! Plain-data scenario descriptions and the bundled experiment catalog.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::analysis::{error_series, ErrorSeries, TaskMap};
use crate::constraint::{CcfcConstraint, VfcContext};
use crate::control::{BoundFunction, ControllerConfig};
use crate::error::{Error, Result};
use crate::geometry::{make_selection_matrix, ParametricPath, PathSpec};
use crate::plants::{
    fk_closed_form, joint_path_from_task, manipulator, pvtol, ManipulatorGeometry,
    ManipulatorUncertainty, MechanicalSystem, Mode, PvtolParams,
};
use crate::sim::{ControllerKind, Scenario, SimState, DEFAULT_DURATION, DEFAULT_STEP};
use crate::vectorfield::GvfGains;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlantSpec {
    Pvtol(PvtolParams),
    Manipulator {
        geometry: ManipulatorGeometry,
        uncertainty: ManipulatorUncertainty,
    },
}

impl PlantSpec {
    pub fn name(&self) -> &'static str {
        match self {
            PlantSpec::Pvtol(_) => "pvtol",
            PlantSpec::Manipulator { .. } => "manipulator",
        }
    }

    pub fn build(&self) -> Result<Arc<dyn MechanicalSystem>> {
        Ok(match *self {
            PlantSpec::Pvtol(p) => Arc::new(pvtol(p)?),
            PlantSpec::Manipulator {
                geometry,
                uncertainty,
            } => Arc::new(manipulator(geometry, uncertainty)?),
        })
    }

    /// Bound function used by the robust term for this plant family.
    pub fn bound(&self) -> BoundFunction {
        match self {
            PlantSpec::Pvtol(_) => BoundFunction::Pvtol,
            PlantSpec::Manipulator { .. } => BoundFunction::Manipulator,
        }
    }
}

/// Which servo constraint encodes the path.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintSpec {
    /// Vector-field guided constraint.
    Vfc,
    /// Conventional constraint from the implicit surfaces, with gains
    /// `lambda`. Only usable for feasibility checks.
    Ccfc { lambda: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub id: String,
    pub description: String,
    pub plant: PlantSpec,
    pub plant_mode: Mode,
    /// Physical path; for the manipulator it lives in task space and is
    /// pulled back through `ik`.
    pub path: PathSpec,
    /// 1-based indices of the path coordinates in `q`.
    pub selection: Vec<usize>,
    pub constraint: ConstraintSpec,
    pub gvf_k: Vec<f64>,
    /// Rows of the constraint weight `P`.
    pub p: Vec<Vec<f64>>,
    pub controller: ControllerKind,
    pub cfg: ControllerConfig,
    pub q0: Vec<f64>,
    pub qdot0: Vec<f64>,
    pub w0: f64,
    /// Initial adaptive estimate; ignored by the nominal controller.
    pub alpha0: Vec<f64>,
    pub duration: f64,
    pub step: f64,
}

/// Task-space view of a joint-space scenario.
#[derive(Clone)]
pub struct TaskSpace {
    pub path: ParametricPath,
    pub geometry: ManipulatorGeometry,
}

/// A scenario description turned into runnable objects.
#[derive(Clone)]
pub struct Prepared {
    pub scenario: Scenario,
    pub task: Option<TaskSpace>,
}

impl Prepared {
    pub fn error_series(&self, log: &crate::sim::TrajectoryLog) -> Result<ErrorSeries> {
        match &self.task {
            None => error_series(log, &self.scenario.ctx, None),
            Some(task) => {
                let geom = task.geometry;
                let map = move |theta: &DVector<f64>| fk_closed_form(theta, &geom);
                let tm = TaskMap {
                    path: &task.path,
                    map: &map,
                };
                error_series(log, &self.scenario.ctx, Some(&tm))
            }
        }
    }
}

impl ScenarioSpec {
    pub fn p_matrix(&self) -> Result<DMatrix<f64>> {
        let m = self.p.len();
        if self.p.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidParameter {
                name: "p",
                reason: "must be a square matrix".into(),
            });
        }
        Ok(DMatrix::from_fn(m, m, |i, j| self.p[i][j]))
    }

    /// Physical path and, for the manipulator, the task-space view.
    pub fn paths(&self) -> Result<(ParametricPath, Option<TaskSpace>)> {
        let physical = self.path.build()?;
        match self.plant {
            PlantSpec::Pvtol(_) => Ok((physical, None)),
            PlantSpec::Manipulator { geometry, .. } => {
                let joint = joint_path_from_task(&physical, &geometry)?;
                Ok((
                    joint,
                    Some(TaskSpace {
                        path: physical,
                        geometry,
                    }),
                ))
            }
        }
    }

    pub fn context(&self) -> Result<(VfcContext, Option<TaskSpace>)> {
        let n = self.q0.len();
        let (path, task) = self.paths()?;
        let ctx = VfcContext::new(
            make_selection_matrix(&self.selection, n)?,
            path,
            GvfGains::new(self.gvf_k.clone())?,
            self.p_matrix()?,
        )?;
        Ok((ctx, task))
    }

    pub fn ccfc(&self) -> Result<Option<CcfcConstraint>> {
        match &self.constraint {
            ConstraintSpec::Vfc => Ok(None),
            ConstraintSpec::Ccfc { lambda } => {
                let surfaces = self.path.implicit().ok_or(Error::InvalidParameter {
                    name: "constraint",
                    reason: alloc::format!(
                        "path `{}` has no implicit description",
                        self.path.name()
                    ),
                })?;
                Ok(Some(CcfcConstraint::new(surfaces, lambda.clone())?))
            }
        }
    }

    pub fn prepare(&self) -> Result<Prepared> {
        if let ConstraintSpec::Ccfc { .. } = self.constraint {
            return Err(Error::InvalidParameter {
                name: "constraint",
                reason: "the conventional constraint is only available to check-assumptions".into(),
            });
        }
        let plant = self.plant.build()?;
        let (ctx, task) = self.context()?;
        let alpha_hat = match self.controller {
            ControllerKind::Nominal => DVector::zeros(0),
            ControllerKind::AdaptiveRobust => DVector::from_column_slice(&self.alpha0),
        };
        Ok(Prepared {
            scenario: Scenario {
                id: self.id.clone(),
                plant,
                plant_mode: self.plant_mode,
                ctx,
                controller: self.controller,
                cfg: self.cfg,
                bound: self.plant.bound(),
                initial: SimState {
                    t: 0.0,
                    q: DVector::from_column_slice(&self.q0),
                    qdot: DVector::from_column_slice(&self.qdot0),
                    w: self.w0,
                    alpha_hat,
                },
                duration: self.duration,
                step: self.step,
            },
            task,
        })
    }
}

// ---------------------------------------------------------------------------
// Catalog

/// Link lengths of the bundled manipulator presets. With unit links the
/// torus knot leaves the workspace of the closed-form inverse kinematics.
pub const PRESET_LINKS: (f64, f64) = (2.1, 1.4);

fn identity_rows(m: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn pvtol_path(index: usize) -> PathSpec {
    match index {
        1 => PathSpec::Sinusoid,
        2 => PathSpec::cassini_default(),
        _ => PathSpec::Lemniscate,
    }
}

/// PVTOL scenario with the standard initial state and gains.
pub fn pvtol_spec(path_index: usize, controller: ControllerKind, plant_mode: Mode) -> ScenarioSpec {
    let mode_tag = match (controller, plant_mode) {
        (ControllerKind::Nominal, Mode::Nominal) => "nominal",
        (ControllerKind::Nominal, Mode::True) => "nominal_uncertain",
        (ControllerKind::AdaptiveRobust, Mode::True) => "adaptive_robust",
        (ControllerKind::AdaptiveRobust, Mode::Nominal) => "adaptive_robust_nominal_plant",
    };
    let path = pvtol_path(path_index);
    ScenarioSpec {
        id: alloc::format!("pvtol_p{path_index}_{mode_tag}"),
        description: alloc::format!(
            "PVTOL on {} ({} controller, {} plant)",
            path.name(),
            controller.name(),
            if plant_mode == Mode::True {
                "uncertain"
            } else {
                "nominal"
            }
        ),
        plant: PlantSpec::Pvtol(PvtolParams::default()),
        plant_mode,
        path,
        selection: vec![1, 2],
        constraint: ConstraintSpec::Vfc,
        gvf_k: vec![1.0, 1.0],
        p: identity_rows(2),
        controller,
        cfg: ControllerConfig::default(),
        q0: vec![2.2, 0.2, 1.5],
        qdot0: vec![1.0, 0.0, 0.0],
        w0: 0.1,
        alpha0: vec![0.5, 0.5],
        duration: DEFAULT_DURATION,
        step: DEFAULT_STEP,
    }
}

/// Adaptive robust manipulator scenario; `path_index` is 4 (cylinder
/// intersection) or 5 (torus knot).
pub fn manipulator_spec(path_index: usize, l1: f64, l2: f64) -> ScenarioSpec {
    let geometry = ManipulatorGeometry {
        l1,
        l2,
        ..ManipulatorGeometry::default()
    };
    let path = if path_index == 4 {
        PathSpec::cylinder_default()
    } else {
        PathSpec::torus_knot_default()
    };
    ScenarioSpec {
        id: alloc::format!("manipulator_p{path_index}_adaptive_robust"),
        description: alloc::format!("3-link arm on {} (l1 = {l1}, l2 = {l2})", path.name()),
        plant: PlantSpec::Manipulator {
            geometry,
            uncertainty: ManipulatorUncertainty::standard(&geometry),
        },
        plant_mode: Mode::True,
        path,
        selection: vec![1, 2, 3],
        constraint: ConstraintSpec::Vfc,
        gvf_k: vec![1.0, 1.0, 1.0],
        p: identity_rows(3),
        controller: ControllerKind::AdaptiveRobust,
        cfg: ControllerConfig {
            l2: 0.3,
            ..ControllerConfig::default()
        },
        q0: vec![-0.1, 1.5, 1.5],
        qdot0: vec![1.0, 0.0, 0.0],
        w0: 0.0,
        alpha0: vec![0.5],
        duration: DEFAULT_DURATION,
        step: DEFAULT_STEP,
    }
}

/// Conventional constraint on the Cassini oval, for the feasibility check.
pub fn ccfc_cassini_spec() -> ScenarioSpec {
    ScenarioSpec {
        id: "ccfc_cassini_demo".into(),
        description: "conventional implicit-surface constraint on the Cassini oval".into(),
        constraint: ConstraintSpec::Ccfc { lambda: vec![1.0] },
        ..pvtol_spec(2, ControllerKind::Nominal, Mode::Nominal)
    }
}

pub const PRESET_NAMES: [&str; 10] = [
    "pvtol_p1_nominal",
    "pvtol_p2_nominal",
    "pvtol_p3_nominal",
    "pvtol_p1_adaptive_robust",
    "pvtol_p2_adaptive_robust",
    "pvtol_p3_adaptive_robust",
    "pvtol_p3_nominal_uncertain",
    "manipulator_p4_adaptive_robust",
    "manipulator_p5_adaptive_robust",
    "ccfc_cassini_demo",
];

pub fn preset(name: &str) -> Result<ScenarioSpec> {
    let (l1, l2) = PRESET_LINKS;
    let spec = match name {
        "pvtol_p1_nominal" => pvtol_spec(1, ControllerKind::Nominal, Mode::Nominal),
        "pvtol_p2_nominal" => pvtol_spec(2, ControllerKind::Nominal, Mode::Nominal),
        "pvtol_p3_nominal" => pvtol_spec(3, ControllerKind::Nominal, Mode::Nominal),
        "pvtol_p1_adaptive_robust" => pvtol_spec(1, ControllerKind::AdaptiveRobust, Mode::True),
        "pvtol_p2_adaptive_robust" => pvtol_spec(2, ControllerKind::AdaptiveRobust, Mode::True),
        "pvtol_p3_adaptive_robust" => pvtol_spec(3, ControllerKind::AdaptiveRobust, Mode::True),
        "pvtol_p3_nominal_uncertain" => pvtol_spec(3, ControllerKind::Nominal, Mode::True),
        "manipulator_p4_adaptive_robust" => manipulator_spec(4, l1, l2),
        "manipulator_p5_adaptive_robust" => manipulator_spec(5, l1, l2),
        "ccfc_cassini_demo" => ccfc_cassini_spec(),
        _ => {
            return Err(Error::InvalidParameter {
                name: "preset",
                reason: alloc::format!(
                    "unknown preset `{name}` (available: {})",
                    PRESET_NAMES.join(", ")
                ),
            })
        }
    };
    Ok(spec)
}

pub fn all_presets() -> Vec<ScenarioSpec> {
    PRESET_NAMES.iter().map(|n| preset(n).unwrap()).collect()
}

impl core::fmt::Display for ScenarioSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}: {}", self.id, self.description)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_ids_match_names() {
        for name in PRESET_NAMES {
            assert_eq!(preset(name).unwrap().id, name);
        }
        assert!(preset("nope").is_err());
    }

    #[test]
    fn presets_prepare() {
        for spec in all_presets() {
            let res = spec.prepare();
            match spec.id.as_str() {
                "ccfc_cassini_demo" => assert!(res.is_err()),
                "manipulator_p4_adaptive_robust" => {
                    assert!(matches!(res, Err(Error::Unreachable { .. })))
                }
                _ => {
                    let p = res.unwrap();
                    assert_eq!(p.scenario.steps(), 30_000);
                    assert_eq!(p.task.is_some(), spec.plant.name() == "manipulator");
                }
            }
        }
    }
}
