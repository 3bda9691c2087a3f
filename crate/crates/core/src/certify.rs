//! Grid certificates for the structural assumptions of a scenario:
//! feasibility of the second-order constraint, the input-map eigenvalue
//! bound, the mass/input uncertainty bound and the uncertainty envelope.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DVector;

use crate::constraint::{ccfc_second_order, feasibility_residual, VfcContext};
use crate::control::{
    assumption6_lhs, check_assumption4, check_assumption5, control_terms, default_sigma_grid, grid,
    two_term_alpha, BoundFunction,
};
use crate::error::{Error, Result};
use crate::plants::MechanicalSystem;
use crate::presets::{PlantSpec, ScenarioSpec};

/// Residual above which a second-order constraint counts as infeasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// State where the conventional constraint is probed: the origin of the
/// plane, moving along `x` with unit speed.
pub const CCFC_PROBE: [f64; 4] = [0.0, 0.0, 1.0, 0.0];

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub values: Vec<(&'static str, f64)>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub scenario_id: String,
    pub checks: Vec<Check>,
}

impl AssumptionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl Check {
    pub fn value(&self, key: &str) -> Option<f64> {
        self.values.iter().find(|(k, _)| *k == key).map(|&(_, v)| v)
    }
}

/// Configurations where the inertia and input matrices are sampled. Only
/// the coordinates they depend on are gridded.
fn configuration_grid(plant: &PlantSpec) -> Vec<DVector<f64>> {
    use core::f64::consts::PI;
    match plant {
        PlantSpec::Pvtol(_) => grid(&[(0.0, 0.0), (0.0, 0.0), (-PI, PI)], 50),
        PlantSpec::Manipulator { .. } => grid(&[(0.0, 0.0), (-PI, PI), (-PI, PI)], 20),
    }
}

/// `(q, q_dot, w)` samples for the feasibility and envelope checks.
fn state_grid(spec: &ScenarioSpec) -> Vec<(DVector<f64>, DVector<f64>, f64)> {
    let w0 = spec.w0;
    let ws = [w0 - 1.0, w0, w0 + 1.0];
    let (qs, qdots) = match spec.plant {
        PlantSpec::Pvtol(_) => (
            grid(&[(-2.0, 2.0), (-1.0, 1.0), (-2.7, 2.7)], 3)
                .into_iter()
                .chain(grid(&[(0.0, 0.0), (0.0, 0.0), (-3.0, 3.0)], 7))
                .collect::<Vec<_>>(),
            grid(&[(-2.0, 2.0), (-2.0, 2.0), (0.0, 0.0)], 3),
        ),
        PlantSpec::Manipulator { .. } => (
            grid(&[(-0.3, 0.3), (0.4, 2.4), (0.4, 2.4)], 3),
            grid(&[(-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)], 3),
        ),
    };
    let mut out = Vec::with_capacity(qs.len() * qdots.len() * ws.len());
    for q in &qs {
        for qd in &qdots {
            for &w in &ws {
                out.push((q.clone(), qd.clone(), w));
            }
        }
    }
    out
}

fn failed(name: &'static str, err: &Error) -> Check {
    Check {
        name,
        passed: false,
        values: vec![],
        note: Some(format!("{err}")),
    }
}

fn stats(residuals: &[f64]) -> (f64, f64) {
    let max = residuals.iter().fold(0.0f64, |a, &b| a.max(b));
    let mean = residuals.iter().sum::<f64>() / residuals.len().max(1) as f64;
    (max, mean)
}

fn feasibility_vfc(
    ctx: &VfcContext,
    spec: &ScenarioSpec,
    states: &[(DVector<f64>, DVector<f64>, f64)],
) -> Result<Check> {
    let a = ctx.a().clone();
    let q0 = DVector::from_column_slice(&spec.q0);
    let qd0 = DVector::from_column_slice(&spec.qdot0);
    let probe = feasibility_residual(&a, &ctx.evaluate(&q0, &qd0, spec.w0)?.b);
    let mut res = Vec::with_capacity(states.len());
    for (q, qd, w) in states {
        res.push(feasibility_residual(&a, &ctx.evaluate(q, qd, *w)?.b));
    }
    let (max, mean) = stats(&res);
    let worst = max.max(probe);
    Ok(Check {
        name: "feasibility",
        passed: worst <= FEASIBILITY_TOL,
        values: vec![
            ("probe_residual", probe),
            ("max_residual", max),
            ("mean_residual", mean),
            ("samples", res.len() as f64),
        ],
        note: Some("vector-field guided constraint, probe at the initial state".into()),
    })
}

fn feasibility_ccfc(spec: &ScenarioSpec) -> Result<Check> {
    let c = spec
        .ccfc()?
        .ok_or(Error::AssumptionViolated("no conventional constraint"))?;
    let m = c.surfaces().dim();
    if m != 2 {
        return Err(Error::AssumptionViolated("probe state is planar"));
    }
    let residual_at = |x: &[f64]| -> Result<f64> {
        let (a, b) = ccfc_second_order(
            &c,
            &DVector::from_column_slice(&x[..2]),
            &DVector::from_column_slice(&x[2..]),
        )?;
        Ok(feasibility_residual(&a, &b))
    };
    let probe = residual_at(&CCFC_PROBE)?;
    let mut res = Vec::new();
    for x in grid(&[(-4.0, 4.0), (-3.0, 3.0), (-2.0, 2.0), (-2.0, 2.0)], 9) {
        res.push(residual_at(x.as_slice())?);
    }
    let (max, mean) = stats(&res);
    Ok(Check {
        name: "feasibility",
        passed: probe.max(max) <= FEASIBILITY_TOL,
        values: vec![
            ("probe_residual", probe),
            ("max_residual", max),
            ("mean_residual", mean),
            ("samples", res.len() as f64),
        ],
        note: Some("conventional implicit-surface constraint, probe at (0, 0, 1, 0)".into()),
    })
}

fn envelope(
    ctx: &VfcContext,
    sys: &dyn MechanicalSystem,
    spec: &ScenarioSpec,
    states: &[(DVector<f64>, DVector<f64>, f64)],
    sigmas: &[DVector<f64>],
    rho_w: f64,
) -> Result<Check> {
    let bound = spec.plant.bound();
    let cfg = &spec.cfg;
    match bound {
        BoundFunction::Pvtol => {
            let qs: Vec<_> = states
                .iter()
                .map(|(q, qd, _)| (q.clone(), qd.clone()))
                .collect();
            let alpha = two_term_alpha(sys, ctx, &qs, sigmas, rho_w)?;
            let mut margin = f64::INFINITY;
            for (q, qd, w) in states {
                let lhs = assumption6_lhs(ctx, sys, cfg, q, qd, *w, 0.0, sigmas, rho_w)?;
                let terms = control_terms(ctx, sys, cfg, q, qd, *w, 0.0)?;
                margin = margin.min(alpha.dot(&bound.pi_breve(&terms, qd)) - lhs);
            }
            Ok(Check {
                name: "envelope",
                passed: margin >= -FEASIBILITY_TOL,
                values: vec![
                    ("alpha1", alpha[0]),
                    ("alpha2", alpha[1]),
                    ("min_margin", margin),
                ],
                note: Some("two-term bound with the closed-form reference alpha".into()),
            })
        }
        BoundFunction::Manipulator => {
            let mut needed: f64 = 0.0;
            for (q, qd, w) in states {
                let lhs = assumption6_lhs(ctx, sys, cfg, q, qd, *w, 0.0, sigmas, rho_w)?;
                let terms = control_terms(ctx, sys, cfg, q, qd, *w, 0.0)?;
                needed = needed.max(lhs / bound.pi_breve(&terms, qd)[0]);
            }
            Ok(Check {
                name: "envelope",
                passed: needed.is_finite(),
                values: vec![("alpha_needed", needed)],
                note: Some("smallest scalar alpha covering every sample".into()),
            })
        }
    }
}

/// Runs every certificate that applies to the scenario. Construction
/// failures (unreachable paths, singular input maps) become failed checks.
pub fn check_assumptions(spec: &ScenarioSpec) -> Result<AssumptionReport> {
    let sys = spec.plant.build()?;
    let sys = &*sys;
    let mut checks = Vec::new();
    let ccfc = spec.ccfc()?.is_some();

    let ctx = match spec.context() {
        Ok((ctx, _)) => Some(ctx),
        Err(e @ Error::Unreachable { .. }) => {
            checks.push(failed("reach", &e));
            None
        }
        Err(e) => return Err(e),
    };
    let states = state_grid(spec);

    if ccfc {
        checks.push(feasibility_ccfc(spec)?);
    } else if let Some(ctx) = &ctx {
        checks.push(feasibility_vfc(ctx, spec, &states)?);
    }

    let Some(ctx) = ctx else {
        return Ok(AssumptionReport {
            scenario_id: spec.id.clone(),
            checks,
        });
    };
    let configs = configuration_grid(&spec.plant);
    let sigmas = default_sigma_grid(sys);

    match check_assumption4(sys, &ctx, &configs) {
        Ok(lambda) => checks.push(Check {
            name: "input_map",
            passed: lambda > 0.0,
            values: vec![("lambda_low", lambda)],
            note: None,
        }),
        Err(e) => checks.push(failed("input_map", &e)),
    }
    let rho_w = match check_assumption5(sys, &ctx, &configs, &sigmas) {
        Ok(rho) => {
            checks.push(Check {
                name: "mass_input_uncertainty",
                passed: rho > -1.0,
                values: vec![("rho_w", rho)],
                note: None,
            });
            rho
        }
        Err(e) => {
            checks.push(failed("mass_input_uncertainty", &e));
            return Ok(AssumptionReport {
                scenario_id: spec.id.clone(),
                checks,
            });
        }
    };
    if !ccfc && rho_w > -1.0 {
        match envelope(&ctx, sys, spec, &states, &sigmas, rho_w) {
            Ok(c) => checks.push(c),
            Err(e) => checks.push(failed("envelope", &e)),
        }
    }
    Ok(AssumptionReport {
        scenario_id: spec.id.clone(),
        checks,
    })
}
