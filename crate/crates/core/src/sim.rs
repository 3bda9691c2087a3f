//! Fixed-step RK4 integration of plant, virtual coordinate and adaptive
//! estimate as one packed state `(q, q_dot, w, alpha_hat)`.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::DVector;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::constraint::VfcContext;
use crate::control::{
    adaptive_rate, control_terms, p3_from, BoundFunction, ControlTerms, ControllerConfig,
};
use crate::error::{check_dim, Error, Result};
use crate::geometry::phi;
use crate::linalg::all_finite;
use crate::plants::{forward_accel, MechanicalSystem, Mode};

/// Lower clamp applied to `alpha_hat` after every step.
pub const ALPHA_FLOOR: f64 = 1e-12;

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_DURATION: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ControllerKind {
    Nominal,
    AdaptiveRobust,
}

impl ControllerKind {
    pub fn name(&self) -> &'static str {
        match self {
            ControllerKind::Nominal => "nominal",
            ControllerKind::AdaptiveRobust => "adaptive_robust",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub q: DVector<f64>,
    pub qdot: DVector<f64>,
    pub w: f64,
    /// Empty for nominal control.
    pub alpha_hat: DVector<f64>,
}

impl SimState {
    fn pack(&self) -> DVector<f64> {
        let n = self.q.len();
        let k = self.alpha_hat.len();
        let mut x = DVector::zeros(2 * n + 1 + k);
        x.rows_mut(0, n).copy_from(&self.q);
        x.rows_mut(n, n).copy_from(&self.qdot);
        x[2 * n] = self.w;
        x.rows_mut(2 * n + 1, k).copy_from(&self.alpha_hat);
        x
    }

    fn unpack(x: &DVector<f64>, n: usize, t: f64) -> Self {
        let k = x.len() - 2 * n - 1;
        SimState {
            t,
            q: x.rows(0, n).into_owned(),
            qdot: x.rows(n, n).into_owned(),
            w: x[2 * n],
            alpha_hat: x.rows(2 * n + 1, k).into_owned(),
        }
    }
}

/// One logged sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub state: SimState,
    pub tau: DVector<f64>,
    pub beta: DVector<f64>,
    pub phi: DVector<f64>,
    pub w_dot: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogMeta {
    pub scenario_id: String,
    pub step: f64,
    pub controller: ControllerKind,
    pub plant_mode: Mode,
}

/// Records on the uniform grid `t_k = t0 + k h`, `k = 0..=steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub meta: LogMeta,
    pub records: Vec<Record>,
}

impl TrajectoryLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.state.t).collect()
    }

    pub fn last(&self) -> Option<&Record> {
        self.records.last()
    }
}

/// Classical fourth-order Runge-Kutta step.
pub fn rk4_step<F>(mut f: F, x: &DVector<f64>, t: f64, h: f64) -> Result<DVector<f64>>
where
    F: FnMut(&DVector<f64>, f64) -> Result<DVector<f64>>,
{
    if !(h > 0.0) {
        return Err(Error::InvalidParameter {
            name: "step",
            reason: alloc::format!("must be positive, got {h}"),
        });
    }
    let half = 0.5 * h;
    let k1 = f(x, t)?;
    let k2 = f(&(x + &k1 * half), t + half)?;
    let k3 = f(&(x + &k2 * half), t + half)?;
    let k4 = f(&(x + &k3 * h), t + h)?;
    Ok(x + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0))
}

/// Everything needed to integrate one closed loop.
#[derive(Clone)]
pub struct Scenario {
    pub id: String,
    pub plant: Arc<dyn MechanicalSystem>,
    pub plant_mode: Mode,
    pub ctx: VfcContext,
    pub controller: ControllerKind,
    pub cfg: ControllerConfig,
    pub bound: BoundFunction,
    pub initial: SimState,
    pub duration: f64,
    pub step: f64,
}

impl core::fmt::Debug for Scenario {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Scenario")
            .field("id", &self.id)
            .field("plant", &self.plant.name())
            .field("plant_mode", &self.plant_mode)
            .field("path", &self.ctx.path().name())
            .field("controller", &self.controller)
            .field("cfg", &self.cfg)
            .field("initial", &self.initial)
            .field("duration", &self.duration)
            .field("step", &self.step)
            .finish()
    }
}

/// Control input and rates at one state.
struct Evaluation {
    terms: ControlTerms,
    tau: DVector<f64>,
    alpha_rate: DVector<f64>,
}

impl Scenario {
    pub fn steps(&self) -> usize {
        (self.duration / self.step).round() as usize
    }

    fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        let n = self.plant.dof();
        check_dim("q", n, self.initial.q.len())?;
        check_dim("qdot", n, self.initial.qdot.len())?;
        check_dim("configuration dimension", self.ctx.n(), n)?;
        let k = match self.controller {
            ControllerKind::Nominal => 0,
            ControllerKind::AdaptiveRobust => self.bound.k_dim(),
        };
        check_dim("alpha_hat", k, self.initial.alpha_hat.len())?;
        if self.initial.alpha_hat.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::InvalidParameter {
                name: "alpha_hat",
                reason: "initial estimate must be positive".into(),
            });
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "step",
                reason: alloc::format!("must be positive, got {}", self.step),
            });
        }
        if !(self.duration >= 0.0 && self.duration.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "duration",
                reason: alloc::format!("must be non-negative, got {}", self.duration),
            });
        }
        Ok(())
    }

    fn evaluate(&self, s: &SimState) -> Result<Evaluation> {
        let terms = control_terms(&self.ctx, &*self.plant, &self.cfg, &s.q, &s.qdot, s.w, s.t)?;
        let mut tau = &terms.p1 + &terms.p2;
        let alpha_rate = match self.controller {
            ControllerKind::Nominal => DVector::zeros(0),
            ControllerKind::AdaptiveRobust => {
                let pi_breve = self.bound.pi_breve(&terms, &s.qdot);
                tau += p3_from(&self.cfg, &terms.beta_breve, &pi_breve, &s.alpha_hat)?;
                adaptive_rate(&self.cfg, &pi_breve, &s.alpha_hat, terms.beta_breve.norm())
            }
        };
        Ok(Evaluation {
            terms,
            tau,
            alpha_rate,
        })
    }

    fn rate(&self, x: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
        let n = self.plant.dof();
        let s = SimState::unpack(x, n, t);
        let e = self.evaluate(&s)?;
        let qddot = forward_accel(&*self.plant, self.plant_mode, &s.q, &s.qdot, &e.tau, t)?;
        let mut dx = DVector::zeros(x.len());
        dx.rows_mut(0, n).copy_from(&s.qdot);
        dx.rows_mut(n, n).copy_from(&qddot);
        dx[2 * n] = e.terms.vfc.w_dot;
        let k = e.alpha_rate.len();
        dx.rows_mut(2 * n + 1, k).copy_from(&e.alpha_rate);
        Ok(dx)
    }

    fn record(&self, s: SimState) -> Result<Record> {
        let e = self.evaluate(&s)?;
        let xi = self.ctx.xi(&s.q, s.w)?;
        Ok(Record {
            phi: phi(self.ctx.path(), &xi)?,
            tau: e.tau,
            beta: e.terms.vfc.beta,
            w_dot: e.terms.vfc.w_dot,
            state: s,
        })
    }
}

/// Integrates the scenario and logs every grid point.
pub fn run_scenario(sc: &Scenario) -> Result<TrajectoryLog> {
    sc.validate()?;
    let n = sc.plant.dof();
    let steps = sc.steps();
    let t0 = sc.initial.t;
    let h = sc.step;
    let mut records = Vec::with_capacity(steps + 1);
    let mut x = sc.initial.pack();
    records.push(sc.record(SimState::unpack(&x, n, t0))?);
    for step in 1..=steps {
        let t = t0 + (step - 1) as f64 * h;
        x = rk4_step(|x, t| sc.rate(x, t), &x, t, h).map_err(|e| match e {
            Error::NonFinite { .. } => Error::NonFinite { step, t },
            other => other,
        })?;
        for a in x.rows_mut(2 * n + 1, x.len() - 2 * n - 1).iter_mut() {
            *a = a.max(ALPHA_FLOOR);
        }
        let t_next = t0 + step as f64 * h;
        if !all_finite(&x) {
            return Err(Error::NonFinite { step, t: t_next });
        }
        records.push(sc.record(SimState::unpack(&x, n, t_next))?);
    }
    Ok(TrajectoryLog {
        meta: LogMeta {
            scenario_id: sc.id.clone(),
            step: h,
            controller: sc.controller,
            plant_mode: sc.plant_mode,
        },
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_selection_matrix, PathSpec};
    use crate::plants::{pvtol, PvtolParams};
    use crate::vectorfield::{w_dot, GvfGains};
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    #[test]
    fn rk4_examples() {
        let x = rk4_step(|x, _| Ok(x.clone()), &v(&[1.0]), 0.0, 0.1).unwrap();
        assert_relative_eq!(x[0], 1.10517083, epsilon = 1e-8);
        assert!((x[0] - 0.1f64.exp()).abs() < 1e-7);
        let x = rk4_step(|x, _| Ok(x * 0.0), &v(&[3.0, -2.0]), 0.0, 0.5).unwrap();
        assert_eq!(x, v(&[3.0, -2.0]));
        let x = rk4_step(|_, _| Ok(v(&[0.5, -4.0])), &v(&[1.0, 1.0]), 0.0, 0.25).unwrap();
        assert_eq!(x, v(&[1.125, 0.0]));
        assert!(rk4_step(|x, _| Ok(x.clone()), &v(&[1.0]), 0.0, 0.0).is_err());
    }

    #[test]
    fn rk4_is_fourth_order() {
        // x' = x cos t
        let f = |x: &DVector<f64>, t: f64| Ok(x * t.cos());
        let run = |h: f64| {
            let mut x = v(&[1.0]);
            let steps = (2.0 / h).round() as usize;
            for i in 0..steps {
                x = rk4_step(f, &x, i as f64 * h, h).unwrap();
            }
            x[0]
        };
        let reference = run(0.2 / 8.0);
        let ratio = (run(0.2) - reference).abs() / (run(0.1) - reference).abs();
        assert!((ratio - 16.0).abs() < 8.0, "ratio {ratio}");
    }

    pub(crate) fn pvtol_scenario(controller: ControllerKind, duration: f64) -> Scenario {
        let plant = pvtol(PvtolParams::default()).unwrap();
        let ctx = VfcContext::new(
            make_selection_matrix(&[1, 2], 3).unwrap(),
            PathSpec::Sinusoid.build().unwrap(),
            GvfGains::uniform(2, 1.0).unwrap(),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        let alpha_hat = match controller {
            ControllerKind::Nominal => DVector::zeros(0),
            ControllerKind::AdaptiveRobust => v(&[0.5, 0.5]),
        };
        Scenario {
            id: "test".into(),
            plant: Arc::new(plant),
            plant_mode: Mode::True,
            ctx,
            controller,
            cfg: ControllerConfig::default(),
            bound: BoundFunction::Pvtol,
            initial: SimState {
                t: 0.0,
                q: v(&[2.2, 0.2, 1.5]),
                qdot: v(&[1.0, 0.0, 0.0]),
                w: 0.1,
                alpha_hat,
            },
            duration,
            step: 1e-3,
        }
    }

    #[test]
    fn zero_length_run_logs_initial_state() {
        let sc = pvtol_scenario(ControllerKind::Nominal, 0.0);
        let log = run_scenario(&sc).unwrap();
        assert_eq!(log.len(), 1);
        assert_eq!(log.records[0].state, sc.initial);
    }

    #[test]
    fn grid_and_logged_w_dot() {
        let sc = pvtol_scenario(ControllerKind::AdaptiveRobust, 0.5);
        let log = run_scenario(&sc).unwrap();
        assert_eq!(log.len(), 501);
        for (i, r) in log.records.iter().enumerate() {
            assert_eq!(r.state.t, i as f64 * 1e-3);
            let xi = sc.ctx.xi(&r.state.q, r.state.w).unwrap();
            assert_eq!(r.w_dot, w_dot(sc.ctx.path(), sc.ctx.gains(), &xi).unwrap());
            assert!(r.state.alpha_hat.iter().all(|&a| a > 0.0));
        }
    }

    #[test]
    fn rejects_bad_alpha() {
        let mut sc = pvtol_scenario(ControllerKind::AdaptiveRobust, 0.1);
        sc.initial.alpha_hat = v(&[0.5]);
        assert!(matches!(
            run_scenario(&sc),
            Err(Error::DimensionMismatch { .. })
        ));
        sc.initial.alpha_hat = v(&[0.5, 0.0]);
        assert!(matches!(
            run_scenario(&sc),
            Err(Error::InvalidParameter { .. })
        ));
    }
}
