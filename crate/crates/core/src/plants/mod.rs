//! Uncertain mechanical systems `M q_ddot + C q_dot + g = B tau`.
//!
//! Every plant is written once as a function of an uncertainty vector
//! `sigma`. The nominal model is the same plant at `sigma = 0`; the true
//! model evaluates `sigma` along its closed-form time signals.

mod manipulator;
mod pvtol;
mod signal;

pub use manipulator::{
    fk, fk_closed_form, ik, joint_path_from_task, manipulator, potential, Manipulator,
    ManipulatorGeometry, ManipulatorUncertainty,
};
pub use pvtol::{pvtol, Pvtol, PvtolParams};
pub use signal::{Signal, Wave};

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};

/// Which model to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Nominal,
    True,
}

/// `M`, `C q_dot`, `g` and `B` at one state.
#[derive(Debug, Clone, PartialEq)]
pub struct Dynamics {
    pub mass: DMatrix<f64>,
    pub coriolis: DVector<f64>,
    pub gravity: DVector<f64>,
    pub input: DMatrix<f64>,
}

pub trait MechanicalSystem: Send + Sync {
    fn name(&self) -> &str;

    /// Configuration dimension `n`.
    fn dof(&self) -> usize;

    /// Number of inputs.
    fn inputs(&self) -> usize;

    /// Names of the uncertainty entries, in order.
    fn sigma_names(&self) -> &'static [&'static str];

    /// Value of the uncertainty vector at time `t`.
    fn sigma_at(&self, t: f64) -> DVector<f64>;

    /// Box `[lo, hi]` containing every `sigma_at(t)`.
    fn sigma_bounds(&self) -> Vec<(f64, f64)>;

    fn mass(&self, q: &DVector<f64>, sigma: &DVector<f64>) -> DMatrix<f64>;

    /// The product `C(q, q_dot) q_dot`.
    fn coriolis(&self, q: &DVector<f64>, qdot: &DVector<f64>, sigma: &DVector<f64>)
        -> DVector<f64>;

    fn gravity(&self, q: &DVector<f64>, sigma: &DVector<f64>) -> DVector<f64>;

    fn input_matrix(&self, q: &DVector<f64>, sigma: &DVector<f64>) -> DMatrix<f64>;

    fn sigma_dim(&self) -> usize {
        self.sigma_names().len()
    }

    fn sigma_for(&self, mode: Mode, t: f64) -> DVector<f64> {
        match mode {
            Mode::Nominal => DVector::zeros(self.sigma_dim()),
            Mode::True => self.sigma_at(t),
        }
    }

    fn dynamics(&self, q: &DVector<f64>, qdot: &DVector<f64>, sigma: &DVector<f64>) -> Dynamics {
        Dynamics {
            mass: self.mass(q, sigma),
            coriolis: self.coriolis(q, qdot, sigma),
            gravity: self.gravity(q, sigma),
            input: self.input_matrix(q, sigma),
        }
    }

    /// Nominal model, `sigma = 0`.
    fn nominal(&self, q: &DVector<f64>, qdot: &DVector<f64>) -> Dynamics {
        self.dynamics(q, qdot, &DVector::zeros(self.sigma_dim()))
    }
}

/// `q_ddot = M^-1 (B tau - C q_dot - g)` for the selected model.
pub fn forward_accel(
    sys: &dyn MechanicalSystem,
    mode: Mode,
    q: &DVector<f64>,
    qdot: &DVector<f64>,
    tau: &DVector<f64>,
    t: f64,
) -> Result<DVector<f64>> {
    check_dim("q", sys.dof(), q.len())?;
    check_dim("qdot", sys.dof(), qdot.len())?;
    check_dim("tau", sys.inputs(), tau.len())?;
    let sigma = sys.sigma_for(mode, t);
    let d = sys.dynamics(q, qdot, &sigma);
    let rhs = &d.input * tau - &d.coriolis - &d.gravity;
    solve_spd(d.mass, &rhs, t)
}

/// Solves `M x = rhs` by Cholesky; a failed factorization means `M` is not
/// positive definite.
pub(crate) fn solve_spd(mass: DMatrix<f64>, rhs: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
    match mass.cholesky() {
        Some(chol) => Ok(chol.solve(rhs)),
        None => Err(Error::NotPositiveDefinite { t }),
    }
}

pub(crate) fn inverse_spd(mass: DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    match mass.cholesky() {
        Some(chol) => Ok(chol.inverse()),
        None => Err(Error::NotPositiveDefinite { t }),
    }
}

/// All `2^p` vertices of the uncertainty box.
pub fn sigma_vertices(sys: &dyn MechanicalSystem) -> Vec<DVector<f64>> {
    let bounds = sys.sigma_bounds();
    let p = bounds.len();
    (0..1usize << p)
        .map(|mask| {
            DVector::from_fn(p, |i, _| {
                if mask >> i & 1 == 1 {
                    bounds[i].1
                } else {
                    bounds[i].0
                }
            })
        })
        .collect()
}
