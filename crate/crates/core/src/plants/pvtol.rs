//! Planar vertical take-off and landing aircraft, `q = (x, y, theta)`.
//!
//! ```text
//! m x_ddot     = -sin(theta) tau1 + cos(theta) tau2 + d_x
//! m y_ddot     =  cos(theta) tau1 + sin(theta) tau2 - m g0 + d_y
//! J theta_ddot =  tau2 + d_theta
//! ```

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use super::{MechanicalSystem, Signal};
use crate::error::{Error, Result};

/// Nominal parameters and uncertainty signals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvtolParams {
    pub m_bar: f64,
    pub j_bar: f64,
    pub g0: f64,
    pub dm: Signal,
    pub dj: Signal,
    pub dx: Signal,
    pub dy: Signal,
    pub dtheta: Signal,
}

impl Default for PvtolParams {
    fn default() -> Self {
        let (m_bar, j_bar) = (1.0, 0.5);
        Self {
            m_bar,
            j_bar,
            g0: 9.8,
            dm: Signal::sin(0.3 * m_bar, 5.0),
            dj: Signal::sin(0.3 * j_bar, 7.5),
            dx: Signal::sin(4.0, 2.0),
            dy: Signal::cos(4.0, 4.0),
            dtheta: Signal::sin(4.0, 6.0),
        }
    }
}

impl PvtolParams {
    /// Same nominal parameters, all uncertainty signals zeroed.
    pub fn without_uncertainty(self) -> Self {
        Self {
            dm: Signal::ZERO,
            dj: Signal::ZERO,
            dx: Signal::ZERO,
            dy: Signal::ZERO,
            dtheta: Signal::ZERO,
            ..self
        }
    }
}

#[derive(Debug, Clone)]
pub struct Pvtol {
    params: PvtolParams,
}

const SIGMA: [&str; 5] = ["dm", "dJ", "dx", "dy", "dtheta"];

pub fn pvtol(params: PvtolParams) -> Result<Pvtol> {
    for (name, v) in [
        ("m_bar", params.m_bar),
        ("j_bar", params.j_bar),
        ("g0", params.g0),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("must be positive, got {v}"),
            });
        }
    }
    if params.dm.bound() >= params.m_bar {
        return Err(Error::InvalidParameter {
            name: "dm",
            reason: "mass uncertainty amplitude must stay below m_bar".into(),
        });
    }
    if params.dj.bound() >= params.j_bar {
        return Err(Error::InvalidParameter {
            name: "dj",
            reason: "inertia uncertainty amplitude must stay below j_bar".into(),
        });
    }
    Ok(Pvtol { params })
}

impl Pvtol {
    pub fn params(&self) -> &PvtolParams {
        &self.params
    }
}

impl MechanicalSystem for Pvtol {
    fn name(&self) -> &str {
        "pvtol"
    }

    fn dof(&self) -> usize {
        3
    }

    fn inputs(&self) -> usize {
        2
    }

    fn sigma_names(&self) -> &'static [&'static str] {
        &SIGMA
    }

    fn sigma_at(&self, t: f64) -> DVector<f64> {
        let p = &self.params;
        DVector::from_column_slice(&[
            p.dm.eval(t),
            p.dj.eval(t),
            p.dx.eval(t),
            p.dy.eval(t),
            p.dtheta.eval(t),
        ])
    }

    fn sigma_bounds(&self) -> Vec<(f64, f64)> {
        let p = &self.params;
        [p.dm, p.dj, p.dx, p.dy, p.dtheta]
            .iter()
            .map(|s| (-s.bound(), s.bound()))
            .collect()
    }

    fn mass(&self, _q: &DVector<f64>, sigma: &DVector<f64>) -> DMatrix<f64> {
        let m = self.params.m_bar + sigma[0];
        let j = self.params.j_bar + sigma[1];
        DMatrix::from_diagonal(&DVector::from_column_slice(&[m, m, j]))
    }

    fn coriolis(
        &self,
        _q: &DVector<f64>,
        _qdot: &DVector<f64>,
        _sigma: &DVector<f64>,
    ) -> DVector<f64> {
        DVector::zeros(3)
    }

    fn gravity(&self, _q: &DVector<f64>, sigma: &DVector<f64>) -> DVector<f64> {
        let m = self.params.m_bar + sigma[0];
        DVector::from_column_slice(&[-sigma[2], m * self.params.g0 - sigma[3], -sigma[4]])
    }

    fn input_matrix(&self, q: &DVector<f64>, _sigma: &DVector<f64>) -> DMatrix<f64> {
        let (s, c) = q[2].sin_cos();
        DMatrix::from_row_slice(3, 2, &[-s, c, c, s, 0.0, 1.0])
    }
}
