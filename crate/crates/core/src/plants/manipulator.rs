//! Fully actuated 3-link manipulator, `q = (theta1, theta2, theta3)`.
//!
//! Link 1 spins about the vertical axis with inertia `J`. Links 2 and 3
//! (lengths `l1`, `l2`) move in the vertical plane it carries, with point
//! masses `m2`, `m3` at their tips. The inertia matrix and Coriolis vector
//! follow from the Lagrangian of that arm:
//!
//! ```text
//! m11 = J + (m2+m3) l1^2 c2^2 + 2 m3 l1 l2 c2 c23 + m3 l2^2 c23^2
//! m22 = m3 l2^2 + 2 m3 l1 l2 c3 + (m2+m3) l1^2
//! m23 = m3 l2 (l2 + l1 c3),   m33 = m3 l2^2
//! ```

use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use super::{MechanicalSystem, Signal};
use crate::error::{check_dim, Error, Result};
use crate::geometry::{ParametricPath, PathFunction};
use crate::linalg::fmt_vector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManipulatorGeometry {
    pub l1: f64,
    pub l2: f64,
    pub j_bar: f64,
    pub m2_bar: f64,
    pub m3_bar: f64,
    pub g0: f64,
}

impl Default for ManipulatorGeometry {
    fn default() -> Self {
        Self {
            l1: 1.0,
            l2: 1.0,
            j_bar: 0.5,
            m2_bar: 1.0,
            m3_bar: 2.0,
            g0: 9.8,
        }
    }
}

impl ManipulatorGeometry {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("l1", self.l1),
            ("l2", self.l2),
            ("j_bar", self.j_bar),
            ("m2_bar", self.m2_bar),
            ("m3_bar", self.m3_bar),
            ("g0", self.g0),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive, got {v}"),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManipulatorUncertainty {
    pub dj: Signal,
    pub dm2: Signal,
    pub dm3: Signal,
    pub d: [Signal; 3],
}

impl ManipulatorUncertainty {
    pub fn zero() -> Self {
        Self {
            dj: Signal::ZERO,
            dm2: Signal::ZERO,
            dm3: Signal::ZERO,
            d: [Signal::ZERO; 3],
        }
    }

    /// 10% inertial variation and 3-unit disturbances.
    pub fn standard(geom: &ManipulatorGeometry) -> Self {
        Self {
            dj: Signal::sin(0.1 * geom.j_bar, 7.5),
            dm2: Signal::sin(0.1 * geom.m2_bar, 5.0),
            dm3: Signal::cos(0.1 * geom.m3_bar, 5.0),
            d: [
                Signal::sin(3.0, 2.0),
                Signal::cos(3.0, 4.0),
                Signal::sin(3.0, 6.0),
            ],
        }
    }
}

#[derive(Debug, Clone)]
pub struct Manipulator {
    geom: ManipulatorGeometry,
    unc: ManipulatorUncertainty,
}

const SIGMA: [&str; 6] = ["dJ", "dm2", "dm3", "d1", "d2", "d3"];

pub fn manipulator(geom: ManipulatorGeometry, unc: ManipulatorUncertainty) -> Result<Manipulator> {
    geom.validate()?;
    for (name, s, nominal) in [
        ("dj", unc.dj, geom.j_bar),
        ("dm2", unc.dm2, geom.m2_bar),
        ("dm3", unc.dm3, geom.m3_bar),
    ] {
        if s.bound() >= nominal {
            return Err(Error::InvalidParameter {
                name,
                reason: "uncertainty amplitude must stay below the nominal value".into(),
            });
        }
    }
    Ok(Manipulator { geom, unc })
}

impl Manipulator {
    pub fn geometry(&self) -> &ManipulatorGeometry {
        &self.geom
    }

    fn params(&self, sigma: &DVector<f64>) -> (f64, f64, f64) {
        (
            self.geom.j_bar + sigma[0],
            self.geom.m2_bar + sigma[1],
            self.geom.m3_bar + sigma[2],
        )
    }
}

impl MechanicalSystem for Manipulator {
    fn name(&self) -> &str {
        "manipulator"
    }

    fn dof(&self) -> usize {
        3
    }

    fn inputs(&self) -> usize {
        3
    }

    fn sigma_names(&self) -> &'static [&'static str] {
        &SIGMA
    }

    fn sigma_at(&self, t: f64) -> DVector<f64> {
        let u = &self.unc;
        DVector::from_column_slice(&[
            u.dj.eval(t),
            u.dm2.eval(t),
            u.dm3.eval(t),
            u.d[0].eval(t),
            u.d[1].eval(t),
            u.d[2].eval(t),
        ])
    }

    fn sigma_bounds(&self) -> Vec<(f64, f64)> {
        let u = &self.unc;
        [u.dj, u.dm2, u.dm3, u.d[0], u.d[1], u.d[2]]
            .iter()
            .map(|s| (-s.bound(), s.bound()))
            .collect()
    }

    fn mass(&self, q: &DVector<f64>, sigma: &DVector<f64>) -> DMatrix<f64> {
        let (j, m2, m3) = self.params(sigma);
        let (l1, l2) = (self.geom.l1, self.geom.l2);
        let c2 = q[1].cos();
        let c3 = q[2].cos();
        let c23 = (q[1] + q[2]).cos();
        let reach = l1 * c2 + l2 * c23;
        let m11 = j + m2 * l1 * l1 * c2 * c2 + m3 * reach * reach;
        let m22 = m3 * l2 * l2 + 2.0 * m3 * l1 * l2 * c3 + (m2 + m3) * l1 * l1;
        let m23 = m3 * l2 * (l2 + l1 * c3);
        let m33 = m3 * l2 * l2;
        DMatrix::from_row_slice(3, 3, &[m11, 0.0, 0.0, 0.0, m22, m23, 0.0, m23, m33])
    }

    fn coriolis(
        &self,
        q: &DVector<f64>,
        qdot: &DVector<f64>,
        sigma: &DVector<f64>,
    ) -> DVector<f64> {
        let (_, m2, m3) = self.params(sigma);
        let (l1, l2) = (self.geom.l1, self.geom.l2);
        let (s2, c2) = q[1].sin_cos();
        let s3 = q[2].sin();
        let (s23, c23) = (q[1] + q[2]).sin_cos();
        let (w1, w2, w3) = (qdot[0], qdot[1], qdot[2]);
        // horizontal reach of the tip and its partials
        let reach = l1 * c2 + l2 * c23;
        let reach_2 = -l1 * s2 - l2 * s23;
        let reach_3 = -l2 * s23;
        // partials of m11
        let m11_2 = -2.0 * m2 * l1 * l1 * c2 * s2 + 2.0 * m3 * reach * reach_2;
        let m11_3 = 2.0 * m3 * reach * reach_3;
        let k = m3 * l1 * l2 * s3;
        DVector::from_column_slice(&[
            (m11_2 * w2 + m11_3 * w3) * w1,
            -k * (2.0 * w2 * w3 + w3 * w3) - 0.5 * m11_2 * w1 * w1,
            k * w2 * w2 - 0.5 * m11_3 * w1 * w1,
        ])
    }

    fn gravity(&self, q: &DVector<f64>, sigma: &DVector<f64>) -> DVector<f64> {
        let (_, m2, m3) = self.params(sigma);
        let (l1, l2, g0) = (self.geom.l1, self.geom.l2, self.geom.g0);
        let c2 = q[1].cos();
        let c23 = (q[1] + q[2]).cos();
        DVector::from_column_slice(&[
            sigma[3],
            (m2 + m3) * g0 * l1 * c2 + m3 * g0 * l2 * c23 + sigma[4],
            m3 * g0 * l2 * c23 + sigma[5],
        ])
    }

    fn input_matrix(&self, _q: &DVector<f64>, _sigma: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::identity(3, 3)
    }
}

/// Potential energy of the nominal arm.
pub fn potential(geom: &ManipulatorGeometry, q: &DVector<f64>) -> f64 {
    let (m2, m3) = (geom.m2_bar, geom.m3_bar);
    let s2 = q[1].sin();
    let s23 = (q[1] + q[2]).sin();
    geom.g0 * ((m2 + m3) * geom.l1 * s2 + m3 * geom.l2 * s23)
}

// ---------------------------------------------------------------------------
// Kinematics

/// Joint angles of a task-space point:
///
/// ```text
/// theta1 = atan(x / y)
/// theta2 = acos((r^2 - l1^2 - l2^2) / (2 l1 r)) + acos(sqrt((x^2 + y^2) / r^2))
/// theta3 = acos((r^2 - l1^2 - l2^2) / (2 l1 l2))
/// ```
pub fn ik(point: &DVector<f64>, geom: &ManipulatorGeometry) -> Result<DVector<f64>> {
    check_dim("point", 3, point.len())?;
    ik3(&Vector3::new(point[0], point[1], point[2]), geom)
        .map(|v| DVector::from_column_slice(v.as_slice()))
        .map_err(|reason| Error::Unreachable {
            point: fmt_vector(point),
            reason,
        })
}

fn ik3(
    p: &Vector3<f64>,
    geom: &ManipulatorGeometry,
) -> core::result::Result<Vector3<f64>, &'static str> {
    let (x, y, z) = (p[0], p[1], p[2]);
    let (l1, l2) = (geom.l1, geom.l2);
    let horizontal2 = x * x + y * y;
    let r2 = horizontal2 + z * z;
    if horizontal2 == 0.0 || !r2.is_finite() {
        return Err("point on the vertical axis");
    }
    let r = r2.sqrt();
    let num = r2 - l1 * l1 - l2 * l2;
    let shoulder = num / (2.0 * l1 * r);
    let elbow = num / (2.0 * l1 * l2);
    if !(-1.0..=1.0).contains(&elbow) {
        return Err("elbow arccos argument outside [-1, 1]");
    }
    if !(-1.0..=1.0).contains(&shoulder) {
        return Err("shoulder arccos argument outside [-1, 1]");
    }
    let tilt = (horizontal2 / r2).sqrt().min(1.0);
    Ok(Vector3::new(
        (x / y).atan(),
        shoulder.acos() + tilt.acos(),
        elbow.acos(),
    ))
}

/// Task-space point whose `ik` is `theta`, written in closed form.
///
/// The tip radius follows from `theta3`, the elevation from
/// `theta2 - acos(l2 c3 / r)`. For states with a negative elevation, which
/// `ik` cannot produce, this continues the map below the horizontal plane.
pub fn fk_closed_form(theta: &DVector<f64>, geom: &ManipulatorGeometry) -> DVector<f64> {
    let (l1, l2) = (geom.l1, geom.l2);
    let c3 = theta[2].cos();
    let r = (l1 * l1 + l2 * l2 + 2.0 * l1 * l2 * c3).max(0.0).sqrt();
    if r == 0.0 {
        return DVector::zeros(3);
    }
    let elevation = theta[1] - (l2 * c3 / r).clamp(-1.0, 1.0).acos();
    let horizontal = r * elevation.cos();
    let (s1, c1) = theta[0].sin_cos();
    DVector::from_column_slice(&[horizontal * s1, horizontal * c1, r * elevation.sin()])
}

const FK_MAX_ITER: usize = 100;
const FK_TOL: f64 = 1e-12;

/// Inverts `ik` by Newton iteration from a task-space `seed`.
pub fn fk(
    theta: &DVector<f64>,
    geom: &ManipulatorGeometry,
    seed: &DVector<f64>,
) -> Result<DVector<f64>> {
    check_dim("theta", 3, theta.len())?;
    check_dim("seed", 3, seed.len())?;
    let target = Vector3::new(theta[0], theta[1], theta[2]);
    let mut p = Vector3::new(seed[0], seed[1], seed[2]);
    let residual = |p: &Vector3<f64>| ik3(p, geom).map(|th| th - target);
    if residual(&p).is_err() && p.norm() > 0.0 {
        // pull an out-of-reach seed onto the sphere where both arccos
        // arguments vanish
        p *= (geom.l1 * geom.l1 + geom.l2 * geom.l2).sqrt() / p.norm();
    }
    let mut res = residual(&p).map_err(|_| Error::RootSolve {
        iterations: 0,
        residual: f64::INFINITY,
    })?;
    for iter in 0..FK_MAX_ITER {
        let norm = res.amax();
        if norm < FK_TOL {
            return Ok(DVector::from_column_slice(p.as_slice()));
        }
        let h = 1e-7 * p.amax().max(1.0);
        let mut jac = Matrix3::zeros();
        for j in 0..3 {
            let mut hi = p;
            let mut lo = p;
            hi[j] += h;
            lo[j] -= h;
            let col = match (ik3(&hi, geom), ik3(&lo, geom)) {
                (Ok(a), Ok(b)) => (a - b) / (2.0 * h),
                (Ok(a), Err(_)) => (a - (res + target)) / h,
                (Err(_), Ok(b)) => ((res + target) - b) / h,
                _ => {
                    return Err(Error::RootSolve {
                        iterations: iter,
                        residual: norm,
                    })
                }
            };
            jac.set_column(j, &col);
        }
        let step = jac.lu().solve(&(-res)).ok_or(Error::RootSolve {
            iterations: iter,
            residual: norm,
        })?;
        // backtrack until the residual decreases and stays in the domain
        let mut scale = 1.0;
        loop {
            let trial = p + step * scale;
            if let Ok(r) = residual(&trial) {
                if r.amax() < norm {
                    p = trial;
                    res = r;
                    break;
                }
            }
            scale *= 0.5;
            if scale < 1e-10 {
                return Err(Error::RootSolve {
                    iterations: iter,
                    residual: norm,
                });
            }
        }
    }
    let residual = res.amax();
    if residual < FK_TOL {
        Ok(DVector::from_column_slice(p.as_slice()))
    } else {
        Err(Error::RootSolve {
            iterations: FK_MAX_ITER,
            residual,
        })
    }
}

const REACH_SAMPLES: usize = 4001;
const JOINT_FD_STEP: f64 = 1e-5;

struct JointPath {
    task: ParametricPath,
    geom: ManipulatorGeometry,
}

impl JointPath {
    fn theta(&self, w: f64) -> DVector<f64> {
        let p = self.task.eval(w);
        match ik3(&Vector3::new(p[0], p[1], p[2]), &self.geom) {
            Ok(th) => DVector::from_column_slice(th.as_slice()),
            Err(_) => DVector::from_element(3, f64::NAN),
        }
    }
}

impl PathFunction for JointPath {
    fn dim(&self) -> usize {
        3
    }

    fn eval(&self, w: f64) -> DVector<f64> {
        self.theta(w)
    }

    fn d1(&self, w: f64) -> DVector<f64> {
        let h = JOINT_FD_STEP;
        (self.theta(w + h) - self.theta(w - h)) / (2.0 * h)
    }

    fn d2(&self, w: f64) -> DVector<f64> {
        let h = JOINT_FD_STEP;
        (self.theta(w + h) - self.theta(w) * 2.0 + self.theta(w - h)) / (h * h)
    }
}

/// Composition `ik o f` as a joint-space path. Derivatives are central
/// differences with step `1e-5`.
pub fn joint_path_from_task(
    task: &ParametricPath,
    geom: &ManipulatorGeometry,
) -> Result<ParametricPath> {
    check_dim("task path", 3, task.dim())?;
    geom.validate()?;
    let (lo, hi) = task.window();
    let step = (hi - lo) / (REACH_SAMPLES - 1) as f64;
    for i in 0..REACH_SAMPLES {
        let w = lo + step * i as f64;
        ik(&task.eval(w), geom)?;
    }
    let func = JointPath {
        task: task.clone(),
        geom: *geom,
    };
    let mut name = task.name().to_string();
    name.push_str("_joint");
    ParametricPath::new(name, Arc::new(func), task.window(), task.period())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PathSpec;
    use crate::linalg::min_sym_eigenvalue;
    use crate::plants::{forward_accel, Mode};
    use approx::assert_relative_eq;
    use core::f64::consts::PI;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    fn nominal_arm() -> Manipulator {
        manipulator(
            ManipulatorGeometry::default(),
            ManipulatorUncertainty::zero(),
        )
        .unwrap()
    }

    #[test]
    fn mass_matrix_examples() {
        let arm = nominal_arm();
        let m = arm.mass(&v(&[0.3, 0.0, 0.0]), &DVector::zeros(6));
        assert_eq!(m[(2, 2)], 2.0);
        assert_eq!(m[(1, 2)], m[(2, 1)]);
        // straight arm: J + (m2 + m3) l1^2 + 2 m3 l1 l2 + m3 l2^2
        assert_relative_eq!(m[(0, 0)], 0.5 + 3.0 + 4.0 + 2.0, epsilon = 1e-14);
    }

    #[test]
    fn mass_matrix_positive_definite() {
        for geom in [
            ManipulatorGeometry::default(),
            ManipulatorGeometry {
                l1: 2.1,
                l2: 1.4,
                ..ManipulatorGeometry::default()
            },
        ] {
            let arm = manipulator(geom, ManipulatorUncertainty::standard(&geom)).unwrap();
            for i in 0..100 {
                for j in 0..100 {
                    let q = v(&[0.0, -PI + 0.0628 * i as f64, -PI + 0.0628 * j as f64]);
                    for sigma in [DVector::zeros(6), arm.sigma_at(0.1 * (i * j) as f64)] {
                        let m = arm.mass(&q, &sigma);
                        assert!(min_sym_eigenvalue(&m) > 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn coriolis_matches_lagrangian_derivative() {
        // C q_dot = M_dot q_dot - 1/2 d/dq (q_dot' M q_dot), checked numerically
        let geom = ManipulatorGeometry {
            l1: 1.3,
            l2: 0.8,
            ..ManipulatorGeometry::default()
        };
        let arm = manipulator(geom, ManipulatorUncertainty::zero()).unwrap();
        let z = DVector::zeros(6);
        let h = 1e-6;
        for k in 0..50 {
            let t = k as f64;
            let q = v(&[0.1 * t, (0.7 * t).sin() * 2.0, (1.3 * t).cos() * 2.5]);
            let qd = v(&[(0.3 * t).cos() * 2.0, (0.9 * t).sin(), 1.5 - 0.05 * t]);
            let mut expected = DVector::zeros(3);
            for j in 0..3 {
                let mut qp = q.clone();
                let mut qm = q.clone();
                qp[j] += h;
                qm[j] -= h;
                let dm = (arm.mass(&qp, &z) - arm.mass(&qm, &z)) / (2.0 * h);
                expected += &dm * &qd * qd[j];
                expected[j] -= 0.5 * qd.dot(&(&dm * &qd));
            }
            let c = arm.coriolis(&q, &qd, &z);
            assert!((c - expected).amax() < 1e-6);
        }
    }

    #[test]
    fn energy_is_conserved_without_input() {
        let arm = nominal_arm();
        let geom = *arm.geometry();
        let energy = |q: &DVector<f64>, qd: &DVector<f64>| {
            0.5 * qd.dot(&(arm.mass(q, &DVector::zeros(6)) * qd)) + potential(&geom, q)
        };
        let mut q = v(&[-0.1, 1.5, 1.5]);
        let mut qd = v(&[1.0, 0.0, 0.0]);
        let e0 = energy(&q, &qd);
        let h = 1e-4;
        let tau = DVector::zeros(3);
        let accel = |q: &DVector<f64>, qd: &DVector<f64>| {
            forward_accel(&arm, Mode::Nominal, q, qd, &tau, 0.0).unwrap()
        };
        let steps = 10_000;
        for _ in 0..steps {
            let k1q = qd.clone();
            let k1v = accel(&q, &qd);
            let k2q = &qd + &k1v * (0.5 * h);
            let k2v = accel(&(&q + &k1q * (0.5 * h)), &k2q);
            let k3q = &qd + &k2v * (0.5 * h);
            let k3v = accel(&(&q + &k2q * (0.5 * h)), &k3q);
            let k4q = &qd + &k3v * h;
            let k4v = accel(&(&q + &k3q * h), &k4q);
            q += (k1q + k2q * 2.0 + k3q * 2.0 + k4q) * (h / 6.0);
            qd += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
        }
        let duration = steps as f64 * h;
        assert!((energy(&q, &qd) - e0).abs() / duration < 1e-3);
    }

    #[test]
    fn ik_examples() {
        let geom = ManipulatorGeometry::default();
        let th = ik(&v(&[0.0, 2.0, 0.0]), &geom).unwrap();
        assert_relative_eq!(th, v(&[0.0, PI / 3.0, 0.0]), epsilon = 1e-12);
        assert!(matches!(
            ik(&v(&[0.0, 3.0, 0.0]), &geom),
            Err(Error::Unreachable { .. })
        ));
    }

    fn reachable_thetas(count: usize) -> Vec<DVector<f64>> {
        // elevation in [0.1, 1.2], elbow in [0.3, 2.3], base in (-1.2, 1.2).
        // Past an elbow angle of about 2.39 the shoulder arccos leaves its domain.
        let geom = ManipulatorGeometry::default();
        (0..count)
            .map(|i| {
                let a = i as f64 / count as f64;
                let t1 = -1.2 + 2.4 * ((7.0 * a).fract());
                let t3 = 0.3 + 2.0 * ((13.0 * a + 0.1).fract());
                let e = 0.1 + 1.1 * ((29.0 * a + 0.2).fract());
                let c3 = t3.cos();
                let r =
                    (geom.l1 * geom.l1 + geom.l2 * geom.l2 + 2.0 * geom.l1 * geom.l2 * c3).sqrt();
                v(&[t1, (geom.l2 * c3 / r).acos() + e, t3])
            })
            .collect()
    }

    #[test]
    fn closed_form_inverts_ik() {
        let geom = ManipulatorGeometry::default();
        for th in reachable_thetas(500) {
            let p = fk_closed_form(&th, &geom);
            let back = ik(&p, &geom).unwrap();
            assert!((back - &th).amax() < 1e-9);
        }
    }

    #[test]
    fn newton_fk_round_trip() {
        let geom = ManipulatorGeometry::default();
        for th in reachable_thetas(500) {
            let exact = fk_closed_form(&th, &geom);
            let seed = exact.map(|x| x + 0.05);
            let p = fk(&th, &geom, &seed).unwrap();
            let back = ik(&p, &geom).unwrap();
            assert!((back - &th).amax() < 1e-8, "{th}");
        }
    }

    #[test]
    fn joint_path_of_constant_point_is_constant() {
        struct Constant;
        impl PathFunction for Constant {
            fn dim(&self) -> usize {
                3
            }
            fn eval(&self, _w: f64) -> DVector<f64> {
                DVector::from_column_slice(&[0.3, 1.2, 0.5])
            }
            fn d1(&self, _w: f64) -> DVector<f64> {
                DVector::zeros(3)
            }
            fn d2(&self, _w: f64) -> DVector<f64> {
                DVector::zeros(3)
            }
        }
        let task = ParametricPath::new("const", Arc::new(Constant), (0.0, 1.0), None).unwrap();
        let joint = joint_path_from_task(&task, &ManipulatorGeometry::default()).unwrap();
        assert_eq!(joint.d1(0.4), DVector::zeros(3));
        assert_eq!(joint.d2(0.4), DVector::zeros(3));
    }

    #[test]
    fn joint_path_derivatives_are_consistent() {
        let geom = ManipulatorGeometry {
            l1: 2.1,
            l2: 1.4,
            ..ManipulatorGeometry::default()
        };
        let task = PathSpec::torus_knot_default().build().unwrap();
        let joint = joint_path_from_task(&task, &geom).unwrap();
        let h = 1e-4;
        for i in 0..60 {
            let w = 0.1 * i as f64 + 0.05;
            let fd = (joint.eval(w + h) - joint.eval(w - h)) / (2.0 * h);
            let d1 = joint.d1(w);
            assert!((fd - &d1).amax() <= 1e-4 * d1.amax().max(1.0));
            let fd2 = (joint.d1(w + h) - joint.d1(w - h)) / (2.0 * h);
            let d2 = joint.d2(w);
            assert!((fd2 - &d2).amax() <= 1e-3 * d2.amax().max(1.0));
        }
    }

    #[test]
    fn reach_of_catalog_paths() {
        let unit = ManipulatorGeometry::default();
        let cyl = PathSpec::cylinder_default().build().unwrap();
        let knot = PathSpec::torus_knot_default().build().unwrap();
        assert!(matches!(
            joint_path_from_task(&cyl, &unit),
            Err(Error::Unreachable { .. })
        ));
        assert!(matches!(
            joint_path_from_task(&knot, &unit),
            Err(Error::Unreachable { .. })
        ));
        let long = ManipulatorGeometry {
            l1: 2.1,
            l2: 1.4,
            ..unit
        };
        assert!(joint_path_from_task(&knot, &long).is_ok());
    }
}
