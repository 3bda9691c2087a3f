//! The vector-field guided servo constraint `A q_dot = chi_s(A q, w)` and
//! the conventional implicit-surface constraint used as a baseline.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{ImplicitSurfaces, ParametricPath, SelectionMatrix};
use crate::linalg::{is_positive_definite, is_symmetric, pseudo_inverse};
use crate::vectorfield::{chi_s_and_w_dot, chi_s_jacobians, GvfGains};

/// Everything needed to evaluate `beta`, `chi_s` and `b` at a state.
#[derive(Debug, Clone)]
pub struct VfcContext {
    selection: SelectionMatrix,
    path: ParametricPath,
    gains: GvfGains,
    p: DMatrix<f64>,
}

impl VfcContext {
    pub fn new(
        selection: SelectionMatrix,
        path: ParametricPath,
        gains: GvfGains,
        p: DMatrix<f64>,
    ) -> Result<Self> {
        let m = selection.rows();
        check_dim("path dimension", m, path.dim())?;
        check_dim("gains", m, gains.dim())?;
        check_dim("P rows", m, p.nrows())?;
        check_dim("P cols", m, p.ncols())?;
        if !is_symmetric(&p, 1e-12) {
            return Err(Error::InvalidParameter {
                name: "P",
                reason: "not symmetric".into(),
            });
        }
        if !is_positive_definite(&p) {
            return Err(Error::InvalidParameter {
                name: "P",
                reason: "not positive definite".into(),
            });
        }
        Ok(Self {
            selection,
            path,
            gains,
            p,
        })
    }

    pub fn selection(&self) -> &SelectionMatrix {
        &self.selection
    }

    pub fn a(&self) -> &DMatrix<f64> {
        self.selection.matrix()
    }

    pub fn path(&self) -> &ParametricPath {
        &self.path
    }

    pub fn gains(&self) -> &GvfGains {
        &self.gains
    }

    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// Path dimension `m`.
    pub fn m(&self) -> usize {
        self.selection.rows()
    }

    /// Configuration dimension `n`.
    pub fn n(&self) -> usize {
        self.selection.cols()
    }

    /// Augmented point `xi = (A q, w)`.
    pub fn xi(&self, q: &DVector<f64>, w: f64) -> Result<DVector<f64>> {
        check_dim("q", self.n(), q.len())?;
        Ok(self.selection.apply(q).push(w))
    }

    /// `beta`, `b` and `w_dot` from a single pass over the path.
    pub fn evaluate(&self, q: &DVector<f64>, qdot: &DVector<f64>, w: f64) -> Result<VfcTerms> {
        check_dim("qdot", self.n(), qdot.len())?;
        let xi = self.xi(q, w)?;
        let (chi, w_dot) = chi_s_and_w_dot(&self.path, &self.gains, &xi)?;
        let jac = chi_s_jacobians(&self.path, &self.gains, &xi)?;
        let aqd = self.selection.apply(qdot);
        let beta = &aqd - &chi;
        let b = &jac.d_zeta * &aqd + &jac.d_w * w_dot;
        Ok(VfcTerms {
            chi_s: chi,
            w_dot,
            beta,
            b,
        })
    }
}

/// Constraint quantities at one state.
#[derive(Debug, Clone, PartialEq)]
pub struct VfcTerms {
    pub chi_s: DVector<f64>,
    pub w_dot: f64,
    /// Constraint-following error `A q_dot - chi_s`.
    pub beta: DVector<f64>,
    /// Right-hand side of the second-order form `A q_ddot = b`.
    pub b: DVector<f64>,
}

pub fn vfc_beta(
    ctx: &VfcContext,
    q: &DVector<f64>,
    qdot: &DVector<f64>,
    w: f64,
) -> Result<DVector<f64>> {
    Ok(ctx.evaluate(q, qdot, w)?.beta)
}

/// `b = (d chi_s / d zeta) A q_dot + (d chi_s / d w) w_dot`.
pub fn vfc_b(
    ctx: &VfcContext,
    q: &DVector<f64>,
    qdot: &DVector<f64>,
    w: f64,
) -> Result<DVector<f64>> {
    Ok(ctx.evaluate(q, qdot, w)?.b)
}

/// `||A A^+ b - b||`; zero iff `A x = b` has a solution.
pub fn feasibility_residual(a: &DMatrix<f64>, b: &DVector<f64>) -> f64 {
    if a.nrows() != b.len() {
        return f64::INFINITY;
    }
    let projected = a * (pseudo_inverse(a) * b);
    (projected - b).norm()
}

/// First-order constraint `grad psi q_dot = -Lambda psi` built from the
/// implicit surfaces of a path.
#[derive(Debug, Clone, PartialEq)]
pub struct CcfcConstraint {
    surfaces: ImplicitSurfaces,
    lambda: DVector<f64>,
}

impl CcfcConstraint {
    /// `lambda` holds the diagonal of `Lambda`, one entry per surface.
    pub fn new(surfaces: ImplicitSurfaces, lambda: Vec<f64>) -> Result<Self> {
        check_dim("Lambda", surfaces.count(), lambda.len())?;
        if let Some(bad) = lambda.iter().find(|&&l| !(l > 0.0)) {
            return Err(Error::InvalidParameter {
                name: "Lambda",
                reason: format!("diagonal entries must be positive, got {bad}"),
            });
        }
        Ok(Self {
            surfaces,
            lambda: DVector::from_vec(lambda),
        })
    }

    pub fn surfaces(&self) -> &ImplicitSurfaces {
        &self.surfaces
    }

    pub fn lambda(&self) -> &DVector<f64> {
        &self.lambda
    }
}

/// Second-order pair `(A, b)` with `A q_ddot = b`, obtained by
/// differentiating the first-order constraint once in time.
pub fn ccfc_second_order(
    c: &CcfcConstraint,
    q_s: &DVector<f64>,
    qdot_s: &DVector<f64>,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let m = c.surfaces.dim();
    check_dim("q_s", m, q_s.len())?;
    check_dim("qdot_s", m, qdot_s.len())?;
    let a = c.surfaces.gradient(q_s);
    let hessians = c.surfaces.hessians(q_s);
    let rate = &a * qdot_s;
    let b = DVector::from_fn(c.surfaces.count(), |i, _| {
        -c.lambda[i] * rate[i] - qdot_s.dot(&(&hessians[i] * qdot_s))
    });
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_selection_matrix, PathSpec};
    use crate::vectorfield::{chi_s, w_dot};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    fn pvtol_ctx(spec: PathSpec) -> VfcContext {
        VfcContext::new(
            make_selection_matrix(&[1, 2], 3).unwrap(),
            spec.build().unwrap(),
            GvfGains::uniform(2, 1.0).unwrap(),
            DMatrix::identity(2, 2),
        )
        .unwrap()
    }

    #[test]
    fn beta_examples() {
        let ctx = pvtol_ctx(PathSpec::Sinusoid);
        let q = v(&[2.2, 0.2, 1.5]);
        let beta = vfc_beta(&ctx, &q, &v(&[1.0, 0.0, 0.0]), 0.1).unwrap();
        assert_relative_eq!(beta[0], 2.1, epsilon = 1e-12);
        assert_relative_eq!(beta[1], -0.89483, epsilon = 1e-5);

        let chi = chi_s(ctx.path(), ctx.gains(), &ctx.xi(&q, 0.1).unwrap()).unwrap();
        let qdot = v(&[chi[0], chi[1], 7.0]);
        assert!(vfc_beta(&ctx, &q, &qdot, 0.1).unwrap().norm() < 1e-15);
    }

    #[test]
    fn b_at_pvtol_initial_state() {
        let ctx = pvtol_ctx(PathSpec::Sinusoid);
        let q = v(&[2.2, 0.2, 1.5]);
        let b = vfc_b(&ctx, &q, &v(&[1.0, 0.0, 0.0]), 0.1).unwrap();
        // d chi_s/dw = (1, cos 0.1 - sin 0.1) at w = 0.1, not (1, 1)
        let wd = w_dot(ctx.path(), ctx.gains(), &ctx.xi(&q, 0.1).unwrap()).unwrap();
        let slope = 0.1f64.cos() - 0.1f64.sin();
        assert_relative_eq!(b[0], -1.0 + wd, epsilon = 1e-12);
        assert_relative_eq!(b[1], slope * wd, epsilon = 1e-12);
        assert_relative_eq!(b[0], 2.19967, epsilon = 1e-5);
        assert_relative_eq!(b[1], 2.86425, epsilon = 1e-5);
    }

    #[test]
    fn b_on_path_at_rest() {
        let ctx = pvtol_ctx(PathSpec::cassini_default());
        let w = 0.8;
        let mut q = ctx.path().eval(w).push(0.0);
        q[2] = 0.3;
        let b = vfc_b(&ctx, &q, &DVector::zeros(3), w).unwrap();
        let jac = chi_s_jacobians(ctx.path(), ctx.gains(), &ctx.xi(&q, w).unwrap()).unwrap();
        assert_relative_eq!(b, jac.d_w, epsilon = 1e-14);
    }

    #[test]
    fn b_matches_derivative_along_a_kinematic_arc() {
        // q(t) = q0 + v t, w(t) integrated with its own rate
        let ctx = pvtol_ctx(PathSpec::Lemniscate);
        let q0 = v(&[0.3, -0.2, 0.0]);
        let qdot = v(&[0.4, 0.7, 1.0]);
        let w0 = 0.6;
        let h = 1e-6;
        let chi_at = |dt: f64| {
            let q = &q0 + &qdot * dt;
            // one Euler step is exact to O(h^2), enough for a central difference
            let wd = w_dot(ctx.path(), ctx.gains(), &ctx.xi(&q0, w0).unwrap()).unwrap();
            let w = w0 + wd * dt;
            chi_s(ctx.path(), ctx.gains(), &ctx.xi(&q, w).unwrap()).unwrap()
        };
        let fd = (chi_at(h) - chi_at(-h)) / (2.0 * h);
        let b = vfc_b(&ctx, &q0, &qdot, w0).unwrap();
        assert!((fd - b).amax() < 1e-4);
    }

    #[test]
    fn rejects_bad_p() {
        let a = make_selection_matrix(&[1, 2], 3).unwrap();
        let path = PathSpec::Sinusoid.build().unwrap();
        let k = GvfGains::uniform(2, 1.0).unwrap();
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(VfcContext::new(a.clone(), path.clone(), k.clone(), asym).is_err());
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(VfcContext::new(a.clone(), path.clone(), k.clone(), indefinite).is_err());
        let wrong = DMatrix::identity(3, 3);
        assert!(VfcContext::new(a, path, k, wrong).is_err());
    }

    #[test]
    fn ccfc_examples() {
        let cassini = CcfcConstraint::new(
            PathSpec::cassini_default().implicit().unwrap(),
            alloc::vec![1.0],
        )
        .unwrap();
        let (a, b) = ccfc_second_order(&cassini, &v(&[0.0, 0.0]), &v(&[1.0, 0.0])).unwrap();
        assert_eq!(a, DMatrix::zeros(1, 2));
        assert_relative_eq!(b[0], 36.0, epsilon = 1e-12);
        assert_relative_eq!(feasibility_residual(&a, &b), 36.0, epsilon = 1e-9);

        let lem = CcfcConstraint::new(PathSpec::Lemniscate.implicit().unwrap(), alloc::vec![1.0])
            .unwrap();
        let (a, b) = ccfc_second_order(&lem, &v(&[0.0, 0.0]), &v(&[1.0, 0.0])).unwrap();
        assert_relative_eq!(feasibility_residual(&a, &b), 2.0, epsilon = 1e-9);

        let sine =
            CcfcConstraint::new(PathSpec::Sinusoid.implicit().unwrap(), alloc::vec![1.0]).unwrap();
        let (a, b) = ccfc_second_order(&sine, &v(&[0.0, 0.0]), &v(&[1.0, 1.0])).unwrap();
        assert_eq!(a, DMatrix::from_row_slice(1, 2, &[-1.0, 1.0]));
        assert_eq!(b[0], 0.0);

        // at rest the pair is trivially consistent
        let (a, b) = ccfc_second_order(&cassini, &v(&[0.0, 0.0]), &v(&[0.0, 0.0])).unwrap();
        assert_eq!(feasibility_residual(&a, &b), 0.0);
    }

    #[test]
    fn ccfc_rejects_bad_lambda() {
        let s = PathSpec::cylinder_default().implicit().unwrap();
        assert!(CcfcConstraint::new(s, alloc::vec![1.0]).is_err());
        assert!(CcfcConstraint::new(s, alloc::vec![1.0, 0.0]).is_err());
        assert!(CcfcConstraint::new(s, alloc::vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn full_row_rank_is_always_feasible() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 0.5, -1.0, 0.3, 4.0]);
        for j in 0..20 {
            let b = v(&[(j as f64).sin() * 10.0, (j as f64).cos() * 3.0]);
            assert!(feasibility_residual(&a, &b) < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn beta_is_affine_in_qdot(
            q in proptest::collection::vec(-3.0f64..3.0, 3),
            qd in proptest::collection::vec(-3.0f64..3.0, 3),
            shift in proptest::collection::vec(-3.0f64..3.0, 2),
            w in -5.0f64..5.0,
        ) {
            let ctx = pvtol_ctx(PathSpec::Sinusoid);
            let q = DVector::from_vec(q);
            let qd = DVector::from_vec(qd);
            let s = DVector::from_vec(shift);
            let base = vfc_beta(&ctx, &q, &qd, w).unwrap();
            let moved = vfc_beta(&ctx, &q, &(&qd + ctx.a().transpose() * &s), w).unwrap();
            prop_assert!((moved - base - s).amax() < 1e-12);
        }

        #[test]
        fn vfc_is_always_feasible(
            q in proptest::collection::vec(-5.0f64..5.0, 3),
            qd in proptest::collection::vec(-5.0f64..5.0, 3),
            w in 0.0f64..6.3,
        ) {
            let ctx = pvtol_ctx(PathSpec::cassini_default());
            let b = vfc_b(&ctx, &DVector::from_vec(q), &DVector::from_vec(qd), w).unwrap();
            prop_assert!(feasibility_residual(ctx.a(), &b) < 1e-10);
        }
    }
}
