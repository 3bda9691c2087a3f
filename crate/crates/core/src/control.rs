//! Nominal and adaptive robust control laws, bound functions, and grid
//! checks of the structural assumptions they rely on.
//!
//! With `G = A M̄^-1 B̄` (invertible) the control is `tau = p1 + p2 + p3`:
//!
//! ```text
//! p1 = G^-1 [b + A M̄^-1 (C̄ q_dot + ḡ)]      cancels the nominal drift
//! p2 = -kappa G' P beta                      drives beta to zero
//! p3 = -eta(upsilon) upsilon Pi              robust term, Pi = alpha_hat' Pi_breve
//! ```
//!
//! where `beta_breve = G' P beta`, `upsilon = beta_breve Pi` and
//! `eta = 1/||upsilon||` outside the `mu`-ball, `1/mu` inside.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::constraint::{VfcContext, VfcTerms};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{fmt_vector, is_positive_definite, min_sym_eigenvalue, spectral_norm};
use crate::plants::{inverse_spd, sigma_vertices, MechanicalSystem};

/// Gains of the control law. `P` lives in [`VfcContext`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    pub kappa: f64,
    pub mu: f64,
    pub l1: f64,
    pub l2: f64,
    pub eps_dz: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            kappa: 5.0,
            mu: 0.1,
            l1: 0.5,
            l2: 0.1,
            eps_dz: 1.0,
        }
    }
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("kappa", self.kappa),
            ("mu", self.mu),
            ("l1", self.l1),
            ("l2", self.l2),
            ("eps_dz", self.eps_dz),
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

/// Bound function `Pi = alpha' Pi_breve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundFunction {
    /// `Pi_breve = (||G^-1 A M̄^-1||, ||p1||)`, spectral norm.
    Pvtol,
    /// `Pi_breve = ||q_dot||^2 + ||q_dot|| + 1`.
    Manipulator,
}

pub fn pvtol_pi() -> BoundFunction {
    BoundFunction::Pvtol
}

pub fn manipulator_pi() -> BoundFunction {
    BoundFunction::Manipulator
}

impl BoundFunction {
    /// Dimension `k` of `alpha`.
    pub fn k_dim(&self) -> usize {
        match self {
            BoundFunction::Pvtol => 2,
            BoundFunction::Manipulator => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BoundFunction::Pvtol => "pvtol",
            BoundFunction::Manipulator => "manipulator",
        }
    }

    pub fn pi_breve(&self, terms: &ControlTerms, qdot: &DVector<f64>) -> DVector<f64> {
        match self {
            BoundFunction::Pvtol => DVector::from_column_slice(&[
                spectral_norm(&(&terms.g_inv * &terms.a_minv)),
                terms.p1.norm(),
            ]),
            BoundFunction::Manipulator => {
                let v = qdot.norm();
                DVector::from_element(1, v * v + v + 1.0)
            }
        }
    }
}

/// Per-state quantities shared by all control terms.
#[derive(Debug, Clone)]
pub struct ControlTerms {
    pub vfc: VfcTerms,
    /// `A M̄^-1`.
    pub a_minv: DMatrix<f64>,
    /// `G = A M̄^-1 B̄`.
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub p1: DVector<f64>,
    pub p2: DVector<f64>,
    /// `G' P beta`.
    pub beta_breve: DVector<f64>,
}

/// Relative singular-value floor below which `G` counts as singular.
const SINGULAR_RCOND: f64 = 1e-12;

fn invert_input_map(g: &DMatrix<f64>, q: &DVector<f64>, t: f64) -> Result<DMatrix<f64>> {
    let singular = || Error::SingularInputMap {
        t,
        q: fmt_vector(q),
    };
    if !g.is_square() {
        return Err(singular());
    }
    let sv = g.clone().singular_values();
    if !(sv.min() > SINGULAR_RCOND * sv.max()) {
        return Err(singular());
    }
    g.clone().try_inverse().ok_or_else(singular)
}

/// `A M̄^-1`, `G` and `G^-1` at `q`.
fn input_map(
    ctx: &VfcContext,
    sys: &dyn MechanicalSystem,
    mass: DMatrix<f64>,
    input: &DMatrix<f64>,
    q: &DVector<f64>,
    t: f64,
) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    check_dim("input count", ctx.m(), sys.inputs())?;
    let minv = inverse_spd(mass, t)?;
    let a_minv = ctx.a() * minv;
    let g = &a_minv * input;
    let g_inv = invert_input_map(&g, q, t)?;
    Ok((a_minv, g, g_inv))
}

pub fn control_terms(
    ctx: &VfcContext,
    sys: &dyn MechanicalSystem,
    cfg: &ControllerConfig,
    q: &DVector<f64>,
    qdot: &DVector<f64>,
    w: f64,
    t: f64,
) -> Result<ControlTerms> {
    check_dim("q", sys.dof(), q.len())?;
    check_dim("configuration dimension", ctx.n(), sys.dof())?;
    let vfc = ctx.evaluate(q, qdot, w)?;
    let nominal = sys.nominal(q, qdot);
    let (a_minv, g, g_inv) = input_map(ctx, sys, nominal.mass, &nominal.input, q, t)?;
    let drift = &a_minv * (&nominal.coriolis + &nominal.gravity);
    let p1 = &g_inv * (&vfc.b + drift);
    let beta_breve = g.transpose() * (ctx.p() * &vfc.beta);
    let p2 = &beta_breve * -cfg.kappa;
    Ok(ControlTerms {
        vfc,
        a_minv,
        g,
        g_inv,
        p1,
        p2,
        beta_breve,
    })
}

/// `p1 + p2`.
pub fn nominal_tau(
    ctx: &VfcContext,
    sys: &dyn MechanicalSystem,
    cfg: &ControllerConfig,
    q: &DVector<f64>,
    qdot: &DVector<f64>,
    w: f64,
    t: f64,
) -> Result<DVector<f64>> {
    let terms = control_terms(ctx, sys, cfg, q, qdot, w, t)?;
    Ok(terms.p1 + terms.p2)
}

/// `eta`: `1/||upsilon||` outside the `mu`-ball, `1/mu` inside.
pub fn smoothing_gain(upsilon_norm: f64, mu: f64) -> f64 {
    if upsilon_norm > mu {
        1.0 / upsilon_norm
    } else {
        1.0 / mu
    }
}

/// `p3 = -eta upsilon Pi` from `beta_breve`, `Pi_breve` and `alpha_hat`.
pub fn p3_from(
    cfg: &ControllerConfig,
    beta_breve: &DVector<f64>,
    pi_breve: &DVector<f64>,
    alpha_hat: &DVector<f64>,
) -> Result<DVector<f64>> {
    check_dim("alpha_hat", pi_breve.len(), alpha_hat.len())?;
    let pi = alpha_hat.dot(pi_breve);
    let upsilon = beta_breve * pi;
    let eta = smoothing_gain(upsilon.norm(), cfg.mu);
    Ok(upsilon * (-eta * pi))
}

#[allow(clippy::too_many_arguments)]
pub fn robust_p3(
    ctx: &VfcContext,
    sys: &dyn MechanicalSystem,
    cfg: &ControllerConfig,
    bound: BoundFunction,
    alpha_hat: &DVector<f64>,
    q: &DVector<f64>,
    qdot: &DVector<f64>,
    w: f64,
    t: f64,
) -> Result<DVector<f64>> {
    let terms = control_terms(ctx, sys, cfg, q, qdot, w, t)?;
    p3_from(
        cfg,
        &terms.beta_breve,
        &bound.pi_breve(&terms, qdot),
        alpha_hat,
    )
}

/// Leakage-type adaptive law for `alpha_hat`.
pub fn adaptive_rate(
    cfg: &ControllerConfig,
    pi_breve: &DVector<f64>,
    alpha_hat: &DVector<f64>,
    beta_breve_norm: f64,
) -> DVector<f64> {
    let pi_norm = pi_breve.norm();
    let gain = if pi_norm * beta_breve_norm > cfg.eps_dz {
        cfg.l1 * beta_breve_norm
    } else {
        cfg.l1 * pi_norm * beta_breve_norm * beta_breve_norm / cfg.eps_dz
    };
    pi_breve * gain - alpha_hat * cfg.l2
}

// ---------------------------------------------------------------------------
// Assumption checks

/// Cartesian grid with `per_axis` points on each closed interval. A
/// degenerate interval `(c, c)` contributes the single point `c`.
pub fn grid(ranges: &[(f64, f64)], per_axis: usize) -> Vec<DVector<f64>> {
    let per_axis = per_axis.max(1);
    let counts: Vec<usize> = ranges
        .iter()
        .map(|&(lo, hi)| if lo == hi { 1 } else { per_axis })
        .collect();
    let total: usize = counts.iter().product();
    (0..total)
        .map(|mut idx| {
            DVector::from_fn(ranges.len(), |i, _| {
                let j = idx % counts[i];
                idx /= counts[i];
                let (lo, hi) = ranges[i];
                if counts[i] == 1 {
                    0.5 * (lo + hi)
                } else {
                    lo + (hi - lo) * j as f64 / (counts[i] - 1) as f64
                }
            })
        })
        .collect()
}

/// `min over states of lambda_min(P G G' P)`.
pub fn check_assumption4(
    sys: &dyn MechanicalSystem,
    ctx: &VfcContext,
    states: &[DVector<f64>],
) -> Result<f64> {
    let mut lowest = f64::INFINITY;
    for q in states {
        let nominal = sys.nominal(q, &DVector::zeros(sys.dof()));
        let (_, g, _) = input_map(ctx, sys, nominal.mass, &nominal.input, q, 0.0)?;
        let pg = ctx.p() * &g;
        lowest = lowest.min(min_sym_eigenvalue(&(&pg * pg.transpose())));
    }
    Ok(lowest)
}

/// Matched/mismatched parts of `H = M̄ M^-1 - I`:
/// `H_check = G^-1 A M̄^-1 H`, `H_tilde = H - B̄ H_check`.
pub fn decompose_matched(
    sys: &dyn MechanicalSystem,
    ctx: &VfcContext,
    q: &DVector<f64>,
    sigma: &DVector<f64>,
    t: f64,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let h = uncertainty_h(sys, q, sigma, t)?;
    let nominal = sys.nominal(q, &DVector::zeros(sys.dof()));
    let (a_minv, _, g_inv) = input_map(ctx, sys, nominal.mass, &nominal.input, q, t)?;
    Ok(split_matched(&h, &nominal.input, &a_minv, &g_inv))
}

/// `X_check = G^-1 A M̄^-1 X` and `X_tilde = X - B̄ X_check`.
pub fn split_matched(
    x: &DMatrix<f64>,
    b_bar: &DMatrix<f64>,
    a_minv: &DMatrix<f64>,
    g_inv: &DMatrix<f64>,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let check = g_inv * (a_minv * x);
    let tilde = x - b_bar * &check;
    (check, tilde)
}

/// `H = M̄ M^-1 - I`.
pub fn uncertainty_h(
    sys: &dyn MechanicalSystem,
    q: &DVector<f64>,
    sigma: &DVector<f64>,
    t: f64,
) -> Result<DMatrix<f64>> {
    let zero = DVector::zeros(sys.sigma_dim());
    let m_bar = sys.mass(q, &zero);
    let m_inv = inverse_spd(sys.mass(q, sigma), t)?;
    Ok(m_bar * m_inv - DMatrix::identity(sys.dof(), sys.dof()))
}

/// `W = B_check + H_check B`.
pub fn w_matrix(
    sys: &dyn MechanicalSystem,
    ctx: &VfcContext,
    q: &DVector<f64>,
    sigma: &DVector<f64>,
    t: f64,
) -> Result<DMatrix<f64>> {
    let zero = DVector::zeros(sys.sigma_dim());
    let b_bar = sys.input_matrix(q, &zero);
    let b = sys.input_matrix(q, sigma);
    let delta_b = &b - &b_bar;
    let h = uncertainty_h(sys, q, sigma, t)?;
    let (a_minv, _, g_inv) = input_map(ctx, sys, sys.mass(q, &zero), &b_bar, q, t)?;
    let projector = &g_inv * &a_minv;
    Ok(&projector * delta_b + &projector * h * b)
}

/// `1/2 min over states and sigma of lambda_min(W + W')`.
pub fn check_assumption5(
    sys: &dyn MechanicalSystem,
    ctx: &VfcContext,
    states: &[DVector<f64>],
    sigmas: &[DVector<f64>],
) -> Result<f64> {
    let mut lowest = f64::INFINITY;
    for q in states {
        for sigma in sigmas {
            let w = w_matrix(sys, ctx, q, sigma, 0.0)?;
            lowest = lowest.min(min_sym_eigenvalue(&w));
        }
    }
    Ok(lowest)
}

/// Uncertainty samples for the checks: the vertices of the box.
pub fn default_sigma_grid(sys: &dyn MechanicalSystem) -> Vec<DVector<f64>> {
    sigma_vertices(sys)
}

/// Left-hand side of the envelope condition at one state, maximised over
/// `sigmas`:
///
/// ```text
/// (1+rho_W)^-1 max ||H_check (-C q_dot - g + B p1) + B_check p1 - C_check q_dot - g_check||
/// ```
#[allow(clippy::too_many_arguments)]
pub fn assumption6_lhs(
    ctx: &VfcContext,
    sys: &dyn MechanicalSystem,
    cfg: &ControllerConfig,
    q: &DVector<f64>,
    qdot: &DVector<f64>,
    w: f64,
    t: f64,
    sigmas: &[DVector<f64>],
    rho_w: f64,
) -> Result<f64> {
    if !(rho_w > -1.0) {
        return Err(Error::AssumptionViolated("rho_W must exceed -1"));
    }
    let terms = control_terms(ctx, sys, cfg, q, qdot, w, t)?;
    let projector = &terms.g_inv * &terms.a_minv;
    let nominal = sys.nominal(q, qdot);
    let mut worst: f64 = 0.0;
    for sigma in sigmas {
        let d = sys.dynamics(q, qdot, sigma);
        let h = uncertainty_h(sys, q, sigma, t)?;
        let h_check = &projector * h;
        let b_check = &projector * (&d.input - &nominal.input);
        let cq_check = &projector * (&d.coriolis - &nominal.coriolis);
        let g_check = &projector * (&d.gravity - &nominal.gravity);
        let value = h_check * (-&d.coriolis - &d.gravity + &d.input * &terms.p1)
            + b_check * &terms.p1
            - cq_check
            - g_check;
        worst = worst.max(value.norm());
    }
    Ok(worst / (1.0 + rho_w))
}

/// Two-term envelope constants `alpha = (alpha1, alpha2)` for the
/// [`BoundFunction::Pvtol`] bound:
/// `alpha1 = (1+rho_W)^-1 max ||(H+I)(C q_dot + g)||`,
/// `alpha2 = (1+rho_W)^-1 max ||W||`, over the given samples.
pub fn two_term_alpha(
    sys: &dyn MechanicalSystem,
    ctx: &VfcContext,
    states: &[(DVector<f64>, DVector<f64>)],
    sigmas: &[DVector<f64>],
    rho_w: f64,
) -> Result<DVector<f64>> {
    if !(rho_w > -1.0) {
        return Err(Error::AssumptionViolated("rho_W must exceed -1"));
    }
    let n = sys.dof();
    let (mut a1, mut a2): (f64, f64) = (0.0, 0.0);
    for (q, qdot) in states {
        for sigma in sigmas {
            let d = sys.dynamics(q, qdot, sigma);
            let h = uncertainty_h(sys, q, sigma, 0.0)?;
            let hi = h + DMatrix::identity(n, n);
            a1 = a1.max((hi * (&d.coriolis + &d.gravity)).norm());
            a2 = a2.max(spectral_norm(&w_matrix(sys, ctx, q, sigma, 0.0)?));
        }
    }
    Ok(DVector::from_column_slice(&[a1, a2]) / (1.0 + rho_w))
}

/// Checks `P` is usable as the constraint weight.
pub fn check_weight(p: &DMatrix<f64>) -> bool {
    is_positive_definite(p)
}
