//! Error signals of a logged run, ultimate-boundedness constants and
//! settling metrics.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::constraint::VfcContext;
use crate::error::{check_dim, Error, Result};
use crate::geometry::{dist_to_lifted_path, nearest_on_path, ParametricPath};
use crate::linalg::{max_sym_eigenvalue, min_sym_eigenvalue};
use crate::sim::TrajectoryLog;

/// Map from the selected coordinates to a task space holding another path,
/// e.g. joint angles to end-effector position.
pub struct TaskMap<'a> {
    pub path: &'a ParametricPath,
    pub map: &'a dyn Fn(&DVector<f64>) -> DVector<f64>,
}

/// Scan resolution of the distance oracle when processing whole logs.
pub const SERIES_RESOLUTION: usize = 400;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErrorSeries {
    pub t: Vec<f64>,
    pub beta_norm: Vec<f64>,
    pub phi_norm: Vec<f64>,
    /// Distance of `xi = (A q, w)` to the lifted path.
    pub dist_hgh: Vec<f64>,
    /// Distance of `A q` (or its task-space image) to the physical path.
    pub dist_phys: Vec<f64>,
    pub effort: Vec<f64>,
}

impl ErrorSeries {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

pub fn error_series(
    log: &TrajectoryLog,
    ctx: &VfcContext,
    task: Option<&TaskMap<'_>>,
) -> Result<ErrorSeries> {
    let path = ctx.path();
    let mut out = ErrorSeries::default();
    for r in &log.records {
        let s = &r.state;
        check_dim("beta", ctx.m(), r.beta.len())?;
        let xi = ctx.xi(&s.q, s.w)?;
        let zeta = ctx.selection().apply(&s.q);
        let phys = match task {
            None => nearest_on_path(path, &zeta, path.window_near(s.w), SERIES_RESOLUTION)?.0,
            Some(tm) => {
                let point = (tm.map)(&zeta);
                nearest_on_path(tm.path, &point, tm.path.window(), SERIES_RESOLUTION)?.0
            }
        };
        out.t.push(s.t);
        out.beta_norm.push(r.beta.norm());
        out.phi_norm.push(r.phi.norm());
        out.dist_hgh
            .push(dist_to_lifted_path(path, &xi, SERIES_RESOLUTION)?);
        out.dist_phys.push(phys);
        out.effort.push(r.tau.norm());
    }
    Ok(out)
}

/// Inputs of [`uub_bounds`].
#[derive(Debug, Clone, PartialEq)]
pub struct UubInputs {
    pub kappa: f64,
    /// `lambda_low` from the input-map eigenvalue check.
    pub lambda_low: f64,
    pub rho_w: f64,
    pub l1: f64,
    pub l2: f64,
    pub mu: f64,
    pub alpha_norm: f64,
    pub p: DMatrix<f64>,
}

/// Constants of the ultimate-boundedness estimate
/// `V_dot <= -K1 |x|^2 + K2 |x| + K3`, `X1 |x|^2 <= V <= X2 |x|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UubBounds {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub x1: f64,
    pub x2: f64,
    pub r: f64,
    pub dbar: f64,
}

pub fn uub_bounds(inp: &UubInputs) -> Result<UubBounds> {
    if !(inp.rho_w > -1.0) {
        return Err(Error::AssumptionViolated("rho_W must exceed -1"));
    }
    for (name, v) in [
        ("kappa", inp.kappa),
        ("lambda_low", inp.lambda_low),
        ("l1", inp.l1),
        ("l2", inp.l2),
        ("mu", inp.mu),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter {
                name,
                reason: alloc::format!("must be positive, got {v}"),
            });
        }
    }
    if !(inp.alpha_norm >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "alpha_norm",
            reason: alloc::format!("must be non-negative, got {}", inp.alpha_norm),
        });
    }
    let one_rho = 1.0 + inp.rho_w;
    let leak = 2.0 * one_rho * inp.l2 / inp.l1;
    let k1 = (2.0 * inp.kappa * inp.lambda_low * one_rho).min(leak);
    let k2 = leak * inp.alpha_norm;
    // the mu factor comes from the smoothing term of the robust control
    let k3 = 0.5 * one_rho * inp.mu;
    let adapt = 2.0 * one_rho / inp.l1;
    let x1 = min_sym_eigenvalue(&inp.p).min(adapt);
    let x2 = max_sym_eigenvalue(&inp.p).max(adapt);
    let r = (k2 + (k2 * k2 + 4.0 * k1 * k3).sqrt()) / (2.0 * k1);
    Ok(UubBounds {
        k1,
        k2,
        k3,
        x1,
        x2,
        r,
        dbar: (x2 / x1).sqrt() * r,
    })
}

impl UubBounds {
    /// Uniform bound `d(s)` on trajectories starting with `|x(t0)| <= s`.
    pub fn uniform_bound(&self, s: f64) -> f64 {
        (self.x2 / self.x1).sqrt() * s.max(self.r)
    }

    /// Time `T(dbar, s)` after which a trajectory starting at `|x| <= s`
    /// stays inside the ball of radius `dbar`.
    pub fn settle_time(&self, dbar: f64, s: f64) -> f64 {
        let ratio = self.x1 / self.x2;
        if s <= dbar / ratio.sqrt() {
            return 0.0;
        }
        let num = self.x2 * s * s - self.x1 * ratio * dbar * dbar;
        let den = self.k1 * dbar * dbar * ratio - self.k2 * dbar * ratio.sqrt() - self.k3;
        num / den
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SettleMetrics {
    pub ultimate_bound_est: f64,
    pub settle_time: f64,
    pub mean_effort: f64,
}

pub const DEFAULT_TAIL_FRACTION: f64 = 0.2;

/// Index of the first sample of the trailing `fraction` of the series.
pub fn tail_start(len: usize, fraction: f64) -> usize {
    let n = (len as f64 * fraction).ceil() as usize;
    len - n.clamp(1, len)
}

pub fn settle_metrics(series: &ErrorSeries, tail_fraction: f64) -> Result<SettleMetrics> {
    let len = series.len();
    if len < 2 {
        return Err(Error::SeriesTooShort(len));
    }
    if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
        return Err(Error::InvalidParameter {
            name: "tail_fraction",
            reason: alloc::format!("must lie in (0, 1), got {tail_fraction}"),
        });
    }
    let d = &series.dist_phys;
    let ub = d[tail_start(len, tail_fraction)..]
        .iter()
        .fold(0.0f64, |a, &b| a.max(b));
    let threshold = 1.05 * ub;
    let first_inside = d.iter().rposition(|&x| x > threshold).map_or(0, |i| i + 1);
    let settle_time = series.t[first_inside.min(len - 1)];

    let mut area = 0.0;
    for i in 1..len {
        area += 0.5 * (series.effort[i] + series.effort[i - 1]) * (series.t[i] - series.t[i - 1]);
    }
    let span = series.t[len - 1] - series.t[0];
    let mean_effort = if span > 0.0 {
        area / span
    } else {
        series.effort[0]
    };
    Ok(SettleMetrics {
        ultimate_bound_est: ub,
        settle_time,
        mean_effort,
    })
}

/// Least-squares slope, intercept and `R^2` of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let n = x.len().min(y.len());
    if n < 2 {
        return Err(Error::SeriesTooShort(n));
    }
    let nf = n as f64;
    let mx = x[..n].iter().sum::<f64>() / nf;
    let my = y[..n].iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (dx, dy) = (x[i] - mx, y[i] - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 {
        sxy * sxy / (sxx * syy)
    } else {
        1.0
    };
    Ok((slope, my - slope * mx, r2))
}
