//! Singularity-free guiding vector field in the augmented space `(zeta, w)`.
//!
//! For a path `f: R -> R^m` and `phi_i = zeta_i - f_i(w)` the field is
//!
//! ```text
//! chi_i     = (-1)^m f_i'(w) - k_i phi_i          i = 1..m
//! chi_{m+1} = (-1)^m + sum_i k_i phi_i f_i'(w)
//! ```
//!
//! The first `m` entries drive the physical coordinates (`chi_s`), the last
//! one drives the virtual coordinate (`w_dot`).

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{phi, ParametricPath};

/// Per-coordinate convergence gains `k_i > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GvfGains {
    k: DVector<f64>,
}

impl GvfGains {
    pub fn new(k: Vec<f64>) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: "no gains given".into(),
            });
        }
        if let Some(bad) = k.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: alloc::format!("gains must be positive, got {bad}"),
            });
        }
        Ok(Self {
            k: DVector::from_vec(k),
        })
    }

    pub fn uniform(m: usize, k: f64) -> Result<Self> {
        Self::new(alloc::vec![k; m])
    }

    pub fn k(&self) -> &DVector<f64> {
        &self.k
    }

    pub fn dim(&self) -> usize {
        self.k.len()
    }
}

/// `(-1)^m`.
pub fn orientation(m: usize) -> f64 {
    if m.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Physical part and virtual-coordinate rate, computed together.
fn split(
    path: &ParametricPath,
    gains: &GvfGains,
    xi: &DVector<f64>,
) -> Result<(DVector<f64>, f64)> {
    let m = path.dim();
    check_dim("gains", m, gains.dim())?;
    let err = phi(path, xi)?;
    let fp = path.d1(xi[m]);
    let sign = orientation(m);
    let k = gains.k();
    let chi = DVector::from_fn(m, |i, _| sign * fp[i] - k[i] * err[i]);
    let mut w_dot = sign;
    for i in 0..m {
        w_dot += k[i] * err[i] * fp[i];
    }
    Ok((chi, w_dot))
}

/// Full field `chi(xi)` in `R^{m+1}`.
pub fn gvf_full(
    path: &ParametricPath,
    gains: &GvfGains,
    xi: &DVector<f64>,
) -> Result<DVector<f64>> {
    let (chi, w_dot) = split(path, gains, xi)?;
    Ok(chi.push(w_dot))
}

/// First `m` entries of the field.
pub fn chi_s(path: &ParametricPath, gains: &GvfGains, xi: &DVector<f64>) -> Result<DVector<f64>> {
    Ok(split(path, gains, xi)?.0)
}

/// Last entry of the field, the rate of the virtual coordinate.
pub fn w_dot(path: &ParametricPath, gains: &GvfGains, xi: &DVector<f64>) -> Result<f64> {
    Ok(split(path, gains, xi)?.1)
}

/// `chi_s` and `w_dot` in one evaluation.
pub fn chi_s_and_w_dot(
    path: &ParametricPath,
    gains: &GvfGains,
    xi: &DVector<f64>,
) -> Result<(DVector<f64>, f64)> {
    split(path, gains, xi)
}

/// Partial derivatives of `chi_s` with respect to `zeta` and `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiJacobians {
    pub d_zeta: DMatrix<f64>,
    pub d_w: DVector<f64>,
}

pub fn chi_s_jacobians(
    path: &ParametricPath,
    gains: &GvfGains,
    xi: &DVector<f64>,
) -> Result<ChiJacobians> {
    let m = path.dim();
    check_dim("gains", m, gains.dim())?;
    check_dim("xi", m + 1, xi.len())?;
    let w = xi[m];
    let sign = orientation(m);
    let k = gains.k();
    let fp = path.d1(w);
    let fpp = path.d2(w);
    Ok(ChiJacobians {
        d_zeta: DMatrix::from_diagonal(&(-k)),
        d_w: DVector::from_fn(m, |i, _| sign * fpp[i] + k[i] * fp[i]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PathSpec;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sine() -> ParametricPath {
        PathSpec::Sinusoid.build().unwrap()
    }

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    fn catalog() -> Vec<ParametricPath> {
        [
            PathSpec::Sinusoid,
            PathSpec::cassini_default(),
            PathSpec::Lemniscate,
            PathSpec::cylinder_default(),
            PathSpec::torus_knot_default(),
        ]
        .iter()
        .map(|s| s.build().unwrap())
        .collect()
    }

    #[test]
    fn gvf_examples() {
        let k = GvfGains::uniform(2, 1.0).unwrap();
        let chi = gvf_full(&sine(), &k, &v(&[0.0, 0.0, 0.0])).unwrap();
        assert_eq!(chi, v(&[1.0, 1.0, 1.0]));
        let chi = gvf_full(&sine(), &k, &v(&[0.5, 0.0, 0.0])).unwrap();
        assert_relative_eq!(chi, v(&[0.5, 1.0, 1.5]), epsilon = 1e-15);
    }

    #[test]
    fn split_examples() {
        let k = GvfGains::uniform(2, 1.0).unwrap();
        let xi = v(&[2.2, 0.2, 0.1]);
        let c = chi_s(&sine(), &k, &xi).unwrap();
        assert_relative_eq!(c[0], -1.1, epsilon = 1e-12);
        assert_relative_eq!(c[1], 0.89483, epsilon = 1e-5);
        // 1 + 2.1 + (0.2 - sin 0.1) cos 0.1
        let expected = 1.0 + 2.1 + (0.2 - 0.1f64.sin()) * 0.1f64.cos();
        assert_relative_eq!(w_dot(&sine(), &k, &xi).unwrap(), expected, epsilon = 1e-14);
        assert_relative_eq!(expected, 3.19967, epsilon = 1e-5);

        let knot = PathSpec::torus_knot_default().build().unwrap();
        let k3 = GvfGains::uniform(3, 2.0).unwrap();
        let on = v(&[1.2, 2.0, 1.0, 0.0]);
        assert_eq!(w_dot(&knot, &k3, &on).unwrap(), -1.0);
    }

    #[test]
    fn split_reproduces_full_field_bitwise() {
        for path in catalog() {
            let m = path.dim();
            let k = GvfGains::new((1..=m).map(|i| 0.5 * i as f64).collect()).unwrap();
            for j in 0..50 {
                let t = j as f64 * 0.37;
                let xi = DVector::from_fn(m + 1, |i, _| (t + i as f64).sin() * 3.0);
                let full = gvf_full(&path, &k, &xi).unwrap();
                let c = chi_s(&path, &k, &xi).unwrap();
                let wd = w_dot(&path, &k, &xi).unwrap();
                for i in 0..m {
                    assert_eq!(full[i].to_bits(), c[i].to_bits());
                }
                assert_eq!(full[m].to_bits(), wd.to_bits());
            }
        }
    }

    #[test]
    fn jacobian_examples() {
        let k = GvfGains::uniform(2, 1.0).unwrap();
        let j = chi_s_jacobians(&sine(), &k, &v(&[0.0, 0.0, 0.0])).unwrap();
        assert_eq!(j.d_zeta, -DMatrix::<f64>::identity(2, 2));
        assert_relative_eq!(j.d_w, v(&[1.0, 1.0]), epsilon = 1e-15);
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let h = 1e-6;
        for path in catalog() {
            let m = path.dim();
            let k = GvfGains::new((1..=m).map(|i| 0.7 + 0.3 * i as f64).collect()).unwrap();
            for j in 0..100 {
                let t = j as f64 * 0.61 + 0.1;
                let xi = DVector::from_fn(m + 1, |i, _| (1.3 * t + 2.0 * i as f64).cos() * 2.5);
                let jac = chi_s_jacobians(&path, &k, &xi).unwrap();
                for col in 0..=m {
                    let mut p = xi.clone();
                    let mut q = xi.clone();
                    p[col] += h;
                    q[col] -= h;
                    let fd =
                        (chi_s(&path, &k, &p).unwrap() - chi_s(&path, &k, &q).unwrap()) / (2.0 * h);
                    let analytic: DVector<f64> = if col < m {
                        jac.d_zeta.column(col).into_owned()
                    } else {
                        jac.d_w.clone()
                    };
                    let scale = analytic.amax().max(1.0);
                    assert!(
                        (&fd - &analytic).amax() <= 1e-5 * scale,
                        "{} column {col} at {xi}",
                        path.name()
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_bad_gains_and_dimensions() {
        assert!(GvfGains::new(alloc::vec![1.0, 0.0]).is_err());
        assert!(GvfGains::new(alloc::vec![]).is_err());
        let k3 = GvfGains::uniform(3, 1.0).unwrap();
        assert!(matches!(
            gvf_full(&sine(), &k3, &v(&[0.0, 0.0, 0.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn field_never_vanishes(
            which in 0usize..5,
            offs in proptest::collection::vec(-10.0f64..10.0, 4),
            w in 0.0f64..6.3,
            kk in proptest::collection::vec(0.1f64..5.0, 3),
        ) {
            let path = catalog().swap_remove(which);
            let m = path.dim();
            let base = path.eval(w);
            let mut xi = DVector::zeros(m + 1);
            for i in 0..m {
                xi[i] = base[i] + offs[i];
            }
            xi[m] = w + offs[3];
            let k = GvfGains::new(kk[..m].to_vec()).unwrap();
            prop_assert!(gvf_full(&path, &k, &xi).unwrap().norm() > 0.0);
        }

        #[test]
        fn on_path_field_is_signed_tangent(which in 0usize..5, w in -3.0f64..9.0, kval in 0.1f64..5.0) {
            let path = catalog().swap_remove(which);
            let m = path.dim();
            let xi = path.eval(w).push(w);
            let k = GvfGains::uniform(m, kval).unwrap();
            let chi = gvf_full(&path, &k, &xi).unwrap();
            let tangent = path.d1(w) * orientation(m);
            for i in 0..m {
                prop_assert!((chi[i] - tangent[i]).abs() < 1e-12);
            }
            prop_assert_eq!(chi[m], orientation(m));
        }
    }
}
