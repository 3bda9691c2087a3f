//! Desired paths, selection matrices and the distance-to-path oracle.
//!
//! A desired path is a map `w -> f(w)` into configuration space together
//! with its first and second derivatives. The five catalog paths carry
//! closed-form derivatives. Paths built by composition (for example the
//! joint-space image of a task-space path) implement [`PathFunction`]
//! directly.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::fmt;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{check_dim, Error, Result};

/// Golden-section refinement stops once the bracket is narrower than this.
pub const REFINE_WIDTH: f64 = 1e-8;

/// Number of samples used by the dense scan of the distance oracle.
pub const DEFAULT_RESOLUTION: usize = 2000;

const TANGENT_GRID: usize = 20_001;

/// A twice-differentiable map from the path parameter into `R^m`.
pub trait PathFunction: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, w: f64) -> DVector<f64>;
    fn d1(&self, w: f64) -> DVector<f64>;
    fn d2(&self, w: f64) -> DVector<f64>;
}

/// A desired path with its parameter window and tangent bound.
#[derive(Clone)]
pub struct ParametricPath {
    name: String,
    func: Arc<dyn PathFunction>,
    window: (f64, f64),
    period: Option<f64>,
    tangent_bound: f64,
}

impl fmt::Debug for ParametricPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricPath")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("window", &self.window)
            .field("period", &self.period)
            .field("tangent_bound", &self.tangent_bound)
            .finish()
    }
}

impl ParametricPath {
    /// Wraps a path function. `period` is `Some(p)` when `f(w + p) = f(w)`;
    /// the tangent bound is measured numerically over `window`.
    pub fn new(
        name: impl Into<String>,
        func: Arc<dyn PathFunction>,
        window: (f64, f64),
        period: Option<f64>,
    ) -> Result<Self> {
        let (lo, hi) = window;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::EmptyWindow(lo, hi));
        }
        let mut path = Self {
            name: name.into(),
            func,
            window,
            period,
            tangent_bound: 0.0,
        };
        path.tangent_bound = path.measure_tangent_bound();
        Ok(path)
    }

    fn measure_tangent_bound(&self) -> f64 {
        let (lo, hi) = self.window;
        let step = (hi - lo) / (TANGENT_GRID - 1) as f64;
        (0..TANGENT_GRID)
            .map(|i| self.d1(lo + step * i as f64).amax())
            .fold(0.0, f64::max)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.func.dim()
    }

    pub fn eval(&self, w: f64) -> DVector<f64> {
        self.func.eval(w)
    }

    pub fn d1(&self, w: f64) -> DVector<f64> {
        self.func.d1(w)
    }

    pub fn d2(&self, w: f64) -> DVector<f64> {
        self.func.d2(w)
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    /// Max over the window of `|f'_i(w)|`.
    pub fn tangent_bound(&self) -> f64 {
        self.tangent_bound
    }

    /// Search window for the distance oracle around the parameter `w`.
    ///
    /// Periodic paths use their full window. Open paths use the default
    /// window translated so that it is centred on `w`.
    pub fn window_near(&self, w: f64) -> (f64, f64) {
        match self.period {
            Some(_) => self.window,
            None => {
                let half = 0.5 * (self.window.1 - self.window.0);
                (w - half, w + half)
            }
        }
    }
}

/// Constant 0/1 matrix picking the path coordinates out of `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionMatrix {
    indices: Vec<usize>,
    matrix: DMatrix<f64>,
}

impl SelectionMatrix {
    /// One-based, strictly increasing column indices.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `A q`, i.e. `(q_{s1}, ..., q_{sm})`.
    pub fn apply(&self, q: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.indices.len(), self.indices.iter().map(|&s| q[s - 1]))
    }
}

/// Builds `A` with `a_ij = 1` iff `s_i = j` (one-based indices).
pub fn make_selection_matrix(indices: &[usize], n: usize) -> Result<SelectionMatrix> {
    if indices.is_empty() {
        return Err(Error::InvalidSelection("no indices given".to_string()));
    }
    if indices.len() > n {
        return Err(Error::InvalidSelection(format!(
            "{} indices for a {}-dimensional configuration",
            indices.len(),
            n
        )));
    }
    for &s in indices {
        if s == 0 || s > n {
            return Err(Error::InvalidSelection(format!(
                "index {s} outside 1..={n}"
            )));
        }
    }
    if indices.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidSelection(
            "indices must be strictly increasing".to_string(),
        ));
    }
    let mut matrix = DMatrix::zeros(indices.len(), n);
    for (row, &s) in indices.iter().enumerate() {
        matrix[(row, s - 1)] = 1.0;
    }
    Ok(SelectionMatrix {
        indices: indices.to_vec(),
        matrix,
    })
}

/// Path-function error `phi_i = zeta_i - f_i(w)` for `xi = (zeta, w)`.
pub fn phi(path: &ParametricPath, xi: &DVector<f64>) -> Result<DVector<f64>> {
    let m = path.dim();
    check_dim("xi", m + 1, xi.len())?;
    let w = xi[m];
    Ok(xi.rows(0, m) - path.eval(w))
}

// ---------------------------------------------------------------------------
// Catalog

/// Parameters of the catalog paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathSpec {
    /// `y = sin x`, parameterized by `x = w`.
    Sinusoid,
    /// Cassini oval `(x^2+y^2+ra^2)^2 - 4 ra^2 x^2 - rb^4 = 0`, requires `rb > ra`.
    Cassini { ra: f64, rb: f64 },
    /// Lemniscate of Bernoulli `(x^2+y^2)^2 = x^2 - y^2`.
    Lemniscate,
    /// Intersection of `(x-xc)^2 + (z-zc)^2 = r1^2` and `(y-yc)^2 + z^2 = r2^2`.
    CylinderIntersection {
        r1: f64,
        r2: f64,
        xc: f64,
        yc: f64,
        zc: f64,
    },
    /// (3,2) torus knot around `center`.
    TorusKnot {
        major: f64,
        minor: f64,
        center: [f64; 3],
    },
}

/// Loosely typed path parameters, as read from a config file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PathParams {
    pub ra: Option<f64>,
    pub rb: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub xc: Option<f64>,
    pub yc: Option<f64>,
    pub zc: Option<f64>,
    pub major: Option<f64>,
    pub minor: Option<f64>,
    pub center: Option<[f64; 3]>,
}

pub const PATH_CATALOG: [&str; 5] = [
    "sinusoid",
    "cassini",
    "lemniscate",
    "cylinder_intersection",
    "torus_knot",
];

impl PathSpec {
    pub fn cassini_default() -> Self {
        PathSpec::Cassini { ra: 3.0, rb: 3.15 }
    }

    pub fn cylinder_default() -> Self {
        PathSpec::CylinderIntersection {
            r1: 0.5,
            r2: 1.5,
            xc: 0.0,
            yc: 2.5,
            zc: 1.0,
        }
    }

    pub fn torus_knot_default() -> Self {
        PathSpec::TorusKnot {
            major: 1.0,
            minor: 0.2,
            center: [0.0, 2.0, 1.0],
        }
    }

    /// Resolves a catalog name, filling unspecified parameters with defaults.
    pub fn from_name(name: &str, params: &PathParams) -> Result<Self> {
        match name {
            "sinusoid" => Ok(PathSpec::Sinusoid),
            "cassini" => {
                let ra = params.ra.unwrap_or(3.0);
                Ok(PathSpec::Cassini {
                    ra,
                    rb: params.rb.unwrap_or(1.05 * ra),
                })
            }
            "lemniscate" => Ok(PathSpec::Lemniscate),
            "cylinder_intersection" => {
                let r1 = params.r1.unwrap_or(0.5);
                let r2 = params.r2.unwrap_or(1.5);
                Ok(PathSpec::CylinderIntersection {
                    r1,
                    r2,
                    xc: params.xc.unwrap_or(0.0),
                    yc: params.yc.unwrap_or(2.5),
                    zc: params.zc.unwrap_or(r2 - r1),
                })
            }
            "torus_knot" => Ok(PathSpec::TorusKnot {
                major: params.major.unwrap_or(1.0),
                minor: params.minor.unwrap_or(0.2),
                center: params.center.unwrap_or([0.0, 2.0, 1.0]),
            }),
            other => Err(Error::UnknownPath {
                name: other.to_string(),
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PathSpec::Sinusoid => "sinusoid",
            PathSpec::Cassini { .. } => "cassini",
            PathSpec::Lemniscate => "lemniscate",
            PathSpec::CylinderIntersection { .. } => "cylinder_intersection",
            PathSpec::TorusKnot { .. } => "torus_knot",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            PathSpec::Sinusoid | PathSpec::Cassini { .. } | PathSpec::Lemniscate => 2,
            PathSpec::CylinderIntersection { .. } | PathSpec::TorusKnot { .. } => 3,
        }
    }

    /// Implicit description `psi(q) = 0`, when the path has a simple one.
    pub fn implicit(&self) -> Option<ImplicitSurfaces> {
        match self {
            PathSpec::TorusKnot { .. } => None,
            spec => Some(ImplicitSurfaces { spec: *spec }),
        }
    }
}

/// Builds a catalog path by name.
pub fn builtin_path(name: &str, params: &PathParams) -> Result<ParametricPath> {
    PathSpec::from_name(name, params)?.build()
}

impl PathSpec {
    pub fn build(&self) -> Result<ParametricPath> {
        let (func, window, period): (Arc<dyn PathFunction>, _, _) = match *self {
            PathSpec::Sinusoid => (Arc::new(Sinusoid), (-10.0, 10.0), None),
            PathSpec::Cassini { ra, rb } => {
                positive("ra", ra)?;
                if !(rb > ra) {
                    return Err(Error::InvalidParameter {
                        name: "rb",
                        reason: format!("Cassini oval needs rb > ra (got ra = {ra}, rb = {rb})"),
                    });
                }
                (Arc::new(Cassini { ra, rb }), (0.0, TAU), Some(TAU))
            }
            PathSpec::Lemniscate => (Arc::new(Lemniscate), (0.0, TAU), Some(TAU)),
            PathSpec::CylinderIntersection { r1, r2, xc, yc, zc } => {
                positive("r1", r1)?;
                if !(r2 > r1) {
                    return Err(Error::InvalidParameter {
                        name: "r2",
                        reason: format!("needs r2 > r1 (got r1 = {r1}, r2 = {r2})"),
                    });
                }
                (
                    Arc::new(CylinderIntersection { r1, r2, xc, yc, zc }),
                    (0.0, TAU),
                    Some(PI * 2.0),
                )
            }
            PathSpec::TorusKnot {
                major,
                minor,
                center,
            } => {
                positive("major", major)?;
                positive("minor", minor)?;
                (
                    Arc::new(TorusKnot {
                        major,
                        minor,
                        center,
                    }),
                    (0.0, TAU),
                    Some(TAU),
                )
            }
        };
        ParametricPath::new(self.name(), func, window, period)
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be positive, got {v}"),
        })
    }
}

fn vec2(a: f64, b: f64) -> DVector<f64> {
    DVector::from_column_slice(&[a, b])
}

fn vec3(a: f64, b: f64, c: f64) -> DVector<f64> {
    DVector::from_column_slice(&[a, b, c])
}

struct Sinusoid;

impl PathFunction for Sinusoid {
    fn dim(&self) -> usize {
        2
    }
    fn eval(&self, w: f64) -> DVector<f64> {
        vec2(w, w.sin())
    }
    fn d1(&self, w: f64) -> DVector<f64> {
        vec2(1.0, w.cos())
    }
    fn d2(&self, w: f64) -> DVector<f64> {
        vec2(0.0, -w.sin())
    }
}

/// Radius of a polar curve `r(w)` and its first two derivatives.
#[derive(Clone, Copy)]
struct Radial {
    r: f64,
    r1: f64,
    r2: f64,
}

impl Radial {
    /// From `u = r^2` and its derivatives.
    fn from_square(u: f64, u1: f64, u2: f64) -> Self {
        let r = u.sqrt();
        let r1 = u1 / (2.0 * r);
        let r2 = u2 / (2.0 * r) - u1 * u1 / (4.0 * r * r * r);
        Self { r, r1, r2 }
    }

    fn point(&self, w: f64) -> DVector<f64> {
        vec2(w.cos() * self.r, w.sin() * self.r)
    }

    fn tangent(&self, w: f64) -> DVector<f64> {
        let (s, c) = w.sin_cos();
        vec2(-s * self.r + c * self.r1, c * self.r + s * self.r1)
    }

    fn curvature(&self, w: f64) -> DVector<f64> {
        let (s, c) = w.sin_cos();
        vec2(
            -c * self.r - 2.0 * s * self.r1 + c * self.r2,
            -s * self.r + 2.0 * c * self.r1 + s * self.r2,
        )
    }
}

struct Cassini {
    ra: f64,
    rb: f64,
}

impl Cassini {
    // r^2 = ra^2 cos 2w + sqrt(rb^4 - ra^4 sin^2 2w)
    fn radial(&self, w: f64) -> Radial {
        let a2 = self.ra * self.ra;
        let a4 = a2 * a2;
        let b4 = self.rb.powi(4);
        let (s, c) = (2.0 * w).sin_cos();
        let d = b4 - a4 * s * s;
        let d1 = -4.0 * a4 * s * c;
        let d2 = -8.0 * a4 * (4.0 * w).cos();
        let root = d.sqrt();
        let root1 = d1 / (2.0 * root);
        let root2 = d2 / (2.0 * root) - d1 * d1 / (4.0 * root * root * root);
        let u = a2 * c + root;
        let u1 = -2.0 * a2 * s + root1;
        let u2 = -4.0 * a2 * c + root2;
        Radial::from_square(u, u1, u2)
    }
}

impl PathFunction for Cassini {
    fn dim(&self) -> usize {
        2
    }
    fn eval(&self, w: f64) -> DVector<f64> {
        self.radial(w).point(w)
    }
    fn d1(&self, w: f64) -> DVector<f64> {
        self.radial(w).tangent(w)
    }
    fn d2(&self, w: f64) -> DVector<f64> {
        self.radial(w).curvature(w)
    }
}

/// `n(w) / d(w)` with derivatives, from the derivatives of `n` and `d`.
fn quotient(n: [f64; 3], d: [f64; 3]) -> [f64; 3] {
    let q = n[0] / d[0];
    let q1 = (n[1] - q * d[1]) / d[0];
    let q2 = (n[2] - 2.0 * q1 * d[1] - q * d[2]) / d[0];
    [q, q1, q2]
}

struct Lemniscate;

impl Lemniscate {
    fn components(w: f64) -> ([f64; 3], [f64; 3]) {
        let (s, c) = w.sin_cos();
        let (s2, c2) = (2.0 * w).sin_cos();
        let den = [1.0 + s * s, s2, 2.0 * c2];
        let x = quotient([c, -s, -c], den);
        let y = quotient([0.5 * s2, c2, -2.0 * s2], den);
        (x, y)
    }
}

impl PathFunction for Lemniscate {
    fn dim(&self) -> usize {
        2
    }
    fn eval(&self, w: f64) -> DVector<f64> {
        let (x, y) = Self::components(w);
        vec2(x[0], y[0])
    }
    fn d1(&self, w: f64) -> DVector<f64> {
        let (x, y) = Self::components(w);
        vec2(x[1], y[1])
    }
    fn d2(&self, w: f64) -> DVector<f64> {
        let (x, y) = Self::components(w);
        vec2(x[2], y[2])
    }
}

struct CylinderIntersection {
    r1: f64,
    r2: f64,
    xc: f64,
    yc: f64,
    zc: f64,
}

impl CylinderIntersection {
    // y - yc = 2 sin w * g(w),  g = sqrt(r1 (r2 - r1 sin^2 w))
    fn y_parts(&self, w: f64) -> [f64; 3] {
        let (s, c) = w.sin_cos();
        let (s2, c2) = (2.0 * w).sin_cos();
        let h = self.r1 * (self.r2 - self.r1 * s * s);
        let h1 = -self.r1 * self.r1 * s2;
        let h2 = -2.0 * self.r1 * self.r1 * c2;
        let g = h.sqrt();
        let g1 = h1 / (2.0 * g);
        let g2 = h2 / (2.0 * g) - h1 * h1 / (4.0 * g * g * g);
        [
            2.0 * s * g,
            2.0 * (c * g + s * g1),
            2.0 * (-s * g + 2.0 * c * g1 + s * g2),
        ]
    }
}

impl PathFunction for CylinderIntersection {
    fn dim(&self) -> usize {
        3
    }
    fn eval(&self, w: f64) -> DVector<f64> {
        let (s2, c2) = (2.0 * w).sin_cos();
        vec3(
            self.xc + self.r1 * s2,
            self.yc + self.y_parts(w)[0],
            self.zc + self.r1 * c2,
        )
    }
    fn d1(&self, w: f64) -> DVector<f64> {
        let (s2, c2) = (2.0 * w).sin_cos();
        vec3(2.0 * self.r1 * c2, self.y_parts(w)[1], -2.0 * self.r1 * s2)
    }
    fn d2(&self, w: f64) -> DVector<f64> {
        let (s2, c2) = (2.0 * w).sin_cos();
        vec3(-4.0 * self.r1 * s2, self.y_parts(w)[2], -4.0 * self.r1 * c2)
    }
}

struct TorusKnot {
    major: f64,
    minor: f64,
    center: [f64; 3],
}

impl TorusKnot {
    // rho = major + minor cos 3w, angle 2w, height minor sin 3w
    fn parts(&self, w: f64) -> ([f64; 3], [f64; 3], [f64; 3], [f64; 3]) {
        let (s3, c3) = (3.0 * w).sin_cos();
        let (s2, c2) = (2.0 * w).sin_cos();
        let rho = [
            self.major + self.minor * c3,
            -3.0 * self.minor * s3,
            -9.0 * self.minor * c3,
        ];
        let cos2 = [c2, -2.0 * s2, -4.0 * c2];
        let sin2 = [s2, 2.0 * c2, -4.0 * s2];
        let z = [
            self.minor * s3,
            3.0 * self.minor * c3,
            -9.0 * self.minor * s3,
        ];
        (rho, cos2, sin2, z)
    }
}

fn product(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[0] * b[0],
        a[1] * b[0] + a[0] * b[1],
        a[2] * b[0] + 2.0 * a[1] * b[1] + a[0] * b[2],
    ]
}

impl PathFunction for TorusKnot {
    fn dim(&self) -> usize {
        3
    }
    fn eval(&self, w: f64) -> DVector<f64> {
        let (rho, cos2, sin2, z) = self.parts(w);
        vec3(
            self.center[0] + rho[0] * cos2[0],
            self.center[1] + rho[0] * sin2[0],
            self.center[2] + z[0],
        )
    }
    fn d1(&self, w: f64) -> DVector<f64> {
        let (rho, cos2, sin2, z) = self.parts(w);
        vec3(product(rho, cos2)[1], product(rho, sin2)[1], z[1])
    }
    fn d2(&self, w: f64) -> DVector<f64> {
        let (rho, cos2, sin2, z) = self.parts(w);
        vec3(product(rho, cos2)[2], product(rho, sin2)[2], z[2])
    }
}

// ---------------------------------------------------------------------------
// Implicit forms

/// The `(m-1)` implicit functions `psi_i(q) = 0` whose intersection is a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplicitSurfaces {
    spec: PathSpec,
}

impl ImplicitSurfaces {
    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn count(&self) -> usize {
        self.spec.dim() - 1
    }

    pub fn psi(&self, q: &DVector<f64>) -> DVector<f64> {
        let (x, y) = (q[0], q[1]);
        match self.spec {
            PathSpec::Sinusoid => DVector::from_element(1, y - x.sin()),
            PathSpec::Cassini { ra, rb } => {
                let a2 = ra * ra;
                let s = x * x + y * y + a2;
                DVector::from_element(1, s * s - 4.0 * a2 * x * x - rb.powi(4))
            }
            PathSpec::Lemniscate => {
                let s = x * x + y * y;
                DVector::from_element(1, s * s - x * x + y * y)
            }
            PathSpec::CylinderIntersection { r1, r2, xc, yc, zc } => {
                let z = q[2];
                vec2(
                    (x - xc).powi(2) + (z - zc).powi(2) - r1 * r1,
                    (y - yc).powi(2) + z * z - r2 * r2,
                )
            }
            PathSpec::TorusKnot { .. } => unreachable!("torus knot has no implicit form"),
        }
    }

    /// Jacobian `d psi / d q`, one row per surface.
    pub fn gradient(&self, q: &DVector<f64>) -> DMatrix<f64> {
        let (x, y) = (q[0], q[1]);
        match self.spec {
            PathSpec::Sinusoid => DMatrix::from_row_slice(1, 2, &[-x.cos(), 1.0]),
            PathSpec::Cassini { ra, .. } => {
                let a2 = ra * ra;
                let s = x * x + y * y + a2;
                DMatrix::from_row_slice(1, 2, &[4.0 * s * x - 8.0 * a2 * x, 4.0 * s * y])
            }
            PathSpec::Lemniscate => {
                let s = x * x + y * y;
                DMatrix::from_row_slice(1, 2, &[4.0 * s * x - 2.0 * x, 4.0 * s * y + 2.0 * y])
            }
            PathSpec::CylinderIntersection { xc, yc, zc, .. } => {
                let z = q[2];
                DMatrix::from_row_slice(
                    2,
                    3,
                    &[
                        2.0 * (x - xc),
                        0.0,
                        2.0 * (z - zc),
                        0.0,
                        2.0 * (y - yc),
                        2.0 * z,
                    ],
                )
            }
            PathSpec::TorusKnot { .. } => unreachable!("torus knot has no implicit form"),
        }
    }

    /// Hessian of each `psi_i`.
    pub fn hessians(&self, q: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let (x, y) = (q[0], q[1]);
        match self.spec {
            PathSpec::Sinusoid => {
                alloc::vec![DMatrix::from_row_slice(2, 2, &[x.sin(), 0.0, 0.0, 0.0])]
            }
            PathSpec::Cassini { ra, .. } => {
                let a2 = ra * ra;
                let s = x * x + y * y + a2;
                alloc::vec![DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        4.0 * s + 8.0 * x * x - 8.0 * a2,
                        8.0 * x * y,
                        8.0 * x * y,
                        4.0 * s + 8.0 * y * y,
                    ],
                )]
            }
            PathSpec::Lemniscate => {
                let s = x * x + y * y;
                alloc::vec![DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        4.0 * s + 8.0 * x * x - 2.0,
                        8.0 * x * y,
                        8.0 * x * y,
                        4.0 * s + 8.0 * y * y + 2.0,
                    ],
                )]
            }
            PathSpec::CylinderIntersection { .. } => alloc::vec![
                DMatrix::from_diagonal(&vec3(2.0, 0.0, 2.0)),
                DMatrix::from_diagonal(&vec3(0.0, 2.0, 2.0)),
            ],
            PathSpec::TorusKnot { .. } => unreachable!("torus knot has no implicit form"),
        }
    }
}

// ---------------------------------------------------------------------------
// Distance oracle

/// Distance from `point` to the path, searching the path's default window.
pub fn dist_to_path(path: &ParametricPath, point: &DVector<f64>, resolution: usize) -> Result<f64> {
    Ok(nearest_on_path(path, point, path.window(), resolution)?.0)
}

/// Distance and minimizing parameter over an explicit window.
///
/// Dense scan with `resolution` samples, then golden-section refinement on
/// the bracket around the best sample.
pub fn nearest_on_path(
    path: &ParametricPath,
    point: &DVector<f64>,
    window: (f64, f64),
    resolution: usize,
) -> Result<(f64, f64)> {
    check_dim("point", path.dim(), point.len())?;
    let objective = |w: f64| (point - path.eval(w)).norm_squared();
    let (d2, w) = scan_and_refine(objective, window, resolution)?;
    Ok((d2.sqrt(), w))
}

/// Distance from `xi = (zeta, w)` to the lifted path `{(f(v), v)}`.
///
/// The minimizer satisfies `|v - w| <= ||phi(xi)||`, so the search window
/// is exactly that interval.
pub fn dist_to_lifted_path(
    path: &ParametricPath,
    xi: &DVector<f64>,
    resolution: usize,
) -> Result<f64> {
    let m = path.dim();
    let err = phi(path, xi)?;
    let radius = err.norm();
    if radius == 0.0 {
        return Ok(0.0);
    }
    let w = xi[m];
    let zeta = xi.rows(0, m).into_owned();
    let objective = |v: f64| (&zeta - path.eval(v)).norm_squared() + (w - v) * (w - v);
    let radius = radius * (1.0 + 1e-12) + 1e-15;
    let (d2, _) = scan_and_refine(objective, (w - radius, w + radius), resolution)?;
    Ok(d2.sqrt().min(err.norm()))
}

fn scan_and_refine(
    objective: impl Fn(f64) -> f64,
    (lo, hi): (f64, f64),
    resolution: usize,
) -> Result<(f64, f64)> {
    if !(lo < hi) {
        return Err(Error::EmptyWindow(lo, hi));
    }
    let samples = resolution.max(2);
    let step = (hi - lo) / (samples - 1) as f64;
    let values: Vec<f64> = (0..samples)
        .map(|i| objective(lo + step * i as f64))
        .collect();
    let mut best = (f64::INFINITY, lo);
    for (i, &v) in values.iter().enumerate() {
        if v < best.0 {
            best = (v, lo + step * i as f64);
        }
    }
    // polish every sampled local minimum; near-ties between basins are
    // common on closed curves
    for i in 0..samples {
        let left = if i == 0 { f64::INFINITY } else { values[i - 1] };
        let right = values.get(i + 1).copied().unwrap_or(f64::INFINITY);
        if values[i] > left || values[i] > right {
            continue;
        }
        let a = lo + step * i.saturating_sub(1) as f64;
        let b = lo + step * (i + 1).min(samples - 1) as f64;
        let (v, w) = golden_section(&objective, a, b);
        if v < best.0 {
            best = (v, w);
        }
    }
    Ok(best)
}

fn golden_section(objective: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = objective(c);
    let mut fd = objective(d);
    while b - a > REFINE_WIDTH {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    let w = 0.5 * (a + b);
    (objective(w), w)
}
