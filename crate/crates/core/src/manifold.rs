//! Concrete Riemannian manifolds.
//!
//! Each [`Manifold`] fixes a point representation, an intrinsic distance,
//! exponential and logarithm maps, the unique-minimal-geodesic predicate that
//! decides word validity, and a constant-speed evaluator for the minimal
//! geodesic between two points. Closed-form formulas are used everywhere
//! except on chart manifolds, which go through [`crate::geodesic_solver`].

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::geodesic_solver::{self, ShootingConfig, Trajectory};
use crate::metric::MetricTensor;

/// Default point-coincidence threshold on intrinsic distance.
pub const DEFAULT_EPS_EQ: f64 = 1e-9;

/// Relative tolerance for points that must lie on a sphere.
const SPHERE_REPR_TOL: f64 = 1e-12;

/// Subintervals of the Simpson rule used for chart length estimates.
const LINE_ESTIMATE_PANELS: usize = 32;

/// A point in the manifold's coordinate representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl From<&[f64]> for Point {
    fn from(v: &[f64]) -> Self {
        Point(v.to_vec())
    }
}

/// A chart manifold: an open coordinate domain with a metric tensor callback.
#[derive(Clone)]
pub struct Chart {
    pub metric: Arc<dyn MetricTensor>,
    /// Declared radius below which minimal geodesics are trusted to be unique.
    pub rho_u: f64,
    pub solver: ShootingConfig,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("metric", &self.metric.name())
            .field("dim", &self.metric.dim())
            .field("rho_u", &self.rho_u)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum ManifoldKind {
    Euclidean {
        dim: usize,
    },
    /// The round sphere of the given radius, embedded in `R^{dim+1}`.
    Sphere {
        dim: usize,
        radius: f64,
    },
    /// `R^dim / Z^dim` with coordinates in `[0, 1)`.
    FlatTorus {
        dim: usize,
    },
    /// The Poincare disk model of the hyperbolic plane.
    HyperbolicDisk,
    /// The unit sphere in `R^3` modulo the antipodal map.
    ProjectivePlane,
    Chart(Chart),
}

#[derive(Debug, Clone)]
pub struct Manifold {
    kind: ManifoldKind,
    eps_eq: f64,
}

impl PartialEq for Manifold {
    fn eq(&self, other: &Self) -> bool {
        use ManifoldKind::*;
        let same_kind = match (&self.kind, &other.kind) {
            (Euclidean { dim: a }, Euclidean { dim: b }) => a == b,
            (Sphere { dim: a, radius: r }, Sphere { dim: b, radius: s }) => a == b && r == s,
            (FlatTorus { dim: a }, FlatTorus { dim: b }) => a == b,
            (HyperbolicDisk, HyperbolicDisk) | (ProjectivePlane, ProjectivePlane) => true,
            (Chart(a), Chart(b)) => {
                (Arc::ptr_eq(&a.metric, &b.metric)
                    || (a.metric.name() == b.metric.name() && a.metric.dim() == b.metric.dim()))
                    && a.rho_u == b.rho_u
            }
            _ => false,
        };
        same_kind && self.eps_eq == other.eps_eq
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// Angle between two unit vectors, accurate near both 0 and pi.
fn unit_angle(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x + y) * (x + y)).sum::<f64>().sqrt();
    2.0 * d.atan2(s)
}

/// Wrap a torus coordinate into `[0, 1)`.
pub(crate) fn wrap_unit(x: f64) -> f64 {
    let w = x - x.floor();
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Minimal lift displacement of a torus coordinate difference, in `[-1/2, 1/2]`.
pub(crate) fn torus_displacement(from: f64, to: f64) -> f64 {
    let d = to - from;
    d - d.round()
}

/// Flip `v` so that its first nonzero coordinate is positive.
fn sign_normalize(mut v: Vec<f64>) -> Vec<f64> {
    if let Some(first) = v.iter().copied().find(|c| *c != 0.0) {
        if first < 0.0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }
    }
    v
}

// Complex helpers for the Poincare disk, `[re, im]`.
fn c_mul(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]]
}

fn c_div(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let d = b[0] * b[0] + b[1] * b[1];
    [(a[0] * b[0] + a[1] * b[1]) / d, (a[1] * b[0] - a[0] * b[1]) / d]
}

fn c_conj(a: [f64; 2]) -> [f64; 2] {
    [a[0], -a[1]]
}

/// Disk isometry `z -> (z - a) / (1 - conj(a) z)` sending `a` to the origin.
fn mobius_to_origin(a: [f64; 2], z: [f64; 2]) -> [f64; 2] {
    let num = [z[0] - a[0], z[1] - a[1]];
    let az = c_mul(c_conj(a), z);
    c_div(num, [1.0 - az[0], -az[1]])
}

/// Inverse isometry `w -> (w + a) / (1 + conj(a) w)` sending the origin to `a`.
fn mobius_from_origin(a: [f64; 2], w: [f64; 2]) -> [f64; 2] {
    let num = [w[0] + a[0], w[1] + a[1]];
    let aw = c_mul(c_conj(a), w);
    c_div(num, [1.0 + aw[0], aw[1]])
}

fn as_c(p: &[f64]) -> [f64; 2] {
    [p[0], p[1]]
}

impl Manifold {
    fn with_kind(kind: ManifoldKind) -> Self {
        Manifold {
            kind,
            eps_eq: DEFAULT_EPS_EQ,
        }
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(GeoError::Representation("dimension must be at least 1".into()));
        }
        Ok(Self::with_kind(ManifoldKind::Euclidean { dim }))
    }

    pub fn sphere(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(GeoError::Representation("dimension must be at least 1".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeoError::Representation(format!(
                "sphere radius {radius} must be positive"
            )));
        }
        Ok(Self::with_kind(ManifoldKind::Sphere { dim, radius }))
    }

    pub fn flat_torus(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(GeoError::Representation("dimension must be at least 1".into()));
        }
        Ok(Self::with_kind(ManifoldKind::FlatTorus { dim }))
    }

    pub fn hyperbolic_disk() -> Self {
        Self::with_kind(ManifoldKind::HyperbolicDisk)
    }

    pub fn projective_plane() -> Self {
        Self::with_kind(ManifoldKind::ProjectivePlane)
    }

    pub fn chart(metric: Arc<dyn MetricTensor>, rho_u: f64) -> Result<Self> {
        if metric.dim() == 0 {
            return Err(GeoError::Representation("dimension must be at least 1".into()));
        }
        if !(rho_u > 0.0) {
            return Err(GeoError::Representation(format!(
                "uniqueness radius {rho_u} must be positive"
            )));
        }
        Ok(Self::with_kind(ManifoldKind::Chart(Chart {
            metric,
            rho_u,
            solver: ShootingConfig::default(),
        })))
    }

    /// Replace the point-coincidence threshold.
    pub fn with_eps_eq(mut self, eps_eq: f64) -> Result<Self> {
        if !(eps_eq >= 0.0) {
            return Err(GeoError::Representation(format!("eps_eq {eps_eq} must be nonnegative")));
        }
        self.eps_eq = eps_eq;
        Ok(self)
    }

    /// Replace the shooting configuration of a chart manifold.
    pub fn with_solver(mut self, cfg: ShootingConfig) -> Result<Self> {
        cfg.validate()?;
        if let ManifoldKind::Chart(c) = &mut self.kind {
            c.solver = cfg;
        }
        Ok(self)
    }

    pub fn kind(&self) -> &ManifoldKind {
        &self.kind
    }

    pub fn eps_eq(&self) -> f64 {
        self.eps_eq
    }

    /// Short name of the manifold family, matching the JSON `kind` tag.
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ManifoldKind::Euclidean { .. } => "euclidean",
            ManifoldKind::Sphere { .. } => "sphere",
            ManifoldKind::FlatTorus { .. } => "flat_torus",
            ManifoldKind::HyperbolicDisk => "hyperbolic_disk",
            ManifoldKind::ProjectivePlane => "projective_plane",
            ManifoldKind::Chart(_) => "chart",
        }
    }

    /// Intrinsic dimension.
    pub fn dim(&self) -> usize {
        match &self.kind {
            ManifoldKind::Euclidean { dim } | ManifoldKind::Sphere { dim, .. } | ManifoldKind::FlatTorus { dim } => {
                *dim
            }
            ManifoldKind::HyperbolicDisk | ManifoldKind::ProjectivePlane => 2,
            ManifoldKind::Chart(c) => c.metric.dim(),
        }
    }

    /// Number of coordinates in a point representation.
    pub fn coord_len(&self) -> usize {
        match &self.kind {
            ManifoldKind::Sphere { dim, .. } => dim + 1,
            ManifoldKind::ProjectivePlane => 3,
            _ => self.dim(),
        }
    }

    pub fn chart_metric(&self) -> Option<&dyn MetricTensor> {
        match &self.kind {
            ManifoldKind::Chart(c) => Some(c.metric.as_ref()),
            _ => None,
        }
    }

    /// Distance below which any two points have a unique minimal geodesic.
    ///
    /// Infinite on Euclidean space and the hyperbolic plane. On the torus this
    /// is the injectivity radius 1/2; the predicate itself works per coordinate.
    pub fn uniqueness_scale(&self) -> f64 {
        match &self.kind {
            ManifoldKind::Euclidean { .. } | ManifoldKind::HyperbolicDisk => f64::INFINITY,
            ManifoldKind::Sphere { radius, .. } => PI * radius,
            ManifoldKind::FlatTorus { .. } => 0.5,
            ManifoldKind::ProjectivePlane => PI / 2.0,
            ManifoldKind::Chart(c) => c.rho_u,
        }
    }

    /// Default neighborhood radius for local trivializations.
    pub fn chart_radius(&self) -> f64 {
        match &self.kind {
            ManifoldKind::Euclidean { .. } | ManifoldKind::HyperbolicDisk => f64::INFINITY,
            ManifoldKind::Sphere { radius, .. } => PI * radius / 2.0,
            ManifoldKind::FlatTorus { .. } => 0.25,
            ManifoldKind::ProjectivePlane => PI / 4.0,
            ManifoldKind::Chart(c) => c.rho_u,
        }
    }

    /// A canonical basepoint: the origin, the north pole `(1, 0, ...)`, or the chart-specific center.
    pub fn default_basepoint(&self) -> Point {
        match &self.kind {
            ManifoldKind::Sphere { dim, radius } => {
                let mut v = vec![0.0; dim + 1];
                v[0] = *radius;
                Point(v)
            }
            ManifoldKind::ProjectivePlane => Point(vec![1.0, 0.0, 0.0]),
            ManifoldKind::Chart(c) if c.metric.name() == "polar_sphere" => Point(vec![PI / 2.0, 0.0]),
            _ => Point(vec![0.0; self.coord_len()]),
        }
    }

    /// Check that `p` is a valid point representation.
    pub fn check_point(&self, p: &Point) -> Result<()> {
        let c = p.coords();
        if c.len() != self.coord_len() {
            return Err(GeoError::Representation(format!(
                "expected {} coordinates, found {}",
                self.coord_len(),
                c.len()
            )));
        }
        if c.iter().any(|x| !x.is_finite()) {
            return Err(GeoError::Representation(format!("non-finite coordinates {c:?}")));
        }
        match &self.kind {
            ManifoldKind::Euclidean { .. } => Ok(()),
            ManifoldKind::Sphere { radius, .. } => {
                if (norm(c) - radius).abs() > SPHERE_REPR_TOL * radius {
                    return Err(GeoError::Representation(format!(
                        "{c:?} is not on the sphere of radius {radius}"
                    )));
                }
                Ok(())
            }
            ManifoldKind::FlatTorus { .. } => {
                if c.iter().any(|x| !(0.0..1.0).contains(x)) {
                    return Err(GeoError::Representation(format!(
                        "torus coordinates {c:?} must lie in [0, 1)"
                    )));
                }
                Ok(())
            }
            ManifoldKind::HyperbolicDisk => {
                if dot(c, c) >= 1.0 {
                    return Err(GeoError::Representation(format!(
                        "{c:?} lies outside the open unit disk"
                    )));
                }
                Ok(())
            }
            ManifoldKind::ProjectivePlane => {
                if (norm(c) - 1.0).abs() > SPHERE_REPR_TOL {
                    return Err(GeoError::Representation(format!("{c:?} is not a unit vector")));
                }
                if c.iter().copied().find(|x| *x != 0.0).is_some_and(|x| x < 0.0) {
                    return Err(GeoError::Representation(format!(
                        "{c:?} is not sign-normalized (first nonzero coordinate must be positive)"
                    )));
                }
                Ok(())
            }
            ManifoldKind::Chart(chart) => {
                if !chart.metric.in_domain(c) {
                    return Err(GeoError::Representation(format!("{c:?} lies outside the chart domain")));
                }
                Ok(())
            }
        }
    }

    /// Build a checked point from coordinates.
    pub fn point(&self, coords: Vec<f64>) -> Result<Point> {
        let p = Point(coords);
        self.check_point(&p)?;
        Ok(p)
    }

    /// Map approximate coordinates onto a valid representative: rescale onto
    /// spheres, wrap torus coordinates, sign-normalize projective representatives.
    pub fn normalize(&self, coords: Vec<f64>) -> Result<Point> {
        let p = match &self.kind {
            ManifoldKind::Sphere { radius, .. } => {
                let n = norm(&coords);
                if !(n > 0.0) {
                    return Err(GeoError::Representation("zero vector has no sphere projection".into()));
                }
                Point(scale(&coords, radius / n))
            }
            ManifoldKind::FlatTorus { .. } => Point(coords.into_iter().map(wrap_unit).collect()),
            ManifoldKind::ProjectivePlane => {
                let n = norm(&coords);
                if !(n > 0.0) {
                    return Err(GeoError::Representation("zero vector has no projective class".into()));
                }
                Point(sign_normalize(scale(&coords, 1.0 / n)))
            }
            _ => Point(coords),
        };
        self.check_point(&p)?;
        Ok(p)
    }

    /// Intrinsic distance between two points.
    ///
    /// On chart manifolds this solves the boundary value problem, so it can fail
    /// with a convergence error.
    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        self.check_point(a)?;
        self.check_point(b)?;
        match &self.kind {
            ManifoldKind::Chart(chart) => {
                let est = self.line_estimate(chart, a, b)?;
                if est <= self.eps_eq {
                    return Ok(est);
                }
                Ok(geodesic_solver::solve_bvp(self, a, b, &chart.solver)?.length())
            }
            _ => Ok(self.closed_form_distance(a.coords(), b.coords())),
        }
    }

    fn closed_form_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match &self.kind {
            ManifoldKind::Euclidean { .. } => norm(&sub(b, a)),
            ManifoldKind::Sphere { radius, .. } => {
                radius * unit_angle(&scale(a, 1.0 / radius), &scale(b, 1.0 / radius))
            }
            ManifoldKind::FlatTorus { .. } => a
                .iter()
                .zip(b)
                .map(|(x, y)| torus_displacement(*x, *y).powi(2))
                .sum::<f64>()
                .sqrt(),
            ManifoldKind::HyperbolicDisk => {
                let d2: f64 = sub(a, b).iter().map(|x| x * x).sum();
                let denom = ((1.0 - dot(a, a)) * (1.0 - dot(b, b))).sqrt();
                2.0 * (d2.sqrt() / denom).asinh()
            }
            ManifoldKind::ProjectivePlane => {
                let t = unit_angle(a, b);
                t.min(PI - t)
            }
            ManifoldKind::Chart(_) => unreachable!("chart distances are numerical"),
        }
    }

    /// Metric length of the straight coordinate segment from `a` to `b`.
    ///
    /// An upper bound on the chart distance. Used for coincidence tests and the
    /// conservative uniqueness predicate.
    fn line_estimate(&self, chart: &Chart, a: &Point, b: &Point) -> Result<f64> {
        let (a, b) = (a.coords(), b.coords());
        let d = sub(b, a);
        if norm(&d) == 0.0 {
            return Ok(0.0);
        }
        let n = LINE_ESTIMATE_PANELS;
        let h = 1.0 / n as f64;
        let speed = |s: f64| -> Result<f64> {
            let x: Vec<f64> = a.iter().zip(&d).map(|(p, q)| p + s * q).collect();
            geodesic_solver::metric_norm(chart.metric.as_ref(), &x, &d)
        };
        let mut total = speed(0.0)? + speed(1.0)?;
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            total += w * speed(i as f64 * h)?;
        }
        Ok(total * h / 3.0)
    }

    /// Exact distance on closed-form manifolds, straight-segment length on charts.
    pub fn distance_estimate(&self, a: &Point, b: &Point) -> Result<f64> {
        self.check_point(a)?;
        self.check_point(b)?;
        match &self.kind {
            ManifoldKind::Chart(chart) => self.line_estimate(chart, a, b),
            _ => Ok(self.closed_form_distance(a.coords(), b.coords())),
        }
    }

    /// Whether two points coincide within `eps_eq`.
    ///
    /// Points are assumed valid. On charts a failed metric evaluation falls back
    /// to the coordinate distance.
    pub fn points_equal(&self, a: &Point, b: &Point) -> bool {
        if a.coords() == b.coords() {
            return true;
        }
        if a.len() != b.len() {
            return false;
        }
        let d = match &self.kind {
            ManifoldKind::Chart(chart) => self
                .line_estimate(chart, a, b)
                .unwrap_or_else(|_| norm(&sub(a.coords(), b.coords()))),
            _ => self.closed_form_distance(a.coords(), b.coords()),
        };
        d <= self.eps_eq
    }

    /// Whether exactly one minimal geodesic joins `a` and `b`.
    ///
    /// Equal points count as joined by the constant geodesic.
    pub fn unique_minimal(&self, a: &Point, b: &Point) -> Result<bool> {
        self.check_point(a)?;
        self.check_point(b)?;
        let eps = self.eps_eq;
        Ok(match &self.kind {
            ManifoldKind::Euclidean { .. } | ManifoldKind::HyperbolicDisk => true,
            ManifoldKind::Sphere { radius, .. } => {
                self.closed_form_distance(a.coords(), b.coords()) < PI * radius - eps
            }
            ManifoldKind::FlatTorus { .. } => a
                .coords()
                .iter()
                .zip(b.coords())
                .all(|(x, y)| (torus_displacement(*x, *y).abs() - 0.5).abs() > eps),
            ManifoldKind::ProjectivePlane => self.closed_form_distance(a.coords(), b.coords()) < PI / 2.0 - eps,
            ManifoldKind::Chart(chart) => self.line_estimate(chart, a, b)? < chart.rho_u,
        })
    }

    fn require_unique(&self, a: &Point, b: &Point) -> Result<()> {
        if !self.unique_minimal(a, b)? {
            return Err(GeoError::Uniqueness(format!(
                "{:?} and {:?} on {}",
                a.coords(),
                b.coords(),
                self.kind_name()
            )));
        }
        Ok(())
    }

    /// The unique minimal geodesic from `a` to `b`, parameterized on `[0, 1]` at constant speed.
    pub fn geodesic(&self, a: &Point, b: &Point) -> Result<GeodesicPath> {
        self.require_unique(a, b)?;
        if self.points_equal(a, b) {
            return Ok(GeodesicPath {
                start: a.clone(),
                end: b.clone(),
                length: 0.0,
                curve: Curve::Constant,
            });
        }
        let (ac, bc) = (a.coords(), b.coords());
        let curve = match &self.kind {
            ManifoldKind::Euclidean { .. } => Curve::Straight { delta: sub(bc, ac) },
            ManifoldKind::FlatTorus { .. } => Curve::TorusLine {
                delta: ac.iter().zip(bc).map(|(x, y)| torus_displacement(*x, *y)).collect(),
            },
            ManifoldKind::Sphere { radius, .. } => {
                let (tangent, angle) = sphere_log_unit(&scale(ac, 1.0 / radius), &scale(bc, 1.0 / radius));
                Curve::GreatCircle {
                    radius: *radius,
                    origin: ac.to_vec(),
                    tangent,
                    angle,
                    projective: false,
                }
            }
            ManifoldKind::ProjectivePlane => {
                let b_lift = if dot(ac, bc) >= 0.0 {
                    bc.to_vec()
                } else {
                    scale(bc, -1.0)
                };
                let (tangent, angle) = sphere_log_unit(ac, &b_lift);
                Curve::GreatCircle {
                    radius: 1.0,
                    origin: ac.to_vec(),
                    tangent,
                    angle,
                    projective: true,
                }
            }
            ManifoldKind::HyperbolicDisk => Curve::Hyperbolic {
                velocity: hyperbolic_log(as_c(ac), as_c(bc)),
            },
            ManifoldKind::Chart(chart) => {
                return geodesic_solver::solve_bvp(self, a, b, &chart.solver);
            }
        };
        let length = self.closed_form_distance(ac, bc);
        Ok(GeodesicPath {
            start: a.clone(),
            end: b.clone(),
            length,
            curve,
        })
    }

    /// Initial velocity of the minimal geodesic from `a` to `b`.
    ///
    /// Frames: ambient embedding vectors for spheres and the projective plane,
    /// coordinate vectors for Euclidean space, the torus and charts, and the
    /// orthonormal frame aligned with the disk coordinates on the hyperbolic
    /// plane (so the Euclidean norm of the result is the distance there).
    pub fn log_map(&self, a: &Point, b: &Point) -> Result<Vec<f64>> {
        self.require_unique(a, b)?;
        let (ac, bc) = (a.coords(), b.coords());
        Ok(match &self.kind {
            ManifoldKind::Euclidean { .. } => sub(bc, ac),
            ManifoldKind::FlatTorus { .. } => ac.iter().zip(bc).map(|(x, y)| torus_displacement(*x, *y)).collect(),
            ManifoldKind::Sphere { radius, .. } => {
                let (u, angle) = sphere_log_unit(&scale(ac, 1.0 / radius), &scale(bc, 1.0 / radius));
                scale(&u, angle * radius)
            }
            ManifoldKind::ProjectivePlane => {
                let b_lift = if dot(ac, bc) >= 0.0 {
                    bc.to_vec()
                } else {
                    scale(bc, -1.0)
                };
                let (u, angle) = sphere_log_unit(ac, &b_lift);
                scale(&u, angle)
            }
            ManifoldKind::HyperbolicDisk => hyperbolic_log(as_c(ac), as_c(bc)).to_vec(),
            ManifoldKind::Chart(chart) => {
                if self.points_equal(a, b) {
                    return Ok(vec![0.0; ac.len()]);
                }
                geodesic_solver::solve_bvp(self, a, b, &chart.solver)?
                    .initial_velocity()
                    .to_vec()
            }
        })
    }

    /// Exponential map at `a`, in the frame conventions of [`Manifold::log_map`].
    ///
    /// Ambient vectors on spheres are projected onto the tangent space first.
    pub fn exp_map(&self, a: &Point, v: &[f64]) -> Result<Point> {
        self.check_point(a)?;
        let ac = a.coords();
        let expected = match &self.kind {
            ManifoldKind::HyperbolicDisk => 2,
            _ => self.coord_len(),
        };
        if v.len() != expected {
            return Err(GeoError::Representation(format!(
                "tangent vector has {} components, expected {expected}",
                v.len()
            )));
        }
        match &self.kind {
            ManifoldKind::Euclidean { .. } => Ok(Point(ac.iter().zip(v).map(|(x, y)| x + y).collect())),
            ManifoldKind::FlatTorus { .. } => Ok(Point(ac.iter().zip(v).map(|(x, y)| wrap_unit(x + y)).collect())),
            ManifoldKind::Sphere { radius, .. } => {
                let unit = scale(ac, 1.0 / radius);
                Ok(Point(scale(&sphere_exp_unit(&unit, &scale(v, 1.0 / radius)), *radius)))
            }
            ManifoldKind::ProjectivePlane => Ok(Point(sign_normalize(sphere_exp_unit(ac, v)))),
            ManifoldKind::HyperbolicDisk => {
                let p = hyperbolic_exp(as_c(ac), [v[0], v[1]]);
                let p = Point(p.to_vec());
                self.check_point(&p)
                    .map_err(|_| GeoError::Domain(format!("exp_map overflowed the disk at {:?}", p.coords())))?;
                Ok(p)
            }
            ManifoldKind::Chart(chart) => {
                if v.iter().all(|x| *x == 0.0) {
                    return Ok(a.clone());
                }
                let path = geodesic_solver::integrate_geodesic(self, a, v, &chart.solver)?;
                Ok(path.end().clone())
            }
        }
    }

    /// Riemannian norm of a tangent vector at `a`.
    pub fn tangent_norm(&self, a: &Point, v: &[f64]) -> Result<f64> {
        match &self.kind {
            ManifoldKind::Chart(chart) => geodesic_solver::metric_norm(chart.metric.as_ref(), a.coords(), v),
            _ => Ok(norm(v)),
        }
    }
}

/// Unit tangent at `a` pointing to `b` and the angle between them, both on the unit sphere.
fn sphere_log_unit(a: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let angle = unit_angle(a, b);
    let c = dot(a, b);
    let w: Vec<f64> = b.iter().zip(a).map(|(y, x)| y - c * x).collect();
    let wn = norm(&w);
    if wn == 0.0 || angle == 0.0 {
        return (vec![0.0; a.len()], 0.0);
    }
    (scale(&w, 1.0 / wn), angle)
}

fn sphere_exp_unit(a: &[f64], v: &[f64]) -> Vec<f64> {
    // drop the normal component
    let c = dot(a, v);
    let t: Vec<f64> = v.iter().zip(a).map(|(y, x)| y - c * x).collect();
    let s = norm(&t);
    if s == 0.0 {
        return a.to_vec();
    }
    let p: Vec<f64> = a.iter().zip(&t).map(|(x, y)| x * s.cos() + y / s * s.sin()).collect();
    let n = norm(&p);
    scale(&p, 1.0 / n)
}

fn hyperbolic_log(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let w = mobius_to_origin(a, b);
    let r = (w[0] * w[0] + w[1] * w[1]).sqrt();
    if r == 0.0 {
        return [0.0, 0.0];
    }
    let d = 2.0 * r.atanh();
    [w[0] / r * d, w[1] / r * d]
}

fn hyperbolic_exp(a: [f64; 2], v: [f64; 2]) -> [f64; 2] {
    let s = (v[0] * v[0] + v[1] * v[1]).sqrt();
    if s == 0.0 {
        return a;
    }
    let r = (s / 2.0).tanh();
    mobius_from_origin(a, [v[0] / s * r, v[1] / s * r])
}

#[derive(Debug, Clone)]
enum Curve {
    Constant,
    Straight {
        delta: Vec<f64>,
    },
    TorusLine {
        delta: Vec<f64>,
    },
    GreatCircle {
        radius: f64,
        origin: Vec<f64>,
        tangent: Vec<f64>,
        angle: f64,
        projective: bool,
    },
    Hyperbolic {
        velocity: [f64; 2],
    },
    Sampled {
        initial_velocity: Vec<f64>,
        trajectory: Trajectory,
        /// Endpoint residual of the integration, blended in linearly so the path ends at `end`.
        correction: Vec<f64>,
    },
}

/// A constant-speed geodesic segment `[0, 1] -> M`.
#[derive(Debug, Clone)]
pub struct GeodesicPath {
    start: Point,
    end: Point,
    length: f64,
    curve: Curve,
}

impl GeodesicPath {
    pub(crate) fn from_trajectory(
        start: Point,
        end: Option<Point>,
        length: f64,
        initial_velocity: Vec<f64>,
        trajectory: Trajectory,
    ) -> Self {
        let reached = Point(trajectory.endpoint().to_vec());
        let end = end.unwrap_or_else(|| reached.clone());
        let correction = sub(end.coords(), reached.coords());
        GeodesicPath {
            start,
            end,
            length,
            curve: Curve::Sampled {
                initial_velocity,
                trajectory,
                correction,
            },
        }
    }

    pub fn start(&self) -> &Point {
        &self.start
    }

    pub fn end(&self) -> &Point {
        &self.end
    }

    /// Arc length.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Shooting velocity for numerically solved segments.
    pub fn initial_velocity(&self) -> &[f64] {
        match &self.curve {
            Curve::Sampled { initial_velocity, .. } => initial_velocity,
            _ => &[],
        }
    }

    /// Integrated trajectory for numerically solved segments.
    pub fn trajectory(&self) -> Option<&Trajectory> {
        match &self.curve {
            Curve::Sampled { trajectory, .. } => Some(trajectory),
            _ => None,
        }
    }

    /// The reversed segment, `t -> self.eval(1 - t)`.
    pub fn reversed(&self, m: &Manifold) -> Result<GeodesicPath> {
        m.geodesic(&self.end, &self.start)
    }

    /// Point at parameter `t`, clamped to `[0, 1]`. Endpoints are returned exactly.
    pub fn eval(&self, t: f64) -> Point {
        if t <= 0.0 {
            return self.start.clone();
        }
        if t >= 1.0 {
            return self.end.clone();
        }
        let a = self.start.coords();
        match &self.curve {
            Curve::Constant => self.start.clone(),
            Curve::Straight { delta } => Point(a.iter().zip(delta).map(|(x, d)| x + t * d).collect()),
            Curve::TorusLine { delta } => Point(a.iter().zip(delta).map(|(x, d)| wrap_unit(x + t * d)).collect()),
            Curve::GreatCircle {
                radius,
                origin,
                tangent,
                angle,
                projective,
            } => {
                let phi = t * angle;
                let p: Vec<f64> = origin
                    .iter()
                    .zip(tangent)
                    .map(|(x, u)| x * phi.cos() + radius * u * phi.sin())
                    .collect();
                let p = scale(&p, radius / norm(&p));
                if *projective {
                    Point(sign_normalize(p))
                } else {
                    Point(p)
                }
            }
            Curve::Hyperbolic { velocity } => {
                Point(hyperbolic_exp(as_c(a), [t * velocity[0], t * velocity[1]]).to_vec())
            }
            Curve::Sampled {
                trajectory, correction, ..
            } => {
                let n = trajectory.steps();
                let h = 1.0 / n as f64;
                let i = ((t * n as f64).floor() as usize).min(n - 1);
                let s = (t - i as f64 * h) / h;
                let (p0, p1) = (&trajectory.positions[i], &trajectory.positions[i + 1]);
                let (v0, v1) = (&trajectory.velocities[i], &trajectory.velocities[i + 1]);
                let h00 = 2.0 * s.powi(3) - 3.0 * s * s + 1.0;
                let h10 = s.powi(3) - 2.0 * s * s + s;
                let h01 = -2.0 * s.powi(3) + 3.0 * s * s;
                let h11 = s.powi(3) - s * s;
                Point(
                    (0..p0.len())
                        .map(|k| h00 * p0[k] + h10 * h * v0[k] + h01 * p1[k] + h11 * h * v1[k] + t * correction[k])
                        .collect(),
                )
            }
        }
    }
}
