//! Numerical geodesics on chart manifolds.
//!
//! Geodesics solve `x'' + Gamma(x)(x', x') = 0`. Christoffel symbols are
//! obtained from the metric callback by central differences, the initial
//! value problem is integrated with classical RK4 on `t in [0, 1]`, and the
//! two-point problem is solved by damped Newton shooting on the endpoint
//! residual.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeoError, Result};
use crate::manifold::{GeodesicPath, Manifold, Point};
use crate::metric::MetricTensor;

/// Step for the central differences of the metric tensor.
const METRIC_FD_STEP: f64 = 1e-5;

/// Maximum number of step halvings in a damped Newton update.
const MAX_HALVINGS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingConfig {
    pub rk4_steps: usize,
    pub newton_max_iters: usize,
    /// Endpoint error in chart coordinates accepted by `solve_bvp`.
    pub bvp_tolerance: f64,
    /// Finite-difference step for the shooting Jacobian.
    pub fd_step: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            rk4_steps: 256,
            newton_max_iters: 50,
            bvp_tolerance: 1e-8,
            fd_step: 1e-6,
        }
    }
}

impl ShootingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rk4_steps == 0 || self.newton_max_iters == 0 || !(self.bvp_tolerance > 0.0) || !(self.fd_step > 0.0) {
            return Err(GeoError::Precondition(
                "shooting configuration fields must be strictly positive".into(),
            ));
        }
        Ok(())
    }
}

/// Positions and velocities of a geodesic at `rk4_steps + 1` equally spaced times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn endpoint(&self) -> &[f64] {
        self.positions.last().expect("trajectory has at least one node")
    }

    pub fn steps(&self) -> usize {
        self.positions.len() - 1
    }
}

/// Metric matrix at `x` after checking domain, symmetry and positive definiteness.
pub(crate) fn metric_at(metric: &dyn MetricTensor, x: &[f64]) -> Result<DMatrix<f64>> {
    if !metric.in_domain(x) {
        return Err(GeoError::Domain(format!("{x:?} is outside the chart")));
    }
    let n = metric.dim();
    let g = DMatrix::from_row_slice(n, n, &metric.tensor(x));
    let scale = g.amax().max(1.0);
    for i in 0..n {
        for j in 0..i {
            if (g[(i, j)] - g[(j, i)]).abs() > 1e-12 * scale {
                return Err(GeoError::Geometry(x.to_vec()));
            }
        }
    }
    if g.iter().any(|v| !v.is_finite()) || g.clone().cholesky().is_none() {
        return Err(GeoError::Geometry(x.to_vec()));
    }
    Ok(g)
}

/// Riemannian norm of `v` at `x`.
pub(crate) fn metric_norm(metric: &dyn MetricTensor, x: &[f64], v: &[f64]) -> Result<f64> {
    let g = metric_at(metric, x)?;
    let v = DVector::from_column_slice(v);
    Ok((v.transpose() * &g * &v)[(0, 0)].max(0.0).sqrt())
}

/// Christoffel symbols of the second kind, indexed `[k * n * n + i * n + j]`.
pub(crate) fn christoffel(metric: &dyn MetricTensor, x: &[f64]) -> Result<Vec<f64>> {
    let n = metric.dim();
    let g = metric_at(metric, x)?;
    let g_inv = g.cholesky().ok_or_else(|| GeoError::Geometry(x.to_vec()))?.inverse();

    // dg[m][(i, j)] = d g_ij / d x^m
    let mut dg = Vec::with_capacity(n);
    let mut probe = x.to_vec();
    for m in 0..n {
        probe[m] = x[m] + METRIC_FD_STEP;
        let plus = metric_at(metric, &probe)?;
        probe[m] = x[m] - METRIC_FD_STEP;
        let minus = metric_at(metric, &probe)?;
        probe[m] = x[m];
        dg.push((plus - minus) / (2.0 * METRIC_FD_STEP));
    }

    let mut gamma = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += g_inv[(k, l)] * (dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)]);
                }
                gamma[k * n * n + i * n + j] = 0.5 * s;
                gamma[k * n * n + j * n + i] = 0.5 * s;
            }
        }
    }
    Ok(gamma)
}

fn acceleration(metric: &dyn MetricTensor, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    let gamma = christoffel(metric, x)?;
    let mut acc = vec![0.0; n];
    for (k, a) in acc.iter_mut().enumerate() {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += gamma[k * n * n + i * n + j] * v[i] * v[j];
            }
        }
        *a = -s;
    }
    Ok(acc)
}

fn axpy(y: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    y.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

/// Integrate the geodesic equation from `start` with initial velocity `velocity`.
pub(crate) fn integrate_metric(
    metric: &dyn MetricTensor,
    start: &[f64],
    velocity: &[f64],
    steps: usize,
) -> Result<Trajectory> {
    let n = metric.dim();
    if start.len() != n || velocity.len() != n {
        return Err(GeoError::Representation(format!("expected {n} chart coordinates")));
    }
    metric_at(metric, start)?;
    let h = 1.0 / steps as f64;
    let mut x = start.to_vec();
    let mut v = velocity.to_vec();
    let mut positions = Vec::with_capacity(steps + 1);
    let mut velocities = Vec::with_capacity(steps + 1);
    positions.push(x.clone());
    velocities.push(v.clone());

    for _ in 0..steps {
        let k1x = v.clone();
        let k1v = acceleration(metric, &x, &v)?;

        let x2 = axpy(&x, h / 2.0, &k1x);
        let v2 = axpy(&v, h / 2.0, &k1v);
        let k2v = acceleration(metric, &x2, &v2)?;

        let x3 = axpy(&x, h / 2.0, &v2);
        let v3 = axpy(&v, h / 2.0, &k2v);
        let k3v = acceleration(metric, &x3, &v3)?;

        let x4 = axpy(&x, h, &v3);
        let v4 = axpy(&v, h, &k3v);
        let k4v = acceleration(metric, &x4, &v4)?;

        for i in 0..n {
            x[i] += h / 6.0 * (k1x[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
            v[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        }
        if !metric.in_domain(&x) {
            return Err(GeoError::Domain(format!("geodesic left the chart at {x:?}")));
        }
        positions.push(x.clone());
        velocities.push(v.clone());
    }
    Ok(Trajectory { positions, velocities })
}

fn chart_metric(m: &Manifold) -> Result<&dyn MetricTensor> {
    m.chart_metric()
        .ok_or_else(|| GeoError::Unsupported("the geodesic solver works on chart manifolds only".into()))
}

/// The trajectory `t -> exp(a, t * v0)` for `t in [0, 1]`.
pub fn integrate_geodesic(m: &Manifold, a: &Point, v0: &[f64], cfg: &ShootingConfig) -> Result<GeodesicPath> {
    cfg.validate()?;
    let metric = chart_metric(m)?;
    m.check_point(a)?;
    let traj = integrate_metric(metric, a.coords(), v0, cfg.rk4_steps)?;
    let length = metric_norm(metric, a.coords(), v0)?;
    Ok(GeodesicPath::from_trajectory(
        a.clone(),
        None,
        length,
        v0.to_vec(),
        traj,
    ))
}

/// Raw shooting solve: the initial velocity and trajectory hitting `b`.
pub(crate) fn shoot(
    metric: &dyn MetricTensor,
    a: &[f64],
    b: &[f64],
    cfg: &ShootingConfig,
) -> Result<(Vec<f64>, Trajectory)> {
    cfg.validate()?;
    let n = metric.dim();
    metric_at(metric, b)?;
    let residual_of = |traj: &Trajectory| -> Vec<f64> { traj.endpoint().iter().zip(b).map(|(x, y)| x - y).collect() };
    let norm = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>().sqrt();

    let mut v: Vec<f64> = b.iter().zip(a).map(|(y, x)| y - x).collect();
    let mut traj = integrate_metric(metric, a, &v, cfg.rk4_steps)?;
    let mut r = residual_of(&traj);
    let mut rn = norm(&r);

    for _ in 0..cfg.newton_max_iters {
        if rn < cfg.bvp_tolerance {
            return Ok((v, traj));
        }
        let mut jac = DMatrix::zeros(n, n);
        let mut probe = v.clone();
        for j in 0..n {
            probe[j] = v[j] + cfg.fd_step;
            let plus = integrate_metric(metric, a, &probe, cfg.rk4_steps)?;
            probe[j] = v[j] - cfg.fd_step;
            let minus = integrate_metric(metric, a, &probe, cfg.rk4_steps)?;
            probe[j] = v[j];
            for i in 0..n {
                jac[(i, j)] = (plus.endpoint()[i] - minus.endpoint()[i]) / (2.0 * cfg.fd_step);
            }
        }
        let rhs = -DVector::from_column_slice(&r);
        let step = jac.lu().solve(&rhs).ok_or(GeoError::Convergence {
            iterations: 0,
            residual: rn,
        })?;

        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = v.iter().zip(step.iter()).map(|(x, d)| x + lambda * d).collect();
            if let Ok(t) = integrate_metric(metric, a, &trial, cfg.rk4_steps) {
                let tr = residual_of(&t);
                let trn = norm(&tr);
                if trn < rn {
                    v = trial;
                    traj = t;
                    r = tr;
                    rn = trn;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if rn < cfg.bvp_tolerance {
        return Ok((v, traj));
    }
    Err(GeoError::Convergence {
        iterations: cfg.newton_max_iters,
        residual: rn,
    })
}

/// Solve the two-point boundary value problem from `a` to `b` by shooting.
///
/// The initial guess is the straight coordinate displacement `b - a`. The
/// returned path ends exactly at `b`; its length is the metric norm of the
/// initial velocity.
pub fn solve_bvp(m: &Manifold, a: &Point, b: &Point, cfg: &ShootingConfig) -> Result<GeodesicPath> {
    let metric = chart_metric(m)?;
    m.check_point(a)?;
    m.check_point(b)?;
    let estimate = m.distance_estimate(a, b)?;
    let rho = m.uniqueness_scale();
    if estimate >= rho {
        return Err(GeoError::Uniqueness(format!(
            "chart distance estimate {estimate} is not below the uniqueness radius {rho}"
        )));
    }
    let (v0, traj) = shoot(metric, a.coords(), b.coords(), cfg)?;
    let length = metric_norm(metric, a.coords(), &v0)?;
    Ok(GeodesicPath::from_trajectory(
        a.clone(),
        Some(b.clone()),
        length,
        v0,
        traj,
    ))
}

/// Riemannian speed `|x'(t)|_g` at each node of a trajectory.
pub fn speeds(m: &Manifold, traj: &Trajectory) -> Result<Vec<f64>> {
    let metric = chart_metric(m)?;
    traj.positions
        .iter()
        .zip(&traj.velocities)
        .map(|(x, v)| metric_norm(metric, x, v))
        .collect()
}
