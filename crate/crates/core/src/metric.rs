//! Metric tensors for chart manifolds.
//!
//! A chart manifold is an open subset of `R^n` with a Riemannian metric given
//! pointwise by a symmetric matrix. The builtins cover the cases that have
//! closed-form geodesics elsewhere in the crate, which makes them useful as
//! oracles for the numerical solver.

use std::fmt;
use std::sync::Arc;

use crate::error::{GeoError, Result};

/// A metric tensor field on a coordinate chart.
pub trait MetricTensor: Send + Sync + fmt::Debug {
    /// Stable name used for serialization and equality.
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    /// Row-major `dim x dim` matrix of the metric at `x`.
    fn tensor(&self, x: &[f64]) -> Vec<f64>;

    /// Whether `x` lies inside the coordinate domain.
    fn in_domain(&self, _x: &[f64]) -> bool {
        true
    }
}

/// The Euclidean metric in any dimension.
#[derive(Debug, Clone, Copy)]
pub struct FlatMetric {
    pub dim: usize,
}

impl MetricTensor for FlatMetric {
    fn name(&self) -> &str {
        "flat"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn tensor(&self, _x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            g[i * n + i] = 1.0;
        }
        g
    }
}

/// Round unit sphere in polar coordinates `(theta, phi)`: `g = diag(1, sin^2 theta)`.
///
/// The domain excludes the poles, `0 < theta < pi`.
#[derive(Debug, Clone, Copy)]
pub struct PolarSphereMetric;

impl PolarSphereMetric {
    /// Embedding of chart coordinates into the unit sphere in `R^3`.
    pub fn embed(x: &[f64]) -> [f64; 3] {
        let (theta, phi) = (x[0], x[1]);
        [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
    }
}

impl MetricTensor for PolarSphereMetric {
    fn name(&self) -> &str {
        "polar_sphere"
    }

    fn dim(&self) -> usize {
        2
    }

    fn tensor(&self, x: &[f64]) -> Vec<f64> {
        let s = x[0].sin();
        vec![1.0, 0.0, 0.0, s * s]
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        x[0] > 0.0 && x[0] < std::f64::consts::PI
    }
}

/// Poincare disk model of the hyperbolic plane: `g = 4 / (1 - |u|^2)^2 I`.
#[derive(Debug, Clone, Copy)]
pub struct PoincareDiskMetric;

impl MetricTensor for PoincareDiskMetric {
    fn name(&self) -> &str {
        "poincare_disk"
    }

    fn dim(&self) -> usize {
        2
    }

    fn tensor(&self, x: &[f64]) -> Vec<f64> {
        let r2 = x[0] * x[0] + x[1] * x[1];
        let c = 4.0 / ((1.0 - r2) * (1.0 - r2));
        vec![c, 0.0, 0.0, c]
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        x[0] * x[0] + x[1] * x[1] < 1.0
    }
}

/// Resolve a builtin metric by name.
pub fn builtin_metric(name: &str, dim: usize) -> Result<Arc<dyn MetricTensor>> {
    let metric: Arc<dyn MetricTensor> = match name {
        "flat" => Arc::new(FlatMetric { dim }),
        "polar_sphere" => Arc::new(PolarSphereMetric),
        "poincare_disk" => Arc::new(PoincareDiskMetric),
        other => return Err(GeoError::Representation(format!("unknown builtin metric `{other}`"))),
    };
    if metric.dim() != dim {
        return Err(GeoError::Representation(format!(
            "metric `{name}` has dimension {}, chart declares {dim}",
            metric.dim()
        )));
    }
    Ok(metric)
}
