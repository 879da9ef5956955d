//! Realization of words as piecewise-geodesic paths.
//!
//! The segments of a word are traversed from `x_0` toward `x_k` and glued at
//! breakpoints proportional to accumulated arc length, giving a map
//! `[0, 1] -> M` of constant speed `L`, the total length. Based words realize as
//! paths starting at the basepoint, closed words as loops.

use crate::error::Result;
use crate::exec::{self, Execution};
use crate::manifold::{GeodesicPath, Manifold, Point};
use crate::words::Word;

/// Grid size used by [`realize_invariance_check`].
const INVARIANCE_SAMPLES: usize = 512;

/// Parameterization tolerance of [`realize_invariance_check`].
pub const INVARIANCE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct PiecewiseLoop {
    start: Point,
    /// Segment `j` runs from `x_{j-1}` to `x_j`.
    segments: Vec<GeodesicPath>,
    total_length: f64,
    /// `delta_0 = 0, ..., delta_k = 1`; all zero when the total length vanishes.
    breakpoints: Vec<f64>,
    closed: bool,
}

impl PiecewiseLoop {
    /// Glue consecutive segments starting at `start`.
    pub fn from_segments(start: Point, segments: Vec<GeodesicPath>, closed: bool) -> Self {
        let mut prefix = Vec::with_capacity(segments.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for s in &segments {
            acc += s.length();
            prefix.push(acc);
        }
        let total_length = acc;
        let breakpoints = if total_length > 0.0 {
            prefix.iter().map(|p| p / total_length).collect()
        } else {
            vec![0.0; prefix.len()]
        };
        PiecewiseLoop {
            start,
            segments,
            total_length,
            breakpoints,
            closed,
        }
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn segments(&self) -> &[GeodesicPath] {
        &self.segments
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Point at parameter `t in [0, 1]`.
    pub fn eval(&self, t: f64) -> Point {
        if self.total_length == 0.0 || t <= 0.0 {
            return self.start.clone();
        }
        if t >= 1.0 {
            return if self.closed {
                self.start.clone()
            } else {
                self.segments
                    .last()
                    .map_or_else(|| self.start.clone(), |s| s.end().clone())
            };
        }
        // first segment j (1-based) with delta_j >= t
        let j = self.breakpoints[1..].partition_point(|d| *d < t) + 1;
        let j = j.min(self.segments.len());
        let (lo, hi) = (self.breakpoints[j - 1], self.breakpoints[j]);
        let seg = &self.segments[j - 1];
        if hi <= lo {
            return seg.start().clone();
        }
        seg.eval(((t - lo) / (hi - lo)).clamp(0.0, 1.0))
    }

    /// `n + 1` points at `t = i / n`.
    pub fn sample(&self, n: usize) -> Vec<Point> {
        self.sample_with(n, Execution::default())
    }

    pub fn sample_with(&self, n: usize, exec: Execution) -> Vec<Point> {
        let n = n.max(1);
        exec::map_range(exec, n + 1, |i| self.eval(i as f64 / n as f64))
    }
}

/// Sum of intrinsic distances between consecutive points.
pub fn polyline_length(m: &Manifold, pts: &[Point]) -> Result<f64> {
    pts.windows(2).map(|w| m.distance(&w[0], &w[1])).sum()
}

/// Ordered segment endpoints of a word, from `x_0` toward `x_k`.
fn traversal(w: &Word) -> Vec<&Point> {
    w.points().iter().rev().collect()
}

/// Realize a valid word as a constant-speed piecewise-geodesic map.
pub fn realize(w: &Word) -> Result<PiecewiseLoop> {
    w.validate()?;
    let m = w.manifold();
    let order = traversal(w);
    let segments = order
        .windows(2)
        .map(|pair| m.geodesic(pair[0], pair[1]))
        .collect::<Result<Vec<_>>>()?;
    Ok(PiecewiseLoop::from_segments(
        order[0].clone(),
        segments,
        w.species().is_closed(),
    ))
}

/// Outcome of comparing a word's realization with that of its normal form.
#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    /// Reduced realization matches the excised one within [`INVARIANCE_TOLERANCE`].
    pub agrees: bool,
    /// Largest sampled distance between the reduced and the excised realization.
    pub max_deviation: f64,
    /// Largest sampled distance between the reduced and the unexcised realization.
    pub direct_deviation: f64,
    pub zero_length_segments: usize,
    /// Cancelling segment pairs removed from the unreduced realization.
    pub excised_backtracks: usize,
}

impl InvarianceReport {
    pub fn holds(&self) -> bool {
        self.agrees
    }

    /// Whether backtracks changed the traced image (a null-homotopic excursion).
    pub fn image_differs(&self) -> bool {
        self.direct_deviation > INVARIANCE_TOLERANCE
    }
}

/// Compare `realize(reduce(w))` with `realize(w)` after removing zero-length
/// segments and cancelling there-and-back segment pairs from the latter.
pub fn realize_invariance_check(w: &Word) -> Result<InvarianceReport> {
    let unreduced = realize(w)?;
    let reduced = realize(w.reduce()?.as_word())?;
    let m = w.manifold();

    let mut zero_length_segments = 0;
    let mut excised_backtracks = 0;
    let mut kept: Vec<GeodesicPath> = Vec::new();
    for seg in unreduced.segments() {
        if m.points_equal(seg.start(), seg.end()) {
            zero_length_segments += 1;
            continue;
        }
        let cancels = kept
            .last()
            .is_some_and(|top| m.points_equal(top.start(), seg.end()) && m.points_equal(top.end(), seg.start()));
        if cancels {
            kept.pop();
            excised_backtracks += 1;
        } else {
            kept.push(seg.clone());
        }
    }
    let excised = PiecewiseLoop::from_segments(unreduced.start.clone(), kept, unreduced.closed);

    let mut max_deviation: f64 = 0.0;
    let mut direct_deviation: f64 = 0.0;
    for i in 0..=INVARIANCE_SAMPLES {
        let t = i as f64 / INVARIANCE_SAMPLES as f64;
        let r = reduced.eval(t);
        max_deviation = max_deviation.max(m.distance(&r, &excised.eval(t))?);
        direct_deviation = direct_deviation.max(m.distance(&r, &unreduced.eval(t))?);
    }
    Ok(InvarianceReport {
        agrees: max_deviation <= INVARIANCE_TOLERANCE
            && (excised.total_length() - reduced.total_length()).abs()
                <= INVARIANCE_TOLERANCE * reduced.total_length().max(1.0),
        max_deviation,
        direct_deviation,
        zero_length_segments,
        excised_backtracks,
    })
}
