//! Seeded random points, walks and group elements.
//!
//! The generator is xoshiro256++ seeded through SplitMix64
//! (`Xoshiro256PlusPlus::seed_from_u64`). Word `i` of a corpus with seed `s`
//! draws from its own stream seeded with `s + i * 0x9E3779B97F4A7C15`
//! (wrapping), so corpora do not depend on thread scheduling. Uniform reals
//! are `(next_u64 >> 11) * 2^-53`; Gaussians use Box-Muller on two uniforms.

use std::f64::consts::PI;
use std::sync::Arc;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{GeoError, Result};
use crate::exec::{self, Execution};
use crate::group::{chain_word, GroupElement};
use crate::manifold::{Manifold, ManifoldKind, Point};
use crate::words::{Species, Word};

const STREAM_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Attempts at drawing a valid walk step before giving up.
const MAX_STEP_ATTEMPTS: usize = 64;

pub type Rng = Xoshiro256PlusPlus;

pub fn rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Independent stream for item `index` of a seeded batch.
pub fn stream(seed: u64, index: u64) -> Rng {
    rng(seed.wrapping_add(index.wrapping_mul(STREAM_STRIDE)))
}

/// Uniform in `[0, 1)`.
pub fn uniform(rng: &mut Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn uniform_in(rng: &mut Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform(rng)
}

/// Uniform integer in `lo..=hi`.
pub fn uniform_int(rng: &mut Rng, lo: usize, hi: usize) -> usize {
    lo + ((uniform(rng) * (hi - lo + 1) as f64) as usize).min(hi - lo)
}

pub fn standard_normal(rng: &mut Rng) -> f64 {
    let u1 = 1.0 - uniform(rng);
    let u2 = uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

fn gaussian_vec(rng: &mut Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| standard_normal(rng)).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Length scale for random steps: the uniqueness scale, or 1 where that is infinite.
fn step_scale(m: &Manifold) -> f64 {
    let s = m.uniqueness_scale();
    if s.is_finite() {
        s
    } else {
        1.0
    }
}

/// A random point of the manifold.
pub fn random_point(m: &Manifold, rng: &mut Rng) -> Result<Point> {
    match m.kind() {
        ManifoldKind::Euclidean { dim } => Ok(Point::new(gaussian_vec(rng, *dim))),
        ManifoldKind::Sphere { dim, .. } => m.normalize(gaussian_vec(rng, dim + 1)),
        ManifoldKind::ProjectivePlane => m.normalize(gaussian_vec(rng, 3)),
        ManifoldKind::FlatTorus { dim } => Ok(Point::new((0..*dim).map(|_| uniform(rng)).collect())),
        ManifoldKind::HyperbolicDisk => {
            let r = 0.9 * uniform(rng).sqrt();
            let a = 2.0 * PI * uniform(rng);
            Ok(Point::new(vec![r * a.cos(), r * a.sin()]))
        }
        ManifoldKind::Chart(chart) => match chart.metric.name() {
            "polar_sphere" => Ok(Point::new(vec![
                uniform_in(rng, 0.3, PI - 0.3),
                uniform_in(rng, -PI, PI),
            ])),
            "poincare_disk" => {
                let r = 0.8 * uniform(rng).sqrt();
                let a = 2.0 * PI * uniform(rng);
                Ok(Point::new(vec![r * a.cos(), r * a.sin()]))
            }
            _ => {
                for _ in 0..MAX_STEP_ATTEMPTS {
                    let p = Point::new(gaussian_vec(rng, m.dim()));
                    if chart.metric.in_domain(p.coords()) {
                        return Ok(p);
                    }
                }
                Err(GeoError::Domain("could not sample a point in the chart".into()))
            }
        },
    }
}

/// A random unit direction in the tangent frame at `at` (the frame of `Manifold::exp_map`).
fn random_direction(m: &Manifold, at: &Point, rng: &mut Rng) -> Vec<f64> {
    loop {
        let mut v = match m.kind() {
            ManifoldKind::HyperbolicDisk => gaussian_vec(rng, 2),
            _ => gaussian_vec(rng, m.coord_len()),
        };
        if matches!(m.kind(), ManifoldKind::Sphere { .. } | ManifoldKind::ProjectivePlane) {
            let a = at.coords();
            let aa: f64 = a.iter().map(|x| x * x).sum();
            let c: f64 = v.iter().zip(a).map(|(x, y)| x * y).sum::<f64>() / aa;
            v.iter_mut().zip(a).for_each(|(x, y)| *x -= c * y);
        }
        let n = norm(&v);
        if n > 1e-6 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// A random step from `at` of length in `[0.05, 0.6]` times the step scale,
/// with a unique minimal geodesic back to `at`.
pub fn random_step(m: &Manifold, at: &Point, rng: &mut Rng) -> Result<Point> {
    let scale = step_scale(m);
    for _ in 0..MAX_STEP_ATTEMPTS {
        let len = uniform_in(rng, 0.05, 0.6) * scale;
        let dir = random_direction(m, at, rng);
        let next = match m.kind() {
            ManifoldKind::Chart(_) => {
                // straight coordinate step with the requested metric length
                let speed = match m.tangent_norm(at, &dir) {
                    Ok(s) if s > 0.0 => s,
                    _ => continue,
                };
                let coords: Vec<f64> = at.coords().iter().zip(&dir).map(|(x, d)| x + d * len / speed).collect();
                match m.point(coords) {
                    Ok(p) => p,
                    Err(_) => continue,
                }
            }
            _ => {
                let v: Vec<f64> = dir.iter().map(|x| x * len).collect();
                match m.exp_map(at, &v) {
                    Ok(p) => p,
                    Err(_) => continue,
                }
            }
        };
        if !m.points_equal(at, &next) && m.unique_minimal(at, &next).unwrap_or(false) {
            return Ok(next);
        }
    }
    Err(GeoError::Domain("could not draw a valid random step".into()))
}

/// A random walk `v0 = w_0, w_1, ..., w_steps` in traversal order.
pub fn random_walk(m: &Manifold, v0: &Point, steps: usize, rng: &mut Rng) -> Result<Vec<Point>> {
    let mut walk = vec![v0.clone()];
    for _ in 0..steps {
        let next = random_step(m, walk.last().expect("nonempty"), rng)?;
        walk.push(next);
    }
    Ok(walk)
}

/// A `Z_based` word `(w_steps, ..., w_1, v0)` from a random walk.
pub fn random_based_word(m: &Arc<Manifold>, v0: &Point, steps: usize, rng: &mut Rng) -> Result<Word> {
    let mut pts = random_walk(m, v0, steps, rng)?;
    pts.reverse();
    Word::new(m.clone(), Species::ZBased, Some(v0.clone()), pts)
}

/// A random group element of word length at most `max_length`.
///
/// A random walk of `1..=max_length - 1` steps is closed back to `v0` through
/// [`chain_word`]; if the closed word is too long the walk is shortened.
pub fn random_element(m: &Arc<Manifold>, v0: &Point, max_length: usize, rng: &mut Rng) -> Result<GroupElement> {
    if max_length < 2 {
        return Err(GeoError::Precondition("max_length must be at least 2".into()));
    }
    let steps = uniform_int(rng, 1, max_length - 1);
    let walk = random_walk(m, v0, steps, rng)?;
    for len in (0..=steps).rev() {
        let mut listing: Vec<Point> = walk[..=len].to_vec();
        listing.reverse();
        let based = Word::new(m.clone(), Species::ZBased, Some(v0.clone()), listing)?;
        let back = chain_word(m, v0, based.head(), max_length)?.reversed(Species::Z, None)?;
        let closed = Word::concat(&[&back, &based], Species::G, Some(v0.clone()))?;
        let g = GroupElement::new(&closed)?;
        if g.word().word_length() <= max_length {
            return Ok(g);
        }
    }
    unreachable!("the empty walk closes to the identity")
}

/// `count` seeded random points; point `i` draws from stream `i`.
pub fn random_points(m: &Manifold, count: usize, seed: u64, exec: Execution) -> Result<Vec<Point>> {
    exec::try_map_range(exec, count, |i| random_point(m, &mut stream(seed, i as u64)))
}

/// A seeded corpus of `count` random group elements.
pub fn random_words(
    m: &Arc<Manifold>,
    v0: &Point,
    count: usize,
    max_length: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<GroupElement>> {
    if max_length < 2 {
        return Err(GeoError::Precondition("max_length must be at least 2".into()));
    }
    m.check_point(v0)?;
    exec::try_map_range(exec, count, |i| {
        let mut r = stream(seed, i as u64);
        random_element(m, v0, max_length, &mut r)
    })
}
