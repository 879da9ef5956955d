//! The group of reduced closed words at a basepoint.
//!
//! Multiplication is concatenation followed by reduction, the inverse is
//! reversal, and the identity is the one-point word `(v_0)`. The same
//! concatenation gives the right action on based words, the local
//! trivializations `phi_p`, `theta_p` and transition functions of the
//! projection to the head point, and the contraction homotopy that slides a
//! word's head along its first geodesic.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{GeoError, Result};
use crate::manifold::{torus_displacement, Manifold, ManifoldKind, Point};
use crate::words::{class_equal, ReducedWord, Species, Word};

/// Hop budget used when charts build their fiber basepoint.
pub const DEFAULT_CHAIN_BUDGET: usize = 1 << 10;

/// An element of the word group: a reduced `G`-species word.
#[derive(Debug, Clone)]
pub struct GroupElement(ReducedWord);

impl GroupElement {
    /// Reduce a `G`-species word into a group element.
    pub fn new(word: &Word) -> Result<Self> {
        if word.species() != Species::G {
            return Err(GeoError::Species {
                expected: "G".into(),
                found: word.species().to_string(),
            });
        }
        Ok(GroupElement(word.reduce()?))
    }

    pub fn identity(manifold: Arc<Manifold>, basepoint: Point) -> Result<Self> {
        GroupElement::new(&Word::identity(manifold, basepoint)?)
    }

    pub fn word(&self) -> &ReducedWord {
        &self.0
    }

    pub fn manifold(&self) -> &Arc<Manifold> {
        self.0.manifold()
    }

    pub fn basepoint(&self) -> &Point {
        self.0.basepoint().expect("G words carry a basepoint")
    }

    pub fn is_identity(&self) -> bool {
        self.0.word_length() == 0
    }

    fn check_compatible(&self, other: &Word) -> Result<()> {
        if !self.0.same_manifold(other) {
            return Err(GeoError::ManifoldMismatch);
        }
        let other_base = other.basepoint().ok_or(GeoError::BasepointMismatch)?;
        if !self.manifold().points_equal(self.basepoint(), other_base) {
            return Err(GeoError::BasepointMismatch);
        }
        Ok(())
    }

    /// `self * other`: the points of `self` followed by those of `other`, reduced.
    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement> {
        self.check_compatible(other.word())?;
        let w = Word::concat(&[self.word(), other.word()], Species::G, Some(self.basepoint().clone()))?;
        GroupElement::new(&w)
    }

    /// The reversed word.
    pub fn inverse(&self) -> GroupElement {
        let mut pts = self.0.points().to_vec();
        pts.reverse();
        let w = Word::new(self.manifold().clone(), Species::G, Some(self.basepoint().clone()), pts)
            .expect("reversal keeps point representations");
        // the reverse of a normal form is a normal form
        GroupElement(w.reduce().expect("reversal of a valid word is valid"))
    }

    pub fn class_eq(&self, other: &GroupElement) -> Result<bool> {
        class_equal(self.word(), other.word())
    }
}

fn require_species(w: &Word, species: Species) -> Result<()> {
    if w.species() != species {
        return Err(GeoError::Species {
            expected: species.to_string(),
            found: w.species().to_string(),
        });
    }
    Ok(())
}

/// The right action `z * g` of the group on based words.
pub fn action_mu(z: &Word, g: &GroupElement) -> Result<ReducedWord> {
    require_species(z, Species::ZBased)?;
    g.check_compatible(z)?;
    Word::concat(&[z, g.word()], Species::ZBased, Some(g.basepoint().clone()))?.reduce()
}

/// Point along a connecting curve from `v0` (at `t = 0`) to `p` (at `t = 1`).
fn connecting_curve<'a>(m: &'a Manifold, v0: &Point, p: &Point) -> Result<Box<dyn Fn(f64) -> Result<Point> + 'a>> {
    let (a, b) = (v0.coords().to_vec(), p.coords().to_vec());
    Ok(match m.kind() {
        ManifoldKind::Euclidean { .. } | ManifoldKind::Chart(_) => {
            Box::new(move |t| Ok(Point::new(a.iter().zip(&b).map(|(x, y)| x + t * (y - x)).collect())))
        }
        ManifoldKind::HyperbolicDisk => {
            let geo = m.geodesic(v0, p)?;
            Box::new(move |t| Ok(geo.eval(t)))
        }
        ManifoldKind::FlatTorus { .. } => {
            let delta: Vec<f64> = a.iter().zip(&b).map(|(x, y)| torus_displacement(*x, *y)).collect();
            Box::new(move |t| m.normalize(a.iter().zip(&delta).map(|(x, d)| x + t * d).collect()))
        }
        ManifoldKind::Sphere { radius, .. } => {
            let r = *radius;
            if m.unique_minimal(v0, p)? {
                let geo = m.geodesic(v0, p)?;
                Box::new(move |t| Ok(geo.eval(t)))
            } else {
                // antipodal: half great circle through a fixed orthogonal direction
                let dir = orthogonal_unit(&a);
                Box::new(move |t| {
                    let phi = PI * t;
                    m.normalize(
                        a.iter()
                            .zip(&dir)
                            .map(|(x, w)| x * phi.cos() + r * w * phi.sin())
                            .collect(),
                    )
                })
            }
        }
        ManifoldKind::ProjectivePlane => {
            let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
            let lift: Vec<f64> = if dot >= 0.0 {
                b.clone()
            } else {
                b.iter().map(|x| -x).collect()
            };
            let angle = 2.0 * {
                let d: f64 = a.iter().zip(&lift).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                let s: f64 = a.iter().zip(&lift).map(|(x, y)| (x + y).powi(2)).sum::<f64>().sqrt();
                d.atan2(s)
            };
            let w: Vec<f64> = lift.iter().zip(&a).map(|(y, x)| y - dot.abs() * x).collect();
            let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            Box::new(move |t| {
                if wn == 0.0 {
                    return Ok(Point::new(a.clone()));
                }
                let phi = t * angle;
                m.normalize(
                    a.iter()
                        .zip(&w)
                        .map(|(x, u)| x * phi.cos() + u / wn * phi.sin())
                        .collect(),
                )
            })
        }
    })
}

fn orthogonal_unit(a: &[f64]) -> Vec<f64> {
    let k = (0..a.len())
        .min_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs()))
        .unwrap_or(0);
    let n2: f64 = a.iter().map(|x| x * x).sum();
    let mut e = vec![0.0; a.len()];
    e[k] = 1.0;
    let proj = a[k] / n2;
    let w: Vec<f64> = e.iter().zip(a).map(|(x, y)| x - proj * y).collect();
    let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    w.into_iter().map(|x| x / wn).collect()
}

/// A based word `(p, w_{q-1}, ..., w_1, v0)` projecting to `p`.
///
/// A connecting curve from `v0` to `p` is subdivided into 1, 2, 4, ... equal
/// hops until every hop has a unique minimal geodesic, up to `budget` hops.
pub fn chain_word(m: &Arc<Manifold>, v0: &Point, p: &Point, budget: usize) -> Result<ReducedWord> {
    m.check_point(v0)?;
    m.check_point(p)?;
    let curve = connecting_curve(m, v0, p)?;
    let mut hops = 1usize;
    while hops <= budget.max(1) {
        let mut pts = Vec::with_capacity(hops + 1);
        pts.push(p.clone());
        for j in 1..hops {
            pts.push(curve(1.0 - j as f64 / hops as f64)?);
        }
        pts.push(v0.clone());
        let mut ok = true;
        for pair in pts.windows(2) {
            if !m.unique_minimal(&pair[0], &pair[1])? {
                ok = false;
                break;
            }
        }
        if ok {
            return Word::new(m.clone(), Species::ZBased, Some(v0.clone()), pts)?.reduce();
        }
        hops *= 2;
    }
    Err(GeoError::Subdivision { budget })
}

/// A local trivialization of the head projection around `center`.
#[derive(Debug, Clone)]
pub struct LocalChart {
    center: Point,
    fiber_point: ReducedWord,
    radius: f64,
}

impl LocalChart {
    /// Chart at `center` with the fiber basepoint built by [`chain_word`] and the
    /// manifold's default radius.
    pub fn new(m: &Arc<Manifold>, v0: &Point, center: Point) -> Result<Self> {
        let fiber_point = chain_word(m, v0, &center, DEFAULT_CHAIN_BUDGET)?;
        Ok(LocalChart {
            center,
            fiber_point,
            radius: m.chart_radius(),
        })
    }

    /// Chart with an explicit fiber basepoint and radius.
    pub fn with_fiber_point(center: Point, fiber_point: ReducedWord, radius: f64) -> Result<Self> {
        require_species(&fiber_point, Species::ZBased)?;
        let m = fiber_point.manifold();
        if !m.points_equal(fiber_point.project_pi(), &center) {
            return Err(GeoError::Precondition(
                "fiber point does not project to the chart center".into(),
            ));
        }
        if !(radius > 0.0) || radius > m.chart_radius() {
            return Err(GeoError::Precondition(format!(
                "chart radius {radius} must lie in (0, {}]",
                m.chart_radius()
            )));
        }
        Ok(LocalChart {
            center,
            fiber_point,
            radius,
        })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    /// The fixed point `e_p` of the fiber over the center.
    pub fn fiber_point(&self) -> &ReducedWord {
        &self.fiber_point
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn manifold(&self) -> &Arc<Manifold> {
        self.fiber_point.manifold()
    }

    fn basepoint(&self) -> &Point {
        self.fiber_point.basepoint().expect("based word")
    }

    pub fn contains(&self, x: &Point) -> Result<bool> {
        Ok(self.manifold().distance_estimate(x, &self.center)? < self.radius)
    }

    fn require_contains(&self, x: &Point) -> Result<()> {
        let distance = self.manifold().distance_estimate(x, &self.center)?;
        if distance < self.radius {
            Ok(())
        } else {
            Err(GeoError::ChartDomain {
                distance,
                radius: self.radius,
            })
        }
    }

    fn segment(&self, pts: Vec<Point>) -> Result<Word> {
        Word::new(self.manifold().clone(), Species::Z, None, pts)
    }

    /// `e_p^{-1}`: the fiber point reversed, running from the basepoint to the center.
    fn fiber_inverse(&self) -> Result<Word> {
        self.fiber_point.reversed(Species::Z, None)
    }

    /// `phi_p(x, g) = [x, p] * e_p * g`, reduced.
    pub fn phi(&self, x: &Point, g: &GroupElement) -> Result<ReducedWord> {
        self.require_contains(x)?;
        g.check_compatible(&self.fiber_point)?;
        let xp = self.segment(vec![x.clone(), self.center.clone()])?;
        Word::concat(
            &[&xp, &self.fiber_point, g.word()],
            Species::ZBased,
            Some(self.basepoint().clone()),
        )?
        .reduce()
    }

    /// `theta_p(e) = e_p^{-1} * [p, pi(e)] * e`.
    pub fn theta(&self, e: &Word) -> Result<GroupElement> {
        require_species(e, Species::ZBased)?;
        if !self.fiber_point.same_manifold(e) {
            return Err(GeoError::ManifoldMismatch);
        }
        let x = e.project_pi();
        self.require_contains(x)?;
        let inv = self.fiber_inverse()?;
        let px = self.segment(vec![self.center.clone(), x.clone()])?;
        let w = Word::concat(&[&inv, &px, e], Species::G, Some(self.basepoint().clone()))?;
        GroupElement::new(&w)
    }

    /// The trivialization `e -> (pi(e), theta_p(e))`.
    pub fn trivialize(&self, e: &Word) -> Result<(Point, GroupElement)> {
        Ok((e.project_pi().clone(), self.theta(e)?))
    }
}

/// `g_{p,q}(x) = e_p^{-1} * [p, x, q] * e_q`.
pub fn transition(cp: &LocalChart, cq: &LocalChart, x: &Point) -> Result<GroupElement> {
    if !cp.fiber_point.same_manifold(&cq.fiber_point) {
        return Err(GeoError::ManifoldMismatch);
    }
    if !cp.manifold().points_equal(cp.basepoint(), cq.basepoint()) {
        return Err(GeoError::BasepointMismatch);
    }
    cp.require_contains(x)?;
    cq.require_contains(x)?;
    let inv = cp.fiber_inverse()?;
    let pxq = cp.segment(vec![cp.center.clone(), x.clone(), cq.center.clone()])?;
    let w = Word::concat(&[&inv, &pxq, &cq.fiber_point], Species::G, Some(cp.basepoint().clone()))?;
    GroupElement::new(&w)
}

/// Whether `g_{p,q}(x) * g_{q,r}(x)` and `g_{p,r}(x)` are the same class.
pub fn cocycle_holds(cp: &LocalChart, cq: &LocalChart, cr: &LocalChart, x: &Point) -> Result<bool> {
    let lhs = transition(cp, cq, x)?.mul(&transition(cq, cr, x)?)?;
    lhs.class_eq(&transition(cp, cr, x)?)
}

/// One stage of the contraction homotopy: move the head `x_k` to the point at
/// parameter `t` on the geodesic from `x_k` to `x_{k-1}`.
///
/// The head must be in contraction form: `x_k != x_{k-1}` and `x_k != x_{k-2}`.
/// Length-zero words are returned unchanged. The result is a `Z_based` word.
pub fn contract_step(t: f64, w: &Word) -> Result<Word> {
    if !w.species().is_based() {
        return Err(GeoError::Species {
            expected: "Z_based or G".into(),
            found: w.species().to_string(),
        });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(GeoError::Precondition(format!("homotopy parameter {t} outside [0, 1]")));
    }
    w.validate()?;
    let m = w.manifold();
    let pts = w.points();
    let basepoint = w.basepoint().cloned();
    if pts.len() == 1 {
        return Word::new(m.clone(), Species::ZBased, basepoint, pts.to_vec());
    }
    if m.points_equal(&pts[0], &pts[1]) || (pts.len() > 2 && m.points_equal(&pts[0], &pts[2])) {
        return Err(GeoError::Precondition(
            "head has a duplicate or backtrack; reduce first".into(),
        ));
    }
    let head = m.geodesic(&pts[0], &pts[1])?.eval(t);
    let mut out = pts.to_vec();
    out[0] = head;
    Word::new(m.clone(), Species::ZBased, basepoint, out)
}

/// Reduced words visited by repeatedly applying `contract_step(1, .)` and
/// reducing, starting from the reduction of `w` and ending at `(v_0)`.
pub fn contraction_trace(w: &Word) -> Result<Vec<ReducedWord>> {
    let mut current = w.reduce()?;
    let mut trace = vec![current.clone()];
    while current.word_length() > 0 {
        current = contract_step(1.0, &current)?.reduce()?;
        trace.push(current.clone());
    }
    Ok(trace)
}
