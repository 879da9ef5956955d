//! Fundamental-group invariants computed through explicit coverings.
//!
//! The torus `T^n` is covered by `R^n` with deck group `Z^n`, and the
//! projective plane by the unit sphere with deck group `{+1, -1}`. Lifting a
//! word segment by segment from a fixed lift of its tail and comparing the
//! final lift with the canonical lift of its head gives the deck element of
//! the realized path. Simply connected manifolds have trivial invariants;
//! chart manifolds are unsupported.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::group::GroupElement;
use crate::manifold::{torus_displacement, Manifold, ManifoldKind, Point};
use crate::words::{Species, Word};

/// Largest tolerated distance of an accumulated torus lift from an integer vector.
const LATTICE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeckElement {
    /// Winding vector on the flat torus.
    Lattice(Vec<i64>),
    /// `+1` or `-1` on the projective plane.
    Sign(i8),
    /// The trivial group of a simply connected manifold.
    Trivial(TrivialTag),
}

/// Serialized as the string `"trivial"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrivialTag {
    Trivial,
}

impl DeckElement {
    pub const TRIVIAL: DeckElement = DeckElement::Trivial(TrivialTag::Trivial);

    pub fn identity_for(m: &Manifold) -> Result<DeckElement> {
        match m.kind() {
            ManifoldKind::FlatTorus { dim } => Ok(DeckElement::Lattice(vec![0; *dim])),
            ManifoldKind::ProjectivePlane => Ok(DeckElement::Sign(1)),
            ManifoldKind::Chart(_) => Err(unsupported(m)),
            ManifoldKind::Sphere { dim, .. } if *dim == 1 => Err(unsupported(m)),
            _ => Ok(DeckElement::TRIVIAL),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            DeckElement::Lattice(v) => v.iter().all(|x| *x == 0),
            DeckElement::Sign(s) => *s == 1,
            DeckElement::Trivial(_) => true,
        }
    }

    /// Group operation: addition on lattices, multiplication on signs.
    pub fn compose(&self, other: &DeckElement) -> Result<DeckElement> {
        match (self, other) {
            (DeckElement::Lattice(a), DeckElement::Lattice(b)) if a.len() == b.len() => {
                Ok(DeckElement::Lattice(a.iter().zip(b).map(|(x, y)| x + y).collect()))
            }
            (DeckElement::Sign(a), DeckElement::Sign(b)) => Ok(DeckElement::Sign(a * b)),
            (DeckElement::Trivial(_), DeckElement::Trivial(_)) => Ok(DeckElement::TRIVIAL),
            _ => Err(GeoError::ManifoldMismatch),
        }
    }

    pub fn inverse(&self) -> DeckElement {
        match self {
            DeckElement::Lattice(a) => DeckElement::Lattice(a.iter().map(|x| -x).collect()),
            other => other.clone(),
        }
    }
}

impl fmt::Display for DeckElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeckElement::Lattice(v) => write!(f, "{v:?}"),
            DeckElement::Sign(s) => write!(f, "{s:+}"),
            DeckElement::Trivial(_) => f.write_str("trivial"),
        }
    }
}

fn unsupported(m: &Manifold) -> GeoError {
    GeoError::Unsupported(format!("no covering space implemented for {}", m.kind_name()))
}

/// Deck element of the path through `pts` (traversal order), lifted by
/// continuation: each step uses the minimal lift of the next point.
pub fn lift_points(m: &Manifold, pts: &[&Point]) -> Result<DeckElement> {
    let first = pts
        .first()
        .ok_or_else(|| GeoError::Precondition("cannot lift an empty path".into()))?;
    let last = pts.last().expect("nonempty");
    match m.kind() {
        ManifoldKind::FlatTorus { .. } => {
            let mut lift = first.coords().to_vec();
            for pair in pts.windows(2) {
                for (k, l) in lift.iter_mut().enumerate() {
                    *l += torus_displacement(pair[0].coords()[k], pair[1].coords()[k]);
                }
            }
            let winding = lift
                .iter()
                .zip(last.coords())
                .map(|(l, c)| {
                    let w = l - c;
                    let r = w.round();
                    if (w - r).abs() > LATTICE_TOL {
                        Err(GeoError::Precondition(format!(
                            "lift does not end over the final point (offset {w})"
                        )))
                    } else {
                        Ok(r as i64)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(DeckElement::Lattice(winding))
        }
        ManifoldKind::ProjectivePlane => {
            let mut lift = first.coords().to_vec();
            for q in &pts[1..] {
                let c = q.coords();
                let d: f64 = lift.iter().zip(c).map(|(x, y)| x * y).sum();
                lift = if d >= 0.0 {
                    c.to_vec()
                } else {
                    c.iter().map(|x| -x).collect()
                };
            }
            let d: f64 = lift.iter().zip(last.coords()).map(|(x, y)| x * y).sum();
            Ok(DeckElement::Sign(if d > 0.0 { 1 } else { -1 }))
        }
        _ => DeckElement::identity_for(m),
    }
}

fn word_lift(w: &Word) -> Result<DeckElement> {
    w.validate()?;
    let order: Vec<&Point> = w.points().iter().rev().collect();
    lift_points(w.manifold(), &order)
}

/// Fundamental-group class of a group element.
pub fn pi1_class(g: &GroupElement) -> Result<DeckElement> {
    word_lift(g.word())
}

/// Class of any closed word (`X` or `G`), reduced or not.
pub fn loop_class(w: &Word) -> Result<DeckElement> {
    if !w.species().is_closed() {
        return Err(GeoError::Species {
            expected: "X or G".into(),
            found: w.species().to_string(),
        });
    }
    word_lift(w)
}

/// Which component `P_g` of the based path space the realized path lies in.
///
/// The path is lifted from the canonical lift of the basepoint; the result is
/// the deck element carrying the canonical lift of the head to the final lift.
pub fn deck_element_of_path(z: &Word) -> Result<DeckElement> {
    if !z.species().is_based() {
        return Err(GeoError::Species {
            expected: "Z_based or G".into(),
            found: z.species().to_string(),
        });
    }
    word_lift(z)
}

/// Deck element of a sampled polyline (traversal order). The sampling must be
/// fine enough that consecutive samples are within the uniqueness scale.
pub fn deck_of_polyline(m: &Manifold, samples: &[Point]) -> Result<DeckElement> {
    let refs: Vec<&Point> = samples.iter().collect();
    lift_points(m, &refs)
}

/// `a * g * a^{-1}`.
pub fn conjugate(g: &GroupElement, a: &GroupElement) -> Result<GroupElement> {
    a.mul(g)?.mul(&a.inverse())
}

/// `a * b * a^{-1} * b^{-1}`.
pub fn commutator(a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
    a.mul(b)?.mul(&a.inverse())?.mul(&b.inverse())
}

/// `2g` group elements over a shared manifold and basepoint.
#[derive(Debug, Clone)]
pub struct SurfaceTuple {
    genus: usize,
    elements: Vec<GroupElement>,
}

impl SurfaceTuple {
    pub fn new(elements: Vec<GroupElement>) -> Result<Self> {
        if elements.is_empty() || !elements.len().is_multiple_of(2) {
            return Err(GeoError::Precondition(format!(
                "a surface tuple needs 2g >= 2 elements, found {}",
                elements.len()
            )));
        }
        let first = elements[0].word();
        for e in &elements[1..] {
            if !first.same_manifold(e.word()) {
                return Err(GeoError::ManifoldMismatch);
            }
            if !first.manifold().points_equal(elements[0].basepoint(), e.basepoint()) {
                return Err(GeoError::BasepointMismatch);
            }
        }
        Ok(SurfaceTuple {
            genus: elements.len() / 2,
            elements,
        })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }
}

/// `[x_1, x_2] * [x_3, x_4] * ... * [x_{2g-1}, x_{2g}]`.
pub fn chi(s: &SurfaceTuple) -> Result<GroupElement> {
    let first = &s.elements[0];
    let mut acc = GroupElement::identity(first.manifold().clone(), first.basepoint().clone())?;
    for pair in s.elements.chunks(2) {
        acc = acc.mul(&commutator(&pair[0], &pair[1])?)?;
    }
    Ok(acc)
}

/// Whether the commutator product is trivial on the fundamental group, the
/// obstruction to lifting the tuple into the homotopy fibre of `chi`.
pub fn is_surface_relator(s: &SurfaceTuple) -> Result<bool> {
    Ok(pi1_class(&chi(s)?)?.is_identity())
}

/// `G`-species check used by callers holding raw words.
pub fn require_group_word(w: &Word) -> Result<GroupElement> {
    if w.species() != Species::G {
        return Err(GeoError::Species {
            expected: "G".into(),
            found: w.species().to_string(),
        });
    }
    GroupElement::new(w)
}
