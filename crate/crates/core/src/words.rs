//! Geodesic words and their reduced normal forms.
//!
//! A word is a tuple `(x_k, ..., x_0)` of manifold points with a unique
//! minimal geodesic between each consecutive pair. Points are stored in that
//! order, head `x_k` first. Two rules generate the equivalence relation on
//! words: a point equal to its successor is deleted, and a point whose two
//! neighbors coincide is deleted (a backtrack). A word without any applicable
//! rule is in normal form; classes are compared through normal forms.

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::manifold::{Manifold, Point};

/// Which subspace constraints a word carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Species {
    /// No endpoint constraint.
    Z,
    /// Tail `x_0` equals the basepoint.
    #[serde(rename = "Z_based")]
    ZBased,
    /// Closed: `x_0 = x_k`.
    X,
    /// Closed at the basepoint: `x_0 = x_k = v_0`.
    G,
}

impl Species {
    pub fn is_based(self) -> bool {
        matches!(self, Species::ZBased | Species::G)
    }

    pub fn is_closed(self) -> bool {
        matches!(self, Species::X | Species::G)
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Species::Z => "Z",
            Species::ZBased => "Z_based",
            Species::X => "X",
            Species::G => "G",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Word {
    manifold: Arc<Manifold>,
    points: Vec<Point>,
    species: Species,
    basepoint: Option<Point>,
}

impl Word {
    /// Assemble a word. Point representations are checked here; geodesic
    /// validity and species constraints are checked by [`Word::validate`].
    pub fn new(
        manifold: Arc<Manifold>,
        species: Species,
        basepoint: Option<Point>,
        points: Vec<Point>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(GeoError::Validity {
                index: 0,
                reason: "a word has at least one point".into(),
            });
        }
        let basepoint = match (species.is_based(), basepoint) {
            (true, None) => {
                return Err(GeoError::Species {
                    expected: format!("{species} word with a basepoint"),
                    found: "no basepoint".into(),
                })
            }
            (true, Some(b)) => Some(b),
            (false, _) => None,
        };
        for p in points.iter().chain(basepoint.iter()) {
            if p.len() != manifold.coord_len() {
                return Err(GeoError::ManifoldMismatch);
            }
            manifold.check_point(p)?;
        }
        Ok(Word {
            manifold,
            points,
            species,
            basepoint,
        })
    }

    /// The length-zero word `(v_0)` of species `G`.
    pub fn identity(manifold: Arc<Manifold>, basepoint: Point) -> Result<Self> {
        Word::new(manifold, Species::G, Some(basepoint.clone()), vec![basepoint])
    }

    pub fn manifold(&self) -> &Arc<Manifold> {
        &self.manifold
    }

    /// Points in storage order `(x_k, ..., x_0)`.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn species(&self) -> Species {
        self.species
    }

    pub fn basepoint(&self) -> Option<&Point> {
        self.basepoint.as_ref()
    }

    /// The word length `k` (number of points minus one).
    pub fn word_length(&self) -> usize {
        self.points.len() - 1
    }

    pub fn head(&self) -> &Point {
        &self.points[0]
    }

    pub fn tail(&self) -> &Point {
        self.points.last().expect("words are nonempty")
    }

    /// The first coordinate projection `pi(x_k, ..., x_0) = x_k`.
    pub fn project_pi(&self) -> &Point {
        self.head()
    }

    pub(crate) fn same_manifold(&self, other: &Word) -> bool {
        Arc::ptr_eq(&self.manifold, &other.manifold) || *self.manifold == *other.manifold
    }

    /// Check geodesic validity of every consecutive pair and the species constraints.
    ///
    /// The error carries the first failing storage index.
    pub fn validate(&self) -> Result<()> {
        let m = &self.manifold;
        for (i, pair) in self.points.windows(2).enumerate() {
            if !m.unique_minimal(&pair[0], &pair[1])? {
                return Err(GeoError::Validity {
                    index: i,
                    reason: "no unique minimal geodesic to the next point".into(),
                });
            }
        }
        let last = self.points.len() - 1;
        if self.species.is_closed() && !m.points_equal(self.head(), self.tail()) {
            return Err(GeoError::Validity {
                index: 0,
                reason: format!("{} words must be closed", self.species),
            });
        }
        if let Some(v0) = &self.basepoint {
            if !m.points_equal(self.tail(), v0) {
                return Err(GeoError::Validity {
                    index: last,
                    reason: "tail must equal the basepoint".into(),
                });
            }
            if self.species == Species::G && !m.points_equal(self.head(), v0) {
                return Err(GeoError::Validity {
                    index: 0,
                    reason: "head must equal the basepoint".into(),
                });
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Reduce to normal form by leftmost-first deletion.
    ///
    /// Scanning starts at the head. At each position the duplicate rule is
    /// tried before the backtrack rule; after a deletion the scan resumes two
    /// positions back, the leftmost place a new redex can appear. Duplicates
    /// keep the endpoint copy when one of the pair is an endpoint.
    pub fn reduce(&self) -> Result<ReducedWord> {
        self.validate()?;
        let points = reduce_points(&self.manifold, self.points.clone());
        Ok(ReducedWord(Word {
            manifold: self.manifold.clone(),
            points,
            species: self.species,
            basepoint: self.basepoint.clone(),
        }))
    }

    /// The word traversed backwards, `(x_0, ..., x_k)`.
    pub fn reversed(&self, species: Species, basepoint: Option<Point>) -> Result<Word> {
        let mut points = self.points.clone();
        points.reverse();
        Word::new(self.manifold.clone(), species, basepoint, points)
    }

    /// Concatenate composable words: each word's tail must coincide with the
    /// next word's head. All points are kept; the junction duplicates are
    /// removed by a later reduction.
    pub fn concat(parts: &[&Word], species: Species, basepoint: Option<Point>) -> Result<Word> {
        let first = parts
            .first()
            .ok_or_else(|| GeoError::Precondition("nothing to concatenate".into()))?;
        let m = first.manifold.clone();
        let mut points = Vec::new();
        for (i, w) in parts.iter().enumerate() {
            if !first.same_manifold(w) {
                return Err(GeoError::ManifoldMismatch);
            }
            if i > 0 && !m.points_equal(parts[i - 1].tail(), w.head()) {
                return Err(GeoError::Precondition(format!(
                    "word {} does not start where word {} ends",
                    i,
                    i - 1
                )));
            }
            points.extend(w.points.iter().cloned());
        }
        Word::new(m, species, basepoint, points)
    }

    /// Pointwise equality within the manifold's coincidence threshold.
    pub fn points_match(&self, other: &Word) -> bool {
        self.same_manifold(other)
            && self.points.len() == other.points.len()
            && self
                .points
                .iter()
                .zip(&other.points)
                .all(|(a, b)| self.manifold.points_equal(a, b))
    }
}

/// Leftmost-first deletion on raw points.
pub(crate) fn reduce_points(m: &Manifold, mut pts: Vec<Point>) -> Vec<Point> {
    let mut j = 0;
    while j + 1 < pts.len() {
        if m.points_equal(&pts[j], &pts[j + 1]) {
            if j + 1 == pts.len() - 1 {
                pts.remove(j);
            } else {
                pts.remove(j + 1);
            }
            j = j.saturating_sub(2);
        } else if j + 2 < pts.len() && m.points_equal(&pts[j], &pts[j + 2]) {
            pts.remove(j + 1);
            j = j.saturating_sub(2);
        } else {
            j += 1;
        }
    }
    pts
}

/// A word in normal form: no duplicates and no backtracks.
#[derive(Debug, Clone)]
pub struct ReducedWord(Word);

impl ReducedWord {
    pub fn as_word(&self) -> &Word {
        &self.0
    }

    pub fn into_word(self) -> Word {
        self.0
    }
}

impl Deref for ReducedWord {
    type Target = Word;

    fn deref(&self) -> &Word {
        &self.0
    }
}

/// Whether two words represent the same class, decided by normal forms.
pub fn class_equal(u: &Word, v: &Word) -> Result<bool> {
    if !u.same_manifold(v) {
        return Err(GeoError::ManifoldMismatch);
    }
    if u.species != v.species {
        return Err(GeoError::Species {
            expected: u.species.to_string(),
            found: v.species.to_string(),
        });
    }
    let (ru, rv) = (u.reduce()?, v.reduce()?);
    Ok(ru.points_match(&rv))
}
