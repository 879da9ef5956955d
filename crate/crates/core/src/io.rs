//! JSON interchange formats for manifolds, words and surface tuples.
//!
//! Numbers are written by `serde_json` in shortest round-trip form, so
//! parsing and re-serializing a document reproduces it byte for byte.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::group::GroupElement;
use crate::invariants::SurfaceTuple;
use crate::manifold::{Manifold, ManifoldKind, Point, DEFAULT_EPS_EQ};
use crate::metric::builtin_metric;
use crate::words::{Species, Word};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ManifoldSpec {
    Euclidean {
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none", alias = "eq_tolerance")]
        eps_eq: Option<f64>,
    },
    Sphere {
        dim: usize,
        #[serde(default = "unit_radius")]
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none", alias = "eq_tolerance")]
        eps_eq: Option<f64>,
    },
    FlatTorus {
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none", alias = "eq_tolerance")]
        eps_eq: Option<f64>,
    },
    #[serde(alias = "hyperbolic_plane")]
    HyperbolicDisk {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none", alias = "eq_tolerance")]
        eps_eq: Option<f64>,
    },
    ProjectivePlane {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none", alias = "eq_tolerance")]
        eps_eq: Option<f64>,
    },
    Chart {
        dim: usize,
        metric: String,
        rho_u: f64,
        #[serde(default, skip_serializing_if = "Option::is_none", alias = "eq_tolerance")]
        eps_eq: Option<f64>,
    },
}

fn unit_radius() -> f64 {
    1.0
}

impl ManifoldSpec {
    fn eps_eq(&self) -> Option<f64> {
        match self {
            ManifoldSpec::Euclidean { eps_eq, .. }
            | ManifoldSpec::Sphere { eps_eq, .. }
            | ManifoldSpec::FlatTorus { eps_eq, .. }
            | ManifoldSpec::HyperbolicDisk { eps_eq, .. }
            | ManifoldSpec::ProjectivePlane { eps_eq, .. }
            | ManifoldSpec::Chart { eps_eq, .. } => *eps_eq,
        }
    }

    /// Build the manifold; `eps_override` takes precedence over the spec's tolerance.
    pub fn build(&self, eps_override: Option<f64>) -> Result<Manifold> {
        let fixed_dim = |d: Option<usize>, name: &str| match d {
            None | Some(2) => Ok(()),
            Some(d) => Err(GeoError::Representation(format!("{name} has dimension 2, not {d}"))),
        };
        let m = match self {
            ManifoldSpec::Euclidean { dim, .. } => Manifold::euclidean(*dim)?,
            ManifoldSpec::Sphere { dim, radius, .. } => Manifold::sphere(*dim, *radius)?,
            ManifoldSpec::FlatTorus { dim, .. } => Manifold::flat_torus(*dim)?,
            ManifoldSpec::HyperbolicDisk { dim, .. } => {
                fixed_dim(*dim, "hyperbolic_disk")?;
                Manifold::hyperbolic_disk()
            }
            ManifoldSpec::ProjectivePlane { dim, .. } => {
                fixed_dim(*dim, "projective_plane")?;
                Manifold::projective_plane()
            }
            ManifoldSpec::Chart { dim, metric, rho_u, .. } => Manifold::chart(builtin_metric(metric, *dim)?, *rho_u)?,
        };
        m.with_eps_eq(eps_override.or(self.eps_eq()).unwrap_or(DEFAULT_EPS_EQ))
    }

    /// Spec of an existing manifold. Chart metrics are referenced by name.
    pub fn from_manifold(m: &Manifold) -> Self {
        let eps_eq = (m.eps_eq() != DEFAULT_EPS_EQ).then_some(m.eps_eq());
        match m.kind() {
            ManifoldKind::Euclidean { dim } => ManifoldSpec::Euclidean { dim: *dim, eps_eq },
            ManifoldKind::Sphere { dim, radius } => ManifoldSpec::Sphere {
                dim: *dim,
                radius: *radius,
                eps_eq,
            },
            ManifoldKind::FlatTorus { dim } => ManifoldSpec::FlatTorus { dim: *dim, eps_eq },
            ManifoldKind::HyperbolicDisk => ManifoldSpec::HyperbolicDisk { dim: None, eps_eq },
            ManifoldKind::ProjectivePlane => ManifoldSpec::ProjectivePlane { dim: None, eps_eq },
            ManifoldKind::Chart(c) => ManifoldSpec::Chart {
                dim: c.metric.dim(),
                metric: c.metric.name().to_string(),
                rho_u: c.rho_u,
                eps_eq,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordJson {
    pub species: Species,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<Point>,
    /// Listed `x_k` first.
    pub points: Vec<Point>,
}

impl WordJson {
    pub fn from_word(w: &Word) -> Self {
        WordJson {
            species: w.species(),
            basepoint: w.basepoint().cloned(),
            points: w.points().to_vec(),
        }
    }

    pub fn into_word(self, m: &Arc<Manifold>) -> Result<Word> {
        Word::new(m.clone(), self.species, self.basepoint, self.points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<usize>,
    pub elements: Vec<WordJson>,
}

impl TupleJson {
    pub fn from_tuple(s: &SurfaceTuple) -> Self {
        TupleJson {
            genus: Some(s.genus()),
            elements: s.elements().iter().map(|g| WordJson::from_word(g.word())).collect(),
        }
    }

    pub fn into_tuple(self, m: &Arc<Manifold>) -> Result<SurfaceTuple> {
        if let Some(g) = self.genus {
            if self.elements.len() != 2 * g {
                return Err(GeoError::Precondition(format!(
                    "genus {g} needs {} elements, found {}",
                    2 * g,
                    self.elements.len()
                )));
            }
        }
        let elements = self
            .elements
            .into_iter()
            .map(|w| GroupElement::new(&w.into_word(m)?))
            .collect::<Result<Vec<_>>>()?;
        SurfaceTuple::new(elements)
    }
}

pub fn parse_manifold(s: &str) -> Result<ManifoldSpec> {
    serde_json::from_str(s).map_err(|e| GeoError::Representation(format!("manifold JSON: {e}")))
}

pub fn parse_word(s: &str) -> Result<WordJson> {
    serde_json::from_str(s).map_err(|e| GeoError::Representation(format!("word JSON: {e}")))
}

pub fn parse_tuple(s: &str) -> Result<TupleJson> {
    serde_json::from_str(s).map_err(|e| GeoError::Representation(format!("tuple JSON: {e}")))
}

pub fn parse_point(s: &str) -> Result<Point> {
    serde_json::from_str(s).map_err(|e| GeoError::Representation(format!("point JSON: {e}")))
}

pub fn word_to_json(w: &Word) -> String {
    serde_json::to_string(&WordJson::from_word(w)).expect("word JSON is always serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifold_specs_parse() {
        for (text, name) in [
            (r#"{"kind":"sphere","dim":2,"radius":1.0}"#, "sphere"),
            (r#"{"kind":"flat_torus","dim":2}"#, "flat_torus"),
            (r#"{"kind":"hyperbolic_disk"}"#, "hyperbolic_disk"),
            (r#"{"kind":"projective_plane"}"#, "projective_plane"),
            (
                r#"{"kind":"chart","dim":2,"metric":"polar_sphere","rho_u":0.5}"#,
                "chart",
            ),
            (r#"{"kind":"euclidean","dim":3,"eps_eq":1e-7}"#, "euclidean"),
        ] {
            let m = parse_manifold(text).unwrap().build(None).unwrap();
            assert_eq!(m.kind_name(), name);
        }
    }

    #[test]
    fn tolerance_override_wins() {
        let spec = parse_manifold(r#"{"kind":"euclidean","dim":3,"eps_eq":1e-7}"#).unwrap();
        assert_eq!(spec.build(None).unwrap().eps_eq(), 1e-7);
        assert_eq!(spec.build(Some(1e-3)).unwrap().eps_eq(), 1e-3);
    }

    #[test]
    fn bad_specs_are_rejected() {
        assert!(parse_manifold(r#"{"kind":"klein_bottle"}"#).is_err());
        assert!(parse_manifold(r#"{"kind":"hyperbolic_disk","dim":3}"#)
            .unwrap()
            .build(None)
            .is_err());
        assert!(
            parse_manifold(r#"{"kind":"chart","dim":2,"metric":"nope","rho_u":0.5}"#)
                .unwrap()
                .build(None)
                .is_err()
        );
    }

    #[test]
    fn spec_round_trip() {
        let spec = parse_manifold(r#"{"kind":"chart","dim":2,"metric":"poincare_disk","rho_u":0.75}"#).unwrap();
        let m = spec.build(None).unwrap();
        assert_eq!(ManifoldSpec::from_manifold(&m), spec);
    }

    #[test]
    fn word_round_trip_is_byte_identical() {
        let m = Arc::new(Manifold::sphere(2, 1.0).unwrap());
        let a = m.normalize(vec![0.1, 0.7, 0.3]).unwrap();
        let v0 = m.default_basepoint();
        let w = Word::new(m.clone(), Species::G, Some(v0.clone()), vec![v0.clone(), a, v0]).unwrap();
        let text = word_to_json(&w);
        let again = word_to_json(&parse_word(&text).unwrap().into_word(&m).unwrap());
        assert_eq!(text, again);
    }

    #[test]
    fn word_json_layout() {
        let w = parse_word(r#"{"species":"Z","points":[[1.0,2.0],[0.5,0.0]]}"#).unwrap();
        assert_eq!(w.species, Species::Z);
        assert!(w.basepoint.is_none());
        assert_eq!(w.points[0].coords(), &[1.0, 2.0]);
    }
}
