pub mod error;
pub mod exec;
pub mod geodesic_solver;
pub mod group;
pub mod invariants;
pub mod io;
pub mod manifold;
pub mod metric;
pub mod realization;
pub mod sampling;
pub mod words;

pub use error::{GeoError, Result};
pub use exec::Execution;
pub use group::GroupElement;
pub use invariants::{DeckElement, SurfaceTuple};
pub use manifold::{GeodesicPath, Manifold, ManifoldKind, Point};
pub use realization::PiecewiseLoop;
pub use words::{ReducedWord, Species, Word};
