//! Geometric volume oracles, independent of the signature routes.
//!
//! * [`gale`]: Gale-evenness triangulations of cyclic polytopes.
//! * [`hull`]: exact convex hulls in the plane and in space.
//! * [`montecarlo`]: hit-or-miss volume estimates with LP membership.

pub mod gale;
pub mod hull;
pub mod montecarlo;

pub use gale::{
    cyclic_hull_volume, gale_facets, gale_index_set, pulling_cone_volume, simplex_volume_signed,
    GaleTriangulation,
};
pub use hull::{convex_hull, hull_volume_exact, ConvexHull, Facet, HullVolume};
pub use montecarlo::{hull_volume_montecarlo, in_convex_hull, MonteCarloEstimate};
