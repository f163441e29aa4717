//! Orbits of SL(2,ℤ) and its principal congruence subgroups in hyperbolic
//! balls, together with the angular statistics of those orbits.
//!
//! The crate is organised bottom-up:
//!
//! - [`halfplane`]: points of the upper half-plane, Möbius action, distances,
//!   geodesic polar coordinates and the normalized angle convention.
//! - [`lattice`]: group descriptors and exact enumeration of all group
//!   elements moving a base point into a ball, plus a brute-force oracle.
//! - [`angular`]: sector counts, exponential sums, discrepancy and the
//!   truncated `G_n` series over an enumerated orbit.
//! - [`density`]: the limiting angular densities, sector-boundary distances
//!   and the per-bin comparison reports built on top of the enumerator.

pub mod angular;
pub mod density;
mod error;
pub mod format;
pub mod halfplane;
pub mod lattice;
pub mod parallel;
pub mod quadrature;

pub use error::{Error, Result};
pub use halfplane::{GeodesicPolar, NormalizedAngle, Point};
pub use lattice::{BallQuery, GroupElement, GroupKind, GroupSpec, Orbit, OrbitRecord};
