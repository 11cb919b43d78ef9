//! Keller packings of boxes and unit-cube tilings of discrete tori.
//!
//! The crate models systems of d-boxes built from pairwise independent
//! partitions, Keller families of boxes and their c-statistic, the recursive
//! multipile structure, the hat embedding, and exact cube tilings of the
//! torus `T^d_m` at a fixed offset resolution. An exhaustive, symmetry-reduced
//! enumerator produces censuses of tilings against which the inequality
//! `c(G) <= |G| - 1`, its equality case and the tiling bound
//! `sum_i |p_i(T)| <= (n^d - 1)/(n - 1)` are checked.
//!
//! Module map:
//!
//! - [`partition`]: ground sets, partitions, joins, partition systems.
//! - [`keller`]: boxes, Keller families, restriction, cylinders, the
//!   hidden/exposed classification, `c`-statistics and pile rewrites.
//! - [`multipile`]: recognition and construction of multipiles.
//! - [`hat`]: the hat embedding with exact rational measures.
//! - [`torus`]: cube tilings of `T^d_m`, the parameters `p_i(T)` and the
//!   bridge to the arc system.
//! - [`enumeration`]: exhaustive tiling search, canonical forms, censuses.
//! - [`random`]: seeded generators for property sweeps.
//! - [`verify`]: the acceptance criteria as runnable checks.

pub mod enumeration;
pub mod error;
pub mod hat;
pub mod keller;
pub mod multipile;
pub mod partition;
pub mod random;
pub mod torus;
pub mod verify;

pub use enumeration::{census, enumerate_tilings, CensusRow, SearchOptions, Symmetry};
pub use error::{Error, Result};
pub use hat::{HatBox, HatFactor};
pub use keller::{BoxFamily, CStats, DBox, Factor, PartitionStatus, PointSet};
pub use multipile::MultipileTree;
pub use partition::{arc_system, binary_system, BlockRef, Partition, PartitionSystem};
pub use torus::{TorusSpec, TorusTiling};

/// Library version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
