//! Codebooks of maximally separated unit vectors on the hypersphere.
//!
//! Binary and q-ary linear block codes (repetition, Reed–Muller, BCH,
//! Reed–Solomon) are mapped onto the sphere, closed-form constructions
//! (one-hot, regular simplex) and random baselines are provided, and a
//! projected-gradient optimizer minimizes smooth relaxations of the maximum
//! pairwise cosine similarity. The `bounds` module certifies separation with
//! the Gilbert–Varshamov achievable bound, the Rankin converse, and the
//! Singleton bound.

pub mod block_codes;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod gf2m;
pub mod optimize;
pub mod sphere_map;

pub use block_codes::{CodeFamily, DistanceSpectrum, LinearCode};
pub use bounds::BoundsReport;
pub use error::{Error, Result};
pub use gf2m::{FieldElement, FieldTable, Poly2};
pub use optimize::{LossKind, OptimizerConfig, OptimizerTrace};
pub use sphere_map::{Codebook, Scheme, SeparationStats};
