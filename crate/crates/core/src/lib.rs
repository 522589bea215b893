//! Finite-model verification engine for support projections on tree buildings,
//! equivariant resolutions built from them, and the equivariant splittings they
//! produce.
//!
//! The layers, bottom up:
//!
//! * [`linalg`]: exact matrices and canonical subspaces over ℚ and 𝔽_ℓ.
//! * [`complex`]: finite cell complexes, regular tree balls, tree convexity.
//! * [`group`]: finite groups, cell actions, linear representations, level
//!   families and averaging idempotents.
//! * [`idempotents`]: vertex and cell idempotent systems and support projections.
//! * [`resolution`]: the block spaces `F^n` with their maps `α^n`, `π^n`.
//! * [`splitting`]: equivariant sections and retractions for split extensions.

pub mod complex;
pub mod error;
pub mod group;
pub mod hashing;
pub mod idempotents;
pub mod linalg;
pub mod resolution;
pub mod splitting;

pub use error::{Error, Result};
