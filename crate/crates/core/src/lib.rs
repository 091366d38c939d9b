//! Exact arithmetic for the mass stratification and automorphism groups of
//! principally polarised supersingular abelian threefolds, with brute-force
//! oracles for every closed-form count at small primes.

// Index loops read more naturally than iterator chains in the matrix code.
#![allow(clippy::needless_range_loop)]

pub mod fermat_curve;
pub mod field_tower;
pub mod group_oracle;
pub mod intersection_atlas;
pub mod linalg_ff;
pub mod mass_formulas;
pub mod nt;
pub mod strata;

/// Crate version, used to key on-disk caches.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
