//! Finite congruence subgroups of GL₂/GL₃ over residue rings ℤ/pᵏ, with the
//! character theory needed to verify induction/restriction decompositions,
//! Mackey intertwining dimensions, Clifford orbit structure, cuspidal counts
//! for GL₂(F_q), and stratum/cover arithmetic by exhaustive computation at
//! small p.
//!
//! The crate is organized as a substrate (`residue`, `unity`, `fq`), a group
//! engine (`group`, `projective`, `congruence`), a character laboratory
//! (`character`, `clifford`, `gl2`, `strata`), and a check registry
//! (`checks`, `report`, `suite`) that the `verify` CLI drives.
//!
//! Hot loops (closure enumeration, character sums, orbit expansion) are
//! data-parallel via rayon when the default `parallel` feature is enabled;
//! building with `--no-default-features` gives a sequential core.

pub mod character;
pub mod checks;
pub mod clifford;
pub mod congruence;
pub mod fq;
pub mod gl2;
pub mod group;
mod par;
pub mod projective;
pub mod report;
pub mod residue;
pub mod strata;
pub mod suite;
pub mod unity;

pub use par::configure_workers;
pub use residue::{ResidueMatrix, ResidueRing};
