//! Quaternionic calculus on the round three-sphere and the nearly Kähler
//! geometry of S³ × S³.
//!
//! The crate relates three descriptions of the same objects:
//! generalized Killing spinors on S³ (given by a gauge function
//! `f: S³ → ℍ`), oriented orthonormal frames of divergence-free vector
//! fields, and Lagrangian graphs in S³ × S³. Every statement is checked
//! numerically on seeded samples, with closed-form differentials where
//! available and central differences otherwise.
//!
//! Modules, bottom-up:
//! * [`quat`]: quaternions, unit quaternions, Im ℍ;
//! * [`sampling`]: reproducible uniform points on S³ and Monte Carlo means;
//! * [`s3calc`]: covariant derivatives, divergence, `d`, Hodge star, flows;
//! * [`spinor`]: Clifford action, the endomorphism `A`, `ξ_a` fields,
//!   the `(V, α)` system and frame reconstruction;
//! * [`nkgeom`]: metric, `J`, `Ω`, Lagrangian families, induced geometry;
//! * [`acceptance`]: the end-to-end checks shared by the test suite and the CLI.

pub mod acceptance;
pub mod error;
pub mod nkgeom;
pub mod quat;
pub mod s3calc;
pub mod sampling;
pub mod spinor;

pub use error::{Error, Result};
pub use quat::{ImQuat, Quat, UnitQuat};
pub use s3calc::DerivMode;
pub use sampling::{uniform_s3, MCEstimate, SampleSet};
