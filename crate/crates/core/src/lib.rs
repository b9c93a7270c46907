//! Exact computation of the integral Batalin-Vilkovisky structure on the
//! loop homology `H_*(LM; Z)` of the quaternionic projective spaces `HP^n`
//! and the octonionic projective plane `OP^2`.
//!
//! The crate is organized around the computations that pin the structure
//! down:
//!
//! * [`graded_ring`]: the loop product as a presented graded-commutative ring;
//! * [`loop_models`]: the based-loop Pontryagin rings, recovered from the
//!   divided-power Hopf algebra `H^*(ΩM)` by duality;
//! * [`spectral_sequence`]: the loop-homology spectral sequence, the Gysin
//!   sequence of the unit tangent bundle and the additive cross-check;
//! * [`bv_structure`]: the operator `Δ`, its bracket, and the derivation of
//!   `Δ` from the seven-term identity;
//! * [`linalg`]: Smith normal form and friends;
//! * [`verify`]: the verification suites the CLI drives.

pub mod bv_structure;
pub mod graded_ring;
pub mod linalg;
pub mod loop_models;
pub mod report;
pub mod space;
pub mod spectral_sequence;
pub mod verify;

pub use graded_ring::{build_presentation, Element, GradedPresentation, Monomial, Ring};
pub use linalg::{AbelianGroup, IntegerMatrix};
pub use report::VerificationReport;
pub use space::SpaceSpec;
