//! One-way LOCC distinguishability for bipartite states of the form
//! `(I ⊗ M_i)|Φ⟩`, where `|Φ⟩` is the maximally entangled state on `C^d ⊗ C^d`.
//!
//! A family `{M_i}` of `d×d` matrices is perfectly distinguishable by one-way
//! LOCC exactly when there is a `d×r` co-isometry `W` (`WW* = I_d`) such that
//! every diagonal entry of `W* M_j* M_i W` vanishes for `i ≠ j`. This crate
//! verifies such certificates, builds them for the structured families where
//! they are known to exist (permutations, simultaneous Schmidt decompositions,
//! pairs of states), searches for them numerically otherwise, analyses the
//! operator systems spanned by the products `M_j* M_i`, checks the Hilbert
//! module bounds on orthogonal families, and turns certificates into
//! executable measurement protocols.
//!
//! Modules:
//!
//! - [`matrix`]: dense complex matrix primitives and fixed special matrices.
//! - [`json`]: the JSON encodings shared by every file format.
//! - [`certs`]: certificate verification and structured constructions.
//! - [`opsys`]: operator systems, separating vectors, algebra detection.
//! - [`hmod`]: module inner products and orthogonality bounds.
//! - [`search`]: Riemannian feasibility search over co-isometries.
//! - [`simproto`]: protocol construction, Born-rule evaluation, Monte Carlo.
//! - [`analysis`]: family generators and the end-to-end analysis pipeline.

pub mod analysis;
pub mod certs;
pub mod error;
pub mod hmod;
pub mod json;
pub mod matrix;
pub mod opsys;
pub mod random;
pub mod search;
pub mod simproto;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, StateVector, Tolerance, C64};
