//! Synthesis and analysis of an overconstrained 4RC linkage whose coupler
//! performs a vertical Darboux motion.
//!
//! The pipeline is: build the Darboux motion polynomial
//! ([`factor::vertical_darboux`]), factor `(t² + 1)·M` into linear rotation
//! factors `P1·P2·P3·P4²` ([`factor::factorize`]), close the resulting 4R
//! chain with a cylindrical joint ([`linkage`]) and enumerate the operation
//! and assembly modes of the closed loop ([`modes`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.)` also rejects NaN

pub mod dq;
pub mod error;
pub mod ext;
pub mod factor;
pub mod files;
pub mod fit;
pub mod linkage;
pub mod modes;
pub mod poly;

pub use dq::{DualNumber, DualQuaternion, LinearAxis, PlueckerLine, ProjectivePoint, Quaternion};
pub use error::{DesignError, DqError, FactorError, FileError, ModeError, SampleSkip};
pub use ext::ExtReal;
pub use factor::{factorize, DesignParams, Factorization, FreeParams, LinkageDescription};
pub use linkage::{Assembly, ClosureResidual, JointValues};
pub use modes::{BranchLabel, ModeSolution, Realness};
pub use poly::MotionPolynomial;

/// Absolute tolerance applied after max-abs normalization.
pub const DEFAULT_TOL: f64 = 1e-9;
