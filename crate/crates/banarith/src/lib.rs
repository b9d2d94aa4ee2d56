//! banarith: exact-rational computation in Banach-ring settings.
//!
//! The crate computes, at finite truncation with exact rational
//! arithmetic and explicit tail bounds, in the following settings:
//!
//! * normed scalar rings and scaled modules ([`scalars`], [`norm`]);
//! * weighted `l1`/`l-infinity` sequence spaces, their duals, tensor and
//!   symmetric powers, dominating weights and interchange maps
//!   ([`spaces`]);
//! * polydisk algebras with truncated series arithmetic, the
//!   sigma/delta/shift splitting and pairing estimates ([`disks`]);
//! * the `(x - p)` presentation of scaled p-adic rings ([`padic`]);
//! * nuclear-morphism certificates and their decompositions ([`nuclear`]);
//! * Roos, tower and Cech complexes with exact cohomology over `Q`
//!   ([`homology`]).
//!
//! No floating point enters any norm, bound or certificate.

pub mod error;
pub mod rat;

pub mod norm;
pub mod scalars;
pub mod spaces;

pub mod disks;
pub mod padic;

pub mod qmat;

pub mod nuclear;

pub mod homology;

pub mod acceptance;
pub mod cli;

pub use error::Error;
pub use norm::NormValue;
pub use rat::Rat;
pub use scalars::{BaseRing, Scalar};
