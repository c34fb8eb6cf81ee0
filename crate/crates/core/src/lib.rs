//! Relational depth of ideals of the partial, full and symmetric-inverse
//! transformation monoids, computed from restrictions of Cayley-table
//! presentations, with checkable rewriting certificates.

pub mod depth;
pub mod derivation;
pub mod error;
pub mod green;
pub mod presentation;
pub mod transform;

pub use error::{Error, Result};
pub use transform::{Family, PartialMap};
