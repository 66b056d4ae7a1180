//! Finite q-cycle sets, set-theoretic solutions of the Yang–Baxter
//! equation, and finite skew braces.
//!
//! Conventions, fixed everywhere:
//! - points of q-cycle sets are 0-based in the API and 1-based in every
//!   file format and printed cycle;
//! - brace elements are 0-based with the identity at 0;
//! - permutations compose right to left, `(p ∘ q)(i) = p(q(i))`.

pub mod analysis;
pub mod brace;
pub mod canon;
pub mod constructions;
pub mod enumerate;
pub mod error;
pub mod io;
pub mod perm;
pub mod permbrace;
pub mod qcycle;
pub mod reproduce;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Short description of the conventions above, embedded in reports.
pub const CONVENTIONS: &str = "compose=right-to-left;points=1-based;brace-elements=0-based;table=row-major[x][y]=x.y";
