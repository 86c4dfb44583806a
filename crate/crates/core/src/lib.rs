//! Exact computation and verification for generalized van der Waerden
//! triple numbers N(a,b;r).
//!
//! N(a,b;r) is the least n, if it exists, such that every r-coloring of
//! [1,n] contains a monochromatic (a,b)-triple {x, ax+d, bx+2d}. This crate
//! computes exact values by exhaustive symmetry-broken backtracking,
//! verifies avoidance colorings and forcing-argument proofs mechanically,
//! and evaluates the known closed-form bounds. Everything conclusive is
//! backed by a self-contained, re-verifiable certificate.

pub mod bounds;
pub mod checker;
pub mod constructions;
pub mod error;
pub mod forcing;
pub mod search;
pub mod triples;

pub use checker::{Certificate, CertKind, Coloring, Verdict};
pub use error::{Error, Result};
pub use search::{SearchConfig, SearchOutcome, SearchStats};
pub use triples::{ABParams, Progression, Triple};
