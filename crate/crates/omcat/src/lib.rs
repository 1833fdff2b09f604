//! Finite truncated strict ω-categories as explicit tables, together with the
//! machinery that makes them useful at desk scale: coinductive equivalence
//! cells, the fibration zoo (equifibrations, weak equivalences, trivial
//! fibrations), polygraph presentations of walking equivalences, a lifting
//! solver, cylinders, and quotient categories.
//!
//! Everything here is exact symbolic computation over finite data. A category
//! is *d-truncated*: cells above dimension `d` are formal iterated identities
//! and are never stored, which keeps every fixed point, enumeration, and
//! search finite.

pub mod cli;
pub mod coind;
pub mod corpus;
pub mod cyl;
pub mod error;
pub mod fib;
pub mod gset;
pub mod lift;
pub mod poly;
pub mod quot;
pub mod report;
pub mod scat;

pub use error::Error;
pub use report::{Counterexample, ValidationReport, Verdict, Violation};

/// Default step budget for exhaustive enumerations (maps, functors, models).
pub const DEFAULT_BUDGET: u64 = 20_000_000;
