//! Exact local analysis of integral quadratic forms over the p-adic integers.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod global;
pub mod lattice;
pub mod local;
pub mod padic;
mod serde_util;
pub mod verify;

pub use error::{Error, Result};
pub use global::{GlobalReport, GlobalVerdict, ScanReport, TriState};
pub use lattice::{FormMatrix, JordanSplitting};
pub use local::{RepVerdict, UniversalityReport, Verdict};
pub use padic::SquareClass;
