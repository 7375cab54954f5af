//! File formats, reports, benchmarking and self-checks around
//! [`dcfac_core`]. The `dcfac` binary is a thin command-line layer over
//! this crate.

pub mod bench;
pub mod clock;
pub mod formats;
pub mod report;
pub mod verify;

pub use clock::StdClock;
