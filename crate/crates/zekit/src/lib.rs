//! Companion crate to `zekit-core`: JSON file formats, a worker pool for the
//! multi-start searches, the end-to-end reproduction runs and the `zekit` binary.

mod error;
pub mod formats;
pub mod pool;
pub mod runs;

pub use error::{Error, Result};
pub use pool::WorkerPool;
