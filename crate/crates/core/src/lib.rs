//! Example-driven synthesis of generalized cell transformations.
//!
//! Given example `(source, target)` cell pairs, this crate enumerates string
//! transformations built from four units (`literal`, `substr`, `split`,
//! `splitSubstr`), generalizes them with relative indices, repetition and
//! removal, picks a small covering set of transformations, and uses the
//! selected transformations to join two columns that are not equi-joinable.
//!
//! ```
//! use celljoin_core::dsl::Transformation;
//!
//! let t: Transformation = "<substr(s, s+1)^?, split(' ', e), literal('@u.ca')>".parse().unwrap();
//! let out = t.apply("mary jane watson");
//! assert!(out.contains("mwatson@u.ca"));
//! assert!(out.contains("watson@u.ca"));
//! ```
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the benchmark
//! runner and the command line live in the `celljoin` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dsl;
mod error;
pub mod generalize;
pub mod join;
pub mod pipeline;
mod pool;
mod rowset;
pub mod select;
pub mod synthesis;

pub use error::Error;
pub use pipeline::{Mode, PipelineConfig};
pub use pool::Pool;
pub use synthesis::ExamplePair;

/// Shorthand for results carrying the crate-level [`Error`].
pub type Result<T> = core::result::Result<T, Error>;
