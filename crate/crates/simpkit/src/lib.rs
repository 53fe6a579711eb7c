//! File formats, generator bindings, the rating store and annotation service,
//! and plotting for `simpkit`. The algorithms live in [`simpkit_core`].

pub mod formats;
pub mod generators;
pub mod parallel;
pub mod plot;
pub mod service;
pub mod store;

mod error;

pub use error::{Error, Result};
pub use simpkit_core as core;
