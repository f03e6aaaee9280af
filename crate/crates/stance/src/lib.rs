//! File formats, model bundles, the experiment runner and the `stance`
//! command line around [`stance_core`].

pub mod bundle;
pub mod error;
pub mod evaluate;
pub mod experiment;
pub mod io;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};
