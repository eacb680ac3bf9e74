//! File formats, corpus loading, reports and the HTTP service built on
//! [`gesturekit_core`].

pub mod config;
pub mod corpus;
mod error;
pub mod format;
pub mod report;
pub mod service;
pub mod store;

pub use config::Config;
pub use error::{Error, Result};
