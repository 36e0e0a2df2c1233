//! Gilbert-type motorcycle graphs and their large-scale limits.
pub mod cli;
pub mod error;
pub mod geom;
pub mod limits;
pub mod mosaic;
pub mod motorsim;
pub mod procs;
pub mod scaling;
pub mod tropical;

pub use error::{Error, Result};
