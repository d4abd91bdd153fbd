pub mod app;
pub mod error;
pub mod eval;
pub mod io;
pub mod model;
pub mod solvers;
pub mod spectral;
pub mod train;

pub use error::{Result, SinoError};
