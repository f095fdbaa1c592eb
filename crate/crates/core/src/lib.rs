pub mod cli;
pub mod dilatation;
pub mod disk;
pub mod domains;
pub mod entropy;
pub mod error;
pub mod jacobian;
pub mod maps;
pub mod torus;

pub use error::{Error, Result};
