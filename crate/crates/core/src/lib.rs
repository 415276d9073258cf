pub mod analysis;
pub mod divergences;
pub mod error;
pub mod hermitian;
pub mod testkit;

pub use error::{Error, Result};
