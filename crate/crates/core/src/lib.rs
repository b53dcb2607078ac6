pub mod cli;
pub mod error;
pub mod exactalg;
pub mod gitdata;
pub mod localization;
pub mod wallcrossing;
pub mod windows;

pub use error::{Error, Result};
