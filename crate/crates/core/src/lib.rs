//! Exact computations for discrete holonomy fields over finite groups.

pub mod covering;
pub mod error;
pub mod group;
pub mod holonomy;
pub mod levy;
pub mod loops;
pub mod surface;

pub use error::{Error, Result};
