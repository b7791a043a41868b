pub mod catalog;
pub mod convolution;
pub mod csvio;
pub mod error;
pub mod function;
pub mod homogeneous;
pub mod hartley;
pub mod mellin;
pub mod quadrature;
pub mod report;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
