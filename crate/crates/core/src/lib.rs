//! Local and global solubility of Chatelet surfaces
//! `Y^2 + Z^2 = (a T^2 + b)(c T^2 + d)` over the rationals.

pub mod arith;
pub mod census;
pub mod cli;
pub mod constants;
pub mod descent;
pub mod error;
pub mod localsolve;
pub mod model;
pub mod twoadic;

pub use error::{Error, Result};
