//! Complex projective billiards: reflection in CP², periodic orbits,
//! numerical reflectivity probing and real invisible bodies.

// `!(a < b)` is used on purpose so that NaN fails the test
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundle;
pub mod commands;
pub mod config;
pub mod elim;
pub mod error;
pub mod invisibility;
pub mod mirrors;
pub mod orbits;
pub mod poly;
pub mod projective;
pub mod reflection;
pub mod reflectivity;
pub mod svg;
pub mod tol;

pub type C64 = num_complex::Complex64;

pub use error::{Error, Result};
