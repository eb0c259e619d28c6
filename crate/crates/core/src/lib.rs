//! Rack-aware Reed-Solomon codes organized by good polynomials.
//!
//! The evaluation points of an RS code are split into racks by a good
//! polynomial `h`: `h` is constant on every rack. Each rack's data then
//! reduces to a residue polynomial whose coefficients, read across racks,
//! form codewords of a much shorter RS code. Failed nodes are repaired
//! column by column with homogeneous RS repair schemes, and only the traffic
//! between racks counts as bandwidth.

pub mod cli;
pub mod error;
pub mod field;
pub mod good_poly;
pub mod poly;
pub mod rack;
pub mod repair;
pub mod rs;
pub mod scenario;
pub mod sim;

pub use error::{Error, Result};
