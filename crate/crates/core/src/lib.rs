//! Evidential multi-attribute group decision making.
//!
//! Raw expert decision matrices are turned into linguistic BPAs, experts are
//! weighted by how far their ordered weighted belief distributions diverge
//! from everyone else's, and the weighted fusion is ranked against an ideal
//! alternative. The same weighting drives multi-source feature fusion in
//! [`fusion`].

pub mod calibration;
pub mod divergence;
pub mod error;
pub mod evidence;
pub mod fusion;
pub mod linguistic;
pub mod matrix;
pub mod pipeline;
pub mod recruitment;

pub use error::{Error, Result};
pub use matrix::Matrix;
