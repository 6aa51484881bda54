#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod acceptance;
pub mod burgers;
pub mod cli;
pub mod congruence;
pub mod error;
mod linalg;
pub mod klein;
pub mod projlin;

pub use error::{Error, LeafKind, Result};
