//! Lattice sequential decoding of LAST-coded MIMO channels.
//!
//! The pipeline is: build a nested lattice code ([`lattice`]), draw a
//! channel ([`channel`]), reduce the received vector to an upper-triangular
//! integer least-squares problem ([`frontend`]) and search the tree with a
//! biased Stack or Fano decoder ([`decoders`]). [`complexity`] holds the
//! closed-form bounds and [`harness`] the Monte Carlo sweeps.

pub mod error;
pub mod linalg;
pub mod lattice;
pub mod channel;
pub mod frontend;
pub mod decoders;
pub mod complexity;
pub mod harness;

pub use error::{Error, Result};
