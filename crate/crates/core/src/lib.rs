//! Quantum damped harmonic oscillator described by coherent states.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod bohmian;
pub mod cli;
pub mod coherence;
pub mod error;
pub mod fock;
pub mod identical;
pub mod lindblad;
pub mod quadrature;
pub mod special;
pub mod states;
pub use error::{Error, Result};
