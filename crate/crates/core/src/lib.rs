//! Galerkin-truncated Majda–Biello system
//!
//! ```text
//! u_t + u_xxx + v v_x = 0
//! v_t + α v_xxx + (u v)_x = 0
//! ```
//!
//! on the torus, with its resonance analysis, the Gibbs ensemble built on the
//! conserved quantities, and Monte Carlo checks that the ensemble is
//! invariant under the truncated flow.

pub mod cli;
pub mod data;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod invariance;
pub mod measure;
pub mod resonance;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
