//! The Galerkin-truncated flow, its conserved quantities and Liouville check.

mod config;
mod flow;
mod monitor;

pub use config::{Method, SimConfig, RK4_IMAGINARY_LIMIT};
pub use flow::{evolve, rhs, rhs_with, step, Integrator};
pub use monitor::{
    conserved, conserved_at, divergence_finite_difference, drift, integrate, vector_field_divergence,
    ConservedSnapshot, Drift, Record, Trajectory,
};
