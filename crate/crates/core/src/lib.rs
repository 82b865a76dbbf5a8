//! Free multiplicative convolution of a probability measure with the free
//! multiplicative normal laws: `μ ⊠ λ_t` on the unit circle and `ν ⊠ σ_t` on
//! the positive half-line.
//!
//! The engines trace the boundary of the subordination domain (`v_t(θ)` on
//! the circle, `u_t(r)` on the half-line), push it forward through the
//! boundary homeomorphism and read off density and support. Closed forms for
//! `λ_t` and `σ_t` and a power-series moment oracle serve as independent
//! checks.

pub mod circle;
pub mod closed_forms;
mod config;
pub mod edge;
mod error;
pub mod halfline;
pub mod measure;
pub mod quadrature;
pub mod roots;
pub mod selftest;
pub mod series;
mod sweep;

pub use config::SolverConfig;
pub use error::{Error, Result};
pub use measure::{AcPart, Atom, CircleMeasure, HalfLineMeasure, Measure, ValidationReport};
