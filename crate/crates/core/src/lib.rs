//! Numerical toolkit for large deviations of nets of sub-probability
//! measures on the real line.
//!
//! The crate computes scaled free energies `t·log ∫ e^{h/t} dμ` along a net,
//! grid-based Legendre-Fenchel transforms, abstract conjugates over families
//! of tilt functions, and window estimates of the local rate functions
//! `l₀`/`l₁`. On top of these it checks the derivative-range conditions under
//! which a vague or narrow large deviation principle holds.
//!
//! Nets are realized as sequences `k ↦ (μ_k, t_k)` with `t_k ↓ 0`; limits are
//! estimated over a [`WindowSpec`](free_energy::WindowSpec) of indices.

pub mod abstract_conjugate;
pub mod convex;
pub mod error;
pub mod extreal;
pub mod free_energy;
pub mod ldp;
pub mod measure;
pub mod net;
pub mod tilt;

pub use error::{Error, Result};
pub use extreal::ExtReal;
