//! Numerical analysis of distribution tails on `[0, ∞)`: exact piecewise
//! tails, the exponential tilt `Ḡ(x) = F̄(x) e^{-γx}`, convolution tails with
//! certified brackets, and ratio diagnostics for the heavy-tail classes.
//!
//! Every class verdict produced here is numerical evidence, not proof.

pub mod convolve;
pub mod dist;
pub mod error;
pub mod functionals;
pub mod logmath;
pub mod montecarlo;
pub mod quad;
pub mod spec;
pub mod transform;

pub use dist::{builtin, BuiltinSpec, Distribution};
pub use error::{Error, Result};
pub use quad::QuadConfig;
