//! Fermionic Gaussian (free-fermionic) states on `n` modes.
//!
//! A Gaussian state is fully described by its `2n × 2n` real antisymmetric
//! correlation matrix `Γ_{jk} = -(i/2) Tr([γ_j, γ_k] ρ)`. This crate works with
//! those matrices directly ([`skewlin`], [`gaussian`]), simulates measurements on
//! them ([`sampler`]), runs the testing and tomography protocols built on top
//! ([`algorithms`]), and checks everything against brute-force Jordan–Wigner
//! density matrices ([`dense`]). [`experiment`] is the seeded batch runner behind
//! the `gaussfermi` binary.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod algorithms;
pub mod dense;
pub mod error;
pub mod experiment;
pub mod gaussian;
pub mod random;
pub mod sampler;
pub mod skewlin;

pub use error::{Error, Result};
pub use gaussian::GaussianState;
pub use skewlin::{NormalForm, Schatten, SkewMatrix};
