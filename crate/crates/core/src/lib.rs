//! Spectral-domain toolkit for the whole-space static Schrödinger equation
//!
//! ```text
//!     -Δu + (α + W) u = f     in ℝ^d
//! ```
//!
//! Functions are carried by their Fourier transforms, normalised so that
//! `g(x) = ∫ ĝ(ξ) e^{i x·ξ} dξ`. Two representations exist: finite Hermitian
//! sets of Dirac atoms (trigonometric sums, any dimension) and uniform
//! frequency grids holding a density (d ≤ 3).
//!
//! The crate is organised as
//!
//! - [`spectrum`]: representations, evaluation and the spectral Barron norm,
//! - [`calculus`]: resolvent `(α-Δ)^{-1}`, products as convolutions and the
//!   operator `T(u) = (α-Δ)^{-1}(W u)`,
//! - [`solver`]: Neumann-series and truncated direct solvers for
//!   `u + T(u) = (α-Δ)^{-1} f`, residuals and the regularity certificate,
//! - [`network`]: Monte Carlo extraction of a two-layer cosine network from a
//!   spectrum, H¹ error measurement and rate studies,
//! - [`manufactured`]: manufactured-solution problems with known answers,
//! - [`format`]: JSON documents and CSV tables consumed by the CLI,
//! - [`verify`]: the property suites behind `barron verify`.

pub mod calculus;
pub mod error;
pub mod format;
pub mod manufactured;
pub mod network;
pub mod solver;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
