//! Normalized ground states of coupled mass-supercritical nonlinear
//! Schrödinger systems on radial grids.
//!
//! The system is
//!
//! ```text
//! -Δu + λ₁u = μ₁|u|^{p-2}u + βr₁|u|^{r₁-2}u|v|^{r₂}
//! -Δv + λ₂v = μ₂|v|^{q-2}v + βr₂|u|^{r₁}|v|^{r₂-2}v
//! ```
//!
//! with prescribed masses ‖u‖₂² = a, ‖v‖₂² = b, in dimension N = 1..4.
//! Ground states are minimizers of the energy `J` on the Pohozaev set.
//!
//! Modules, bottom up:
//! - [`radial`]: grid, quadrature, Laplacian, norms
//! - [`scalar`]: the scalar ground state `U_p` and everything scaled from it
//! - [`energy`]: `J`, `P`, the fiber map and its projection
//! - [`rearrange`]: Schwartz symmetrization on the grid
//! - [`beta`]: the coupling threshold as a weighted eigenvalue
//! - [`solver`]: the coupled minimization and its post-checks
//! - [`cli`]: configuration, CSV output, sweeps and verification suites
//!
//! The `examples/` directory walks through each of these.

pub mod beta;
pub mod cli;
pub mod energy;
pub mod error;
pub mod gain;
mod linalg;
pub mod radial;
pub mod rearrange;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use radial::{make_grid, RadialField, RadialGrid};
