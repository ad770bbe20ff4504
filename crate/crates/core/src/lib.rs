//! Operator-algebraic renormalization of the 2D Ising model and the
//! transverse-field Ising chain.
//!
//! The crate is organised bottom-up:
//!
//! * [`wavelet`]: Daubechies filters, `m0(θ)` and `ŝ(k)`.
//! * [`kernels`]: momentum-space one-particle Hamiltonians and covariances.
//! * [`quadrature`]: composite Gauss–Legendre integration over spectral grids.
//! * [`rgflow`]: renormalized two-point functions and their scaling limits.
//! * [`correlators`]: self-dual field two-point values, Pfaffians, Toeplitz
//!   determinants and spin-spin correlators.
//! * [`lattice_oracle`]: dense small-lattice ground truth.
//! * [`errorbounds`]: the `2^{-m}` approximation bound and its ingredients.

pub mod correlators;
pub mod error;
pub mod errorbounds;
pub mod kernels;
pub mod lattice_oracle;
pub mod quadrature;
pub mod rgflow;
pub mod wavelet;

pub use error::{OarError, Result};

/// Crate version embedded in every exported record.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
