//! Numerical harmonic analysis on Damek-Ricci (harmonic `NA`) spaces.
//!
//! The crate evaluates the analytic kernels of these spaces — Jacobi/spherical
//! functions at complex spectral parameter, Poisson kernels and their complex
//! powers, the Harish-Chandra c-function and Plancherel density — together with
//! the spherical (Jacobi) transform, the spherical mean operator realized as a
//! Fourier multiplier, Lebesgue/Lorentz norms over discretized measures, and a
//! verification lab that checks restriction, Hausdorff-Young and
//! modulus-of-continuity inequalities numerically on configurable function
//! families.
//!
//! Two concrete space instances are supported: the abelian case `k = 0` (real
//! hyperbolic type, any positive even `m`) and the Heisenberg-type case
//! `(m, k) = (2, 1)`.

pub mod error;
pub mod geometry;
pub mod ineqlab;
pub mod meanop;
pub mod norms;
pub mod quad;
pub mod specfun;
pub mod transforms;

pub use error::{Error, Result};
pub use geometry::{GroupElement, NPoint, SpaceParams};
pub use specfun::{JacobiParams, SpectralPoint};
