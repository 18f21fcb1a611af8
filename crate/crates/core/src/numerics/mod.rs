//! Special functions, quadrature, eigensolvers, FFT, ODE integration and seeded randomness.

pub mod bessel;
pub mod eigen;
pub mod fft;
pub mod ode;
pub mod quad;
pub mod rng;

pub use bessel::{bessel_j, bessel_zero, j012};
pub use eigen::{hermitian_eigen, hermitian_eigenvalues, HermitianEigen};
pub use fft::{fft_forward, fft_inverse};
pub use quad::{
    integrate_adaptive, integrate_hankel_between, integrate_hankel_damped, integrate_partitioned, Estimate,
    QuadratureSpec,
};
pub use rng::{uniform_points, SeededStream};
