//! Lattice scalar `phi^4` theory: Jacobi elliptic backgrounds, the lattice
//! equation of motion and its source derivatives, the Gaussian truncation of
//! the Dyson-Schwinger hierarchy on constant and sn-wave backgrounds, and a
//! Metropolis sampler to check them against.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`). The
//! aliases below fix the scalar type.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod classical;
pub mod dse_constant;
pub mod elliptic;
pub mod error;
pub mod lame_bloch;
pub mod lattice;
pub mod linalg;
pub mod mc_oracle;
pub mod real;

pub use error::{Error, Result};
pub use real::Real;

pub type EllipticModulus64 = elliptic::EllipticModulus<f64>;
pub type EllipticModulus32 = elliptic::EllipticModulus<f32>;
pub type FourierSeries64 = elliptic::FourierSeries<f64>;
pub type LatticeSpec64 = lattice::LatticeSpec<f64>;
pub type LatticeSpec32 = lattice::LatticeSpec<f32>;
pub type ScalarField64 = lattice::ScalarField<f64>;
pub type ScalarField32 = lattice::ScalarField<f32>;
pub type SnWave64 = classical::SnWave<f64>;
pub type DispersionMode64 = classical::DispersionMode<f64>;
pub type NewtonSolution64 = classical::NewtonSolution<f64>;
pub type GapSolution64 = dse_constant::GapSolution<f64>;
pub type GapSolution32 = dse_constant::GapSolution<f32>;
pub type CumulantReport64 = dse_constant::CumulantReport<f64>;
pub type BlochSystem64 = lame_bloch::BlochSystem<f64>;
pub type SpectralDecomposition64 = lame_bloch::SpectralDecomposition<f64>;
pub type McConfig64 = mc_oracle::McConfig<f64>;
pub type McResult64 = mc_oracle::McResult<f64>;
pub type Estimate64 = mc_oracle::Estimate<f64>;
