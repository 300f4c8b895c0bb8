//! Numerical laboratory for the second mixed moment
//! `F₂(λ₁, λ₂) = E[det(λ₁ - H) det(λ₂ - H)]` of one-dimensional Gaussian band
//! matrices with variance profile `J = (-W²Δ + 1)⁻¹`.
//!
//! * [`lattice`]: Neumann Laplacian, covariance profile, `T_m`/`S_m`
//!   determinants, Green's function entries and Gaussian partition functions.
//! * [`sampler`]: reproducible band-ensemble and GUE draws.
//! * [`charpoly`]: Householder tridiagonalisation, log-domain `det(λ - H)`,
//!   Sturm counts.
//! * [`saddle`]: semicircle law, saddle-point data, sine kernel.
//! * [`moments`]: Monte Carlo `F₂`, `D₂`, the normalised ratio, and an exact
//!   Wick expansion for `N <= 3`.
//! * [`unitary`]: Haar U(2), HCIZ, `|V₁₂|^{2s}` moments.
//! * [`dualrep`]: the Hermitian-field integral representation of `F₂`.
//!
//! Most closed-form code is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`.

pub mod charpoly;
pub mod dualrep;
pub mod error;
pub mod hermitian;
pub mod lattice;
pub mod moments;
pub mod quadrature;
pub mod saddle;
pub mod sampler;
pub mod scalar;
pub mod signed_log;
pub mod unitary;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Tridiagonal = lattice::TridiagonalSymmetric<f64>;
pub type Profile = lattice::CovarianceProfile<f64>;
pub type Hermitian = hermitian::HermitianMatrix<f64>;
pub type LogDet = signed_log::SignedLog<f64>;
pub type Saddle = saddle::SaddleData<f64>;
pub type Spectral = saddle::SpectralParams<f64>;
pub type U2 = unitary::Unitary2<f64>;
pub type Grid = quadrature::QuadratureGrid<f64>;

pub type Tridiagonal32 = lattice::TridiagonalSymmetric<f32>;
pub type Profile32 = lattice::CovarianceProfile<f32>;
pub type Hermitian32 = hermitian::HermitianMatrix<f32>;
pub type LogDet32 = signed_log::SignedLog<f32>;
