//! Numerical laboratory for the diffusion-approximation radiation
//! hydrodynamics system linearized about the constant state
//! `(ρ, u, θ, j₀) = (1, 0, 1, 1/𝒞)`.
//!
//! The algebraic layers ([`model`] constants, [`symbol`] matrices, characteristic
//! polynomial and Routh–Hurwitz chain, the mode change) are generic over an
//! exact [`scalar::Field`], so they run on [`Rational`] as well as on floats.
//! Everything that needs transcendental functions or FFTs is generic over
//! [`scalar::Real`] (`f32`, `f64`).

pub mod linalg;
pub mod scalar;
pub mod spectral;
pub mod model;
pub mod symbol;
pub mod lp;
pub mod energy;
pub mod solver;
pub mod decay;
pub mod io;

/// Exact rational scalar for the algebraic layers.
pub type Rational = num_rational::BigRational;

pub type Params = model::PhysicalParams<f64>;
pub type Constants = model::DerivedConstants<f64>;
pub type ExactConstants = model::DerivedConstants<Rational>;
pub type Grid = spectral::Grid<f64>;
pub type State = model::StateField<f64>;
pub type RunConfig = solver::RunConfig<f64>;
pub type Trajectory = solver::Trajectory<f64>;
