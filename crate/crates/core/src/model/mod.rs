//! Physical parameters, the radiative law, perturbation fields and the
//! nonlinear source terms.

mod helmholtz;
mod params;
mod sources;
mod state;

use thiserror::Error;

pub use helmholtz::{helmholtz_reconstruct, helmholtz_split, split_hat, HelmholtzSplit};
pub use params::{derive_constants, eval_b_remainder, BLaw, DerivedConstants, PhysicalParams, RadiativeLaw};
pub use sources::{nonlinear_sources, SourceField};
pub use state::{SpectralState, StateField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("constraint violated: {inequality} (value {value})")]
    Constraint { inequality: &'static str, value: String },
    #[error("b-law evaluated outside its domain: 1 + theta <= 0 at theta = {value}")]
    Domain { value: String },
    #[error("{quantity} = {value} is not positive at grid index {index} (x = {position:?})")]
    Positivity { quantity: &'static str, index: usize, position: [f64; 3], value: f64 },
    #[error("field {field} has nonzero mean {mean}")]
    NonzeroMean { field: &'static str, mean: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
}
