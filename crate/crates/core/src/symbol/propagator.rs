use crate::linalg::Matrix;
use crate::model::DerivedConstants;
use crate::scalar::Real;

use super::{assemble_symbol, SymbolError};

/// `e^{−tA(ϱ)}` and the half-step consistency residual
/// `‖E(t) − E(t/2)²‖₁ / (‖E(t)‖₁ + ‖E(t/2)‖₁²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Propagator<T> {
    pub matrix: Matrix<T, 4>,
    pub half_step_residual: T,
}

pub fn propagator<T: Real>(consts: &DerivedConstants<T>, rho_freq: T, t: T) -> Result<Propagator<T>, SymbolError> {
    if !(t >= T::zero()) {
        return Err(SymbolError::NegativeTime(format!("{t:?}")));
    }
    let a = assemble_symbol(consts, rho_freq)?.entries;
    if t == T::zero() {
        return Ok(Propagator { matrix: Matrix::identity(), half_step_residual: T::zero() });
    }
    let overflow = || SymbolError::Overflow { rho_freq: rho_freq.to_f64_lossy(), t: t.to_f64_lossy() };
    let full = a.scale(&-t).expm().ok_or_else(overflow)?;
    let half = a.scale(&(-t / T::lit(2.0))).expm().ok_or_else(overflow)?;
    let squared = &half * &half;
    let denom = full.norm1() + half.norm1() * half.norm1() + T::min_positive_value();
    let half_step_residual = (&full - &squared).norm1() / denom;
    if !(half_step_residual <= T::unit_roundoff().sqrt()) {
        return Err(overflow());
    }
    Ok(Propagator { matrix: full, half_step_residual })
}

/// Spectral norm `‖e^{−tA(ϱ)}‖₂`.
pub fn propagator_norm<T: Real>(consts: &DerivedConstants<T>, rho_freq: T, t: T) -> Result<T, SymbolError> {
    Ok(propagator(consts, rho_freq, t)?.matrix.norm2())
}
