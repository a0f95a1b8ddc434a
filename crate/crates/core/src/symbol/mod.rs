//! The linearized Fourier symbol of the compressible block.
//!
//! On the unknowns `(ρ̂, d̂, θ̂, ĵ₀)` the linear flow reads `∂ₜU + A(ϱ)U = 0`
//! with `ϱ = |ξ|`. Everything that is a rational function of the
//! coefficients is generic over [`Field`] and runs exactly in rationals.

mod expansion;
mod full;
mod modes;
mod propagator;
mod roots;

use num_complex::Complex;
use thiserror::Error;

use crate::linalg::{det_cofactor, Matrix};
use crate::model::DerivedConstants;
use crate::scalar::{Field, Real};

pub use expansion::{asymptotic_eigenvalues, expansion_discrepancies, ExpansionCoefficients, ExpansionDiscrepancy};
pub use full::full_symbol;
pub use modes::{conjugated_symbol, conjugation_check, mode_change, CoefficientMismatch, ModeChange};
pub use propagator::{propagator, propagator_norm, Propagator};
pub use roots::{eigenvalues, polynomial_roots, spectral_abscissa, spectral_gap, SpectralGap, SpectrumReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolError {
    #[error("frequency must be non-negative (got {0})")]
    NegativeFrequency(String),
    #[error("time must be non-negative (got {0})")]
    NegativeTime(String),
    #[error("root finder did not converge at rho_freq = {rho_freq}; residuals {residuals:?}")]
    NonConvergence { rho_freq: f64, residuals: Vec<f64> },
    #[error("tolerance must lie in (0, 1e-6] (got {0})")]
    Tolerance(f64),
    #[error("propagator overflow at rho_freq = {rho_freq}, t = {t}")]
    Overflow { rho_freq: f64, t: f64 },
    #[error("invalid frequency band: need 0 < r < R and at least 2 grid points (r = {r}, R = {big_r}, n = {n})")]
    Band { r: f64, big_r: f64, n: usize },
    #[error("spectral abscissa {iota} <= 0 at rho_freq = {at}: the medium-frequency gap is violated")]
    ModelInconsistency { iota: f64, at: f64 },
}

/// `A(ϱ)` on `(ρ̂, d̂, θ̂, ĵ₀)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolMatrix<T> {
    pub rho_freq: T,
    pub entries: Matrix<T, 4>,
}

fn check_freq<T: Field>(rho: &T) -> Result<(), SymbolError> {
    if *rho < T::zero() {
        return Err(SymbolError::NegativeFrequency(format!("{rho:?}")));
    }
    Ok(())
}

pub fn assemble_symbol<T: Field>(consts: &DerivedConstants<T>, rho_freq: T) -> Result<SymbolMatrix<T>, SymbolError> {
    check_freq(&rho_freq)?;
    let r = rho_freq.clone();
    let r2 = r.clone() * r.clone();
    let z = T::zero;
    let two3 = T::ratio(2, 3);
    let c = consts.c_light.clone();
    let entries = Matrix([
        [z(), r.clone(), z(), z()],
        [
            -r.clone(),
            consts.nu.clone() * r2.clone(),
            -r.clone(),
            -r.clone() / (T::int(3) * c.clone()),
        ],
        [
            z(),
            two3.clone() * r.clone(),
            two3.clone() * consts.kappa.clone() * r2.clone() + two3.clone() * consts.gamma.clone(),
            -two3 * consts.b_bar.clone(),
        ],
        [
            z(),
            z(),
            -c.clone() * consts.gamma.clone(),
            consts.a_diff.clone() * r2 + c * consts.b_bar.clone(),
        ],
    ]);
    Ok(SymbolMatrix { rho_freq, entries })
}

/// `P(λ) = a₀λ⁴ − a₁λ³ + a₂λ² − a₃λ + a₄`.
///
/// For a 4×4 matrix `det(A − λI) = det(λI − A)`, so `P` is also the monic
/// characteristic polynomial `det(λI − A)`; that is the convention used
/// throughout.
#[derive(Clone, Debug, PartialEq)]
pub struct CharPoly<T> {
    pub a0: T,
    pub a1: T,
    pub a2: T,
    pub a3: T,
    pub a4: T,
}

impl<T: Field> CharPoly<T> {
    pub fn eval(&self, lambda: &T) -> T {
        let l = lambda.clone();
        (((self.a0.clone() * l.clone() - self.a1.clone()) * l.clone() + self.a2.clone()) * l.clone()
            - self.a3.clone())
            * l
            + self.a4.clone()
    }

    /// Coefficients of `det(λI − A)` in increasing degree.
    pub fn monic_ascending(&self) -> [T; 5] {
        [self.a4.clone(), -self.a3.clone(), self.a2.clone(), -self.a1.clone(), self.a0.clone()]
    }
}

impl<T: Real> CharPoly<T> {
    pub fn eval_complex(&self, z: Complex<T>) -> Complex<T> {
        self.monic_ascending().iter().rev().fold(Complex::new(T::zero(), T::zero()), |acc, c| acc * z + *c)
    }

    pub fn derivative_complex(&self, z: Complex<T>) -> Complex<T> {
        let c = self.monic_ascending();
        (1..5).rev().fold(Complex::new(T::zero(), T::zero()), |acc, k| acc * z + c[k] * T::lit(k as f64))
    }
}

/// Coefficients in the closed forms printed alongside the symbol.
pub fn char_poly<T: Field>(consts: &DerivedConstants<T>, rho_freq: T) -> Result<CharPoly<T>, SymbolError> {
    check_freq(&rho_freq)?;
    let r2 = rho_freq.clone() * rho_freq;
    let r4 = r2.clone() * r2.clone();
    let DerivedConstants { nu, gamma, a_diff: a, b_bar: b, kappa, c_light: c, .. } = consts.clone();
    let two3 = T::ratio(2, 3);
    let five3 = T::ratio(5, 3);
    let cb = c.clone() * b.clone();

    let a1 = (a.clone() + two3.clone() * kappa.clone() + nu.clone()) * r2.clone() + two3.clone() * gamma.clone()
        + cb.clone();
    let a2 = ((nu.clone() * a.clone() + two3.clone() * nu.clone() * kappa.clone()
        + two3.clone() * a.clone() * kappa.clone())
        * r2.clone()
        + two3.clone() * gamma.clone() * nu.clone()
        + cb.clone() * nu.clone()
        + two3.clone() * gamma.clone() * a.clone()
        + two3.clone() * kappa.clone() * cb.clone()
        + five3.clone())
        * r2.clone();
    let a3 = (two3.clone() * a.clone() * kappa.clone() * nu.clone() * r4.clone()
        + (two3.clone() * (gamma.clone() * a.clone() + kappa.clone() * cb.clone()) * nu.clone()
            + five3.clone() * a.clone()
            + two3.clone() * kappa.clone())
            * r2.clone()
        + five3 * cb.clone()
        + T::ratio(8, 9) * gamma.clone())
        * r2.clone();
    let a4 = two3 * (a.clone() * kappa.clone() * r2 + a * gamma + kappa * cb) * r4;
    Ok(CharPoly { a0: T::one(), a1, a2, a3, a4 })
}

/// Hurwitz determinants of `P(−μ)` together with the factored form of `A₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct HurwitzChain<T> {
    pub a1: T,
    pub a2: T,
    pub a3: T,
    pub a4: T,
    pub a21: T,
    pub a22: T,
    pub a23: T,
}

impl<T: Field> HurwitzChain<T> {
    pub fn all_positive(&self) -> bool {
        let z = T::zero();
        self.a1 > z && self.a2 > z && self.a3 > z && self.a4 > z
    }
}

pub fn routh_hurwitz<T: Field>(consts: &DerivedConstants<T>, rho_freq: T) -> Result<HurwitzChain<T>, SymbolError> {
    let p = char_poly(consts, rho_freq)?;
    let z = T::zero;
    let CharPoly { a0, a1, a2, a3, a4 } = p;
    let m2 = vec![vec![a1.clone(), a0.clone()], vec![a3.clone(), a2.clone()]];
    let m3 = vec![
        vec![a1.clone(), a0.clone(), z()],
        vec![a3.clone(), a2.clone(), a1.clone()],
        vec![z(), a4.clone(), a3.clone()],
    ];
    let m4 = vec![
        vec![a1.clone(), a0.clone(), z(), z()],
        vec![a3.clone(), a2.clone(), a1.clone(), z()],
        vec![z(), a4.clone(), a3.clone(), z()],
        vec![z(), z(), z(), a4.clone()],
    ];
    let (a21, a22, a23) = hurwitz_a2_coefficients(consts);
    Ok(HurwitzChain {
        a1,
        a2: det_cofactor(&m2),
        a3: det_cofactor(&m3),
        a4: det_cofactor(&m4),
        a21,
        a22,
        a23,
    })
}

/// `(a₂₁, a₂₂, a₂₃)` with `A₂ = a₂₁ϱ⁶ + a₂₂ϱ⁴ + a₂₃ϱ²`.
pub fn hurwitz_a2_coefficients<T: Field>(consts: &DerivedConstants<T>) -> (T, T, T) {
    let DerivedConstants { nu, gamma, a_diff: a, b_bar: b, kappa, c_light: c, .. } = consts.clone();
    let two3 = T::ratio(2, 3);
    let five3 = T::ratio(5, 3);
    let cb = c * b;
    let s1 = a.clone() + two3.clone() * kappa.clone() + nu.clone();
    let q1 = nu.clone() * a.clone() + two3.clone() * nu.clone() * kappa.clone() + two3.clone() * a.clone() * kappa.clone();
    let q0 = two3.clone() * gamma.clone() * nu.clone()
        + cb.clone() * nu.clone()
        + two3.clone() * gamma.clone() * a.clone()
        + two3.clone() * kappa.clone() * cb.clone()
        + five3.clone();
    let relax = two3.clone() * gamma.clone() + cb.clone();
    let a21 = s1.clone() * q1.clone() - two3.clone() * a.clone() * kappa.clone() * nu.clone();
    let a22 = relax.clone() * q1 + s1 * q0.clone()
        - (two3.clone() * (gamma.clone() * a.clone() + kappa.clone() * cb.clone()) * nu + five3.clone() * a
            + two3 * kappa);
    let a23 = relax * q0 - (five3 * cb + T::ratio(8, 9) * gamma);
    (a21, a22, a23)
}
