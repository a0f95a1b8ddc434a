use num_complex::Complex;

use crate::model::DerivedConstants;
use crate::scalar::{Field, Real};

/// Small-frequency expansions of the four eigenvalues through `O(ϱ²)`:
/// a complex pair `±i ϱ √ω² + p ϱ²`, a slow real mode `s ϱ²` and a fast real
/// mode `f₀ + f₂ ϱ²`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionCoefficients<T> {
    /// `ω² = (8γ+15𝒞b)/(6γ+9𝒞b)`.
    pub pair_freq_sq: T,
    pub pair_damping: T,
    pub slow: T,
    pub fast_const: T,
    pub fast_quadratic: T,
}

struct Shorthand<T> {
    g: T,
    cb: T,
    ak: T,
    nu: T,
    kappa: T,
    a: T,
}

fn shorthand<T: Field>(consts: &DerivedConstants<T>, kappa_zero: bool) -> Shorthand<T> {
    let kappa = if kappa_zero { T::zero() } else { consts.kappa.clone() };
    let g = consts.gamma.clone();
    let cb = consts.c_light.clone() * consts.b_bar.clone();
    let a = consts.a_diff.clone();
    Shorthand { ak: a.clone() * g.clone() + kappa.clone() * cb.clone(), g, cb, nu: consts.nu.clone(), kappa, a }
}

impl<T: Field> ExpansionCoefficients<T> {
    /// The closed forms as printed, including the fast-mode `ϱ²` term.
    pub fn printed(consts: &DerivedConstants<T>, kappa_zero: bool) -> Self {
        let Shorthand { g, cb, ak, nu, kappa, a } = shorthand(consts, kappa_zero);
        let i = T::int;
        let d6 = i(6) * g.clone() + i(9) * cb.clone();
        let d8 = i(8) * g.clone() + i(15) * cb.clone();
        let pair_damping = i(9) * g.clone() / (d6.clone() * d6.clone())
            + i(2) * ak.clone() * (g.clone() + i(3) * cb.clone()) / (d8.clone() * (i(2) * g.clone() + i(3) * cb.clone()))
            + nu / i(2);
        ExpansionCoefficients {
            pair_freq_sq: d8.clone() / d6.clone(),
            pair_damping,
            slow: i(6) * ak / d8,
            fast_const: T::ratio(2, 3) * g.clone() + cb.clone(),
            fast_quadratic: (i(4) * g.clone() * kappa + i(9) * cb * a - g) / d6,
        }
    }

    /// Coefficients from a regular perturbation expansion of the
    /// characteristic polynomial. They agree with [`Self::printed`] except for
    /// the fast-mode `ϱ²` term, which is `(4γκ+9𝒞ab)/(3D) − 2γ/D²` with
    /// `D = 3𝒞b + 2γ`.
    pub fn derived(consts: &DerivedConstants<T>, kappa_zero: bool) -> Self {
        let printed = Self::printed(consts, kappa_zero);
        let Shorthand { g, cb, kappa, a, .. } = shorthand(consts, kappa_zero);
        let i = T::int;
        let d = i(3) * cb.clone() + i(2) * g.clone();
        let fast_quadratic = (i(4) * g.clone() * kappa + i(9) * cb * a) / (i(3) * d.clone()) - i(2) * g / (d.clone() * d);
        ExpansionCoefficients { fast_quadratic, ..printed }
    }
}

/// One coefficient where the printed closed form and the derived value differ.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionDiscrepancy<T> {
    pub coefficient: &'static str,
    pub printed: T,
    pub derived: T,
}

/// Compares printed and derived expansion coefficients, reporting every
/// entry whose relative difference exceeds `1e-12`.
pub fn expansion_discrepancies<T: Field>(consts: &DerivedConstants<T>, kappa_zero: bool) -> Vec<ExpansionDiscrepancy<T>> {
    let p = ExpansionCoefficients::printed(consts, kappa_zero);
    let d = ExpansionCoefficients::derived(consts, kappa_zero);
    let tol = T::ratio(1, 1_000_000_000_000);
    [
        ("pair_freq_sq", p.pair_freq_sq, d.pair_freq_sq),
        ("pair_damping", p.pair_damping, d.pair_damping),
        ("slow", p.slow, d.slow),
        ("fast_const", p.fast_const, d.fast_const),
        ("fast_quadratic", p.fast_quadratic, d.fast_quadratic),
    ]
    .into_iter()
    .filter(|(_, printed, derived)| {
        let scale = if derived.abs_val() > T::one() { derived.abs_val() } else { T::one() };
        (printed.clone() - derived.clone()).abs_val() > tol.clone() * scale
    })
    .map(|(coefficient, printed, derived)| ExpansionDiscrepancy { coefficient, printed, derived })
    .collect()
}

/// Truncated expansions (derived coefficients), ordered slow, pair (−, +),
/// fast. Intended for `ϱ ≤ 0.5`.
pub fn asymptotic_eigenvalues<T: Real>(consts: &DerivedConstants<T>, rho_freq: T, kappa_zero: bool) -> [Complex<T>; 4] {
    let c = ExpansionCoefficients::derived(consts, kappa_zero);
    let r2 = rho_freq * rho_freq;
    let w = rho_freq * c.pair_freq_sq.sqrt();
    let damp = c.pair_damping * r2;
    [
        Complex::new(c.slow * r2, T::zero()),
        Complex::new(damp, -w),
        Complex::new(damp, w),
        Complex::new(c.fast_const + c.fast_quadratic * r2, T::zero()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_constants, PhysicalParams};
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn conduction_free_slow_mode() {
        let c = derive_constants(&PhysicalParams::<Q>::reference()).unwrap();
        assert_eq!(ExpansionCoefficients::printed(&c, true).slow, Q::ratio(4, 47));
    }

    #[test]
    fn only_fast_quadratic_is_flagged() {
        let c = derive_constants(&PhysicalParams::<Q>::reference()).unwrap();
        for kz in [false, true] {
            let d = expansion_discrepancies(&c, kz);
            assert_eq!(d.len(), 1);
            assert_eq!(d[0].coefficient, "fast_quadratic");
        }
    }

    #[test]
    fn expansions_at_zero() {
        let c = derive_constants(&PhysicalParams::<f64>::reference()).unwrap();
        let e = asymptotic_eigenvalues(&c, 0.0, false);
        assert_eq!(&e[..3], &[Complex::new(0.0, 0.0); 3]);
        assert!((e[3].re - 11.0 / 3.0).abs() < 1e-15);
    }
}
