use crate::linalg::Matrix;
use crate::model::DerivedConstants;
use crate::scalar::Field;

use super::assemble_symbol;

/// Change of thermal unknowns `Θ = 3𝒞θ + 2j₀`, `Ξ = γθ − b j₀` and the
/// coefficients of the symbol written on `(ρ̂, d̂, Θ̂, Ξ̂)`:
///
/// ```text
/// ρ: (0,      ϱ,       0,      0    )
/// d: (−ϱ,     νϱ²,    −c₁ϱ,   −c₂ϱ  )
/// Θ: (0,      2𝒞ϱ,     c₃ϱ²,  −c₄ϱ² )
/// Ξ: (0,      2γϱ/3,  −c₆ϱ²,   c₅(ϱ))
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct ModeChange<T> {
    pub c1: T,
    pub c2: T,
    pub c3: T,
    pub c4: T,
    /// `c₅(ϱ) = c5_const + c5_quadratic ϱ²`.
    pub c5_const: T,
    pub c5_quadratic: T,
    pub c6: T,
    /// Rows `(3𝒞, 2)` and `(γ, −b)`.
    pub transform: Matrix<T, 2>,
    /// Coefficients for which the conjugated symbol disagrees with the
    /// closed forms above, with the value the conjugation produces.
    pub flags: Vec<CoefficientMismatch<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientMismatch<T> {
    pub coefficient: &'static str,
    pub printed: T,
    pub derived: T,
}

impl<T: Field> ModeChange<T> {
    pub fn c5(&self, rho_freq: &T) -> T {
        self.c5_const.clone() + self.c5_quadratic.clone() * rho_freq.clone() * rho_freq.clone()
    }

    /// `(θ, j₀) ↦ (Θ, Ξ)`.
    pub fn forward(&self, theta: &T, j0: &T) -> (T, T) {
        let m = &self.transform;
        (
            m[(0, 0)].clone() * theta.clone() + m[(0, 1)].clone() * j0.clone(),
            m[(1, 0)].clone() * theta.clone() + m[(1, 1)].clone() * j0.clone(),
        )
    }

    /// `θ = (bΘ + 2Ξ)/D`, `j₀ = (γΘ − 3𝒞Ξ)/D` with `D = 3𝒞b + 2γ`.
    pub fn inverse(&self, big_theta: &T, xi: &T) -> (T, T) {
        let m = &self.transform;
        let (c3, gamma, b) = (m[(0, 0)].clone(), m[(1, 0)].clone(), -m[(1, 1)].clone());
        let d = c3.clone() * b.clone() + T::int(2) * gamma.clone();
        (
            (b * big_theta.clone() + T::int(2) * xi.clone()) / d.clone(),
            (gamma * big_theta.clone() - c3 * xi.clone()) / d,
        )
    }
}

fn printed<T: Field>(consts: &DerivedConstants<T>) -> ModeChange<T> {
    let DerivedConstants { gamma: g, a_diff: a, b_bar: b, kappa: k, c_light: c, .. } = consts.clone();
    let i = T::int;
    let d = consts.mode_denominator();
    ModeChange {
        c1: (b.clone() + g.clone() / (i(3) * c.clone())) / d.clone(),
        c2: T::one() / d.clone(),
        c3: (i(2) * k.clone() * b.clone() * c.clone() + i(2) * a.clone() * g.clone()) / d.clone(),
        c4: (i(6) * a.clone() * c.clone() - i(4) * k.clone() * c.clone()) / d.clone(),
        c5_const: T::ratio(2, 3) * g.clone() + b.clone() * c.clone(),
        c5_quadratic: (i(4) * k.clone() * g.clone() + i(9) * a.clone() * b.clone() * c.clone()) / (i(3) * d.clone()),
        c6: (i(2) * k * g.clone() * b.clone() - i(3) * a * b.clone() * g.clone()) / (i(3) * d),
        transform: Matrix([[i(3) * c, i(2)], [g, -b]]),
        flags: Vec::new(),
    }
}

/// `T A(ϱ) T⁻¹` with `T = diag(1, 1, transform)`.
pub fn conjugated_symbol<T: Field>(consts: &DerivedConstants<T>, rho_freq: T) -> Matrix<T, 4> {
    let a = assemble_symbol(consts, rho_freq).expect("non-negative frequency").entries;
    let m = printed(consts);
    let (t00, t01, t10, t11) = (
        m.transform[(0, 0)].clone(),
        m.transform[(0, 1)].clone(),
        m.transform[(1, 0)].clone(),
        m.transform[(1, 1)].clone(),
    );
    let det = t00.clone() * t11.clone() - t01.clone() * t10.clone();
    let full = Matrix::<T, 4>::from_fn(|r, col| match (r, col) {
        (0, 0) | (1, 1) => T::one(),
        (2, 2) => t00.clone(),
        (2, 3) => t01.clone(),
        (3, 2) => t10.clone(),
        (3, 3) => t11.clone(),
        _ => T::zero(),
    });
    let inv = Matrix::<T, 4>::from_fn(|r, col| match (r, col) {
        (0, 0) | (1, 1) => T::one(),
        (2, 2) => t11.clone() / det.clone(),
        (2, 3) => -t01.clone() / det.clone(),
        (3, 2) => -t10.clone() / det.clone(),
        (3, 3) => t00.clone() / det.clone(),
        _ => T::zero(),
    });
    &(&full * &a) * &inv
}

fn close<T: Field>(x: &T, y: &T, tol: &T) -> bool {
    let scale = if y.abs_val() > T::one() { y.abs_val() } else { T::one() };
    (x.clone() - y.clone()).abs_val() <= tol.clone() * scale
}

/// Conjugates the symbol at `ϱ ∈ {0, 1, 2}` and compares every entry with
/// the pattern in [`ModeChange`] built from the closed-form coefficients.
/// Returns the coefficients (or structural entries) that disagree beyond
/// `tol` relative, each with the value read off the conjugated matrix.
pub fn conjugation_check<T: Field>(consts: &DerivedConstants<T>, tol: &T) -> Vec<CoefficientMismatch<T>> {
    let p = printed(consts);
    let m0 = conjugated_symbol(consts, T::zero());
    let m1 = conjugated_symbol(consts, T::one());
    let m2 = conjugated_symbol(consts, T::int(2));
    let mut out = Vec::new();
    let mut check = |coefficient: &'static str, printed: T, derived: T| {
        if !close(&printed, &derived, tol) {
            out.push(CoefficientMismatch { coefficient, printed, derived });
        }
    };
    check("c1", p.c1.clone(), -m1[(1, 2)].clone());
    check("c2", p.c2.clone(), -m1[(1, 3)].clone());
    check("c3", p.c3.clone(), m1[(2, 2)].clone());
    check("c4", p.c4.clone(), -m1[(2, 3)].clone());
    check("c5_const", p.c5_const.clone(), m0[(3, 3)].clone());
    check("c5_quadratic", p.c5_quadratic.clone(), m1[(3, 3)].clone() - m0[(3, 3)].clone());
    check("c6", p.c6.clone(), -m1[(3, 2)].clone());

    // Every entry must follow the pattern in ϱ; the ϱ = 2 sample catches
    // terms of the wrong order.
    let c = consts.c_light.clone();
    let g = consts.gamma.clone();
    let pattern = |r: T| -> Matrix<T, 4> {
        let r2 = r.clone() * r.clone();
        Matrix([
            [T::zero(), r.clone(), T::zero(), T::zero()],
            [-r.clone(), consts.nu.clone() * r2.clone(), -p.c1.clone() * r.clone(), -p.c2.clone() * r.clone()],
            [T::zero(), T::int(2) * c.clone() * r.clone(), p.c3.clone() * r2.clone(), -p.c4.clone() * r2.clone()],
            [T::zero(), T::ratio(2, 3) * g.clone() * r.clone(), -p.c6.clone() * r2, p.c5(&r)],
        ])
    };
    const NAMES: [[&str; 4]; 4] = [
        ["entry(0,0)", "entry(0,1)", "entry(0,2)", "entry(0,3)"],
        ["entry(1,0)", "entry(1,1)", "entry(1,2)", "entry(1,3)"],
        ["entry(2,0)", "entry(2,1)", "entry(2,2)", "entry(2,3)"],
        ["entry(3,0)", "entry(3,1)", "entry(3,2)", "entry(3,3)"],
    ];
    let coefficient_entries = [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2), (3, 3)];
    for (r, m) in [(T::zero(), &m0), (T::int(2), &m2)] {
        let expected = pattern(r);
        for i in 0..4 {
            for j in 0..4 {
                if coefficient_entries.contains(&(i, j)) {
                    continue;
                }
                check(NAMES[i][j], expected[(i, j)].clone(), m[(i, j)].clone());
            }
        }
    }
    let mut seen = std::collections::HashSet::new();
    out.retain(|mm| seen.insert(mm.coefficient));
    out
}

/// Closed-form coefficients, flagged against the conjugation check at
/// relative tolerance `1e-10`.
pub fn mode_change<T: Field>(consts: &DerivedConstants<T>) -> ModeChange<T> {
    let mut m = printed(consts);
    m.flags = conjugation_check(consts, &T::ratio(1, 10_000_000_000));
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_constants, PhysicalParams};
    use num_rational::BigRational;

    type Q = BigRational;

    fn reference() -> DerivedConstants<Q> {
        derive_constants(&PhysicalParams::reference()).unwrap()
    }

    #[test]
    fn reference_coefficients() {
        let m = mode_change(&reference());
        assert_eq!(m.c1, Q::ratio(7, 33));
        assert_eq!(m.c2, Q::ratio(1, 11));
        assert_eq!(m.c3, Q::ratio(10, 33));
        assert_eq!(m.c4, Q::ratio(-3, 11));
        assert_eq!(m.c5(&Q::int(0)), Q::ratio(11, 3));
        assert_eq!(m.c6.abs_val(), Q::ratio(2, 11));
    }

    #[test]
    fn transform_round_trip_exact() {
        let m = mode_change(&reference());
        let (th, j) = (Q::ratio(3, 7), Q::ratio(-5, 2));
        let (big, xi) = m.forward(&th, &j);
        assert_eq!(m.inverse(&big, &xi), (th, j));
        assert_eq!(m.forward(&Q::int(1), &Q::int(0)), (Q::int(3), Q::int(4)));
    }

    #[test]
    fn only_c6_sign_is_flagged() {
        let m = mode_change(&reference());
        assert_eq!(m.flags.len(), 1);
        assert_eq!(m.flags[0].coefficient, "c6");
        assert_eq!(m.flags[0].derived, -m.c6.clone());
    }
}
