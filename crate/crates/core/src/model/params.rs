use std::fmt;
use std::sync::Arc;

use crate::scalar::Field;

use super::ModelError;

/// A smooth radiative equilibrium law `b(θ)` supplied by the caller.
pub trait RadiativeLaw<T>: Send + Sync {
    fn value(&self, theta: &T) -> T;
    fn derivative(&self, theta: &T) -> T;
    fn second_derivative(&self, theta: &T) -> T;
    fn name(&self) -> &str {
        "custom"
    }
}

/// Radiative equilibrium law `b(θ)`.
#[derive(Clone)]
pub enum BLaw<T> {
    /// `θ⁴`.
    FourthPower,
    /// `Σ cₖ θᵏ`, coefficients in increasing degree.
    Polynomial(Vec<T>),
    Custom(Arc<dyn RadiativeLaw<T>>),
}

impl<T: fmt::Debug> fmt::Debug for BLaw<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BLaw::FourthPower => f.write_str("FourthPower"),
            BLaw::Polynomial(c) => f.debug_tuple("Polynomial").field(c).finish(),
            BLaw::Custom(law) => f.debug_tuple("Custom").field(&law.name()).finish(),
        }
    }
}

impl<T: Field> BLaw<T> {
    fn coefficients(&self) -> Option<Vec<T>> {
        match self {
            BLaw::FourthPower => Some(vec![T::zero(), T::zero(), T::zero(), T::zero(), T::one()]),
            BLaw::Polynomial(c) => Some(c.clone()),
            BLaw::Custom(_) => None,
        }
    }

    pub fn value(&self, theta: &T) -> T {
        match self.coefficients() {
            Some(c) => horner(&c, theta),
            None => match self {
                BLaw::Custom(law) => law.value(theta),
                _ => unreachable!(),
            },
        }
    }

    pub fn derivative(&self, theta: &T) -> T {
        match self.coefficients() {
            Some(c) => horner(&differentiate(&c), theta),
            None => match self {
                BLaw::Custom(law) => law.derivative(theta),
                _ => unreachable!(),
            },
        }
    }

    pub fn second_derivative(&self, theta: &T) -> T {
        match self.coefficients() {
            Some(c) => horner(&differentiate(&differentiate(&c)), theta),
            None => match self {
                BLaw::Custom(law) => law.second_derivative(theta),
                _ => unreachable!(),
            },
        }
    }

    /// `b(1+x) − b(1) − b′(1)x`.
    ///
    /// For polynomial laws the Taylor coefficients about 1 are formed first,
    /// so the result carries no cancellation for small `x`.
    pub fn remainder(&self, x: &T) -> T {
        match self.coefficients() {
            Some(c) => {
                let shifted = taylor_shift_one(&c);
                if shifted.len() <= 2 {
                    return T::zero();
                }
                horner(&shifted[2..], x) * x.clone() * x.clone()
            }
            None => {
                let one = T::one();
                let theta = one.clone() + x.clone();
                self.value(&theta) - self.value(&one) - self.derivative(&one) * x.clone()
            }
        }
    }
}

fn horner<T: Field>(c: &[T], x: &T) -> T {
    c.iter().rev().fold(T::zero(), |acc, ck| acc * x.clone() + ck.clone())
}

fn differentiate<T: Field>(c: &[T]) -> Vec<T> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, ck)| ck.clone() * T::int(k as i64))
        .collect()
}

/// Coefficients of `p(1 + x)` in powers of `x`.
fn taylor_shift_one<T: Field>(c: &[T]) -> Vec<T> {
    let mut a = c.to_vec();
    let n = a.len();
    for i in 0..n {
        for k in (i..n.saturating_sub(1)).rev() {
            let next = a[k + 1].clone();
            a[k] = a[k].clone() + next;
        }
    }
    a
}

/// Fluid and radiation coefficients of the model.
#[derive(Clone, Debug)]
pub struct PhysicalParams<T> {
    pub mu: T,
    /// Second viscosity `λ = ζ − 2μ/3`.
    pub lambda: T,
    pub kappa: T,
    /// `𝒞`.
    pub c_light: T,
    /// `ℒ`.
    pub l_rad: T,
    pub sigma_a: T,
    pub sigma_s: T,
    pub b_law: BLaw<T>,
}

impl<T: Field> PhysicalParams<T> {
    /// `μ=1, λ=0, κ=1, 𝒞=ℒ=σ_a=σ_s=1, b=θ⁴`.
    pub fn reference() -> Self {
        PhysicalParams {
            mu: T::one(),
            lambda: T::zero(),
            kappa: T::one(),
            c_light: T::one(),
            l_rad: T::one(),
            sigma_a: T::one(),
            sigma_s: T::one(),
            b_law: BLaw::FourthPower,
        }
    }

    /// Same parameters with `κ = 0`.
    pub fn without_conduction(&self) -> Self {
        PhysicalParams { kappa: T::zero(), ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let zero = T::zero();
        let checks: [(bool, &'static str, &T); 6] = [
            (self.mu > zero, "mu > 0", &self.mu),
            (self.kappa >= zero, "kappa >= 0", &self.kappa),
            (self.c_light > zero, "c_light > 0", &self.c_light),
            (self.l_rad > zero, "l_rad > 0", &self.l_rad),
            (self.sigma_a > zero, "sigma_a > 0", &self.sigma_a),
            (self.sigma_s >= zero, "sigma_s >= 0", &self.sigma_s),
        ];
        for (ok, inequality, value) in checks {
            if !ok {
                return Err(ModelError::Constraint { inequality, value: format!("{value:?}") });
            }
        }
        let nu = self.lambda.clone() + self.mu.clone() + self.mu.clone();
        if !(nu > zero) {
            return Err(ModelError::Constraint { inequality: "nu = lambda + 2 mu > 0", value: format!("{nu:?}") });
        }
        let db = self.b_law.derivative(&T::one());
        if !(db > zero) {
            return Err(ModelError::Constraint { inequality: "b'(1) > 0", value: format!("{db:?}") });
        }
        Ok(())
    }
}

/// Constants of the linearization about `(1, 0, 1, b(1))`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivedConstants<T> {
    /// `ν = λ + 2μ`.
    pub nu: T,
    /// `γ = ℒσ_a b′(1)`.
    pub gamma: T,
    /// `a = 𝒞 / (3ℒ(σ_a+σ_s))`.
    pub a_diff: T,
    /// `b = ℒσ_a`.
    pub b_bar: T,
    /// `b(1)`.
    pub b_eq: T,
    pub mu: T,
    pub kappa: T,
    pub c_light: T,
}

impl<T: Field> DerivedConstants<T> {
    /// Radiative relaxation rate `2γ/3 + 𝒞b`, the nonzero eigenvalue at `ξ = 0`.
    pub fn relaxation_rate(&self) -> T {
        T::ratio(2, 3) * self.gamma.clone() + self.c_light.clone() * self.b_bar.clone()
    }

    /// `D = 3𝒞b + 2γ`.
    pub fn mode_denominator(&self) -> T {
        T::int(3) * self.c_light.clone() * self.b_bar.clone() + T::int(2) * self.gamma.clone()
    }

    pub fn with_kappa(&self, kappa: T) -> Self {
        DerivedConstants { kappa, ..self.clone() }
    }

    pub fn kappa_is_zero(&self) -> bool {
        self.kappa == T::zero()
    }
}

pub fn derive_constants<T: Field>(params: &PhysicalParams<T>) -> Result<DerivedConstants<T>, ModelError> {
    params.validate()?;
    let one = T::one();
    let nu = params.lambda.clone() + T::int(2) * params.mu.clone();
    let b_bar = params.l_rad.clone() * params.sigma_a.clone();
    let gamma = b_bar.clone() * params.b_law.derivative(&one);
    let a_diff = params.c_light.clone()
        / (T::int(3) * params.l_rad.clone() * (params.sigma_a.clone() + params.sigma_s.clone()));
    Ok(DerivedConstants {
        nu,
        gamma,
        a_diff,
        b_bar,
        b_eq: params.b_law.value(&one),
        mu: params.mu.clone(),
        kappa: params.kappa.clone(),
        c_light: params.c_light.clone(),
    })
}

/// `b(1+θ̃) − b(1) − b′(1)θ̃`, defined for `θ̃ > −1`.
pub fn eval_b_remainder<T: Field>(params: &PhysicalParams<T>, theta_pert: &T) -> Result<T, ModelError> {
    let temperature = T::one() + theta_pert.clone();
    if !(temperature > T::zero()) {
        return Err(ModelError::Domain { value: format!("{theta_pert:?}") });
    }
    Ok(params.b_law.remainder(theta_pert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn reference_constants_exact() {
        let c = derive_constants(&PhysicalParams::<Q>::reference()).unwrap();
        assert_eq!(c.nu, Q::int(2));
        assert_eq!(c.gamma, Q::int(4));
        assert_eq!(c.a_diff, Q::ratio(1, 6));
        assert_eq!(c.b_bar, Q::int(1));
        assert_eq!(c.b_eq, Q::int(1));
        assert_eq!(c.relaxation_rate(), Q::ratio(11, 3));
    }

    #[test]
    fn diffusion_constant_without_scattering() {
        let p = PhysicalParams::<Q> { sigma_s: Q::int(0), c_light: Q::int(3), ..PhysicalParams::reference() };
        assert_eq!(derive_constants(&p).unwrap().a_diff, Q::int(1));
    }

    #[test]
    fn rejects_violations_by_name() {
        let p = PhysicalParams::<f64> { lambda: -3.0, ..PhysicalParams::reference() };
        match derive_constants(&p) {
            Err(ModelError::Constraint { inequality, .. }) => assert!(inequality.contains("nu")),
            other => panic!("{other:?}"),
        }
        let p = PhysicalParams::<f64> { b_law: BLaw::Polynomial(vec![1.0, -1.0]), ..PhysicalParams::reference() };
        match derive_constants(&p) {
            Err(ModelError::Constraint { inequality, .. }) => assert!(inequality.contains("b'(1)")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn remainder_values() {
        let p = PhysicalParams::<Q>::reference();
        assert_eq!(eval_b_remainder(&p, &Q::int(0)).unwrap(), Q::int(0));
        assert_eq!(eval_b_remainder(&p, &Q::int(1)).unwrap(), Q::int(11));
        let e = Q::ratio(1, 7);
        let expected = Q::int(6) * e.clone() * e.clone() + Q::int(4) * e.clone().pow(3) + e.clone().pow(4);
        assert_eq!(eval_b_remainder(&p, &e).unwrap(), expected);
        assert!(matches!(eval_b_remainder(&p, &Q::int(-1)), Err(ModelError::Domain { .. })));
    }

    #[test]
    fn remainder_curvature_limit() {
        let p = PhysicalParams::<f64>::reference();
        for x in [1e-3, 1e-4] {
            let r = eval_b_remainder(&p, &x).unwrap() / (x * x);
            assert!((r - 6.0).abs() < 5e-3, "{r}");
        }
    }

    struct Exponential;

    impl RadiativeLaw<f64> for Exponential {
        fn value(&self, t: &f64) -> f64 {
            t.exp()
        }
        fn derivative(&self, t: &f64) -> f64 {
            t.exp()
        }
        fn second_derivative(&self, t: &f64) -> f64 {
            t.exp()
        }
    }

    #[test]
    fn custom_law_is_used() {
        let p = PhysicalParams { b_law: BLaw::Custom(Arc::new(Exponential)), ..PhysicalParams::<f64>::reference() };
        let c = derive_constants(&p).unwrap();
        assert!((c.gamma - std::f64::consts::E).abs() < 1e-15);
        let r = eval_b_remainder(&p, &0.5).unwrap();
        let e = std::f64::consts::E;
        assert!((r - (e * 0.5f64.exp() - e - e * 0.5)).abs() < 1e-14);
    }

    #[test]
    fn polynomial_matches_fourth_power() {
        let poly = BLaw::Polynomial(vec![0.0, 0.0, 0.0, 0.0, 1.0]);
        for x in [-0.5, 0.1, 2.0] {
            assert_eq!(poly.remainder(&x), BLaw::<f64>::FourthPower.remainder(&x));
        }
    }
}
