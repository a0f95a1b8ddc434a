use crate::model::DerivedConstants;
use crate::scalar::Real;
use crate::symbol::assemble_symbol;

use super::SolverError;

/// Radial initial profile `f(ϱ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RadialProfile<T> {
    /// `f(ϱ) = e^{−w²ϱ²/2}`.
    Gaussian { width: T },
}

impl<T: Real> RadialProfile<T> {
    pub fn value(&self, rho_freq: T) -> T {
        match *self {
            RadialProfile::Gaussian { width } => (-(width * rho_freq).powi(2) / T::lit(2.0)).exp(),
        }
    }

    /// Radius beyond which `ϱ^{p} f(ϱ)² ≤ 1e−18`.
    fn cutoff(&self, power: i32) -> T {
        let mut r = T::one();
        while r.powi(power) * self.value(r).powi(2) > T::lit(1e-18) {
            r += T::lit(0.25);
        }
        r
    }
}

/// Quantity whose `L²(ℝ³)` norm is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    /// `(ρ, u, θ, j₀)`.
    Full,
    /// `(ρ, u)`.
    Fluid,
    /// `(θ, j₀)`.
    Thermal,
    /// `Ξ = γθ − b j₀`.
    Xi,
    /// `Θ = 3𝒞θ + 2j₀`.
    BigTheta,
}

/// One semigroup norm request. `v0` holds the compressible amplitudes
/// `(ρ̂, d̂, θ̂, ĵ₀)` of `U₀(ξ) = v₀ f(|ξ|)`; `pu` the size of a solenoidal
/// velocity component carried by the same profile.
#[derive(Clone, Debug, PartialEq)]
pub struct SemigroupQuery<T> {
    pub v0: [T; 4],
    pub pu: T,
    pub profile: RadialProfile<T>,
    /// Derivative order `m`.
    pub m: u32,
    pub observable: Observable,
    /// Measure `∂ₜU = −𝔸U` instead of `U`.
    pub time_derivative: bool,
    /// Relative quadrature tolerance. Evaluation fails when the achieved
    /// relative error exceeds its square root.
    pub rel_tol: T,
}

impl<T: Real> SemigroupQuery<T> {
    pub fn new(v0: [T; 4], m: u32, observable: Observable) -> Self {
        SemigroupQuery {
            v0,
            pu: T::zero(),
            profile: RadialProfile::Gaussian { width: T::one() },
            m,
            observable,
            time_derivative: false,
            rel_tol: T::lit(1e-10),
        }
    }
}

/// Result of an adaptive quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

/// Adaptive Simpson on `[a, b]` with Richardson extrapolation and absolute
/// tolerance `tol`. Panels deeper than `max_depth`, and every panel left once
/// `max_evals` evaluations are spent, are accepted as they are; their error
/// estimates are included in the result.
pub fn adaptive_simpson<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, tol: T, max_depth: u32, max_evals: usize) -> Quadrature<T> {
    struct Panel<T> {
        a: T,
        b: T,
        fa: T,
        fm: T,
        fb: T,
        whole: T,
        tol: T,
        depth: u32,
    }
    let six = T::lit(6.0);
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let mut stack = vec![Panel { a, b, fa, fm, fb, whole: (b - a) * (fa + T::lit(4.0) * fm + fb) / six, tol, depth: 0 }];
    let mut out = Quadrature { value: T::zero(), error: T::zero(), evaluations: 3 };
    while let Some(p) = stack.pop() {
        let m = (p.a + p.b) / two;
        let lm = (p.a + m) / two;
        let rm = (m + p.b) / two;
        let (flm, frm) = (f(lm), f(rm));
        out.evaluations += 2;
        let left = (m - p.a) * (p.fa + T::lit(4.0) * flm + p.fm) / six;
        let right = (p.b - m) * (p.fm + T::lit(4.0) * frm + p.fb) / six;
        let delta = left + right - p.whole;
        if delta.abs() <= T::lit(15.0) * p.tol || p.depth >= max_depth || out.evaluations >= max_evals {
            out.value += left + right + delta / T::lit(15.0);
            out.error += delta.abs() / T::lit(15.0);
        } else {
            let tol = p.tol / two;
            stack.push(Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left, tol, depth: p.depth + 1 });
            stack.push(Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right, tol, depth: p.depth + 1 });
        }
    }
    out
}

fn observe<T: Real>(consts: &DerivedConstants<T>, w: &[T; 4], obs: Observable) -> T {
    match obs {
        Observable::Full => w.iter().map(|x| *x * *x).sum(),
        Observable::Fluid => w[0] * w[0] + w[1] * w[1],
        Observable::Thermal => w[2] * w[2] + w[3] * w[3],
        Observable::Xi => (consts.gamma * w[2] - consts.b_bar * w[3]).powi(2),
        Observable::BigTheta => (T::lit(3.0) * consts.c_light * w[2] + T::lit(2.0) * w[3]).powi(2),
    }
}

/// `Γ(k/2)` for odd `k`.
fn gamma_half<T: Real>(k: u32) -> T {
    let mut g = T::pi().sqrt();
    let mut x = T::lit(0.5);
    for _ in 0..(k - 1) / 2 {
        g *= x;
        x += T::one();
    }
    g
}

/// `4π ∫ ϱ^{2p+2} e^{−sϱ²} dϱ = 2π Γ(p + 3/2) / s^{p+3/2}`.
fn gaussian_moment<T: Real>(p: u32, s: T) -> T {
    T::lit(2.0) * T::pi() * gamma_half::<T>(2 * p + 3) / s.powf(T::lit(p as f64 + 1.5))
}

fn squared_norm<T: Real>(consts: &DerivedConstants<T>, q: &SemigroupQuery<T>, t: T) -> Result<T, SolverError<T>> {
    let power = 2 * q.m as i32 + 2 + if q.time_derivative { 4 } else { 0 };
    let r_max = q.profile.cutoff(power);
    let integrand = |r: T| -> T {
        let a = assemble_symbol(consts, r).expect("non-negative frequency").entries;
        let e = match a.scale(&-t).expm() {
            Some(e) => e,
            None => return T::nan(),
        };
        let mut w = e.mul_vec(&q.v0);
        if q.time_derivative {
            w = a.mul_vec(&w);
        }
        let f = q.profile.value(r);
        r.powi(2 * q.m as i32 + 2) * f * f * observe(consts, &w, q.observable)
    };

    // Geometric panels resolve the concentration near ϱ ~ t^{-1/2}.
    let mut edges = vec![T::zero()];
    for j in (0..48).rev() {
        edges.push(r_max * T::lit(2f64.powi(-j)));
    }
    let coarse: T = edges
        .windows(2)
        .map(|e| adaptive_simpson(&integrand, e[0], e[1], T::infinity(), 0, 5).value)
        .sum();
    let scale = coarse.abs().max(T::min_positive_value());
    let tol = q.rel_tol * scale / T::from_usize_lossy(edges.len());
    let mut total = T::zero();
    let mut error = T::zero();
    for e in edges.windows(2) {
        let part = adaptive_simpson(&integrand, e[0], e[1], tol, 40, 200_000);
        total += part.value;
        error += part.error;
    }
    // At large t the propagator carries round-off of order eps·‖tA‖, which
    // caps the attainable accuracy; results within √rel_tol are kept.
    if !total.is_finite() || error > q.rel_tol.sqrt() * total.abs().max(T::min_positive_value()) {
        return Err(SolverError::Quadrature {
            achieved: (error / total.abs()).to_f64_lossy(),
            requested: q.rel_tol.to_f64_lossy(),
        });
    }
    let mut value = T::lit(4.0) * T::pi() * total;

    let solenoidal = matches!(q.observable, Observable::Full | Observable::Fluid);
    if solenoidal && q.pu != T::zero() {
        let RadialProfile::Gaussian { width } = q.profile;
        let s = width * width + T::lit(2.0) * consts.mu * t;
        let (p, factor) = if q.time_derivative { (q.m + 2, consts.mu * consts.mu) } else { (q.m, T::one()) };
        value += q.pu * q.pu * factor * gaussian_moment(p, s);
    }
    Ok(value)
}

/// `‖∇^m e^{−t𝔸}U₀‖_{L²(ℝ³)} = (4π ∫ ϱ^{2m+2} |O(e^{−tA(ϱ)}v₀) f(ϱ)|² dϱ)^{1/2}`
/// at each time, with `O` the selected observable.
pub fn semigroup_norms<T: Real>(
    consts: &DerivedConstants<T>,
    query: &SemigroupQuery<T>,
    times: &[T],
) -> Result<Vec<T>, SolverError<T>> {
    if query.v0.iter().all(|x| *x == T::zero()) && query.pu == T::zero() {
        return Ok(vec![T::zero(); times.len()]);
    }
    if times.iter().any(|t| !(*t >= T::zero())) {
        return Err(SolverError::Config("times must be non-negative".into()));
    }
    use rayon::prelude::*;
    times.par_iter().map(|&t| squared_norm(consts, query, t).map(|v| v.sqrt())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_constants, PhysicalParams};

    #[test]
    fn simpson_polynomial_and_gaussian() {
        let q = adaptive_simpson(&|x: f64| x * x * x, 0.0, 2.0, 1e-14, 30, 10_000);
        assert!((q.value - 4.0).abs() < 1e-13);
        let q = adaptive_simpson(&|x: f64| (-x * x).exp(), 0.0, 10.0, 1e-14, 40, 100_000);
        assert!((q.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_moment_closed_form() {
        // 4π∫ϱ²e^{−ϱ²} = π^{3/2}
        assert!((gaussian_moment::<f64>(0, 1.0) - std::f64::consts::PI.powf(1.5)).abs() < 1e-13);
    }

    #[test]
    fn initial_norm_is_gaussian_moment() {
        let c = derive_constants(&PhysicalParams::reference()).unwrap();
        let q = SemigroupQuery::new([1.0, 0.0, 0.0, 0.0], 0, Observable::Full);
        let n = semigroup_norms(&c, &q, &[0.0]).unwrap()[0];
        assert!((n - std::f64::consts::PI.powf(0.75)).abs() < 1e-10);
    }

    #[test]
    fn zero_data_gives_zero() {
        let c = derive_constants(&PhysicalParams::reference()).unwrap();
        let q = SemigroupQuery::new([0.0; 4], 2, Observable::Full);
        assert_eq!(semigroup_norms(&c, &q, &[0.0, 5.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn solenoidal_part_is_heat_kernel() {
        let c = derive_constants(&PhysicalParams::reference()).unwrap();
        let mut q = SemigroupQuery::new([0.0; 4], 1, Observable::Fluid);
        q.pu = 1.0;
        q.v0 = [1e-300, 0.0, 0.0, 0.0];
        let n = semigroup_norms(&c, &q, &[3.0]).unwrap()[0];
        // 4π∫ϱ⁴e^{−(1+6)ϱ²} = 2πΓ(5/2)/7^{5/2}
        let expect = (2.0 * std::f64::consts::PI * 0.75 * std::f64::consts::PI.sqrt() / 7f64.powf(2.5)).sqrt();
        assert!((n - expect).abs() < 1e-12 * expect);
    }
}
