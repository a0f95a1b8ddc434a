use num_complex::Complex;

use crate::model::DerivedConstants;
use crate::scalar::Real;

/// Symbol of the linear operator on `(ρ̂, û₁..û_d, θ̂, ĵ₀)` at wavevector `ξ`.
///
/// The viscous block comes from `−μΔ − (μ+λ)∇div`, i.e.
/// `μ|ξ|²δᵢⱼ + (μ+λ)ξᵢξⱼ`.
pub fn full_symbol<T: Real>(consts: &DerivedConstants<T>, xi: &[T]) -> Vec<Vec<Complex<T>>> {
    let d = xi.len();
    let n = d + 3;
    let zero = Complex::new(T::zero(), T::zero());
    let re = |x: T| Complex::new(x, T::zero());
    let im = |x: T| Complex::new(T::zero(), x);
    let mu = consts.mu;
    let lambda = consts.nu - mu - mu;
    let k2: T = xi.iter().map(|x| *x * *x).sum();
    let two3 = T::lit(2.0) / T::lit(3.0);
    let (it, ij) = (d + 1, d + 2);

    let mut m = vec![vec![zero; n]; n];
    for a in 0..d {
        m[0][1 + a] = im(xi[a]);
        m[1 + a][0] = im(xi[a]);
        for b in 0..d {
            let diag = if a == b { mu * k2 } else { T::zero() };
            m[1 + a][1 + b] = re(diag + (mu + lambda) * xi[a] * xi[b]);
        }
        m[1 + a][it] = im(xi[a]);
        m[1 + a][ij] = im(xi[a] / (T::lit(3.0) * consts.c_light));
        m[it][1 + a] = im(two3 * xi[a]);
    }
    m[it][it] = re(two3 * consts.kappa * k2 + two3 * consts.gamma);
    m[it][ij] = re(-two3 * consts.b_bar);
    m[ij][it] = re(-consts.c_light * consts.gamma);
    m[ij][ij] = re(consts.a_diff * k2 + consts.c_light * consts.b_bar);
    m
}
