use num_complex::Complex;
use rayon::prelude::*;

use crate::linalg::{general_eigenvalues, hessenberg_eigenvalues};
use crate::model::DerivedConstants;
use crate::scalar::Real;

use super::{assemble_symbol, char_poly, routh_hurwitz, CharPoly, HurwitzChain, SymbolError};

/// Eigenvalues of `A(ϱ)` with residuals and the Hurwitz chain.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport<T> {
    pub rho_freq: T,
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: [Complex<T>; 4],
    /// Backward error `|P(λᵢ)| / Σₖ|cₖ||λᵢ|ᵏ` of each eigenvalue.
    pub residuals: [T; 4],
    pub hurwitz: HurwitzChain<T>,
    /// Smallest real part.
    pub abscissa: T,
}

/// Roots of `Σ cₖ λᵏ` (ascending, leading coefficient nonzero).
///
/// Exact zero trailing coefficients are deflated first. The rest go through
/// the companion matrix and are refined by at most two Newton steps, each
/// kept only when it lowers the residual.
pub fn polynomial_roots<T: Real>(ascending: &[T]) -> Option<Vec<Complex<T>>> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut roots = Vec::new();
    let mut start = 0;
    while start + 1 < ascending.len() && ascending[start] == T::zero() {
        roots.push(zero);
        start += 1;
    }
    let c = &ascending[start..];
    let deg = c.len() - 1;
    if deg == 0 {
        return Some(roots);
    }
    let lead = c[deg];
    let mut h = vec![vec![T::zero(); deg]; deg];
    for j in 0..deg {
        h[0][j] = -c[deg - 1 - j] / lead;
    }
    for i in 1..deg {
        h[i][i - 1] = T::one();
    }
    let eval = |z: Complex<T>| c.iter().rev().fold(zero, |acc, ck| acc * z + *ck);
    let deriv = |z: Complex<T>| (1..=deg).rev().fold(zero, |acc, k| acc * z + c[k] * T::lit(k as f64));
    for mut z in hessenberg_eigenvalues(&mut h)? {
        for _ in 0..2 {
            let d = deriv(z);
            if d.norm() == T::zero() {
                break;
            }
            let next = z - eval(z) / d;
            if next.re.is_finite() && next.im.is_finite() && eval(next).norm() < eval(z).norm() {
                z = next;
            } else {
                break;
            }
        }
        roots.push(z);
    }
    Some(roots)
}

fn sort_key<T: Real>(a: &Complex<T>, b: &Complex<T>) -> std::cmp::Ordering {
    a.re.partial_cmp(&b.re)
        .unwrap_or(std::cmp::Ordering::Equal)
        .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
}

fn residual<T: Real>(p: &CharPoly<T>, z: Complex<T>) -> T {
    let c = p.monic_ascending();
    let scale = c.iter().rev().fold(T::zero(), |acc, ck| acc * z.norm() + ck.abs());
    p.eval_complex(z).norm() / scale.max(T::min_positive_value())
}

pub fn eigenvalues<T: Real>(consts: &DerivedConstants<T>, rho_freq: T, tol: T) -> Result<SpectrumReport<T>, SymbolError> {
    if !(tol > T::zero() && tol <= T::lit(1e-6)) {
        return Err(SymbolError::Tolerance(tol.to_f64_lossy()));
    }
    let p = char_poly(consts, rho_freq)?;
    let hurwitz = routh_hurwitz(consts, rho_freq)?;
    let fail = |res: Vec<f64>| SymbolError::NonConvergence { rho_freq: rho_freq.to_f64_lossy(), residuals: res };
    let a = assemble_symbol(consts, rho_freq)?.entries;
    let mut roots = general_eigenvalues(&a).ok_or_else(|| fail(vec![]))?;
    // Structurally zero trailing coefficients mean exact zero roots.
    let zeros = p.monic_ascending().iter().take_while(|c| **c == T::zero()).count();
    roots.sort_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap_or(std::cmp::Ordering::Equal));
    roots.iter_mut().take(zeros).for_each(|z| *z = Complex::new(T::zero(), T::zero()));
    for z in roots.iter_mut() {
        for _ in 0..2 {
            let d = p.derivative_complex(*z);
            if d.norm() == T::zero() {
                break;
            }
            let next = *z - p.eval_complex(*z) / d;
            if next.re.is_finite() && next.im.is_finite() && residual(&p, next) < residual(&p, *z) {
                *z = next;
            } else {
                break;
            }
        }
    }
    roots.sort_by(sort_key);
    let eigenvalues: [Complex<T>; 4] = roots.try_into().map_err(|_| fail(vec![]))?;
    let residuals = eigenvalues.map(|z| residual(&p, z));
    if residuals.iter().any(|r| !(*r <= tol)) {
        return Err(fail(residuals.iter().map(|r| r.to_f64_lossy()).collect()));
    }
    let abscissa = eigenvalues.iter().map(|z| z.re).fold(T::infinity(), T::min);
    Ok(SpectrumReport { rho_freq, eigenvalues, residuals, hurwitz, abscissa })
}

/// Smallest real part of the eigenvalues of `A(ϱ)`.
pub fn spectral_abscissa<T: Real>(consts: &DerivedConstants<T>, rho_freq: T) -> Result<T, SymbolError> {
    Ok(eigenvalues(consts, rho_freq, T::lit(1e-9))?.abscissa)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralGap<T> {
    pub iota: T,
    pub argmin: T,
}

/// Minimum spectral abscissa over `n_grid` equispaced frequencies in `[r, R]`.
pub fn spectral_gap<T: Real>(consts: &DerivedConstants<T>, r: T, big_r: T, n_grid: usize) -> Result<SpectralGap<T>, SymbolError> {
    if !(r > T::zero() && r < big_r) || n_grid < 2 {
        return Err(SymbolError::Band { r: r.to_f64_lossy(), big_r: big_r.to_f64_lossy(), n: n_grid });
    }
    let step = (big_r - r) / T::from_usize_lossy(n_grid - 1);
    let values: Vec<(T, T)> = (0..n_grid)
        .into_par_iter()
        .map(|i| {
            let rho = if i + 1 == n_grid { big_r } else { r + step * T::from_usize_lossy(i) };
            spectral_abscissa(consts, rho).map(|a| (a, rho))
        })
        .collect::<Result<_, _>>()?;
    let (iota, argmin) = values
        .into_iter()
        .fold((T::infinity(), r), |best, cur| if cur.0 < best.0 { cur } else { best });
    if !(iota > T::zero()) {
        return Err(SymbolError::ModelInconsistency { iota: iota.to_f64_lossy(), at: argmin.to_f64_lossy() });
    }
    Ok(SpectralGap { iota, argmin })
}
