use num_complex::Complex;
use rayon::prelude::*;

use crate::scalar::Real;
use crate::spectral::Grid;

use super::{ModelError, StateField};

/// Compressible potential `d = Λ⁻¹div u` and solenoidal part `𝒫u`.
#[derive(Clone, Debug)]
pub struct HelmholtzSplit<T> {
    pub d: Vec<T>,
    pub pu: Vec<Vec<T>>,
    pub d_hat: Vec<Complex<T>>,
    pub pu_hat: Vec<Vec<Complex<T>>>,
}

fn check_mean<T: Real>(grid: &Grid<T>, u_hat: &[Vec<Complex<T>>]) -> Result<(), ModelError> {
    for (a, c) in u_hat.iter().enumerate() {
        let scale = c.iter().fold(T::one(), |m, v| m.max(v.norm()));
        if c[0].norm() > T::lit(1e-12) * scale * T::from_usize_lossy(grid.len()).sqrt() {
            const U: [&str; 3] = ["u0", "u1", "u2"];
            let mean = c[0].re / T::from_usize_lossy(grid.len());
            return Err(ModelError::NonzeroMean { field: U[a], mean: mean.to_f64_lossy() });
        }
    }
    Ok(())
}

/// `d̂ = iξ·û/|ξ|`, `𝒫̂u = û − ξ(ξ·û)/|ξ|²`.
pub fn helmholtz_split<T: Real>(state: &StateField<T>) -> Result<HelmholtzSplit<T>, ModelError> {
    let grid = state.grid();
    let u_hat = &state.spectral().u;
    check_mean(grid, u_hat)?;
    let (d_hat, pu_hat) = split_hat(grid, u_hat);
    Ok(HelmholtzSplit {
        d: grid.inverse(&d_hat),
        pu: pu_hat.iter().map(|c| grid.inverse(c)).collect(),
        d_hat,
        pu_hat,
    })
}

/// Spectral form of the split; the mean mode maps to zero.
pub fn split_hat<T: Real>(grid: &Grid<T>, u_hat: &[Vec<Complex<T>>]) -> (Vec<Complex<T>>, Vec<Vec<Complex<T>>>) {
    let dim = grid.dim();
    let zero = Complex::new(T::zero(), T::zero());
    let per_mode: Vec<(Complex<T>, [Complex<T>; 3])> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            if idx == 0 || grid.is_nyquist(idx) {
                return (zero, [zero; 3]);
            }
            let xi = grid.wavevector(idx);
            let k2 = grid.k2(idx);
            let dot = (0..dim).fold(zero, |acc, a| acc + u_hat[a][idx] * xi[a]);
            let d = Complex::new(T::zero(), T::one()) * dot / k2.sqrt();
            let mut pu = [zero; 3];
            for a in 0..dim {
                pu[a] = u_hat[a][idx] - dot * (xi[a] / k2);
            }
            (d, pu)
        })
        .collect();
    let d_hat = per_mode.iter().map(|p| p.0).collect();
    let pu_hat = (0..dim).map(|a| per_mode.iter().map(|p| p.1[a]).collect()).collect();
    (d_hat, pu_hat)
}

/// Rebuilds `u` as `−Λ⁻¹∇d − Λ⁻¹div(Λ⁻¹curl u)` with the matrix curl
/// `(curl u)_{ij} = ∂_j u_i − ∂_i u_j`.
pub fn helmholtz_reconstruct<T: Real>(grid: &Grid<T>, d_hat: &[Complex<T>], u_hat: &[Vec<Complex<T>>]) -> Vec<Vec<T>> {
    let dim = grid.dim();
    let zero = Complex::new(T::zero(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    (0..dim)
        .map(|a| {
            let hat: Vec<Complex<T>> = (0..grid.len())
                .into_par_iter()
                .map(|idx| {
                    if idx == 0 || grid.is_nyquist(idx) {
                        return zero;
                    }
                    let xi = grid.wavevector(idx);
                    let lam = grid.k2(idx).sqrt();
                    let grad_part = -(i * xi[a] / lam) * d_hat[idx];
                    let mut rot = zero;
                    for b in 0..dim {
                        let curl_ab = (i * xi[b] * u_hat[a][idx] - i * xi[a] * u_hat[b][idx]) / lam;
                        rot += i * xi[b] * curl_ab / lam;
                    }
                    grad_part - rot
                })
                .collect();
            grid.inverse(&hat)
        })
        .collect()
}
