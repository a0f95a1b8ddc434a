//! Uniform periodic grids and their discrete Fourier transform.
//!
//! Samples are stored row-major with the last axis fastest. Spectral
//! coefficients use the unnormalized forward convention
//! `f̂_m = Σ_x f(x) e^{-i k·x}`; the inverse divides by the point count.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftDirection;
use thiserror::Error;

use crate::scalar::{LineFft, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("dimension must be 1, 2 or 3 (got {0})")]
    Dimension(usize),
    #[error("points per axis must be a power of two and at least 4 (got {0})")]
    Points(usize),
    #[error("box length must be positive and finite (got {0})")]
    Length(f64),
}

struct Plans<T> {
    forward: Arc<dyn LineFft<T>>,
    inverse: Arc<dyn LineFft<T>>,
}

/// A `dim`-dimensional periodic box `[0, length)^dim` with `n` points per axis.
#[derive(Clone)]
pub struct Grid<T: Real> {
    dim: usize,
    n: usize,
    length: T,
    plans: Arc<Plans<T>>,
}

impl<T: Real> std::fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim)
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl<T: Real> PartialEq for Grid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.n == other.n && self.length == other.length
    }
}

impl<T: Real> Grid<T> {
    pub fn new(dim: usize, n: usize, length: T) -> Result<Self, GridError> {
        if !(1..=3).contains(&dim) {
            return Err(GridError::Dimension(dim));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(GridError::Points(n));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(GridError::Length(length.to_f64_lossy()));
        }
        let plans = Plans {
            forward: T::plan_fft(n, FftDirection::Forward),
            inverse: T::plan_fft(n, FftDirection::Inverse),
        };
        Ok(Grid { dim, n, length, plans: Arc::new(plans) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> T {
        self.length
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> T {
        self.length / T::from_usize_lossy(self.n)
    }

    /// Volume of one grid cell.
    pub fn cell_volume(&self) -> T {
        self.dx().powi(self.dim as i32)
    }

    /// Smallest nonzero wavenumber, `2π / length`.
    pub fn fundamental(&self) -> T {
        T::two_pi() / self.length
    }

    /// Axis indices of a flat index; unused axes are zero.
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let mut out = [0; 3];
        let mut rem = idx;
        for axis in (0..self.dim).rev() {
            out[axis] = rem % self.n;
            rem /= self.n;
        }
        out
    }

    pub fn ravel(&self, ijk: [usize; 3]) -> usize {
        (0..self.dim).fold(0, |acc, axis| acc * self.n + ijk[axis] % self.n)
    }

    /// Signed integer mode numbers of a flat index. The Nyquist index maps
    /// to `-n/2`.
    pub fn mode(&self, idx: usize) -> [i64; 3] {
        let half = self.n / 2;
        self.unravel(idx).map(|i| if i < half { i as i64 } else { i as i64 - self.n as i64 })
    }

    /// `|m|²` for the integer mode vector.
    pub fn mode_norm2(&self, idx: usize) -> i64 {
        self.mode(idx).iter().map(|m| m * m).sum()
    }

    pub fn is_nyquist(&self, idx: usize) -> bool {
        let nyq = -(self.n as i64 / 2);
        self.mode(idx)[..self.dim].iter().any(|&m| m == nyq)
    }

    /// Largest resolved |m| along any axis.
    pub fn max_mode(&self) -> i64 {
        self.n as i64 / 2 - 1
    }

    pub fn wavevector(&self, idx: usize) -> [T; 3] {
        let k0 = self.fundamental();
        self.mode(idx).map(|m| k0 * T::lit(m as f64))
    }

    /// `|ξ|²`.
    pub fn k2(&self, idx: usize) -> T {
        let k0 = self.fundamental();
        k0 * k0 * T::lit(self.mode_norm2(idx) as f64)
    }

    /// Physical coordinates of a grid point.
    pub fn coords(&self, idx: usize) -> [T; 3] {
        let dx = self.dx();
        self.unravel(idx).map(|i| dx * T::from_usize_lossy(i))
    }

    fn transform(&self, data: &mut [Complex<T>], plan: &Arc<dyn LineFft<T>>) {
        assert_eq!(data.len(), self.len(), "buffer does not match grid");
        let n = self.n;
        for axis in 0..self.dim {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            if stride == 1 {
                data.par_chunks_mut(n * 64).for_each(|chunk| plan.process(chunk));
                continue;
            }
            data.par_chunks_mut(n * stride).for_each(|block| {
                let mut lines = vec![Complex::new(T::zero(), T::zero()); n * stride];
                for line in 0..stride {
                    for i in 0..n {
                        lines[line * n + i] = block[i * stride + line];
                    }
                }
                plan.process(&mut lines);
                for line in 0..stride {
                    for i in 0..n {
                        block[i * stride + line] = lines[line * n + i];
                    }
                }
            });
        }
    }

    /// In-place unnormalized forward transform.
    pub fn forward_inplace(&self, data: &mut [Complex<T>]) {
        self.transform(data, &self.plans.forward);
    }

    /// In-place inverse transform, normalized so that it inverts
    /// [`Grid::forward_inplace`].
    pub fn inverse_inplace(&self, data: &mut [Complex<T>]) {
        self.transform(data, &self.plans.inverse);
        let scale = T::one() / T::from_usize_lossy(self.len());
        data.par_iter_mut().for_each(|v| *v = *v * scale);
    }

    pub fn forward(&self, samples: &[T]) -> Vec<Complex<T>> {
        let mut buf: Vec<Complex<T>> = samples.iter().map(|&x| Complex::new(x, T::zero())).collect();
        self.forward_inplace(&mut buf);
        buf
    }

    /// Inverse transform keeping the real part.
    pub fn inverse(&self, hat: &[Complex<T>]) -> Vec<T> {
        let mut buf = hat.to_vec();
        self.inverse_inplace(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Zeroes every coefficient carrying a Nyquist index; such modes have no
    /// real derivative.
    pub fn zero_nyquist(&self, hat: &mut [Complex<T>]) {
        hat.par_iter_mut().enumerate().for_each(|(idx, v)| {
            if self.is_nyquist(idx) {
                *v = Complex::new(T::zero(), T::zero());
            }
        });
    }

    /// Multiplies by `i ξ_axis`.
    pub fn derivative_hat(&self, hat: &[Complex<T>], axis: usize) -> Vec<Complex<T>> {
        hat.par_iter()
            .enumerate()
            .map(|(idx, &v)| {
                if self.is_nyquist(idx) {
                    Complex::new(T::zero(), T::zero())
                } else {
                    v * Complex::new(T::zero(), self.wavevector(idx)[axis])
                }
            })
            .collect()
    }

    /// Spectral multiplier `m(|ξ|²)` applied to a coefficient array.
    pub fn apply_radial(&self, hat: &[Complex<T>], m: impl Fn(T) -> T + Sync) -> Vec<Complex<T>> {
        hat.par_iter()
            .enumerate()
            .map(|(idx, &v)| if self.is_nyquist(idx) { Complex::new(T::zero(), T::zero()) } else { v * m(self.k2(idx)) })
            .collect()
    }

    /// `‖f‖²_{L²}` of the field with the given coefficients (discrete Plancherel).
    pub fn l2_norm_sq_hat(&self, hat: &[Complex<T>]) -> T {
        let total = T::from_usize_lossy(self.len());
        let s: T = hat.par_iter().map(|v| v.norm_sqr()).sum::<T>();
        s * self.length.powi(self.dim as i32) / (total * total)
    }

    /// `‖f‖²_{L²}` from physical samples.
    pub fn l2_norm_sq(&self, samples: &[T]) -> T {
        samples.par_iter().map(|&v| v * v).sum::<T>() * self.cell_volume()
    }

    /// `∫ f ḡ` for two coefficient arrays.
    pub fn inner_hat(&self, f: &[Complex<T>], g: &[Complex<T>]) -> Complex<T> {
        let total = T::from_usize_lossy(self.len());
        let s = f
            .par_iter()
            .zip(g.par_iter())
            .map(|(a, b)| a * b.conj())
            .reduce(|| Complex::new(T::zero(), T::zero()), |x, y| x + y);
        s * (self.length.powi(self.dim as i32) / (total * total))
    }

    /// `‖Λ^s f‖²_{L²}`, skipping the mean mode.
    pub fn hom_sobolev_sq_hat(&self, hat: &[Complex<T>], s: T) -> T {
        let total = T::from_usize_lossy(self.len());
        let acc: T = hat
            .par_iter()
            .enumerate()
            .filter(|(idx, _)| *idx != 0)
            .map(|(idx, v)| self.k2(idx).powf(s) * v.norm_sqr())
            .sum();
        acc * self.length.powi(self.dim as i32) / (total * total)
    }
}
