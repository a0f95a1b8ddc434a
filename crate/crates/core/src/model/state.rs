use std::sync::OnceLock;

use num_complex::Complex;
use rayon::prelude::*;

use crate::scalar::Real;
use crate::spectral::Grid;

use super::ModelError;

/// Spectral coefficients of every component of a [`StateField`].
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralState<T> {
    pub rho: Vec<Complex<T>>,
    pub u: Vec<Vec<Complex<T>>>,
    pub theta: Vec<Complex<T>>,
    pub j0: Vec<Complex<T>>,
}

impl<T: Real> SpectralState<T> {
    pub fn zeros(len: usize, dim: usize) -> Self {
        let z = vec![Complex::new(T::zero(), T::zero()); len];
        SpectralState { rho: z.clone(), u: vec![z.clone(); dim], theta: z.clone(), j0: z }
    }

    pub fn components(&self) -> impl Iterator<Item = &Vec<Complex<T>>> {
        std::iter::once(&self.rho).chain(self.u.iter()).chain([&self.theta, &self.j0])
    }

    pub fn components_mut(&mut self) -> impl Iterator<Item = &mut Vec<Complex<T>>> {
        std::iter::once(&mut self.rho).chain(self.u.iter_mut()).chain([&mut self.theta, &mut self.j0])
    }
}

/// Perturbation `(ρ̃, ũ, θ̃, j₀)` on a periodic grid.
///
/// Physical samples are the primary storage. The spectral form is computed
/// on first use and dropped by every mutable access.
#[derive(Clone, Debug)]
pub struct StateField<T: Real> {
    grid: Grid<T>,
    rho: Vec<T>,
    u: Vec<Vec<T>>,
    theta: Vec<T>,
    j0: Vec<T>,
    cache: OnceLock<SpectralState<T>>,
}

fn mean<T: Real>(v: &[T]) -> T {
    v.iter().copied().sum::<T>() / T::from_usize_lossy(v.len())
}

fn remove_mean<T: Real>(v: &mut [T]) {
    let m = mean(v);
    v.iter_mut().for_each(|x| *x -= m);
}

impl<T: Real> StateField<T> {
    /// The equilibrium (all perturbations zero).
    pub fn zeros(grid: &Grid<T>) -> Self {
        let z = vec![T::zero(); grid.len()];
        StateField {
            grid: grid.clone(),
            rho: z.clone(),
            u: vec![z.clone(); grid.dim()],
            theta: z.clone(),
            j0: z,
            cache: OnceLock::new(),
        }
    }

    /// Builds a state from samples, checking shapes and rejecting fields
    /// whose mean is not zero to rounding.
    pub fn from_fields(
        grid: &Grid<T>,
        rho: Vec<T>,
        u: Vec<Vec<T>>,
        theta: Vec<T>,
        j0: Vec<T>,
    ) -> Result<Self, ModelError> {
        let s = Self::assemble(grid, rho, u, theta, j0)?;
        for (name, f) in s.named_components() {
            let scale = f.iter().fold(T::one(), |m, x| m.max(x.abs()));
            let m = mean(f);
            if m.abs() > T::lit(1e-12) * scale * T::from_usize_lossy(grid.len()).sqrt() {
                return Err(ModelError::NonzeroMean { field: name, mean: m.to_f64_lossy() });
            }
        }
        Ok(s)
    }

    /// Builds a state from samples and projects out the mean of each field.
    pub fn from_fields_projected(
        grid: &Grid<T>,
        rho: Vec<T>,
        u: Vec<Vec<T>>,
        theta: Vec<T>,
        j0: Vec<T>,
    ) -> Result<Self, ModelError> {
        let mut s = Self::assemble(grid, rho, u, theta, j0)?;
        s.enforce_zero_mean();
        Ok(s)
    }

    fn assemble(grid: &Grid<T>, rho: Vec<T>, u: Vec<Vec<T>>, theta: Vec<T>, j0: Vec<T>) -> Result<Self, ModelError> {
        let n = grid.len();
        if u.len() != grid.dim() {
            return Err(ModelError::Shape(format!("velocity has {} components, grid has dimension {}", u.len(), grid.dim())));
        }
        for (name, len) in [("rho", rho.len()), ("theta", theta.len()), ("j0", j0.len())]
            .into_iter()
            .chain(u.iter().map(|c| ("u", c.len())))
        {
            if len != n {
                return Err(ModelError::Shape(format!("{name} has {len} samples, grid has {n}")));
            }
        }
        Ok(StateField { grid: grid.clone(), rho, u, theta, j0, cache: OnceLock::new() })
    }

    /// Builds a state from spectral coefficients; the mean and Nyquist
    /// coefficients are discarded.
    pub fn from_spectral(grid: &Grid<T>, mut hat: SpectralState<T>) -> Result<Self, ModelError> {
        let n = grid.len();
        if hat.u.len() != grid.dim() || hat.components().any(|c| c.len() != n) {
            return Err(ModelError::Shape("spectral state does not match grid".into()));
        }
        for c in hat.components_mut() {
            c[0] = Complex::new(T::zero(), T::zero());
            grid.zero_nyquist(c);
        }
        let back = |c: &Vec<Complex<T>>| grid.inverse(c);
        let state = StateField {
            grid: grid.clone(),
            rho: back(&hat.rho),
            u: hat.u.iter().map(back).collect(),
            theta: back(&hat.theta),
            j0: back(&hat.j0),
            cache: OnceLock::new(),
        };
        // Samples are the real part; the cache must be their transform.
        let _ = state.spectral();
        Ok(state)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn rho(&self) -> &[T] {
        &self.rho
    }

    pub fn u(&self) -> &[Vec<T>] {
        &self.u
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn j0(&self) -> &[T] {
        &self.j0
    }

    pub fn named_components(&self) -> Vec<(&'static str, &[T])> {
        const U: [&str; 3] = ["u0", "u1", "u2"];
        let mut out: Vec<(&'static str, &[T])> = vec![("rho", &self.rho)];
        out.extend(self.u.iter().enumerate().map(|(i, c)| (U[i], c.as_slice())));
        out.push(("theta", &self.theta));
        out.push(("j0", &self.j0));
        out
    }

    /// Mutable access to every component; invalidates the spectral cache.
    pub fn components_mut(&mut self) -> Vec<&mut Vec<T>> {
        self.cache = OnceLock::new();
        let mut out = vec![&mut self.rho];
        out.extend(self.u.iter_mut());
        out.push(&mut self.theta);
        out.push(&mut self.j0);
        out
    }

    pub fn enforce_zero_mean(&mut self) {
        for c in self.components_mut() {
            remove_mean(c);
        }
    }

    /// Spectral coefficients, computed once per physical state.
    pub fn spectral(&self) -> &SpectralState<T> {
        self.cache.get_or_init(|| {
            let fwd = |v: &Vec<T>| self.grid.forward(v);
            let mut rho = fwd(&self.rho);
            let mut theta = fwd(&self.theta);
            let mut j0 = fwd(&self.j0);
            let mut u: Vec<_> = self.u.iter().map(fwd).collect();
            for c in [&mut rho, &mut theta, &mut j0].into_iter().chain(u.iter_mut()) {
                self.grid.zero_nyquist(c);
            }
            SpectralState { rho, u, theta, j0 }
        })
    }

    pub fn spectral_is_cached(&self) -> bool {
        self.cache.get().is_some()
    }

    /// Means of every component, in `named_components` order.
    pub fn means(&self) -> Vec<T> {
        self.named_components().iter().map(|(_, f)| mean(f)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.named_components().iter().all(|(_, f)| f.par_iter().all(|x| x.is_finite()))
    }

    /// `min(1 + ρ̃)`.
    pub fn min_density(&self) -> T {
        T::one() + self.rho.par_iter().copied().reduce(T::infinity, T::min)
    }

    /// `min(1 + θ̃)`.
    pub fn min_temperature(&self) -> T {
        T::one() + self.theta.par_iter().copied().reduce(T::infinity, T::min)
    }

    /// Multiplies every component by `s`.
    pub fn scaled(&self, s: T) -> Self {
        let mut out = self.clone();
        for c in out.components_mut() {
            c.iter_mut().for_each(|x| *x *= s);
        }
        out
    }

    /// `‖∇^k f‖²_{L²}` summed over all components.
    pub fn grad_norm_sq(&self, k: u32) -> T {
        let s = T::lit(k as f64);
        self.spectral().components().map(|c| self.grid.hom_sobolev_sq_hat(c, s)).sum()
    }

    /// `‖(ρ̃, ũ, θ̃, j₀)‖²_{H^m} = Σ_{k≤m} ‖∇^k ·‖²`.
    pub fn sobolev_norm_sq(&self, m: u32) -> T {
        (0..=m).map(|k| self.grad_norm_sq(k)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid<f64> {
        Grid::new(2, 16, 2.0 * std::f64::consts::PI).unwrap()
    }

    fn wave(g: &Grid<f64>, kx: f64, ky: f64) -> Vec<f64> {
        (0..g.len())
            .map(|i| {
                let x = g.coords(i);
                (kx * x[0] + ky * x[1]).sin()
            })
            .collect()
    }

    #[test]
    fn rejects_mean_and_shape() {
        let g = grid();
        let ones = vec![1.0; g.len()];
        let z = vec![0.0; g.len()];
        let err = StateField::from_fields(&g, ones.clone(), vec![z.clone(); 2], z.clone(), z.clone()).unwrap_err();
        assert!(matches!(err, ModelError::NonzeroMean { field: "rho", .. }));
        let err = StateField::from_fields(&g, z.clone(), vec![z.clone()], z.clone(), z.clone()).unwrap_err();
        assert!(matches!(err, ModelError::Shape(_)));
        let s = StateField::from_fields_projected(&g, ones, vec![z.clone(); 2], z.clone(), z).unwrap();
        assert!(s.means().iter().all(|m| m.abs() < 1e-15));
    }

    #[test]
    fn cache_matches_transform_and_invalidates() {
        let g = grid();
        let z = vec![0.0; g.len()];
        let mut s = StateField::from_fields(&g, wave(&g, 1.0, 2.0), vec![z.clone(), wave(&g, 3.0, 0.0)], z.clone(), z)
            .unwrap();
        let direct = g.forward(s.rho());
        let cached = &s.spectral().rho;
        assert!(direct.iter().zip(cached).all(|(a, b)| (a - b).norm() < 1e-12));
        s.components_mut()[0][3] += 1.0;
        assert!(!s.spectral_is_cached());
    }

    #[test]
    fn sobolev_norm_of_single_mode() {
        let g = grid();
        let z = vec![0.0; g.len()];
        let s = StateField::from_fields(&g, wave(&g, 3.0, 4.0), vec![z.clone(); 2], z.clone(), z).unwrap();
        // ‖sin(k·x)‖² = (2π)²/2, |k| = 5
        let base = (2.0 * std::f64::consts::PI).powi(2) / 2.0;
        assert!((s.grad_norm_sq(0) / base - 1.0).abs() < 1e-12);
        assert!((s.grad_norm_sq(2) / (base * 625.0) - 1.0).abs() < 1e-12);
    }
}
