//! Dyadic frequency decomposition on the periodic grid.
//!
//! Shells are sharp: shell `k` holds the wavevectors with
//! `2^{k−1} < |ξ| ≤ 2^k`. The masks are indicators, so they partition the
//! nonzero frequencies exactly and the shell pieces are mutually orthogonal.

use num_complex::Complex;
use rayon::prelude::*;
use thiserror::Error;

use crate::model::DerivedConstants;
use crate::scalar::Real;
use crate::spectral::Grid;
use crate::symbol::mode_change;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("grid resolves |xi| up to {resolved} but the band above k1 needs {needed}; use at least N = {required_n} points per axis")]
    Resolution { resolved: f64, needed: f64, required_n: usize },
    #[error("input has spectral content beyond the 2/3 cutoff |m| <= {cutoff} (largest offending coefficient {magnitude:e})")]
    Aliasing { cutoff: i64, magnitude: f64 },
    #[error("field length {got} does not match the grid ({expected})")]
    Shape { got: usize, expected: usize },
    #[error("field has nonzero mean")]
    NonzeroMean,
}

/// Low/high thresholds of the frequency analysis.
#[derive(Clone, Debug, PartialEq)]
pub struct Thresholds<T> {
    /// `k₀ = ⌊log₂ r₀⌋ − 1`.
    pub k0: i32,
    /// Smallest positive integer with `2^{2k₁−3} > max{1/(9aν𝒞²), 2(b+𝒞γ)²/(aγ)}`.
    pub k1: i32,
    pub r0: T,
    /// `R₀ = 2^{k₁+1}`.
    pub big_r0: T,
    /// The three quantities whose minimum is `r₀`, in order.
    pub r0_candidates: [T; 3],
}

impl<T: Real> Thresholds<T> {
    pub fn compute(consts: &DerivedConstants<T>) -> Self {
        let DerivedConstants { nu, gamma: g, a_diff: a, b_bar: b, c_light: c, .. } = consts.clone();
        let one = T::one();
        let two = T::lit(2.0);
        let bound = (one / (T::lit(9.0) * a * nu * c * c)).max(two * (b + c * g).powi(2) / (a * g));
        let mut k1 = 1;
        while !(two.powi(2 * k1 - 3) > bound) {
            k1 += 1;
        }

        let m = mode_change(consts);
        let c5 = m.c5_const;
        let coupling = m.c1 * m.c4.abs() / (T::lit(4.0) * c) + T::lit(3.0) * m.c2 * m.c6.abs() / (T::lit(4.0) * g);
        let damping = T::lit(3.0) * m.c2 * c5 / (T::lit(4.0) * g);
        let middle = if coupling == T::zero() {
            T::infinity()
        } else {
            (coupling * coupling * c / (m.c1 * m.c3)).powf(T::lit(-0.5)) * damping
        };
        let r0_candidates = [one / (two * nu), middle, T::lit(0.5)];
        let r0 = r0_candidates.iter().copied().fold(T::infinity(), T::min);
        let k0 = r0.log2().floor().to_f64_lossy() as i32 - 1;
        Thresholds { k0, k1, r0, big_r0: two.powi(k1 + 1), r0_candidates }
    }
}

/// Dyadic index of a frequency with `|ξ|² = k2 > 0`: the `k` with
/// `4^{k−1} < k2 ≤ 4^k`.
pub fn shell_index<T: Real>(k2: T) -> i32 {
    let four = T::lit(4.0);
    let mut k = (k2.log2() / T::lit(2.0)).ceil().to_f64_lossy() as i32;
    while four.powi(k - 1) >= k2 {
        k -= 1;
    }
    while k2 > four.powi(k) {
        k += 1;
    }
    k
}

/// Bank of sharp dyadic projectors on a grid.
#[derive(Clone, Debug)]
pub struct Decomposition<T: Real> {
    grid: Grid<T>,
    shell: Vec<Option<i32>>,
    pub k_min: i32,
    pub k_max: i32,
    pub thresholds: Thresholds<T>,
}

/// Frequency window for Besov norms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Window {
    All,
    /// `k ≤ k₁`.
    Long,
    /// `k > k₁`.
    Short,
}

/// A projected field together with a flag set when the requested shell lies
/// outside the range the grid resolves.
#[derive(Clone, Debug)]
pub struct Projection<T> {
    pub field: Vec<T>,
    pub empty_band: bool,
}

/// Strict constructor: requires the grid to resolve every shell up to `R₀`
/// along each axis.
pub fn build_decomposition<T: Real>(grid: &Grid<T>, consts: &DerivedConstants<T>) -> Result<Decomposition<T>, LpError> {
    let thresholds = Thresholds::compute(consts);
    let k0 = grid.fundamental();
    let resolved = k0 * T::lit(grid.max_mode() as f64);
    if resolved < thresholds.big_r0 {
        let needed_modes = (thresholds.big_r0 / k0).ceil().to_f64_lossy() as usize;
        let required_n = (2 * (needed_modes + 1)).next_power_of_two();
        return Err(LpError::Resolution {
            resolved: resolved.to_f64_lossy(),
            needed: thresholds.big_r0.to_f64_lossy(),
            required_n,
        });
    }
    Ok(Decomposition::new(grid, thresholds))
}

impl<T: Real> Decomposition<T> {
    /// Builds the projector bank for any grid. Shells above the grid's reach
    /// are simply empty.
    pub fn new(grid: &Grid<T>, thresholds: Thresholds<T>) -> Self {
        let shell: Vec<Option<i32>> = (0..grid.len())
            .into_par_iter()
            .map(|idx| if idx == 0 || grid.is_nyquist(idx) { None } else { Some(shell_index(grid.k2(idx))) })
            .collect();
        let k_min = shell.iter().flatten().copied().min().unwrap_or(0);
        let k_max = shell.iter().flatten().copied().max().unwrap_or(0);
        Decomposition { grid: grid.clone(), shell, k_min, k_max, thresholds }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn k1(&self) -> i32 {
        self.thresholds.k1
    }

    /// Shell of a flat spectral index (`None` for the mean and Nyquist modes).
    pub fn shell_of(&self, idx: usize) -> Option<i32> {
        self.shell[idx]
    }

    pub fn in_window(&self, k: i32, window: Window) -> bool {
        match window {
            Window::All => true,
            Window::Long => k <= self.thresholds.k1,
            Window::Short => k > self.thresholds.k1,
        }
    }

    /// Indicator mask of shell `k`.
    pub fn mask(&self, k: i32) -> Vec<bool> {
        self.shell.iter().map(|s| *s == Some(k)).collect()
    }

    pub fn project_hat(&self, hat: &[Complex<T>], k: i32) -> Vec<Complex<T>> {
        let zero = Complex::new(T::zero(), T::zero());
        hat.par_iter().zip(self.shell.par_iter()).map(|(v, s)| if *s == Some(k) { *v } else { zero }).collect()
    }

    /// Keeps the shells in `window`.
    pub fn window_hat(&self, hat: &[Complex<T>], window: Window) -> Vec<Complex<T>> {
        let zero = Complex::new(T::zero(), T::zero());
        hat.par_iter()
            .zip(self.shell.par_iter())
            .map(|(v, s)| match s {
                Some(k) if self.in_window(*k, window) => *v,
                _ => zero,
            })
            .collect()
    }

    /// `‖Δ̇_k f‖²` for every shell `k_min..=k_max`.
    pub fn shell_energies_hat(&self, hat: &[Complex<T>]) -> Vec<(i32, T)> {
        let count = (self.k_max - self.k_min + 1) as usize;
        let mut sums = vec![T::zero(); count];
        for (v, s) in hat.iter().zip(&self.shell) {
            if let Some(k) = s {
                sums[(k - self.k_min) as usize] += v.norm_sqr();
            }
        }
        let total = T::from_usize_lossy(self.grid.len());
        let scale = self.grid.length().powi(self.grid.dim() as i32) / (total * total);
        sums.into_iter().enumerate().map(|(i, e)| (self.k_min + i as i32, e * scale)).collect()
    }

    pub fn shell_energies(&self, f: &[T]) -> Vec<(i32, T)> {
        self.shell_energies_hat(&self.grid.forward(f))
    }

    /// `(Σ_{k∈window} 2^{2sk}‖Δ̇_k f‖²)^{1/2}`.
    pub fn besov_norm_hat(&self, hat: &[Complex<T>], s: T, window: Window) -> T {
        let two = T::lit(2.0);
        self.shell_energies_hat(hat)
            .into_iter()
            .filter(|(k, _)| self.in_window(*k, window))
            .map(|(k, e)| two.powf(two * s * T::lit(k as f64)) * e)
            .sum::<T>()
            .sqrt()
    }
}

fn check_len<T: Real>(grid: &Grid<T>, f: &[T]) -> Result<(), LpError> {
    if f.len() != grid.len() {
        return Err(LpError::Shape { got: f.len(), expected: grid.len() });
    }
    Ok(())
}

/// `Δ̇_k f`. Shells outside `k_min..=k_max` give the zero field with the
/// `empty_band` flag set.
pub fn dyadic_project<T: Real>(decomp: &Decomposition<T>, f: &[T], k: i32) -> Result<Projection<T>, LpError> {
    check_len(decomp.grid(), f)?;
    if k < decomp.k_min || k > decomp.k_max {
        return Ok(Projection { field: vec![T::zero(); f.len()], empty_band: true });
    }
    let hat = decomp.grid().forward(f);
    Ok(Projection { field: decomp.grid().inverse(&decomp.project_hat(&hat, k)), empty_band: false })
}

/// Homogeneous Besov norm `Ḃ^s_{2,2}` restricted to a window.
pub fn besov_norm<T: Real>(decomp: &Decomposition<T>, f: &[T], s: T, window: Window) -> Result<T, LpError> {
    check_len(decomp.grid(), f)?;
    let hat = decomp.grid().forward(f);
    let scale = hat.iter().fold(T::one(), |m, v| m.max(v.norm()));
    if hat[0].norm() > T::lit(1e-10) * scale {
        return Err(LpError::NonzeroMean);
    }
    Ok(decomp.besov_norm_hat(&hat, s, window))
}

/// `‖Λ^s f‖_{L²}`.
pub fn sobolev_norm<T: Real>(grid: &Grid<T>, f: &[T], s: T) -> T {
    grid.hom_sobolev_sq_hat(&grid.forward(f), s).sqrt()
}

/// Largest per-axis mode kept by the 2/3 rule.
pub fn dealias_cutoff<T: Real>(grid: &Grid<T>) -> i64 {
    grid.n() as i64 / 3
}

/// Zeroes modes with any `|mₐ|` above the 2/3 cutoff.
pub fn dealias<T: Real>(grid: &Grid<T>, hat: &mut [Complex<T>]) {
    let cut = dealias_cutoff(grid);
    let dim = grid.dim();
    hat.par_iter_mut().enumerate().for_each(|(idx, v)| {
        if grid.mode(idx)[..dim].iter().any(|m| m.abs() > cut) {
            *v = Complex::new(T::zero(), T::zero());
        }
    });
}

fn check_band<T: Real>(grid: &Grid<T>, hat: &[Complex<T>]) -> Result<(), LpError> {
    let cut = dealias_cutoff(grid);
    let dim = grid.dim();
    let scale = hat.iter().fold(T::zero(), |m, v| m.max(v.norm()));
    let worst = (0..grid.len())
        .filter(|&idx| grid.mode(idx)[..dim].iter().any(|m| m.abs() > cut))
        .map(|idx| hat[idx].norm())
        .fold(T::zero(), T::max);
    if worst > T::lit(1e-12) * scale.max(T::min_positive_value()) {
        return Err(LpError::Aliasing { cutoff: cut, magnitude: worst.to_f64_lossy() });
    }
    Ok(())
}

/// `u·∇f` from spectral inputs with a 2/3-rule truncated result.
fn advect_hat<T: Real>(grid: &Grid<T>, u: &[Vec<T>], f_hat: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = grid.len();
    let mut prod = vec![T::zero(); n];
    for (a, ua) in u.iter().enumerate() {
        let df = grid.inverse(&grid.derivative_hat(f_hat, a));
        prod.par_iter_mut().zip(ua.par_iter().zip(df.par_iter())).for_each(|(p, (x, y))| *p += *x * *y);
    }
    let mut hat = grid.forward(&prod);
    dealias(grid, &mut hat);
    hat
}

/// `[Δ̇_k, u·∇]f = Δ̇_k(u·∇f) − u·∇(Δ̇_k f)` with dealiased products.
///
/// Inputs must vanish beyond the 2/3 cutoff; otherwise the products would
/// alias and the call is rejected.
pub fn commutator<T: Real>(decomp: &Decomposition<T>, u: &[Vec<T>], f: &[T], k: i32) -> Result<Vec<T>, LpError> {
    let grid = decomp.grid();
    check_len(grid, f)?;
    if u.len() != grid.dim() {
        return Err(LpError::Shape { got: u.len(), expected: grid.dim() });
    }
    for ua in u {
        check_len(grid, ua)?;
        check_band(grid, &grid.forward(ua))?;
    }
    let f_hat = grid.forward(f);
    check_band(grid, &f_hat)?;
    let whole = decomp.project_hat(&advect_hat(grid, u, &f_hat), k);
    let inner = advect_hat(grid, u, &decomp.project_hat(&f_hat, k));
    let diff: Vec<Complex<T>> = whole.iter().zip(&inner).map(|(a, b)| a - b).collect();
    Ok(grid.inverse(&diff))
}

/// The three terms bounding `∫[Δ̇_k, u·∇]f · Δ̇_k g`, without the constant:
/// `‖∇u‖_∞‖f_k‖‖g_k‖ + ‖∇f‖_∞‖u_k‖‖g_k‖ + ‖∇u‖_∞‖g_k‖Σ_{l≥k−1}2^{k−l}‖f_l‖`.
pub fn commutator_bound<T: Real>(decomp: &Decomposition<T>, u: &[Vec<T>], f: &[T], g: &[T], k: i32) -> T {
    let grid = decomp.grid();
    let dim = grid.dim();
    let sup = |v: &[T]| v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let mut grad_u_inf = T::zero();
    for ua in u {
        let h = grid.forward(ua);
        for a in 0..dim {
            grad_u_inf = grad_u_inf.max(sup(&grid.inverse(&grid.derivative_hat(&h, a))));
        }
    }
    let f_hat = grid.forward(f);
    let grad_f_inf = (0..dim).map(|a| sup(&grid.inverse(&grid.derivative_hat(&f_hat, a)))).fold(T::zero(), T::max);
    let shell_norm = |e: &[(i32, T)], k: i32| e.iter().find(|(j, _)| *j == k).map(|(_, v)| v.sqrt()).unwrap_or(T::zero());
    let ef = decomp.shell_energies_hat(&f_hat);
    let eg = decomp.shell_energies(g);
    let u_k = u.iter().map(|ua| shell_norm(&decomp.shell_energies(ua), k).powi(2)).sum::<T>().sqrt();
    let f_k = shell_norm(&ef, k);
    let g_k = shell_norm(&eg, k);
    let tail: T = ef
        .iter()
        .filter(|(l, _)| *l >= k - 1)
        .map(|(l, e)| T::lit(2.0).powi(k - l) * e.sqrt())
        .sum();
    grad_u_inf * f_k * g_k + grad_f_inf * u_k * g_k + grad_u_inf * g_k * tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_constants, PhysicalParams};

    fn reference() -> DerivedConstants<f64> {
        derive_constants(&PhysicalParams::reference()).unwrap()
    }

    #[test]
    fn reference_thresholds() {
        let t = Thresholds::compute(&reference());
        assert_eq!(t.k1, 5);
        assert_eq!(t.big_r0, 64.0);
        assert_eq!(t.r0_candidates[0], 0.25);
        assert_eq!(t.r0, 0.25);
        assert_eq!(t.k0, -3);
    }

    #[test]
    fn shells_at_powers_of_two() {
        assert_eq!(shell_index(1.0f64), 0);
        assert_eq!(shell_index(4.0f64), 1);
        assert_eq!(shell_index(4.000001f64), 2);
        assert_eq!(shell_index(16.0f64), 2);
        assert_eq!(shell_index(0.25f64), -1);
        assert_eq!(shell_index(2.0f64), 1);
    }

    #[test]
    fn coarse_grid_reports_required_points() {
        let g = Grid::new(2, 64, std::f64::consts::TAU).unwrap();
        match build_decomposition(&g, &reference()) {
            Err(LpError::Resolution { required_n, .. }) => assert_eq!(required_n, 256),
            other => panic!("{other:?}"),
        }
        let g = Grid::new(2, 32, std::f64::consts::TAU / 8.0).unwrap();
        assert!(build_decomposition(&g, &reference()).is_ok());
    }

    #[test]
    fn single_mode_projects_onto_its_shell() {
        let g = Grid::new(1, 64, std::f64::consts::TAU).unwrap();
        let d = Decomposition::new(&g, Thresholds::compute(&reference()));
        let f: Vec<f64> = (0..64).map(|i| (8.0 * g.coords(i)[0]).cos()).collect();
        let p3 = dyadic_project(&d, &f, 3).unwrap();
        assert!(f.iter().zip(&p3.field).all(|(a, b)| (a - b).abs() < 1e-13));
        for k in [1, 5] {
            assert!(dyadic_project(&d, &f, k).unwrap().field.iter().all(|v| v.abs() < 1e-13));
        }
        let out = dyadic_project(&d, &f, 40).unwrap();
        assert!(out.empty_band && out.field.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn aliasing_inputs_rejected() {
        let g = Grid::new(1, 32, std::f64::consts::TAU).unwrap();
        let d = Decomposition::new(&g, Thresholds::compute(&reference()));
        let u: Vec<f64> = (0..32).map(|i| (g.coords(i)[0]).sin()).collect();
        let f: Vec<f64> = (0..32).map(|i| (14.0 * g.coords(i)[0]).sin()).collect();
        assert!(matches!(commutator(&d, &[u.clone()], &f, 3), Err(LpError::Aliasing { .. })));
        let zero = vec![0.0; 32];
        assert!(commutator(&d, &[u], &zero, 3).unwrap().iter().all(|v| *v == 0.0));
    }
}
