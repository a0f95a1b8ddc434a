//! Frequency-localized energy functionals and the constants that make them
//! coercive and dissipative.
//!
//! Every functional is a Hermitian form per Fourier mode. The forms are
//! exposed as real symmetric matrices on `(ρ̂, d̂, θ̂, ĵ₀)` so that
//! equivalence constants can be read off from their eigenvalues.

use num_complex::Complex;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::Matrix;
use crate::lp::{Decomposition, Thresholds};
use crate::model::{split_hat, DerivedConstants, StateField};
use crate::scalar::Real;
use crate::spectral::Grid;
use crate::symbol::{mode_change, ModeChange};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error("high-frequency functional needs k > k1 = {k1}, got k = {k}")]
    BelowThreshold { k: i32, k1: i32 },
    #[error("low-frequency functional needs |xi| <= R0 = {big_r0}, got {rho_freq}")]
    AboveBand { rho_freq: f64, big_r0: f64 },
}

/// Cross term of the high-frequency functional.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CrossTerm {
    /// `−2β₁Λρ_k d_k`, which makes the functional decay under the linear flow.
    #[default]
    Corrected,
    /// `−β₁Λρ_k d_k`.
    Printed,
}

impl CrossTerm {
    fn factor<T: Real>(self) -> T {
        match self {
            CrossTerm::Corrected => T::lit(2.0),
            CrossTerm::Printed => T::one(),
        }
    }
}

/// β's, thresholds and mode-change coefficients used by the functionals.
#[derive(Clone, Debug)]
pub struct AnalysisConstants<T> {
    pub beta1: T,
    pub beta2: T,
    pub beta3: T,
    pub k0: i32,
    pub k1: i32,
    pub r0: T,
    pub big_r0: T,
    pub modes: ModeChange<T>,
    pub consts: DerivedConstants<T>,
}

/// Largest β's allowed by their constraints:
///
/// * `β₁ = min{κ/2, ν/4, 9a𝒞²/4, 1}`, the `κ/2` entry dropped when `κ = 0`;
/// * `β₂ = min{β₁ν/8, (a/16)|(b+𝒞γ)²/γ + 1/(9ν𝒞²) − 𝒞b|⁻¹}`;
/// * `β₃ = min{2ν/3, c₃/(16𝒞c₁), 1/(2R₀)}`.
pub fn select_constants<T: Real>(consts: &DerivedConstants<T>, thresholds: &Thresholds<T>) -> AnalysisConstants<T> {
    let DerivedConstants { nu, gamma: g, a_diff: a, b_bar: b, kappa, c_light: c, .. } = consts.clone();
    let lit = T::lit;
    let mut beta1 = (nu / lit(4.0)).min(lit(9.0) * a * c * c / lit(4.0)).min(T::one());
    if kappa > T::zero() {
        beta1 = beta1.min(kappa / lit(2.0));
    }
    let gap = ((b + c * g).powi(2) / g + T::one() / (lit(9.0) * nu * c * c) - c * b).abs();
    let mut beta2 = beta1 * nu / lit(8.0);
    if gap > T::zero() {
        beta2 = beta2.min(a / lit(16.0) / gap);
    }
    let modes = mode_change(consts);
    let beta3 = (lit(2.0) * nu / lit(3.0))
        .min(modes.c3 / (lit(16.0) * c * modes.c1))
        .min(T::one() / (lit(2.0) * thresholds.big_r0));
    AnalysisConstants {
        beta1,
        beta2,
        beta3,
        k0: thresholds.k0,
        k1: thresholds.k1,
        r0: thresholds.r0,
        big_r0: thresholds.big_r0,
        modes,
        consts: consts.clone(),
    }
}

impl<T: Real> AnalysisConstants<T> {
    pub fn new(consts: &DerivedConstants<T>) -> Self {
        select_constants(consts, &Thresholds::compute(consts))
    }

    /// Form of `L_{h,k}` at frequency `ϱ`.
    pub fn high_form(&self, rho_freq: T, cross: CrossTerm) -> Matrix<T, 4> {
        let r = rho_freq;
        let half_cross = -cross.factor::<T>() * self.beta1 * r / T::lit(2.0);
        Matrix([
            [T::one() + self.consts.nu * self.beta1 * r * r, half_cross, T::zero(), T::zero()],
            [half_cross, T::one(), T::zero(), T::zero()],
            [T::zero(), T::zero(), T::lit(1.5), T::zero()],
            [T::zero(), T::zero(), T::zero(), T::one()],
        ])
    }

    /// Form of the compressible part of `H_{h,k}` at frequency `ϱ`.
    pub fn high_form_h(&self, rho_freq: T, cross: CrossTerm) -> Matrix<T, 4> {
        let mut m = self.high_form(rho_freq, cross);
        let w = self.beta2 * rho_freq * rho_freq;
        m[(1, 1)] += w;
        m[(2, 2)] += T::lit(1.5) * w;
        m[(3, 3)] += w;
        m
    }

    /// Form of `L_l` at frequency `ϱ`, pulled back from `(Θ, Ξ)` to `(θ, j₀)`.
    pub fn low_form(&self, rho_freq: T) -> Matrix<T, 4> {
        let c = &self.modes;
        let wt = c.c1 / (T::lit(4.0) * self.consts.c_light);
        let wx = T::lit(3.0) * c.c2 / (T::lit(4.0) * self.consts.gamma);
        let t = &c.transform;
        let thermal = |i: usize, j: usize| wt * t[(0, i)] * t[(0, j)] + wx * t[(1, i)] * t[(1, j)];
        let half_cross = -self.beta3 * rho_freq / T::lit(2.0);
        let h = T::lit(0.5);
        Matrix([
            [h, half_cross, T::zero(), T::zero()],
            [half_cross, h, T::zero(), T::zero()],
            [T::zero(), T::zero(), thermal(0, 0), thermal(0, 1)],
            [T::zero(), T::zero(), thermal(1, 0), thermal(1, 1)],
        ])
    }
}

/// `Re(v* M v)` for real symmetric `M`.
pub fn hermitian_value<T: Real>(m: &Matrix<T, 4>, v: &[Complex<T>; 4]) -> T {
    let mut s = T::zero();
    for i in 0..4 {
        for j in 0..4 {
            s += m[(i, j)] * (v[i].conj() * v[j]).re;
        }
    }
    s
}

/// `L_l = ½|ρ̂|² − β₃|ξ|Re(ρ̂ d̄) + ½|d̂|² + (c₁/4𝒞)|Θ̂|² + (3c₂/4γ)|Ξ̂|²`
/// for amplitudes `(ρ̂, d̂, θ̂, ĵ₀)`.
pub fn low_freq_functional<T: Real>(mode: &[Complex<T>; 4], rho_freq: T, ac: &AnalysisConstants<T>) -> Result<T, EnergyError> {
    if rho_freq > ac.big_r0 {
        return Err(EnergyError::AboveBand { rho_freq: rho_freq.to_f64_lossy(), big_r0: ac.big_r0.to_f64_lossy() });
    }
    let c = &ac.modes;
    let big_theta = mode[2] * c.transform[(0, 0)] + mode[3] * c.transform[(0, 1)];
    let xi = mode[2] * c.transform[(1, 0)] + mode[3] * c.transform[(1, 1)];
    let h = T::lit(0.5);
    Ok(h * mode[0].norm_sqr() - ac.beta3 * rho_freq * (mode[0] * mode[1].conj()).re
        + h * mode[1].norm_sqr()
        + c.c1 / (T::lit(4.0) * ac.consts.c_light) * big_theta.norm_sqr()
        + T::lit(3.0) * c.c2 / (T::lit(4.0) * ac.consts.gamma) * xi.norm_sqr())
}

/// Spectral amplitudes `(ρ̂, d̂, θ̂, ĵ₀)` and `𝒫̂u` of a state.
pub struct ModeAmplitudes<T> {
    pub compressible: Vec<[Complex<T>; 4]>,
    pub pu: Vec<Vec<Complex<T>>>,
}

pub fn mode_amplitudes<T: Real>(state: &StateField<T>) -> ModeAmplitudes<T> {
    let hat = state.spectral();
    let (d, pu) = split_hat(state.grid(), &hat.u);
    let compressible = (0..state.grid().len()).map(|i| [hat.rho[i], d[i], hat.theta[i], hat.j0[i]]).collect();
    ModeAmplitudes { compressible, pu }
}

fn plancherel_scale<T: Real>(grid: &Grid<T>) -> T {
    let n = T::from_usize_lossy(grid.len());
    grid.length().powi(grid.dim() as i32) / (n * n)
}

/// `(L_{h,k}, H_{h,k})` with
/// `L_{h,k} = ∫ρ_k² + νβ₁|∇ρ_k|² − cβ₁Λρ_k d_k + d_k² + (3/2)θ_k² + j₀ₖ²`
/// (`c` per [`CrossTerm`]) and
/// `H_{h,k} = L_{h,k} + β₂∫(|Λd_k|² + (3/2)|Λθ_k|² + |Λj₀ₖ|²) + ‖𝒫u_k‖² + ‖Λ𝒫u_k‖²`.
pub fn high_freq_functional<T: Real>(
    state: &StateField<T>,
    decomp: &Decomposition<T>,
    k: i32,
    ac: &AnalysisConstants<T>,
    cross: CrossTerm,
) -> Result<(T, T), EnergyError> {
    high_freq_from_amplitudes(&mode_amplitudes(state), decomp, k, ac, cross)
}

pub fn high_freq_from_amplitudes<T: Real>(
    amps: &ModeAmplitudes<T>,
    decomp: &Decomposition<T>,
    k: i32,
    ac: &AnalysisConstants<T>,
    cross: CrossTerm,
) -> Result<(T, T), EnergyError> {
    if k <= ac.k1 {
        return Err(EnergyError::BelowThreshold { k, k1: ac.k1 });
    }
    let grid = decomp.grid();
    let (mut l, mut h) = (T::zero(), T::zero());
    for idx in 0..grid.len() {
        if decomp.shell_of(idx) != Some(k) {
            continue;
        }
        let k2 = grid.k2(idx);
        let r = k2.sqrt();
        let v = &amps.compressible[idx];
        let lv = hermitian_value(&ac.high_form(r, cross), v);
        let pu: T = amps.pu.iter().map(|c| c[idx].norm_sqr()).sum();
        l += lv;
        h += hermitian_value(&ac.high_form_h(r, cross), v) + (T::one() + k2) * pu;
    }
    let s = plancherel_scale(grid);
    Ok((l * s, h * s))
}

/// `Θ = 3𝒞θ + 2j₀`, `Ξ = γθ − b j₀` pointwise.
pub fn damped_mode<T: Real>(state: &StateField<T>, ac: &AnalysisConstants<T>) -> (Vec<T>, Vec<T>) {
    state.theta().iter().zip(state.j0()).map(|(th, j)| ac.modes.forward(th, j)).unzip()
}

/// Inverse of [`damped_mode`].
pub fn undamped_mode<T: Real>(big_theta: &[T], xi: &[T], ac: &AnalysisConstants<T>) -> (Vec<T>, Vec<T>) {
    big_theta.iter().zip(xi).map(|(t, x)| ac.modes.inverse(t, x)).unzip()
}

/// Extremes of a functional relative to a reference norm over a set of modes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EquivalenceBounds {
    /// `inf functional / norm`.
    pub lower: f64,
    /// `sup functional / norm`.
    pub upper: f64,
}

impl EquivalenceBounds {
    /// Smallest `C` with `C⁻¹·functional ≤ norm ≤ C·functional`.
    pub fn constant(&self) -> f64 {
        self.upper.max(1.0 / self.lower)
    }

    fn merge(self, lo: f64, hi: f64) -> Self {
        EquivalenceBounds { lower: self.lower.min(lo), upper: self.upper.max(hi) }
    }

    fn empty() -> Self {
        EquivalenceBounds { lower: f64::INFINITY, upper: f64::NEG_INFINITY }
    }
}

/// Bounds of `H_{h,k}` against `(1 + 2^{2k})‖(ρ_k, u_k, θ_k, j₀ₖ)‖²` over the
/// modes of shell `k` present on the grid.
pub fn high_equivalence<T: Real>(decomp: &Decomposition<T>, k: i32, ac: &AnalysisConstants<T>, cross: CrossTerm) -> EquivalenceBounds {
    let grid = decomp.grid();
    let weight = T::one() + T::lit(4.0).powi(k);
    let mut out = EquivalenceBounds::empty();
    for idx in 0..grid.len() {
        if decomp.shell_of(idx) != Some(k) {
            continue;
        }
        let k2 = grid.k2(idx);
        let ev = ac.high_form_h(k2.sqrt(), cross).symmetric_eigenvalues();
        let pu = (T::one() + k2) / weight;
        let lo = (ev[0] / weight).min(pu).to_f64_lossy();
        let hi = (ev[3] / weight).max(pu).to_f64_lossy();
        out = out.merge(lo, hi);
    }
    out
}

/// Bounds of `L_l` against `|ρ̂|² + |d̂|² + |θ̂|² + |ĵ₀|²` over the nonzero
/// grid modes with `|ξ| ≤ R₀`.
pub fn low_equivalence<T: Real>(grid: &Grid<T>, ac: &AnalysisConstants<T>) -> EquivalenceBounds {
    let mut out = EquivalenceBounds::empty();
    for idx in 1..grid.len() {
        if grid.is_nyquist(idx) {
            continue;
        }
        let r = grid.k2(idx).sqrt();
        if r > ac.big_r0 {
            continue;
        }
        let ev = ac.low_form(r).symmetric_eigenvalues();
        out = out.merge(ev[0].to_f64_lossy(), ev[3].to_f64_lossy());
    }
    out
}

/// Functional values of one state.
#[derive(Clone, Debug, Serialize)]
pub struct EnergyReport {
    /// `(k, L_{h,k}, H_{h,k})` for `k₁ < k ≤ k_max`.
    pub high: Vec<(i32, f64, f64)>,
    /// `(|ξ|, L_l)` for each nonzero grid mode with `|ξ| ≤ R₀`, sorted by `|ξ|`.
    pub low: Vec<(f64, f64)>,
    pub theta_norm: f64,
    pub xi_norm: f64,
    pub big_theta_norm: f64,
}

pub fn energy_report<T: Real>(
    state: &StateField<T>,
    decomp: &Decomposition<T>,
    ac: &AnalysisConstants<T>,
    cross: CrossTerm,
) -> EnergyReport {
    let grid = decomp.grid();
    let amps = mode_amplitudes(state);
    let high = (ac.k1 + 1..=decomp.k_max)
        .map(|k| {
            let (l, h) = high_freq_from_amplitudes(&amps, decomp, k, ac, cross).expect("k above k1");
            (k, l.to_f64_lossy(), h.to_f64_lossy())
        })
        .collect();
    let s = plancherel_scale(grid);
    let mut low: Vec<(f64, f64)> = (1..grid.len())
        .filter(|&idx| !grid.is_nyquist(idx))
        .filter_map(|idx| {
            let r = grid.k2(idx).sqrt();
            low_freq_functional(&amps.compressible[idx], r, ac).ok().map(|v| (r.to_f64_lossy(), (v * s).to_f64_lossy()))
        })
        .collect();
    low.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let (big_theta, xi) = damped_mode(state, ac);
    EnergyReport {
        high,
        low,
        theta_norm: grid.l2_norm_sq(state.theta()).sqrt().to_f64_lossy(),
        xi_norm: grid.l2_norm_sq(&xi).sqrt().to_f64_lossy(),
        big_theta_norm: grid.l2_norm_sq(&big_theta).sqrt().to_f64_lossy(),
    }
}
