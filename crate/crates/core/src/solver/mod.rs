//! Pseudo-spectral evolution of the perturbation system on the periodic box
//! and whole-space semigroup norms by radial quadrature.
//!
//! The state is advanced in Fourier variables. The compressible block
//! `(ρ̂, d̂, θ̂, ĵ₀)` moves under the exact propagator `e^{−tA(ϱ)}`, the
//! solenoidal velocity under `e^{−μϱ²t}`, and the nonlinear sources enter
//! through an exponential midpoint rule:
//!
//! ```text
//! U½   = E(dt/2)(Uⁿ + dt/2 · N(Uⁿ))
//! Uⁿ⁺¹ = E(dt)Uⁿ + dt · E(dt/2) N(U½)
//! ```

mod semigroup;

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::energy::{high_freq_from_amplitudes, low_freq_functional, AnalysisConstants, CrossTerm, ModeAmplitudes};
use crate::linalg::Matrix;
use crate::lp::{dealias, Decomposition, Thresholds};
use crate::model::{derive_constants, nonlinear_sources, split_hat, DerivedConstants, ModelError, PhysicalParams, SpectralState, StateField};
use crate::scalar::Real;
use crate::spectral::{Grid, GridError};
use crate::symbol::{propagator, SymbolError};

pub use semigroup::{adaptive_simpson, semigroup_norms, Observable, Quadrature, RadialProfile, SemigroupQuery};

#[derive(Debug, Error)]
pub enum SolverError<T: Real> {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error("dt = {dt} exceeds the step budget {budget} at t = {time}")]
    StepBudget { dt: f64, budget: f64, time: f64 },
    #[error("run aborted at t = {time}: {reason}")]
    Aborted { time: f64, reason: String, last_valid: Box<StateField<T>> },
    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },
}

/// Shape of the initial perturbation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    /// Radial Gaussian of width `L/10` centred in the box, with a radial
    /// velocity and equal thermal perturbations.
    Gaussian,
    /// Uniform random Fourier coefficients on `1 ≤ max|mₐ| ≤ band`.
    RandomBand { band: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitialData<T> {
    pub profile: Profile,
    /// `‖(ρ̃, ũ, θ̃, j₀)‖_{H⁴}` after normalization.
    pub amplitude: T,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct RunConfig<T> {
    pub params: PhysicalParams<T>,
    pub dim: usize,
    pub n: usize,
    pub length: T,
    pub dt: T,
    pub t_end: T,
    pub initial: InitialData<T>,
    /// Record diagnostics every this many steps.
    pub sample_every: usize,
    /// Apply the 2/3 rule to the initial data and every source evaluation.
    pub dealias: bool,
    /// Disable to evolve the linear problem only.
    pub sources: bool,
}

impl<T: Real> RunConfig<T> {
    pub fn new(params: PhysicalParams<T>, dim: usize, n: usize, length: T) -> Self {
        RunConfig {
            params,
            dim,
            n,
            length,
            dt: T::lit(0.01),
            t_end: T::one(),
            initial: InitialData { profile: Profile::Gaussian, amplitude: T::lit(1e-3), seed: 0 },
            sample_every: 10,
            dealias: true,
            sources: true,
        }
    }

    pub fn validate(&self) -> Result<(), SolverError<T>> {
        Grid::new(self.dim, self.n, self.length)?;
        derive_constants(&self.params)?;
        if !(self.dt > T::zero()) {
            return Err(SolverError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= T::zero()) || !self.t_end.is_finite() {
            return Err(SolverError::Config(format!("t_end must be finite and non-negative, got {}", self.t_end)));
        }
        let eps = self.initial.amplitude;
        if !(eps >= T::zero() && eps <= T::lit(0.1)) {
            return Err(SolverError::Config(format!("amplitude must lie in [0, 0.1], got {eps}")));
        }
        if self.sample_every == 0 {
            return Err(SolverError::Config("sample_every must be at least 1".into()));
        }
        if let Profile::RandomBand { band } = self.initial.profile {
            if band == 0 || band as i64 > (self.n / 2 - 1) as i64 {
                return Err(SolverError::Config(format!("band {band} outside 1..={}", self.n / 2 - 1)));
            }
        }
        Ok(())
    }
}

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Fourier amplitudes in the variables the integrator evolves.
#[derive(Clone, Debug, PartialEq)]
pub struct ModalState<T> {
    /// `(ρ̂, d̂, θ̂, ĵ₀)` per mode.
    pub comp: Vec<[Complex<T>; 4]>,
    /// `𝒫̂u` per mode (unused components are zero).
    pub pu: Vec<[Complex<T>; 3]>,
}

impl<T: Real> ModalState<T> {
    pub fn zeros(len: usize) -> Self {
        ModalState { comp: vec![[zero(); 4]; len], pu: vec![[zero(); 3]; len] }
    }

    pub fn from_state(state: &StateField<T>) -> Self {
        Self::from_components(state.grid(), state.spectral())
    }

    /// Splits spectral fields; the velocity slot may hold any vector field.
    pub fn from_components(grid: &Grid<T>, hat: &SpectralState<T>) -> Self {
        let (d, pu) = split_hat(grid, &hat.u);
        let comp = (0..grid.len()).map(|i| [hat.rho[i], d[i], hat.theta[i], hat.j0[i]]).collect();
        let pu = (0..grid.len())
            .map(|i| std::array::from_fn(|a| if a < grid.dim() { pu[a][i] } else { zero() }))
            .collect();
        ModalState { comp, pu }
    }

    /// Rebuilds `û = −iξ d̂/|ξ| + 𝒫̂u` and the physical samples.
    pub fn to_spectral(&self, grid: &Grid<T>) -> SpectralState<T> {
        let dim = grid.dim();
        let i = Complex::new(T::zero(), T::one());
        let mut hat = SpectralState::zeros(grid.len(), dim);
        for idx in 1..grid.len() {
            let c = &self.comp[idx];
            hat.rho[idx] = c[0];
            hat.theta[idx] = c[2];
            hat.j0[idx] = c[3];
            let k = grid.k2(idx).sqrt();
            let xi = grid.wavevector(idx);
            for a in 0..dim {
                hat.u[a][idx] = -i * c[1] * (xi[a] / k) + self.pu[idx][a];
            }
        }
        hat
    }

    pub fn to_state(&self, grid: &Grid<T>) -> Result<StateField<T>, ModelError> {
        StateField::from_spectral(grid, self.to_spectral(grid))
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: T, other: &Self) -> Self {
        let comp = self.comp.par_iter().zip(&other.comp).map(|(a, b)| std::array::from_fn(|j| a[j] + b[j] * s)).collect();
        let pu = self.pu.par_iter().zip(&other.pu).map(|(a, b)| std::array::from_fn(|j| a[j] + b[j] * s)).collect();
        ModalState { comp, pu }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let c = self
            .comp
            .par_iter()
            .zip(&other.comp)
            .map(|(a, b)| (0..4).map(|j| (a[j] - b[j]).norm()).fold(T::zero(), T::max))
            .reduce(T::zero, T::max);
        let p = self
            .pu
            .par_iter()
            .zip(&other.pu)
            .map(|(a, b)| (0..3).map(|j| (a[j] - b[j]).norm()).fold(T::zero(), T::max))
            .reduce(T::zero, T::max);
        c.max(p)
    }

    pub fn max_abs(&self) -> T {
        self.max_abs_diff(&Self::zeros(self.comp.len()))
    }
}

/// External forcing added to the nonlinear sources, in modal form.
pub trait Forcing<T: Real>: Send + Sync {
    fn modal(&self, grid: &Grid<T>, t: T) -> ModalState<T>;
}

type PropagatorPair<T> = (Matrix<T, 4>, Matrix<T, 4>, T, T);

/// Exponential-midpoint integrator with a propagator cache per `|m|²`.
pub struct Integrator<T: Real> {
    grid: Grid<T>,
    params: PhysicalParams<T>,
    consts: DerivedConstants<T>,
    dt: T,
    cache: HashMap<i64, PropagatorPair<T>>,
    pub sources: bool,
    pub dealias: bool,
    forcing: Option<Arc<dyn Forcing<T>>>,
}

impl<T: Real> Integrator<T> {
    pub fn new(grid: &Grid<T>, params: &PhysicalParams<T>, dt: T) -> Result<Self, SolverError<T>> {
        let consts = derive_constants(params)?;
        let mut it = Integrator {
            grid: grid.clone(),
            params: params.clone(),
            consts,
            dt,
            cache: HashMap::new(),
            sources: true,
            dealias: true,
            forcing: None,
        };
        it.set_dt(dt)?;
        Ok(it)
    }

    pub fn with_forcing(mut self, forcing: Arc<dyn Forcing<T>>) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn consts(&self) -> &DerivedConstants<T> {
        &self.consts
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    /// Changes the step and rebuilds the propagator cache.
    pub fn set_dt(&mut self, dt: T) -> Result<(), SolverError<T>> {
        if !(dt > T::zero()) {
            return Err(SolverError::Config(format!("dt must be positive, got {dt}")));
        }
        let mut keys: Vec<i64> = (1..self.grid.len())
            .filter(|&i| !self.grid.is_nyquist(i))
            .map(|i| self.grid.mode_norm2(i))
            .collect();
        keys.sort_unstable();
        keys.dedup();
        let f2 = self.grid.fundamental().powi(2);
        let consts = &self.consts;
        let half = dt / T::lit(2.0);
        let built: Result<Vec<_>, SymbolError> = keys
            .par_iter()
            .map(|&m2| {
                let k2 = f2 * T::lit(m2 as f64);
                let r = k2.sqrt();
                let full = propagator(consts, r, dt)?.matrix;
                let halfm = propagator(consts, r, half)?.matrix;
                let heat = (-consts.mu * k2 * dt).exp();
                let heat_half = (-consts.mu * k2 * half).exp();
                Ok((m2, (full, halfm, heat, heat_half)))
            })
            .collect();
        self.cache = built?.into_iter().collect();
        self.dt = dt;
        Ok(())
    }

    /// Applies `E(dt)` (or `E(dt/2)` when `half`) modewise.
    pub fn propagate(&self, w: &ModalState<T>, half: bool) -> ModalState<T> {
        let grid = &self.grid;
        let comp = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                if idx == 0 || grid.is_nyquist(idx) {
                    return [zero(); 4];
                }
                let e = &self.cache[&grid.mode_norm2(idx)];
                let m = if half { &e.1 } else { &e.0 };
                let v = &w.comp[idx];
                std::array::from_fn(|i| (0..4).fold(zero(), |acc, j| acc + v[j] * m[(i, j)]))
            })
            .collect();
        let pu = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                if idx == 0 || grid.is_nyquist(idx) {
                    return [zero(); 3];
                }
                let e = &self.cache[&grid.mode_norm2(idx)];
                let h = if half { e.3 } else { e.2 };
                w.pu[idx].map(|v| v * h)
            })
            .collect();
        ModalState { comp, pu }
    }

    /// Nonlinear sources plus forcing at time `t`, in modal form.
    pub fn nonlinear(&self, w: &ModalState<T>, t: T) -> Result<ModalState<T>, ModelError> {
        let grid = &self.grid;
        let mut out = if self.sources {
            let state = w.to_state(grid)?;
            let s = nonlinear_sources(&state, &self.params, &self.consts)?;
            let fwd = |f: &[T]| {
                let mut h = grid.forward(f);
                if self.dealias {
                    dealias(grid, &mut h);
                }
                grid.zero_nyquist(&mut h);
                h[0] = zero();
                h
            };
            let hat = SpectralState { rho: fwd(&s.s1), u: s.s2.iter().map(|c| fwd(c)).collect(), theta: fwd(&s.s3), j0: fwd(&s.s4) };
            ModalState::from_components(grid, &hat)
        } else {
            ModalState::zeros(grid.len())
        };
        if let Some(f) = &self.forcing {
            out = out.axpy(T::one(), &f.modal(grid, t));
        }
        Ok(out)
    }

    /// One exponential-midpoint step from time `t`.
    pub fn step_modal(&self, w: &ModalState<T>, t: T) -> Result<ModalState<T>, ModelError> {
        let dt = self.dt;
        let half = dt / T::lit(2.0);
        if !self.sources && self.forcing.is_none() {
            return Ok(self.propagate(w, false));
        }
        let n0 = self.nonlinear(w, t)?;
        let w_half = self.propagate(&w.axpy(half, &n0), true);
        let n_half = self.nonlinear(&w_half, t + half)?;
        Ok(self.propagate(w, false).axpy(dt, &self.propagate(&n_half, true)))
    }

    /// One step on a physical state, checking positivity and finiteness.
    pub fn step(&self, state: &StateField<T>, t: T) -> Result<StateField<T>, SolverError<T>> {
        let abort = |reason: String| SolverError::Aborted {
            time: t.to_f64_lossy(),
            reason,
            last_valid: Box::new(state.clone()),
        };
        let next = self.step_modal(&ModalState::from_state(state), t).map_err(|e| abort(e.to_string()))?;
        let out = next.to_state(&self.grid).map_err(|e| abort(e.to_string()))?;
        check_valid(&out).map_err(abort)?;
        Ok(out)
    }

    /// `0.5·Δx / max(1, ‖u‖_∞ + √(5/3))`.
    pub fn step_budget(&self, state: &StateField<T>) -> T {
        let umax = state.u().iter().flat_map(|c| c.iter()).fold(T::zero(), |m, x| m.max(x.abs()));
        T::lit(0.5) * self.grid.dx() / T::one().max(umax + (T::lit(5.0) / T::lit(3.0)).sqrt())
    }
}

fn check_valid<T: Real>(state: &StateField<T>) -> Result<(), String> {
    if !state.is_finite() {
        return Err("non-finite values in the state".into());
    }
    let rho = state.min_density();
    if !(rho > T::zero()) {
        return Err(format!("density positivity lost: min(1 + rho) = {rho}"));
    }
    let th = state.min_temperature();
    if !(th > T::zero()) {
        return Err(format!("temperature positivity lost: min(1 + theta) = {th}"));
    }
    Ok(())
}

/// Zero-mean initial perturbation normalized to the configured `H⁴` norm.
pub fn init_perturbation<T: Real>(config: &RunConfig<T>) -> Result<StateField<T>, SolverError<T>> {
    config.validate()?;
    let grid = Grid::new(config.dim, config.n, config.length)?;
    let dim = config.dim;
    let eps = config.initial.amplitude;
    if eps == T::zero() {
        return Ok(StateField::zeros(&grid));
    }
    let mut state = match config.initial.profile {
        Profile::Gaussian => {
            let centre = config.length / T::lit(2.0);
            let w = config.length / T::lit(10.0);
            let n = grid.len();
            let mut rho = vec![T::zero(); n];
            let mut u = vec![vec![T::zero(); n]; dim];
            for i in 0..n {
                let x = grid.coords(i);
                let r2: T = (0..dim).map(|a| (x[a] - centre).powi(2)).sum();
                let f = (-r2 / (T::lit(2.0) * w * w)).exp();
                rho[i] = f;
                for a in 0..dim {
                    u[a][i] = (x[a] - centre) / w * f;
                }
            }
            let j0: Vec<T> = rho.iter().map(|f| *f * T::lit(0.5)).collect();
            StateField::from_fields_projected(&grid, rho.clone(), u, rho, j0)?
        }
        Profile::RandomBand { band } => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.initial.seed);
            let mut hat = SpectralState::zeros(grid.len(), dim);
            let band = band as i64;
            for idx in 1..grid.len() {
                let m = grid.mode(idx);
                let top = m[..dim].iter().map(|x| x.abs()).max().unwrap_or(0);
                for c in hat.components_mut() {
                    let re = T::lit(rng.gen_range(-1.0..1.0));
                    let im = T::lit(rng.gen_range(-1.0..1.0));
                    if top <= band {
                        c[idx] = Complex::new(re, im);
                    }
                }
            }
            StateField::from_spectral(&grid, hat)?
        }
    };
    if config.dealias {
        let mut hat = state.spectral().clone();
        for c in hat.components_mut() {
            dealias(&grid, c);
        }
        state = StateField::from_spectral(&grid, hat)?;
    }
    let norm = state.sobolev_norm_sq(4).sqrt();
    Ok(state.scaled(eps / norm))
}

/// Diagnostics recorded at one sample time.
#[derive(Clone, Debug, Serialize)]
pub struct Sample {
    pub t: f64,
    /// `‖∇^k(ρ̃, ũ, θ̃, j₀)‖` for `k = 0..4`.
    pub grad_norms: [f64; 5],
    pub h4_norm: f64,
    pub theta_norm: f64,
    pub xi_norm: f64,
    pub big_theta_norm: f64,
    pub min_density: f64,
    pub min_temperature: f64,
    /// Mean of `ρ̃`.
    pub mass_mean: f64,
    /// `N(t)`: running sup of `‖U‖²_{H⁴}` plus the time integral of the dissipated norms.
    pub n_functional: f64,
    /// `Σ_{k>k₁} H_{h,k}`.
    pub high_energy: f64,
    /// `Σ_{0<|ξ|≤R₀} L_l` over grid modes.
    pub low_energy: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    pub samples: Vec<Sample>,
    pub final_state: StateField<T>,
    pub steps: usize,
    pub dt: T,
}

/// Dissipated norms in `N(t)` and `‖U‖²_{H⁴}`, from coefficients.
fn n_integrand<T: Real>(grid: &Grid<T>, w: &ModalState<T>, consts: &DerivedConstants<T>) -> (T, T) {
    let n = T::from_usize_lossy(grid.len());
    let scale = grid.length().powi(grid.dim() as i32) / (n * n);
    let (sums_h4, sums_diss) = (1..grid.len())
        .into_par_iter()
        .filter(|&i| !grid.is_nyquist(i))
        .map(|idx| {
            let k2 = grid.k2(idx);
            let c = &w.comp[idx];
            let rho = c[0].norm_sqr();
            let vel = c[1].norm_sqr() + w.pu[idx].iter().map(|v| v.norm_sqr()).sum::<T>();
            let therm = c[2].norm_sqr() + c[3].norm_sqr();
            let xi = (c[2] * consts.gamma - c[3] * consts.b_bar).norm_sqr();
            let pow = |lo: i32, hi: i32| (lo..=hi).map(|k| k2.powi(k)).sum::<T>();
            let h4 = (rho + vel + therm) * pow(0, 4);
            let diss = rho * pow(1, 4) + (vel + therm) * pow(1, 5) + xi * pow(0, 4);
            (h4, diss)
        })
        .reduce(|| (T::zero(), T::zero()), |a, b| (a.0 + b.0, a.1 + b.1));
    (sums_h4 * scale, sums_diss * scale)
}

struct Monitor<T: Real> {
    ac: AnalysisConstants<T>,
    decomp: Decomposition<T>,
}

impl<T: Real> Monitor<T> {
    fn new(grid: &Grid<T>, consts: &DerivedConstants<T>) -> Self {
        let thresholds = Thresholds::compute(consts);
        Monitor { ac: crate::energy::select_constants(consts, &thresholds), decomp: Decomposition::new(grid, thresholds) }
    }

    fn sample(&self, state: &StateField<T>, w: &ModalState<T>, t: T, n_value: T) -> Sample {
        let grid = state.grid();
        let consts = &self.ac.consts;
        let grad_norms = std::array::from_fn(|k| state.grad_norm_sq(k as u32).sqrt().to_f64_lossy());
        let xi: Vec<T> = state.theta().iter().zip(state.j0()).map(|(th, j)| consts.gamma * *th - consts.b_bar * *j).collect();
        let big: Vec<T> = state
            .theta()
            .iter()
            .zip(state.j0())
            .map(|(th, j)| T::lit(3.0) * consts.c_light * *th + T::lit(2.0) * *j)
            .collect();
        let amps = ModeAmplitudes {
            compressible: w.comp.clone(),
            pu: (0..grid.dim()).map(|a| w.pu.iter().map(|p| p[a]).collect()).collect(),
        };
        let high: T = (self.ac.k1 + 1..=self.decomp.k_max)
            .map(|k| high_freq_from_amplitudes(&amps, &self.decomp, k, &self.ac, CrossTerm::Corrected).map(|p| p.1).unwrap_or(T::zero()))
            .sum();
        let n = T::from_usize_lossy(grid.len());
        let scale = grid.length().powi(grid.dim() as i32) / (n * n);
        let low: T = (1..grid.len())
            .filter(|&i| !grid.is_nyquist(i))
            .filter_map(|i| low_freq_functional(&w.comp[i], grid.k2(i).sqrt(), &self.ac).ok())
            .sum::<T>()
            * scale;
        let mass = state.rho().iter().copied().sum::<T>() / n;
        Sample {
            t: t.to_f64_lossy(),
            grad_norms,
            h4_norm: state.sobolev_norm_sq(4).sqrt().to_f64_lossy(),
            theta_norm: grid.l2_norm_sq(state.theta()).sqrt().to_f64_lossy(),
            xi_norm: grid.l2_norm_sq(&xi).sqrt().to_f64_lossy(),
            big_theta_norm: grid.l2_norm_sq(&big).sqrt().to_f64_lossy(),
            min_density: state.min_density().to_f64_lossy(),
            min_temperature: state.min_temperature().to_f64_lossy(),
            mass_mean: mass.to_f64_lossy(),
            n_functional: n_value.to_f64_lossy(),
            high_energy: high.to_f64_lossy(),
            low_energy: low.to_f64_lossy(),
        }
    }
}

/// Steps from the configured initial data to `t_end`. The step is
/// `t_end / ⌈t_end / dt⌉`; exceeding the step budget aborts the run.
pub fn run<T: Real>(config: &RunConfig<T>) -> Result<Trajectory<T>, SolverError<T>> {
    let initial = init_perturbation(config)?;
    run_from(config, initial, None)
}

/// Like [`run`] from a given state, with optional forcing.
pub fn run_from<T: Real>(
    config: &RunConfig<T>,
    initial: StateField<T>,
    forcing: Option<Arc<dyn Forcing<T>>>,
) -> Result<Trajectory<T>, SolverError<T>> {
    config.validate()?;
    let grid = initial.grid().clone();
    let steps = (config.t_end / config.dt).ceil().to_f64_lossy() as usize;
    let dt = if steps == 0 { config.dt } else { config.t_end / T::from_usize_lossy(steps) };
    let mut integrator = Integrator::new(&grid, &config.params, dt)?;
    integrator.sources = config.sources;
    integrator.dealias = config.dealias;
    if let Some(f) = forcing {
        integrator = integrator.with_forcing(f);
    }
    let monitor = Monitor::new(&grid, integrator.consts());
    let consts = integrator.consts().clone();

    let mut state = initial;
    let mut w = ModalState::from_state(&state);
    let (h4, mut diss) = n_integrand(&grid, &w, &consts);
    let mut sup_h4 = h4;
    let mut integral = T::zero();
    let mut samples = vec![monitor.sample(&state, &w, T::zero(), sup_h4)];

    for n in 0..steps {
        let t = dt * T::from_usize_lossy(n);
        if config.sources {
            let budget = integrator.step_budget(&state);
            if dt > budget {
                return Err(SolverError::StepBudget { dt: dt.to_f64_lossy(), budget: budget.to_f64_lossy(), time: t.to_f64_lossy() });
            }
        }
        state = integrator.step(&state, t)?;
        w = ModalState::from_state(&state);
        let (h4, d_next) = n_integrand(&grid, &w, &consts);
        sup_h4 = sup_h4.max(h4);
        integral += dt * (diss + d_next) / T::lit(2.0);
        diss = d_next;
        if (n + 1) % config.sample_every == 0 || n + 1 == steps {
            samples.push(monitor.sample(&state, &w, dt * T::from_usize_lossy(n + 1), sup_h4 + integral));
        }
    }
    Ok(Trajectory { samples, final_state: state, steps, dt })
}
