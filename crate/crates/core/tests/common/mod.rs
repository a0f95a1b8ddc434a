#![allow(dead_code)]

use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use radhydro::linalg::Matrix;
use radhydro::model::{derive_constants, BLaw, PhysicalParams};
use radhydro::solver::{Forcing, Integrator, ModalState};
use radhydro::spectral::Grid;
use radhydro::symbol::assemble_symbol;

/// Admissible parameters drawn away from the constraint boundaries.
pub fn random_params(rng: &mut ChaCha8Rng) -> PhysicalParams<f64> {
    let mu = rng.gen_range(0.1..5.0);
    PhysicalParams {
        mu,
        lambda: rng.gen_range(-0.6 * mu..3.0),
        kappa: rng.gen_range(0.0..5.0),
        c_light: rng.gen_range(0.1..5.0),
        l_rad: rng.gen_range(0.1..5.0),
        sigma_a: rng.gen_range(0.1..5.0),
        sigma_s: rng.gen_range(0.0..5.0),
        b_law: BLaw::FourthPower,
    }
}

/// Zero-mean real field whose spectrum lives on `max|mₐ| ≤ band`, with
/// amplitude `|m|^{−decay}`.
pub fn random_field(grid: &Grid<f64>, band: i64, decay: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let hat: Vec<Complex<f64>> = (0..grid.len())
        .map(|idx| {
            let m = grid.mode(idx);
            if idx == 0 || m.iter().any(|x| x.abs() > band) {
                return Complex::new(0.0, 0.0);
            }
            let w = (grid.mode_norm2(idx) as f64).powf(-decay / 2.0);
            Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * w
        })
        .collect();
    let mut f = grid.inverse(&hat);
    let mean = f.iter().sum::<f64>() / f.len() as f64;
    f.iter_mut().for_each(|x| *x -= mean);
    f
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// `count` log-spaced points on `[lo, hi]`.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (count - 1) as f64).exp()).collect()
}

/// Band-limited interpolation of `f` from `from` onto `to` (same dimension
/// and length, `to.n() ≥ from.n()`).
pub fn resample(from: &Grid<f64>, to: &Grid<f64>, f: &[f64]) -> Vec<f64> {
    let hat = from.forward(f);
    let dim = from.dim();
    let scale = (to.n() as f64 / from.n() as f64).powi(dim as i32);
    let mut out = vec![Complex::new(0.0, 0.0); to.len()];
    for (idx, v) in hat.iter().enumerate() {
        if from.is_nyquist(idx) {
            continue;
        }
        let m = from.mode(idx);
        let mut ijk = [0usize; 3];
        for a in 0..dim {
            ijk[a] = m[a].rem_euclid(to.n() as i64) as usize;
        }
        out[to.ravel(ijk)] = v * scale;
    }
    to.inverse(&out)
}

/// Forcing that makes `U*(t) = e^{−t}U₀` an exact solution.
pub struct Manufactured {
    base: ModalState<f64>,
    sources: Integrator<f64>,
    symbols: Vec<Matrix<f64, 4>>,
    heat: Vec<f64>,
}

impl Manufactured {
    pub fn new(grid: &Grid<f64>, params: &PhysicalParams<f64>, base: ModalState<f64>) -> Self {
        let c = derive_constants(params).unwrap();
        let symbols = (0..grid.len()).map(|i| assemble_symbol(&c, grid.k2(i).sqrt()).unwrap().entries).collect();
        let heat = (0..grid.len()).map(|i| c.mu * grid.k2(i)).collect();
        Manufactured { base, sources: Integrator::new(grid, params, 1.0).unwrap(), symbols, heat }
    }

    pub fn exact(&self, t: f64) -> ModalState<f64> {
        ModalState::zeros(self.base.comp.len()).axpy((-t).exp(), &self.base)
    }
}

impl Forcing<f64> for Manufactured {
    fn modal(&self, grid: &Grid<f64>, t: f64) -> ModalState<f64> {
        let w = self.exact(t);
        let n = self.sources.nonlinear(&w, t).unwrap();
        let mut f = ModalState::zeros(grid.len());
        for idx in 1..grid.len() {
            if grid.is_nyquist(idx) {
                continue;
            }
            let a = &self.symbols[idx];
            let v = &w.comp[idx];
            for i in 0..4 {
                let av: Complex<f64> = (0..4).map(|j| v[j] * a[(i, j)]).sum();
                f.comp[idx][i] = -v[i] + av - n.comp[idx][i];
            }
            for i in 0..3 {
                f.pu[idx][i] = -w.pu[idx][i] + w.pu[idx][i] * self.heat[idx] - n.pu[idx][i];
            }
        }
        f
    }
}
