//! Log-log decay fits and the rate table of the linear semigroup.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::DerivedConstants;
use crate::scalar::Real;
use crate::solver::{semigroup_norms, Observable, SemigroupQuery, SolverError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecayError {
    #[error("fit window holds {got} samples, at least 8 are required")]
    TooFewSamples { got: usize },
    #[error("norm at sample {index} is not positive ({value})")]
    NonPositive { index: usize, value: f64 },
    #[error("times are not strictly increasing at sample {index}")]
    NotIncreasing { index: usize },
    #[error("semigroup evaluation failed: {0}")]
    Semigroup(String),
}

/// Least-squares slope of `log(norm)` against `log(1+t)` over the samples
/// with `window.0 ≤ t ≤ window.1`.
pub fn fit_decay<T: Real>(times: &[T], norms: &[T], window: (T, T)) -> Result<T, DecayError> {
    for i in 1..times.len() {
        if !(times[i] > times[i - 1]) {
            return Err(DecayError::NotIncreasing { index: i });
        }
    }
    let picked: Vec<(usize, T, T)> = times
        .iter()
        .zip(norms)
        .enumerate()
        .filter(|(_, (t, _))| **t >= window.0 && **t <= window.1)
        .map(|(i, (t, n))| (i, *t, *n))
        .collect();
    if picked.len() < 8 {
        return Err(DecayError::TooFewSamples { got: picked.len() });
    }
    if let Some(&(index, _, v)) = picked.iter().find(|(_, _, n)| !(*n > T::zero())) {
        return Err(DecayError::NonPositive { index, value: v.to_f64_lossy() });
    }
    let xs: Vec<T> = picked.iter().map(|(_, t, _)| (T::one() + *t).ln()).collect();
    let ys: Vec<T> = picked.iter().map(|(_, _, n)| n.ln()).collect();
    let k = T::from_usize_lossy(xs.len());
    let mx = xs.iter().copied().sum::<T>() / k;
    let my = ys.iter().copied().sum::<T>() / k;
    let sxy: T = xs.iter().zip(&ys).map(|(x, y)| (*x - mx) * (*y - my)).sum();
    let sxx: T = xs.iter().map(|x| (*x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// How a fitted slope is judged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateCheck {
    /// `|slope − target| ≤ tolerance`.
    TwoSided,
    /// `slope ≤ target + tolerance`.
    UpperBound,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub quantity: String,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub window: (f64, f64),
    pub slope: f64,
    pub target: f64,
    pub tolerance: f64,
    pub check: RateCheck,
    pub pass: bool,
}

impl DecayReport {
    pub fn judge(quantity: impl Into<String>, times: &[f64], norms: &[f64], target: f64, tolerance: f64, check: RateCheck) -> Result<Self, DecayError> {
        let window = (times.first().copied().unwrap_or(0.0).max(10.0), times.last().copied().unwrap_or(0.0));
        let slope = fit_decay(times, norms, window)?;
        let pass = match check {
            RateCheck::TwoSided => (slope - target).abs() <= tolerance,
            RateCheck::UpperBound => slope <= target + tolerance,
        };
        Ok(DecayReport {
            quantity: quantity.into(),
            times: times.to_vec(),
            norms: norms.to_vec(),
            window,
            slope,
            target,
            tolerance,
            check,
            pass,
        })
    }
}

/// `count` log-spaced times on `[lo, hi]`.
pub fn log_times(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

/// Tolerance on fitted slopes.
pub const SLOPE_TOLERANCE: f64 = 0.05;

/// Relative quadrature tolerance of the norms entering a fit.
pub const FIT_QUADRATURE_TOL: f64 = 1e-8;

struct Case {
    quantity: String,
    query: SemigroupQuery<f64>,
    target: f64,
    tolerance: f64,
    check: RateCheck,
}

/// Initial direction with every compressible component and a solenoidal
/// velocity, so that no decay mechanism is switched off.
pub const GENERIC_DIRECTION: [f64; 4] = [1.0, 1.0, 1.0, 1.0];

/// Fits the semigroup decay rates: `∇^m U` against `−3/4 − m/2` (`m ≤ 2`,
/// upper bound `−7/4` for `m = 3, 4`), `∇^m Ξ` against `−5/4 − m/2`,
/// `∂ₜ(ρ, u)` against `−5/4` and `∂ₜ(θ, j₀)` against `−3/4`.
pub fn verify_rates<T: Real>(consts: &DerivedConstants<T>, m_list: &[u32], t_grid: &[f64]) -> Result<Vec<DecayReport>, DecayError> {
    let consts = DerivedConstants {
        nu: consts.nu.to_f64_lossy(),
        gamma: consts.gamma.to_f64_lossy(),
        a_diff: consts.a_diff.to_f64_lossy(),
        b_bar: consts.b_bar.to_f64_lossy(),
        b_eq: consts.b_eq.to_f64_lossy(),
        mu: consts.mu.to_f64_lossy(),
        kappa: consts.kappa.to_f64_lossy(),
        c_light: consts.c_light.to_f64_lossy(),
    };
    let prefix = if consts.kappa_is_zero() { "kappa0/" } else { "" };
    let base = |m: u32, obs: Observable| {
        let mut q = SemigroupQuery::new(GENERIC_DIRECTION, m, obs);
        q.pu = 1.0;
        q.rel_tol = FIT_QUADRATURE_TOL;
        q
    };
    let mut cases = Vec::new();
    for &m in m_list {
        let (target, check) = if m <= 2 { (-0.75 - 0.5 * m as f64, RateCheck::TwoSided) } else { (-1.75, RateCheck::UpperBound) };
        let tolerance = if m <= 2 { SLOPE_TOLERANCE } else { 0.1 };
        cases.push(Case { quantity: format!("{prefix}grad{m}"), query: base(m, Observable::Full), target, tolerance, check });
        if m <= 2 {
            cases.push(Case {
                quantity: format!("{prefix}grad{m}_xi"),
                query: base(m, Observable::Xi),
                target: -1.25 - 0.5 * m as f64,
                tolerance: SLOPE_TOLERANCE,
                check: RateCheck::TwoSided,
            });
        }
    }
    for (name, obs, target) in [("dt_fluid", Observable::Fluid, -1.25), ("dt_thermal", Observable::Thermal, -0.75)] {
        let mut query = base(0, obs);
        query.time_derivative = true;
        cases.push(Case { quantity: format!("{prefix}{name}"), query, target, tolerance: SLOPE_TOLERANCE, check: RateCheck::TwoSided });
    }
    cases
        .par_iter()
        .map(|c| {
            let norms = semigroup_norms(&consts, &c.query, t_grid).map_err(|e: SolverError<f64>| DecayError::Semigroup(e.to_string()))?;
            DecayReport::judge(c.quantity.clone(), t_grid, &norms, c.target, c.tolerance, c.check)
        })
        .collect()
}
