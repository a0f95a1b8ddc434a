use num_complex::Complex;
use rayon::prelude::*;

use crate::scalar::Real;
use crate::spectral::Grid;

use super::{eval_b_remainder, DerivedConstants, ModelError, PhysicalParams, StateField};

/// Nonlinear right-hand sides `S¹..S⁴` of the perturbation system, sampled
/// on the grid.
#[derive(Clone, Debug)]
pub struct SourceField<T> {
    pub s1: Vec<T>,
    pub s2: Vec<Vec<T>>,
    pub s3: Vec<T>,
    pub s4: Vec<T>,
    /// `u·∇ρ`.
    pub s11: Vec<T>,
    /// `ρ div u`.
    pub s12: Vec<T>,
}

impl<T: Real> SourceField<T> {
    pub fn zeros(len: usize, dim: usize) -> Self {
        let z = vec![T::zero(); len];
        SourceField { s1: z.clone(), s2: vec![z.clone(); dim], s3: z.clone(), s4: z.clone(), s11: z.clone(), s12: z }
    }

    /// Components in state order `(S¹, S², S³, S⁴)`.
    pub fn components(&self) -> impl Iterator<Item = &Vec<T>> {
        std::iter::once(&self.s1).chain(self.s2.iter()).chain([&self.s3, &self.s4])
    }

    pub fn components_mut(&mut self) -> impl Iterator<Item = &mut Vec<T>> {
        std::iter::once(&mut self.s1).chain(self.s2.iter_mut()).chain([&mut self.s3, &mut self.s4])
    }
}

struct Derivatives<T> {
    grad_rho: Vec<Vec<T>>,
    grad_theta: Vec<Vec<T>>,
    grad_j: Vec<Vec<T>>,
    /// `du[i][j] = ∂_j u_i`.
    du: Vec<Vec<Vec<T>>>,
    lap_u: Vec<Vec<T>>,
    grad_div_u: Vec<Vec<T>>,
    lap_theta: Vec<T>,
}

fn derivatives<T: Real>(state: &StateField<T>) -> Derivatives<T> {
    let grid = state.grid();
    let dim = grid.dim();
    let hat = state.spectral();
    let grad = |f: &[Complex<T>]| -> Vec<Vec<T>> {
        (0..dim).map(|a| grid.inverse(&grid.derivative_hat(f, a))).collect()
    };
    let lap = |f: &[Complex<T>]| grid.inverse(&grid.apply_radial(f, |k2| -k2));
    let div_hat: Vec<Complex<T>> = (0..dim)
        .map(|a| grid.derivative_hat(&hat.u[a], a))
        .reduce(|acc, d| acc.iter().zip(&d).map(|(x, y)| x + y).collect())
        .expect("dim >= 1");
    Derivatives {
        grad_rho: grad(&hat.rho),
        grad_theta: grad(&hat.theta),
        grad_j: grad(&hat.j0),
        du: hat.u.iter().map(|ui| grad(ui)).collect(),
        lap_u: hat.u.iter().map(|ui| lap(ui)).collect(),
        grad_div_u: grad(&div_hat),
        lap_theta: lap(&hat.theta),
    }
}

fn positivity_error<T: Real>(grid: &Grid<T>, quantity: &'static str, index: usize, value: T) -> ModelError {
    ModelError::Positivity {
        quantity,
        index,
        position: grid.coords(index).map(|x| x.to_f64_lossy()),
        value: value.to_f64_lossy(),
    }
}

/// Evaluates the nonlinear sources with spectral derivatives and pointwise
/// products. `g` and `h` are evaluated as exact rational functions of `ρ̃`.
pub fn nonlinear_sources<T: Real>(
    state: &StateField<T>,
    params: &PhysicalParams<T>,
    consts: &DerivedConstants<T>,
) -> Result<SourceField<T>, ModelError> {
    let grid = state.grid();
    let dim = grid.dim();
    let n = grid.len();

    let rho = state.rho();
    let theta = state.theta();
    if let Some(i) = (0..n).into_par_iter().find_first(|&i| !(T::one() + rho[i] > T::zero())) {
        return Err(positivity_error(grid, "density 1 + rho", i, T::one() + rho[i]));
    }
    if let Some(i) = (0..n).into_par_iter().find_first(|&i| !(T::one() + theta[i] > T::zero())) {
        return Err(positivity_error(grid, "temperature 1 + theta", i, T::one() + theta[i]));
    }

    let d = derivatives(state);
    let u = state.u();
    let j0 = state.j0();

    let mu = consts.mu;
    let lambda = consts.nu - mu - mu;
    let kappa = consts.kappa;
    let c = consts.c_light;
    let lsa = consts.b_bar;
    let gamma = consts.gamma;
    let two3 = T::lit(2.0) / T::lit(3.0);
    let inv3c = T::one() / (T::lit(3.0) * c);
    let coef_uj = T::lit(2.0) / (T::lit(9.0) * c);

    let points: Vec<(T, T, Vec<T>, T, T)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let r = rho[i];
            let h = T::one() / (T::one() + r);
            let g = -r * h;
            let div_u: T = (0..dim).map(|a| d.du[a][a][i]).sum();
            let s11: T = (0..dim).map(|a| u[a][i] * d.grad_rho[a][i]).sum();
            let s12 = r * div_u;

            let s2: Vec<T> = (0..dim)
                .map(|a| {
                    let advect: T = (0..dim).map(|b| u[b][i] * d.du[a][b][i]).sum();
                    let div_t = mu * d.lap_u[a][i] + (mu + lambda) * d.grad_div_u[a][i];
                    -advect - g * d.grad_rho[a][i] - h * theta[i] * d.grad_rho[a][i] + g * div_t
                        - inv3c * g * d.grad_j[a][i]
                })
                .collect();

            let mut t_grad_u = lambda * div_u * div_u;
            for a in 0..dim {
                for b in 0..dim {
                    t_grad_u += mu * (d.du[a][b][i] + d.du[b][a][i]) * d.du[a][b][i];
                }
            }
            let u_grad_j: T = (0..dim).map(|a| u[a][i] * d.grad_j[a][i]).sum();
            let u_grad_theta: T = (0..dim).map(|a| u[a][i] * d.grad_theta[a][i]).sum();
            let rem = eval_b_remainder(params, &theta[i]).expect("temperature positivity checked");
            let s3 = -two3 * theta[i] * div_u + two3 * kappa * g * d.lap_theta[i] - two3 * lsa * h * rem
                - two3 * g * (gamma * theta[i] - lsa * j0[i])
                + two3 * h * t_grad_u
                + coef_uj * h * u_grad_j
                - u_grad_theta;
            let s4 = c * lsa * rem;
            (s11, s12, s2, s3, s4)
        })
        .collect();

    let mut out = SourceField::zeros(n, dim);
    for (i, (s11, s12, s2, s3, s4)) in points.into_iter().enumerate() {
        out.s11[i] = s11;
        out.s12[i] = s12;
        out.s1[i] = -(s11 + s12);
        for (a, v) in s2.into_iter().enumerate() {
            out.s2[a][i] = v;
        }
        out.s3[i] = s3;
        out.s4[i] = s4;
    }
    Ok(out)
}
