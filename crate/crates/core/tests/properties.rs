use std::f64::consts::TAU;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use radhydro::decay::fit_decay;
use radhydro::linalg::det_cofactor;
use radhydro::lp::{Decomposition, Thresholds};
use radhydro::model::{derive_constants, eval_b_remainder, helmholtz_split, BLaw, DerivedConstants, PhysicalParams, StateField};
use radhydro::spectral::Grid;
use radhydro::symbol::{assemble_symbol, char_poly, mode_change, propagator, routh_hurwitz, spectral_abscissa};

mod common;

fn params() -> impl Strategy<Value = PhysicalParams<f64>> {
    (0.1..5.0f64, -0.6..3.0f64, 0.0..5.0f64, 0.1..5.0f64, 0.1..5.0f64, 0.1..5.0f64, 0.0..5.0f64).prop_map(
        |(mu, lam, kappa, c_light, l_rad, sigma_a, sigma_s)| PhysicalParams {
            mu,
            lambda: lam * mu,
            kappa,
            c_light,
            l_rad,
            sigma_a,
            sigma_s,
            b_law: BLaw::FourthPower,
        },
    )
}

fn consts() -> impl Strategy<Value = DerivedConstants<f64>> {
    params().prop_map(|p| derive_constants(&p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn characteristic_polynomial_is_determinant(c in consts(), rho in 1e-3..10.0f64, lambda in -20.0..20.0f64) {
        let a = assemble_symbol(&c, rho).unwrap().entries;
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..4).map(|j| if i == j { lambda - a[(i, j)] } else { -a[(i, j)] }).collect())
            .collect();
        let det = det_cofactor(&rows);
        let p = char_poly(&c, rho).unwrap();
        let scale: f64 = p.monic_ascending().iter().enumerate().map(|(k, ck)| (ck * lambda.powi(k as i32)).abs()).sum();
        prop_assert!((det - p.eval(&lambda)).abs() <= 1e-10 * scale.max(1.0));
    }

    #[test]
    fn symbol_is_strictly_stable(c in consts(), rho in 1e-2..1e3f64) {
        prop_assert!(routh_hurwitz(&c, rho).unwrap().all_positive());
        prop_assert!(spectral_abscissa(&c, rho).unwrap() > 0.0);
    }

    #[test]
    fn propagator_is_a_semigroup(c in consts(), rho in 1e-2..20.0f64, t in 0.0..2.0f64, s in 0.0..2.0f64) {
        let e = |t: f64| propagator(&c, rho, t).unwrap().matrix;
        let lhs = e(t + s);
        let rhs = &e(t) * &e(s);
        prop_assert!((&lhs - &rhs).norm1() <= 1e-10 * (1.0 + lhs.norm1()));
    }

    #[test]
    fn mode_change_round_trip(c in consts(), theta in -1.0..1.0f64, j0 in -1.0..1.0f64) {
        let m = mode_change(&c);
        let (big, xi) = m.forward(&theta, &j0);
        let (t2, j2) = m.inverse(&big, &xi);
        prop_assert!((t2 - theta).abs() <= 1e-12 && (j2 - j0).abs() <= 1e-12);
        let (b2, x2) = m.forward(&t2, &j2);
        prop_assert!((b2 - big).abs() <= 1e-12 * (1.0 + big.abs()) && (x2 - xi).abs() <= 1e-12 * (1.0 + xi.abs()));
    }

    #[test]
    fn remainder_is_nonnegative_for_convex_law(x in -0.99..5.0f64) {
        let p = PhysicalParams::<f64>::reference();
        prop_assert!(eval_b_remainder(&p, &x).unwrap() >= 0.0);
    }

    #[test]
    fn shell_energies_add_up(seed in any::<u64>(), band in 1i64..31) {
        let grid = Grid::new(2, 64, TAU).unwrap();
        let f = common::random_field(&grid, band, 0.5, &mut ChaCha8Rng::seed_from_u64(seed));
        let decomp = Decomposition::new(&grid, Thresholds::compute(&derive_constants(&PhysicalParams::reference()).unwrap()));
        let total = grid.l2_norm_sq(&f);
        let shells: f64 = decomp.shell_energies(&f).iter().map(|(_, e)| e).sum();
        prop_assert!((shells - total).abs() <= 1e-12 * total);
    }

    #[test]
    fn helmholtz_split_is_orthogonal(seed in any::<u64>(), dim in 1usize..4) {
        let grid = Grid::new(dim, 16, 1.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<Vec<f64>> = (0..dim).map(|_| common::random_field(&grid, 7, 1.0, &mut rng)).collect();
        let z = vec![0.0; grid.len()];
        let state = StateField::from_fields(&grid, z.clone(), u.clone(), z.clone(), z).unwrap();
        let split = helmholtz_split(&state).unwrap();
        let total: f64 = u.iter().map(|c| grid.l2_norm_sq(c)).sum();
        let parts = grid.l2_norm_sq(&split.d) + split.pu.iter().map(|c| grid.l2_norm_sq(c)).sum::<f64>();
        prop_assert!((parts - total).abs() <= 1e-12 * total);
        let pu_hat: Vec<_> = split.pu.iter().map(|c| grid.forward(c)).collect();
        let div_max = (0..grid.len())
            .map(|idx| {
                let xi = grid.wavevector(idx);
                (0..dim).map(|a| pu_hat[a][idx] * xi[a]).sum::<num_complex::Complex<f64>>().norm()
            })
            .fold(0.0, f64::max);
        let scale = pu_hat.iter().flatten().fold(1.0f64, |m, v| m.max(v.norm()));
        prop_assert!(div_max <= 1e-12 * scale * grid.fundamental() * 8.0);
    }

    #[test]
    fn spectral_round_trip(seed in any::<u64>(), dim in 1usize..4) {
        let grid = Grid::new(dim, 16, 2.0).unwrap();
        let f = common::random_field(&grid, 7, 0.0, &mut ChaCha8Rng::seed_from_u64(seed));
        let back = grid.inverse(&grid.forward(&f));
        let err = f.iter().zip(&back).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        prop_assert!(err <= 1e-13 * f.iter().fold(1.0f64, |m, v| m.max(v.abs())));
    }

    #[test]
    fn fit_recovers_power_law(slope in -3.0..-0.1f64, amp in 1e-3..1e3f64) {
        let t = common::log_space(1.0, 1e4, 40);
        let y: Vec<f64> = t.iter().map(|s| amp * (1.0 + s).powf(slope)).collect();
        let fitted = fit_decay(&t, &y, (1.0, 1e4)).unwrap();
        prop_assert!((fitted - slope).abs() <= 1e-10);
    }
}
