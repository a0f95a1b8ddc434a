use serde::Serialize;

use radhydro::decay::{fit_decay, log_times, verify_rates, DecayReport};
use radhydro::energy::{energy_report, high_equivalence, low_equivalence, select_constants, CrossTerm, EnergyReport, EquivalenceBounds};
use radhydro::io::{write_snapshot, write_trajectory_csv};
use radhydro::lp::{besov_norm, sobolev_norm, Decomposition, Thresholds, Window};
use radhydro::model::{derive_constants, DerivedConstants, StateField};
use radhydro::solver::{init_perturbation, run, semigroup_norms, RadialProfile, SemigroupQuery, SolverError};
use radhydro::symbol::{eigenvalues, mode_change, spectral_gap};

use crate::config::Config;
use crate::error::CliError;
use crate::output::OutputDir;

/// Outcome of a command that ran to completion. A failed check still
/// leaves its outputs behind.
pub enum Verdict {
    Pass,
    Fail(String),
}

#[derive(Serialize)]
struct ConstantsOut {
    nu: f64,
    gamma: f64,
    a: f64,
    b: f64,
    b_eq: f64,
    mu: f64,
    kappa: f64,
    c_light: f64,
    relaxation_rate: f64,
}

impl From<&DerivedConstants<f64>> for ConstantsOut {
    fn from(c: &DerivedConstants<f64>) -> Self {
        ConstantsOut {
            nu: c.nu,
            gamma: c.gamma,
            a: c.a_diff,
            b: c.b_bar,
            b_eq: c.b_eq,
            mu: c.mu,
            kappa: c.kappa,
            c_light: c.c_light,
            relaxation_rate: c.relaxation_rate(),
        }
    }
}

#[derive(Serialize)]
struct ThresholdsOut {
    k0: i32,
    k1: i32,
    r0: f64,
    big_r0: f64,
    r0_candidates: [f64; 3],
}

impl From<&Thresholds<f64>> for ThresholdsOut {
    fn from(t: &Thresholds<f64>) -> Self {
        ThresholdsOut { k0: t.k0, k1: t.k1, r0: t.r0, big_r0: t.big_r0, r0_candidates: t.r0_candidates }
    }
}

fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>, CliError> {
    if !(lo > 0.0 && hi > lo) || count < 2 {
        return Err(CliError::Validation(format!("need 0 < min < max and at least 2 points (got {lo}, {hi}, {count})")));
    }
    Ok(log_times(lo, hi, count))
}

pub fn symbol(config: &Config, out: &mut OutputDir) -> Result<Verdict, CliError> {
    let c = derive_constants(&config.params.to_params())?;
    let s = &config.symbol;
    let mut freqs = vec![0.0];
    freqs.extend(log_grid(s.rho_min, s.rho_max, s.points)?);
    let reports = freqs.iter().map(|&r| eigenvalues(&c, r, s.tol)).collect::<Result<Vec<_>, _>>()?;
    let thresholds = Thresholds::compute(&c);
    let gap = spectral_gap(&c, thresholds.r0, thresholds.big_r0, s.gap_points)?;
    let modes = mode_change(&c);

    let mut eig_rows = Vec::new();
    let mut hurwitz_rows = Vec::new();
    let mut unstable = Vec::new();
    for r in &reports {
        let mut row = vec![r.rho_freq];
        for z in &r.eigenvalues {
            row.extend([z.re, z.im]);
        }
        row.push(r.residuals.iter().copied().fold(0.0, f64::max));
        row.push(r.abscissa);
        eig_rows.push(row);
        let h = &r.hurwitz;
        hurwitz_rows.push(vec![r.rho_freq, h.a1, h.a2, h.a3, h.a4, h.a21, h.a22, h.a23]);
        if r.rho_freq > 0.0 && !(h.all_positive() && r.abscissa > 0.0) {
            unstable.push(r.rho_freq);
        }
    }
    let mut header = vec!["rho".to_string()];
    for i in 1..=4 {
        header.extend([format!("re{i}"), format!("im{i}")]);
    }
    header.extend(["max_residual".to_string(), "abscissa".to_string()]);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.csv("eigenvalues.csv", &header, &eig_rows)?;
    out.csv("hurwitz.csv", &["rho", "a1", "a2", "a3", "a4", "a21", "a22", "a23"], &hurwitz_rows)?;

    #[derive(Serialize)]
    struct Flag {
        coefficient: &'static str,
        printed: f64,
        derived: f64,
    }
    #[derive(Serialize)]
    struct Summary {
        constants: ConstantsOut,
        thresholds: ThresholdsOut,
        gap_iota: f64,
        gap_argmin: f64,
        mode_change: [f64; 7],
        mode_change_flags: Vec<Flag>,
        unstable_frequencies: Vec<f64>,
    }
    out.json(
        "summary.json",
        &Summary {
            constants: (&c).into(),
            thresholds: (&thresholds).into(),
            gap_iota: gap.iota,
            gap_argmin: gap.argmin,
            mode_change: [modes.c1, modes.c2, modes.c3, modes.c4, modes.c5_const, modes.c5_quadratic, modes.c6],
            mode_change_flags: modes
                .flags
                .iter()
                .map(|f| Flag { coefficient: f.coefficient, printed: f.printed, derived: f.derived })
                .collect(),
            unstable_frequencies: unstable.clone(),
        },
    )?;
    if !unstable.is_empty() {
        return Ok(Verdict::Fail(format!("Routh-Hurwitz or spectral abscissa fails at rho = {unstable:?}")));
    }
    if !(gap.iota > 0.0) {
        return Ok(Verdict::Fail(format!("medium-frequency gap {} is not positive", gap.iota)));
    }
    Ok(Verdict::Pass)
}

pub fn semigroup_decay(config: &Config, out: &mut OutputDir) -> Result<Verdict, CliError> {
    let c = derive_constants(&config.params.to_params())?;
    let s = &config.semigroup;
    if !(s.width > 0.0) || !(s.rel_tol > 0.0 && s.rel_tol < 1.0) {
        return Err(CliError::Validation(format!("width must be positive and rel_tol in (0, 1) (got {}, {})", s.width, s.rel_tol)));
    }
    let times = log_grid(s.t_min, s.t_max, s.samples)?;
    let query = SemigroupQuery {
        v0: s.v0,
        pu: s.pu,
        profile: RadialProfile::Gaussian { width: s.width },
        m: s.m,
        observable: s.observable.into(),
        time_derivative: s.time_derivative,
        rel_tol: s.rel_tol,
    };
    let norms = semigroup_norms(&c, &query, &times)?;
    let rows: Vec<Vec<f64>> = times.iter().zip(&norms).map(|(t, n)| vec![*t, *n]).collect();
    out.csv("semigroup.csv", &["t", "norm"], &rows)?;

    #[derive(Serialize)]
    struct Fit {
        window: (f64, f64),
        slope: Option<f64>,
        note: Option<String>,
    }
    let fit = match fit_decay(&times, &norms, s.fit_window) {
        Ok(slope) => Fit { window: s.fit_window, slope: Some(slope), note: None },
        Err(e) => Fit { window: s.fit_window, slope: None, note: Some(e.to_string()) },
    };
    out.json("fit.json", &fit)?;
    Ok(Verdict::Pass)
}

fn snapshot(out: &mut OutputDir, name: &str, state: &StateField<f64>, t: f64) -> Result<(), CliError> {
    let mut w = out.open(name)?;
    write_snapshot(&mut w, state, t)?;
    std::io::Write::flush(&mut w)?;
    Ok(())
}

pub fn simulate(config: &Config, out: &mut OutputDir) -> Result<Verdict, CliError> {
    let rc = config.run_config();
    rc.validate()?;
    match run(&rc) {
        Ok(traj) => {
            let mut w = out.open("trajectory.csv")?;
            write_trajectory_csv(&mut w, &traj.samples)?;
            std::io::Write::flush(&mut w)?;
            let t_end = traj.samples.last().map(|s| s.t).unwrap_or(0.0);
            snapshot(out, "final.snap", &traj.final_state, t_end)?;
            Ok(Verdict::Pass)
        }
        Err(SolverError::Aborted { time, reason, last_valid }) => {
            snapshot(out, "last_valid.snap", &last_valid, time)?;
            Err(CliError::Numerical(format!("run aborted at t = {time}: {reason}")))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn lp(config: &Config, out: &mut OutputDir) -> Result<Verdict, CliError> {
    let rc = config.run_config();
    let c = derive_constants(&rc.params)?;
    let state = init_perturbation(&rc)?;
    let grid = state.grid().clone();
    let decomp = Decomposition::new(&grid, Thresholds::compute(&c));
    let comps = state.named_components();

    let mut shells: Vec<i32> = (decomp.k_min..=decomp.k_max).collect();
    shells.retain(|k| decomp.mask(*k).iter().any(|&m| m));
    let energies: Vec<Vec<(i32, f64)>> = comps.iter().map(|(_, f)| decomp.shell_energies(f)).collect();
    let rows: Vec<Vec<f64>> = shells
        .iter()
        .map(|&k| {
            let mut row = vec![k as f64];
            for e in &energies {
                row.push(e.iter().find(|(j, _)| *j == k).map(|(_, v)| *v).unwrap_or(0.0));
            }
            row
        })
        .collect();
    let mut header = vec!["k".to_string()];
    header.extend(comps.iter().map(|(n, _)| n.to_string()));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.csv("shells.csv", &header, &rows)?;

    #[derive(Serialize)]
    struct Regularity {
        s: f64,
        besov: f64,
        besov_low: f64,
        besov_high: f64,
        sobolev: f64,
    }
    #[derive(Serialize)]
    struct Component {
        name: String,
        l2_squared: f64,
        shell_sum: f64,
        norms: Vec<Regularity>,
    }
    let mut report = Vec::new();
    for ((name, f), e) in comps.iter().zip(&energies) {
        let mut norms = Vec::new();
        for &s in &config.lp.s {
            norms.push(Regularity {
                s,
                besov: besov_norm(&decomp, f, s, Window::All)?,
                besov_low: besov_norm(&decomp, f, s, Window::Long)?,
                besov_high: besov_norm(&decomp, f, s, Window::Short)?,
                sobolev: sobolev_norm(&grid, f, s),
            });
        }
        report.push(Component {
            name: name.to_string(),
            l2_squared: grid.l2_norm_sq(f),
            shell_sum: e.iter().map(|(_, v)| v).sum(),
            norms,
        });
    }
    #[derive(Serialize)]
    struct LpOut {
        thresholds: ThresholdsOut,
        k_min: i32,
        k_max: i32,
        components: Vec<Component>,
    }
    out.json("lp.json", &LpOut { thresholds: (&decomp.thresholds).into(), k_min: decomp.k_min, k_max: decomp.k_max, components: report })?;
    Ok(Verdict::Pass)
}

pub fn energy(config: &Config, out: &mut OutputDir) -> Result<Verdict, CliError> {
    let rc = config.run_config();
    let c = derive_constants(&rc.params)?;
    let initial = init_perturbation(&rc)?;
    let grid = initial.grid().clone();
    let decomp = Decomposition::new(&grid, Thresholds::compute(&c));
    let ac = select_constants(&c, &decomp.thresholds);
    let cross = CrossTerm::default();
    let traj = run(&rc)?;

    let mut w = out.open("trajectory.csv")?;
    write_trajectory_csv(&mut w, &traj.samples)?;
    std::io::Write::flush(&mut w)?;

    #[derive(Serialize)]
    struct Shell {
        k: i32,
        bounds: EquivalenceBounds,
    }
    #[derive(Serialize)]
    struct EnergyOut {
        beta1: f64,
        beta2: f64,
        beta3: f64,
        thresholds: ThresholdsOut,
        resolves_big_r0: bool,
        low_equivalence: EquivalenceBounds,
        high_equivalence: Vec<Shell>,
        initial: EnergyReport,
        final_state: EnergyReport,
    }
    let high = (ac.k1 + 1..=decomp.k_max)
        .filter(|k| decomp.mask(*k).iter().any(|&m| m))
        .map(|k| Shell { k, bounds: high_equivalence(&decomp, k, &ac, cross) })
        .collect();
    let resolves = grid.fundamental() * grid.max_mode() as f64 >= decomp.thresholds.big_r0;
    out.json(
        "energy.json",
        &EnergyOut {
            beta1: ac.beta1,
            beta2: ac.beta2,
            beta3: ac.beta3,
            thresholds: (&decomp.thresholds).into(),
            resolves_big_r0: resolves,
            low_equivalence: low_equivalence(&grid, &ac),
            high_equivalence: high,
            initial: energy_report(&initial, &decomp, &ac, cross),
            final_state: energy_report(&traj.final_state, &decomp, &ac, cross),
        },
    )?;
    Ok(Verdict::Pass)
}

pub fn verify_rates_cmd(config: &Config, out: &mut OutputDir) -> Result<Verdict, CliError> {
    let c = derive_constants(&config.params.to_params())?;
    let r = &config.rates;
    let times = log_grid(r.t_min, r.t_max, r.samples)?;
    let mut reports: Vec<DecayReport> = verify_rates(&c, &r.m, &times)?;
    if r.kappa_zero {
        reports.extend(verify_rates(&c.with_kappa(0.0), &r.m, &times)?);
    }
    out.json("rates.json", &reports)?;
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{} (slope {:.4}, target {:.2})", r.quantity, r.slope, r.target))
        .collect();
    if failed.is_empty() {
        Ok(Verdict::Pass)
    } else {
        Ok(Verdict::Fail(format!("rate reports out of tolerance: {}", failed.join(", "))))
    }
}
