use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};

use radhydro::model::{BLaw, PhysicalParams};
use radhydro::solver::{InitialData, Observable, Profile, RunConfig};

use crate::error::CliError;

/// The whole configuration document. Every section is optional and every
/// key has a default, so `{}` is a valid document.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub params: ParamsConfig,
    pub symbol: SymbolConfig,
    pub semigroup: SemigroupConfig,
    pub grid: GridConfig,
    pub run: RunSection,
    pub lp: LpConfig,
    pub rates: RatesConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BLawConfig {
    FourthPower,
    /// Coefficients in increasing degree.
    Polynomial(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    pub mu: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub c_light: f64,
    pub l_rad: f64,
    pub sigma_a: f64,
    pub sigma_s: f64,
    pub b_law: BLawConfig,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        ParamsConfig {
            mu: 1.0,
            lambda: 0.0,
            kappa: 1.0,
            c_light: 1.0,
            l_rad: 1.0,
            sigma_a: 1.0,
            sigma_s: 1.0,
            b_law: BLawConfig::FourthPower,
        }
    }
}

impl ParamsConfig {
    pub fn to_params(&self) -> PhysicalParams<f64> {
        PhysicalParams {
            mu: self.mu,
            lambda: self.lambda,
            kappa: self.kappa,
            c_light: self.c_light,
            l_rad: self.l_rad,
            sigma_a: self.sigma_a,
            sigma_s: self.sigma_s,
            b_law: match &self.b_law {
                BLawConfig::FourthPower => BLaw::FourthPower,
                BLawConfig::Polynomial(c) => BLaw::Polynomial(c.clone()),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymbolConfig {
    pub rho_min: f64,
    pub rho_max: f64,
    /// Log-spaced frequencies in `[rho_min, rho_max]`, written after `ϱ = 0`.
    pub points: usize,
    /// Frequencies sampled for the medium-frequency gap on `[r₀, R₀]`.
    pub gap_points: usize,
    pub tol: f64,
}

impl Default for SymbolConfig {
    fn default() -> Self {
        SymbolConfig { rho_min: 1e-3, rho_max: 1e3, points: 61, gap_points: 400, tol: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableConfig {
    Full,
    Fluid,
    Thermal,
    Xi,
    BigTheta,
}

impl From<ObservableConfig> for Observable {
    fn from(o: ObservableConfig) -> Self {
        match o {
            ObservableConfig::Full => Observable::Full,
            ObservableConfig::Fluid => Observable::Fluid,
            ObservableConfig::Thermal => Observable::Thermal,
            ObservableConfig::Xi => Observable::Xi,
            ObservableConfig::BigTheta => Observable::BigTheta,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemigroupConfig {
    /// Amplitudes `(ρ̂, d̂, θ̂, ĵ₀)` of the Gaussian initial datum.
    pub v0: [f64; 4],
    /// Solenoidal velocity amplitude.
    pub pu: f64,
    pub width: f64,
    pub m: u32,
    pub observable: ObservableConfig,
    pub time_derivative: bool,
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    pub rel_tol: f64,
    /// Fit window; the slope is reported when the window holds enough samples.
    pub fit_window: (f64, f64),
}

impl Default for SemigroupConfig {
    fn default() -> Self {
        SemigroupConfig {
            v0: [1.0, 0.0, 0.0, 0.0],
            pu: 0.0,
            width: 1.0,
            m: 0,
            observable: ObservableConfig::Full,
            time_derivative: false,
            t_min: 0.1,
            t_max: 1e4,
            samples: 41,
            rel_tol: 1e-8,
            fit_window: (10.0, 1e4),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub n: usize,
    pub length: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { dim: 2, n: 64, length: TAU }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileConfig {
    Gaussian,
    RandomBand { band: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub dt: f64,
    pub t_end: f64,
    pub profile: ProfileConfig,
    pub amplitude: f64,
    pub seed: u64,
    pub sample_every: usize,
    pub dealias: bool,
    pub sources: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            dt: 0.01,
            t_end: 1.0,
            profile: ProfileConfig::Gaussian,
            amplitude: 1e-3,
            seed: 0,
            sample_every: 10,
            dealias: true,
            sources: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LpConfig {
    /// Besov/Sobolev regularities at which the initial data are measured.
    pub s: Vec<f64>,
}

impl Default for LpConfig {
    fn default() -> Self {
        LpConfig { s: vec![-1.0, -0.5, 0.0, 0.5, 1.0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatesConfig {
    pub m: Vec<u32>,
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    /// Also run the suite with `κ = 0`.
    pub kappa_zero: bool,
}

impl Default for RatesConfig {
    fn default() -> Self {
        RatesConfig { m: vec![0, 1, 2], t_min: 10.0, t_max: 1e4, samples: 24, kappa_zero: false }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_slice(&bytes).map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
    }

    pub fn run_config(&self) -> RunConfig<f64> {
        let r = &self.run;
        RunConfig {
            params: self.params.to_params(),
            dim: self.grid.dim,
            n: self.grid.n,
            length: self.grid.length,
            dt: r.dt,
            t_end: r.t_end,
            initial: InitialData {
                profile: match r.profile {
                    ProfileConfig::Gaussian => Profile::Gaussian,
                    ProfileConfig::RandomBand { band } => Profile::RandomBand { band },
                },
                amplitude: r.amplitude,
                seed: r.seed,
            },
            sample_every: r.sample_every,
            dealias: r.dealias,
            sources: r.sources,
        }
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        if let Some(s) = seed {
            self.run.seed = s;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let c: Config = serde_json::from_str("{}").unwrap();
        assert_eq!(c, Config::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<Config>(r#"{"paramz": {}}"#).is_err());
        assert!(serde_json::from_str::<Config>(r#"{"params": {"nu": 2}}"#).is_err());
    }

    #[test]
    fn tagged_variants() {
        let c: Config = serde_json::from_str(
            r#"{"params": {"b_law": {"polynomial": [0, 1, 1]}}, "run": {"profile": {"random_band": {"band": 3}}}}"#,
        )
        .unwrap();
        assert_eq!(c.params.b_law, BLawConfig::Polynomial(vec![0.0, 1.0, 1.0]));
        assert_eq!(c.run_config().initial.profile, Profile::RandomBand { band: 3 });
    }

    #[test]
    fn seed_override() {
        assert_eq!(Config::default().with_seed(Some(9)).run.seed, 9);
        assert_eq!(Config::default().with_seed(None).run.seed, 0);
    }
}
