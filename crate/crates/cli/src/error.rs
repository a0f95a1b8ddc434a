use thiserror::Error;

use radhydro::decay::DecayError;
use radhydro::io::IoError;
use radhydro::lp::LpError;
use radhydro::model::ModelError;
use radhydro::solver::SolverError;
use radhydro::symbol::SymbolError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Output(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Positivity { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<SymbolError> for CliError {
    fn from(e: SymbolError) -> Self {
        match e {
            SymbolError::NegativeFrequency(_) | SymbolError::NegativeTime(_) | SymbolError::Tolerance(_) | SymbolError::Band { .. } => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<SolverError<f64>> for CliError {
    fn from(e: SolverError<f64>) -> Self {
        match e {
            SolverError::Config(_) | SolverError::Grid(_) => CliError::Validation(e.to_string()),
            SolverError::Model(m) => m.into(),
            SolverError::Symbol(s) => s.into(),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<LpError> for CliError {
    fn from(e: LpError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<DecayError> for CliError {
    fn from(e: DecayError) -> Self {
        match e {
            DecayError::Semigroup(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Io(io) => CliError::Output(io),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.into())
    }
}
