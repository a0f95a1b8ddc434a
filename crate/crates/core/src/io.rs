//! Field snapshots and trajectory tables.
//!
//! A snapshot is a little-endian `u64` header length, a UTF-8 JSON header,
//! then every field as little-endian `f64` samples in header order.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelError, StateField};
use crate::scalar::Real;
use crate::solver::Sample;
use crate::spectral::{Grid, GridError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed header: {0}")]
    Header(#[from] serde_json::Error),
    #[error("snapshot payload has {got} bytes, header implies {expected}")]
    Payload { got: usize, expected: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotHeader {
    pub dim: usize,
    pub n: usize,
    pub length: f64,
    pub fields: Vec<String>,
    pub time: f64,
}

pub fn write_snapshot<T: Real, W: Write>(out: &mut W, state: &StateField<T>, time: T) -> Result<(), IoError> {
    let grid = state.grid();
    let comps = state.named_components();
    let header = SnapshotHeader {
        dim: grid.dim(),
        n: grid.n(),
        length: grid.length().to_f64_lossy(),
        fields: comps.iter().map(|(n, _)| n.to_string()).collect(),
        time: time.to_f64_lossy(),
    };
    let text = serde_json::to_vec(&header)?;
    out.write_all(&(text.len() as u64).to_le_bytes())?;
    out.write_all(&text)?;
    let mut buf = Vec::with_capacity(comps.len() * grid.len() * 8);
    for (_, f) in comps {
        for v in f {
            buf.extend_from_slice(&v.to_f64_lossy().to_le_bytes());
        }
    }
    out.write_all(&buf)?;
    Ok(())
}

/// Reads a snapshot back; the fields must have zero mean.
pub fn read_snapshot<R: Read>(input: &mut R) -> Result<(SnapshotHeader, StateField<f64>), IoError> {
    let mut len = [0u8; 8];
    input.read_exact(&mut len)?;
    let mut text = vec![0u8; u64::from_le_bytes(len) as usize];
    input.read_exact(&mut text)?;
    let header: SnapshotHeader = serde_json::from_slice(&text)?;
    let grid = Grid::new(header.dim, header.n, header.length)?;
    let mut payload = Vec::new();
    input.read_to_end(&mut payload)?;
    let expected = (header.dim + 3) * grid.len() * 8;
    if payload.len() != expected || header.fields.len() != header.dim + 3 {
        return Err(IoError::Payload { got: payload.len(), expected });
    }
    let mut fields: Vec<Vec<f64>> = payload
        .chunks_exact(grid.len() * 8)
        .map(|c| c.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes"))).collect())
        .collect();
    let j0 = fields.pop().expect("field count checked");
    let theta = fields.pop().expect("field count checked");
    let rho = fields.remove(0);
    let state = StateField::from_fields(&grid, rho, fields, theta, j0)?;
    Ok((header, state))
}

/// Column names of [`write_trajectory_csv`].
pub const TRAJECTORY_COLUMNS: [&str; 17] = [
    "t",
    "grad0",
    "grad1",
    "grad2",
    "grad3",
    "grad4",
    "h4_norm",
    "theta_norm",
    "xi_norm",
    "big_theta_norm",
    "xi_over_theta",
    "min_density",
    "min_temperature",
    "mass_mean",
    "n_functional",
    "high_energy",
    "low_energy",
];

/// One header row, then one row per sample with 17 significant digits.
pub fn write_trajectory_csv<W: Write>(out: &mut W, samples: &[Sample]) -> std::io::Result<()> {
    writeln!(out, "{}", TRAJECTORY_COLUMNS.join(","))?;
    for s in samples {
        let ratio = if s.theta_norm > 0.0 { s.xi_norm / s.theta_norm } else { 0.0 };
        let row = [
            s.t,
            s.grad_norms[0],
            s.grad_norms[1],
            s.grad_norms[2],
            s.grad_norms[3],
            s.grad_norms[4],
            s.h4_norm,
            s.theta_norm,
            s.xi_norm,
            s.big_theta_norm,
            ratio,
            s.min_density,
            s.min_temperature,
            s.mass_mean,
            s.n_functional,
            s.high_energy,
            s.low_energy,
        ];
        writeln!(out, "{}", row.iter().map(|v| format_float(*v)).collect::<Vec<_>>().join(","))?;
    }
    Ok(())
}

/// Scientific notation with 17 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}
