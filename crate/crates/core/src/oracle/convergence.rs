use serde::Serialize;

use super::{eigen_lowest, OracleConfig};
use crate::error::{domain, Result};
use crate::potential::Potential;

/// Outcome of a grid-refinement study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceStatus {
    /// Every error is resolvable and shrinks monotonically.
    Estimated,
    /// Errors are already at the resolution floor; no order can be read off.
    AtFloor,
    /// Errors do not shrink monotonically.
    NonMonotone,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub level: usize,
    pub spacings: Vec<f64>,
    pub energies: Vec<f64>,
    /// Closed-form value when known; otherwise errors are successive
    /// differences.
    pub reference: Option<f64>,
    pub errors: Vec<f64>,
    /// `log2(eᵢ / eᵢ₊₁)` for each consecutive pair of errors.
    pub orders: Vec<f64>,
    pub status: ConvergenceStatus,
}

impl ConvergenceReport {
    /// The finest-grid order estimate when the status is `Estimated`.
    pub fn order(&self) -> Option<f64> {
        match self.status {
            ConvergenceStatus::Estimated => self.orders.last().copied(),
            _ => None,
        }
    }
}

/// Relative error floor below which an order estimate is not attempted.
pub const RESOLUTION_FLOOR: f64 = 1e-9;

/// Solves level `level` on `base` and `halvings` successively refined grids
/// and estimates the convergence order of the eigenvalue.
///
/// With a `reference`, errors are `|E_h − reference|`; without one they are
/// the successive differences `|E_h − E_{h/2}|`, which need one extra grid.
pub fn convergence_study(
    potential: &Potential,
    ell: u32,
    dim: u32,
    base: &OracleConfig,
    halvings: usize,
    level: usize,
    reference: Option<f64>,
) -> Result<ConvergenceReport> {
    let needed = if reference.is_some() { 1 } else { 2 };
    if halvings < needed + 1 {
        return Err(domain(format!(
            "convergence study needs at least {} halvings",
            needed + 1
        )));
    }
    let mut configs = vec![OracleConfig {
        count: level + 1,
        ..*base
    }];
    for _ in 0..halvings {
        configs.push(configs.last().unwrap().refined());
    }
    let solved: Vec<f64> = configs
        .iter()
        .map(|c| eigen_lowest(potential, ell, dim, c).map(|e| e[level]))
        .collect::<Result<_>>()?;
    let spacings: Vec<f64> = configs.iter().map(|c| c.grid.spacing()).collect();

    let errors: Vec<f64> = match reference {
        Some(r) => solved.iter().map(|e| (e - r).abs()).collect(),
        None => solved.windows(2).map(|w| (w[0] - w[1]).abs()).collect(),
    };
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let scale = solved.last().unwrap().abs().max(1.0);
    let status = if errors.iter().any(|&e| e < RESOLUTION_FLOOR * scale) {
        ConvergenceStatus::AtFloor
    } else if errors.windows(2).any(|w| w[1] >= w[0]) {
        ConvergenceStatus::NonMonotone
    } else {
        ConvergenceStatus::Estimated
    };
    Ok(ConvergenceReport {
        level,
        spacings,
        energies: solved,
        reference,
        errors,
        orders,
        status,
    })
}
