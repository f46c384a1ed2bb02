//! Finite-difference oracle for the hyperradial equation.
//!
//! The radial problem on a bounded box is discretized with a three-point
//! stencil into a symmetric tridiagonal matrix whose lowest eigenvalues are
//! found by Sturm bisection. Nothing here uses the closed-form spectrum, so
//! agreement with it is an independent check.

mod convergence;
mod tridiag;

pub use convergence::{convergence_study, ConvergenceReport, ConvergenceStatus};
pub use tridiag::Tridiagonal;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::potential::Potential;
use crate::spectrum::{epsilon, k_ell_n, QuantumNumbers};
use crate::wavefunction::{y_extent, RadialGrid};

/// How the radial kinetic operator is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Discretization {
    /// Flux form `−(ħ²/2M) r^{1−N} (r^{N−1} R')'` on cell centres, made
    /// symmetric by the `r^{(N−1)/2}` similarity transform. Handles the
    /// critical `−1/(4r²)` barrier of N = 2, ℓ = 0 at second order.
    #[default]
    Conservative,
    /// `u = r^{(N−1)/2} R` with `−(ħ²/2M) u'' + V_eff u` and Dirichlet ghost
    /// nodes one step outside the grid. Loses accuracy when `V_eff` has the
    /// critical inverse-square coefficient.
    Liouville,
}

/// Grid, eigenvalue count and bisection tolerance for one oracle solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub grid: RadialGrid,
    /// Number of lowest eigenvalues requested.
    pub count: usize,
    /// Absolute bisection tolerance.
    pub tolerance: f64,
    #[serde(default)]
    pub discretization: Discretization,
}

/// Default bisection tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-13;

/// Default number of cells on `(0, r_outer]`.
pub const DEFAULT_CELLS: usize = 40_000;

/// Coarsest grid of a convergence study. Two halvings from here keep the
/// eigenvalue errors well above the bisection rounding floor, which the
/// default grid does not.
pub const STUDY_CELLS: usize = 5_000;

impl OracleConfig {
    pub fn new(grid: RadialGrid, count: usize, tolerance: f64) -> Result<Self> {
        let c = Self {
            grid,
            count,
            tolerance,
            discretization: Discretization::default(),
        };
        c.validate()?;
        Ok(c)
    }

    /// `cells` cells of width `h = r_outer / cells` with nodes at the cell
    /// centres, so the innermost face sits at the origin.
    pub fn cell_centered(r_outer: f64, cells: usize, count: usize) -> Result<Self> {
        if !(r_outer > 0.0) || cells < 3 {
            return Err(domain(format!(
                "cell-centred grid needs r_outer > 0 and >= 3 cells (got {r_outer}, {cells})"
            )));
        }
        let h = r_outer / cells as f64;
        let grid = RadialGrid::new(0.5 * h, r_outer - 0.5 * h, cells)?;
        Self::new(grid, count, DEFAULT_TOLERANCE)
    }

    pub fn with_discretization(mut self, discretization: Discretization) -> Self {
        self.discretization = discretization;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.count == 0 || self.count > self.grid.count {
            return Err(domain(format!(
                "requested {} eigenvalues on a {}-node grid",
                self.count, self.grid.count
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(domain("bisection tolerance must be positive"));
        }
        Ok(())
    }

    /// Same cell edges with every cell split in two.
    pub fn refined(&self) -> Self {
        let h = self.grid.spacing();
        let lo = self.grid.r_min - 0.5 * h;
        let hi = self.grid.r_max + 0.5 * h;
        let h2 = 0.5 * h;
        Self {
            grid: RadialGrid {
                r_min: lo + 0.5 * h2,
                r_max: hi - 0.5 * h2,
                count: 2 * self.grid.count,
            },
            ..*self
        }
    }
}

/// Box size and grid for a closed-form channel: the outer wall sits where
/// the most extended requested level (`n_max`) has decayed far below
/// discretization error.
pub fn default_config(
    potential: &Potential,
    ell: u32,
    dim: u32,
    n_max: u32,
    cells: usize,
) -> Result<OracleConfig> {
    let params = potential
        .as_mie()
        .ok_or_else(|| domain("default box sizing needs closed-form parameters"))?;
    let k = k_ell_n(params, ell, dim)?;
    let eps_min = epsilon(params, QuantumNumbers::new(n_max, ell, dim))?;
    let alpha = 2.0 * k + 2.0 - f64::from(dim);
    let r_outer = y_extent(n_max, alpha) / (2.0 * eps_min);
    OracleConfig::cell_centered(r_outer, cells, n_max as usize + 1)
}

/// Box for any potential. Closed-form channels use [`default_config`];
/// otherwise the box grows until the most weakly bound requested level has
/// decayed as far as the closed-form sizing would require.
pub fn adaptive_config(
    potential: &Potential,
    ell: u32,
    dim: u32,
    n_max: u32,
    cells: usize,
) -> Result<OracleConfig> {
    if potential.as_mie().is_some() {
        return default_config(potential, ell, dim, n_max, cells);
    }
    let scale = match potential {
        Potential::General { preset, .. } => preset.r0,
        Potential::Mie(_) => 1.0,
    };
    let limit = 1e4 * scale;
    let mut r_outer = 20.0 * scale;
    loop {
        let config = OracleConfig::cell_centered(r_outer, cells, n_max as usize + 1)?;
        let bound = solve_bound_states(potential, ell, dim, &config)?;
        let Some(&top) = bound.last() else {
            return Ok(config);
        };
        let kappa =
            (2.0 * potential.mass() * (potential.threshold() - top)).sqrt() / potential.hbar();
        let needed = (scale + y_extent(n_max, 0.0) / (2.0 * kappa)).min(limit);
        if needed <= 1.05 * r_outer {
            return Ok(config);
        }
        r_outer = needed;
    }
}

fn check_dim(dim: u32) -> Result<()> {
    if dim >= 2 {
        Ok(())
    } else {
        Err(crate::Error::InvalidDimension(dim))
    }
}

/// `V(r) + (ħ²/2M) [ℓ(ℓ+N−2) + (N−1)(N−3)/4] / r²`, the potential seen by
/// `u = r^{(N−1)/2} R`.
pub fn effective_potential(potential: &Potential, ell: u32, dim: u32, r: f64) -> Result<f64> {
    check_dim(dim)?;
    potential.validate()?;
    let v = potential.eval(r)?;
    Ok(v + centrifugal(potential, ell, dim, true) / (r * r))
}

/// Coefficient of 1/r² added to V; with `liouville` it includes the
/// `(N−1)(N−3)/4` term produced by the u-substitution.
fn centrifugal(potential: &Potential, ell: u32, dim: u32, liouville: bool) -> f64 {
    let l = f64::from(ell);
    let n = f64::from(dim);
    let mut c = l * (l + n - 2.0);
    if liouville {
        c += (n - 1.0) * (n - 3.0) / 4.0;
    }
    potential.hbar().powi(2) / (2.0 * potential.mass()) * c
}

/// Symmetric tridiagonal discretization of the radial Hamiltonian.
pub fn build_tridiagonal(
    config: &OracleConfig,
    potential: &Potential,
    ell: u32,
    dim: u32,
) -> Result<Tridiagonal> {
    config.validate()?;
    check_dim(dim)?;
    potential.validate()?;
    let grid = config.grid;
    let h = grid.spacing();
    let m = grid.count;
    let kinetic = potential.hbar().powi(2) / (2.0 * potential.mass());
    let points = grid.points();

    let (diag, off) = match config.discretization {
        Discretization::Liouville => {
            let barrier = centrifugal(potential, ell, dim, true);
            let diag = points
                .iter()
                .map(|&r| 2.0 * kinetic / (h * h) + potential.value(r) + barrier / (r * r))
                .collect();
            (diag, vec![-kinetic / (h * h); m - 1])
        }
        Discretization::Conservative => {
            let barrier = centrifugal(potential, ell, dim, false);
            let power = f64::from(dim) - 1.0;
            let diag = points
                .iter()
                .map(|&r| {
                    let inner = (r - 0.5 * h).max(0.0);
                    let outer = r + 0.5 * h;
                    let flux = (outer / r).powf(power) + (inner / r).powf(power);
                    kinetic * flux / (h * h) + potential.value(r) + barrier / (r * r)
                })
                .collect();
            let off = points
                .windows(2)
                .map(|w| {
                    let face = 0.5 * (w[0] + w[1]);
                    let ratio = face * face / (w[0] * w[1]);
                    -kinetic * ratio.powf(0.5 * power) / (h * h)
                })
                .collect();
            (diag, off)
        }
    };
    Tridiagonal::new(diag, off)
}

/// Lowest `config.count` eigenvalues that are bound: below the threshold
/// of the potential and below `V_eff` at the outer wall.
pub fn solve_bound_states(
    potential: &Potential,
    ell: u32,
    dim: u32,
    config: &OracleConfig,
) -> Result<Vec<f64>> {
    let eigen = eigen_lowest(potential, ell, dim, config)?;
    let cutoff =
        potential
            .threshold()
            .min(effective_potential(potential, ell, dim, config.grid.r_max)?);
    Ok(eigen.into_iter().filter(|&e| e < cutoff).collect())
}

/// Lowest `config.count` eigenvalues without the bound-state filter.
pub fn eigen_lowest(
    potential: &Potential,
    ell: u32,
    dim: u32,
    config: &OracleConfig,
) -> Result<Vec<f64>> {
    let t = build_tridiagonal(config, potential, ell, dim)?;
    t.eigen_lowest(config.count, config.tolerance)
}

/// Number of discrete eigenvalues below the threshold of the potential.
pub fn bound_state_census(
    potential: &Potential,
    ell: u32,
    dim: u32,
    config: &OracleConfig,
) -> Result<usize> {
    let t = build_tridiagonal(config, potential, ell, dim)?;
    Ok(t.sturm_count(potential.threshold()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{coulomb, kratzer_fues, MiePreset, PotentialParams};
    use crate::spectrum::energy;

    fn free() -> Potential {
        Potential::Mie(PotentialParams::new(0.0, 0.0, 0.0, 1.0, 1.0).unwrap())
    }

    #[test]
    fn adaptive_box_for_general_mie() {
        let pot = Potential::General {
            preset: MiePreset::new(5.0, 1.0, 4.0, 2.0).unwrap(),
            mass: 1.0,
            hbar: 1.0,
        };
        let config = adaptive_config(&pot, 0, 3, 3, 4000).unwrap();
        assert!(config.grid.r_max >= 20.0 - config.grid.spacing());
        let bound = solve_bound_states(&pot, 0, 3, &config).unwrap();
        assert!(!bound.is_empty());
        assert!(bound[0] > -5.0 && bound[0] < 0.0);
    }

    #[test]
    fn effective_potential_examples() {
        assert_eq!(effective_potential(&free(), 0, 3, 0.7).unwrap(), 0.0);
        // (N−1)(N−3)/4 = 2 at N = 5, times ħ²/2M = 1/2.
        assert_eq!(effective_potential(&free(), 0, 5, 1.0).unwrap(), 1.0);
        assert!(effective_potential(&free(), 0, 3, 0.0).is_err());
        assert!(effective_potential(&free(), 0, 1, 1.0).is_err());
    }

    #[test]
    fn liouville_stencil_entries() {
        let grid = RadialGrid::new(1.0, 3.0, 3).unwrap();
        let config = OracleConfig::new(grid, 1, 1e-12)
            .unwrap()
            .with_discretization(Discretization::Liouville);
        let t = build_tridiagonal(&config, &free(), 0, 3).unwrap();
        assert_eq!(t.diag(), &[1.0, 1.0, 1.0]);
        assert_eq!(t.offdiag(), &[-0.5, -0.5]);

        let t = build_tridiagonal(&config, &free(), 1, 3).unwrap();
        let expected: Vec<f64> = [1.0f64, 2.0, 3.0]
            .iter()
            .map(|r| 1.0 + 1.0 / (r * r))
            .collect();
        assert_eq!(t.diag(), expected.as_slice());
    }

    #[test]
    fn particle_in_box_limit() {
        // Free N = 3, ℓ = 0: u'' = −2E u on (0, L), E_j = (jπ)²/(2L²). The
        // outer Dirichlet node is the ghost cell centre, half a cell past r_outer.
        let cells = 20_000;
        let config = OracleConfig::cell_centered(2.0, cells, 3).unwrap();
        let length = 2.0 * (1.0 + 0.5 / cells as f64);
        let ev = eigen_lowest(&free(), 0, 3, &config).unwrap();
        for (j, e) in ev.iter().enumerate() {
            let exact = ((j + 1) as f64 * std::f64::consts::PI).powi(2) / (2.0 * length * length);
            assert!((e - exact).abs() / exact < 1e-6, "{e} vs {exact}");
        }
    }

    #[test]
    fn hydrogen_ground_state() {
        let h = Potential::Mie(coulomb(-1.0, 1.0, 1.0));
        let config = OracleConfig::cell_centered(60.0, 6000, 1).unwrap();
        let e = solve_bound_states(&h, 0, 3, &config).unwrap();
        assert!((e[0] + 0.5).abs() < 5e-5, "{}", e[0]);
    }

    #[test]
    fn kratzer_fues_ground_state() {
        let p = kratzer_fues(5.0, 1.0, 1.0, 1.0).unwrap();
        let pot = Potential::Mie(p);
        let config = default_config(&pot, 0, 3, 0, DEFAULT_CELLS).unwrap();
        let e = solve_bound_states(&pot, 0, 3, &config).unwrap();
        let exact = energy(&p, QuantumNumbers::new(0, 0, 3)).unwrap();
        assert!((e[0] - exact).abs() < 5e-5);
        assert!((e[0] + 3.6492).abs() < 1e-4);
    }

    #[test]
    fn general_mie_two_one_matches_kratzer_fues() {
        let p = kratzer_fues(5.0, 1.0, 1.0, 1.0).unwrap();
        let closed = Potential::Mie(p);
        let general = Potential::General {
            preset: MiePreset::new(5.0, 1.0, 2.0, 1.0).unwrap(),
            mass: 1.0,
            hbar: 1.0,
        };
        let config = default_config(&closed, 1, 3, 2, 8000).unwrap();
        let a = solve_bound_states(&closed, 1, 3, &config).unwrap();
        let b = solve_bound_states(&general, 1, 3, &config).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn liouville_misses_critical_barrier() {
        // N = 2, ℓ = 0 Coulomb: exact E₀ = −2.
        let pot = Potential::Mie(coulomb(-1.0, 1.0, 1.0));
        let config = default_config(&pot, 0, 2, 0, 20_000).unwrap();
        let cons = eigen_lowest(&pot, 0, 2, &config).unwrap()[0];
        let liou = eigen_lowest(
            &pot,
            0,
            2,
            &config.with_discretization(Discretization::Liouville),
        )
        .unwrap()[0];
        assert!((cons + 2.0).abs() < 1e-4);
        assert!((liou + 2.0).abs() > 1e-2);
    }

    #[test]
    fn census_counts_levels() {
        let pot = Potential::Mie(coulomb(-1.0, 1.0, 1.0));
        let config = default_config(&pot, 0, 3, 3, 8000).unwrap();
        assert!(bound_state_census(&pot, 0, 3, &config).unwrap() >= 4);
    }

    #[test]
    fn refined_keeps_cell_edges() {
        let c = OracleConfig::cell_centered(10.0, 100, 2).unwrap();
        let r = c.refined();
        assert_eq!(r.grid.count, 200);
        assert!((r.grid.spacing() - 0.05).abs() < 1e-15);
        assert!((r.grid.r_min - 0.025).abs() < 1e-15);
        assert!((r.grid.r_max - 9.975).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        let grid = RadialGrid::new(0.1, 1.0, 10).unwrap();
        assert!(OracleConfig::new(grid, 11, 1e-12).is_err());
        assert!(OracleConfig::new(grid, 0, 1e-12).is_err());
        assert!(OracleConfig::new(grid, 2, 0.0).is_err());
        assert!(OracleConfig::cell_centered(-1.0, 10, 1).is_err());
    }
}
