//! SU(1,1) ladder structure of the radial levels.
//!
//! Two pictures are provided. The abstract one works with the coefficients
//! `λ₋(n)`, `λ₊(n)`, `λ₀(n) = 2n + 2k − N + 3` and checks commutators and the
//! Casimir on a truncated basis `{R_0, …, R_{n_max}}`. The differential one
//! applies
//!
//! ```text
//! L₋ = −y d/dy − y/2 + k + n + 2 − N
//! L₊ =  y d/dy − y/2 + n + k + 1
//! ```
//!
//! to sampled `R_n(y)` and fits the result against `R_{n∓1}(y)`. The `n` in
//! both operators is read from the basis index (a number operator).

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::special_fn::{
    laguerre_derivative_unchecked, laguerre_unchecked, ln_factorial, ln_gamma_pos,
};
use crate::spectrum::BoundState;
use crate::wavefunction::{ln_eta, y_extent, RadialGrid, SampledFunction};

fn radicand_sqrt(value: f64, what: &str, n: u32, k: f64, dim: u32) -> Result<f64> {
    if value >= 0.0 && value.is_finite() {
        Ok(value.sqrt())
    } else {
        Err(Error::AlgebraViolation(format!(
            "{what} radicand {value} at n = {n}, k = {k}, N = {dim}"
        )))
    }
}

/// `λ₋ = √( n (n+2k+2−N) (2n+1+2k−N) / (2n+2k+3−N) )`.
pub fn lambda_minus(n: u32, k: f64, dim: u32) -> Result<f64> {
    let (nf, d) = (f64::from(n), f64::from(dim));
    if n == 0 {
        return Ok(0.0);
    }
    let radicand = nf * (nf + 2.0 * k + 2.0 - d) * (2.0 * nf + 1.0 + 2.0 * k - d)
        / (2.0 * nf + 2.0 * k + 3.0 - d);
    radicand_sqrt(radicand, "lambda_minus", n, k, dim)
}

/// `λ₊ = √( (n+1) (n+2k+3−N) (2n+2k+5−N) / (2n+2k+3−N) )`.
pub fn lambda_plus(n: u32, k: f64, dim: u32) -> Result<f64> {
    let (nf, d) = (f64::from(n), f64::from(dim));
    let radicand = (nf + 1.0) * (nf + 2.0 * k + 3.0 - d) * (2.0 * nf + 2.0 * k + 5.0 - d)
        / (2.0 * nf + 2.0 * k + 3.0 - d);
    radicand_sqrt(radicand, "lambda_plus", n, k, dim)
}

/// `λ₀ = 2n + 2k − N + 3`.
pub fn lambda_zero(n: u32, k: f64, dim: u32) -> f64 {
    2.0 * f64::from(n) + 2.0 * k - f64::from(dim) + 3.0
}

/// Bargmann index `J = k + (3 − N)/2`.
pub fn bargmann_index(k: f64, dim: u32) -> f64 {
    k + 0.5 * (3.0 - f64::from(dim))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderCoeffs {
    pub k: f64,
    pub dim: u32,
    pub n: u32,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    pub lambda_zero: f64,
    #[serde(rename = "J")]
    pub j: f64,
}

impl LadderCoeffs {
    pub fn new(n: u32, k: f64, dim: u32) -> Result<Self> {
        check_gate(k, dim)?;
        Ok(Self {
            k,
            dim,
            n,
            lambda_minus: lambda_minus(n, k, dim)?,
            lambda_plus: lambda_plus(n, k, dim)?,
            lambda_zero: lambda_zero(n, k, dim),
            j: bargmann_index(k, dim),
        })
    }
}

fn check_gate(k: f64, dim: u32) -> Result<()> {
    let gate = 2.0 * k + 3.0 - f64::from(dim);
    if gate > 0.0 {
        Ok(())
    } else {
        Err(Error::NotNormalizable { value: gate })
    }
}

/// Truncated-basis matrices of `L₋`, `L₊`, `L₀` on `{R_0, …, R_{n_max}}`.
#[derive(Debug, Clone)]
pub struct LadderMatrices {
    pub lower: DMatrix<f64>,
    pub raise: DMatrix<f64>,
    pub number: DMatrix<f64>,
}

impl LadderMatrices {
    pub fn new(k: f64, dim: u32, n_max: u32) -> Result<Self> {
        check_gate(k, dim)?;
        let size = n_max as usize + 1;
        let mut lower = DMatrix::zeros(size, size);
        let mut raise = DMatrix::zeros(size, size);
        let j = bargmann_index(k, dim);
        let number = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(size, |n, _| n as f64 + j));
        for n in 0..size {
            if n >= 1 {
                lower[(n - 1, n)] = lambda_minus(n as u32, k, dim)?;
            }
            if n + 1 < size {
                raise[(n + 1, n)] = lambda_plus(n as u32, k, dim)?;
            }
        }
        Ok(Self {
            lower,
            raise,
            number,
        })
    }
}

fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

/// Largest entry of `|m|` over rows and columns `< limit`.
fn leading_max(m: &DMatrix<f64>, limit: usize) -> f64 {
    m.view((0, 0), (limit, limit)).abs().max()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutatorRow {
    pub n: u32,
    /// `λ₊(n) λ₋(n+1) − λ₋(n) λ₊(n−1)`.
    pub bracket: f64,
    pub lambda_zero: f64,
    pub relative_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutatorReport {
    pub k: f64,
    pub dim: u32,
    pub n_max: u32,
    pub rows: Vec<CommutatorRow>,
    /// Interior-block residuals of `[L₋,L₊] − 2L₀`, `[L₀,L₊] − L₊`,
    /// `[L₋,L₀] − L₋`, `[L₀,L_a] − L_s`, `[L₀,L_s] − L_a`.
    pub matrix_residuals: [f64; 5],
    pub max_residual: f64,
}

/// Checks `λ₊(n)λ₋(n+1) − λ₋(n)λ₊(n−1) = λ₀(n)` for every `n ≤ n_max` and
/// the SU(1,1) matrix identities on indices `≤ n_max − 1`.
pub fn commutator_check(k: f64, dim: u32, n_max: u32) -> Result<CommutatorReport> {
    if n_max < 2 {
        return Err(crate::error::domain("commutator check needs n_max >= 2"));
    }
    check_gate(k, dim)?;
    let rows = (0..=n_max)
        .map(|n| {
            let down = if n == 0 {
                0.0
            } else {
                lambda_minus(n, k, dim)? * lambda_plus(n - 1, k, dim)?
            };
            let bracket = lambda_plus(n, k, dim)? * lambda_minus(n + 1, k, dim)? - down;
            let l0 = lambda_zero(n, k, dim);
            Ok(CommutatorRow {
                n,
                bracket,
                lambda_zero: l0,
                relative_residual: (bracket - l0).abs() / l0.abs().max(1.0),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let m = LadderMatrices::new(k, dim, n_max)?;
    let limit = n_max as usize;
    let sym = &m.raise + &m.lower;
    let anti = &m.raise - &m.lower;
    let scale = m.number.abs().max().max(1.0);
    let matrix_residuals = [
        leading_max(&(commutator(&m.lower, &m.raise) - 2.0 * &m.number), limit),
        leading_max(&(commutator(&m.number, &m.raise) - &m.raise), limit),
        leading_max(&(commutator(&m.lower, &m.number) - &m.lower), limit),
        leading_max(&(commutator(&m.number, &sym) - &anti), limit),
        leading_max(&(commutator(&m.number, &anti) - &sym), limit),
    ]
    .map(|r| r / scale);
    let max_residual = rows
        .iter()
        .map(|r| r.relative_residual)
        .chain(matrix_residuals)
        .fold(0.0, f64::max);
    Ok(CommutatorReport {
        k,
        dim,
        n_max,
        rows,
        matrix_residuals,
        max_residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CasimirRow {
    pub n: u32,
    /// `L₀(L₀−1) − L₊L₋` on `R_n`.
    pub lowering_form: f64,
    /// `L₀(L₀+1) − L₋L₊` on `R_n`; absent for the top basis state.
    pub raising_form: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CasimirReport {
    pub k: f64,
    pub dim: u32,
    #[serde(rename = "J")]
    pub j: f64,
    /// `J(J − 1)`.
    pub expected: f64,
    pub rows: Vec<CasimirRow>,
    pub max_residual: f64,
    /// Largest off-diagonal entry of the Casimir matrix (interior block).
    pub off_diagonal: f64,
}

/// Evaluates both orderings of the Casimir on the truncated basis and
/// compares them with `J(J−1)`.
pub fn casimir_check(k: f64, dim: u32, n_max: u32) -> Result<CasimirReport> {
    if n_max < 1 {
        return Err(crate::error::domain("Casimir check needs n_max >= 1"));
    }
    let m = LadderMatrices::new(k, dim, n_max)?;
    let size = n_max as usize + 1;
    let id = DMatrix::<f64>::identity(size, size);
    let first = &m.number * (&m.number - &id) - &m.raise * &m.lower;
    let second = &m.number * (&m.number + &id) - &m.lower * &m.raise;
    let j = bargmann_index(k, dim);
    let expected = j * (j - 1.0);
    let scale = expected.abs().max(1.0);

    let rows: Vec<CasimirRow> = (0..size)
        .map(|n| CasimirRow {
            n: n as u32,
            lowering_form: first[(n, n)],
            raising_form: (n + 1 < size).then(|| second[(n, n)]),
        })
        .collect();
    let max_residual = rows
        .iter()
        .flat_map(|r| std::iter::once(r.lowering_form).chain(r.raising_form))
        .map(|v| (v - expected).abs() / scale)
        .fold(0.0, f64::max);
    let mut off = first.clone();
    off.fill_diagonal(0.0);
    let off_diagonal = off.abs().max() / scale;
    Ok(CasimirReport {
        k,
        dim,
        j,
        expected,
        rows,
        max_residual,
        off_diagonal,
    })
}

/// Normalization of `R_n(y) = c_n y^s e^{−y/2} L_n^α(y)` used when fitting
/// the differential operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LadderNormalization {
    /// `c_n = η_n`, inherited from the r-space normalization of each state.
    Eta,
    /// Unit norm under `y^{N−1} dy`.
    Radial,
    /// Unit norm under `y^{N−2} dy` (the Laguerre weight `y^α e^{−y}`).
    Laguerre,
}

impl LadderNormalization {
    pub const ALL: [LadderNormalization; 3] = [Self::Eta, Self::Radial, Self::Laguerre];

    fn ln_prefactor(self, state: &BoundState) -> f64 {
        let n = state.q.n;
        let a = state.alpha;
        let base = ln_factorial(n) - ln_gamma_pos(f64::from(n) + a + 1.0);
        match self {
            Self::Eta => ln_eta(state),
            Self::Radial => 0.5 * (base - (2.0 * f64::from(n) + a + 1.0).ln()),
            Self::Laguerre => 0.5 * base,
        }
    }
}

fn envelope(ln_prefactor: f64, power: f64, y: f64) -> f64 {
    (ln_prefactor + power * y.ln() - 0.5 * y).exp()
}

/// `R_n(y)` and `dR_n/dy`, the derivative taken analytically.
fn value_and_slope(state: &BoundState, norm: LadderNormalization, y: f64) -> (f64, f64) {
    let n = state.q.n;
    let s = state.power();
    let env = envelope(norm.ln_prefactor(state), s, y);
    let l = laguerre_unchecked(n, state.alpha, y);
    let dl = laguerre_derivative_unchecked(n, state.alpha, y);
    (env * l, env * ((s / y - 0.5) * l + dl))
}

fn sample_y(state: &BoundState, norm: LadderNormalization, grid: &RadialGrid) -> Vec<f64> {
    let ln_pre = norm.ln_prefactor(state);
    par::map_range(grid.count, |i| {
        let y = grid.point(i);
        envelope(ln_pre, state.power(), y) * laguerre_unchecked(state.q.n, state.alpha, y)
    })
}

/// Least-squares constant `c` with `f ≈ c g` and the relative residual
/// `max|f − c g| / max|f|`.
pub fn fit_proportional(f: &[f64], g: &[f64]) -> (f64, f64) {
    let fg: f64 = f.iter().zip(g).map(|(a, b)| a * b).sum();
    let gg: f64 = g.iter().map(|b| b * b).sum();
    let c = if gg > 0.0 { fg / gg } else { 0.0 };
    let fmax = f.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let rmax = f
        .iter()
        .zip(g)
        .fold(0.0_f64, |m, (a, b)| m.max((a - c * b).abs()));
    (c, if fmax > 0.0 { rmax / fmax } else { 0.0 })
}

/// Result of applying a ladder operator to a sampled eigenfunction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderFit {
    pub n: u32,
    pub normalization: LadderNormalization,
    /// Index of the state the result is fitted against, if any.
    pub target: Option<u32>,
    pub applied: SampledFunction,
    pub fitted: f64,
    /// Post-fit relative residual. For `L₋ R_0` it is `max|L₋R_0| / max|R_0|`.
    pub residual: f64,
    /// Constant implied by the Laguerre recurrence for this normalization.
    pub derived: f64,
    /// Closed-form `λ₋` or `λ₊`.
    pub lambda: f64,
    /// Lowering only: `(n + k + 2 − N) c_n / c_{n−1}`, the coefficient as it
    /// appears when the recurrence is written with `k` in place of `α`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub printed: Option<f64>,
}

fn check_y_grid(grid: &RadialGrid) -> Result<()> {
    grid.validate()?;
    // Same criterion as the residual check, with ε = 1/2 in y units.
    let res = 0.25 * grid.spacing().powi(2);
    if res > 0.1 {
        return Err(Error::Resolution(res));
    }
    Ok(())
}

/// Applies `L₋ = −y d/dy − y/2 + k + n + 2 − N` to `R_n(y)`.
pub fn apply_minus_differential(
    state: &BoundState,
    grid_y: &RadialGrid,
    norm: LadderNormalization,
) -> Result<LadderFit> {
    check_y_grid(grid_y)?;
    let n = state.q.n;
    let shift = state.k + f64::from(n) + 2.0 - f64::from(state.q.dim);
    let applied: Vec<f64> = par::map_range(grid_y.count, |i| {
        let y = grid_y.point(i);
        let (r, dr) = value_and_slope(state, norm, y);
        -y * dr - 0.5 * y * r + shift * r
    });
    let lambda = lambda_minus(n, state.k, state.q.dim)?;
    let applied_fn = SampledFunction::new(*grid_y, applied)?;
    if n == 0 {
        let base = sample_y(state, norm, grid_y);
        let scale = base.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        return Ok(LadderFit {
            n,
            normalization: norm,
            target: None,
            residual: applied_fn.max_abs() / scale,
            applied: applied_fn,
            fitted: 0.0,
            derived: 0.0,
            lambda,
            printed: None,
        });
    }
    let below = state.with_n(n - 1)?;
    let target = sample_y(&below, norm, grid_y);
    let (fitted, residual) = fit_proportional(&applied_fn.values, &target);
    let ratio = (norm.ln_prefactor(state) - norm.ln_prefactor(&below)).exp();
    let derived = (f64::from(n) + state.alpha) * ratio;
    Ok(LadderFit {
        n,
        normalization: norm,
        target: Some(n - 1),
        applied: applied_fn,
        fitted,
        residual,
        derived,
        lambda,
        printed: Some(shift * ratio),
    })
}

/// Applies `L₊ = y d/dy − y/2 + n + k + 1` to `R_n(y)`.
pub fn apply_plus_differential(
    state: &BoundState,
    grid_y: &RadialGrid,
    norm: LadderNormalization,
) -> Result<LadderFit> {
    check_y_grid(grid_y)?;
    let n = state.q.n;
    let shift = f64::from(n) + state.k + 1.0;
    let applied: Vec<f64> = par::map_range(grid_y.count, |i| {
        let y = grid_y.point(i);
        let (r, dr) = value_and_slope(state, norm, y);
        y * dr - 0.5 * y * r + shift * r
    });
    let above = state.with_n(n + 1)?;
    let target = sample_y(&above, norm, grid_y);
    let (fitted, residual) = fit_proportional(&applied, &target);
    let derived =
        (f64::from(n) + 1.0) * (norm.ln_prefactor(state) - norm.ln_prefactor(&above)).exp();
    Ok(LadderFit {
        n,
        normalization: norm,
        target: Some(n + 1),
        applied: SampledFunction::new(*grid_y, applied)?,
        fitted,
        residual,
        derived,
        lambda: lambda_plus(n, state.k, state.q.dim)?,
        printed: None,
    })
}

/// `L₋ L₊ R_n`: the raised function is differentiated numerically
/// (fourth-order central differences) and lowered with the index `n + 1`.
/// Returns the constant and residual of the fit against `R_n` on the
/// interior nodes.
pub fn apply_plus_then_minus(
    state: &BoundState,
    grid_y: &RadialGrid,
    norm: LadderNormalization,
) -> Result<(f64, f64)> {
    let raised = apply_plus_differential(state, grid_y, norm)?;
    let g = &raised.applied.values;
    let h = grid_y.spacing();
    let shift = state.k + f64::from(state.q.n + 1) + 2.0 - f64::from(state.q.dim);
    let lowered: Vec<f64> = (2..grid_y.count - 2)
        .map(|i| {
            let y = grid_y.point(i);
            let d1 = (-g[i + 2] + 8.0 * g[i + 1] - 8.0 * g[i - 1] + g[i - 2]) / (12.0 * h);
            -y * d1 - 0.5 * y * g[i] + shift * g[i]
        })
        .collect();
    let base = sample_y(state, norm, grid_y);
    Ok(fit_proportional(&lowered, &base[2..grid_y.count - 2]))
}

/// y-grid covering every level up to `n_max + 1` of a channel.
pub fn default_y_grid(n_max: u32, alpha: f64) -> RadialGrid {
    RadialGrid {
        r_min: 0.01,
        r_max: y_extent(n_max + 1, alpha),
        count: 4001,
    }
}
