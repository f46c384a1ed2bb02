//! Normalized radial eigenfunctions and their checks.
//!
//! For a bound state with `s = k + 2 − N`, `α = 2k + 2 − N` and `y = 2εr`,
//!
//! ```text
//! R(r) = ζ r^s e^{−εr} ₁F₁(−n; α+1; 2εr) = η y^s e^{−y/2} L_n^α(y)
//! ζ    = (2ε)^{(α+2)/2} / Γ(α+1) · √( Γ(n+α+1) / (n! (2n+α+1)) )
//! ```
//!
//! Evaluation runs in log space: `r^s e^{−εr}` spans hundreds of decades for
//! large k or ε.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::par;
use crate::special_fn::{
    default_quadrature_order, gauss_laguerre, kummer_poly_unchecked, laguerre_unchecked,
    ln_factorial, ln_gamma_pos,
};
use crate::spectrum::BoundState;

/// Uniform grid on `[r_min, r_max]` with `count ≥ 3` nodes, `r_min > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub count: usize,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, count: usize) -> Result<Self> {
        let g = Self {
            r_min,
            r_max,
            count,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0) || !self.r_max.is_finite() {
            return Err(domain(format!(
                "grid needs 0 < r_min, got r_min = {}",
                self.r_min
            )));
        }
        if !(self.r_max > self.r_min) {
            return Err(domain(format!(
                "grid needs r_max > r_min ({} <= {})",
                self.r_max, self.r_min
            )));
        }
        if self.count < 3 {
            return Err(domain(format!(
                "grid needs at least 3 nodes, got {}",
                self.count
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.r_max - self.r_min) / (self.count - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.r_max
        } else {
            self.r_min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }

    /// Sub-grid without `trim` nodes at each end.
    fn interior(&self, trim: usize) -> Result<Self> {
        Self::new(
            self.point(trim),
            self.point(self.count - 1 - trim),
            self.count - 2 * trim,
        )
    }
}

/// Samples of a function on a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledFunction {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.count {
            return Err(domain(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.count
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Number of strict sign changes, skipping exact zeros.
    pub fn sign_changes(&self) -> usize {
        count_sign_changes(&self.values)
    }
}

pub(crate) fn count_sign_changes(values: &[f64]) -> usize {
    let mut last = 0.0;
    let mut changes = 0;
    for &v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = v;
    }
    changes
}

/// Denominator used in the normalization constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormConvention {
    /// `(2n + α + 1)`, which follows from `∫ x^{α+1} e^{−x} (L_n^α)² dx`.
    Linear,
    /// `Γ(2n + α + 2)`, i.e. `(2k + 2n + 3 − N)!` taken literally. Kept as a
    /// diagnostic; it does not normalize the states.
    Factorial,
}

/// ln ζ for radial number `n`, Laguerre parameter `alpha`, decay `eps`.
pub fn ln_norm_constant(n: u32, alpha: f64, eps: f64) -> f64 {
    ln_norm_constant_with(n, alpha, eps, NormConvention::Linear)
}

pub fn ln_norm_constant_with(n: u32, alpha: f64, eps: f64, convention: NormConvention) -> f64 {
    let nf = f64::from(n);
    let last = match convention {
        NormConvention::Linear => (2.0 * nf + alpha + 1.0).ln(),
        NormConvention::Factorial => ln_gamma_pos(2.0 * nf + alpha + 2.0),
    };
    0.5 * (alpha + 2.0) * (2.0 * eps).ln() - ln_gamma_pos(alpha + 1.0)
        + 0.5 * (ln_gamma_pos(nf + alpha + 1.0) - ln_factorial(n) - last)
}

/// Normalization constant ζ of `state`.
pub fn norm_constant(state: &BoundState) -> f64 {
    state.zeta
}

/// ln of `n! Γ(α+1) / Γ(n+α+1)`, the factor turning `L_n^α` into `₁F₁`.
fn ln_kummer_to_laguerre(n: u32, alpha: f64) -> f64 {
    ln_factorial(n) + ln_gamma_pos(alpha + 1.0) - ln_gamma_pos(f64::from(n) + alpha + 1.0)
}

/// ln η, the prefactor of the y-form `η y^s e^{−y/2} L_n^α(y)`.
pub fn ln_eta(state: &BoundState) -> f64 {
    state.ln_zeta - state.power() * (2.0 * state.eps).ln()
        + ln_kummer_to_laguerre(state.q.n, state.alpha)
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(domain(format!(
            "radius must be positive and finite, got {r}"
        )))
    }
}

fn signed_exp(ln_mag: f64, factor: f64) -> f64 {
    if factor == 0.0 {
        0.0
    } else {
        factor.signum() * (ln_mag + factor.abs().ln()).exp()
    }
}

/// `R(r) = ζ r^s e^{−εr} ₁F₁(−n; α+1; 2εr)`.
pub fn eval_radial(state: &BoundState, r: f64) -> Result<f64> {
    check_r(r)?;
    Ok(radial_kummer(state, r))
}

pub(crate) fn radial_kummer(state: &BoundState, r: f64) -> f64 {
    let f = kummer_poly_unchecked(state.q.n, state.alpha + 1.0, 2.0 * state.eps * r);
    signed_exp(state.ln_zeta + state.power() * r.ln() - state.eps * r, f)
}

/// Same function through the Laguerre form `η y^s e^{−y/2} L_n^α(y)`.
pub fn eval_radial_laguerre(state: &BoundState, r: f64) -> Result<f64> {
    check_r(r)?;
    Ok(radial_y(state, 2.0 * state.eps * r))
}

/// `R_n` as a function of the dimensionless `y = 2εr`.
pub(crate) fn radial_y(state: &BoundState, y: f64) -> f64 {
    radial_y_scaled(state, ln_eta(state), y)
}

pub(crate) fn radial_y_scaled(state: &BoundState, ln_prefactor: f64, y: f64) -> f64 {
    let l = laguerre_unchecked(state.q.n, state.alpha, y);
    signed_exp(ln_prefactor + state.power() * y.ln() - 0.5 * y, l)
}

/// Samples `R(r)` on `grid`.
pub fn sample(state: &BoundState, grid: &RadialGrid) -> SampledFunction {
    let values = par::map_range(grid.count, |i| radial_kummer(state, grid.point(i)));
    SampledFunction {
        grid: *grid,
        values,
    }
}

/// `∫₀^∞ R(r)² r^{N−1} dr` by Gauss-Laguerre in `y = 2εr`.
pub fn norm_check(state: &BoundState) -> f64 {
    norm_integral(state, state.ln_zeta)
}

/// Norm integral with the normalization constant replaced by `exp(ln_zeta)`.
pub fn norm_integral(state: &BoundState, ln_zeta: f64) -> f64 {
    // R² r^{N−1} dr = ζ² (2ε)^{−(α+2)} y^{α+1} e^{−y} ₁F₁² dy
    let rule = gauss_laguerre(default_quadrature_order(state.q.n), state.alpha + 1.0)
        .expect("alpha + 1 > -1 for every valid state");
    let b = state.alpha + 1.0;
    let n = state.q.n;
    let poly = rule.integrate(|y| kummer_poly_unchecked(n, b, y).powi(2));
    (2.0 * ln_zeta - (state.alpha + 2.0) * (2.0 * state.eps).ln()).exp() * poly
}

/// Norm integral of a state whose ζ uses the given convention.
pub fn norm_check_with(state: &BoundState, convention: NormConvention) -> f64 {
    let ln_zeta = ln_norm_constant_with(state.q.n, state.alpha, state.eps, convention);
    norm_integral(state, ln_zeta)
}

fn check_same_channel(a: &BoundState, b: &BoundState) -> Result<()> {
    if a.params != b.params || a.q.ell != b.q.ell || a.q.dim != b.q.dim {
        return Err(domain(
            "overlaps need two states of the same (params, ell, N) channel",
        ));
    }
    Ok(())
}

/// Physical overlap `∫₀^∞ R_a(r) R_b(r) r^{N−1} dr`.
///
/// States of one channel solve the same radial equation, so this vanishes
/// for `n_a ≠ n_b` even though their decay constants differ.
pub fn overlap_r(a: &BoundState, b: &BoundState) -> Result<f64> {
    check_same_channel(a, b)?;
    // t = (ε_a + ε_b) r turns the integrand into t^{α+1} e^{−t} · poly(t).
    let total = a.eps + b.eps;
    let m = default_quadrature_order(a.q.n.max(b.q.n));
    let rule = gauss_laguerre(m, a.alpha + 1.0)?;
    let (ca, cb) = (2.0 * a.eps / total, 2.0 * b.eps / total);
    let poly = rule.integrate(|t| {
        kummer_poly_unchecked(a.q.n, a.alpha + 1.0, ca * t)
            * kummer_poly_unchecked(b.q.n, b.alpha + 1.0, cb * t)
    });
    Ok((a.ln_zeta + b.ln_zeta - (a.alpha + 2.0) * total.ln()).exp() * poly)
}

/// Measure used for overlaps in the shared variable `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum YMeasure {
    /// `y^{N−1} dy`, the radial measure rewritten in y.
    Radial,
    /// `y^{N−2} dy`, under which the y-forms reduce to the Laguerre weight
    /// `y^α e^{−y}`.
    Laguerre,
}

/// `∫₀^∞ R_a(y) R_b(y) dμ(y)` with both states written in the same y.
pub fn overlap_y(a: &BoundState, b: &BoundState, measure: YMeasure) -> Result<f64> {
    check_same_channel(a, b)?;
    let weight_alpha = match measure {
        YMeasure::Radial => a.alpha + 1.0,
        YMeasure::Laguerre => a.alpha,
    };
    let m = default_quadrature_order(a.q.n.max(b.q.n));
    let rule = gauss_laguerre(m, weight_alpha)?;
    let alpha = a.alpha;
    let poly = rule
        .integrate(|y| laguerre_unchecked(a.q.n, alpha, y) * laguerre_unchecked(b.q.n, alpha, y));
    Ok((ln_eta(a) + ln_eta(b)).exp() * poly)
}

/// Pointwise residual of
/// `R'' + (N−1)/r R' − ν(ν+1)/r² R − ε² R + β/r R` on the interior of a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub residual: SampledFunction,
    pub max_abs_residual: f64,
    /// Root-mean-square residual; steadier than the maximum for order estimates.
    pub rms_residual: f64,
    /// Largest magnitude among the five terms over the grid.
    pub max_scale: f64,
    /// `max_abs_residual / max_scale`.
    pub relative: f64,
}

/// Radial-equation residual of arbitrary samples, using fourth-order
/// central differences. The first and last two nodes are dropped.
pub fn radial_residual(
    samples: &SampledFunction,
    dim: u32,
    nu: f64,
    eps: f64,
    beta: f64,
) -> Result<ResidualReport> {
    let grid = samples.grid;
    if grid.count < 5 {
        return Err(domain("residual needs at least 5 grid nodes"));
    }
    let h = grid.spacing();
    let resolution = h * h * eps * eps;
    if resolution > 0.1 {
        return Err(Error::Resolution(resolution));
    }
    let f = &samples.values;
    let inner = grid.interior(2)?;
    let dim = f64::from(dim);
    let rows: Vec<(f64, f64)> = par::map_range(inner.count, |j| {
        let i = j + 2;
        let r = grid.point(i);
        let d1 = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
        let d2 = (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2])
            / (12.0 * h * h);
        let terms = [
            d2,
            (dim - 1.0) / r * d1,
            -nu / (r * r) * f[i],
            -eps * eps * f[i],
            beta / r * f[i],
        ];
        let scale = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
        (terms.iter().sum(), scale)
    });
    let values: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let max_scale = rows.iter().fold(0.0_f64, |m, r| m.max(r.1));
    let residual = SampledFunction::new(inner, values)?;
    let max_abs_residual = residual.max_abs();
    let rms_residual =
        (residual.values.iter().map(|v| v * v).sum::<f64>() / residual.values.len() as f64).sqrt();
    let relative = if max_scale > 0.0 {
        max_abs_residual / max_scale
    } else {
        0.0
    };
    Ok(ResidualReport {
        residual,
        max_abs_residual,
        rms_residual,
        max_scale,
        relative,
    })
}

/// Residual of the closed-form eigenfunction of `state` on `grid`.
pub fn ode_residual(state: &BoundState, grid: &RadialGrid) -> Result<ResidualReport> {
    grid.validate()?;
    let samples = sample(state, grid);
    radial_residual(&samples, state.q.dim, state.nu, state.eps, state.beta)
}

/// Upper end of the y-range used for sampling: past every Laguerre zero and
/// far enough out that `y^{α+1+2n} e^{−y}` is negligible.
pub fn y_extent(n_max: u32, alpha: f64) -> f64 {
    4.0 * f64::from(n_max) + 2.0 * alpha.max(0.0) + 60.0
}

/// Default grid for residual checks: `y = 2εr ∈ [0.5, y_extent]` with
/// 4000 nodes.
pub fn verification_grid(state: &BoundState) -> RadialGrid {
    let scale = 2.0 * state.eps;
    RadialGrid {
        r_min: 0.5 / scale,
        r_max: y_extent(state.q.n, state.alpha) / scale,
        count: 4000,
    }
}

/// Sign changes of `R` on a fine grid reaching past the decayed envelope.
pub fn node_count(state: &BoundState) -> usize {
    let scale = 2.0 * state.eps;
    let y_end = y_extent(state.q.n, state.alpha) + 20.0;
    let grid = RadialGrid {
        r_min: 1e-6 / scale,
        r_max: y_end / scale,
        count: 20_000,
    };
    sample(state, &grid).sign_changes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{coulomb, kratzer_fues, PotentialParams};
    use crate::spectrum::QuantumNumbers;

    fn hydrogen(n: u32, ell: u32, dim: u32) -> BoundState {
        BoundState::new(coulomb(-1.0, 1.0, 1.0), QuantumNumbers::new(n, ell, dim)).unwrap()
    }

    fn kf(n: u32, ell: u32, dim: u32) -> BoundState {
        BoundState::new(
            kratzer_fues(5.0, 1.0, 1.0, 1.0).unwrap(),
            QuantumNumbers::new(n, ell, dim),
        )
        .unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(RadialGrid::new(0.0, 1.0, 10).is_err());
        assert!(RadialGrid::new(1.0, 1.0, 10).is_err());
        assert!(RadialGrid::new(0.1, 1.0, 2).is_err());
        let g = RadialGrid::new(0.5, 2.5, 5).unwrap();
        assert_eq!(g.points(), vec![0.5, 1.0, 1.5, 2.0, 2.5]);
    }

    #[test]
    fn uniform_grid_spacing() {
        let g = RadialGrid::new(0.001, 60.0, 6000).unwrap();
        let p = g.points();
        let h = g.spacing();
        for w in p.windows(2) {
            assert!(((w[1] - w[0]) - h).abs() <= 1e-14 * 60.0 / h * h);
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn hydrogen_ground_state() {
        let s = hydrogen(0, 0, 3);
        assert!((norm_constant(&s) - 2.0).abs() < 1e-14);
        let v = eval_radial(&s, 1.0).unwrap();
        assert!((v - 2.0 * (-1f64).exp()).abs() < 1e-15);
        assert!((v - 0.735759).abs() < 1e-6);
        assert!(eval_radial(&s, 0.0).is_err());
    }

    #[test]
    fn zeta_positive_and_small_r_limit() {
        for dim in [2, 3, 5] {
            for n in 0..5 {
                let s = kf(n, 1, dim);
                assert!(s.zeta > 0.0);
                assert!(s.power() > 0.0);
                assert!(eval_radial(&s, 1e-12).unwrap().abs() < 1e-20);
            }
        }
    }

    #[test]
    fn single_node_location() {
        for s in [hydrogen(1, 0, 3), kf(1, 2, 5)] {
            let r_node = (s.alpha + 1.0) / (2.0 * s.eps);
            assert!(eval_radial(&s, r_node).unwrap().abs() < 1e-12);
            let before = eval_radial(&s, r_node * 0.99).unwrap();
            let after = eval_radial(&s, r_node * 1.01).unwrap();
            assert!(before * after < 0.0);
        }
    }

    #[test]
    fn kummer_and_laguerre_paths_agree() {
        for s in [
            hydrogen(3, 1, 3),
            kf(5, 2, 2),
            kf(4, 0, 5),
            hydrogen(8, 3, 7),
        ] {
            for i in 1..400 {
                let r = 0.05 * f64::from(i) / s.eps;
                let a = eval_radial(&s, r).unwrap();
                let b = eval_radial_laguerre(&s, r).unwrap();
                // Tolerance follows the sum of absolute polynomial terms, so
                // points near a node are not held to a relative bound.
                let y = 2.0 * s.eps * r;
                let poly = kummer_poly_unchecked(s.q.n, s.alpha + 1.0, y);
                let magnitude = kummer_poly_unchecked(s.q.n, s.alpha + 1.0, -y);
                let envelope = (a / poly).abs();
                if envelope > 1e-250 {
                    assert!((a - b).abs() <= 1e-12 * envelope * magnitude, "r = {r}");
                }
            }
        }
    }

    #[test]
    fn normalization_and_scaling() {
        for s in [
            hydrogen(0, 0, 3),
            hydrogen(4, 2, 5),
            kf(3, 1, 2),
            kf(5, 0, 3),
        ] {
            assert!((norm_check(&s) - 1.0).abs() < 1e-10);
            let doubled = norm_integral(&s, s.ln_zeta + 2f64.ln());
            assert!((doubled - 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn factorial_convention_fails_for_excited_states() {
        for s in [hydrogen(1, 0, 3), kf(2, 1, 3)] {
            let bad = norm_check_with(&s, NormConvention::Factorial);
            assert!((bad - 1.0).abs() > 1e-3, "{bad}");
        }
    }

    #[test]
    fn overlaps_by_measure() {
        for (a, b) in [
            (hydrogen(0, 0, 3), hydrogen(1, 0, 3)),
            (kf(1, 1, 5), kf(2, 1, 5)),
        ] {
            assert!(overlap_r(&a, &b).unwrap().abs() < 1e-10);
            // Laguerre-weight overlap vanishes exactly, the y^{N-1} one does
            // not for neighbouring n.
            assert!(overlap_y(&a, &b, YMeasure::Laguerre).unwrap().abs() < 1e-10);
            assert!(overlap_y(&a, &b, YMeasure::Radial).unwrap().abs() > 1e-3);
        }
        let a = hydrogen(0, 0, 3);
        let other = hydrogen(0, 1, 3);
        assert!(overlap_r(&a, &other).is_err());
    }

    #[test]
    fn hydrogen_overlap_closed_form() {
        // ∫ R_1s R_2s r² dr = 0 with R_2s = (1/√2) (1 − r/2) e^{−r/2}.
        let one = hydrogen(0, 0, 3);
        let two = hydrogen(1, 0, 3);
        for r in [0.3, 1.0, 2.0, 5.0] {
            let expected = (1.0 / 2f64.sqrt()) * (1.0 - r / 2.0) * (-r / 2.0).exp();
            assert!((eval_radial(&two, r).unwrap() - expected).abs() < 1e-15);
        }
        assert!((overlap_r(&one, &one).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn residual_hydrogen() {
        let s = hydrogen(0, 0, 3);
        let grid = RadialGrid::new(0.1, 20.0, 2000).unwrap();
        let rep = ode_residual(&s, &grid).unwrap();
        assert!(rep.relative <= 1e-6, "{}", rep.relative);
        assert_eq!(rep.residual.values.len(), 1996);
    }

    #[test]
    fn residual_fourth_order() {
        let s = kf(2, 1, 3);
        let r_lo = 0.4 / s.eps;
        let r_hi = 40.0 / s.eps;
        let coarse = ode_residual(&s, &RadialGrid::new(r_lo, r_hi, 1601).unwrap()).unwrap();
        let fine = ode_residual(&s, &RadialGrid::new(r_lo, r_hi, 3201).unwrap()).unwrap();
        let order = (coarse.max_abs_residual / fine.max_abs_residual).log2();
        assert!((order - 4.0).abs() < 0.3, "order {order}");
    }

    #[test]
    fn residual_of_zero_function() {
        let grid = RadialGrid::new(0.1, 5.0, 50).unwrap();
        let zero = SampledFunction::new(grid, vec![0.0; 50]).unwrap();
        let rep = radial_residual(&zero, 3, 2.0, 1.0, 2.0).unwrap();
        assert_eq!(rep.max_abs_residual, 0.0);
        assert_eq!(rep.relative, 0.0);
    }

    #[test]
    fn residual_rejects_coarse_grid() {
        let s = hydrogen(0, 0, 3);
        let grid = RadialGrid::new(0.1, 20.0, 30).unwrap();
        assert!(matches!(ode_residual(&s, &grid), Err(Error::Resolution(_))));
    }

    #[test]
    fn node_counts() {
        for n in 0..=5 {
            assert_eq!(node_count(&hydrogen(n, 1, 3)), n as usize);
            assert_eq!(node_count(&kf(n, 0, 2)), n as usize);
        }
    }

    #[test]
    fn large_exponent_stays_finite() {
        let p = PotentialParams::new(400.0, -30.0, 0.0, 1.0, 1.0).unwrap();
        let s = BoundState::new(p, QuantumNumbers::new(3, 4, 6)).unwrap();
        assert!(s.k > 25.0);
        assert!((norm_check(&s) - 1.0).abs() < 1e-10);
        let g = verification_grid(&s);
        let samples = sample(&s, &g);
        assert!(samples.values.iter().all(|v| v.is_finite()));
        assert!(samples.max_abs() > 0.0);
    }
}
