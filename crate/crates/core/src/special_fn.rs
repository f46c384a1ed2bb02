//! Special-function kernel: log-gamma, associated Laguerre polynomials,
//! terminating confluent hypergeometric series and generalized
//! Gauss-Laguerre rules.

use crate::error::{domain, Result};
use crate::oracle::Tridiagonal;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// Lanczos approximation with g = 671/128 and 14 terms (Numerical Recipes,
// 3rd ed., `gammln`). Relative error ~1e-16 away from the zeros at 1 and 2.
const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_1;
const LANCZOS_COEF: [f64; 14] = [
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

/// ln Γ(x) for x > 0.
///
/// Integers up to 171 go through the exact factorial product, so
/// `ln_gamma(1.0)` and `ln_gamma(2.0)` are exactly zero. Arguments below
/// one half use the reflection formula.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("ln_gamma requires a finite x > 0, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x.fract() == 0.0 && x <= 171.0 {
        let n = x as u32;
        let fact: f64 = (1..n).map(f64::from).product();
        return fact.ln();
    }
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - lanczos(1.0 - x);
    }
    lanczos(x)
}

fn lanczos(x: f64) -> f64 {
    let tmp = x + LANCZOS_G;
    let tmp = (x + 0.5) * tmp.ln() - tmp;
    let mut y = x;
    let mut ser = LANCZOS_C0;
    for c in LANCZOS_COEF {
        y += 1.0;
        ser += c / y;
    }
    tmp + LN_SQRT_2PI + (ser / x).ln()
}

/// ln n! for the radial quantum number.
pub(crate) fn ln_factorial(n: u32) -> f64 {
    ln_gamma_pos(f64::from(n) + 1.0)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > -1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(domain(format!(
            "Laguerre parameter must satisfy alpha > -1, got {alpha}"
        )))
    }
}

/// Associated Laguerre polynomial `L_n^α(x)` by forward recurrence
/// `(k+1) L_{k+1} = (2k+α+1-x) L_k - (k+α) L_{k-1}`.
pub fn laguerre(n: u32, alpha: f64, x: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if x.is_nan() {
        return Err(domain("Laguerre argument is NaN"));
    }
    Ok(laguerre_unchecked(n, alpha, x))
}

pub(crate) fn laguerre_unchecked(n: u32, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let k = f64::from(k);
        let next = ((2.0 * k + alpha + 1.0 - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `d/dx L_n^α(x) = -L_{n-1}^{α+1}(x)`.
pub fn laguerre_derivative(n: u32, alpha: f64, x: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(laguerre_derivative_unchecked(n, alpha, x))
}

pub(crate) fn laguerre_derivative_unchecked(n: u32, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        -laguerre_unchecked(n - 1, alpha + 1.0, x)
    }
}

/// `₁F₁(-n; b; x)`, the terminating Kummer series with n+1 terms.
pub fn kummer_poly(n: u32, b: f64, x: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(domain(format!(
            "Kummer parameter b must be positive, got {b}"
        )));
    }
    Ok(kummer_poly_unchecked(n, b, x))
}

pub(crate) fn kummer_poly_unchecked(n: u32, b: f64, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 0..n {
        let j = f64::from(j);
        term *= (j - f64::from(n)) / ((b + j) * (j + 1.0)) * x;
        sum += term;
    }
    sum
}

/// Generalized Gauss-Laguerre rule for `∫₀^∞ x^α e^{-x} f(x) dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    alpha: f64,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Σ wᵢ f(xᵢ).
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Node count used for normalization and overlap integrals involving
/// polynomials up to degree `n_max` in each factor.
pub fn default_quadrature_order(n_max: u32) -> usize {
    4 * (n_max as usize + 1) + 20
}

/// m-point rule for the weight `x^α e^{-x}` via Golub-Welsch.
///
/// Nodes are the eigenvalues of the Jacobi matrix of the monic Laguerre
/// recurrence (diagonal `2j+α+1`, off-diagonal `√(j(j+α))`), found by
/// Sturm bisection and polished with Newton steps on `L_m^α`. Weights use
/// the Christoffel formula `wᵢ = 1 / Σ_j p_j(xᵢ)²` over the orthonormal
/// polynomials, accumulated with rescaling so large nodes cannot overflow.
pub fn gauss_laguerre(m: usize, alpha: f64) -> Result<QuadratureRule> {
    check_alpha(alpha)?;
    if m == 0 {
        return Err(domain("quadrature order must be at least 1"));
    }
    let diag: Vec<f64> = (0..m).map(|j| 2.0 * j as f64 + alpha + 1.0).collect();
    let off: Vec<f64> = (1..m)
        .map(|j| (j as f64 * (j as f64 + alpha)).sqrt())
        .collect();
    let jacobi = Tridiagonal::new(diag, off)?;
    let mut nodes = jacobi.eigen_all(f64::MIN_POSITIVE)?;

    let order = m as u32;
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let p = laguerre_unchecked(order, alpha, *x);
            let dp = laguerre_derivative_unchecked(order, alpha, *x);
            if dp == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() || step.abs() > 1e-6 * x.abs().max(1.0) {
                break;
            }
            *x -= step;
        }
    }

    let ln_mu0 = ln_gamma_pos(alpha + 1.0);
    let weights = nodes
        .iter()
        .map(|&x| christoffel_weight(m, alpha, ln_mu0, x))
        .collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        alpha,
    })
}

fn christoffel_weight(m: usize, alpha: f64, ln_mu0: f64, x: f64) -> f64 {
    const BIG: f64 = 1e150;
    // p_{-1} = 0, p_0 = 1/√μ0; tracked as scaled values times exp(ln_scale).
    let mut ln_scale = -0.5 * ln_mu0;
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut sum = 1.0;
    for j in 0..m - 1 {
        let jf = j as f64;
        let a_j = 2.0 * jf + alpha + 1.0;
        let b_j = (jf * (jf + alpha)).sqrt();
        let b_next = ((jf + 1.0) * (jf + 1.0 + alpha)).sqrt();
        let next = ((x - a_j) * cur - b_j * prev) / b_next;
        prev = cur;
        cur = next;
        sum += cur * cur;
        if cur.abs() > BIG || sum > BIG * BIG {
            prev /= BIG;
            cur /= BIG;
            sum /= BIG * BIG;
            ln_scale += BIG.ln();
        }
    }
    (-(sum.ln() + 2.0 * ln_scale)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    /// ln Γ reference values at 40 significant digits (mpmath `loggamma`).
    #[allow(clippy::excessive_precision)]
    const LN_GAMMA_REF: [(f64, f64); 17] = [
        (0.001, 6.907_178_885_383_853_682_5),
        (0.01, 4.599_479_878_042_021_722_5),
        (0.1, 2.252_712_651_734_205_959_9),
        (0.25, 1.288_022_524_698_077_457_4),
        (0.5, 0.572_364_942_924_700_087_07),
        (0.75, 0.203_280_951_431_295_371_48),
        (1.5, -0.120_782_237_635_245_222_35),
        (2.5, 0.284_682_870_472_919_159_63),
        (3.3, 0.987_098_577_894_734_587_88),
        (7.0, 6.579_251_212_010_100_995_1),
        (10.5, 13.940_625_219_403_763_633),
        (27.1, 61.589_610_586_198_439_51),
        (99.5, 356.835_382_823_613_074_47),
        (150.25, 601.261_504_032_499_725_98),
        (1000.5, 5_908.674_175_848_677_488_7),
        (4321.0, 31_847.870_606_112_781_075),
        (10000.0, 82_099.717_496_442_377_273),
    ];

    #[test]
    fn ln_gamma_reference_values() {
        for (x, expected) in LN_GAMMA_REF {
            let got = ln_gamma(x).unwrap();
            assert!(rel(got, expected) <= 1e-13, "x = {x}: {got} vs {expected}");
        }
    }

    #[test]
    fn ln_gamma_simple_values() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert_eq!(ln_gamma(2.0).unwrap(), 0.0);
        assert!(rel(ln_gamma(5.0).unwrap(), 24f64.ln()) < 1e-15);
        let sqrt_pi_ln = 0.5 * std::f64::consts::PI.ln();
        assert!(rel(ln_gamma(0.5).unwrap(), sqrt_pi_ln) < 1e-14);
    }

    #[test]
    fn ln_gamma_functional_equation() {
        // Γ(x+1) = x Γ(x) away from integers, so the Lanczos path is tested.
        for i in 0..200 {
            let x = 0.013 + 0.37 * i as f64;
            let lhs = ln_gamma(x + 1.0).unwrap();
            let rhs = ln_gamma(x).unwrap() + x.ln();
            assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs().max(1.0), "x = {x}");
        }
    }

    #[test]
    fn ln_gamma_rejects_non_positive() {
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
        assert!(ln_gamma(f64::NAN).is_err());
    }

    #[test]
    fn laguerre_low_degree() {
        assert_eq!(laguerre(0, 3.7, 12.0).unwrap(), 1.0);
        assert_eq!(laguerre(1, 1.0, 1.0).unwrap(), 1.0);
        assert!((laguerre(2, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(laguerre(2, -1.0, 1.0).is_err());
    }

    fn binomial(top: f64, k: u32) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (top - f64::from(i)) / f64::from(i + 1))
    }

    /// L_n^α(x) = Σ_j (-1)^j C(n+α, n-j) x^j / j!, summed directly.
    fn laguerre_monomial(n: u32, alpha: f64, x: f64) -> f64 {
        (0..=n)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                let fact: f64 = (1..=j).map(f64::from).product();
                sign * binomial(f64::from(n) + alpha, n - j) * x.powi(j as i32) / fact
            })
            .sum()
    }

    #[test]
    fn recurrence_matches_monomial_basis() {
        for n in 0..=8 {
            for alpha in [0.0, 0.5, 1.0, 2.37] {
                for x in [0.1, 1.0, 10.0] {
                    let a = laguerre(n, alpha, x).unwrap();
                    let b = laguerre_monomial(n, alpha, x);
                    let tol = 1e-10 * b.abs().max(1e-300);
                    assert!((a - b).abs() <= tol, "n={n} α={alpha} x={x}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn derivative_identity_against_finite_differences() {
        let h = 1e-6;
        for n in 0..=6 {
            for alpha in [0.0, 0.5, 2.37] {
                for x in [0.3, 1.7, 4.2] {
                    let fd = (laguerre(n, alpha, x + h).unwrap()
                        - laguerre(n, alpha, x - h).unwrap())
                        / (2.0 * h);
                    let exact = laguerre_derivative(n, alpha, x).unwrap();
                    assert!((fd - exact).abs() < 1e-6, "n={n} α={alpha} x={x}");
                }
            }
        }
    }

    #[test]
    fn kummer_examples() {
        assert_eq!(kummer_poly(0, 2.5, 7.0).unwrap(), 1.0);
        assert!((kummer_poly(2, 2.0, 1.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!(kummer_poly(1, 3.0, 3.0).unwrap().abs() < 1e-15);
        assert!(kummer_poly(1, 0.0, 1.0).is_err());
        assert!(kummer_poly(1, -2.0, 1.0).is_err());
    }

    #[test]
    fn kummer_laguerre_bridge() {
        for n in 0..=8 {
            for alpha in [0.0, 0.5, 1.0, 2.37, 7.4] {
                for x in [0.1, 1.0, 3.3, 10.0] {
                    let nf = f64::from(n);
                    let factor = (ln_factorial(n) + ln_gamma_pos(alpha + 1.0)
                        - ln_gamma_pos(nf + alpha + 1.0))
                    .exp();
                    let bridge = factor * laguerre(n, alpha, x).unwrap();
                    let direct = kummer_poly(n, alpha + 1.0, x).unwrap();
                    // Flipping x sums the absolute values of the terms.
                    let magnitude = kummer_poly(n, alpha + 1.0, -x).unwrap();
                    let tol = 1e-14 * magnitude;
                    assert!((bridge - direct).abs() <= tol, "n={n} α={alpha} x={x}");
                }
            }
        }
    }

    #[test]
    fn gauss_laguerre_small_rules() {
        let one = gauss_laguerre(1, 0.0).unwrap();
        assert!((one.nodes()[0] - 1.0).abs() < 1e-15);
        assert!((one.weights()[0] - 1.0).abs() < 1e-15);

        let two = gauss_laguerre(2, 0.0).unwrap();
        let s = 2f64.sqrt();
        assert!((two.nodes()[0] - (2.0 - s)).abs() < 1e-14);
        assert!((two.nodes()[1] - (2.0 + s)).abs() < 1e-14);
        assert!((two.weights()[0] - (2.0 + s) / 4.0).abs() < 1e-14);
        assert!((two.weights()[1] - (2.0 - s) / 4.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_laguerre_rule_invariants() {
        for m in [1, 2, 5, 13, 44, 80] {
            for alpha in [0.0, 0.5, 1.0, 2.37, 8.4] {
                let rule = gauss_laguerre(m, alpha).unwrap();
                assert_eq!(rule.order(), m);
                assert!(rule.nodes()[0] > 0.0);
                assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
                assert!(rule.weights().iter().all(|&w| w > 0.0));

                let mu0 = ln_gamma_pos(alpha + 1.0).exp();
                let total: f64 = rule.weights().iter().sum();
                assert!(
                    rel(total, mu0) <= 1e-12,
                    "m={m} α={alpha}: {total} vs {mu0}"
                );

                // Normalized moments ∫x^j w / μ0 = Γ(α+1+j)/Γ(α+1).
                for j in [1, m, 2 * m - 1]
                    .into_iter()
                    .filter(|&j| j < 2 * m && j <= 40)
                {
                    let got = rule.integrate(|x| x.powi(j as i32)) / mu0;
                    let expected =
                        (ln_gamma_pos(alpha + 1.0 + j as f64) - ln_gamma_pos(alpha + 1.0)).exp();
                    assert!(rel(got, expected) <= 1e-10, "m={m} α={alpha} j={j}");
                }
            }
        }
    }

    #[test]
    fn laguerre_orthogonality_by_quadrature() {
        for alpha in [0.0, 0.5, 2.37, 6.1] {
            for n in 0..=8u32 {
                for m in 0..=8u32 {
                    let rule = gauss_laguerre((n + m + 2) as usize, alpha).unwrap();
                    let got = rule.integrate(|x| {
                        laguerre_unchecked(n, alpha, x) * laguerre_unchecked(m, alpha, x)
                    });
                    let norm = (ln_gamma_pos(f64::from(n) + alpha + 1.0) - ln_factorial(n)).exp();
                    if n == m {
                        assert!(rel(got, norm) <= 1e-10, "n={n} α={alpha}");
                    } else {
                        assert!(got.abs() <= 1e-10 * norm, "n={n} m={m} α={alpha}: {got}");
                    }
                }
            }
        }
    }
}
