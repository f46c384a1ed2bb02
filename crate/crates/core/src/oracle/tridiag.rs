//! Sturm-sequence bisection for symmetric tridiagonal matrices.

use crate::error::{Error, Result};
use crate::par;

/// Symmetric tridiagonal matrix stored as its diagonal and first
/// off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl Tridiagonal {
    /// Builds the matrix, rejecting non-finite entries and mismatched
    /// lengths (`offdiag.len()` must be `diag.len() - 1`).
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Domain("empty tridiagonal matrix".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::Domain(format!(
                "off-diagonal length {} does not match diagonal length {}",
                offdiag.len(),
                diag.len()
            )));
        }
        if let Some(i) = diag.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if let Some(i) = offdiag.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(diag.len() + i));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Number of eigenvalues strictly below `x`.
    ///
    /// Counts negative pivots of the LDLᵀ factorization of `T - xI`. Pivots
    /// smaller in magnitude than `pivmin` are replaced by `-pivmin`, which
    /// keeps `e²/q` finite without changing the count for a nearby matrix.
    pub fn sturm_count(&self, x: f64) -> usize {
        let pivmin = self.pivmin();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for (d, e) in self.diag[1..].iter().zip(&self.offdiag) {
            q = (d - x) - e * e / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn pivmin(&self) -> f64 {
        let emax = self.offdiag.iter().fold(1.0_f64, |m, e| m.max(e * e));
        f64::MIN_POSITIVE * emax
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 {
                self.offdiag[i - 1].abs()
            } else {
                0.0
            };
            let right = if i + 1 < n {
                self.offdiag[i].abs()
            } else {
                0.0
            };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// The `index`-th smallest eigenvalue (0-based), bisected until the
    /// bracket is narrower than `tol` (absolute) or machine resolution.
    pub fn eigenvalue(&self, index: usize, tol: f64) -> f64 {
        let (g_lo, g_hi) = self.gershgorin();
        let pad = f64::EPSILON * g_lo.abs().max(g_hi.abs()).max(1.0);
        self.bisect(index, g_lo - pad, g_hi + pad, tol)
    }

    fn bisect(&self, index: usize, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
        for _ in 0..256 {
            let mid = 0.5 * (lo + hi);
            let resolution = 2.0 * f64::EPSILON * lo.abs().max(hi.abs());
            if hi - lo <= tol.max(resolution) || mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// The `count` smallest eigenvalues in ascending order. Each eigenvalue
    /// is bisected independently, so the work is spread over threads when
    /// the `parallel` feature is on.
    pub fn eigen_lowest(&self, count: usize, tol: f64) -> Result<Vec<f64>> {
        if count > self.dim() {
            return Err(Error::Domain(format!(
                "requested {count} eigenvalues of a {}x{} matrix",
                self.dim(),
                self.dim()
            )));
        }
        if !(tol > 0.0) {
            return Err(Error::Domain("bisection tolerance must be positive".into()));
        }
        let (g_lo, g_hi) = self.gershgorin();
        let pad = f64::EPSILON * g_lo.abs().max(g_hi.abs()).max(1.0);
        Ok(par::map_range(count, |j| {
            self.bisect(j, g_lo - pad, g_hi + pad, tol)
        }))
    }

    /// All eigenvalues in ascending order.
    pub fn eigen_all(&self, tol: f64) -> Result<Vec<f64>> {
        self.eigen_lowest(self.dim(), tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Determinant recurrence of `T - xI`; the brute-force route.
    fn char_poly(d: &[f64], e: &[f64], x: f64) -> f64 {
        let mut p_prev = 1.0;
        let mut p = d[0] - x;
        for i in 1..d.len() {
            let next = (d[i] - x) * p - e[i - 1] * e[i - 1] * p_prev;
            p_prev = p;
            p = next;
        }
        p
    }

    /// Roots of the characteristic polynomial by scanning for sign changes
    /// on a fine mesh and refining each with plain bisection on the value.
    fn brute_eigenvalues(d: &[f64], e: &[f64]) -> Vec<f64> {
        let bound = d.iter().map(|v| v.abs()).sum::<f64>()
            + 2.0 * e.iter().map(|v| v.abs()).sum::<f64>()
            + 1.0;
        let steps = 400_000;
        let mut roots = Vec::new();
        let mut x0 = -bound;
        let mut f0 = char_poly(d, e, x0);
        for s in 1..=steps {
            let x1 = -bound + 2.0 * bound * s as f64 / steps as f64;
            let f1 = char_poly(d, e, x1);
            if f0 == 0.0 {
                roots.push(x0);
            } else if f0 * f1 < 0.0 {
                let (mut a, mut b, mut fa) = (x0, x1, f0);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    let fm = char_poly(d, e, m);
                    if fm * fa <= 0.0 {
                        b = m;
                    } else {
                        a = m;
                        fa = fm;
                    }
                }
                roots.push(0.5 * (a + b));
            }
            x0 = x1;
            f0 = f1;
        }
        roots
    }

    #[test]
    fn three_by_three_laplacian() {
        let t = Tridiagonal::new(vec![2.0; 3], vec![-1.0; 2]).unwrap();
        let ev = t.eigen_all(1e-14).unwrap();
        let s = 2f64.sqrt();
        let expected = [2.0 - s, 2.0, 2.0 + s];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn one_by_one() {
        let t = Tridiagonal::new(vec![3.25], vec![]).unwrap();
        let ev = t.eigen_all(1e-15).unwrap();
        assert_eq!(ev.len(), 1);
        assert!((ev[0] - 3.25).abs() < 1e-15);
    }

    #[test]
    fn sturm_count_two_by_two() {
        // eigenvalues 2 ± √2
        let t = Tridiagonal::new(vec![1.0, 3.0], vec![-1.0]).unwrap();
        assert_eq!(t.sturm_count(0.0), 0);
        assert_eq!(t.sturm_count(1.0), 1);
        assert_eq!(t.sturm_count(4.0), 2);
    }

    #[test]
    fn rejects_non_finite_and_shape_errors() {
        assert_eq!(
            Tridiagonal::new(vec![1.0, f64::NAN], vec![0.0]),
            Err(Error::NonFinite(1))
        );
        assert_eq!(
            Tridiagonal::new(vec![1.0, 1.0], vec![f64::INFINITY]),
            Err(Error::NonFinite(2))
        );
        assert!(Tridiagonal::new(vec![1.0, 1.0], vec![]).is_err());
        let t = Tridiagonal::new(vec![1.0, 1.0], vec![0.5]).unwrap();
        assert!(t.eigen_lowest(3, 1e-12).is_err());
    }

    #[test]
    fn free_chain_closed_form() {
        let n = 60;
        let t = Tridiagonal::new(vec![0.0; n], vec![-1.0; n - 1]).unwrap();
        let ev = t.eigen_all(1e-14).unwrap();
        let mut expected: Vec<f64> = (1..=n)
            .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn matches_characteristic_polynomial(
            d in prop::collection::vec(-5.0f64..5.0, 1..=8),
            e_raw in prop::collection::vec(0.05f64..3.0, 8),
        ) {
            let e: Vec<f64> = e_raw[..d.len() - 1].to_vec();
            let t = Tridiagonal::new(d.clone(), e.clone()).unwrap();
            let ev = t.eigen_all(1e-14).unwrap();
            let brute = brute_eigenvalues(&d, &e);
            // Non-zero off-diagonals give simple eigenvalues, so every root
            // is a sign change of the characteristic polynomial.
            prop_assert_eq!(brute.len(), ev.len());
            for (a, b) in ev.iter().zip(&brute) {
                prop_assert!((a - b).abs() < 1e-10, "{} vs {}", a, b);
            }
        }
    }
}
