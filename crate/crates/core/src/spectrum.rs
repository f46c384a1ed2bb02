//! Closed-form bound-state spectrum.
//!
//! With `ν(ν+1) = ℓ(ℓ+N−2) + 2MA/ħ²` and `β = −2MB/ħ²`, the small-r exponent
//! `k` is the larger root of `k² − (N−2)k − ν(ν+1) = 0`, the inverse decay
//! length is `ε = β / (2n + 2k + 3 − N)` and
//! `E = C − (M/2ħ²) (B / (n + k + (3−N)/2))²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::PotentialParams;
use crate::wavefunction;

/// Labels of a bound state: radial quantum number `n`, orbital quantum
/// number `ell` and spatial dimension `dim` (N ≥ 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuantumNumbers {
    pub n: u32,
    pub ell: u32,
    pub dim: u32,
}

impl QuantumNumbers {
    pub const fn new(n: u32, ell: u32, dim: u32) -> Self {
        Self { n, ell, dim }
    }
}

fn check_dim(dim: u32) -> Result<()> {
    if dim >= 2 {
        Ok(())
    } else {
        Err(Error::InvalidDimension(dim))
    }
}

/// `ν(ν+1) = ℓ(ℓ+N−2) + 2MA/ħ²`.
pub fn nu_product(params: &PotentialParams, ell: u32, dim: u32) -> Result<f64> {
    check_dim(dim)?;
    params.validate()?;
    let l = f64::from(ell);
    let n = f64::from(dim);
    Ok(l * (l + n - 2.0) + params.kinetic_scale() * params.inv_square)
}

/// Discriminant `(N−2)² + 4ν(ν+1)` of the indicial quadratic.
pub fn indicial_discriminant(params: &PotentialParams, ell: u32, dim: u32) -> Result<f64> {
    let nu = nu_product(params, ell, dim)?;
    let shift = f64::from(dim) - 2.0;
    Ok(shift * shift + 4.0 * nu)
}

/// The `+` root `k = [(N−2) + √((N−2)² + 4ν(ν+1))] / 2`.
///
/// A negative discriminant means the attractive 1/r² term is strong enough
/// to cause fall to the center. The `−` root is never returned.
pub fn k_ell_n(params: &PotentialParams, ell: u32, dim: u32) -> Result<f64> {
    let disc = indicial_discriminant(params, ell, dim)?;
    if disc < 0.0 {
        return Err(Error::FallToCenter { discriminant: disc });
    }
    let k = 0.5 * ((f64::from(dim) - 2.0) + disc.sqrt());
    let gate = 2.0 * k + 3.0 - f64::from(dim);
    if !(gate > 0.0) || k < 0.0 {
        return Err(Error::NotNormalizable { value: gate });
    }
    Ok(k)
}

/// `β = −2MB/ħ²`; must be positive for bound states.
pub fn beta(params: &PotentialParams) -> Result<f64> {
    params.validate()?;
    if params.inv_linear < 0.0 {
        Ok(-params.kinetic_scale() * params.inv_linear)
    } else {
        Err(Error::NoBoundStates {
            coulomb: params.inv_linear,
        })
    }
}

/// Inverse decay length `ε = β / (2n + 2k + 3 − N)` of the state `q`.
pub fn epsilon(params: &PotentialParams, q: QuantumNumbers) -> Result<f64> {
    let k = k_ell_n(params, q.ell, q.dim)?;
    let beta = beta(params)?;
    Ok(beta / (2.0 * f64::from(q.n) + 2.0 * k + 3.0 - f64::from(q.dim)))
}

/// `E = C − (M/2ħ²) (B / (n + k + (3−N)/2))²`.
pub fn energy(params: &PotentialParams, q: QuantumNumbers) -> Result<f64> {
    let k = k_ell_n(params, q.ell, q.dim)?;
    beta(params)?;
    let denom = f64::from(q.n) + k + 0.5 * (3.0 - f64::from(q.dim));
    let ratio = params.inv_linear / denom;
    Ok(params.offset - params.mass / (2.0 * params.hbar * params.hbar) * ratio * ratio)
}

/// A bound state with every derived closed-form quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundState {
    pub params: PotentialParams,
    pub q: QuantumNumbers,
    /// ν(ν+1).
    pub nu: f64,
    /// Root of the indicial quadratic; the eigenfunction behaves as r^(k+2−N).
    pub k: f64,
    pub beta: f64,
    pub eps: f64,
    pub energy: f64,
    /// Laguerre parameter `2k + 2 − N`.
    pub alpha: f64,
    /// Normalization constant ζ and its logarithm (ζ itself may overflow).
    pub zeta: f64,
    pub ln_zeta: f64,
    /// Set when the indicial discriminant is exactly zero.
    pub borderline: bool,
}

impl BoundState {
    pub fn new(params: PotentialParams, q: QuantumNumbers) -> Result<Self> {
        let nu = nu_product(&params, q.ell, q.dim)?;
        let k = k_ell_n(&params, q.ell, q.dim)?;
        let borderline = indicial_discriminant(&params, q.ell, q.dim)? == 0.0;
        let beta = beta(&params)?;
        let dim = f64::from(q.dim);
        let eps = beta / (2.0 * f64::from(q.n) + 2.0 * k + 3.0 - dim);
        let energy = energy(&params, q)?;
        let alpha = 2.0 * k + 2.0 - dim;
        let ln_zeta = wavefunction::ln_norm_constant(q.n, alpha, eps);
        Ok(Self {
            params,
            q,
            nu,
            k,
            beta,
            eps,
            energy,
            alpha,
            zeta: ln_zeta.exp(),
            ln_zeta,
            borderline,
        })
    }

    /// Same channel, different radial quantum number.
    pub fn with_n(&self, n: u32) -> Result<Self> {
        Self::new(self.params, QuantumNumbers { n, ..self.q })
    }

    /// Exponent `k + 2 − N` of the small-r power law.
    pub fn power(&self) -> f64 {
        self.k + 2.0 - f64::from(self.q.dim)
    }

    /// Bargmann index `J = k + (3 − N)/2`.
    pub fn bargmann_index(&self) -> f64 {
        self.k + 0.5 * (3.0 - f64::from(self.q.dim))
    }

    /// |k² − (N−2)k − ν(ν+1)|.
    pub fn indicial_residual(&self) -> f64 {
        let shift = f64::from(self.q.dim) - 2.0;
        (self.k * self.k - shift * self.k - self.nu).abs()
    }
}

/// One row of a spectrum table. Invalid channels keep their error.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub q: QuantumNumbers,
    pub state: std::result::Result<BoundState, Error>,
}

/// Rows for every `n ≤ n_max`, `ℓ ≤ ell_max` at dimension `dim`, ordered by
/// (ℓ, n).
pub fn spectrum_table(
    params: &PotentialParams,
    n_max: u32,
    ell_max: u32,
    dim: u32,
) -> Vec<SpectrumRow> {
    let qs: Vec<QuantumNumbers> = (0..=ell_max)
        .flat_map(|ell| (0..=n_max).map(move |n| QuantumNumbers::new(n, ell, dim)))
        .collect();
    qs.into_iter()
        .map(|q| SpectrumRow {
            q,
            state: BoundState::new(*params, q),
        })
        .collect()
}
