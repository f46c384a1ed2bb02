//! Mie-type potentials `V(r) = A/r² + B/r + C`, the two-exponent Mie form
//! and the named presets built from it.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Coefficients of `V(r) = A/r² + B/r + C` together with the particle mass
/// and ħ. Presets default to natural units (M = ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    /// `A`, coefficient of 1/r² (energy·length²).
    #[serde(rename = "A")]
    pub inv_square: f64,
    /// `B`, coefficient of 1/r (energy·length). Bound states need B < 0.
    #[serde(rename = "B")]
    pub inv_linear: f64,
    /// `C`, constant offset; the continuum threshold.
    #[serde(rename = "C")]
    pub offset: f64,
    #[serde(rename = "M", default = "one")]
    pub mass: f64,
    #[serde(default = "one")]
    pub hbar: f64,
}

fn one() -> f64 {
    1.0
}

impl PotentialParams {
    /// Raw coefficients; validates only the mass and ħ.
    pub fn new(
        inv_square: f64,
        inv_linear: f64,
        offset: f64,
        mass: f64,
        hbar: f64,
    ) -> Result<Self> {
        let p = Self {
            inv_square,
            inv_linear,
            offset,
            mass,
            hbar,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) || !(self.hbar > 0.0) {
            return Err(domain(format!(
                "mass and hbar must be positive (M = {}, hbar = {})",
                self.mass, self.hbar
            )));
        }
        if ![
            self.inv_square,
            self.inv_linear,
            self.offset,
            self.mass,
            self.hbar,
        ]
        .iter()
        .all(|v| v.is_finite())
        {
            return Err(domain("potential parameters must be finite"));
        }
        Ok(())
    }

    /// `2M/ħ²`, the factor converting energies into inverse squared lengths.
    pub fn kinetic_scale(&self) -> f64 {
        2.0 * self.mass / (self.hbar * self.hbar)
    }

    /// V(r) for r > 0.
    pub fn eval(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        Ok(self.value(r))
    }

    pub(crate) fn value(&self, r: f64) -> f64 {
        self.inv_square / (r * r) + self.inv_linear / r + self.offset
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(domain(format!(
            "radius must be positive and finite, got {r}"
        )))
    }
}

/// Two-exponent Mie potential
/// `V(r) = D0 [ a/(b−a) (r0/r)^b − b/(b−a) (r0/r)^a ]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiePreset {
    #[serde(rename = "D0")]
    pub depth: f64,
    pub r0: f64,
    pub a: f64,
    pub b: f64,
}

impl MiePreset {
    pub fn new(depth: f64, r0: f64, a: f64, b: f64) -> Result<Self> {
        let p = Self { depth, r0, a, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.depth > 0.0) || !(self.r0 > 0.0) {
            return Err(domain(format!(
                "Mie preset needs D0 > 0 and r0 > 0 (D0 = {}, r0 = {})",
                self.depth, self.r0
            )));
        }
        if self.a == self.b || !self.a.is_finite() || !self.b.is_finite() {
            return Err(domain(format!(
                "Mie exponents must be finite and distinct (a = {}, b = {})",
                self.a, self.b
            )));
        }
        Ok(())
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        self.validate()?;
        check_radius(r)?;
        Ok(self.value(r))
    }

    pub(crate) fn value(&self, r: f64) -> f64 {
        let x = self.r0 / r;
        let span = self.b - self.a;
        self.depth * (self.a / span * x.powf(self.b) - self.b / span * x.powf(self.a))
    }
}

/// `V(r) = A/r² + B/r + C` at r.
pub fn eval_potential(params: &PotentialParams, r: f64) -> Result<f64> {
    params.eval(r)
}

/// Two-exponent Mie form at r.
pub fn eval_mie_general(preset: &MiePreset, r: f64) -> Result<f64> {
    preset.eval(r)
}

fn check_well(depth: f64, r0: f64) -> Result<()> {
    if depth > 0.0 && r0 > 0.0 && depth.is_finite() && r0.is_finite() {
        Ok(())
    } else {
        Err(domain(format!(
            "need D0 > 0 and r0 > 0 (D0 = {depth}, r0 = {r0})"
        )))
    }
}

/// Kratzer-Fues potential `−D0 (2 r0/r − r0²/r²)`: A = D0 r0², B = −2 D0 r0,
/// C = 0. The minimum −D0 sits at r = r0.
pub fn kratzer_fues(depth: f64, r0: f64, mass: f64, hbar: f64) -> Result<PotentialParams> {
    check_well(depth, r0)?;
    PotentialParams::new(depth * r0 * r0, -2.0 * depth * r0, 0.0, mass, hbar)
}

/// Sign convention of the modified Kratzer potential `± D0 ((r − r0)/r)²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KratzerConvention {
    /// `+D0 ((r − r0)/r)²`: A = D0 r0², B = −2 D0 r0, C = D0. Binding, with a
    /// zero minimum at r0 and dissociation limit D0.
    #[default]
    Standard,
    /// `−D0 ((r − r0)/r)²`: A = −D0 r0², B = +2 D0 r0, C = −D0. Written with
    /// the overall minus sign; B > 0, so it has no bound states.
    Inverted,
}

/// Modified Kratzer potential in the requested sign convention.
pub fn modified_kratzer(
    depth: f64,
    r0: f64,
    mass: f64,
    hbar: f64,
    convention: KratzerConvention,
) -> Result<PotentialParams> {
    check_well(depth, r0)?;
    let sign = match convention {
        KratzerConvention::Standard => 1.0,
        KratzerConvention::Inverted => -1.0,
    };
    PotentialParams::new(
        sign * depth * r0 * r0,
        -sign * 2.0 * depth * r0,
        sign * depth,
        mass,
        hbar,
    )
}

/// Coulomb potential `B/r` (A = C = 0). Binding requires B < 0, which the
/// spectrum module enforces.
pub fn coulomb(inv_linear: f64, mass: f64, hbar: f64) -> PotentialParams {
    PotentialParams {
        inv_square: 0.0,
        inv_linear,
        offset: 0.0,
        mass,
        hbar,
    }
}

/// Any radial potential the finite-difference oracle can discretize.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum Potential {
    /// `A/r² + B/r + C`, which has a closed-form spectrum.
    Mie(PotentialParams),
    /// Two-exponent Mie form; numeric spectrum only.
    General {
        preset: MiePreset,
        #[serde(rename = "M", default = "one")]
        mass: f64,
        #[serde(default = "one")]
        hbar: f64,
    },
}

impl Potential {
    pub fn validate(&self) -> Result<()> {
        match self {
            Potential::Mie(p) => p.validate(),
            Potential::General { preset, mass, hbar } => {
                preset.validate()?;
                if *mass > 0.0 && *hbar > 0.0 {
                    Ok(())
                } else {
                    Err(domain("mass and hbar must be positive"))
                }
            }
        }
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        Ok(self.value(r))
    }

    pub(crate) fn value(&self, r: f64) -> f64 {
        match self {
            Potential::Mie(p) => p.value(r),
            Potential::General { preset, .. } => preset.value(r),
        }
    }

    pub fn mass(&self) -> f64 {
        match self {
            Potential::Mie(p) => p.mass,
            Potential::General { mass, .. } => *mass,
        }
    }

    pub fn hbar(&self) -> f64 {
        match self {
            Potential::Mie(p) => p.hbar,
            Potential::General { hbar, .. } => *hbar,
        }
    }

    /// Limit of V(r) as r → ∞; bound levels lie below it.
    pub fn threshold(&self) -> f64 {
        match self {
            Potential::Mie(p) => p.offset,
            Potential::General { .. } => 0.0,
        }
    }

    /// The closed-form parameters, when this potential has them.
    pub fn as_mie(&self) -> Option<&PotentialParams> {
        match self {
            Potential::Mie(p) => Some(p),
            Potential::General { .. } => None,
        }
    }
}

impl From<PotentialParams> for Potential {
    fn from(p: PotentialParams) -> Self {
        Potential::Mie(p)
    }
}
