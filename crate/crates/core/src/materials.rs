//! Dielectric response models.
//!
//! A two-oscillator Lorentz–Drude permittivity describes each solid: one
//! low-lying (infrared) resonance and one core-electron (ultraviolet)
//! resonance. Both strengths are divided by a common dilution factor. Porous
//! layers are described by the Maxwell–Garnett mixing rule applied on top of
//! a Lorentz–Drude host.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Smallest admissible |1 − g| in the Maxwell–Garnett inversion.
pub const MAXWELL_GARNETT_FLOOR: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaterialError {
    #[error("frequency must be finite and non-negative, got {0}")]
    InvalidFrequency(f64),
    #[error("porosity must lie in [0, 1], got {0}")]
    InvalidPorosity(f64),
    #[error("invalid oscillator parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("Maxwell-Garnett mapping is singular: |1 - g| = {0:e}")]
    SingularMixing(f64),
}

/// Two-resonance Lorentz–Drude parameters, all frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorModel {
    /// Oscillator strength of the low-lying resonance.
    pub strength: f64,
    /// Position of the low-lying resonance.
    pub resonance: f64,
    /// Damping of the low-lying resonance.
    pub damping: f64,
    /// Oscillator strength of the core-electron resonance.
    pub core_strength: f64,
    /// Position of the core-electron resonance.
    pub core_resonance: f64,
    /// Damping of the core-electron resonance.
    pub core_damping: f64,
    /// Optical dilution factor, divides both strengths.
    #[serde(default = "unit_dilution")]
    pub dilution: f64,
}

fn unit_dilution() -> f64 {
    1.0
}

impl OscillatorModel {
    pub fn validate(&self) -> Result<(), MaterialError> {
        let checks: [(&'static str, f64, bool, &'static str); 7] = [
            ("strength", self.strength, self.strength >= 0.0, "must be >= 0"),
            ("resonance", self.resonance, self.resonance > 0.0, "must be > 0"),
            ("damping", self.damping, self.damping > 0.0, "must be > 0"),
            (
                "core_strength",
                self.core_strength,
                self.core_strength >= 0.0,
                "must be >= 0",
            ),
            (
                "core_resonance",
                self.core_resonance,
                self.core_resonance > 0.0,
                "must be > 0",
            ),
            (
                "core_damping",
                self.core_damping,
                self.core_damping > 0.0,
                "must be > 0",
            ),
            ("dilution", self.dilution, self.dilution >= 1.0, "must be >= 1"),
        ];
        for (name, value, ok, reason) in checks {
            if !value.is_finite() || !ok {
                return Err(MaterialError::InvalidParameter { name, value, reason });
            }
        }
        Ok(())
    }

    /// Strengths after dilution, `(C/τ, D/τ)`.
    #[inline]
    pub fn diluted_strengths(&self) -> (f64, f64) {
        (self.strength / self.dilution, self.core_strength / self.dilution)
    }

    pub fn with_dilution(mut self, dilution: f64) -> Self {
        self.dilution = dilution;
        self
    }

    /// ε(ω) on the real axis; `omega` is not checked.
    #[inline]
    pub fn eps(&self, omega: f64) -> Complex64 {
        let (c, d) = self.diluted_strengths();
        let w0 = self.resonance;
        let wc = self.core_resonance;
        let low = Complex64::new(w0 * w0 - omega * omega, -self.damping * omega);
        let core = Complex64::new(wc * wc - omega * omega, -self.core_damping * omega);
        1.0 + c * w0 * w0 / low + d * wc * wc / core
    }

    /// ε(iξ) on the imaginary axis; `xi` is not checked.
    #[inline]
    pub fn eps_imag(&self, xi: f64) -> f64 {
        let (c, d) = self.diluted_strengths();
        let w0 = self.resonance;
        let wc = self.core_resonance;
        1.0 + c * w0 * w0 / (w0 * w0 + xi * xi + self.damping * xi)
            + d * wc * wc / (wc * wc + xi * xi + self.core_damping * xi)
    }

    /// Static permittivity 1 + C/τ + D/τ.
    pub fn static_eps(&self) -> f64 {
        let (c, d) = self.diluted_strengths();
        1.0 + c + d
    }

    /// Lossless frequency at which the host permittivity equals `target`,
    /// treating the core term as its static value. `None` when no positive
    /// solution exists.
    fn frequency_for(&self, target: f64) -> Option<f64> {
        let (c, d) = self.diluted_strengths();
        if c == 0.0 {
            return None;
        }
        let ratio_sq = if target.is_infinite() {
            1.0
        } else {
            1.0 + c / (1.0 + d - target)
        };
        (ratio_sq.is_finite() && ratio_sq > 0.0).then(|| self.resonance * ratio_sq.sqrt())
    }
}

/// A dielectric medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Material {
    Vacuum,
    LorentzDrude(OscillatorModel),
    MaxwellGarnett { host: OscillatorModel, porosity: f64 },
}

/// A narrow spectral feature of a material: a pole, zero or surface-mode
/// frequency of the permittivity, together with its linewidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralFeature {
    pub omega: f64,
    pub width: f64,
}

impl Material {
    pub fn lorentz_drude(model: OscillatorModel) -> Self {
        Material::LorentzDrude(model)
    }

    pub fn validate(&self) -> Result<(), MaterialError> {
        match self {
            Material::Vacuum => Ok(()),
            Material::LorentzDrude(model) => model.validate(),
            Material::MaxwellGarnett { host, porosity } => {
                host.validate()?;
                check_porosity(*porosity)
            }
        }
    }

    /// The oscillator model behind this material, if any.
    pub fn oscillator(&self) -> Option<&OscillatorModel> {
        match self {
            Material::Vacuum => None,
            Material::LorentzDrude(model) => Some(model),
            Material::MaxwellGarnett { host, .. } => Some(host),
        }
    }

    pub fn oscillator_mut(&mut self) -> Option<&mut OscillatorModel> {
        match self {
            Material::Vacuum => None,
            Material::LorentzDrude(model) => Some(model),
            Material::MaxwellGarnett { host, .. } => Some(host),
        }
    }

    pub fn is_vacuum(&self) -> bool {
        matches!(self, Material::Vacuum)
    }

    /// Real-axis permittivity without argument checks. Used in hot loops
    /// after the material has been validated.
    #[inline]
    pub(crate) fn eps_unchecked(&self, omega: f64) -> Result<Complex64, MaterialError> {
        match self {
            Material::Vacuum => Ok(Complex64::new(1.0, 0.0)),
            Material::LorentzDrude(model) => Ok(model.eps(omega)),
            Material::MaxwellGarnett { host, porosity } => mix_complex(host.eps(omega), *porosity),
        }
    }

    #[inline]
    pub(crate) fn eps_imag_unchecked(&self, xi: f64) -> Result<f64, MaterialError> {
        match self {
            Material::Vacuum => Ok(1.0),
            Material::LorentzDrude(model) => Ok(model.eps_imag(xi)),
            Material::MaxwellGarnett { host, porosity } => mix_real(host.eps_imag(xi), *porosity),
        }
    }

    /// Resonance-like frequencies where the reflection coefficients vary on
    /// the scale of the damping: the permittivity pole, its zero and the
    /// ε = −1 surface mode. For porous media these are taken from the
    /// effective (mixed) permittivity.
    pub fn spectral_features(&self) -> Vec<SpectralFeature> {
        let (model, porosity) = match self {
            Material::Vacuum => return Vec::new(),
            Material::LorentzDrude(model) => (model, 0.0),
            Material::MaxwellGarnett { host, porosity } => (host, *porosity),
        };
        let mut out = Vec::new();
        for target in [f64::INFINITY, 0.0, -1.0] {
            let host_target = if porosity == 0.0 {
                target
            } else {
                match host_value_for_mixed(target, porosity) {
                    Some(v) => v,
                    None => continue,
                }
            };
            if let Some(omega) = model.frequency_for(host_target) {
                out.push(SpectralFeature {
                    omega,
                    width: model.damping,
                });
            }
        }
        out
    }
}

/// Host permittivity that the mixing rule maps onto `target`.
fn host_value_for_mixed(target: f64, porosity: f64) -> Option<f64> {
    if porosity >= 1.0 {
        return None;
    }
    let g = if target.is_infinite() {
        1.0
    } else {
        (target - 1.0) / (target + 2.0)
    };
    let s = g / (1.0 - porosity);
    if s == 1.0 {
        return Some(f64::INFINITY);
    }
    Some((1.0 + 2.0 * s) / (1.0 - s))
}

fn check_frequency(omega: f64) -> Result<(), MaterialError> {
    if omega.is_finite() && omega >= 0.0 {
        Ok(())
    } else {
        Err(MaterialError::InvalidFrequency(omega))
    }
}

fn check_porosity(phi: f64) -> Result<(), MaterialError> {
    if (0.0..=1.0).contains(&phi) {
        Ok(())
    } else {
        Err(MaterialError::InvalidPorosity(phi))
    }
}

/// Complex permittivity of `material` at real angular frequency `omega`.
pub fn permittivity(material: &Material, omega: f64) -> Result<Complex64, MaterialError> {
    check_frequency(omega)?;
    material.validate()?;
    material.eps_unchecked(omega)
}

/// Permittivity continued to the imaginary frequency ω = iξ; real and ≥ 1.
pub fn permittivity_imag_axis(material: &Material, xi: f64) -> Result<f64, MaterialError> {
    check_frequency(xi)?;
    material.validate()?;
    material.eps_imag_unchecked(xi)
}

/// Effective permittivity of a porous medium with host permittivity
/// `eps_host` and void fraction `phi`, inverting
/// (ε̂ − 1)/(ε̂ + 2) = (1 − φ)(ε − 1)/(ε + 2).
pub fn maxwell_garnett(eps_host: Complex64, phi: f64) -> Result<Complex64, MaterialError> {
    check_porosity(phi)?;
    mix_complex(eps_host, phi)
}

#[inline]
fn mix_complex(eps: Complex64, phi: f64) -> Result<Complex64, MaterialError> {
    if phi == 1.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if phi == 0.0 {
        return Ok(eps);
    }
    let denom = eps + 2.0;
    if denom.norm() < MAXWELL_GARNETT_FLOOR {
        return Err(MaterialError::SingularMixing(denom.norm()));
    }
    let g = (1.0 - phi) * (eps - 1.0) / denom;
    let one_minus_g = 1.0 - g;
    if one_minus_g.norm() < MAXWELL_GARNETT_FLOOR {
        return Err(MaterialError::SingularMixing(one_minus_g.norm()));
    }
    Ok((1.0 + 2.0 * g) / one_minus_g)
}

#[inline]
fn mix_real(eps: f64, phi: f64) -> Result<f64, MaterialError> {
    if phi == 1.0 {
        return Ok(1.0);
    }
    if phi == 0.0 {
        return Ok(eps);
    }
    let g = (1.0 - phi) * (eps - 1.0) / (eps + 2.0);
    let one_minus_g = 1.0 - g;
    if one_minus_g.abs() < MAXWELL_GARNETT_FLOOR {
        return Err(MaterialError::SingularMixing(one_minus_g.abs()));
    }
    Ok((1.0 + 2.0 * g) / one_minus_g)
}

/// Predicted resonance of a porous layer built from `model` with porosity
/// `phi`: ω₀·sqrt(1 + φC/(φD + 3)), using the diluted strengths. Only valid
/// when the low-lying resonance sits far below the core resonance.
pub fn aerogel_resonance(model: &OscillatorModel, phi: f64) -> f64 {
    if model.resonance / model.core_resonance >= 1e-2 {
        log::warn!(
            "aerogel resonance estimate assumes omega0 << Omega (ratio {:.3e})",
            model.resonance / model.core_resonance
        );
    }
    let (c, d) = model.diluted_strengths();
    model.resonance * (1.0 + phi * c / (phi * d + 3.0)).sqrt()
}
