//! Configurations of the dilution, resonance-tuning and aerogel studies.
//!
//! All layers are 5 µm thick and sit on a substrate whose oscillator model is
//! supplied by the caller; no substrate values are built in. Slab 1 and the
//! environment are at 300 K.

use crate::materials::{Material, OscillatorModel};
use crate::optics::LayeredSlab;
use crate::pressure::SystemConfig;

/// Layer thickness δ shared by every preset, in metres.
pub const LAYER_THICKNESS: f64 = 5e-6;
/// Low-lying resonance of the plate-1 material, rad/s.
pub const OMEGA_1: f64 = 1e13;
/// Low-lying damping of both plate materials, rad/s.
pub const DAMPING: f64 = 1e11;
/// Core-electron resonance of both plate materials, rad/s.
pub const CORE_RESONANCE: f64 = 1e16;
/// Core-electron damping of both plate materials, rad/s.
pub const CORE_DAMPING: f64 = 5e14;
pub const T_ROOM: f64 = 300.0;

/// Layer material with the shared damping and core parameters.
pub fn layer_model(strength: f64, resonance: f64, core_strength: f64) -> OscillatorModel {
    OscillatorModel {
        strength,
        resonance,
        damping: DAMPING,
        core_strength,
        core_resonance: CORE_RESONANCE,
        core_damping: CORE_DAMPING,
        dilution: 1.0,
    }
}

fn slab(layer: Material, substrate: &OscillatorModel) -> LayeredSlab {
    LayeredSlab {
        layer,
        thickness: LAYER_THICKNESS,
        substrate: Material::lorentz_drude(*substrate),
        outer_face_blackened: true,
    }
}

/// Diluted two-oscillator layers: C₁ = 3, D₁ = 1, C₂ = 1.5, D₂ = 0.5, both
/// diluted by `dilution`, with ω₂ = `omega_ratio`·ω₁.
pub fn dilution_study(substrate: &OscillatorModel, dilution: f64, omega_ratio: f64, t2: f64, gap: f64) -> SystemConfig {
    let m1 = layer_model(3.0, OMEGA_1, 1.0).with_dilution(dilution);
    let m2 = layer_model(1.5, omega_ratio * OMEGA_1, 0.5).with_dilution(dilution);
    SystemConfig {
        slab1: slab(Material::lorentz_drude(m1), substrate),
        slab2: slab(Material::lorentz_drude(m2), substrate),
        gap,
        t1: T_ROOM,
        t2,
        t_env: T_ROOM,
    }
}

/// Resonance ratio ω₂/ω₁ of the aerogel host materials.
pub const AEROGEL_OMEGA_RATIO: f64 = 0.84;

/// Aerogel layers with hosts C₁ = 1, C₂ = 3, D₁ = D₂ = 0.5, ω₂/ω₁ = 0.84
/// and porosities `porosity1`, `porosity2`; T₂ = 600 K.
pub fn aerogel_study(substrate: &OscillatorModel, porosity1: f64, porosity2: f64, gap: f64) -> SystemConfig {
    let h1 = layer_model(1.0, OMEGA_1, 0.5);
    let h2 = layer_model(3.0, AEROGEL_OMEGA_RATIO * OMEGA_1, 0.5);
    SystemConfig {
        slab1: slab(
            Material::MaxwellGarnett {
                host: h1,
                porosity: porosity1,
            },
            substrate,
        ),
        slab2: slab(
            Material::MaxwellGarnett {
                host: h2,
                porosity: porosity2,
            },
            substrate,
        ),
        gap,
        t1: T_ROOM,
        t2: 600.0,
        t_env: T_ROOM,
    }
}

/// Separation of the resonance-tuning study, metres.
pub const DILUTION_STUDY_GAP: f64 = 300e-9;
/// Separation of the porosity study, metres.
pub const AEROGEL_STUDY_GAP: f64 = 200e-9;

/// The (dilution, ω₂/ω₁) pairs of the separation scans at T₂ = 600 K.
pub const SEPARATION_SCAN_CURVES: [(f64, f64); 3] = [(1.0, 1.1), (10.0, 1.05), (20.0, 1.03)];
