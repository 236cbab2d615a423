#![allow(dead_code)]

use fluctoforce::{presets, CasimirSolver, LayeredSlab, Material, OscillatorModel, SolverSettings, SystemConfig};

/// Silica-like substrate used throughout the tests.
pub fn substrate() -> OscillatorModel {
    OscillatorModel {
        strength: 1.93,
        resonance: 1.88e14,
        damping: 1e13,
        core_strength: 1.1,
        core_resonance: 2.04e16,
        core_damping: 1e15,
        dilution: 1.0,
    }
}

pub fn solver(rel_tol: f64) -> CasimirSolver {
    CasimirSolver::new(SolverSettings::with_rel_tol(rel_tol))
}

/// Resonance-tuning pair at dilution 20, ω₂/ω₁ = 1.05, T₂ = 600 K.
pub fn tuned_pair(gap: f64) -> SystemConfig {
    presets::dilution_study(&substrate(), 20.0, 1.05, 600.0, gap)
}

/// Half-space with an essentially frequency-independent ε = 1 + strength.
pub fn flat_half_space(strength: f64) -> LayeredSlab {
    LayeredSlab::half_space(Material::lorentz_drude(OscillatorModel {
        strength,
        resonance: 1e21,
        damping: 1e18,
        core_strength: 0.0,
        core_resonance: 1e22,
        core_damping: 1e19,
        dilution: 1.0,
    }))
}
