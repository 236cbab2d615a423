//! Fixtures shared by the criterion benchmarks.

use fluctoforce::presets;
use fluctoforce::{OscillatorModel, SystemConfig};

/// Silica-like substrate used only to give the benchmarks realistic work.
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

/// The diluted resonance-tuning configuration at separation `gap`.
pub fn diluted_pair(gap: f64) -> SystemConfig {
    presets::dilution_study(&substrate(), 10.0, 1.05, 600.0, gap)
}

/// The aerogel configuration at separation `gap`.
pub fn aerogel_pair(gap: f64) -> SystemConfig {
    presets::aerogel_study(&substrate(), 0.95, 0.95, gap)
}
