//! CODATA 2018 physical constants (SI).

use serde::{Deserialize, Serialize};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Stefan–Boltzmann constant, W·m⁻²·K⁻⁴.
pub const SIGMA_SB: f64 = 5.670_374_419e-8;

/// The constant set used throughout the solver, bundled for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub k_b: f64,
    pub sigma_sb: f64,
}

impl PhysicalConstants {
    pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
        hbar: HBAR,
        c: C,
        k_b: K_B,
        sigma_sb: SIGMA_SB,
    };
}

/// Thermal angular frequency k_B T / ħ in rad/s.
#[inline]
pub fn thermal_frequency(temperature: f64) -> f64 {
    K_B * temperature / HBAR
}

/// Black-body radiation pressure 2σT⁴/(3c) exerted by one black face at `temperature`.
#[inline]
pub fn radiation_pressure(temperature: f64) -> f64 {
    2.0 * SIGMA_SB / (3.0 * C) * temperature.powi(4)
}
