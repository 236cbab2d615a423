//! Casimir–Lifshitz pressures between two layered dielectric slabs held at
//! different temperatures.
//!
//! The crate is organised bottom-up:
//!
//! * [`materials`]: Lorentz–Drude and Maxwell–Garnett permittivities.
//! * [`optics`]: Fresnel and two-layer slab reflection amplitudes.
//! * [`quadrature`]: adaptive Gauss–Kronrod integration and Matsubara sums.
//! * [`pressure`]: equilibrium and non-equilibrium pressure components.
//! * [`analysis`]: equilibrium-separation search and parameter sweeps.
//! * [`presets`]: the dilution, resonance-tuning and aerogel configurations.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod constants;
pub mod materials;
pub mod optics;
pub mod presets;
pub mod pressure;
pub mod quadrature;

pub use analysis::{find_equilibria, sweep, EquilibriumPoint, ScanOptions, Stability, SweepAxis, SweepResult};
pub use constants::PhysicalConstants;
pub use materials::{
    aerogel_resonance, maxwell_garnett, permittivity, permittivity_imag_axis, Material, OscillatorModel,
};
pub use optics::{
    axial_wavenumber, fresnel, slab_reflection, FrequencyAxis, LayeredSlab, Polarization, TransverseWave,
};
pub use pressure::{
    bose_occupation, CasimirSolver, NonEquilibrium, Plate, PressureBreakdown, PressureError, SolverSettings,
    SystemConfig,
};
pub use quadrature::{
    integrate_adaptive, integrate_semi_infinite, matsubara_frequencies, Estimate, MatsubaraLadder, QuadratureError,
    QuadratureSpec,
};
