//! Casimir pressure assembly.
//!
//! Sign convention: negative pressure is attraction between the slabs.
//!
//! The equilibrium part is the Lifshitz sum over Matsubara frequencies with
//! slab reflections continued to the imaginary axis. The non-equilibrium
//! part is a real-frequency double integral weighted by the difference of
//! Bose occupations, split into propagating (k⊥ < ω/c) and evanescent
//! (k⊥ > ω/c) waves. Propagating waves are integrated over the vacuum axial
//! wavenumber kz ∈ [0, ω/c] (k⊥ dk⊥ = −kz dkz), evanescent waves over
//! κ = Im kz on a logarithmic scale (k⊥ dk⊥ = κ dκ).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{radiation_pressure, thermal_frequency, C, HBAR, K_B};
use crate::materials::MaterialError;
use crate::optics::{Kinematics, LayeredSlab, OpticsError, SlabResponse};
use crate::quadrature::{
    integrate_vec, integrate_vec_controlled, Estimate, MatsubaraLadder, QuadratureError, QuadratureSpec, RelativeTo,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PressureError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("normalization failed: |mean equilibrium pressure| = {0:e} is below the floor")]
    ZeroNormalization(f64),
}

impl From<MaterialError> for PressureError {
    fn from(e: MaterialError) -> Self {
        PressureError::Optics(OpticsError::Material(e))
    }
}

impl PressureError {
    pub fn is_convergence_failure(&self) -> bool {
        matches!(self, PressureError::Quadrature(QuadratureError::NonConvergence { .. }))
    }
}

/// Mean occupation 1/(e^{ħω/k_BT} − 1) of a photon mode.
pub fn bose_occupation(omega: f64, temperature: f64) -> Result<f64, PressureError> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(PressureError::InvalidConfig(format!(
            "occupation needs omega > 0, got {omega}"
        )));
    }
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(PressureError::InvalidConfig(format!(
            "occupation needs T > 0, got {temperature}"
        )));
    }
    Ok(occupation(omega, temperature))
}

#[inline]
fn occupation(omega: f64, temperature: f64) -> f64 {
    1.0 / (HBAR * omega / (K_B * temperature)).exp_m1()
}

/// Two slabs across a vacuum gap, with their temperatures and that of the
/// environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub slab1: LayeredSlab,
    pub slab2: LayeredSlab,
    /// Gap width a in metres.
    pub gap: f64,
    /// Temperature of slab 1 in K.
    pub t1: f64,
    /// Temperature of slab 2 in K.
    pub t2: f64,
    /// Environment temperature in K.
    pub t_env: f64,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<(), PressureError> {
        self.slab1.validate()?;
        self.slab2.validate()?;
        if !(self.gap > 0.0 && self.gap.is_finite()) {
            return Err(PressureError::InvalidConfig(format!(
                "gap must be > 0, got {}",
                self.gap
            )));
        }
        for (name, t) in [("t1", self.t1), ("t2", self.t2), ("t_env", self.t_env)] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(PressureError::InvalidConfig(format!("{name} must be > 0, got {t}")));
            }
        }
        Ok(())
    }

    pub fn with_gap(mut self, gap: f64) -> Self {
        self.gap = gap;
        self
    }

    fn slab(&self, plate: Plate) -> &LayeredSlab {
        match plate {
            Plate::One => &self.slab1,
            Plate::Two => &self.slab2,
        }
    }

    fn temperature(&self, plate: Plate) -> f64 {
        match plate {
            Plate::One => self.t1,
            Plate::Two => self.t2,
        }
    }
}

/// Which of the two plates a per-plate quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plate {
    One,
    Two,
}

impl Plate {
    pub fn from_index(alpha: u8) -> Option<Plate> {
        match alpha {
            1 => Some(Plate::One),
            2 => Some(Plate::Two),
            _ => None,
        }
    }
}

/// All pressure components at one configuration, in Pa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PressureBreakdown {
    pub p_eq_t1: f64,
    pub p_eq_t2: f64,
    pub p_eq_avg: f64,
    pub dp_pw: f64,
    pub dp_ew: f64,
    /// Separation-independent part of the non-equilibrium correction. It is
    /// contained in `dp_pw` and not added again to the totals.
    pub distance_independent: f64,
    /// Black-body term 2σ(T₁⁴ + T₂⁴)/(3c) acting on the inner faces.
    pub sb_inside: f64,
    pub p_neq_total: f64,
    pub plate1_total: f64,
    pub plate2_total: f64,
    /// Combined quadrature and truncation error of the totals.
    pub error_estimate: f64,
}

impl PressureBreakdown {
    pub fn plate_total(&self, plate: Plate) -> f64 {
        match plate {
            Plate::One => self.plate1_total,
            Plate::Two => self.plate2_total,
        }
    }

    /// Plate pressure minus every separation-independent contribution.
    pub fn plate_distance_dependent(&self) -> f64 {
        self.p_eq_avg + self.dp_pw + self.dp_ew - self.distance_independent
    }

    /// `plate2_total / p_eq_avg`; negative values signal repulsion.
    pub fn normalized(&self) -> Result<f64, PressureError> {
        normalize(self.plate2_total, self.p_eq_avg)
    }

    /// Normalized plate-2 pressure without the separation-independent part.
    pub fn normalized_distance_dependent(&self) -> Result<f64, PressureError> {
        normalize(self.plate_distance_dependent(), self.p_eq_avg)
    }
}

/// Smallest |P̄_eq| accepted as a normalization.
pub const NORMALIZATION_FLOOR: f64 = 1e-250;

/// Absolute floor of the inner wavevector integrals relative to their
/// unit-contrast scale.
const NOISE_FLOOR: f64 = 1e-11;

/// Inner-integral error budget, relative to the solver tolerance times the
/// peak of the weighted unit-contrast integrand.
const TAIL_BUDGET: f64 = 1e-2;

/// Upper bound on the half-period panels of the propagating-wave integral.
const MAX_PHASE_PANELS: usize = 100_000;

fn normalize(numerator: f64, p_eq_avg: f64) -> Result<f64, PressureError> {
    if !(p_eq_avg.abs() > NORMALIZATION_FLOOR) {
        return Err(PressureError::ZeroNormalization(p_eq_avg.abs()));
    }
    Ok(numerator / p_eq_avg)
}

/// Non-equilibrium corrections, in Pa.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NonEquilibrium {
    pub pw: Estimate,
    pub ew: Estimate,
    pub distance_independent: Estimate,
}

/// Numerical knobs of the pressure solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSettings {
    /// Relative tolerance of each one-dimensional quadrature pass.
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Upper frequency limit in units of k_B·max(T₁, T₂)/ħ.
    pub omega_cutoff: f64,
    /// Lower frequency limit in units of k_B·min(T₁, T₂)/ħ.
    pub omega_floor: f64,
    /// Evanescent waves are dropped once 2aκ exceeds this.
    pub evanescent_cutoff: f64,
    /// Half-width, in linewidths, of the window split around each
    /// material resonance.
    pub resonance_window: f64,
    /// Relative tail tolerance of the Matsubara sum.
    pub matsubara_tail_tol: f64,
    pub max_matsubara_terms: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            max_subdivisions: 4000,
            omega_cutoff: 40.0,
            omega_floor: 1e-6,
            evanescent_cutoff: 46.0,
            resonance_window: 5.0,
            matsubara_tail_tol: 1e-6,
            max_matsubara_terms: 1_000_000,
        }
    }
}

impl SolverSettings {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            matsubara_tail_tol: rel_tol,
            ..Self::default()
        }
    }

    fn spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            rel_tol: self.rel_tol,
            abs_tol: 0.0,
            max_subdivisions: self.max_subdivisions,
            breakpoints: Vec::new(),
            relative_to: RelativeTo::Magnitude,
        }
    }
}

/// Which non-equilibrium terms to evaluate.
#[derive(Debug, Clone, Copy)]
struct Terms {
    gap: Option<f64>,
    distance_independent: bool,
}

/// Evaluates pressures between layered slabs.
#[derive(Debug, Clone, Default)]
pub struct CasimirSolver {
    pub settings: SolverSettings,
}

impl CasimirSolver {
    pub fn new(settings: SolverSettings) -> Self {
        Self { settings }
    }

    /// Lifshitz pressure between `slab1` and `slab2` in equilibrium at
    /// temperature `temperature` across a gap `gap`.
    pub fn equilibrium_pressure(
        &self,
        slab1: &LayeredSlab,
        slab2: &LayeredSlab,
        temperature: f64,
        gap: f64,
    ) -> Result<Estimate, PressureError> {
        slab1.validate()?;
        slab2.validate()?;
        check_gap(gap)?;
        let ladder = MatsubaraLadder::new(temperature)?;
        if slab1.is_vacuum() || slab2.is_vacuum() {
            return Ok(Estimate::default());
        }
        let kappa_hi = self.settings.evanescent_cutoff / (2.0 * gap);
        let kappa_floor = 1e-6 * largest_length(gap, slab1, slab2).recip();
        let mut spec = self.settings.spec();
        spec.relative_to = RelativeTo::Value;

        let sum = ladder.sum(
            self.settings.matsubara_tail_tol,
            self.settings.max_matsubara_terms,
            |xi| -> Result<Estimate, PressureError> {
                let kappa_lo = if xi == 0.0 { kappa_floor } else { xi / C };
                if kappa_lo >= kappa_hi {
                    return Ok(Estimate::default());
                }
                let r1 = slab1.at_imag(xi)?;
                let r2 = slab2.at_imag(xi)?;
                let (u_lo, u_hi) = (kappa_lo.ln(), kappa_hi.ln());
                spec.breakpoints = log_breakpoints(
                    [1.0 / (2.0 * gap), thickness_scale(slab1), thickness_scale(slab2)],
                    u_lo,
                    u_hi,
                );
                let est = integrate_vec::<1, PressureError, _>(
                    |u| {
                        let kappa = u.exp();
                        let decay = (-2.0 * kappa * gap).exp();
                        let a = r1.reflect(kappa);
                        let b = r2.reflect(kappa);
                        let mut s = 0.0;
                        for p in 0..2 {
                            let x = a[p] * b[p] * decay;
                            s += x / (1.0 - x);
                        }
                        Ok([kappa * kappa * kappa * s])
                    },
                    u_lo,
                    u_hi,
                    &spec,
                )?;
                Ok(Estimate {
                    value: est.value[0],
                    error: est.error[0],
                })
            },
        )?;
        let prefactor = -K_B * temperature / PI;
        Ok(Estimate {
            value: prefactor * sum.value,
            error: prefactor.abs() * sum.error,
        })
    }

    /// Propagating-wave non-equilibrium correction.
    pub fn delta_pneq_pw(
        &self,
        slab1: &LayeredSlab,
        slab2: &LayeredSlab,
        t1: f64,
        t2: f64,
        gap: f64,
    ) -> Result<Estimate, PressureError> {
        check_gap(gap)?;
        Ok(self
            .nonequilibrium(
                slab1,
                slab2,
                t1,
                t2,
                Terms {
                    gap: Some(gap),
                    distance_independent: false,
                },
            )?
            .pw)
    }

    /// Evanescent-wave non-equilibrium correction.
    pub fn delta_pneq_ew(
        &self,
        slab1: &LayeredSlab,
        slab2: &LayeredSlab,
        t1: f64,
        t2: f64,
        gap: f64,
    ) -> Result<Estimate, PressureError> {
        check_gap(gap)?;
        Ok(self
            .nonequilibrium(
                slab1,
                slab2,
                t1,
                t2,
                Terms {
                    gap: Some(gap),
                    distance_independent: false,
                },
            )?
            .ew)
    }

    /// Limit of the propagating-wave correction for an infinitely wide gap,
    /// obtained by averaging 1/|1 − ρe^{iθ}|² over the cavity phase θ.
    pub fn distance_independent_part(
        &self,
        slab1: &LayeredSlab,
        slab2: &LayeredSlab,
        t1: f64,
        t2: f64,
    ) -> Result<Estimate, PressureError> {
        Ok(self
            .nonequilibrium(
                slab1,
                slab2,
                t1,
                t2,
                Terms {
                    gap: None,
                    distance_independent: true,
                },
            )?
            .distance_independent)
    }

    /// All three non-equilibrium corrections on one frequency mesh.
    pub fn nonequilibrium_parts(
        &self,
        slab1: &LayeredSlab,
        slab2: &LayeredSlab,
        t1: f64,
        t2: f64,
        gap: f64,
    ) -> Result<NonEquilibrium, PressureError> {
        check_gap(gap)?;
        self.nonequilibrium(
            slab1,
            slab2,
            t1,
            t2,
            Terms {
                gap: Some(gap),
                distance_independent: true,
            },
        )
    }

    fn nonequilibrium(
        &self,
        slab1: &LayeredSlab,
        slab2: &LayeredSlab,
        t1: f64,
        t2: f64,
        terms: Terms,
    ) -> Result<NonEquilibrium, PressureError> {
        slab1.validate()?;
        slab2.validate()?;
        for t in [t1, t2] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(PressureError::InvalidConfig(format!(
                    "temperature must be > 0, got {t}"
                )));
            }
        }
        if t1 == t2 {
            return Ok(NonEquilibrium::default());
        }
        let st = &self.settings;
        let omega_lo = st.omega_floor * thermal_frequency(t1.min(t2));
        let omega_hi = st.omega_cutoff * thermal_frequency(t1.max(t2));
        let (u_lo, u_hi) = (omega_lo.ln(), omega_hi.ln());

        let mut marks = Vec::new();
        for slab in [slab1, slab2] {
            for material in [&slab.layer, &slab.substrate] {
                for f in material.spectral_features() {
                    let w = st.resonance_window * f.width;
                    marks.extend([f.omega - w, f.omega, f.omega + w]);
                }
            }
        }
        marks.extend([thermal_frequency(t1), thermal_frequency(t2)]);
        let mut outer = st.spec();
        outer.breakpoints = log_breakpoints(marks, u_lo, u_hi);

        // Inner integrals only need to be accurate relative to the peak of
        // the weighted outer integrand; far in the Bose tails this keeps the
        // oscillatory wide-gap integrands cheap.
        let weight = |omega: f64| omega * (occupation(omega, t1) - occupation(omega, t2)).abs();
        let peak = (0..=400)
            .map(|i| (u_lo + (u_hi - u_lo) * i as f64 / 400.0).exp())
            .map(|w| (weight(w), weight(w) * (w / C).powi(3) / 3.0))
            .fold((0.0f64, 0.0f64), |acc, x| (acc.0.max(x.0), acc.1.max(x.1)));
        let budget = TAIL_BUDGET * st.rel_tol;
        let kernel = FrequencyKernel {
            slab1,
            slab2,
            terms,
            inner: st.spec(),
            evanescent_cutoff: st.evanescent_cutoff,
            pw_budget: budget * peak.1,
            ew_budget: budget * peak.0 * terms.gap.map_or(0.0, |a| 0.25 / a.powi(3)),
        };
        let mut integrand = |u: f64| -> Result<[f64; 5], PressureError> {
            let omega = u.exp();
            let dn = occupation(omega, t1) - occupation(omega, t2);
            if dn == 0.0 {
                return Ok([0.0; 5]);
            }
            let k = kernel.evaluate(omega, weight(omega))?;
            let w = omega * dn;
            let wa = omega * dn.abs();
            Ok([
                w * k.pw.value,
                w * k.di.value,
                w * k.ew.value,
                wa * (k.pw.error + k.di.error),
                wa * k.ew.error,
            ])
        };
        let sliver = integrand(u_lo)?;
        let est = integrate_vec_controlled::<5, PressureError, _>(&mut integrand, u_lo, u_hi, &outer, 3)?;

        let pw_pref = HBAR / (4.0 * PI * PI);
        let ew_pref = -HBAR / (2.0 * PI * PI);
        let pw = Estimate {
            value: pw_pref * est.value[0],
            error: pw_pref * (est.error[0] + est.value[3].abs() + sliver[0].abs()),
        };
        let distance_independent = Estimate {
            value: pw_pref * est.value[1],
            error: pw_pref * (est.error[1] + est.value[3].abs() + sliver[1].abs()),
        };
        let ew = Estimate {
            value: ew_pref * est.value[2],
            error: ew_pref.abs() * (est.error[2] + est.value[4].abs() + sliver[2].abs()),
        };
        Ok(NonEquilibrium {
            pw,
            ew,
            distance_independent,
        })
    }

    /// Full breakdown of the pressure acting on the inner faces and on each
    /// plate.
    pub fn total_inside_pressure(&self, config: &SystemConfig) -> Result<PressureBreakdown, PressureError> {
        config.validate()?;
        let (s1, s2, a) = (&config.slab1, &config.slab2, config.gap);
        let eq1 = self.equilibrium_pressure(s1, s2, config.t1, a)?;
        let eq2 = if config.t2 == config.t1 {
            eq1
        } else {
            self.equilibrium_pressure(s1, s2, config.t2, a)?
        };
        let neq = self.nonequilibrium_parts(s1, s2, config.t1, config.t2, a)?;
        Ok(assemble(config, eq1, eq2, &neq))
    }

    /// Net pressure on plate `plate` when its outer face is black and sees
    /// an environment at `t_env`.
    pub fn plate_pressure(&self, plate: Plate, config: &SystemConfig) -> Result<f64, PressureError> {
        check_blackened(config, plate)?;
        Ok(self.total_inside_pressure(config)?.plate_total(plate))
    }

    /// Plate-2 pressure normalized by the mean equilibrium pressure.
    pub fn normalized_pressure(&self, config: &SystemConfig) -> Result<f64, PressureError> {
        check_blackened(config, Plate::Two)?;
        self.total_inside_pressure(config)?.normalized()
    }
}

fn check_blackened(config: &SystemConfig, plate: Plate) -> Result<(), PressureError> {
    if config.slab(plate).outer_face_blackened {
        Ok(())
    } else {
        Err(PressureError::Unsupported(format!(
            "plate {plate:?} has a reflective outer face; only blackened faces are modelled"
        )))
    }
}

/// Combines the component integrals into a [`PressureBreakdown`].
pub fn assemble(config: &SystemConfig, eq1: Estimate, eq2: Estimate, neq: &NonEquilibrium) -> PressureBreakdown {
    let p_eq_avg = 0.5 * (eq1.value + eq2.value);
    let rad1 = radiation_pressure(config.t1);
    let rad2 = radiation_pressure(config.t2);
    let rad_env = radiation_pressure(config.t_env);
    let sb_inside = rad1 + rad2;
    let p_neq_total = p_eq_avg + neq.pw.value + neq.ew.value + sb_inside;
    let fluctuation = p_eq_avg + neq.pw.value + neq.ew.value;
    // Constant radiation terms are grouped first so they cancel exactly in
    // global equilibrium.
    let plate = |own: f64| fluctuation + ((rad1 + rad2) - (radiation_pressure(own) + rad_env));
    PressureBreakdown {
        p_eq_t1: eq1.value,
        p_eq_t2: eq2.value,
        p_eq_avg,
        dp_pw: neq.pw.value,
        dp_ew: neq.ew.value,
        distance_independent: neq.distance_independent.value,
        sb_inside,
        p_neq_total,
        plate1_total: plate(config.temperature(Plate::One)),
        plate2_total: plate(config.temperature(Plate::Two)),
        error_estimate: 0.5 * (eq1.error + eq2.error) + neq.pw.error + neq.ew.error,
    }
}

fn check_gap(gap: f64) -> Result<(), PressureError> {
    if gap > 0.0 && gap.is_finite() {
        Ok(())
    } else {
        Err(PressureError::InvalidConfig(format!("gap must be > 0, got {gap}")))
    }
}

fn thickness_scale(slab: &LayeredSlab) -> f64 {
    if slab.thickness > 0.0 {
        1.0 / slab.thickness
    } else {
        f64::NAN
    }
}

fn largest_length(gap: f64, slab1: &LayeredSlab, slab2: &LayeredSlab) -> f64 {
    let mut l = gap;
    for s in [slab1, slab2] {
        if s.thickness > 0.0 {
            l = l.max(s.thickness);
        }
    }
    l
}

/// Natural logs of the finite positive `points` strictly inside (lo, hi),
/// sorted and deduplicated.
fn log_breakpoints(points: impl IntoIterator<Item = f64>, lo: f64, hi: f64) -> Vec<f64> {
    let mut out: Vec<f64> = points
        .into_iter()
        .filter(|p| p.is_finite() && *p > 0.0)
        .map(f64::ln)
        .filter(|u| *u > lo && *u < hi)
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Inner wavenumber integrals at fixed real frequency.
struct FrequencyKernel<'a> {
    slab1: &'a LayeredSlab,
    slab2: &'a LayeredSlab,
    terms: Terms,
    inner: QuadratureSpec,
    evanescent_cutoff: f64,
    /// Absolute error allowed in ω|Δn|·(inner integral), per integral.
    pw_budget: f64,
    ew_budget: f64,
}

struct KernelValue {
    pw: Estimate,
    di: Estimate,
    ew: Estimate,
}

impl FrequencyKernel<'_> {
    fn evaluate(&self, omega: f64, weight: f64) -> Result<KernelValue, PressureError> {
        let s1 = self.slab1.at_real(omega)?;
        let s2 = self.slab2.at_real(omega)?;
        let k0 = omega / C;
        let (pw, di) = self.propagating(&s1, &s2, k0, self.pw_budget / weight)?;
        let ew = match self.terms.gap {
            Some(gap) => self.evanescent(&s1, &s2, k0, gap, self.ew_budget / weight)?,
            None => Estimate::default(),
        };
        Ok(KernelValue { pw, di, ew })
    }

    /// ∫₀^{k0} dkz kz² Σ_P (|r₂|² − |r₁|²) · {1/|D_P|², 1/(1 − |r₁r₂|²)}.
    fn propagating(
        &self,
        s1: &SlabResponse,
        s2: &SlabResponse,
        k0: f64,
        abs_tol: f64,
    ) -> Result<(Estimate, Estimate), PressureError> {
        let gap = self.terms.gap;
        let want_di = self.terms.distance_independent;
        // Panels sized to the fastest phase: gap round trip plus layer
        // round trips.
        let mut phase = 2.0 * k0 * gap.unwrap_or(0.0);
        for s in [s1, s2] {
            phase += 2.0 * k0 * s.thickness * s.eps_layer.norm().sqrt();
        }
        let panels = ((phase / PI).ceil() as usize).clamp(1, MAX_PHASE_PANELS);
        let mut spec = self.inner.clone();
        spec.max_subdivisions = spec.max_subdivisions.max(4 * panels);
        // Reflectivity contrasts below ~1e-11 are rounding noise once the
        // layers are optically thin; k0³/3 is the integral at unit contrast.
        spec.abs_tol = abs_tol.max(NOISE_FLOOR * k0 * k0 * k0);
        spec.breakpoints = (1..panels).map(|i| k0 * i as f64 / panels as f64).collect();
        let est = integrate_vec::<2, PressureError, _>(
            |kz| {
                let kin = Kinematics::propagating(k0, kz);
                let kzc = Complex64::new(kz, 0.0);
                let r1 = s1.reflect(&kin, kzc)?;
                let r2 = s2.reflect(&kin, kzc)?;
                let phase = gap.map(|a| Complex64::from_polar(1.0, 2.0 * kz * a));
                let mut pw = 0.0;
                let mut di = 0.0;
                for p in 0..2 {
                    let contrast = r2[p].norm_sqr() - r1[p].norm_sqr();
                    if contrast == 0.0 {
                        continue;
                    }
                    let prod = r1[p] * r2[p];
                    if let Some(ph) = phase {
                        pw += contrast / (1.0 - prod * ph).norm_sqr();
                    }
                    if want_di {
                        di += contrast / (1.0 - prod.norm_sqr());
                    }
                }
                let w = kz * kz;
                Ok([w * pw, w * di])
            },
            0.0,
            k0,
            &spec,
        )?;
        Ok((
            Estimate {
                value: est.value[0],
                error: est.error[0],
            },
            Estimate {
                value: est.value[1],
                error: est.error[1],
            },
        ))
    }

    /// ∫₀^∞ dκ κ² e^{−2aκ} Σ_P (Im r₁ Re r₂ − Re r₁ Im r₂)/|D_P|², in ln κ.
    fn evanescent(
        &self,
        s1: &SlabResponse,
        s2: &SlabResponse,
        k0: f64,
        gap: f64,
        abs_tol: f64,
    ) -> Result<Estimate, PressureError> {
        let kappa_hi = self.evanescent_cutoff / (2.0 * gap);
        let mut scales = vec![k0, 1.0 / (2.0 * gap)];
        for s in [s1, s2] {
            if s.thickness > 0.0 {
                scales.push(1.0 / s.thickness);
            }
            scales.push(k0 * (s.eps_layer - 1.0).norm().sqrt());
            scales.push(k0 * (s.eps_sub - 1.0).norm().sqrt());
        }
        let smallest = scales
            .iter()
            .copied()
            .filter(|x| *x > 0.0)
            .fold(f64::INFINITY, f64::min);
        let kappa_lo = 1e-6 * smallest;
        if !(kappa_lo < kappa_hi) {
            return Ok(Estimate::default());
        }
        let (u_lo, u_hi) = (kappa_lo.ln(), kappa_hi.ln());
        let mut spec = self.inner.clone();
        spec.abs_tol = abs_tol.max(NOISE_FLOOR / (4.0 * gap * gap * gap));
        spec.breakpoints = log_breakpoints(scales, u_lo, u_hi);
        let est = integrate_vec::<1, PressureError, _>(
            |u| {
                let kappa = u.exp();
                let kin = Kinematics::evanescent(k0, kappa);
                let kz = Complex64::new(0.0, kappa);
                let r1 = s1.reflect(&kin, kz)?;
                let r2 = s2.reflect(&kin, kz)?;
                let decay = (-2.0 * kappa * gap).exp();
                let mut s = 0.0;
                for p in 0..2 {
                    let cross = r1[p].im * r2[p].re - r1[p].re * r2[p].im;
                    if cross == 0.0 {
                        continue;
                    }
                    s += cross / (1.0 - r1[p] * r2[p] * decay).norm_sqr();
                }
                Ok([kappa * kappa * kappa * decay * s])
            },
            u_lo,
            u_hi,
            &spec,
        )?;
        Ok(Estimate {
            value: est.value[0],
            error: est.error[0],
        })
    }
}
