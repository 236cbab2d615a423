//! Fresnel and two-layer slab reflection amplitudes.
//!
//! Wave kinematics are carried as `k0² = ω²/c²` and `kz² = k0² − k⊥²`
//! rather than as (ω, k⊥) so that the axial wavenumber in any medium,
//! `q² = (ε − 1)k0² + kz²`, is formed without cancellation both near grazing
//! incidence and deep in the evanescent region. On the imaginary frequency
//! axis ω = iξ the same formulas hold with `k0² = −ξ²/c²`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::C;
use crate::materials::{Material, MaterialError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpticsError {
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error("degenerate reflection denominator ({0:e})")]
    DegenerateDenominator(f64),
    #[error("invalid wave: omega = {omega}, k_perp = {k_perp}")]
    InvalidWave { omega: f64, k_perp: f64 },
    #[error("invalid slab: {0}")]
    InvalidSlab(&'static str),
}

/// The two transverse polarizations of a planar interface. `M` is the
/// transverse-electric and `N` the transverse-magnetic wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    M,
    N,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::M, Polarization::N];

    #[inline]
    fn index(self) -> usize {
        match self {
            Polarization::M => 0,
            Polarization::N => 1,
        }
    }
}

/// Which frequency axis a reflection amplitude is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyAxis {
    Real,
    /// `omega` is read as ξ in ω = iξ.
    Imaginary,
}

/// A plane-wave component: angular frequency and transverse wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseWave {
    pub omega: f64,
    pub k_perp: f64,
}

impl TransverseWave {
    pub fn new(omega: f64, k_perp: f64) -> Self {
        Self { omega, k_perp }
    }

    fn validate(&self) -> Result<(), OpticsError> {
        if self.omega.is_finite() && self.omega >= 0.0 && self.k_perp.is_finite() && self.k_perp >= 0.0 {
            Ok(())
        } else {
            Err(OpticsError::InvalidWave {
                omega: self.omega,
                k_perp: self.k_perp,
            })
        }
    }

    pub fn is_propagating(&self) -> bool {
        self.k_perp < self.omega / C
    }

    pub fn is_evanescent(&self) -> bool {
        self.k_perp > self.omega / C
    }

    fn kinematics(&self, axis: FrequencyAxis) -> Kinematics {
        let k0 = self.omega / C;
        match axis {
            FrequencyAxis::Real => Kinematics {
                k0_sq: k0 * k0,
                kz_sq: (k0 - self.k_perp) * (k0 + self.k_perp),
            },
            FrequencyAxis::Imaginary => Kinematics {
                k0_sq: -k0 * k0,
                kz_sq: -(k0 * k0 + self.k_perp * self.k_perp),
            },
        }
    }
}

/// `k0²` and the vacuum `kz²` of a wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Kinematics {
    pub k0_sq: f64,
    pub kz_sq: f64,
}

impl Kinematics {
    /// Propagating wave parameterized by its (real) vacuum axial wavenumber.
    #[inline]
    pub fn propagating(k0: f64, kz: f64) -> Self {
        Self {
            k0_sq: k0 * k0,
            kz_sq: kz * kz,
        }
    }

    /// Evanescent wave parameterized by κ = Im kz.
    #[inline]
    pub fn evanescent(k0: f64, kappa: f64) -> Self {
        Self {
            k0_sq: k0 * k0,
            kz_sq: -kappa * kappa,
        }
    }

    #[inline]
    fn q(&self, eps: Complex64) -> Complex64 {
        decaying_sqrt((eps - 1.0) * self.k0_sq + self.kz_sq)
    }
}

/// Square root on the branch Im ≥ 0, with Re ≥ 0 on the real line.
#[inline]
pub fn decaying_sqrt(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        return if z.re >= 0.0 {
            Complex64::new(z.re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-z.re).sqrt())
        };
    }
    let s = z.sqrt();
    if s.im < 0.0 {
        -s
    } else {
        s
    }
}

/// Axial wavenumber q = sqrt(ε ω²/c² − k⊥²) in a medium of permittivity
/// `eps`, on the decaying branch. For ε = 1 this is the vacuum k_z.
pub fn axial_wavenumber(eps: Complex64, wave: &TransverseWave) -> Complex64 {
    wave.kinematics(FrequencyAxis::Real).q(eps)
}

#[inline]
fn check_denominator(den: Complex64) -> Result<(), OpticsError> {
    let n = den.norm();
    if n.is_finite() && n > f64::MIN_POSITIVE {
        Ok(())
    } else {
        Err(OpticsError::DegenerateDenominator(n))
    }
}

/// Fresnel amplitudes of the a→b interface given the axial wavenumbers in
/// both media. Returns `[M, N]`.
#[inline]
fn interface(
    eps_a: Complex64,
    eps_b: Complex64,
    q_a: Complex64,
    q_b: Complex64,
    k0_sq: f64,
) -> Result<[Complex64; 2], OpticsError> {
    if eps_a == eps_b {
        return Ok([Complex64::new(0.0, 0.0); 2]);
    }
    // q_a − q_b = (q_a² − q_b²)/(q_a + q_b) avoids cancellation when |k⊥| ≫ k0.
    let sum = q_a + q_b;
    let den_m = sum * sum;
    check_denominator(den_m)?;
    let r_m = (eps_a - eps_b) * k0_sq / den_m;
    let den_n = eps_a * q_b + eps_b * q_a;
    check_denominator(den_n)?;
    let r_n = (eps_b * q_a - eps_a * q_b) / den_n;
    Ok([r_m, r_n])
}

/// Fresnel reflection amplitude for a wave in medium `a` hitting medium `b`.
pub fn fresnel(
    pol: Polarization,
    eps_a: Complex64,
    eps_b: Complex64,
    wave: &TransverseWave,
) -> Result<Complex64, OpticsError> {
    wave.validate()?;
    let kin = wave.kinematics(FrequencyAxis::Real);
    let r = interface(eps_a, eps_b, kin.q(eps_a), kin.q(eps_b), kin.k0_sq)?;
    Ok(r[pol.index()])
}

/// A dielectric layer of finite thickness on a semi-infinite substrate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayeredSlab {
    pub layer: Material,
    /// Layer thickness δ in metres.
    pub thickness: f64,
    pub substrate: Material,
    /// Whether the outer face of the substrate is perfectly absorbing.
    #[serde(default = "default_blackened")]
    pub outer_face_blackened: bool,
}

fn default_blackened() -> bool {
    true
}

impl LayeredSlab {
    /// A homogeneous half-space of `material`.
    pub fn half_space(material: Material) -> Self {
        Self {
            layer: material,
            thickness: 0.0,
            substrate: material,
            outer_face_blackened: true,
        }
    }

    pub fn validate(&self) -> Result<(), OpticsError> {
        if !(self.thickness.is_finite() && self.thickness >= 0.0) {
            return Err(OpticsError::InvalidSlab("layer thickness must be >= 0"));
        }
        self.layer.validate()?;
        self.substrate.validate()?;
        Ok(())
    }

    pub fn is_vacuum(&self) -> bool {
        self.substrate.is_vacuum() && (self.layer.is_vacuum() || self.thickness == 0.0)
    }

    /// Permittivities frozen at one real frequency.
    #[inline]
    pub(crate) fn at_real(&self, omega: f64) -> Result<SlabResponse, OpticsError> {
        Ok(SlabResponse {
            eps_layer: self.layer.eps_unchecked(omega)?,
            eps_sub: self.substrate.eps_unchecked(omega)?,
            thickness: self.thickness,
        })
    }

    /// Permittivities frozen at one imaginary frequency ξ.
    #[inline]
    pub(crate) fn at_imag(&self, xi: f64) -> Result<SlabResponseImag, OpticsError> {
        Ok(SlabResponseImag {
            eps_layer: self.layer.eps_imag_unchecked(xi)?,
            eps_sub: self.substrate.eps_imag_unchecked(xi)?,
            thickness: self.thickness,
            xi_c_sq: (xi / C) * (xi / C),
        })
    }
}

/// A slab's permittivities at a fixed real frequency.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SlabResponse {
    pub eps_layer: Complex64,
    pub eps_sub: Complex64,
    pub thickness: f64,
}

impl SlabResponse {
    /// Reflection amplitudes `[M, N]` seen from the vacuum gap. `kz` must be
    /// the decaying square root of `kin.kz_sq`.
    #[inline]
    pub fn reflect(&self, kin: &Kinematics, kz: Complex64) -> Result<[Complex64; 2], OpticsError> {
        let one = Complex64::new(1.0, 0.0);
        let q_l = kin.q(self.eps_layer);
        let q_s = kin.q(self.eps_sub);
        let outer = interface(one, self.eps_layer, kz, q_l, kin.k0_sq)?;
        let inner = interface(self.eps_layer, self.eps_sub, q_l, q_s, kin.k0_sq)?;
        if self.thickness == 0.0 {
            return compose(outer, inner, one);
        }
        let arg = Complex64::new(0.0, 2.0 * self.thickness) * q_l;
        debug_assert!(arg.re <= 0.0);
        compose(outer, inner, arg.exp())
    }
}

#[inline]
fn compose(outer: [Complex64; 2], inner: [Complex64; 2], phase: Complex64) -> Result<[Complex64; 2], OpticsError> {
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for i in 0..2 {
        let t = inner[i] * phase;
        let den = 1.0 + outer[i] * t;
        check_denominator(den)?;
        out[i] = (outer[i] + t) / den;
    }
    Ok(out)
}

/// A slab's permittivities at a fixed imaginary frequency; all amplitudes
/// are real there.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SlabResponseImag {
    pub eps_layer: f64,
    pub eps_sub: f64,
    pub thickness: f64,
    pub xi_c_sq: f64,
}

impl SlabResponseImag {
    /// Reflection amplitudes `[M, N]` at vacuum decay constant
    /// κ = sqrt(ξ²/c² + k⊥²).
    #[inline]
    pub fn reflect(&self, kappa: f64) -> [f64; 2] {
        let kk = kappa * kappa;
        let q_l = ((self.eps_layer - 1.0) * self.xi_c_sq + kk).sqrt();
        let q_s = ((self.eps_sub - 1.0) * self.xi_c_sq + kk).sqrt();
        let outer = interface_imag(1.0, self.eps_layer, kappa, q_l, self.xi_c_sq);
        let inner = interface_imag(self.eps_layer, self.eps_sub, q_l, q_s, self.xi_c_sq);
        let t = if self.thickness == 0.0 {
            1.0
        } else {
            (-2.0 * self.thickness * q_l).exp()
        };
        let mut out = [0.0; 2];
        for i in 0..2 {
            let ti = inner[i] * t;
            out[i] = (outer[i] + ti) / (1.0 + outer[i] * ti);
        }
        out
    }
}

#[inline]
fn interface_imag(eps_a: f64, eps_b: f64, q_a: f64, q_b: f64, xi_c_sq: f64) -> [f64; 2] {
    if eps_a == eps_b {
        return [0.0, 0.0];
    }
    let sum = q_a + q_b;
    [
        (eps_a - eps_b) * xi_c_sq / (sum * sum),
        (eps_b * q_a - eps_a * q_b) / (eps_a * q_b + eps_b * q_a),
    ]
}

/// Reflection amplitude of `slab` seen from vacuum for polarization `pol`.
/// On [`FrequencyAxis::Imaginary`] the wave's `omega` is read as ξ and the
/// result is real.
pub fn slab_reflection(
    slab: &LayeredSlab,
    pol: Polarization,
    wave: &TransverseWave,
    axis: FrequencyAxis,
) -> Result<Complex64, OpticsError> {
    wave.validate()?;
    slab.validate()?;
    let kin = wave.kinematics(axis);
    let response = match axis {
        FrequencyAxis::Real => slab.at_real(wave.omega)?,
        FrequencyAxis::Imaginary => {
            let r = slab.at_imag(wave.omega)?;
            SlabResponse {
                eps_layer: r.eps_layer.into(),
                eps_sub: r.eps_sub.into(),
                thickness: r.thickness,
            }
        }
    };
    let kz = decaying_sqrt(kin.kz_sq.into());
    Ok(response.reflect(&kin, kz)?[pol.index()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::OscillatorModel;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn model(strength: f64, resonance: f64) -> OscillatorModel {
        OscillatorModel {
            strength,
            resonance,
            damping: 1e11,
            core_strength: 1.0,
            core_resonance: 1e16,
            core_damping: 5e14,
            dilution: 1.0,
        }
    }

    fn slab() -> LayeredSlab {
        LayeredSlab {
            layer: Material::lorentz_drude(model(3.0, 1e13)),
            thickness: 5e-6,
            substrate: Material::lorentz_drude(model(1.7, 1.9e14)),
            outer_face_blackened: true,
        }
    }

    #[test]
    fn vacuum_axial_wavenumber() {
        let one = c(1.0, 0.0);
        let w = TransverseWave::new(3.0 * C, 2.0);
        assert_relative_eq!(axial_wavenumber(one, &w).re, 5f64.sqrt(), max_relative = 1e-14);
        assert_eq!(axial_wavenumber(one, &w).im, 0.0);
        let w = TransverseWave::new(3.0 * C, 5.0);
        let q = axial_wavenumber(one, &w);
        assert_eq!(q.re, 0.0);
        assert_relative_eq!(q.im, 4.0, max_relative = 1e-14);
    }

    #[test]
    fn axial_wavenumber_in_dielectric() {
        let w = TransverseWave::new(C, 1.0);
        let q = axial_wavenumber(c(2.0, 0.0), &w);
        // oracle: principal complex root of 2 - 1
        let oracle = c(2.0 - 1.0, 0.0).sqrt();
        assert_relative_eq!(q.re, oracle.re, max_relative = 1e-14);
        assert_relative_eq!(q.re, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn no_contrast_no_reflection() {
        let w = TransverseWave::new(1e14, 1e5);
        for pol in Polarization::BOTH {
            assert_eq!(fresnel(pol, c(2.5, 0.3), c(2.5, 0.3), &w).unwrap(), c(0.0, 0.0));
        }
    }

    #[test]
    fn normal_incidence() {
        let w = TransverseWave::new(1e14, 0.0);
        let r_n = fresnel(Polarization::N, c(1.0, 0.0), c(4.0, 0.0), &w).unwrap();
        let r_m = fresnel(Polarization::M, c(1.0, 0.0), c(4.0, 0.0), &w).unwrap();
        assert_relative_eq!(r_n.re, 1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(r_m.re, -1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(r_n.norm(), r_m.norm(), max_relative = 1e-14);
    }

    #[test]
    fn zero_thickness_collapses_to_substrate() {
        let mut s = slab();
        s.thickness = 0.0;
        let w = TransverseWave::new(2e13, 3e4);
        let eps_sub = s.substrate.eps_unchecked(w.omega).unwrap();
        for pol in Polarization::BOTH {
            let r = slab_reflection(&s, pol, &w, FrequencyAxis::Real).unwrap();
            let direct = fresnel(pol, c(1.0, 0.0), eps_sub, &w).unwrap();
            assert!((r - direct).norm() < 1e-12 * direct.norm().max(1e-3), "{pol:?}");
        }
    }

    #[test]
    fn matched_layer_is_invisible() {
        let mut s = slab();
        s.layer = s.substrate;
        let w = TransverseWave::new(5e13, 1e5);
        let eps_sub = s.substrate.eps_unchecked(w.omega).unwrap();
        for pol in Polarization::BOTH {
            let r = slab_reflection(&s, pol, &w, FrequencyAxis::Real).unwrap();
            let direct = fresnel(pol, c(1.0, 0.0), eps_sub, &w).unwrap();
            assert!((r - direct).norm() < 1e-14);
        }
    }

    #[test]
    fn opaque_layer_hides_substrate() {
        // On resonance a 50 µm layer is strongly absorbing: Im q δ ≫ 1.
        let mut s = slab();
        s.thickness = 5e-5;
        let w = TransverseWave::new(1e13, 1e4);
        let eps_l = s.layer.eps_unchecked(w.omega).unwrap();
        let q_l = axial_wavenumber(eps_l, &w);
        let bound = (-2.0 * s.thickness * q_l.im).exp();
        assert!(bound < 1e-6);
        for pol in Polarization::BOTH {
            let r = slab_reflection(&s, pol, &w, FrequencyAxis::Real).unwrap();
            let bare = fresnel(pol, c(1.0, 0.0), eps_l, &w).unwrap();
            assert!((r - bare).norm() <= 2.0 * bound);
        }
    }

    #[test]
    fn imaginary_axis_fast_path_matches_generic() {
        let s = slab();
        for &(xi, k) in &[(0.0, 1e5), (2.5e14, 0.0), (2.5e14, 3e6), (1e16, 1e8), (5e13, 1e9)] {
            let w = TransverseWave::new(xi, k);
            let kappa = ((xi / C).powi(2) + k * k).sqrt();
            let fast = s.at_imag(xi).unwrap().reflect(kappa);
            for pol in Polarization::BOTH {
                let r = slab_reflection(&s, pol, &w, FrequencyAxis::Imaginary).unwrap();
                assert!(r.im.abs() <= 1e-12 * r.norm());
                assert!((r.re - fast[pol.index()]).abs() <= 1e-12 * r.norm().max(1e-300));
            }
        }
    }

    #[test]
    fn stable_m_amplitude_deep_evanescent() {
        // q ≈ ik⊥ when k⊥ ≫ k0, so r_M ≈ (ε_b − ε_a)k0²/(4k⊥²).
        let w = TransverseWave::new(1e13, 1e9);
        let r = fresnel(Polarization::M, c(1.0, 0.0), c(3.0, 0.5), &w).unwrap();
        let k0 = 1e13 / C;
        let approx = c(2.0, 0.5) * k0 * k0 / (4.0 * 1e18);
        assert!((r - approx).norm() < 1e-6 * approx.norm());
        assert!(r.norm() > 0.0);
    }

    #[test]
    fn rejects_invalid_wave() {
        let w = TransverseWave::new(-1.0, 0.0);
        assert!(fresnel(Polarization::N, c(1.0, 0.0), c(2.0, 0.0), &w).is_err());
        let w = TransverseWave::new(1.0, f64::NAN);
        assert!(slab_reflection(&slab(), Polarization::M, &w, FrequencyAxis::Real).is_err());
    }

    #[test]
    fn degenerate_denominator_reported() {
        // eps_b = -1 with q_a = q_b = i k: TM denominator vanishes exactly.
        let w = TransverseWave::new(0.0, 1.0);
        let r = fresnel(Polarization::N, c(1.0, 0.0), c(-1.0, 0.0), &w);
        assert!(matches!(r, Err(OpticsError::DegenerateDenominator(_))));
    }

    fn eps_strategy() -> impl Strategy<Value = Complex64> {
        (-20.0..40.0f64, 0.0..40.0f64).prop_map(|(re, im)| c(re, im))
    }

    proptest! {
        #[test]
        fn branch_is_decaying(eps in eps_strategy(), lw in 10.0..16.0f64, kf in 0.0..1e4f64) {
            let omega = 10f64.powf(lw);
            let w = TransverseWave::new(omega, kf * omega / C);
            let q = axial_wavenumber(eps, &w);
            prop_assert!(q.im >= 0.0);
            if q.im == 0.0 {
                prop_assert!(q.re >= 0.0);
            }
        }

        #[test]
        fn propagating_reflection_bounded(
            e1 in eps_strategy(), e2 in eps_strategy(),
            lw in 10.0..16.0f64, kf in 0.0..0.999f64, ld in -9.0..-4.0f64,
        ) {
            let omega = 10f64.powf(lw);
            let w = TransverseWave::new(omega, kf * omega / C);
            let resp = SlabResponse { eps_layer: e1, eps_sub: e2, thickness: 10f64.powf(ld) };
            let kin = w.kinematics(FrequencyAxis::Real);
            if let Ok(r) = resp.reflect(&kin, decaying_sqrt(kin.kz_sq.into())) {
                for v in r {
                    prop_assert!(v.norm() <= 1.0 + 1e-10);
                }
            }
        }

        #[test]
        fn fresnel_reciprocity(e1 in eps_strategy(), e2 in eps_strategy(), lw in 10.0..16.0f64, kf in 0.0..100.0f64) {
            let omega = 10f64.powf(lw);
            let w = TransverseWave::new(omega, kf * omega / C);
            for pol in Polarization::BOTH {
                if let (Ok(ab), Ok(ba)) = (fresnel(pol, e1, e2, &w), fresnel(pol, e2, e1, &w)) {
                    prop_assert!((ab + ba).norm() <= 1e-12 * ab.norm().max(1e-300));
                }
            }
        }

        #[test]
        fn normal_incidence_magnitudes_agree(e1 in eps_strategy(), e2 in eps_strategy()) {
            let w = TransverseWave::new(1e14, 0.0);
            if let (Ok(m), Ok(n)) = (fresnel(Polarization::M, e1, e2, &w), fresnel(Polarization::N, e1, e2, &w)) {
                prop_assert!((m.norm() - n.norm()).abs() <= 1e-10 * m.norm().max(1e-300));
            }
        }

        #[test]
        fn imaginary_axis_is_real(xi in 0.0..1e17f64, lk in 0.0..10.0f64) {
            let w = TransverseWave::new(xi, 10f64.powf(lk));
            for pol in Polarization::BOTH {
                let r = slab_reflection(&slab(), pol, &w, FrequencyAxis::Imaginary).unwrap();
                prop_assert!(r.im.abs() <= 1e-12 * r.norm());
            }
        }
    }
}
