//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::PI;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use fluctoforce::constants::{C, HBAR, K_B};
use fluctoforce::{
    find_equilibria, maxwell_garnett, permittivity, presets, slab_reflection, CasimirSolver, FrequencyAxis,
    LayeredSlab, Material, OscillatorModel, Plate, Polarization, ScanOptions, SolverSettings, Stability, SystemConfig,
    TransverseWave,
};
use fluctoforce_cli::scenario::SubstrateFile;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn substrate_path() -> PathBuf {
    scenarios_dir()
        .join("substrate_silica_approx.toml")
        .canonicalize()
        .unwrap()
}

fn shipped_substrate() -> OscillatorModel {
    SubstrateFile::load(&substrate_path()).unwrap().model
}

fn solver(rel_tol: f64) -> CasimirSolver {
    CasimirSolver::new(SolverSettings::with_rel_tol(rel_tol))
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within_budget(started: Instant, budget: Duration, what: &str) -> Result<(), String> {
    let took = started.elapsed();
    if took <= budget {
        Ok(())
    } else {
        Err(format!("{what} took {took:.1?}, budget {budget:?}"))
    }
}

// 1. Analytic limits.

const ZETA_3: f64 = 1.202_056_903_159_594;

/// Half-space with ε ≈ `1 + strength` at every relevant frequency.
fn flat_half_space(strength: f64) -> LayeredSlab {
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

fn analytic_limits() -> Outcome {
    let m = flat_half_space(1e6 - 1.0);
    let s = solver(1e-6);

    let started = Instant::now();
    let a = 1e-6;
    let p = s.equilibrium_pressure(&m, &m, 1.0, a).map_err(|e| e.to_string())?.value;
    let ideal = -PI * PI * HBAR * C / (240.0 * a.powi(4));
    within_budget(started, Duration::from_secs(10), "zero-temperature limit")?;

    let started = Instant::now();
    let (a, t) = (20e-6, 300.0);
    let q = s.equilibrium_pressure(&m, &m, t, a).map_err(|e| e.to_string())?.value;
    let classical = -K_B * t * ZETA_3 / (8.0 * PI * a.powi(3));
    within_budget(started, Duration::from_secs(10), "classical limit")?;

    let (d1, d2) = (p / ideal - 1.0, q / classical - 1.0);
    check(
        d1.abs() < 0.05 && d2.abs() < 0.05,
        format!("ideal-mirror deviation {d1:+.2e}, classical deviation {d2:+.2e} (limit 5%)"),
    )
}

// 2. Property suite.

fn swapped(cfg: &SystemConfig) -> SystemConfig {
    SystemConfig {
        slab1: cfg.slab2,
        slab2: cfg.slab1,
        ..*cfg
    }
}

fn random_model(rng: &mut ChaCha8Rng) -> OscillatorModel {
    OscillatorModel {
        strength: rng.gen_range(0.0..5.0),
        resonance: 10f64.powf(rng.gen_range(12.0..15.0)),
        damping: 10f64.powf(rng.gen_range(10.0..13.0)),
        core_strength: rng.gen_range(0.0..2.0),
        core_resonance: 10f64.powf(rng.gen_range(15.5..16.5)),
        core_damping: 10f64.powf(rng.gen_range(13.0..15.0)),
        dilution: rng.gen_range(1.0..30.0),
    }
}

fn random_material(rng: &mut ChaCha8Rng) -> Material {
    let host = random_model(rng);
    if rng.gen_bool(0.5) {
        Material::lorentz_drude(host)
    } else {
        Material::MaxwellGarnett {
            host,
            porosity: rng.gen_range(0.0..1.0),
        }
    }
}

fn property_suite() -> Outcome {
    let started = Instant::now();
    let sub = shipped_substrate();
    let s = solver(1e-5);
    let configs = [
        presets::dilution_study(&sub, 20.0, 1.05, 600.0, 300e-9),
        presets::dilution_study(&sub, 1.0, 1.1, 150.0, 2e-6),
        presets::aerogel_study(&sub, 0.77, 0.8, 200e-9),
    ];
    let mut worst_antisym = 0.0f64;
    for cfg in &configs {
        let (t1, t2, a) = (cfg.t1, cfg.t2, cfg.gap);
        let fwd = s
            .nonequilibrium_parts(&cfg.slab1, &cfg.slab2, t1, t2, a)
            .map_err(|e| e.to_string())?;
        let hot = s
            .nonequilibrium_parts(&cfg.slab1, &cfg.slab2, t2, t1, a)
            .map_err(|e| e.to_string())?;
        let sw = swapped(cfg);
        let mirrored = s
            .nonequilibrium_parts(&sw.slab1, &sw.slab2, t1, t2, a)
            .map_err(|e| e.to_string())?;
        for other in [hot, mirrored] {
            for (x, y) in [(fwd.pw, other.pw), (fwd.ew, other.ew)] {
                let ratio = (x.value + y.value).abs() / (2.0 * (x.error + y.error)).max(f64::MIN_POSITIVE);
                worst_antisym = worst_antisym.max(ratio);
            }
        }
        let same = s
            .nonequilibrium_parts(&cfg.slab1, &cfg.slab2, t1, t1, a)
            .map_err(|e| e.to_string())?;
        if (same.pw.value, same.ew.value, same.distance_independent.value) != (0.0, 0.0, 0.0) {
            return Err(format!("non-equilibrium part at T1 = T2 is {same:?}"));
        }
    }
    if worst_antisym > 1.0 {
        return Err(format!(
            "antisymmetry residual {worst_antisym:.2} x twice the error estimate"
        ));
    }

    let mut worst_global = 0.0f64;
    for cfg in &configs {
        let cfg = SystemConfig { t2: 300.0, ..*cfg };
        let p_eq = s
            .equilibrium_pressure(&cfg.slab1, &cfg.slab2, 300.0, cfg.gap)
            .map_err(|e| e.to_string())?
            .value;
        for plate in [Plate::One, Plate::Two] {
            let p = s.plate_pressure(plate, &cfg).map_err(|e| e.to_string())?;
            worst_global = worst_global.max((p - p_eq).abs() / p_eq.abs());
        }
    }
    if worst_global > 1e-10 {
        return Err(format!("global equilibrium deviates by {worst_global:.2e} relative"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst_reflection = 0.0f64;
    let mut worst_passivity = 0.0f64;
    for _ in 0..4000 {
        let slab = LayeredSlab {
            layer: random_material(&mut rng),
            thickness: 10f64.powf(rng.gen_range(-9.0..-4.0)),
            substrate: random_material(&mut rng),
            outer_face_blackened: true,
        };
        let omega = 10f64.powf(rng.gen_range(11.0..16.5));
        let wave = TransverseWave::new(omega, rng.gen_range(0.0..1.0) * omega / C);
        for pol in Polarization::BOTH {
            match slab_reflection(&slab, pol, &wave, FrequencyAxis::Real) {
                Ok(r) => worst_reflection = worst_reflection.max(r.norm()),
                // Mixing singularities are reported, not silently mapped.
                Err(_) => continue,
            }
        }
        for m in [slab.layer, slab.substrate] {
            if let Ok(eps) = permittivity(&m, omega) {
                worst_passivity = worst_passivity.min(eps.im);
            }
        }
    }
    if worst_reflection > 1.0 + 1e-10 {
        return Err(format!("|r| reached {worst_reflection}"));
    }
    if worst_passivity < 0.0 {
        return Err(format!("Im eps reached {worst_passivity:e}"));
    }

    for _ in 0..200 {
        let eps = Complex64::new(rng.gen_range(-10.0..10.0), rng.gen_range(0.0..10.0));
        let empty = maxwell_garnett(eps, 1.0).map_err(|e| e.to_string())?;
        let solid = maxwell_garnett(eps, 0.0).map_err(|e| e.to_string())?;
        if empty != Complex64::new(1.0, 0.0) || solid != eps {
            return Err(format!("mixing limits fail at eps = {eps}: {empty}, {solid}"));
        }
    }
    within_budget(started, Duration::from_secs(120), "property suite")?;
    Ok(format!(
        "antisymmetry residual <= {worst_antisym:.2} x 2err, global equilibrium {worst_global:.1e}, max |r| {worst_reflection:.6}"
    ))
}

// 3. Brute-force oracle.

/// Root with non-negative imaginary part, non-negative real part on ties.
fn branch_sqrt(z: Complex64) -> Complex64 {
    let q = z.sqrt();
    if q.im < 0.0 || (q.im == 0.0 && q.re < 0.0) {
        -q
    } else {
        q
    }
}

fn interface(pol: Polarization, ea: Complex64, qa: Complex64, eb: Complex64, qb: Complex64) -> Complex64 {
    match pol {
        Polarization::N => (eb * qa - ea * qb) / (ea * qb + eb * qa),
        Polarization::M => (qa - qb) / (qa + qb),
    }
}

struct SlabOptics {
    eps_layer: Complex64,
    eps_sub: Complex64,
    thickness: f64,
}

impl SlabOptics {
    fn at(slab: &LayeredSlab, omega: f64) -> Self {
        Self {
            eps_layer: permittivity(&slab.layer, omega).unwrap(),
            eps_sub: permittivity(&slab.substrate, omega).unwrap(),
            thickness: slab.thickness,
        }
    }

    /// Reflection from vacuum for a wave with squared vacuum axial
    /// wavenumber `kz2` = k0² − k⊥².
    fn reflect(&self, pol: Polarization, k0: f64, kz2: f64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let kz = branch_sqrt(Complex64::new(kz2, 0.0));
        let k0sq = k0 * k0;
        let ql = branch_sqrt((self.eps_layer - 1.0) * k0sq + kz2);
        let qs = branch_sqrt((self.eps_sub - 1.0) * k0sq + kz2);
        let r1 = interface(pol, one, kz, self.eps_layer, ql);
        let r2 = interface(pol, self.eps_layer, ql, self.eps_sub, qs);
        let phase = (Complex64::i() * 2.0 * self.thickness * ql).exp();
        (r1 + r2 * phase) / (1.0 + r1 * r2 * phase)
    }
}

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

fn occupation(omega: f64, t: f64) -> f64 {
    1.0 / (HBAR * omega / (K_B * t)).exp_m1()
}

/// Spectral densities of the propagating and evanescent parts at `omega`
/// on fixed grids.
fn brute_force_spectra(cfg: &SystemConfig, omega: f64) -> (f64, f64) {
    let k0 = omega / C;
    let a = cfg.gap;
    let o1 = SlabOptics::at(&cfg.slab1, omega);
    let o2 = SlabOptics::at(&cfg.slab2, omega);
    let index = o1.eps_layer.norm().max(o2.eps_layer.norm()).sqrt();
    let dn = occupation(omega, cfg.t1) - occupation(omega, cfg.t2);

    // Propagating: k⊥ dk⊥ = −kz dkz turns the k⊥ integral into kz² over
    // [0, k0], uniform in kz.
    let phase = k0 * (a + o1.thickness.max(o2.thickness) * index);
    let n = 400 + (40.0 * phase).ceil() as usize;
    let kzs: Vec<f64> = (0..=n).map(|i| k0 * i as f64 / n as f64).collect();
    let mut pw = 0.0;
    for pol in Polarization::BOTH {
        let ys: Vec<f64> = kzs
            .iter()
            .map(|&kz| {
                // Grazing incidence: both amplitudes are -1 and the
                // integrand vanishes.
                if kz == 0.0 {
                    return 0.0;
                }
                let r1 = o1.reflect(pol, k0, kz * kz);
                let r2 = o2.reflect(pol, k0, kz * kz);
                let d = 1.0 - r1 * r2 * Complex64::from_polar(1.0, 2.0 * kz * a);
                kz * kz * (r2.norm_sqr() - r1.norm_sqr()) / d.norm_sqr()
            })
            .collect();
        pw += trapezoid(&kzs, &ys);
    }

    // Evanescent: κ = Im kz with k⊥ dk⊥ = κ dκ, log-spaced in κ.
    let (lo, hi) = ((1e-4 * k0).ln(), (24.0 / a).ln());
    let m = 3000;
    let us: Vec<f64> = (0..=m).map(|i| lo + (hi - lo) * i as f64 / m as f64).collect();
    let mut ew = 0.0;
    for pol in Polarization::BOTH {
        let ys: Vec<f64> = us
            .iter()
            .map(|&u| {
                let kappa = u.exp();
                let r1 = o1.reflect(pol, k0, -kappa * kappa);
                let r2 = o2.reflect(pol, k0, -kappa * kappa);
                let decay = (-2.0 * a * kappa).exp();
                let d = 1.0 - r1 * r2 * decay;
                kappa.powi(3) * decay * (r1.im * r2.re - r1.re * r2.im) / d.norm_sqr()
            })
            .collect();
        ew += trapezoid(&us, &ys);
    }
    (HBAR / (4.0 * PI * PI) * dn * pw, -HBAR / (2.0 * PI * PI) * dn * ew)
}

fn frequency_grid(t_max: f64) -> Vec<f64> {
    let top = 45.0 * K_B * t_max / HBAR;
    let (lo, hi) = (1e8f64.ln(), top.ln());
    let n = 6000;
    let mut grid: Vec<f64> = (0..=n).map(|i| (lo + (hi - lo) * i as f64 / n as f64).exp()).collect();
    // Dense linear window over both layer resonances and their surface modes,
    // with steps of a twentieth of the linewidth.
    let (w_lo, w_hi, step) = (0.9e13, 1.15e13, presets::DAMPING / 20.0);
    let m = ((w_hi - w_lo) / step) as usize;
    grid.extend((0..=m).map(|i| w_lo + step * i as f64));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

fn brute_force_oracle() -> Outcome {
    let started = Instant::now();
    let cfg = presets::dilution_study(&shipped_substrate(), 20.0, 1.05, 600.0, 300e-9);
    let grid = frequency_grid(cfg.t1.max(cfg.t2));
    let spectra: Vec<(f64, f64)> = grid.par_iter().map(|&w| brute_force_spectra(&cfg, w)).collect();
    let pw_ys: Vec<f64> = spectra.iter().map(|s| s.0).collect();
    let ew_ys: Vec<f64> = spectra.iter().map(|s| s.1).collect();
    let (pw_ref, ew_ref) = (trapezoid(&grid, &pw_ys), trapezoid(&grid, &ew_ys));

    let n = solver(1e-6)
        .nonequilibrium_parts(&cfg.slab1, &cfg.slab2, cfg.t1, cfg.t2, cfg.gap)
        .map_err(|e| e.to_string())?;
    within_budget(started, Duration::from_secs(600), "oracle comparison")?;
    let (dpw, dew) = (n.pw.value / pw_ref - 1.0, n.ew.value / ew_ref - 1.0);
    check(
        dpw.abs() < 5e-3 && dew.abs() < 5e-3,
        format!(
            "PW {:.6e} vs {pw_ref:.6e} ({dpw:+.1e}), EW {:.6e} vs {ew_ref:.6e} ({dew:+.1e}), limit 0.5%",
            n.pw.value, n.ew.value
        ),
    )
}

// 4. Separation scans.

fn separation_scans() -> Outcome {
    let started = Instant::now();
    let sub = shipped_substrate();
    let s = solver(1e-6);
    let scan = ScanOptions {
        points: 120,
        ..ScanOptions::over(1e-9, 6e-6)
    };

    let tau10 = presets::dilution_study(&sub, 10.0, 1.05, 600.0, 300e-9);
    let eq10 = find_equilibria(&s, &tau10, &scan).map_err(|e| e.to_string())?;
    let uep: Vec<f64> = eq10
        .iter()
        .filter(|p| p.stability == Stability::Unstable)
        .map(|p| p.separation)
        .collect();
    let sep: Vec<f64> = eq10
        .iter()
        .filter(|p| p.stability == Stability::Stable)
        .map(|p| p.separation)
        .collect();
    let ok10 = uep.iter().any(|a| (7e-9..=30e-9).contains(a)) && sep.iter().any(|a| (3e-6..=5e-6).contains(a));

    let tau20 = presets::dilution_study(&sub, 20.0, 1.03, 600.0, 300e-9);
    let eq20 = find_equilibria(&s, &tau20, &scan).map_err(|e| e.to_string())?;
    let small = s
        .total_inside_pressure(&tau20.with_gap(1e-9))
        .map_err(|e| e.to_string())?;
    let small = small.normalized().map_err(|e| e.to_string())?;
    let ok20 = eq20.len() == 1
        && eq20[0].stability == Stability::Stable
        && (2.3e-6..=4.3e-6).contains(&eq20[0].separation)
        && small < 0.0;
    within_budget(started, Duration::from_secs(1800), "separation scans")?;

    let list = |v: &[fluctoforce::EquilibriumPoint]| {
        v.iter()
            .map(|p| format!("{} {:.3e} m", p.stability.label(), p.separation))
            .collect::<Vec<_>>()
            .join(", ")
    };
    check(
        ok10 && ok20,
        format!(
            "tau=10: [{}]; tau=20: [{}], normalized at 1 nm {small:.3}",
            list(&eq10),
            list(&eq20)
        ),
    )
}

// 5. Porosity spot value.

fn porosity_spot_value() -> Outcome {
    let started = Instant::now();
    let cfg = presets::aerogel_study(&shipped_substrate(), 0.77, 0.8, 200e-9);
    let b = solver(1e-6).total_inside_pressure(&cfg).map_err(|e| e.to_string())?;
    within_budget(started, Duration::from_secs(300), "porosity spot value")?;
    let p = b.plate2_total;
    let target = 0.55e-3;
    check(
        p > 0.0 && p / target < 2.0 && p / target > 0.5,
        format!("plate-2 pressure {p:.4e} Pa, target {target:.2e} Pa within a factor of 2"),
    )
}

// 6. Short-distance scaling.

fn short_distance_scaling() -> Outcome {
    let started = Instant::now();
    let cfg = presets::dilution_study(&shipped_substrate(), 20.0, 1.05, 600.0, 300e-9);
    let s = solver(1e-6);
    let gaps = fluctoforce::analysis::log_grid(5e-9, 50e-9, 8);
    let mut ys = Vec::new();
    for &a in &gaps {
        let p1 = s
            .equilibrium_pressure(&cfg.slab1, &cfg.slab2, cfg.t1, a)
            .map_err(|e| e.to_string())?;
        let p2 = s
            .equilibrium_pressure(&cfg.slab1, &cfg.slab2, cfg.t2, a)
            .map_err(|e| e.to_string())?;
        ys.push(0.5 * (p1.value + p2.value));
    }
    within_budget(started, Duration::from_secs(600), "scaling fit")?;
    let lx: Vec<f64> = gaps.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    check(
        (slope + 3.0).abs() <= 0.2,
        format!("log-log slope {slope:.4}, target -3 +/- 0.2"),
    )
}

// 7. Porous-layer resonance.

fn porous_resonance() -> Outcome {
    let started = Instant::now();
    let host = presets::layer_model(1.0, presets::OMEGA_1, 0.5);
    let mut worst = 0.0f64;
    let mut found = Vec::new();
    for phi in [0.5, 0.8, 0.95] {
        let m = Material::MaxwellGarnett { host, porosity: phi };
        let im = |w: f64| permittivity(&m, w).unwrap().im;
        // Dense scan above the bare resonance, then golden-section polish.
        let (lo, hi) = (0.5 * host.resonance, 3.0 * host.resonance);
        let n = 200_000;
        let best = (0..=n)
            .map(|i| lo + (hi - lo) * i as f64 / n as f64)
            .max_by(|a, b| im(*a).total_cmp(&im(*b)))
            .unwrap();
        let h = (hi - lo) / n as f64;
        let (mut a, mut b) = (best - h, best + h);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let (c, d) = (b - g * (b - a), a + g * (b - a));
            if im(c) > im(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let peak = 0.5 * (a + b);
        let predicted = fluctoforce::aerogel_resonance(&host, phi);
        let dev = peak / predicted - 1.0;
        worst = worst.max(dev.abs());
        found.push(format!("phi={phi}: {peak:.5e} vs {predicted:.5e}"));
    }
    within_budget(started, Duration::from_secs(60), "resonance search")?;
    check(
        worst < 0.02,
        format!("{}; worst deviation {worst:.2e}", found.join(", ")),
    )
}

// 8. Determinism of the figure presets.

fn run_figure(scenario: &Path, out: &Path, threads: &str) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_fluctoforce"))
        .arg("reproduce-fig")
        .arg("--scenario")
        .arg(scenario)
        .arg("--out")
        .arg(out)
        .env("FLUCTOFORCE_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    if o.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&o.stderr).into_owned())
    }
}

fn directory_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut compared = 0;
    for (figure, points) in [(1, 3), (2, 4), (3, 3)] {
        let scenario = dir.path().join(format!("fig{figure}.toml"));
        fs::write(
            &scenario,
            format!(
                "name = \"fig{figure}\"\ncommand = \"reproduce-fig\"\nsubstrate_file = {:?}\n\n[figure]\nnumber = {figure}\npoints = {points}\nscan_points = 12\n",
                substrate_path()
            ),
        )
        .map_err(|e| e.to_string())?;
        let mut runs = Vec::new();
        for (i, threads) in ["1", "1", "2"].iter().enumerate() {
            let out = dir.path().join(format!("fig{figure}_run{i}"));
            run_figure(&scenario, &out, threads)?;
            runs.push(directory_contents(&out));
        }
        for other in &runs[1..] {
            if *other != runs[0] {
                return Err(format!("figure {figure} output differs between runs"));
            }
        }
        compared += runs[0].len();
    }
    Ok(format!(
        "{compared} files bit-identical across two 1-thread runs and a 2-thread run"
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("analytic limits", analytic_limits),
        ("property suite", property_suite),
        ("brute-force oracle", brute_force_oracle),
        ("separation scans", separation_scans),
        ("porosity spot value", porosity_spot_value),
        ("short-distance scaling", short_distance_scaling),
        ("porous-layer resonance", porous_resonance),
        ("determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let started = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>())));
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name}: {detail} [{secs:.1} s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail} [{secs:.1} s]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
