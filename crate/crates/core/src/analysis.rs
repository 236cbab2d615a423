//! Zero-force separations and one-parameter sweeps.
//!
//! Pressures here follow the solver convention (negative = attraction), so
//! a crossing where the plate pressure goes from repulsive to attractive
//! with growing separation is restoring.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::materials::Material;
use crate::pressure::{CasimirSolver, Plate, PressureBreakdown, PressureError, SystemConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
}

impl Stability {
    /// Label used in the figures: SEP or UEP.
    pub fn label(self) -> &'static str {
        match self {
            Stability::Stable => "SEP",
            Stability::Unstable => "UEP",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPoint {
    /// Separation in m.
    pub separation: f64,
    pub stability: Stability,
    /// dP/da across the final bracket, Pa/m.
    pub pressure_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanOptions {
    pub a_min: f64,
    pub a_max: f64,
    /// Number of log-spaced grid points, end points included.
    pub points: usize,
    /// Relative width of the bracket at which bisection stops.
    pub rel_tol: f64,
    pub plate: Plate,
    /// Keep the separation-independent part in the scanned pressure.
    pub include_constant: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            a_min: 1e-9,
            a_max: 50e-6,
            points: 200,
            rel_tol: 1e-4,
            plate: Plate::Two,
            include_constant: true,
        }
    }
}

impl ScanOptions {
    pub fn over(a_min: f64, a_max: f64) -> Self {
        Self {
            a_min,
            a_max,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), PressureError> {
        if !(self.a_min > 0.0 && self.a_min < self.a_max && self.a_max.is_finite()) {
            return Err(PressureError::InvalidConfig(format!(
                "scan range must satisfy 0 < a_min < a_max, got [{}, {}]",
                self.a_min, self.a_max
            )));
        }
        if self.points < 2 {
            return Err(PressureError::InvalidConfig("scan needs at least 2 points".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(PressureError::InvalidConfig(format!(
                "bisection tolerance must be in (0, 1), got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

/// `points` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (u0, u1) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| match i {
            0 => lo,
            _ if i == points - 1 => hi,
            _ => (u0 + (u1 - u0) * i as f64 / (points - 1) as f64).exp(),
        })
        .collect()
}

fn scanned_pressure(
    solver: &CasimirSolver,
    template: &SystemConfig,
    opts: &ScanOptions,
    gap: f64,
) -> Result<f64, PressureError> {
    let b = solver.total_inside_pressure(&template.with_gap(gap))?;
    let p = b.plate_total(opts.plate);
    Ok(if opts.include_constant {
        p
    } else {
        p - b.distance_independent
    })
}

/// Locates every sign change of the plate pressure on a log grid and
/// refines it by bisection in ln a. Points come back sorted by separation.
pub fn find_equilibria(
    solver: &CasimirSolver,
    template: &SystemConfig,
    opts: &ScanOptions,
) -> Result<Vec<EquilibriumPoint>, PressureError> {
    opts.validate()?;
    template.with_gap(opts.a_min).validate()?;
    let grid = log_grid(opts.a_min, opts.a_max, opts.points);
    let values = grid
        .par_iter()
        .map(|&a| scanned_pressure(solver, template, opts, a))
        .collect::<Result<Vec<_>, _>>()?;

    let brackets: Vec<_> = (0..grid.len() - 1)
        .filter(|&i| crosses(values[i], values[i + 1]))
        .map(|i| (grid[i], values[i], grid[i + 1], values[i + 1]))
        .collect();

    brackets
        .par_iter()
        .map(|&(lo, p_lo, hi, p_hi)| refine(solver, template, opts, lo, p_lo, hi, p_hi))
        .collect()
}

fn crosses(a: f64, b: f64) -> bool {
    (a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0)
}

fn refine(
    solver: &CasimirSolver,
    template: &SystemConfig,
    opts: &ScanOptions,
    mut lo: f64,
    mut p_lo: f64,
    mut hi: f64,
    mut p_hi: f64,
) -> Result<EquilibriumPoint, PressureError> {
    let stability = if p_lo > 0.0 || p_hi < 0.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    };
    while hi / lo - 1.0 > opts.rel_tol {
        let mid = (lo * hi).sqrt();
        let p_mid = scanned_pressure(solver, template, opts, mid)?;
        if p_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if crosses(p_lo, p_mid) {
            hi = mid;
            p_hi = p_mid;
        } else {
            lo = mid;
            p_lo = p_mid;
        }
    }
    let pressure_slope = if hi > lo { (p_hi - p_lo) / (hi - lo) } else { 0.0 };
    Ok(EquilibriumPoint {
        separation: (lo * hi).sqrt(),
        stability,
        pressure_slope,
    })
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Layer resonance of slab 2 in units of the slab-1 layer resonance.
    OmegaRatio,
    /// Dilution τ of both layers; substrates are left alone.
    Dilution,
    Porosity1,
    Porosity2,
    /// Gap width in m.
    Separation,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 5] = [
        SweepAxis::OmegaRatio,
        SweepAxis::Dilution,
        SweepAxis::Porosity1,
        SweepAxis::Porosity2,
        SweepAxis::Separation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::OmegaRatio => "omega_ratio",
            SweepAxis::Dilution => "dilution",
            SweepAxis::Porosity1 => "porosity_1",
            SweepAxis::Porosity2 => "porosity_2",
            SweepAxis::Separation => "separation",
        }
    }

    /// The template with this parameter set to `value`.
    pub fn apply(self, template: &SystemConfig, value: f64) -> Result<SystemConfig, PressureError> {
        let mut cfg = *template;
        match self {
            SweepAxis::Separation => cfg.gap = value,
            SweepAxis::OmegaRatio => {
                let w1 = layer_oscillator(&cfg.slab1.layer, 1)?.resonance;
                let m2 = cfg.slab2.layer.oscillator_mut().ok_or_else(|| no_oscillator(2))?;
                m2.resonance = value * w1;
            }
            SweepAxis::Dilution => {
                for (i, layer) in [&mut cfg.slab1.layer, &mut cfg.slab2.layer].into_iter().enumerate() {
                    layer.oscillator_mut().ok_or_else(|| no_oscillator(i + 1))?.dilution = value;
                }
            }
            SweepAxis::Porosity1 => set_porosity(&mut cfg.slab1.layer, 1, value)?,
            SweepAxis::Porosity2 => set_porosity(&mut cfg.slab2.layer, 2, value)?,
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn no_oscillator(slab: usize) -> PressureError {
    PressureError::InvalidConfig(format!("layer of slab {slab} has no oscillator model"))
}

fn layer_oscillator(layer: &Material, slab: usize) -> Result<&crate::materials::OscillatorModel, PressureError> {
    layer.oscillator().ok_or_else(|| no_oscillator(slab))
}

fn set_porosity(layer: &mut Material, slab: usize, value: f64) -> Result<(), PressureError> {
    match layer {
        Material::MaxwellGarnett { porosity, .. } => {
            *porosity = value;
            Ok(())
        }
        _ => Err(PressureError::InvalidConfig(format!(
            "layer of slab {slab} is not a porous material"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub axis_values: Vec<f64>,
    /// Failed points keep their error instead of aborting the sweep.
    pub rows: Vec<Result<PressureBreakdown, PressureError>>,
    /// P̃⁽²⁾/P̄_eq per row, `None` where the row failed.
    pub normalized: Vec<Option<f64>>,
}

impl SweepResult {
    pub fn axis_name(&self) -> &'static str {
        self.axis.name()
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.is_err()).count()
    }
}

/// Evaluates the full breakdown at every axis value. Points run in
/// parallel; output order follows `values`.
pub fn sweep(
    solver: &CasimirSolver,
    template: &SystemConfig,
    axis: SweepAxis,
    values: &[f64],
) -> Result<SweepResult, PressureError> {
    if values.is_empty() {
        return Err(PressureError::InvalidConfig("sweep needs at least one value".into()));
    }
    let increasing = values.windows(2).all(|w| w[0] < w[1]);
    let decreasing = values.windows(2).all(|w| w[0] > w[1]);
    if !(increasing || decreasing) || values.iter().any(|v| !v.is_finite()) {
        return Err(PressureError::InvalidConfig(format!(
            "{} values must be finite and strictly monotone",
            axis.name()
        )));
    }
    let rows: Vec<_> = values
        .par_iter()
        .map(|&v| {
            axis.apply(template, v)
                .and_then(|cfg| solver.total_inside_pressure(&cfg))
        })
        .collect();
    let normalized = rows
        .iter()
        .map(|r| r.as_ref().ok().and_then(|b| b.normalized().ok()))
        .collect();
    Ok(SweepResult {
        axis,
        axis_values: values.to_vec(),
        rows,
        normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::OscillatorModel;
    use crate::presets;
    use crate::pressure::SolverSettings;

    fn substrate() -> OscillatorModel {
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

    fn solver() -> CasimirSolver {
        CasimirSolver::new(SolverSettings::with_rel_tol(1e-4))
    }

    #[test]
    fn log_grid_hits_end_points() {
        let g = log_grid(1e-9, 5e-5, 200);
        assert_eq!(g.len(), 200);
        assert_eq!(g[0], 1e-9);
        assert_eq!(g[199], 5e-5);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let r = g[1] / g[0];
        assert!((g[100] / g[99] - r).abs() < 1e-12);
    }

    #[test]
    fn axes_edit_the_right_fields() {
        let cfg = presets::dilution_study(&substrate(), 1.0, 1.0, 600.0, 1e-6);
        let c = SweepAxis::OmegaRatio.apply(&cfg, 1.2).unwrap();
        assert_eq!(c.slab2.layer.oscillator().unwrap().resonance, 1.2 * presets::OMEGA_1);
        assert_eq!(c.slab1.layer.oscillator().unwrap().resonance, presets::OMEGA_1);
        let c = SweepAxis::Dilution.apply(&cfg, 7.0).unwrap();
        assert_eq!(c.slab1.layer.oscillator().unwrap().dilution, 7.0);
        assert_eq!(c.slab2.layer.oscillator().unwrap().dilution, 7.0);
        assert_eq!(c.slab1.substrate.oscillator().unwrap().dilution, 1.0);
        assert_eq!(SweepAxis::Separation.apply(&cfg, 3e-7).unwrap().gap, 3e-7);
        assert!(SweepAxis::Porosity1.apply(&cfg, 0.5).is_err());

        let aer = presets::aerogel_study(&substrate(), 0.9, 0.8, 2e-7);
        let c = SweepAxis::Porosity2.apply(&aer, 0.5).unwrap();
        assert!(matches!(c.slab2.layer, Material::MaxwellGarnett { porosity, .. } if porosity == 0.5));
        assert!(SweepAxis::Porosity1.apply(&aer, 1.5).is_err());
    }

    #[test]
    fn sweep_rejects_non_monotone_values() {
        let cfg = presets::dilution_study(&substrate(), 1.0, 1.0, 600.0, 1e-6);
        assert!(sweep(&solver(), &cfg, SweepAxis::Separation, &[1e-6, 1e-6]).is_err());
        assert!(sweep(&solver(), &cfg, SweepAxis::Separation, &[1e-6, 2e-6, 1.5e-6]).is_err());
        assert!(sweep(&solver(), &cfg, SweepAxis::Separation, &[]).is_err());
    }

    #[test]
    fn single_point_sweep_matches_direct_evaluation() {
        let cfg = presets::dilution_study(&substrate(), 10.0, 1.05, 600.0, 3e-7);
        let s = solver();
        let direct = s.total_inside_pressure(&cfg).unwrap();
        let sw = sweep(&s, &cfg, SweepAxis::Separation, &[3e-7]).unwrap();
        assert_eq!(sw.rows[0].as_ref().unwrap(), &direct);
        assert_eq!(sw.normalized[0], Some(direct.normalized().unwrap()));
    }

    #[test]
    fn failed_points_stay_in_row() {
        let cfg = presets::dilution_study(&substrate(), 10.0, 1.05, 600.0, 3e-7);
        let sw = sweep(&solver(), &cfg, SweepAxis::Separation, &[-1e-7, 3e-7]).unwrap();
        assert!(sw.rows[0].is_err());
        assert!(sw.rows[1].is_ok());
        assert_eq!(sw.normalized[0], None);
        assert_eq!(sw.failures(), 1);
    }

    #[test]
    fn vacuum_layers_give_zero_corrections() {
        let mut cfg = presets::dilution_study(&substrate(), 1.0, 1.0, 600.0, 1e-6);
        for slab in [&mut cfg.slab1, &mut cfg.slab2] {
            slab.layer = Material::Vacuum;
            slab.substrate = Material::Vacuum;
        }
        let sw = sweep(&solver(), &cfg, SweepAxis::Separation, &[1e-7, 1e-6, 1e-5]).unwrap();
        for row in &sw.rows {
            let b = row.as_ref().unwrap();
            assert_eq!((b.dp_pw, b.dp_ew, b.distance_independent), (0.0, 0.0, 0.0));
        }
        assert!(sw.normalized.iter().all(Option::is_none));
    }

    #[test]
    fn scan_finds_restoring_crossing_of_porous_pair() {
        let cfg = presets::aerogel_study(&substrate(), 0.95, 0.95, 1e-6);
        let opts = ScanOptions {
            points: 12,
            ..ScanOptions::over(1e-6, 10e-6)
        };
        let s = solver();
        let eq = find_equilibria(&s, &cfg, &opts).unwrap();
        assert_eq!(eq.len(), 1, "{eq:?}");
        let p = eq[0];
        assert_eq!(p.stability, Stability::Stable);
        assert!(p.pressure_slope < 0.0);
        let below = s
            .plate_pressure(Plate::Two, &cfg.with_gap(p.separation * (1.0 - 1e-4)))
            .unwrap();
        let above = s
            .plate_pressure(Plate::Two, &cfg.with_gap(p.separation * (1.0 + 1e-4)))
            .unwrap();
        assert!(below > 0.0 && above < 0.0, "{below} {above}");

        let finer = find_equilibria(&s, &cfg, &ScanOptions { points: 24, ..opts }).unwrap();
        assert_eq!(finer.len(), 1);
        assert_eq!(finer[0].stability, p.stability);
        assert!((finer[0].separation / p.separation - 1.0).abs() < 2e-4);
    }

    #[test]
    fn strongly_attractive_pair_has_no_equilibria() {
        let cfg = presets::dilution_study(&substrate(), 1.0, 1.1, 600.0, 1e-6);
        let opts = ScanOptions {
            points: 10,
            ..ScanOptions::over(5e-9, 2e-6)
        };
        assert!(find_equilibria(&solver(), &cfg, &opts).unwrap().is_empty());
    }

    #[test]
    fn scan_options_are_checked() {
        let cfg = presets::dilution_study(&substrate(), 1.0, 1.1, 600.0, 1e-6);
        let s = solver();
        assert!(find_equilibria(&s, &cfg, &ScanOptions::over(1e-6, 1e-7)).is_err());
        assert!(find_equilibria(
            &s,
            &cfg,
            &ScanOptions {
                points: 1,
                ..ScanOptions::default()
            }
        )
        .is_err());
    }
}
