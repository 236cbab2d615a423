//! Presets for the four published figures.
//!
//! Each curve is written three ways: the figure axes (`<id>.csv`), the full
//! breakdown (`<id>_breakdown.csv`) and a scenario file that regenerates the
//! breakdown (`<id>.scenario.toml`). Separation scans also get
//! `<id>_equilibria.csv`. `manifest.toml` records every parameter.

use std::fs;
use std::io::Write;
use std::path::Path;

use fluctoforce::presets::{self, AEROGEL_STUDY_GAP, DILUTION_STUDY_GAP, SEPARATION_SCAN_CURVES};
use fluctoforce::{
    find_equilibria, sweep, CasimirSolver, OscillatorModel, ScanOptions, SolverSettings, SweepAxis, SweepResult,
    SystemConfig,
};
use serde::Serialize;

use crate::scenario::{linear_grid, QuadratureOverrides, Scenario, SubstrateFile, SweepSpec, SystemSpec};
use crate::{table, write_file, CliError};

/// Separation range of the dilution scans, m.
pub const FIG2_RANGE: (f64, f64) = (1e-9, 6e-6);
/// Separation range of the aerogel scans, m.
pub const FIG4_RANGE: (f64, f64) = (10e-9, 10e-6);

#[derive(Debug, Clone)]
pub struct Curve {
    pub id: String,
    pub label: String,
    pub template: SystemConfig,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub scan: Option<ScanOptions>,
}

#[derive(Debug, Clone)]
pub struct FigurePlan {
    pub number: u8,
    pub title: &'static str,
    /// Name of the figure's x column and the factor from SI to its unit.
    pub x_column: &'static str,
    pub x_scale: f64,
    pub curves: Vec<Curve>,
}

fn separation_curve(
    id: String,
    label: String,
    template: SystemConfig,
    (lo, hi): (f64, f64),
    points: usize,
    scan_points: usize,
) -> Curve {
    Curve {
        id,
        label,
        template,
        axis: SweepAxis::Separation,
        values: fluctoforce::analysis::log_grid(lo, hi, points),
        scan: Some(ScanOptions {
            points: scan_points,
            ..ScanOptions::over(lo, hi)
        }),
    }
}

/// Curves of figure `number`. `points` overrides the points per curve and
/// `scan_points` the equilibrium-scan grid.
pub fn plan(
    number: u8,
    substrate: &OscillatorModel,
    points: Option<usize>,
    scan_points: Option<usize>,
) -> Result<FigurePlan, CliError> {
    let scan_points = scan_points.unwrap_or(ScanOptions::default().points);
    if points == Some(0) || scan_points < 2 {
        return Err(CliError::Config(
            "figure needs at least 1 point and 2 scan points".into(),
        ));
    }
    let plan = match number {
        1 => {
            let n = points.unwrap_or(76);
            let mut curves = Vec::new();
            for t2 in [600.0, 150.0] {
                for tau in [1.0, 10.0, 20.0] {
                    curves.push(Curve {
                        id: format!("fig1_tau{tau}_t2_{t2}"),
                        label: format!("tau={tau}, T2={t2} K"),
                        template: presets::dilution_study(substrate, tau, 1.0, t2, DILUTION_STUDY_GAP),
                        axis: SweepAxis::OmegaRatio,
                        values: linear_grid(0.5, 2.0, n),
                        scan: None,
                    });
                }
            }
            FigurePlan {
                number,
                title: "normalized plate-2 pressure versus resonance ratio",
                x_column: "omega_ratio",
                x_scale: 1.0,
                curves,
            }
        }
        2 => {
            let n = points.unwrap_or(60);
            let curves = SEPARATION_SCAN_CURVES
                .iter()
                .map(|&(tau, ratio)| {
                    separation_curve(
                        format!("fig2_tau{tau}"),
                        format!("tau={tau}, omega2/omega1={ratio}"),
                        presets::dilution_study(substrate, tau, ratio, 600.0, DILUTION_STUDY_GAP),
                        FIG2_RANGE,
                        n,
                        scan_points,
                    )
                })
                .collect();
            FigurePlan {
                number,
                title: "normalized plate-2 pressure versus separation, diluted layers",
                x_column: "separation_um",
                x_scale: 1e6,
                curves,
            }
        }
        3 => {
            let n = points.unwrap_or(50);
            let curves = [0.95, 0.9, 0.8]
                .iter()
                .map(|&phi2| Curve {
                    id: format!("fig3_phi2_{phi2}"),
                    label: format!("phi2={phi2}"),
                    template: presets::aerogel_study(substrate, 0.5, phi2, AEROGEL_STUDY_GAP),
                    axis: SweepAxis::Porosity1,
                    values: linear_grid(0.0, 0.98, n),
                    scan: None,
                })
                .collect();
            FigurePlan {
                number,
                title: "normalized plate-2 pressure versus porosity of plate 1",
                x_column: "porosity_1",
                x_scale: 1.0,
                curves,
            }
        }
        4 => {
            let n = points.unwrap_or(60);
            let curves = [0.95, 0.9, 0.8]
                .iter()
                .map(|&phi2| {
                    separation_curve(
                        format!("fig4_phi2_{phi2}"),
                        format!("phi1=0.95, phi2={phi2}"),
                        presets::aerogel_study(substrate, 0.95, phi2, AEROGEL_STUDY_GAP),
                        FIG4_RANGE,
                        n,
                        scan_points,
                    )
                })
                .collect();
            FigurePlan {
                number,
                title: "normalized plate-2 pressure versus separation, aerogel layers",
                x_column: "separation_um",
                x_scale: 1e6,
                curves,
            }
        }
        _ => return Err(CliError::Config(format!("figure must be 1, 2, 3 or 4, got {number}"))),
    };
    Ok(plan)
}

#[derive(Serialize)]
struct Manifest<'a> {
    figure: u8,
    title: &'a str,
    generator: String,
    substrate: &'a SubstrateFile,
    solver: &'a SolverSettings,
    curves: Vec<ManifestCurve<'a>>,
}

#[derive(Serialize)]
struct ManifestCurve<'a> {
    id: &'a str,
    label: &'a str,
    axis: &'static str,
    points: usize,
    files: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    equilibria: Option<&'a ScanOptions>,
    system: SystemSpec,
}

/// Scenario that regenerates one curve's breakdown (`sweep`) or
/// equilibria (`equilibria`).
pub fn curve_scenario(curve: &Curve, settings: &SolverSettings) -> Scenario {
    Scenario {
        name: curve.id.clone(),
        command: None,
        substrate_file: None,
        system: Some(SystemSpec::from(&curve.template)),
        sweep: Some(SweepSpec {
            axis: curve.axis,
            values: Some(curve.values.clone()),
            range: None,
        }),
        equilibria: curve.scan.clone(),
        figure: None,
        quadrature: QuadratureOverrides::pinned(settings),
    }
}

pub fn sweep_meta<'a>(name: &'a str, axis: &'a str) -> [(&'a str, &'a str); 3] {
    [("command", "sweep"), ("scenario", name), ("axis", axis)]
}

pub fn equilibria_meta(name: &str) -> [(&str, &str); 2] {
    [("command", "equilibria"), ("scenario", name)]
}

/// Runs every curve of `plan` and writes the file set into `out_dir`.
pub fn reproduce(
    plan: &FigurePlan,
    substrate: &SubstrateFile,
    settings: &SolverSettings,
    out_dir: &Path,
) -> Result<(), CliError> {
    fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let solver = CasimirSolver::new(settings.clone());
    let mut manifest_curves = Vec::new();
    let mut failure: Option<CliError> = None;

    for curve in &plan.curves {
        log::info!(
            "figure {}: curve {} ({} points)",
            plan.number,
            curve.id,
            curve.values.len()
        );
        let result = sweep(&solver, &curve.template, curve.axis, &curve.values)?;
        if let Some(e) = first_failure(&result) {
            failure.get_or_insert(e);
        }
        let mut files = Vec::new();

        let name = format!("{}.csv", curve.id);
        let rows: Vec<Vec<f64>> = result
            .axis_values
            .iter()
            .zip(&result.rows)
            .map(|(x, row)| {
                let (n, nd) = match row {
                    Ok(b) => (
                        b.normalized().unwrap_or(f64::NAN),
                        b.normalized_distance_dependent().unwrap_or(f64::NAN),
                    ),
                    Err(_) => (f64::NAN, f64::NAN),
                };
                vec![x * plan.x_scale, n, nd]
            })
            .collect();
        let fig = plan.number.to_string();
        let meta = [("figure", fig.as_str()), ("curve", curve.id.as_str())];
        write_file(&out_dir.join(&name), |w| {
            table::write_columns(
                w,
                &meta,
                &[plan.x_column, "normalized", "normalized_no_constant"],
                &rows,
            )
        })?;
        files.push(name);

        let name = format!("{}_breakdown.csv", curve.id);
        let axis = curve.axis.name();
        write_file(&out_dir.join(&name), |w| {
            table::write_breakdown(w, &sweep_meta(&curve.id, axis), axis, &result.axis_values, &result.rows)
        })?;
        files.push(name);

        if let Some(scan) = &curve.scan {
            let points = find_equilibria(&solver, &curve.template, scan)?;
            let name = format!("{}_equilibria.csv", curve.id);
            write_file(&out_dir.join(&name), |w| {
                table::write_equilibria(w, &equilibria_meta(&curve.id), &points)
            })?;
            files.push(name);
        }

        let name = format!("{}.scenario.toml", curve.id);
        let text = curve_scenario(curve, settings).to_toml()?;
        write_file(&out_dir.join(&name), |w| w.write_all(text.as_bytes()))?;
        files.push(name);

        manifest_curves.push(ManifestCurve {
            id: &curve.id,
            label: &curve.label,
            axis: curve.axis.name(),
            points: curve.values.len(),
            files,
            equilibria: curve.scan.as_ref(),
            system: SystemSpec::from(&curve.template),
        });
    }

    let manifest = Manifest {
        figure: plan.number,
        title: plan.title,
        generator: format!("fluctoforce {}", env!("CARGO_PKG_VERSION")),
        substrate,
        solver: settings,
        curves: manifest_curves,
    };
    let text = toml::to_string_pretty(&manifest).map_err(|e| CliError::Config(e.to_string()))?;
    write_file(&out_dir.join("manifest.toml"), |w| w.write_all(text.as_bytes()))?;
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

pub fn first_failure(result: &SweepResult) -> Option<CliError> {
    result
        .rows
        .iter()
        .zip(&result.axis_values)
        .find_map(|(r, x)| r.as_ref().err().map(|e| (e, x)))
        .map(|(e, x)| {
            let msg = format!("{}={x}: {e}", result.axis_name());
            if e.is_convergence_failure() {
                CliError::Convergence(msg)
            } else {
                CliError::Config(msg)
            }
        })
}
