//! Running configured scenarios, scans and eigen/LIP queries, and writing
//! their output files.

use std::path::Path;

use rayon::prelude::*;

use crate::analysis::{transfer_report, Recorder, ScenarioResult, TransferReport};
use crate::config::{Objective, ScanSpec, ScenarioConfig};
use crate::eigen::{bound_states, BoundStateSet};
use crate::error::{ConfigError, Error, Result};
use crate::lip::{active_spectrum, lip_at, track_trajectories, EigenTrajectorySet, LipSurface, TrackingOptions};
use crate::output::{self, fmt17, write_text};
use crate::potentials::Channel;
use crate::propagator::{initial_state, propagate};
use crate::units::ps;

/// Everything a scenario run produces in memory.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub result: ScenarioResult,
    pub report: TransferReport,
    pub trajectories: Option<EigenTrajectorySet>,
}

/// Propagates the configured scenario and analyses the final state; no I/O.
pub fn simulate(config: &ScenarioConfig) -> Result<(ScenarioResult, TransferReport)> {
    let (cp, grid, mass) = (&config.potential, &config.grid, config.mass);
    let psi0 = initial_state(cp, grid, mass, config.initial.well, config.initial.nu, config.settings.t_start)?;
    let mut recorder = Recorder::new(grid, config.initial);
    if let Some(well) = config.analysis.projection_well {
        let channel = well.channel();
        let basis = bound_states(&cp.channel_potential(channel, grid)?, grid, mass, config.analysis.projection_count)?
            .with_label(well.name());
        recorder = recorder.with_projection(channel, basis);
    }
    let mut result = propagate(&psi0, cp, grid, mass, &config.settings, recorder, &mut [])?;
    result.metadata.config_echo = config.echo();
    let report = transfer_report(&result, cp, grid, mass, config.analysis.projection_count)?;
    Ok((result, report))
}

/// Active-surface trajectories over the propagation window.
pub fn track(config: &ScenarioConfig) -> Result<EigenTrajectorySet> {
    let options = TrackingOptions {
        snapshot_times: snap_to_samples(&config.lip_times(), &config.analysis.lip_snapshot_times),
        ..TrackingOptions::default()
    };
    track_trajectories(
        &config.potential,
        &config.grid,
        config.mass,
        &config.lip_times(),
        config.analysis.lip_count,
        &options,
    )
}

/// Each requested time replaced by the nearest sample time.
fn snap_to_samples(samples: &[f64], requested: &[f64]) -> Vec<f64> {
    requested
        .iter()
        .filter_map(|&t| samples.iter().copied().min_by(|a, b| (a - t).abs().total_cmp(&(b - t).abs())))
        .collect()
}

fn metadata_toml(config: &ScenarioConfig, result: &ScenarioResult) -> String {
    let (full, rest) = config.settings.schedule();
    let mut s = String::new();
    s += &format!("code_version = \"{}\"\n", result.metadata.code_version);
    s += &format!("steps = {}\n", full + usize::from(rest > 0.0));
    s += &format!("boundary_contaminated = {}\n", result.boundary.contaminated());
    s += &format!("max_edge_probability = {}\n", fmt17(result.boundary.max_edge_probability));
    s += "\n[grid]\n";
    s += &format!("n = {}\n", config.grid.len());
    s += &format!("r_min_bohr = {}\n", fmt17(config.grid.r_min()));
    s += &format!("dr_bohr = {}\n", fmt17(config.grid.dr()));
    s
}

/// Runs a scenario and writes the requested files into `out_dir`.
pub fn run_scenario(config: &ScenarioConfig, out_dir: &Path) -> Result<RunOutcome> {
    let outputs = &config.raw.outputs;
    let (result, report) = simulate(config)?;
    let trajectories = if outputs.lip_energies { Some(track(config)?) } else { None };

    write_text(&out_dir.join("config_echo.toml"), &result.metadata.config_echo)?;
    write_text(&out_dir.join("metadata.toml"), &metadata_toml(config, &result))?;
    if outputs.populations {
        write_text(&out_dir.join("populations.csv"), &output::populations_csv(&result))?;
    }
    if outputs.transfer_report {
        write_text(&out_dir.join("transfer_report.csv"), &output::transfer_report_csv(&report, &result))?;
        write_text(&out_dir.join("final_weights.csv"), &output::final_weights_csv(&report))?;
    }
    if outputs.density {
        output::write_density(&out_dir.join("density.bin"), &config.grid, &result.snapshots)?;
    }
    if outputs.projections {
        if let Some(csv) = output::projections_csv(&result) {
            write_text(&out_dir.join("projections.csv"), &csv)?;
        }
    }
    if let Some(set) = &trajectories {
        write_lip_files(config, set, out_dir)?;
    }
    Ok(RunOutcome {
        result,
        report,
        trajectories,
    })
}

fn write_lip_files(config: &ScenarioConfig, set: &EigenTrajectorySet, out_dir: &Path) -> Result<()> {
    write_text(&out_dir.join("lip_energies.csv"), &output::lip_energies_csv(set))?;
    write_text(&out_dir.join("events.csv"), &output::events_csv(set))?;
    if !set.snapshots.is_empty() {
        write_text(&out_dir.join("lip_states.csv"), &output::lip_states_csv(&config.grid, set))?;
    }
    Ok(())
}

/// Surface whose bound states `eigen_command` reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Surface {
    Diabatic(Channel),
    /// Active light-induced surface at the given time (ps).
    Active(f64),
}

impl std::str::FromStr for Surface {
    type Err = ConfigError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "X" | "x" => Ok(Surface::Diabatic(Channel::X)),
            "A" | "a" => Ok(Surface::Diabatic(Channel::A)),
            "Pi" | "pi" | "PI" => Ok(Surface::Diabatic(Channel::Pi)),
            other => {
                let t = other
                    .strip_prefix("active@")
                    .and_then(|t| t.parse::<f64>().ok())
                    .ok_or_else(|| ConfigError::Invalid(format!("unknown surface `{other}` (expected X, A, Pi or active@<t_ps>)")))?;
                Ok(Surface::Active(t))
            }
        }
    }
}

/// Lowest `count` bound states of a surface. Diabatic surfaces include their
/// detuning shifts.
pub fn eigen_command(config: &ScenarioConfig, surface: Surface, count: usize) -> Result<BoundStateSet> {
    let (cp, grid, mass) = (&config.potential, &config.grid, config.mass);
    match surface {
        Surface::Diabatic(c) => Ok(bound_states(&cp.channel_potential(c, grid)?, grid, mass, count)?.with_label(c.name())),
        Surface::Active(t) => active_spectrum(cp, grid, mass, ps(t), count),
    }
}

/// LIP surfaces at the given times (ps).
pub fn lip_command(config: &ScenarioConfig, times_ps: &[f64]) -> Result<Vec<LipSurface>> {
    times_ps.iter().map(|&t| lip_at(&config.potential, &config.grid, ps(t))).collect()
}

/// Writes LIP surfaces at `times_ps`, the tracked trajectories over the
/// propagation window and eigenfunctions at `times_ps`.
pub fn run_lip(config: &ScenarioConfig, times_ps: &[f64], out_dir: &Path) -> Result<EigenTrajectorySet> {
    let surfaces = lip_command(config, times_ps)?;
    write_text(&out_dir.join("lip_surfaces.csv"), &output::lip_surfaces_csv(&config.grid, &surfaces))?;
    let mut cfg = config.clone();
    cfg.analysis.lip_snapshot_times = times_ps.iter().map(|&t| ps(t)).collect();
    let set = track(&cfg)?;
    write_lip_files(&cfg, &set, out_dir)?;
    Ok(set)
}

/// One row of a scan table.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub cell: Vec<usize>,
    pub outcome: std::result::Result<(f64, TransferReport), String>,
}

pub fn objective_value(objective: Objective, result: &ScenarioResult, report: &TransferReport) -> f64 {
    match objective {
        Objective::FinalPopulation(c) => report.final_populations[c.index()],
        Objective::PeakPopulation(c) => result.peak_populations[c.index()],
        Objective::DominantWeight => report.dominant_weight,
        Objective::Weight(label) => {
            let w = match label.well {
                crate::propagator::Well::Left => &report.left_weights,
                crate::propagator::Well::Right => &report.right_weights,
            };
            w.get(label.nu).copied().unwrap_or(f64::NAN)
        }
        Objective::ResidualOscillation => report.residual_oscillation,
    }
}

/// Runs every cell (in parallel) and writes `scan.csv` plus one
/// subdirectory per cell. Rows are in cell order regardless of scheduling.
pub fn run_scan(spec: &ScanSpec, out_dir: &Path) -> Result<Vec<ScanRow>> {
    let cells = spec.cells();
    let rows: Vec<ScanRow> = cells
        .par_iter()
        .enumerate()
        .map(|(k, cell)| {
            let outcome = spec
                .cell_config(cell)
                .and_then(|cfg| run_scenario(&cfg, &out_dir.join(format!("cell_{k:04}"))))
                .map(|o| (objective_value(spec.objective, &o.result, &o.report), o.report))
                .map_err(|e| e.to_string());
            ScanRow {
                cell: cell.clone(),
                outcome,
            }
        })
        .collect();
    write_text(&out_dir.join("scan.csv"), &scan_csv(spec, &rows))?;
    Ok(rows)
}

fn csv_field(v: &toml::Value) -> String {
    match v {
        toml::Value::Float(x) => fmt17(*x),
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn scan_csv(spec: &ScanSpec, rows: &[ScanRow]) -> String {
    let mut s = String::new();
    for axis in &spec.axes {
        s += &axis.path;
        s.push(',');
    }
    s += &format!("{},P_X_final,P_A_final,P_Pi_final,dominant_well,dominant_nu,status\n", spec.objective_name);
    for r in rows {
        for (axis, &i) in spec.axes.iter().zip(&r.cell) {
            s += &csv_field(&axis.values[i]);
            s.push(',');
        }
        match &r.outcome {
            Ok((value, rep)) => {
                let p = rep.final_populations;
                s += &format!(
                    "{},{},{},{},{},{},ok\n",
                    fmt17(*value),
                    fmt17(p[0]),
                    fmt17(p[1]),
                    fmt17(p[2]),
                    rep.dominant.well,
                    rep.dominant.nu
                );
            }
            Err(msg) => {
                let clean: String = msg.chars().map(|c| if c == ',' || c == '\n' { ';' } else { c }).collect();
                s += &format!(",,,,,,error: {clean}\n");
            }
        }
    }
    s
}

/// Error for a completed run whose wavefunction reached the grid edges.
pub fn boundary_error(result: &ScenarioResult) -> Option<Error> {
    result.boundary.first_contamination.map(|(t, p)| Error::BoundaryContamination {
        t_ps: crate::units::to_ps(t),
        probability: p,
    })
}
