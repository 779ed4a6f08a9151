//! File formats written by scenario runs.
//!
//! CSV files use LF line endings, a header row naming units, and 17
//! significant digits for floating-point values. Density snapshots use a
//! small little-endian binary format:
//!
//! ```text
//! "LIPS"  u32 version = 1  u64 n  f64 r_min_bohr  f64 dr_bohr
//! per snapshot: f64 t_ps, 3·n f64 channel densities (X, A, Π), n f64 total
//! ```

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::analysis::{DensitySnapshot, ScenarioResult, TransferReport};
use crate::eigen::BoundStateSet;
use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::lip::{EigenTrajectorySet, LipSurface};
use crate::units::{to_cm1, to_ps, BOHR_ANGSTROM};

pub const DENSITY_MAGIC: &[u8; 4] = b"LIPS";
pub const DENSITY_VERSION: u32 = 1;

/// 17 significant digits, shortest exponent form.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn row(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(fmt17).collect::<Vec<_>>().join(",")
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn populations_csv(result: &ScenarioResult) -> String {
    let mut s = String::from("t_ps,P_X,P_A,P_Pi,norm\n");
    for ((t, p), n) in result.times.iter().zip(&result.populations).zip(&result.norms) {
        s += &row([to_ps(*t), p[0], p[1], p[2], *n]);
        s.push('\n');
    }
    s
}

pub fn projections_csv(result: &ScenarioResult) -> Option<String> {
    let series = result.projections.as_ref()?;
    let mut s = String::from("t_ps");
    for nu in 0..series.basis.len() {
        s += &format!(",w{nu}_{}", series.basis.label);
    }
    s.push('\n');
    for (t, w) in result.times.iter().zip(&series.weights) {
        s += &row(std::iter::once(to_ps(*t)).chain(w.iter().copied()));
        s.push('\n');
    }
    Some(s)
}

/// Trajectory energies in tracked order; `E1` is the trajectory that starts
/// as the lowest state.
pub fn lip_energies_csv(set: &EigenTrajectorySet) -> String {
    let mut s = String::from("t_ps");
    for i in 1..=set.count() {
        s += &format!(",E{i}_cm1");
    }
    s.push('\n');
    for (k, t) in set.times.iter().enumerate() {
        s += &row(std::iter::once(to_ps(*t)).chain(set.energies.iter().map(|e| to_cm1(e[k]))));
        s.push('\n');
    }
    s
}

/// Crossing events; state numbers match the `E<i>` columns of the energies file.
pub fn events_csv(set: &EigenTrajectorySet) -> String {
    let mut s = String::from("t_ps,state_a,state_b,min_gap_cm1\n");
    for e in &set.events {
        s += &format!("{},{},{},{}\n", fmt17(to_ps(e.time)), e.state_a + 1, e.state_b + 1, fmt17(to_cm1(e.min_gap)));
    }
    s
}

pub fn transfer_report_csv(report: &TransferReport, result: &ScenarioResult) -> String {
    let mut s = String::from(
        "initial_well,initial_nu,dominant_well,dominant_nu,dominant_weight,P_X_final,P_A_final,P_Pi_final,\
         peak_P_A,residual_oscillation_pp,max_edge_probability\n",
    );
    let p = report.final_populations;
    s += &format!(
        "{},{},{},{},{}\n",
        report.initial.well,
        report.initial.nu,
        report.dominant.well,
        report.dominant.nu,
        row([
            report.dominant_weight,
            p[0],
            p[1],
            p[2],
            result.peak_populations[1],
            report.residual_oscillation,
            result.boundary.max_edge_probability,
        ])
    );
    s
}

/// Projection weights of the final state on both wells' bases.
pub fn final_weights_csv(report: &TransferReport) -> String {
    let mut s = String::from("well,nu,weight\n");
    for (well, w) in [("left", &report.left_weights), ("right", &report.right_weights)] {
        for (nu, x) in w.iter().enumerate() {
            s += &format!("{well},{nu},{}\n", fmt17(*x));
        }
    }
    s
}

pub fn write_density(path: &Path, grid: &SpatialGrid, snapshots: &[DensitySnapshot]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    w.write_all(DENSITY_MAGIC).map_err(io)?;
    w.write_all(&DENSITY_VERSION.to_le_bytes()).map_err(io)?;
    w.write_all(&(grid.len() as u64).to_le_bytes()).map_err(io)?;
    w.write_all(&grid.r_min().to_le_bytes()).map_err(io)?;
    w.write_all(&grid.dr().to_le_bytes()).map_err(io)?;
    for snap in snapshots {
        w.write_all(&to_ps(snap.time).to_le_bytes()).map_err(io)?;
        for x in snap.channels.iter().flatten().chain(&snap.total) {
            w.write_all(&x.to_le_bytes()).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

/// Decoded density file: grid header and snapshots (times in ps).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityFile {
    pub n: usize,
    pub r_min_bohr: f64,
    pub dr_bohr: f64,
    pub snapshots: Vec<DensitySnapshot>,
}

pub fn read_density(path: &Path) -> Result<DensityFile> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let bad = |what: &str| Error::Input(format!("{}: {what}", path.display()));
    if bytes.len() < 28 || &bytes[..4] != DENSITY_MAGIC {
        return Err(bad("not a density snapshot file"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    if u32_at(4) != DENSITY_VERSION {
        return Err(bad("unsupported version"));
    }
    let n = u64_at(8) as usize;
    let (r_min_bohr, dr_bohr) = (f64_at(16), f64_at(24));
    let record = 8 * (1 + 4 * n);
    let body = bytes.len() - 32;
    if body % record != 0 {
        return Err(bad("truncated snapshot"));
    }
    let mut snapshots = Vec::new();
    for k in 0..body / record {
        let base = 32 + k * record;
        let values = |start: usize| -> Vec<f64> { (0..n).map(|j| f64_at(base + 8 + 8 * (start * n + j))).collect() };
        snapshots.push(DensitySnapshot {
            time: f64_at(base),
            channels: [values(0), values(1), values(2)],
            total: values(3),
        });
    }
    Ok(DensityFile {
        n,
        r_min_bohr,
        dr_bohr,
        snapshots,
    })
}

pub fn energies_csv(set: &BoundStateSet) -> String {
    let mut s = String::from("index,E_cm1\n");
    for (i, e) in set.energies.iter().enumerate() {
        s += &format!("{i},{}\n", fmt17(to_cm1(*e)));
    }
    s
}

/// Eigenfunctions on the grid, amplitudes in bohr^-1/2.
pub fn states_csv(set: &BoundStateSet) -> String {
    let mut s = String::from("r_angstrom");
    for i in 0..set.len() {
        s += &format!(",phi{i}_per_sqrt_bohr");
    }
    s.push('\n');
    for j in 0..set.grid.len() {
        s += &row(std::iter::once(set.grid.point(j) * BOHR_ANGSTROM).chain(set.states.iter().map(|st| st[j])));
        s.push('\n');
    }
    s
}

/// Adiabatic surfaces (ascending) and the active surface at each time.
pub fn lip_surfaces_csv(grid: &SpatialGrid, surfaces: &[LipSurface]) -> String {
    let mut s = String::from("r_angstrom");
    for surf in surfaces {
        let t = format_time(to_ps(surf.time));
        for k in 1..=3 {
            s += &format!(",V{k}_cm1@{t}ps");
        }
        s += &format!(",active_cm1@{t}ps");
    }
    s.push('\n');
    let actives: Vec<Vec<f64>> = surfaces.iter().map(|x| x.active_potential()).collect();
    for j in 0..grid.len() {
        let mut values = vec![grid.point(j) * BOHR_ANGSTROM];
        for (surf, active) in surfaces.iter().zip(&actives) {
            values.extend(surf.frame.values[j].iter().map(|v| to_cm1(*v)));
            values.push(to_cm1(active[j]));
        }
        s += &row(values);
        s.push('\n');
    }
    s
}

/// Tracked eigenfunctions at their snapshot times.
pub fn lip_states_csv(grid: &SpatialGrid, set: &EigenTrajectorySet) -> String {
    let mut s = String::from("r_angstrom");
    for snap in &set.snapshots {
        let t = format_time(to_ps(snap.time));
        for i in 1..=snap.states.len() {
            s += &format!(",state{i}_per_sqrt_bohr@{t}ps");
        }
    }
    s.push('\n');
    for j in 0..grid.len() {
        let mut values = vec![grid.point(j) * BOHR_ANGSTROM];
        for snap in &set.snapshots {
            values.extend(snap.states.iter().map(|st| st[j]));
        }
        s += &row(values);
        s.push('\n');
    }
    s
}

fn format_time(t: f64) -> String {
    let r = (t * 1e6).round() / 1e6;
    format!("{r}")
}
