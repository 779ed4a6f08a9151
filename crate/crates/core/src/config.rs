//! Scenario and scan configuration files.
//!
//! Configs are TOML. Parsing is strict: unknown keys are rejected, and all
//! missing required keys are reported together. Quantities carry their unit
//! in the key name (`dt_fs`, `delta1_cm1`, ...) except the grid, whose length
//! unit is given by `grid.units`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::StateLabel;
use crate::error::{ConfigError, Error, Result};
use crate::grid::SpatialGrid;
use crate::potentials::{CoupledPotential, PotentialCurve, PulseEnvelope, TabulatedCurve};
use crate::propagator::{PropagationSettings, Well};
use crate::units::{amu, angstrom, cm1, ps, to_internal, Unit};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub mass_amu: f64,
    pub grid: GridSpec,
    pub curves: CurvesSpec,
    pub drive: DriveSpec,
    pub initial: InitialSpec,
    pub propagation: PropagationSpec,
    #[serde(default)]
    pub outputs: OutputsSpec,
    #[serde(default)]
    pub analysis: AnalysisSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub n: usize,
    pub units: String,
}

/// Either a reference to a curve file or the three curves inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvesSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<CurveSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<CurveSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<CurveSpec>,
}

/// Contents of a standalone curve file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub x: CurveSpec,
    pub a: CurveSpec,
    pub pi: CurveSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CurveSpec {
    Morse {
        depth_cm1: f64,
        omega_e_cm1: f64,
        r_eq_angstrom: f64,
        #[serde(default)]
        offset_cm1: f64,
    },
    Harmonic {
        omega_cm1: f64,
        r_eq_angstrom: f64,
        #[serde(default)]
        offset_cm1: f64,
    },
    /// Two whitespace- or comma-separated columns (R, energy); `#` starts a comment.
    Tabulated {
        file: String,
        #[serde(default = "default_length_unit")]
        r_units: String,
        #[serde(default = "default_energy_unit")]
        energy_units: String,
    },
}

fn default_length_unit() -> String {
    "angstrom".into()
}

fn default_energy_unit() -> String {
    "cm-1".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSpec {
    pub delta1_cm1: f64,
    pub delta2_cm1: f64,
    pub pulse1: PulseSpec,
    pub pulse2: PulseSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    pub omega_cm1: f64,
    pub center_ps: f64,
    pub width_ps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub well: String,
    pub nu: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationSpec {
    pub dt_fs: f64,
    pub t_start_ps: f64,
    pub t_end_ps: f64,
    pub record_stride: usize,
    #[serde(default)]
    pub snapshot_times_ps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputsSpec {
    pub directory: String,
    pub populations: bool,
    pub density: bool,
    pub transfer_report: bool,
    pub lip_energies: bool,
    pub projections: bool,
}

impl Default for OutputsSpec {
    fn default() -> Self {
        Self {
            directory: "out".into(),
            populations: true,
            density: true,
            transfer_report: true,
            lip_energies: false,
            projections: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSpec {
    /// Bound states per well used for the transfer report.
    pub projection_count: usize,
    /// Well whose basis is projected on at every recorded sample.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projection_well: Option<String>,
    /// Active-surface states followed through time.
    pub lip_count: usize,
    pub lip_sampling_ps: f64,
    /// Times at which tracked eigenfunctions are stored.
    pub lip_snapshot_times_ps: Vec<f64>,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        Self {
            projection_count: 8,
            projection_well: None,
            lip_count: 5,
            lip_sampling_ps: 0.05,
            lip_snapshot_times_ps: Vec::new(),
        }
    }
}

/// Analysis settings in internal units.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisSettings {
    pub projection_count: usize,
    pub projection_well: Option<Well>,
    pub lip_count: usize,
    pub lip_sampling: f64,
    pub lip_snapshot_times: Vec<f64>,
}

/// A validated scenario with everything converted to atomic units.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// The configuration with curve files inlined and paths made absolute;
    /// this is what gets echoed.
    pub raw: RawConfig,
    pub grid: SpatialGrid,
    pub mass: f64,
    pub potential: CoupledPotential,
    pub initial: StateLabel,
    pub settings: PropagationSettings,
    pub analysis: AnalysisSettings,
}

const REQUIRED_TOP: &[&str] = &["mass_amu", "grid", "curves", "drive", "initial", "propagation"];
const REQUIRED_GRID: &[&str] = &["r_min", "r_max", "n", "units"];
const REQUIRED_DRIVE: &[&str] = &["delta1_cm1", "delta2_cm1", "pulse1", "pulse2"];
const REQUIRED_PULSE: &[&str] = &["omega_cm1", "center_ps", "width_ps"];
const REQUIRED_INITIAL: &[&str] = &["well", "nu"];
const REQUIRED_PROPAGATION: &[&str] = &["dt_fs", "t_start_ps", "t_end_ps", "record_stride"];

/// Parses TOML text into a table, mapping syntax errors to line/column.
pub fn parse_table(text: &str) -> std::result::Result<toml::Table, ConfigError> {
    text.parse::<toml::Table>().map_err(|e| {
        let (line, column) = e.span().map(|s| line_column(text, s.start)).unwrap_or((0, 0));
        ConfigError::Syntax {
            line,
            column,
            message: e.message().to_string(),
        }
    })
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn missing_keys(table: &toml::Table) -> Vec<String> {
    let mut missing = Vec::new();
    let mut check = |t: &toml::Table, prefix: &str, keys: &[&str]| {
        for k in keys {
            if !t.contains_key(*k) {
                missing.push(format!("{prefix}{k}"));
            }
        }
    };
    check(table, "", REQUIRED_TOP);
    let sub = |name: &str| table.get(name).and_then(|v| v.as_table());
    if let Some(t) = sub("grid") {
        check(t, "grid.", REQUIRED_GRID);
    }
    if let Some(t) = sub("drive") {
        check(t, "drive.", REQUIRED_DRIVE);
        for p in ["pulse1", "pulse2"] {
            if let Some(pt) = t.get(p).and_then(|v| v.as_table()) {
                check(pt, &format!("drive.{p}."), REQUIRED_PULSE);
            }
        }
    }
    if let Some(t) = sub("initial") {
        check(t, "initial.", REQUIRED_INITIAL);
    }
    if let Some(t) = sub("propagation") {
        check(t, "propagation.", REQUIRED_PROPAGATION);
    }
    if let Some(t) = sub("curves") {
        if !t.contains_key("file") {
            check(t, "curves.", &["x", "a", "pi"]);
        }
    }
    missing
}

fn serde_error(e: toml::de::Error) -> ConfigError {
    let message = e.message().to_string();
    if message.contains("unknown field") {
        ConfigError::UnknownKey(message)
    } else if message.contains("missing field") {
        ConfigError::MissingKeys(vec![message])
    } else {
        ConfigError::Invalid(message)
    }
}

/// Parses and validates a scenario config. Relative file references are
/// resolved against `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<ScenarioConfig> {
    let table = parse_table(text)?;
    from_table(table, base_dir)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::Config(ConfigError::MissingFile(path.to_path_buf()))
        } else {
            Error::io(path, e)
        }
    })?;
    parse_config(&text, path.parent().unwrap_or(Path::new(".")))
}

/// Validates an already-parsed table.
pub fn from_table(table: toml::Table, base_dir: &Path) -> Result<ScenarioConfig> {
    let missing = missing_keys(&table);
    if !missing.is_empty() {
        return Err(ConfigError::MissingKeys(missing).into());
    }
    let raw: RawConfig = table.try_into().map_err(serde_error)?;
    ScenarioConfig::from_raw(raw, base_dir)
}

fn resolve(base_dir: &Path, file: &str) -> Result<PathBuf> {
    let p = Path::new(file);
    let full = if p.is_absolute() { p.to_path_buf() } else { base_dir.join(p) };
    if !full.is_file() {
        return Err(ConfigError::MissingFile(full).into());
    }
    Ok(full)
}

fn resolve_curves(curves: &CurvesSpec, base_dir: &Path) -> Result<CurveFile> {
    let (mut file, dir) = match (&curves.file, &curves.x, &curves.a, &curves.pi) {
        (Some(f), None, None, None) => {
            let path = resolve(base_dir, f)?;
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let parsed: CurveFile = parse_table(&text)?.try_into().map_err(serde_error)?;
            (parsed, path.parent().map(Path::to_path_buf).unwrap_or_default())
        }
        (None, Some(x), Some(a), Some(pi)) => (
            CurveFile {
                x: x.clone(),
                a: a.clone(),
                pi: pi.clone(),
            },
            base_dir.to_path_buf(),
        ),
        _ => {
            return Err(ConfigError::Invalid("curves: give either `file` or all of `x`, `a`, `pi`".into()).into());
        }
    };
    for spec in [&mut file.x, &mut file.a, &mut file.pi] {
        if let CurveSpec::Tabulated { file, .. } = spec {
            *file = resolve(&dir, file)?.to_string_lossy().into_owned();
        }
    }
    Ok(file)
}

fn length_unit(tag: &str) -> Result<Unit> {
    match tag.parse::<Unit>()? {
        u @ (Unit::Angstrom | Unit::Bohr) => Ok(u),
        other => Err(ConfigError::Unit(format!("`{other}` is not a length unit")).into()),
    }
}

fn energy_unit(tag: &str) -> Result<Unit> {
    match tag.parse::<Unit>()? {
        u @ (Unit::Wavenumber | Unit::Internal) => Ok(u),
        other => Err(ConfigError::Unit(format!("`{other}` is not an energy unit")).into()),
    }
}

fn build_curve(spec: &CurveSpec, mass: f64, name: &str) -> Result<PotentialCurve> {
    let curve = match spec {
        CurveSpec::Morse {
            depth_cm1,
            omega_e_cm1,
            r_eq_angstrom,
            offset_cm1,
        } => {
            if !(*depth_cm1 > 0.0 && *omega_e_cm1 > 0.0) {
                return Err(ConfigError::NonPhysical(format!("curve {name}: Morse depth and frequency must be positive")).into());
            }
            PotentialCurve::morse_from_frequency(cm1(*depth_cm1), cm1(*omega_e_cm1), angstrom(*r_eq_angstrom), cm1(*offset_cm1), mass)
        }
        CurveSpec::Harmonic {
            omega_cm1,
            r_eq_angstrom,
            offset_cm1,
        } => {
            if !(*omega_cm1 >= 0.0) {
                return Err(ConfigError::NonPhysical(format!("curve {name}: harmonic frequency must not be negative")).into());
            }
            PotentialCurve::harmonic_from_frequency(cm1(*omega_cm1), angstrom(*r_eq_angstrom), cm1(*offset_cm1), mass)
        }
        CurveSpec::Tabulated {
            file,
            r_units,
            energy_units,
        } => {
            let (ru, eu) = (length_unit(r_units)?, energy_unit(energy_units)?);
            let path = Path::new(file);
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let (mut r, mut v) = (Vec::new(), Vec::new());
            for (i, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let cols: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
                let parsed: Option<Vec<f64>> = cols.iter().map(|c| c.parse().ok()).collect();
                match parsed.as_deref() {
                    Some([x, y]) => {
                        r.push(to_internal(*x, ru));
                        v.push(to_internal(*y, eu));
                    }
                    _ => {
                        return Err(ConfigError::Invalid(format!("{}:{}: expected two numbers", path.display(), i + 1)).into());
                    }
                }
            }
            PotentialCurve::Tabulated(TabulatedCurve::new(r, v)?)
        }
    };
    curve.validate()?;
    Ok(curve)
}

impl ScenarioConfig {
    pub fn from_raw(mut raw: RawConfig, base_dir: &Path) -> Result<Self> {
        if !(raw.mass_amu > 0.0 && raw.mass_amu.is_finite()) {
            return Err(ConfigError::NonPhysical(format!("mass_amu must be positive (got {})", raw.mass_amu)).into());
        }
        let mass = amu(raw.mass_amu);

        let unit = length_unit(&raw.grid.units)?;
        let grid = SpatialGrid::new(to_internal(raw.grid.r_min, unit), to_internal(raw.grid.r_max, unit), raw.grid.n)?;

        let curves = resolve_curves(&raw.curves, base_dir)?;
        raw.curves = CurvesSpec {
            file: None,
            x: Some(curves.x.clone()),
            a: Some(curves.a.clone()),
            pi: Some(curves.pi.clone()),
        };

        let d = &raw.drive;
        let pulse = |p: &PulseSpec, name: &str| -> Result<PulseEnvelope> {
            if !(p.width_ps > 0.0) {
                return Err(ConfigError::NonPhysical(format!("drive.{name}.width_ps must be positive (got {})", p.width_ps)).into());
            }
            PulseEnvelope::new(cm1(p.omega_cm1), ps(p.center_ps), ps(p.width_ps))
        };
        let potential = CoupledPotential {
            x: build_curve(&curves.x, mass, "x")?,
            a: build_curve(&curves.a, mass, "a")?,
            pi: build_curve(&curves.pi, mass, "pi")?,
            delta1: cm1(d.delta1_cm1),
            delta2: cm1(d.delta2_cm1),
            pulse1: pulse(&d.pulse1, "pulse1")?,
            pulse2: pulse(&d.pulse2, "pulse2")?,
        };
        // every curve must be defined on the whole grid
        potential.diagonal_field(&grid).map_err(|e| match e {
            Error::Domain { .. } => Error::Config(ConfigError::Invalid(format!("curves do not cover the grid: {e}"))),
            other => other,
        })?;

        let initial = StateLabel {
            well: raw.initial.well.parse()?,
            nu: raw.initial.nu,
        };

        let p = &raw.propagation;
        if !(p.dt_fs > 0.0) {
            return Err(ConfigError::NonPhysical(format!("propagation.dt_fs must be positive (got {})", p.dt_fs)).into());
        }
        let settings = PropagationSettings {
            dt: to_internal(p.dt_fs, Unit::Femtosecond),
            t_start: ps(p.t_start_ps),
            t_end: ps(p.t_end_ps),
            record_stride: p.record_stride,
            snapshot_times: p.snapshot_times_ps.iter().map(|&t| ps(t)).collect(),
        };
        settings.validate()?;

        let an = &raw.analysis;
        if !(an.lip_sampling_ps > 0.0) {
            return Err(ConfigError::NonPhysical("analysis.lip_sampling_ps must be positive".into()).into());
        }
        if an.projection_count == 0 || an.lip_count == 0 {
            return Err(ConfigError::Invalid("analysis counts must be at least 1".into()).into());
        }
        let analysis = AnalysisSettings {
            projection_count: an.projection_count,
            projection_well: an.projection_well.as_deref().map(str::parse).transpose()?,
            lip_count: an.lip_count,
            lip_sampling: ps(an.lip_sampling_ps),
            lip_snapshot_times: an.lip_snapshot_times_ps.iter().map(|&t| ps(t)).collect(),
        };

        Ok(Self {
            raw,
            grid,
            mass,
            potential,
            initial,
            settings,
            analysis,
        })
    }

    /// The config with a different time step.
    pub fn with_dt_fs(&self, dt_fs: f64) -> Result<Self> {
        let mut raw = self.raw.clone();
        raw.propagation.dt_fs = dt_fs;
        Self::from_raw(raw, Path::new("."))
    }

    /// TOML text that parses back to an identical config.
    pub fn echo(&self) -> String {
        toml::to_string(&self.raw).expect("configuration is always serializable")
    }

    /// Sample times for LIP tracking over the propagation window.
    pub fn lip_times(&self) -> Vec<f64> {
        let s = &self.settings;
        let span = s.t_end - s.t_start;
        let count = (span / self.analysis.lip_sampling + 1e-9).floor() as usize;
        let mut times: Vec<f64> = (0..=count).map(|i| s.t_start + i as f64 * self.analysis.lip_sampling).collect();
        if span - count as f64 * self.analysis.lip_sampling > 1e-9 * self.analysis.lip_sampling {
            times.push(s.t_end);
        }
        times
    }
}

/// Observable optimized or tabulated by a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    FinalPopulation(crate::potentials::Channel),
    PeakPopulation(crate::potentials::Channel),
    DominantWeight,
    Weight(StateLabel),
    ResidualOscillation,
}

impl std::str::FromStr for Objective {
    type Err = ConfigError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        use crate::potentials::Channel;
        let channel = |c: &str| match c {
            "x" => Some(Channel::X),
            "a" => Some(Channel::A),
            "pi" => Some(Channel::Pi),
            _ => None,
        };
        let bad = || ConfigError::Invalid(format!("unknown objective `{s}`"));
        if let Some(c) = s.strip_prefix("final_population_") {
            return channel(c).map(Objective::FinalPopulation).ok_or_else(bad);
        }
        if let Some(c) = s.strip_prefix("peak_population_") {
            return channel(c).map(Objective::PeakPopulation).ok_or_else(bad);
        }
        if let Some(rest) = s.strip_prefix("weight_") {
            let (well, nu) = rest.split_once('_').ok_or_else(bad)?;
            return Ok(Objective::Weight(StateLabel {
                well: well.parse()?,
                nu: nu.parse().map_err(|_| bad())?,
            }));
        }
        match s {
            "dominant_weight" => Ok(Objective::DominantWeight),
            "residual_oscillation" => Ok(Objective::ResidualOscillation),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScan {
    pub base: String,
    pub objective: String,
    #[serde(default = "default_max_cells")]
    pub max_cells: usize,
    pub axes: Vec<RawAxis>,
}

fn default_max_cells() -> usize {
    256
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAxis {
    pub path: String,
    pub values: Vec<toml::Value>,
}

/// A grid of scenario variants around a base config.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub base: ScenarioConfig,
    pub objective: Objective,
    pub objective_name: String,
    pub axes: Vec<RawAxis>,
    pub max_cells: usize,
    base_table: toml::Table,
}

fn set_path(table: &mut toml::Table, path: &str, value: toml::Value) -> std::result::Result<(), ConfigError> {
    let mut parts = path.split('.').peekable();
    let mut current = table;
    while let Some(part) = parts.next() {
        if parts.peek().is_none() {
            match current.get_mut(part) {
                Some(slot) if !slot.is_table() => {
                    *slot = value;
                    return Ok(());
                }
                _ => break,
            }
        }
        match current.get_mut(part).and_then(|v| v.as_table_mut()) {
            Some(t) => current = t,
            None => break,
        }
    }
    Err(ConfigError::Invalid(format!("scan path `{path}` does not name a parameter of the base config")))
}

impl ScanSpec {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawScan = parse_table(text)?.try_into().map_err(serde_error)?;
        if raw.axes.is_empty() {
            return Err(ConfigError::Invalid("scan needs at least one axis".into()).into());
        }
        if raw.axes.iter().any(|a| a.values.is_empty()) {
            return Err(ConfigError::Invalid("scan axes need at least one value".into()).into());
        }
        let base = load_config(&resolve(base_dir, &raw.base)?)?;
        let base_table = parse_table(&base.echo())?;
        for axis in &raw.axes {
            set_path(&mut base_table.clone(), &axis.path, axis.values[0].clone())?;
        }
        let spec = Self {
            objective: raw.objective.parse()?,
            objective_name: raw.objective,
            axes: raw.axes,
            max_cells: raw.max_cells,
            base,
            base_table,
        };
        if spec.cell_count() > spec.max_cells {
            return Err(ConfigError::Invalid(format!(
                "scan has {} cells, more than max_cells = {}",
                spec.cell_count(),
                spec.max_cells
            ))
            .into());
        }
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// The scan with every cell using a different time step.
    pub fn with_dt_fs(mut self, dt_fs: f64) -> Result<Self> {
        self.base = self.base.with_dt_fs(dt_fs)?;
        set_path(&mut self.base_table, "propagation.dt_fs", toml::Value::Float(dt_fs))?;
        Ok(self)
    }

    pub fn cell_count(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Axis value indices of every cell, first axis varying slowest.
    pub fn cells(&self) -> Vec<Vec<usize>> {
        let mut cells = vec![Vec::new()];
        for axis in &self.axes {
            cells = cells
                .into_iter()
                .flat_map(|c| {
                    (0..axis.values.len()).map(move |i| {
                        let mut next = c.clone();
                        next.push(i);
                        next
                    })
                })
                .collect();
        }
        cells
    }

    /// The scenario for one cell.
    pub fn cell_config(&self, cell: &[usize]) -> Result<ScenarioConfig> {
        let mut table = self.base_table.clone();
        for (axis, &i) in self.axes.iter().zip(cell) {
            set_path(&mut table, &axis.path, axis.values[i].clone())?;
        }
        from_table(table, Path::new("."))
    }
}
