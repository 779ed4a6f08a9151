//! Observables computed from wavefunctions and completed runs.

use std::fmt;

use crate::eigen::{bound_states, BoundStateSet};
use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::lip::{active_spectrum, lip_at};
use crate::potentials::{Channel, CoupledPotential};
use crate::propagator::{ChannelWavefunction, Observer, Well};

/// Grid points on each side inspected by the boundary watchdog.
pub const EDGE_POINTS: usize = 5;
/// Edge probability above which a run counts as boundary-contaminated.
pub const EDGE_THRESHOLD: f64 = 1e-6;
/// Length of the trailing window for the residual-oscillation measure.
pub const RESIDUAL_WINDOW_PS: f64 = 5.0;

/// (P_X, P_A, P_Π).
pub fn channel_populations(psi: &ChannelWavefunction, grid: &SpatialGrid) -> [f64; 3] {
    psi.populations(grid.dr())
}

/// |⟨φ_ν, Ψ_channel⟩|² for every state in `basis`.
pub fn vibrational_projection(psi: &ChannelWavefunction, basis: &BoundStateSet, channel: Channel) -> Result<Vec<f64>> {
    let amp = psi.channel(channel);
    if amp.len() != basis.grid.len() {
        return Err(Error::GridMismatch(format!(
            "wavefunction has {} points, basis grid has {}",
            amp.len(),
            basis.grid.len()
        )));
    }
    let dr = basis.grid.dr();
    Ok(basis
        .states
        .iter()
        .map(|phi| {
            let (mut re, mut im) = (0.0, 0.0);
            for (p, z) in phi.iter().zip(amp) {
                re += p * z.re;
                im += p * z.im;
            }
            (re * re + im * im) * dr * dr
        })
        .collect())
}

/// Weights of the state, rotated pointwise onto the active adiabatic
/// surface, on the lowest `count` vibrational states of that surface.
pub fn lip_following(
    psi: &ChannelWavefunction,
    cp: &CoupledPotential,
    grid: &SpatialGrid,
    mass: f64,
    t: f64,
    count: usize,
) -> Result<Vec<f64>> {
    if psi.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "wavefunction has {} points, grid has {}",
            psi.len(),
            grid.len()
        )));
    }
    let surface = lip_at(cp, grid, t)?;
    let spectrum = active_spectrum(cp, grid, mass, t, count)?;
    let dr = grid.dr();
    let adiabatic: Vec<(f64, f64)> = surface
        .active_vectors()
        .iter()
        .enumerate()
        .map(|(j, w)| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (c, wc) in w.iter().enumerate() {
                re += wc * psi.channels[c][j].re;
                im += wc * psi.channels[c][j].im;
            }
            (re, im)
        })
        .collect();
    Ok(spectrum
        .states
        .iter()
        .map(|phi| {
            let (mut re, mut im) = (0.0, 0.0);
            for (p, (a, b)) in phi.iter().zip(&adiabatic) {
                re += p * a;
                im += p * b;
            }
            (re * re + im * im) * dr * dr
        })
        .collect())
}

/// |Ψ_i|² per channel and their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySnapshot {
    pub time: f64,
    pub channels: [Vec<f64>; 3],
    pub total: Vec<f64>,
}

pub fn density_snapshot(psi: &ChannelWavefunction) -> DensitySnapshot {
    let channels: [Vec<f64>; 3] = std::array::from_fn(|c| psi.channels[c].iter().map(|z| z.norm_sqr()).collect());
    let total = (0..psi.len())
        .map(|j| channels[0][j] + channels[1][j] + channels[2][j])
        .collect();
    DensitySnapshot {
        time: psi.time,
        channels,
        total,
    }
}

/// Local maxima whose topographic prominence is at least `fraction` of the
/// global maximum.
pub fn count_peaks(values: &[f64], fraction: f64) -> usize {
    let Some(&global) = values.iter().max_by(|a, b| a.total_cmp(b)) else {
        return 0;
    };
    let floor = values.iter().copied().fold(f64::INFINITY, f64::min);
    let n = values.len();
    let mut count = 0;
    let mut i = 0;
    while i < n {
        // treat a plateau as one candidate
        let mut end = i;
        while end + 1 < n && values[end + 1] == values[i] {
            end += 1;
        }
        let v = values[i];
        let left_lower = i == 0 || values[i - 1] < v;
        let right_lower = end + 1 == n || values[end + 1] < v;
        if left_lower && right_lower {
            let mut left_min = v;
            let mut left_higher = false;
            for &x in values[..i].iter().rev() {
                if x > v {
                    left_higher = true;
                    break;
                }
                left_min = left_min.min(x);
            }
            let mut right_min = v;
            let mut right_higher = false;
            for &x in &values[end + 1..] {
                if x > v {
                    right_higher = true;
                    break;
                }
                right_min = right_min.min(x);
            }
            let base = match (left_higher, right_higher) {
                (true, true) => left_min.max(right_min),
                (true, false) => left_min,
                (false, true) => right_min,
                (false, false) => floor,
            };
            if v == global || v - base >= fraction * global {
                count += 1;
            }
        }
        i = end + 1;
    }
    count
}

/// A vibrational level ν of one well.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateLabel {
    pub well: Well,
    pub nu: usize,
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.well, self.nu)
    }
}

/// Outcome of the boundary watchdog.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundaryStatus {
    pub max_edge_probability: f64,
    /// Time and edge probability of the first recorded sample over threshold.
    pub first_contamination: Option<(f64, f64)>,
}

impl BoundaryStatus {
    pub fn contaminated(&self) -> bool {
        self.first_contamination.is_some()
    }
}

/// Probability within `points` grid points of either edge (the larger side).
pub fn edge_probability(psi: &ChannelWavefunction, dr: f64, points: usize) -> f64 {
    let n = psi.len();
    let points = points.min(n);
    let side = |range: std::ops::Range<usize>| -> f64 {
        psi.channels
            .iter()
            .map(|ch| ch[range.clone()].iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            * dr
    };
    side(0..points).max(side(n - points..n))
}

/// Per-time projections onto one channel's basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSeries {
    pub channel: Channel,
    pub basis: BoundStateSet,
    /// `weights[s][ν]` at recorded sample `s`.
    pub weights: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Metadata {
    pub config_echo: String,
    pub code_version: String,
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub grid: SpatialGrid,
    pub initial: StateLabel,
    pub times: Vec<f64>,
    pub populations: Vec<[f64; 3]>,
    pub norms: Vec<f64>,
    pub projections: Option<ProjectionSeries>,
    pub snapshots: Vec<DensitySnapshot>,
    /// Largest recorded population of each channel.
    pub peak_populations: [f64; 3],
    pub boundary: BoundaryStatus,
    pub final_state: ChannelWavefunction,
    pub metadata: Metadata,
}

/// Collects the standard observables during propagation.
#[derive(Debug, Clone)]
pub struct Recorder {
    grid: SpatialGrid,
    initial: StateLabel,
    projections: Option<ProjectionSeries>,
    times: Vec<f64>,
    populations: Vec<[f64; 3]>,
    norms: Vec<f64>,
    snapshots: Vec<DensitySnapshot>,
    peak: [f64; 3],
    boundary: BoundaryStatus,
}

impl Recorder {
    pub fn new(grid: &SpatialGrid, initial: StateLabel) -> Self {
        Self {
            grid: grid.clone(),
            initial,
            projections: None,
            times: Vec::new(),
            populations: Vec::new(),
            norms: Vec::new(),
            snapshots: Vec::new(),
            peak: [0.0; 3],
            boundary: BoundaryStatus::default(),
        }
    }

    /// Also records projections of `channel` onto `basis` at every sample.
    pub fn with_projection(mut self, channel: Channel, basis: BoundStateSet) -> Self {
        self.projections = Some(ProjectionSeries {
            channel,
            basis,
            weights: Vec::new(),
        });
        self
    }

    pub fn finish(self, final_state: ChannelWavefunction) -> ScenarioResult {
        ScenarioResult {
            grid: self.grid,
            initial: self.initial,
            times: self.times,
            populations: self.populations,
            norms: self.norms,
            projections: self.projections,
            snapshots: self.snapshots,
            peak_populations: self.peak,
            boundary: self.boundary,
            final_state,
            metadata: Metadata {
                config_echo: String::new(),
                code_version: env!("CARGO_PKG_VERSION").to_string(),
            },
        }
    }
}

impl Observer for Recorder {
    fn record(&mut self, _step: usize, psi: &ChannelWavefunction, grid: &SpatialGrid) -> Result<()> {
        let p = channel_populations(psi, grid);
        self.times.push(psi.time);
        self.populations.push(p);
        self.norms.push(p[0] + p[1] + p[2]);
        for (peak, v) in self.peak.iter_mut().zip(p) {
            *peak = peak.max(v);
        }
        if let Some(series) = self.projections.as_mut() {
            series.weights.push(vibrational_projection(psi, &series.basis, series.channel)?);
        }
        let edge = edge_probability(psi, grid.dr(), EDGE_POINTS);
        self.boundary.max_edge_probability = self.boundary.max_edge_probability.max(edge);
        if edge > EDGE_THRESHOLD && self.boundary.first_contamination.is_none() {
            self.boundary.first_contamination = Some((psi.time, edge));
        }
        Ok(())
    }

    fn snapshot(&mut self, _step: usize, psi: &ChannelWavefunction, _grid: &SpatialGrid) -> Result<()> {
        self.snapshots.push(density_snapshot(psi));
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub initial: StateLabel,
    pub dominant: StateLabel,
    /// Projection weight of the dominant state.
    pub dominant_weight: f64,
    pub final_populations: [f64; 3],
    /// Peak-to-peak variation of the dominant well's channel population over
    /// the trailing window.
    pub residual_oscillation: f64,
    pub left_weights: Vec<f64>,
    pub right_weights: Vec<f64>,
}

impl TransferReport {
    /// Final population of a well's channel.
    pub fn well_population(&self, well: Well) -> f64 {
        self.final_populations[well.channel().index()]
    }
}

/// Bases of the two pulse-free wells with `count` states each.
pub fn well_bases(cp: &CoupledPotential, grid: &SpatialGrid, mass: f64, count: usize) -> Result<(BoundStateSet, BoundStateSet)> {
    let left = bound_states(&cp.channel_potential(Channel::X, grid)?, grid, mass, count)?.with_label("left");
    let right = bound_states(&cp.channel_potential(Channel::Pi, grid)?, grid, mass, count)?.with_label("right");
    Ok((left, right))
}

/// Final dominant (well, ν) and related figures of merit; `count` states per
/// well are considered.
pub fn transfer_report(
    result: &ScenarioResult,
    cp: &CoupledPotential,
    grid: &SpatialGrid,
    mass: f64,
    count: usize,
) -> Result<TransferReport> {
    if !result.grid.same_as(grid) || result.final_state.len() != grid.len() {
        return Err(Error::GridMismatch("result was computed on a different grid".into()));
    }
    let (left, right) = well_bases(cp, grid, mass, count)?;
    let psi = &result.final_state;
    let left_weights = vibrational_projection(psi, &left, Channel::X)?;
    let right_weights = vibrational_projection(psi, &right, Channel::Pi)?;
    let mut dominant = StateLabel { well: Well::Left, nu: 0 };
    let mut dominant_weight = f64::NEG_INFINITY;
    for (well, weights) in [(Well::Left, &left_weights), (Well::Right, &right_weights)] {
        for (nu, &w) in weights.iter().enumerate() {
            if w > dominant_weight {
                dominant = StateLabel { well, nu };
                dominant_weight = w;
            }
        }
    }
    let final_populations = channel_populations(psi, grid);
    let residual_oscillation = residual_oscillation(result, dominant.well.channel());
    Ok(TransferReport {
        initial: result.initial,
        dominant,
        dominant_weight,
        final_populations,
        residual_oscillation,
        left_weights,
        right_weights,
    })
}

/// Peak-to-peak of a channel population over the final
/// [`RESIDUAL_WINDOW_PS`] of recorded samples.
pub fn residual_oscillation(result: &ScenarioResult, channel: Channel) -> f64 {
    let Some(&t_end) = result.times.last() else {
        return 0.0;
    };
    let start = t_end - crate::units::ps(RESIDUAL_WINDOW_PS);
    let c = channel.index();
    let (lo, hi) = result
        .times
        .iter()
        .zip(&result.populations)
        .filter(|(&t, _)| t >= start)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, p)| (lo.min(p[c]), hi.max(p[c])));
    hi - lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn peaks_with_prominence() {
        let v = [0.0, 1.0, 0.5, 0.9, 0.0, 0.02, 0.01, 0.3, 0.0];
        assert_eq!(count_peaks(&v, 0.05), 3);
        assert_eq!(count_peaks(&v, 0.35), 2);
        assert_eq!(count_peaks(&[1.0, 1.0, 1.0], 0.05), 1);
        assert_eq!(count_peaks(&[], 0.05), 0);
    }

    #[test]
    fn equal_split_populations() {
        let grid = SpatialGrid::new(0.0, 64.0, 64).unwrap();
        let mut psi = ChannelWavefunction::zeros(64, 0.0);
        let a = (1.0f64 / (3.0 * 64.0)).sqrt();
        for ch in psi.channels.iter_mut() {
            ch.iter_mut().for_each(|z| *z = Complex64::new(0.0, a));
        }
        let p = channel_populations(&psi, &grid);
        for x in p {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
        let d = density_snapshot(&psi);
        assert!((d.total.iter().sum::<f64>() * grid.dr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn edge_probability_sides() {
        let mut psi = ChannelWavefunction::zeros(64, 0.0);
        psi.channels[1][62] = Complex64::new(0.1, 0.0);
        assert!((edge_probability(&psi, 1.0, 5) - 0.01).abs() < 1e-15);
        assert_eq!(edge_probability(&psi, 1.0, 1), 0.0);
    }
}
