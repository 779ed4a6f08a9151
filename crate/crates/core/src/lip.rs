//! Light-induced potentials: adiabatic surfaces of the field-dressed
//! potential matrix, the active surface, and its vibrational spectrum
//! followed through time by overlap continuity.

use crate::eigen::{bound_states, eigenfield, BoundStateSet, PointwiseEigenFrame};
use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::potentials::{matrix_field, Channel, CoupledPotential};

/// Adiabatic surfaces at one instant.
#[derive(Debug, Clone)]
pub struct LipSurface {
    pub time: f64,
    /// Sorted eigenvalues and continuity-fixed eigenvectors per grid point.
    pub frame: PointwiseEigenFrame,
    /// Index into `frame.values[j]` of the active surface at each point.
    pub active: Vec<usize>,
    active_vectors: Vec<[f64; 3]>,
}

impl LipSurface {
    /// The k-th sorted surface over the grid.
    pub fn surface(&self, k: usize) -> Vec<f64> {
        self.frame.values.iter().map(|v| v[k]).collect()
    }

    pub fn active_potential(&self) -> Vec<f64> {
        self.frame.values.iter().zip(&self.active).map(|(v, &k)| v[k]).collect()
    }

    /// Active eigenvector at each point, signs continuous along R.
    pub fn active_vectors(&self) -> &[[f64; 3]] {
        &self.active_vectors
    }
}

/// Diagonalizes the potential matrix on the grid at time `t`.
///
/// The active surface at each point is the lower of the two eigenvalues
/// whose eigenvectors are not the most A-like one. With both pulses off this
/// is exactly min(U_X, U_Π + Δ₁ + Δ₂).
pub fn lip_at(cp: &CoupledPotential, grid: &SpatialGrid, t: f64) -> Result<LipSurface> {
    let frame = eigenfield(&matrix_field(cp, grid, t)?)?;
    let a = Channel::A.index();
    let active: Vec<usize> = frame
        .vectors
        .iter()
        .map(|v| {
            let mut a_like = 0;
            for k in 1..3 {
                if v[k][a].abs() > v[a_like][a].abs() {
                    a_like = k;
                }
            }
            if a_like == 0 {
                1
            } else {
                0
            }
        })
        .collect();

    let mut active_vectors = Vec::with_capacity(grid.len());
    let mut prev: Option<[f64; 3]> = None;
    for (v, &k) in frame.vectors.iter().zip(&active) {
        let mut w = v[k];
        let flip = match prev {
            Some(p) if dot3(&p, &w).abs() >= 0.1 => dot3(&p, &w) < 0.0,
            _ => {
                let (x, pi) = (w[Channel::X.index()], w[Channel::Pi.index()]);
                if x.abs() >= pi.abs() {
                    x < 0.0
                } else {
                    pi < 0.0
                }
            }
        };
        if flip {
            w = [-w[0], -w[1], -w[2]];
        }
        prev = Some(w);
        active_vectors.push(w);
    }
    Ok(LipSurface {
        time: t,
        frame,
        active,
        active_vectors,
    })
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Lowest `count` vibrational states of the active surface at time `t`.
pub fn active_spectrum(cp: &CoupledPotential, grid: &SpatialGrid, mass: f64, t: f64, count: usize) -> Result<BoundStateSet> {
    let surface = lip_at(cp, grid, t)?;
    Ok(bound_states(&surface.active_potential(), grid, mass, count)?.with_label("active"))
}

/// Options for [`track_trajectories`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrackingOptions {
    /// Minimum |overlap| accepted as continuation of a state.
    pub overlap_threshold: f64,
    /// Overlaps closer than this to the runner-up make an assignment ambiguous.
    pub ambiguity: f64,
    /// Extra states solved above `count` so states can be followed upward.
    pub buffer: usize,
    /// Times (must be among the sample times) at which eigenfunctions are kept.
    pub snapshot_times: Vec<f64>,
}

impl Default for TrackingOptions {
    fn default() -> Self {
        Self {
            overlap_threshold: 0.5,
            ambiguity: 1e-3,
            buffer: 2,
            snapshot_times: Vec::new(),
        }
    }
}

/// Two trajectories exchanging their order in the sorted spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingEvent {
    /// Time of the sample after the exchange.
    pub time: f64,
    pub state_a: usize,
    pub state_b: usize,
    /// Smallest gap between the two sorted levels over the sample interval.
    pub min_gap: f64,
}

/// A sample where the continuation of a trajectory was not clear-cut.
#[derive(Debug, Clone, PartialEq)]
pub enum TrackingFlag {
    Ambiguous {
        time: f64,
        state: usize,
        candidates: (usize, usize),
        overlaps: (f64, f64),
    },
    LowOverlap {
        time: f64,
        state: usize,
        overlap: f64,
    },
}

/// Eigenfunctions of all trajectories at one snapshot time.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySnapshot {
    pub time: f64,
    /// `states[i]` belongs to trajectory `i`.
    pub states: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenTrajectorySet {
    pub times: Vec<f64>,
    /// `energies[i][s]`: energy of trajectory `i` at sample `s`.
    pub energies: Vec<Vec<f64>>,
    /// `sorted_index[i][s]`: position of trajectory `i` in the sorted spectrum.
    pub sorted_index: Vec<Vec<usize>>,
    pub snapshots: Vec<TrajectorySnapshot>,
    pub events: Vec<CrossingEvent>,
    pub flags: Vec<TrackingFlag>,
}

impl EigenTrajectorySet {
    pub fn count(&self) -> usize {
        self.energies.len()
    }

    /// Events in which trajectory `i` took part.
    pub fn events_of(&self, i: usize) -> impl Iterator<Item = &CrossingEvent> {
        self.events.iter().filter(move |e| e.state_a == i || e.state_b == i)
    }
}

fn spectrum_with_buffer(
    cp: &CoupledPotential,
    grid: &SpatialGrid,
    mass: f64,
    t: f64,
    count: usize,
    buffer: usize,
) -> Result<BoundStateSet> {
    let surface = lip_at(cp, grid, t)?.active_potential();
    let mut extra = buffer;
    loop {
        match bound_states(&surface, grid, mass, count + extra) {
            Err(Error::Unbound { .. }) if extra > 0 => extra -= 1,
            other => return other,
        }
    }
}

/// Follows the lowest `count` active-surface states across `times` by
/// maximal overlap between consecutive samples.
pub fn track_trajectories(
    cp: &CoupledPotential,
    grid: &SpatialGrid,
    mass: f64,
    times: &[f64],
    count: usize,
    options: &TrackingOptions,
) -> Result<EigenTrajectorySet> {
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Input("tracking times must be strictly ascending".into()));
    }
    if count == 0 {
        return Err(Error::Input("tracking count must be at least 1".into()));
    }
    let dr = grid.dr();
    let mut set = EigenTrajectorySet {
        times: times.to_vec(),
        energies: vec![Vec::with_capacity(times.len()); count],
        sorted_index: vec![Vec::with_capacity(times.len()); count],
        snapshots: Vec::new(),
        events: Vec::new(),
        flags: Vec::new(),
    };
    let wants_snapshot = |t: f64| {
        options
            .snapshot_times
            .iter()
            .any(|&s| (s - t).abs() <= 1e-9 * t.abs().max(1.0))
    };

    let mut prev_states: Vec<Vec<f64>> = Vec::new();
    let mut prev_index: Vec<usize> = Vec::new();
    let mut prev_time = 0.0;
    for (s, &t) in times.iter().enumerate() {
        let spec = spectrum_with_buffer(cp, grid, mass, t, count, options.buffer)?;
        let index: Vec<usize> = if s == 0 {
            (0..count).collect()
        } else {
            assign(&prev_states, &spec, dr, t, options, &mut set.flags)
        };
        let states: Vec<Vec<f64>> = index
            .iter()
            .zip(&prev_states)
            .map(|(&k, p)| aligned(&spec.states[k], p))
            .chain(index.iter().skip(prev_states.len()).map(|&k| spec.states[k].clone()))
            .collect();

        if s > 0 {
            for i in 0..count {
                for j in i + 1..count {
                    let before = prev_index[i] < prev_index[j];
                    let after = index[i] < index[j];
                    if before != after {
                        let (lo, hi) = (index[i].min(index[j]), index[i].max(index[j]));
                        let min_gap = minimal_gap(cp, grid, mass, prev_time, t, lo, hi, count, options.buffer)?;
                        set.events.push(CrossingEvent {
                            time: t,
                            state_a: i,
                            state_b: j,
                            min_gap,
                        });
                    }
                }
            }
        }
        for i in 0..count {
            set.energies[i].push(spec.energies[index[i]]);
            set.sorted_index[i].push(index[i]);
        }
        if wants_snapshot(t) {
            set.snapshots.push(TrajectorySnapshot {
                time: t,
                states: states.clone(),
            });
        }
        prev_states = states;
        prev_index = index;
        prev_time = t;
    }
    Ok(set)
}

fn overlap(a: &[f64], b: &[f64], dr: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * dr
}

fn aligned(state: &[f64], reference: &[f64]) -> Vec<f64> {
    if overlap(state, reference, 1.0) < 0.0 {
        state.iter().map(|x| -x).collect()
    } else {
        state.to_vec()
    }
}

/// Greedy assignment of previous trajectories to new sorted states in order
/// of decreasing |overlap|.
fn assign(
    prev: &[Vec<f64>],
    spec: &BoundStateSet,
    dr: f64,
    t: f64,
    options: &TrackingOptions,
    flags: &mut Vec<TrackingFlag>,
) -> Vec<usize> {
    let m = spec.len();
    let ov: Vec<Vec<f64>> = prev
        .iter()
        .map(|p| spec.states.iter().map(|q| overlap(p, q, dr).abs()).collect())
        .collect();

    for (i, row) in ov.iter().enumerate() {
        let mut best = (0usize, f64::NEG_INFINITY);
        let mut second = (0usize, f64::NEG_INFINITY);
        for (k, &o) in row.iter().enumerate() {
            if o > best.1 {
                second = best;
                best = (k, o);
            } else if o > second.1 {
                second = (k, o);
            }
        }
        if m > 1 && best.1 - second.1 < options.ambiguity {
            flags.push(TrackingFlag::Ambiguous {
                time: t,
                state: i,
                candidates: (best.0, second.0),
                overlaps: (best.1, second.1),
            });
        }
    }

    let mut pairs: Vec<(usize, usize)> = (0..prev.len()).flat_map(|i| (0..m).map(move |k| (i, k))).collect();
    pairs.sort_by(|a, b| ov[b.0][b.1].total_cmp(&ov[a.0][a.1]).then(a.cmp(b)));
    let mut index = vec![usize::MAX; prev.len()];
    let mut taken = vec![false; m];
    for (i, k) in pairs {
        if index[i] == usize::MAX && !taken[k] {
            index[i] = k;
            taken[k] = true;
            if ov[i][k] < options.overlap_threshold {
                flags.push(TrackingFlag::LowOverlap {
                    time: t,
                    state: i,
                    overlap: ov[i][k],
                });
            }
        }
    }
    index
}

#[allow(clippy::too_many_arguments)]
fn minimal_gap(
    cp: &CoupledPotential,
    grid: &SpatialGrid,
    mass: f64,
    t0: f64,
    t1: f64,
    lo: usize,
    hi: usize,
    count: usize,
    buffer: usize,
) -> Result<f64> {
    let gap = |t: f64| -> Result<f64> {
        let spec = spectrum_with_buffer(cp, grid, mass, t, count.max(hi + 1), buffer)?;
        Ok(spec.energies[hi] - spec.energies[lo])
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (t0, t1);
    let mut best = gap(a)?.min(gap(b)?);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (gap(c)?, gap(d)?);
    for _ in 0..24 {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = gap(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = gap(d)?;
        }
    }
    best = best.min(gc).min(gd);
    Ok(best)
}
