//! Strang split-operator propagation of the three-channel wavefunction.
//!
//! One step over [t, t + dt] applies
//! `exp(−i V(t_m) dt/2) · exp(−i T dt) · exp(−i V(t_m) dt/2)` with
//! `t_m = t + dt/2`. The potential factors are exact 3×3 matrix exponentials
//! per grid point; the kinetic factor is diagonal in k-space.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::analysis::{Recorder, ScenarioResult};
use crate::eigen::bound_states;
use crate::error::{ConfigError, Error, Result};
use crate::grid::SpatialGrid;
use crate::potentials::{assemble, Channel, CoupledPotential, PulseEnvelope};
use crate::units::to_ps;

/// Ψ_X, Ψ_A, Ψ_Π on the grid at `time` (atomic units).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelWavefunction {
    pub channels: [Vec<Complex64>; 3],
    pub time: f64,
}

impl ChannelWavefunction {
    pub fn zeros(n: usize, time: f64) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n];
        Self {
            channels: [z.clone(), z.clone(), z],
            time,
        }
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels[0].is_empty()
    }

    pub fn channel(&self, c: Channel) -> &[Complex64] {
        &self.channels[c.index()]
    }

    /// P_i = Σ_j |Ψ_i(R_j)|² dr, summed in grid order.
    pub fn populations(&self, dr: f64) -> [f64; 3] {
        let mut p = [0.0; 3];
        for (pi, ch) in p.iter_mut().zip(&self.channels) {
            *pi = ch.iter().map(|z| z.norm_sqr()).sum::<f64>() * dr;
        }
        p
    }

    pub fn norm(&self, dr: f64) -> f64 {
        self.populations(dr).iter().sum()
    }

    pub fn is_finite(&self) -> bool {
        self.channels.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Which well of the pulse-free double well an initial state lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Well {
    /// X channel.
    Left,
    /// Π channel.
    Right,
}

impl Well {
    pub fn channel(self) -> Channel {
        match self {
            Well::Left => Channel::X,
            Well::Right => Channel::Pi,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Well::Left => "left",
            Well::Right => "right",
        }
    }
}

impl std::str::FromStr for Well {
    type Err = ConfigError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "left" => Ok(Well::Left),
            "right" => Ok(Well::Right),
            other => Err(ConfigError::Invalid(format!("well must be `left` or `right` (got `{other}`)"))),
        }
    }
}

impl fmt::Display for Well {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The ν-th bound state of the chosen well's pulse-free potential, placed in
/// its channel with the other channels empty.
pub fn initial_state(
    cp: &CoupledPotential,
    grid: &SpatialGrid,
    mass: f64,
    well: Well,
    nu: usize,
    time: f64,
) -> Result<ChannelWavefunction> {
    let channel = well.channel();
    let v = cp.channel_potential(channel, grid)?;
    let set = bound_states(&v, grid, mass, nu + 1)?;
    let mut psi = ChannelWavefunction::zeros(grid.len(), time);
    psi.channels[channel.index()] = set.states[nu].iter().map(|&x| Complex64::new(x, 0.0)).collect();
    Ok(psi)
}

/// Time stepping and recording schedule, atomic units.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationSettings {
    pub dt: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub record_stride: usize,
    pub snapshot_times: Vec<f64>,
}

impl PropagationSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(ConfigError::NonPhysical(format!("time step must be positive (got {})", self.dt)).into());
        }
        if !(self.t_end >= self.t_start) {
            return Err(ConfigError::Invalid("t_end must not precede t_start".into()).into());
        }
        if self.record_stride == 0 {
            return Err(ConfigError::Invalid("record_stride must be at least 1".into()).into());
        }
        Ok(())
    }

    /// Number of full steps and the length of a trailing partial step (0 if none).
    pub fn schedule(&self) -> (usize, f64) {
        let span = self.t_end - self.t_start;
        let ratio = span / self.dt;
        let full = (ratio + 1e-9).floor() as usize;
        let rest = span - full as f64 * self.dt;
        if rest > 1e-9 * self.dt {
            (full, rest)
        } else {
            (full, 0.0)
        }
    }
}

/// Precomputed split-operator stepper for one grid, mass, potential and dt.
pub struct SplitOperator {
    grid: SpatialGrid,
    mass: f64,
    dt: f64,
    diagonal: Vec<[f64; 3]>,
    pulse1: PulseEnvelope,
    pulse2: PulseEnvelope,
    /// exp(−i k² dt / 2m) − 1.
    kinetic: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    /// Upper triangle of U − 1 for the complex symmetric half-step propagator
    /// U at each point. Applying ψ + (U − 1)ψ instead of Uψ avoids the
    /// systematic rounding of entries near unit modulus that otherwise
    /// makes the norm drift over long runs.
    half: Vec<[Complex64; 6]>,
}

impl fmt::Debug for SplitOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SplitOperator")
            .field("n", &self.grid.len())
            .field("dt", &self.dt)
            .finish()
    }
}

const CHUNK: usize = 256;

impl SplitOperator {
    pub fn new(cp: &CoupledPotential, grid: &SpatialGrid, mass: f64, dt: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::Input(format!("mass must be positive (got {mass})")));
        }
        if !(dt != 0.0 && dt.is_finite()) {
            return Err(Error::Input(format!("time step must be finite and non-zero (got {dt})")));
        }
        let n = grid.len();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        let mut op = Self {
            grid: grid.clone(),
            mass,
            dt,
            diagonal: cp.diagonal_field(grid)?.rows,
            pulse1: cp.pulse1,
            pulse2: cp.pulse2,
            kinetic: Vec::new(),
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            half: vec![[Complex64::new(0.0, 0.0); 6]; n],
        };
        op.set_dt(dt);
        Ok(op)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn set_dt(&mut self, dt: f64) {
        self.dt = dt;
        let inv_2m = 0.5 / self.mass;
        self.kinetic = self.grid.wavenumbers().iter().map(|&k| phase_minus_one(k * k * inv_2m * dt)).collect();
    }

    fn build_half_step(&mut self, t_mid: f64) {
        let o1 = self.pulse1.envelope(t_mid);
        let o2 = self.pulse2.envelope(t_mid);
        let tau = 0.5 * self.dt;
        self.half
            .par_chunks_mut(CHUNK)
            .zip(self.diagonal.par_chunks(CHUNK))
            .for_each(|(out, diag)| {
                for (u, d) in out.iter_mut().zip(diag) {
                    *u = half_step_unitary(*d, o1, o2, tau);
                }
            });
    }

    fn apply_half_step(&self, psi: &mut ChannelWavefunction) {
        let [x, a, p] = &mut psi.channels;
        x.par_chunks_mut(CHUNK)
            .zip(a.par_chunks_mut(CHUNK))
            .zip(p.par_chunks_mut(CHUNK))
            .zip(self.half.par_chunks(CHUNK))
            .for_each(|(((xs, as_), ps), us)| {
                for (((x, a), p), u) in xs.iter_mut().zip(as_.iter_mut()).zip(ps.iter_mut()).zip(us) {
                    let (x0, a0, p0) = (*x, *a, *p);
                    *x = x0 + (u[0] * x0 + u[1] * a0 + u[2] * p0);
                    *a = a0 + (u[1] * x0 + u[3] * a0 + u[4] * p0);
                    *p = p0 + (u[2] * x0 + u[4] * a0 + u[5] * p0);
                }
            });
    }

    fn apply_kinetic(&mut self, psi: &mut ChannelWavefunction) {
        // 1/n is a power of two, so the scaling is exact
        let scale = 1.0 / self.grid.len() as f64;
        for ch in psi.channels.iter_mut() {
            self.forward.process_with_scratch(ch, &mut self.scratch);
            for (z, f) in ch.iter_mut().zip(&self.kinetic) {
                *z = (*z + *z * f) * scale;
            }
            self.inverse.process_with_scratch(ch, &mut self.scratch);
        }
    }

    /// Advances `psi` by one step of the current dt.
    pub fn step(&mut self, psi: &mut ChannelWavefunction) {
        let t_mid = psi.time + 0.5 * self.dt;
        self.build_half_step(t_mid);
        self.apply_half_step(psi);
        self.apply_kinetic(psi);
        self.apply_half_step(psi);
        psi.time += self.dt;
    }
}

/// exp(−iθ) − 1, accurate for small θ.
#[inline]
fn phase_minus_one(theta: f64) -> Complex64 {
    let s = (0.5 * theta).sin();
    Complex64::new(-2.0 * s * s, -theta.sin())
}

/// exp(−i M τ) − 1 for the rotating-frame matrix M with diagonal `d` and
/// couplings `o1`, `o2`; returns entries (00, 01, 02, 11, 12, 22).
#[inline]
fn half_step_unitary(d: [f64; 3], o1: f64, o2: f64, tau: f64) -> [Complex64; 6] {
    if o1 == 0.0 && o2 == 0.0 {
        let z = Complex64::new(0.0, 0.0);
        return [
            phase_minus_one(d[0] * tau),
            z,
            z,
            phase_minus_one(d[1] * tau),
            z,
            phase_minus_one(d[2] * tau),
        ];
    }
    let e = crate::eigen::eig3::jacobi(&assemble(d, o1, o2));
    let ph = [
        phase_minus_one(e.values[0] * tau),
        phase_minus_one(e.values[1] * tau),
        phase_minus_one(e.values[2] * tau),
    ];
    let v = &e.vectors;
    let entry = |i: usize, j: usize| ph[0] * (v[0][i] * v[0][j]) + ph[1] * (v[1][i] * v[1][j]) + ph[2] * (v[2][i] * v[2][j]);
    [entry(0, 0), entry(0, 1), entry(0, 2), entry(1, 1), entry(1, 2), entry(2, 2)]
}

/// Single step from scratch; prefer [`SplitOperator`] in loops.
pub fn step(
    psi: &ChannelWavefunction,
    cp: &CoupledPotential,
    grid: &SpatialGrid,
    mass: f64,
    dt: f64,
) -> Result<ChannelWavefunction> {
    let mut op = SplitOperator::new(cp, grid, mass, dt)?;
    let mut out = psi.clone();
    op.step(&mut out);
    if !out.is_finite() {
        return Err(Error::Propagation {
            step: 0,
            reason: "non-finite amplitude".into(),
        });
    }
    Ok(out)
}

/// Hook invoked during [`propagate`].
pub trait Observer {
    /// Called at step 0, every `record_stride` steps, and at the final time.
    fn record(&mut self, step: usize, psi: &ChannelWavefunction, grid: &SpatialGrid) -> Result<()>;

    /// Called at the steps closest to the requested snapshot times.
    fn snapshot(&mut self, _step: usize, _psi: &ChannelWavefunction, _grid: &SpatialGrid) -> Result<()> {
        Ok(())
    }
}

/// Runs the full schedule, recording populations (and whatever `recorder`
/// is configured for) plus any extra observers.
pub fn propagate(
    psi0: &ChannelWavefunction,
    cp: &CoupledPotential,
    grid: &SpatialGrid,
    mass: f64,
    settings: &PropagationSettings,
    mut recorder: Recorder,
    observers: &mut [&mut dyn Observer],
) -> Result<ScenarioResult> {
    settings.validate()?;
    if psi0.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "wavefunction has {} points, grid has {}",
            psi0.len(),
            grid.len()
        )));
    }
    let (full, rest) = settings.schedule();
    let total_steps = full + usize::from(rest > 0.0);
    let mut snapshot_steps: Vec<usize> = settings
        .snapshot_times
        .iter()
        .filter(|&&t| t >= settings.t_start - 1e-9 * settings.dt && t <= settings.t_end + 1e-9 * settings.dt)
        .map(|&t| {
            let s = ((t - settings.t_start) / settings.dt).round() as usize;
            s.min(total_steps)
        })
        .collect();
    snapshot_steps.sort_unstable();
    snapshot_steps.dedup();
    let mut next_snap = 0;

    let mut psi = psi0.clone();
    psi.time = settings.t_start;
    let mut op = SplitOperator::new(cp, grid, mass, settings.dt)?;

    let mut visit = |step: usize, psi: &ChannelWavefunction, next_snap: &mut usize, recorder: &mut Recorder, last: bool| -> Result<()> {
        if step % settings.record_stride == 0 || last {
            recorder.record(step, psi, grid)?;
            for o in observers.iter_mut() {
                o.record(step, psi, grid)?;
            }
        }
        while *next_snap < snapshot_steps.len() && snapshot_steps[*next_snap] == step {
            recorder.snapshot(step, psi, grid)?;
            for o in observers.iter_mut() {
                o.snapshot(step, psi, grid)?;
            }
            *next_snap += 1;
        }
        Ok(())
    };

    visit(0, &psi, &mut next_snap, &mut recorder, total_steps == 0)?;
    for step in 1..=total_steps {
        if step == full + 1 {
            op.set_dt(rest);
        }
        op.step(&mut psi);
        if step == total_steps {
            psi.time = settings.t_end;
        }
        if !psi.is_finite() {
            return Err(Error::Propagation {
                step,
                reason: format!("non-finite amplitude at t = {} ps", to_ps(psi.time)),
            });
        }
        visit(step, &psi, &mut next_snap, &mut recorder, step == total_steps)?;
    }
    Ok(recorder.finish(psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::eig3_symmetric;
    use crate::units::{cm1, ps};

    #[test]
    fn schedule_with_partial_step() {
        let s = PropagationSettings {
            dt: 1.0,
            t_start: 0.0,
            t_end: 10.5,
            record_stride: 1,
            snapshot_times: vec![],
        };
        assert_eq!(s.schedule(), (10, 0.5));
        let s = PropagationSettings { t_end: 10.0, ..s };
        assert_eq!(s.schedule(), (10, 0.0));
    }

    #[test]
    fn invalid_settings() {
        let s = PropagationSettings {
            dt: -1.0,
            t_start: 0.0,
            t_end: 1.0,
            record_stride: 1,
            snapshot_times: vec![],
        };
        assert!(s.validate().is_err());
        let s = PropagationSettings { dt: 1.0, record_stride: 0, ..s };
        assert!(s.validate().is_err());
    }

    #[test]
    fn half_step_is_unitary() {
        let d = [cm1(100.0), cm1(2500.0), cm1(-40.0)];
        let e = half_step_unitary(d, cm1(733.0), cm1(400.0), ps(1e-4));
        let one = Complex64::new(1.0, 0.0);
        let m = [[e[0] + one, e[1], e[2]], [e[1], e[3] + one, e[4]], [e[2], e[4], e[5] + one]];
        for i in 0..3 {
            for j in 0..3 {
                let s: Complex64 = (0..3).map(|k| m[k][i].conj() * m[k][j]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((s - expected).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn kinetic_factor_matches_phase() {
        let grid = SpatialGrid::new(2.0, 20.0, 128).unwrap();
        let mass = crate::units::amu(11.5);
        let cp = CoupledPotential {
            x: crate::potentials::PotentialCurve::Harmonic { k: 0.01, r_eq: 10.0, offset: 0.0 },
            a: crate::potentials::PotentialCurve::Harmonic { k: 0.01, r_eq: 10.0, offset: 0.0 },
            pi: crate::potentials::PotentialCurve::Harmonic { k: 0.01, r_eq: 10.0, offset: 0.0 },
            delta1: 0.0,
            delta2: 0.0,
            pulse1: PulseEnvelope::off(),
            pulse2: PulseEnvelope::off(),
        };
        let op = SplitOperator::new(&cp, &grid, mass, 7.0).unwrap();
        let reference = crate::grid::kinetic_phase(&grid, mass, 7.0);
        for (f, r) in op.kinetic.iter().zip(reference) {
            assert!((f + 1.0 - r).norm() < 1e-15);
        }
    }

    #[test]
    fn well_parsing() {
        assert_eq!("left".parse::<Well>().unwrap(), Well::Left);
        assert!("middle".parse::<Well>().is_err());
    }

    #[test]
    fn eig3_used_by_stepper_meets_contract() {
        let m = assemble([0.01, 0.02, 0.012], 0.003, 0.001);
        assert_eq!(eig3_symmetric(&m).unwrap(), crate::eigen::eig3::jacobi(&m));
    }
}
