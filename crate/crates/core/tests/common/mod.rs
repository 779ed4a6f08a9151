#![allow(dead_code)]

use lipdyn::eigen::eig3_symmetric;
use lipdyn::grid::SpatialGrid;
use lipdyn::oracle::brute_force_step;
use lipdyn::potentials::{CoupledPotential, PotentialCurve, PulseEnvelope, TabulatedCurve};
use lipdyn::propagator::{ChannelWavefunction, SplitOperator};
use lipdyn::units::{amu, cm1, ps};
use num_complex::Complex64;

/// A fast scenario on a coarse grid with inline curves.
pub const SMALL: &str = r#"
mass_amu = 11.5

[grid]
r_min = 2.0
r_max = 10.0
n = 128
units = "angstrom"

[curves.x]
kind = "harmonic"
omega_cm1 = 150.0
r_eq_angstrom = 3.0

[curves.a]
kind = "morse"
depth_cm1 = 8000.0
omega_e_cm1 = 120.0
r_eq_angstrom = 3.6

[curves.pi]
kind = "harmonic"
omega_cm1 = 100.0
r_eq_angstrom = 4.5
offset_cm1 = 10.0

[drive]
delta1_cm1 = 2010.0
delta2_cm1 = -2010.0

[drive.pulse1]
omega_cm1 = 733.0
center_ps = 25.5
width_ps = 5.5

[drive.pulse2]
omega_cm1 = 733.0
center_ps = 20.5
width_ps = 5.5

[initial]
well = "left"
nu = 0

[propagation]
dt_fs = 1.0
t_start_ps = 0.0
t_end_ps = 1.0
record_stride = 10
"#;

/// Pulse wide enough to act as a constant coupling over any test run.
pub fn constant_pulse(omega: f64) -> PulseEnvelope {
    PulseEnvelope::new(omega, 0.0, 1e12).unwrap()
}

pub fn flat(offset: f64) -> PotentialCurve {
    PotentialCurve::Harmonic {
        k: 0.0,
        r_eq: 0.0,
        offset,
    }
}

/// Result of one Landau–Zener crossing: simulated diabatic survival and the
/// analytic exp(−2πΩ²/α).
pub struct LandauZener {
    pub simulated: f64,
    pub analytic: f64,
}

/// A Gaussian packet on a flat X channel crosses a linear A channel
/// −F(R − R_c) under constant coupling Ω. Survival on the diabatic X state is
/// read off as the population of the adiabatic state that is X-like past the
/// crossing, once the whole packet is well beyond it.
pub fn landau_zener(force: f64, omega: f64) -> LandauZener {
    let n = 1024;
    let grid = SpatialGrid::new(0.0, 80.0, n).unwrap();
    let (rc, r0, sigma, p0, mass) = (35.0, 20.0, 2.5, 20.0, 1822.888486209);
    let line = TabulatedCurve::new(vec![0.0, 80.0], vec![force * rc, -force * (80.0 - rc)]).unwrap();
    let cp = CoupledPotential {
        x: flat(0.0),
        a: PotentialCurve::Tabulated(line),
        pi: flat(1.0),
        delta1: 0.0,
        delta2: 0.0,
        pulse1: constant_pulse(omega),
        pulse2: PulseEnvelope::off(),
    };
    let mut psi = ChannelWavefunction::zeros(n, 0.0);
    for j in 0..n {
        let x = grid.point(j) - r0;
        psi.channels[0][j] = Complex64::from_polar((-(x * x) / (4.0 * sigma * sigma)).exp(), p0 * x);
    }
    let norm = psi.norm(grid.dr()).sqrt();
    psi.channels[0].iter_mut().for_each(|z| *z /= norm);

    let v = p0 / mass;
    let dt = 0.5;
    let steps = (32.0 / v / dt) as usize;
    let mut op = SplitOperator::new(&cp, &grid, mass, dt).unwrap();
    for _ in 0..steps {
        op.step(&mut psi);
    }
    let mut simulated = 0.0;
    for j in 0..n {
        let e = eig3_symmetric(&cp.coupling_matrix(grid.point(j), psi.time).unwrap()).unwrap();
        let w = e.vectors[1];
        let z = psi.channels[0][j] * w[0] + psi.channels[1][j] * w[1] + psi.channels[2][j] * w[2];
        simulated += z.norm_sqr() * grid.dr();
    }
    let alpha = force * v;
    LandauZener {
        simulated,
        analytic: (-2.0 * std::f64::consts::PI * omega * omega / alpha).exp(),
    }
}

/// (Ω, P_A(t) simulated, sin²(Ωt)) sampled every step over two Rabi periods
/// for a spatially uniform packet on flat resonant X and A channels.
pub fn rabi_error(omega_cm1: f64, steps_per_period: usize) -> f64 {
    let n = 64;
    let grid = SpatialGrid::new(0.0, 10.0, n).unwrap();
    let omega = cm1(omega_cm1);
    let cp = CoupledPotential {
        x: flat(0.0),
        a: flat(0.0),
        pi: flat(0.0),
        delta1: 0.0,
        delta2: 0.0,
        pulse1: constant_pulse(omega),
        pulse2: PulseEnvelope::off(),
    };
    let mut psi = ChannelWavefunction::zeros(n, 0.0);
    let amp = (1.0 / (n as f64 * grid.dr())).sqrt();
    psi.channels[0].iter_mut().for_each(|z| *z = Complex64::new(amp, 0.0));
    // P_A = sin²(Ωt) has period π/Ω
    let period = std::f64::consts::PI / omega;
    let dt = period / steps_per_period as f64;
    let mut op = SplitOperator::new(&cp, &grid, amu(11.5), dt).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..2 * steps_per_period {
        op.step(&mut psi);
        let pa = psi.populations(grid.dr())[1];
        worst = worst.max((pa - (omega * psi.time).sin().powi(2)).abs());
    }
    worst
}

/// Small, slow three-channel double well used to compare the split-operator
/// stepper against the dense propagator.
pub fn toy_double_well() -> (CoupledPotential, SpatialGrid, f64) {
    let mass = amu(11.5);
    let grid = SpatialGrid::new(-15.0, 15.0, 64).unwrap();
    let h = |w: f64, r: f64, off: f64| PotentialCurve::harmonic_from_frequency(cm1(w), r, cm1(off), mass);
    let cp = CoupledPotential {
        x: h(1.0, -3.0, 0.0),
        a: h(0.8, 0.0, 1.0),
        pi: h(1.0, 3.0, 0.0),
        delta1: cm1(0.5),
        delta2: cm1(-0.5),
        pulse1: PulseEnvelope::new(cm1(2.0), ps(0.55), ps(0.3)).unwrap(),
        pulse2: PulseEnvelope::new(cm1(2.0), ps(0.45), ps(0.3)).unwrap(),
    };
    (cp, grid, mass)
}

/// Ground-state-like Gaussian in the X well of the toy system.
pub fn toy_initial(grid: &SpatialGrid, mass: f64) -> ChannelWavefunction {
    let omega = cm1(1.0);
    let width = 1.0 / (mass * omega).sqrt();
    let mut psi = ChannelWavefunction::zeros(grid.len(), 0.0);
    for j in 0..grid.len() {
        let x = (grid.point(j) + 3.0) / width;
        psi.channels[0][j] = Complex64::from_polar((-0.5 * x * x).exp(), 0.3 * x);
    }
    let norm = psi.norm(grid.dr()).sqrt();
    psi.channels[0].iter_mut().for_each(|z| *z /= norm);
    psi
}

pub fn distance(a: &ChannelWavefunction, b: &ChannelWavefunction, dr: f64) -> f64 {
    a.channels
        .iter()
        .flatten()
        .zip(b.channels.iter().flatten())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
        * dr.sqrt()
}

/// Largest state distance between split-operator and dense propagation
/// over `steps` steps of `dt`, restarting neither.
pub fn split_vs_dense(steps: usize, dt: f64) -> f64 {
    let (cp, grid, mass) = toy_double_well();
    let mut split = toy_initial(&grid, mass);
    let mut dense = split.clone();
    let mut op = SplitOperator::new(&cp, &grid, mass, dt).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..steps {
        op.step(&mut split);
        dense = brute_force_step(&dense, &cp, &grid, mass, dt).unwrap();
        worst = worst.max(distance(&split, &dense, grid.dr()));
    }
    worst
}
