//! Dense reference propagator for small grids.
//!
//! Builds the full 3n×3n Hamiltonian with the kinetic operator from the
//! closed-form periodic spectral differentiation matrix and exponentiates it
//! exactly. Shares no code path with the FFT-based stepper.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::potentials::CoupledPotential;
use crate::propagator::ChannelWavefunction;

/// Largest grid accepted by [`brute_force_step`].
pub const ORACLE_MAX_POINTS: usize = 128;

/// Second-derivative matrix of the periodic band-limited interpolant on an
/// even number of points spanning length `length`.
pub fn spectral_second_derivative(n: usize, length: f64) -> DMatrix<f64> {
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let scale = (2.0 * std::f64::consts::PI / length).powi(2);
    DMatrix::from_fn(n, n, |j, l| {
        let v = if j == l {
            -std::f64::consts::PI.powi(2) / (3.0 * h * h) - 1.0 / 6.0
        } else {
            let d = j as isize - l as isize;
            let sign = if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            -sign / (2.0 * (d as f64 * h / 2.0).sin().powi(2))
        };
        v * scale
    })
}

/// The 3n×3n Hamiltonian at time `t`, channel-major ordering.
pub fn dense_hamiltonian(cp: &CoupledPotential, grid: &SpatialGrid, mass: f64, t: f64) -> Result<DMatrix<f64>> {
    let n = grid.len();
    if n > ORACLE_MAX_POINTS {
        return Err(Error::OracleSize {
            n,
            limit: ORACLE_MAX_POINTS,
        });
    }
    let kinetic = spectral_second_derivative(n, n as f64 * grid.dr()) * (-0.5 / mass);
    let mut h = DMatrix::zeros(3 * n, 3 * n);
    for c in 0..3 {
        h.view_mut((c * n, c * n), (n, n)).copy_from(&kinetic);
    }
    for j in 0..n {
        let m = cp.coupling_matrix(grid.point(j), t)?;
        for a in 0..3 {
            for b in 0..3 {
                h[(a * n + j, b * n + j)] += m[a][b];
            }
        }
    }
    Ok(h)
}

/// Propagates `psi` by `dt` with exp(−i H(t + dt/2) dt).
pub fn brute_force_step(
    psi: &ChannelWavefunction,
    cp: &CoupledPotential,
    grid: &SpatialGrid,
    mass: f64,
    dt: f64,
) -> Result<ChannelWavefunction> {
    let n = grid.len();
    if psi.len() != n {
        return Err(Error::GridMismatch(format!("wavefunction has {} points, grid has {n}", psi.len())));
    }
    let h = dense_hamiltonian(cp, grid, mass, psi.time + 0.5 * dt)?;
    let eig = h.symmetric_eigen();
    let w = &eig.eigenvectors;
    let flat = DVector::from_iterator(3 * n, psi.channels.iter().flatten().copied());
    let re = w.transpose() * flat.map(|z| z.re);
    let im = w.transpose() * flat.map(|z| z.im);
    let coeff = DVector::from_iterator(
        3 * n,
        (0..3 * n).map(|k| Complex64::new(re[k], im[k]) * Complex64::from_polar(1.0, -eig.eigenvalues[k] * dt)),
    );
    let out_re = w * coeff.map(|z| z.re);
    let out_im = w * coeff.map(|z| z.im);
    let mut out = ChannelWavefunction::zeros(n, psi.time + dt);
    for c in 0..3 {
        for j in 0..n {
            out.channels[c][j] = Complex64::new(out_re[c * n + j], out_im[c * n + j]);
        }
    }
    Ok(out)
}
