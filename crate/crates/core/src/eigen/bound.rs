use std::fmt;
use std::sync::Arc;

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd;
use faer::diag::Diag;
use faer::{Mat, Par};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;

/// Lowest bound states of a single-channel potential on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundStateSet {
    pub energies: Vec<f64>,
    /// Real grid functions normalized so that Σ|φ|² dr = 1.
    pub states: Vec<Vec<f64>>,
    pub grid: SpatialGrid,
    pub label: String,
}

impl BoundStateSet {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

const WINDOW_PAD: usize = 32;
const INITIAL_FRACTION: f64 = 0.125;
/// Window acceptance: requested states must have decayed this far at the window ends.
const WINDOW_TAIL: f64 = 1e-5;
/// Refinement stops once every ‖Hφ − Eφ‖ / ‖Hφ‖ is below this.
const REFINE_TOLERANCE: f64 = 1e-9;
const MAX_REFINE: usize = 30;

/// Fourier-grid Hamiltonian −(1/2m)∂² + V(R) with the kinetic term exact in
/// k-space on the periodic grid.
///
/// The lowest states are first found by dense diagonalization over the part
/// of the grid where V lies below an adaptive energy window, then polished on
/// the full periodic grid by block Davidson iterations (diagonal
/// preconditioner, Rayleigh–Ritz on [φ, correction]). If polishing stalls the
/// whole grid is diagonalized densely.
pub struct FourierGridHamiltonian {
    grid: SpatialGrid,
    mass: f64,
    /// Kinetic matrix element T(j, l) as a function of (j − l) mod n.
    kinetic_row: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FourierGridHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierGridHamiltonian")
            .field("n", &self.grid.len())
            .field("mass", &self.mass)
            .finish()
    }
}

impl Clone for FourierGridHamiltonian {
    fn clone(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            mass: self.mass,
            kinetic_row: self.kinetic_row.clone(),
            forward: Arc::clone(&self.forward),
            inverse: Arc::clone(&self.inverse),
        }
    }
}

impl FourierGridHamiltonian {
    pub fn new(grid: &SpatialGrid, mass: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::Input(format!("mass must be positive (got {mass})")));
        }
        let n = grid.len();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let mut buf: Vec<Complex64> = grid
            .wavenumbers()
            .iter()
            .map(|&k| Complex64::new(k * k / (2.0 * mass), 0.0))
            .collect();
        inverse.process(&mut buf);
        let kinetic_row = buf.iter().map(|z| z.re / n as f64).collect();
        Ok(Self {
            grid: grid.clone(),
            mass,
            kinetic_row,
            forward,
            inverse,
        })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn kinetic_element(&self, j: usize, l: usize) -> f64 {
        let n = self.grid.len();
        self.kinetic_row[(j + n - l) % n]
    }

    /// Applies H to a real grid function through FFTs.
    pub fn apply(&self, potential: &[f64], state: &[f64]) -> Vec<f64> {
        let n = self.grid.len();
        let mut buf: Vec<Complex64> = state.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward.process(&mut buf);
        let scale = 1.0 / (2.0 * self.mass * n as f64);
        for (z, &k) in buf.iter_mut().zip(self.grid.wavenumbers()) {
            *z *= k * k * scale;
        }
        self.inverse.process(&mut buf);
        buf.iter()
            .zip(potential.iter().zip(state))
            .map(|(z, (v, s))| z.re + v * s)
            .collect()
    }

    /// Dense diagonalization of the Hamiltonian restricted to `lo..hi`;
    /// returns ascending eigenvalues and the eigenvectors as columns.
    fn solve_window(&self, potential: &[f64], lo: usize, hi: usize) -> Result<(Vec<f64>, Mat<f64>)> {
        let m = hi - lo;
        let h = Mat::<f64>::from_fn(m, m, |a, b| {
            let t = self.kinetic_element(lo + a, lo + b);
            if a == b {
                t + potential[lo + a]
            } else {
                t
            }
        });
        symmetric_eigen(&h)
    }

    fn tails_small(vectors: &Mat<f64>, count: usize) -> bool {
        let m = vectors.nrows();
        let edge = (WINDOW_PAD / 2).min(m / 2).max(1);
        (0..count).all(|c| {
            let col = vectors.col(c);
            let peak = (0..m).map(|r| col[r].abs()).fold(0.0, f64::max);
            let small = |r: usize| col[r].abs() <= WINDOW_TAIL * peak;
            (0..edge).all(small) && (m - edge..m).all(small)
        })
    }

    /// The `count` lowest bound states of `potential`.
    pub fn bound_states(&self, potential: &[f64], count: usize) -> Result<BoundStateSet> {
        let n = self.grid.len();
        if potential.len() != n {
            return Err(Error::GridMismatch(format!(
                "potential has {} samples, grid has {n}",
                potential.len()
            )));
        }
        if count == 0 {
            return Err(Error::Input("bound state count must be at least 1".into()));
        }
        if potential.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("potential contains non-finite values".into()));
        }
        let edge = potential[0].min(potential[n - 1]);
        let vmin = potential.iter().copied().fold(f64::INFINITY, f64::min);
        if edge <= vmin {
            return Err(Error::Unbound {
                requested: count,
                available: 0,
            });
        }

        let mut frac = INITIAL_FRACTION;
        while frac < 1.0 {
            let thr = vmin + frac * (edge - vmin);
            let first = potential.iter().position(|&v| v <= thr).unwrap_or(0);
            let last = potential.iter().rposition(|&v| v <= thr).unwrap_or(n - 1);
            let (lo, hi) = (first.saturating_sub(WINDOW_PAD), (last + 1 + WINDOW_PAD).min(n));
            if lo == 0 && hi == n {
                break;
            }
            let (values, vectors) = self.solve_window(potential, lo, hi)?;
            if values.len() >= count && values[count - 1] < thr && Self::tails_small(&vectors, count) {
                let mut states: Vec<Vec<f64>> = (0..count)
                    .map(|c| {
                        let mut phi = vec![0.0; n];
                        for r in 0..vectors.nrows() {
                            phi[lo + r] = vectors[(r, c)];
                        }
                        phi
                    })
                    .collect();
                let mut energies = values[..count].to_vec();
                if self.refine(potential, &mut states, &mut energies)? && energies[count - 1] < edge {
                    return Ok(self.finish(energies, states));
                }
                break;
            }
            frac *= 2.0;
        }

        let (values, vectors) = self.solve_window(potential, 0, n)?;
        if values.len() < count || values[count - 1] >= edge {
            return Err(Error::Unbound {
                requested: count,
                available: values.iter().filter(|&&e| e < edge).count(),
            });
        }
        let states = (0..count)
            .map(|c| (0..n).map(|r| vectors[(r, c)]).collect())
            .collect();
        Ok(self.finish(values[..count].to_vec(), states))
    }

    /// Block Davidson polishing on the full grid with a growing subspace.
    /// Vectors are kept with unit Euclidean norm. Returns false if the
    /// tolerance was not reached.
    fn refine(&self, potential: &[f64], states: &mut [Vec<f64>], energies: &mut [f64]) -> Result<bool> {
        let n = self.grid.len();
        let count = states.len();
        let t0 = self.kinetic_row[0];
        let mut basis: Vec<Vec<f64>> = states.to_vec();
        orthonormalize(&mut basis);
        let mut hb: Vec<Vec<f64>> = basis.iter().map(|b| self.apply(potential, b)).collect();
        for _ in 0..MAX_REFINE {
            let k = basis.len();
            let small = Mat::<f64>::from_fn(k, k, |i, j| 0.5 * (dot(&basis[i], &hb[j]) + dot(&basis[j], &hb[i])));
            let (vals, vecs) = symmetric_eigen(&small)?;
            let mut worst: f64 = 0.0;
            let mut corrections = Vec::with_capacity(count);
            for c in 0..count {
                let mut x = vec![0.0; n];
                let mut hx = vec![0.0; n];
                for i in 0..k {
                    let w = vecs[(i, c)];
                    x.iter_mut().zip(&basis[i]).for_each(|(a, b)| *a += w * b);
                    hx.iter_mut().zip(&hb[i]).for_each(|(a, b)| *a += w * b);
                }
                let e = vals[c];
                let r: Vec<f64> = hx.iter().zip(&x).map(|(h, xi)| h - e * xi).collect();
                worst = worst.max(norm(&r) / norm(&hx).max(f64::MIN_POSITIVE));
                corrections.push(
                    r.iter()
                        .zip(potential)
                        .map(|(ri, v)| {
                            let den = t0 + v - e;
                            let floor = 1e-3 * t0;
                            ri / if den.abs() > floor { den } else { floor.copysign(den) }
                        })
                        .collect::<Vec<f64>>(),
                );
                states[c] = x;
                energies[c] = e;
            }
            if worst <= REFINE_TOLERANCE {
                return Ok(true);
            }
            for mut d in corrections {
                for _ in 0..2 {
                    for b in &basis {
                        let p = dot(b, &d);
                        d.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
                    }
                }
                let dn = norm(&d);
                if dn > 1e-12 {
                    d.iter_mut().for_each(|x| *x /= dn);
                    hb.push(self.apply(potential, &d));
                    basis.push(d);
                }
            }
        }
        Ok(false)
    }

    fn finish(&self, energies: Vec<f64>, states: Vec<Vec<f64>>) -> BoundStateSet {
        let dr = self.grid.dr();
        let states = states
            .into_iter()
            .map(|mut phi| {
                let scale = 1.0 / (norm(&phi) * dr.sqrt());
                let big = phi.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
                let scale = if big < 0.0 { -scale } else { scale };
                phi.iter_mut().for_each(|x| *x *= scale);
                phi
            })
            .collect();
        BoundStateSet {
            energies,
            states,
            grid: self.grid.clone(),
            label: String::new(),
        }
    }
}

/// Dense symmetric eigensolve. Always sequential: a thread-count dependent
/// blocking would change the low bits of the results.
fn symmetric_eigen(h: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let m = h.nrows();
    let mut s = Diag::<f64>::zeros(m);
    let mut u = Mat::<f64>::zeros(m, m);
    let scratch = evd::self_adjoint_evd_scratch::<f64>(m, evd::ComputeEigenvectors::Yes, Par::Seq, Default::default());
    evd::self_adjoint_evd(
        h.as_ref(),
        s.as_mut(),
        Some(u.as_mut()),
        Par::Seq,
        MemStack::new(&mut MemBuffer::new(scratch)),
        Default::default(),
    )
    .map_err(|e| Error::Input(format!("dense eigensolver failed: {e:?}")))?;
    let s = s.column_vector();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| s[i].total_cmp(&s[j]));
    let values = order.iter().map(|&i| s[i]).collect();
    let vectors = Mat::<f64>::from_fn(m, m, |r, c| u[(r, order[c])]);
    Ok((values, vectors))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn orthonormalize(vs: &mut [Vec<f64>]) {
    for i in 0..vs.len() {
        for _ in 0..2 {
            for j in 0..i {
                let p = dot(&vs[j], &vs[i]);
                let (head, tail) = vs.split_at_mut(i);
                tail[0].iter_mut().zip(&head[j]).for_each(|(x, y)| *x -= p * y);
            }
        }
        let nv = norm(&vs[i]);
        vs[i].iter_mut().for_each(|x| *x /= nv);
    }
}

/// The `count` lowest bound states of `potential` on `grid`.
pub fn bound_states(potential: &[f64], grid: &SpatialGrid, mass: f64, count: usize) -> Result<BoundStateSet> {
    FourierGridHamiltonian::new(grid, mass)?.bound_states(potential, count)
}
