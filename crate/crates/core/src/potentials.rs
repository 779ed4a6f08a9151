//! Diabatic curves, Gaussian pulse envelopes and the three-channel
//! potential-plus-coupling matrix in the rotating frame.
//!
//! All quantities are in atomic units. Channel order is X, A, Π.

use rayon::prelude::*;

use crate::error::{ConfigError, Error, Result};
use crate::grid::SpatialGrid;

/// Real symmetric 3×3 matrix, row-major.
pub type Matrix3 = [[f64; 3]; 3];

pub const N_CHANNELS: usize = 3;

/// Envelope values below this are treated as exactly zero.
pub const ENVELOPE_CUTOFF: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    X,
    A,
    Pi,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::X, Channel::A, Channel::Pi];

    pub fn index(self) -> usize {
        match self {
            Channel::X => 0,
            Channel::A => 1,
            Channel::Pi => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Channel::X => "X",
            Channel::A => "A",
            Channel::Pi => "Pi",
        }
    }
}

/// Natural cubic spline through tabulated points.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCurve {
    r: Vec<f64>,
    v: Vec<f64>,
    second: Vec<f64>,
}

impl TabulatedCurve {
    pub fn new(r: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if r.len() != v.len() {
            return Err(ConfigError::Invalid(format!(
                "tabulated curve has {} R values but {} energies",
                r.len(),
                v.len()
            ))
            .into());
        }
        if r.len() < 2 {
            return Err(ConfigError::Invalid("tabulated curve needs at least two points".into()).into());
        }
        if r.iter().chain(v.iter()).any(|x| !x.is_finite()) {
            return Err(ConfigError::Invalid("tabulated curve contains non-finite values".into()).into());
        }
        if r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::Invalid("tabulated R values must be strictly ascending".into()).into());
        }
        let second = natural_spline_second_derivatives(&r, &v);
        Ok(Self { r, v, second })
    }

    pub fn nodes(&self) -> (&[f64], &[f64]) {
        (&self.r, &self.v)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.r[0], self.r[self.r.len() - 1])
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&x) {
            return Err(Error::Domain { r: x, min: lo, max: hi });
        }
        let i = match self.r.partition_point(|&ri| ri <= x) {
            0 => 0,
            p if p >= self.r.len() => self.r.len() - 2,
            p => p - 1,
        };
        let h = self.r[i + 1] - self.r[i];
        let a = (self.r[i + 1] - x) / h;
        let b = (x - self.r[i]) / h;
        Ok(a * self.v[i]
            + b * self.v[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h / 6.0)
    }
}

fn natural_spline_second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut y2 = vec![0.0; n];
    if n < 3 {
        return y2;
    }
    // tridiagonal sweep with natural end conditions
    let mut u = vec![0.0; n];
    for i in 1..n - 1 {
        let sig = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
        let p = sig * y2[i - 1] + 2.0;
        y2[i] = (sig - 1.0) / p;
        let d = (y[i + 1] - y[i]) / (x[i + 1] - x[i]) - (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
        u[i] = (6.0 * d / (x[i + 1] - x[i - 1]) - sig * u[i - 1]) / p;
    }
    y2[n - 1] = 0.0;
    for i in (0..n - 1).rev() {
        y2[i] = y2[i] * y2[i + 1] + u[i];
    }
    y2
}

/// One diabatic electronic potential.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialCurve {
    /// V0 + De (1 − e^{−a(R−Re)})²
    Morse { depth: f64, a: f64, r_eq: f64, offset: f64 },
    /// V0 + k (R − Re)² / 2
    Harmonic { k: f64, r_eq: f64, offset: f64 },
    Tabulated(TabulatedCurve),
}

impl PotentialCurve {
    /// Morse curve whose harmonic frequency at the minimum is `omega_e` for `mass`.
    pub fn morse_from_frequency(depth: f64, omega_e: f64, r_eq: f64, offset: f64, mass: f64) -> Self {
        let a = omega_e * (mass / (2.0 * depth)).sqrt();
        PotentialCurve::Morse { depth, a, r_eq, offset }
    }

    /// Harmonic curve with angular frequency `omega` for `mass`.
    pub fn harmonic_from_frequency(omega: f64, r_eq: f64, offset: f64, mass: f64) -> Self {
        PotentialCurve::Harmonic {
            k: mass * omega * omega,
            r_eq,
            offset,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PotentialCurve::Morse { depth, a, r_eq, offset } => {
                if !(depth > 0.0 && a > 0.0 && r_eq.is_finite() && offset.is_finite()) {
                    return Err(ConfigError::NonPhysical(format!(
                        "Morse curve needs De > 0 and a > 0 (got De = {depth}, a = {a})"
                    ))
                    .into());
                }
            }
            PotentialCurve::Harmonic { k, r_eq, offset } => {
                if !(k >= 0.0 && r_eq.is_finite() && offset.is_finite()) {
                    return Err(ConfigError::NonPhysical(format!("harmonic curve needs k >= 0 (got {k})")).into());
                }
            }
            PotentialCurve::Tabulated(_) => {}
        }
        Ok(())
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        match self {
            PotentialCurve::Morse { depth, a, r_eq, offset } => {
                let s = 1.0 - (-a * (r - r_eq)).exp();
                Ok(offset + depth * s * s)
            }
            PotentialCurve::Harmonic { k, r_eq, offset } => {
                let d = r - r_eq;
                Ok(offset + 0.5 * k * d * d)
            }
            PotentialCurve::Tabulated(t) => t.eval(r),
        }
    }

    pub fn sample(&self, grid: &SpatialGrid) -> Result<Vec<f64>> {
        (0..grid.len()).map(|j| self.eval(grid.point(j))).collect()
    }
}

/// Gaussian envelope Ω(t) = Ω₀ exp{−[(t − t_c)/T]²}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseEnvelope {
    pub omega0: f64,
    pub t_center: f64,
    pub width: f64,
}

impl PulseEnvelope {
    pub fn new(omega0: f64, t_center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(ConfigError::NonPhysical(format!("pulse width must be positive (got {width})")).into());
        }
        if !omega0.is_finite() || !t_center.is_finite() {
            return Err(ConfigError::Invalid("pulse parameters must be finite".into()).into());
        }
        Ok(Self { omega0, t_center, width })
    }

    /// A pulse that is identically zero.
    pub fn off() -> Self {
        Self {
            omega0: 0.0,
            t_center: 0.0,
            width: 1.0,
        }
    }

    pub fn envelope(&self, t: f64) -> f64 {
        let x = (t - self.t_center) / self.width;
        let v = self.omega0 * (-x * x).exp();
        if v.abs() < ENVELOPE_CUTOFF {
            0.0
        } else {
            v
        }
    }
}

/// Three diabatic curves, two detunings, two pulses: the full rotating-frame
/// potential matrix
///
/// ```text
/// | U_X      Ω₁         0            |
/// | Ω₁       U_A + Δ₁   Ω₂           |
/// | 0        Ω₂         U_Π + Δ₁+Δ₂  |
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledPotential {
    pub x: PotentialCurve,
    pub a: PotentialCurve,
    pub pi: PotentialCurve,
    pub delta1: f64,
    pub delta2: f64,
    pub pulse1: PulseEnvelope,
    pub pulse2: PulseEnvelope,
}

impl CoupledPotential {
    pub fn curve(&self, channel: Channel) -> &PotentialCurve {
        match channel {
            Channel::X => &self.x,
            Channel::A => &self.a,
            Channel::Pi => &self.pi,
        }
    }

    /// Diagonal entries at R (time independent).
    pub fn diagonal(&self, r: f64) -> Result<[f64; 3]> {
        Ok([
            self.x.eval(r)?,
            self.a.eval(r)? + self.delta1,
            self.pi.eval(r)? + (self.delta1 + self.delta2),
        ])
    }

    pub fn couplings(&self, t: f64) -> (f64, f64) {
        (self.pulse1.envelope(t), self.pulse2.envelope(t))
    }

    pub fn coupling_matrix(&self, r: f64, t: f64) -> Result<Matrix3> {
        let d = self.diagonal(r)?;
        let (o1, o2) = self.couplings(t);
        Ok(assemble(d, o1, o2))
    }

    /// Diagonal entries on every grid point, channel-major.
    pub fn diagonal_field(&self, grid: &SpatialGrid) -> Result<DiagonalField> {
        let rows = (0..grid.len())
            .map(|j| self.diagonal(grid.point(j)))
            .collect::<Result<Vec<_>>>()?;
        Ok(DiagonalField { rows })
    }

    /// Potential seen by a single channel with the pulses off.
    pub fn channel_potential(&self, channel: Channel, grid: &SpatialGrid) -> Result<Vec<f64>> {
        let shift = match channel {
            Channel::X => 0.0,
            Channel::A => self.delta1,
            Channel::Pi => self.delta1 + self.delta2,
        };
        Ok(self.curve(channel).sample(grid)?.into_iter().map(|v| v + shift).collect())
    }
}

pub fn assemble(d: [f64; 3], o1: f64, o2: f64) -> Matrix3 {
    [[d[0], o1, 0.0], [o1, d[1], o2], [0.0, o2, d[2]]]
}

/// Time-independent diagonal of the potential matrix sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalField {
    pub rows: Vec<[f64; 3]>,
}

pub fn matrix_field(cp: &CoupledPotential, grid: &SpatialGrid, t: f64) -> Result<Vec<Matrix3>> {
    matrix_field_at(cp, &grid.points(), t)
}

/// Potential matrix at arbitrary R points.
pub fn matrix_field_at(cp: &CoupledPotential, points: &[f64], t: f64) -> Result<Vec<Matrix3>> {
    let (o1, o2) = cp.couplings(t);
    points
        .par_iter()
        .map(|&r| Ok(assemble(cp.diagonal(r)?, o1, o2)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{angstrom, cm1, ps, to_cm1};
    use proptest::prelude::*;

    fn morse() -> PotentialCurve {
        PotentialCurve::Morse {
            depth: cm1(6000.0),
            a: 0.45,
            r_eq: 5.8,
            offset: cm1(100.0),
        }
    }

    fn fig3_pulse(center: f64) -> PulseEnvelope {
        PulseEnvelope::new(cm1(733.0), ps(center), ps(5.5)).unwrap()
    }

    fn sample_cp() -> CoupledPotential {
        CoupledPotential {
            x: morse(),
            a: PotentialCurve::Morse {
                depth: cm1(8300.0),
                a: 0.36,
                r_eq: 6.9,
                offset: 0.0,
            },
            pi: PotentialCurve::Harmonic {
                k: 0.004,
                r_eq: 7.0,
                offset: 0.0,
            },
            delta1: cm1(2010.0),
            delta2: cm1(-2010.0),
            pulse1: fig3_pulse(25.5),
            pulse2: fig3_pulse(20.5),
        }
    }

    #[test]
    fn morse_minimum_and_asymptote() {
        let m = morse();
        assert_eq!(m.eval(5.8).unwrap(), cm1(100.0));
        let far = m.eval(200.0).unwrap();
        assert!((to_cm1(far) - 6100.0).abs() < 1e-9);
    }

    #[test]
    fn morse_grid_minimum_at_req() {
        let g = SpatialGrid::new(angstrom(2.0), angstrom(10.0), 1024).unwrap();
        let v = morse().sample(&g).unwrap();
        let jmin = (0..v.len()).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
        assert!((g.point(jmin) - 5.8).abs() <= g.dr());
    }

    #[test]
    fn tabulated_hits_nodes_and_rejects_outside() {
        let r = vec![1.0, 1.5, 2.2, 3.0, 4.1];
        let v = vec![3.0, -1.0, 0.5, 0.25, 2.0];
        let t = TabulatedCurve::new(r.clone(), v.clone()).unwrap();
        for (ri, vi) in r.iter().zip(&v) {
            assert_eq!(t.eval(*ri).unwrap(), *vi);
        }
        assert!(matches!(t.eval(0.9), Err(Error::Domain { .. })));
        assert!(matches!(t.eval(4.2), Err(Error::Domain { .. })));
    }

    #[test]
    fn tabulated_linear_data_is_reproduced() {
        let r: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let v: Vec<f64> = r.iter().map(|x| 2.0 - 0.5 * x).collect();
        let t = TabulatedCurve::new(r, v).unwrap();
        for i in 0..50 {
            let x = i as f64 * 0.1;
            assert!((t.eval(x).unwrap() - (2.0 - 0.5 * x)).abs() < 1e-13);
        }
    }

    #[test]
    fn tabulated_rejects_non_ascending() {
        assert!(TabulatedCurve::new(vec![1.0, 1.0, 2.0], vec![0.0; 3]).is_err());
        assert!(TabulatedCurve::new(vec![1.0, 0.5], vec![0.0; 2]).is_err());
    }

    #[test]
    fn fig3_envelope_values() {
        let p2 = fig3_pulse(20.5);
        assert!((to_cm1(p2.envelope(ps(20.5))) - 733.0).abs() < 1e-9);
        let at_width = to_cm1(p2.envelope(ps(26.0)));
        assert!((at_width - 733.0 / std::f64::consts::E).abs() < 1e-9);
        assert!((at_width - 269.6).abs() < 0.1);
        let p1 = fig3_pulse(25.5);
        let v = to_cm1(p1.envelope(ps(20.5)));
        let expected = 733.0 * (-(5.0f64 / 5.5).powi(2)).exp();
        assert!((v - expected).abs() < 1e-9);
        assert!((v - 320.8).abs() < 0.05);
    }

    #[test]
    fn envelope_underflow_is_zero() {
        let p = fig3_pulse(20.5);
        assert_eq!(p.envelope(ps(1e4)), 0.0);
    }

    #[test]
    fn uncoupled_far_from_pulses() {
        let cp = sample_cp();
        let m = cp.coupling_matrix(6.0, ps(5000.0)).unwrap();
        assert_eq!(m[0][1], 0.0);
        assert_eq!(m[1][2], 0.0);
    }

    #[test]
    fn opposite_detunings_leave_pi_unshifted() {
        let cp = sample_cp();
        let r = 7.3;
        let m = cp.coupling_matrix(r, ps(20.0)).unwrap();
        assert_eq!(m[2][2], cp.pi.eval(r).unwrap());
        assert_eq!(m[1][1], cp.a.eval(r).unwrap() + cm1(2010.0));
    }

    #[test]
    fn single_point_field_matches_matrix() {
        let cp = sample_cp();
        let f = matrix_field_at(&cp, &[6.3], ps(21.0)).unwrap();
        assert_eq!(f[0], cp.coupling_matrix(6.3, ps(21.0)).unwrap());
    }

    #[test]
    fn field_is_diagonal_without_pulses() {
        let mut cp = sample_cp();
        cp.pulse1 = PulseEnvelope::off();
        cp.pulse2 = PulseEnvelope::off();
        let g = SpatialGrid::new(angstrom(2.0), angstrom(10.0), 64).unwrap();
        for m in matrix_field(&cp, &g, ps(20.0)).unwrap() {
            assert_eq!((m[0][1], m[0][2], m[1][2]), (0.0, 0.0, 0.0));
        }
    }

    proptest! {
        #[test]
        fn matrix_is_symmetric_with_zero_corner(r in 4.0f64..15.0, t in -20.0f64..80.0) {
            let m = sample_cp().coupling_matrix(r, ps(t)).unwrap();
            for i in 0..3 { for j in 0..3 {
                prop_assert_eq!(m[i][j].to_bits(), m[j][i].to_bits());
            }}
            prop_assert_eq!(m[0][2], 0.0);
        }

        #[test]
        fn trace_independent_of_time(r in 4.0f64..15.0, t1 in -20.0f64..80.0, t2 in -20.0f64..80.0) {
            let cp = sample_cp();
            let a = cp.coupling_matrix(r, ps(t1)).unwrap();
            let b = cp.coupling_matrix(r, ps(t2)).unwrap();
            let tr = |m: Matrix3| m[0][0] + m[1][1] + m[2][2];
            prop_assert_eq!(tr(a), tr(b));
        }

        #[test]
        fn envelope_even_and_monotone(s in 0.0f64..30.0, ds in 0.0f64..5.0) {
            let p = fig3_pulse(20.5);
            let c = ps(20.5);
            let (up, down) = (p.envelope(c + ps(s)), p.envelope(c - ps(s)));
            prop_assert!((up - down).abs() <= 1e-12 * up.abs().max(down.abs()));
            prop_assert!(p.envelope(c + ps(s + ds)) <= p.envelope(c + ps(s)));
        }
    }
}
