use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::potentials::Matrix3;

/// Ascending eigenvalues with eigenvectors; `vectors[k]` belongs to `values[k]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen3 {
    pub values: [f64; 3],
    pub vectors: [[f64; 3]; 3],
}

impl Eigen3 {
    /// Eigenvector matrix with eigenvectors as columns.
    pub fn column_matrix(&self) -> Matrix3 {
        let v = &self.vectors;
        [
            [v[0][0], v[1][0], v[2][0]],
            [v[0][1], v[1][1], v[2][1]],
            [v[0][2], v[1][2], v[2][2]],
        ]
    }
}

const MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi diagonalization of a real symmetric 3×3 matrix.
pub fn eig3_symmetric(m: &Matrix3) -> Result<Eigen3> {
    if m.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Input("eig3_symmetric: non-finite matrix entry".into()));
    }
    Ok(jacobi(m))
}

#[inline]
pub(crate) fn jacobi(m: &Matrix3) -> Eigen3 {
    let mut a = *m;
    // columns of v are the eigenvectors
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _ in 0..MAX_SWEEPS {
        if a[0][1] == 0.0 && a[0][2] == 0.0 && a[1][2] == 0.0 {
            break;
        }
        for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = a[p][q];
            if apq == 0.0 {
                continue;
            }
            let g = 100.0 * apq.abs();
            if a[p][p].abs() + g == a[p][p].abs() && a[q][q].abs() + g == a[q][q].abs() {
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
            let t = if theta.is_finite() {
                theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
            } else {
                0.0
            };
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let r = 3 - p - q;
            let arp = a[r][p];
            let arq = a[r][q];
            a[p][p] -= t * apq;
            a[q][q] += t * apq;
            a[p][q] = 0.0;
            a[q][p] = 0.0;
            a[r][p] = c * arp - s * arq;
            a[p][r] = a[r][p];
            a[r][q] = s * arp + c * arq;
            a[q][r] = a[r][q];
            for vi in v.iter_mut() {
                let vp = vi[p];
                let vq = vi[q];
                vi[p] = c * vp - s * vq;
                vi[q] = s * vp + c * vq;
            }
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let mut out = Eigen3 {
        values: [0.0; 3],
        vectors: [[0.0; 3]; 3],
    };
    for (slot, &k) in order.iter().enumerate() {
        out.values[slot] = a[k][k];
        out.vectors[slot] = [v[0][k], v[1][k], v[2][k]];
    }
    out
}

/// Eigen decompositions over a line of grid points, with each eigenvector's
/// sign chosen so it overlaps positively with the same-index vector at the
/// previous point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseEigenFrame {
    pub values: Vec<[f64; 3]>,
    pub vectors: Vec<[[f64; 3]; 3]>,
}

impl PointwiseEigenFrame {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn eigenfield(matrices: &[Matrix3]) -> Result<PointwiseEigenFrame> {
    let eig: Vec<Eigen3> = matrices
        .par_iter()
        .map(eig3_symmetric)
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(eig.len());
    let mut vectors: Vec<[[f64; 3]; 3]> = Vec::with_capacity(eig.len());
    for (j, e) in eig.into_iter().enumerate() {
        let mut vecs = e.vectors;
        for (k, vk) in vecs.iter_mut().enumerate() {
            let flip = if j == 0 {
                // largest component positive at the first point
                let big = (0..3).max_by(|&a, &b| vk[a].abs().total_cmp(&vk[b].abs())).unwrap();
                vk[big] < 0.0
            } else {
                dot(vk, &vectors[j - 1][k]) < 0.0
            };
            if flip {
                vk.iter_mut().for_each(|x| *x = -*x);
            }
        }
        values.push(e.values);
        vectors.push(vecs);
    }
    Ok(PointwiseEigenFrame { values, vectors })
}
