//! Bound states of single-channel potentials and pointwise diagonalization
//! of the 3×3 potential matrix.

mod bound;
pub(crate) mod eig3;

pub use bound::{bound_states, BoundStateSet, FourierGridHamiltonian};
pub use eig3::{eig3_symmetric, eigenfield, Eigen3, PointwiseEigenFrame};
