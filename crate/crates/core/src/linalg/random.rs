//! Seeded random states, unitaries and channels.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::state::StateVector;
use super::{RegisterShape, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Gaussian random vector, real or complex.
pub fn random_vector<R: Rng + ?Sized>(dim: usize, real: bool, rng: &mut R) -> DVector<C64> {
    DVector::from_fn(dim, |_, _| if real { C64::new(gaussian(rng), 0.0) } else { C64::new(gaussian(rng), gaussian(rng)) })
}

/// Uniformly random pure state.
pub fn random_state<R: Rng + ?Sized>(shape: RegisterShape, rng: &mut R) -> StateVector {
    let v = random_vector(shape.total_dim(), false, rng).normalize();
    StateVector { shape, amplitudes: v }
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| C64::new(gaussian(rng), gaussian(rng)))
}

/// Columns of a QR factor with the phase convention that makes the
/// distribution Haar.
fn haar_columns(g: DMatrix<C64>) -> DMatrix<C64> {
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..q.ncols() {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..q.nrows() {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar random `d × d` unitary.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    haar_columns(ginibre(d, d, rng))
}

/// Kraus operators of a random channel on a `d`-dimensional system with
/// `rank` operators, drawn from a Haar random Stinespring isometry.
pub fn random_channel<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> Vec<DMatrix<C64>> {
    let iso = haar_columns(ginibre(d * rank, d, rng));
    (0..rank).map(|a| iso.rows(a * d, d).into_owned()).collect()
}
