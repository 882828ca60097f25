//! Dense and sparse complex linear algebra over multi-qudit registers.

mod channel;
mod eigen;
mod hamiltonian;
pub mod ops;
pub mod random;
mod register;
mod state;

pub use channel::KrausChannel;
pub use eigen::{eigensolve_hermitian, full_diagonalization, lanczos_lowest, EigenConfig, EigenMethod, Spectrum};
pub use hamiltonian::{permute_op, HermitianTermSum, LocalOp, LocalTerm, SparseHermitian, TermTag};
pub use register::{BasisState, RegisterShape};
pub use state::{partial_trace, tensor_product, trace_distance, DensityOperator, Ensemble, StateVector, TensorProduct};

pub type C64 = num_complex::Complex64;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Real matrix literal, row-major.
pub fn real_matrix(n: usize, entries: &[f64]) -> nalgebra::DMatrix<C64> {
    nalgebra::DMatrix::from_row_slice(n, n, &entries.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
}

/// `|a⟩⟨b|` on a `d`-level site.
pub fn ket_bra(d: usize, a: usize, b: usize) -> nalgebra::DMatrix<C64> {
    let mut m = nalgebra::DMatrix::zeros(d, d);
    m[(a, b)] = C64::new(1.0, 0.0);
    m
}

pub fn identity(d: usize) -> nalgebra::DMatrix<C64> {
    nalgebra::DMatrix::identity(d, d)
}

/// Single-qubit Pauli matrices `I, X, Y, Z`.
pub fn pauli(which: char) -> nalgebra::DMatrix<C64> {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let e = match which {
        'I' => [o, z, z, o],
        'X' => [z, o, o, z],
        'Y' => [z, -i, i, z],
        'Z' => [o, z, z, -o],
        _ => panic!("unknown Pauli {which}"),
    };
    nalgebra::DMatrix::from_row_slice(2, 2, &e)
}
