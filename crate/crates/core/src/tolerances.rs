//! Numerical tolerances shared by the checks.

/// Equalities between independently computed quantities.
pub const EQ_TOL: f64 = 1e-10;
/// Residual `‖Hv − λv‖` accepted from the eigensolver.
pub const EIGEN_RESIDUAL: f64 = 1e-8;
/// Eigenvalues closer than this are treated as degenerate.
pub const GAP_TOL: f64 = 1e-8;
/// Hermiticity and unitarity checks on user supplied matrices.
pub const MATRIX_TOL: f64 = 1e-9;

/// Materialization cap for dense operators, overridable by `CLOCKFORGE_DENSE_CAP`.
pub const DEFAULT_DENSE_CAP: usize = 1 << 14;
/// Cap on the dimension handled by the sparse iterative eigensolver.
pub const DEFAULT_SPARSE_CAP: usize = 1 << 22;
/// Above this dimension full diagonalization gives way to Lanczos.
pub const DEFAULT_FULL_DIAG_CAP: usize = 1024;

/// Dense cap after applying the environment override.
pub fn dense_cap_from_env() -> usize {
    std::env::var("CLOCKFORGE_DENSE_CAP").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_DENSE_CAP)
}
