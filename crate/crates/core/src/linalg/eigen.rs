//! Lowest eigenpairs of a Hermitian term sum.
//!
//! Small registers are diagonalized in full. Larger ones go through a
//! Lanczos iteration with full reorthogonalization on the materialized sparse
//! operator, deflating each converged vector before looking for the next.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::hamiltonian::{HermitianTermSum, SparseHermitian};
use super::random::random_vector;
use super::C64;
use crate::error::{Error, Result};
use crate::tolerances::{dense_cap_from_env, DEFAULT_FULL_DIAG_CAP, DEFAULT_SPARSE_CAP, EIGEN_RESIDUAL, GAP_TOL};

#[derive(Clone, Debug)]
pub struct EigenConfig {
    pub dense_cap: usize,
    pub sparse_cap: usize,
    pub full_diag_cap: usize,
    pub residual_tol: f64,
    pub gap_tol: f64,
    pub krylov_dim: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self {
            dense_cap: dense_cap_from_env(),
            sparse_cap: DEFAULT_SPARSE_CAP,
            full_diag_cap: DEFAULT_FULL_DIAG_CAP,
            residual_tol: EIGEN_RESIDUAL,
            gap_tol: GAP_TOL,
            krylov_dim: 160,
            max_restarts: 400,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethod {
    FullDiagonalization,
    Lanczos,
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Ascending.
    pub values: Vec<f64>,
    pub vectors: Vec<DVector<C64>>,
    /// `‖Hv − λv‖₂` for each returned pair.
    pub residuals: Vec<f64>,
    pub method: EigenMethod,
}

impl Spectrum {
    /// Number of returned eigenvalues within `tol` of the lowest one.
    pub fn ground_degeneracy(&self, tol: f64) -> usize {
        match self.values.first() {
            Some(&l0) => self.values.iter().take_while(|&&l| l - l0 <= tol).count(),
            None => 0,
        }
    }

    /// First eigenvalue above the ground level, if one was returned.
    pub fn gap(&self, tol: f64) -> Option<f64> {
        let g = self.ground_degeneracy(tol);
        self.values.get(g).map(|l| l - self.values[0])
    }
}

/// Lowest `how_many` eigenpairs of `h`, extended so that a degenerate
/// eigenspace at the cut is returned whole.
pub fn eigensolve_hermitian(h: &HermitianTermSum, how_many: usize, cfg: &EigenConfig) -> Result<Spectrum> {
    let dim = h.shape.checked_total_dim().unwrap_or(usize::MAX);
    let cap = cfg.dense_cap.max(cfg.sparse_cap);
    if dim > cap {
        return Err(Error::DimensionTooLarge { dim, cap });
    }
    let how_many = how_many.min(dim);
    if dim <= cfg.full_diag_cap.min(cfg.dense_cap) {
        let m = h.to_dense(cfg.dense_cap)?;
        return Ok(full_diagonalization(&m, how_many, cfg.gap_tol));
    }
    let op = h.to_sparse(cap)?;
    lanczos_lowest(&op, how_many, cfg)
}

/// Full diagonalization of a dense Hermitian matrix.
pub fn full_diagonalization(m: &DMatrix<C64>, how_many: usize, gap_tol: f64) -> Spectrum {
    let dim = m.nrows();
    let real = m.iter().all(|z| z.im == 0.0);
    let mut pairs: Vec<(f64, DVector<C64>)> = if real {
        let eig = m.map(|z| z.re).symmetric_eigen();
        (0..dim).map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).map(|x| C64::new(x, 0.0)))).collect()
    } else {
        let eig = m.clone().symmetric_eigen();
        (0..dim).map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).into_owned())).collect()
    };
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut keep = how_many;
    while keep > 0 && keep < dim && pairs[keep].0 - pairs[keep - 1].0 <= gap_tol {
        keep += 1;
    }
    pairs.truncate(keep);
    let residuals = pairs.iter().map(|(l, v)| (m * v - v * C64::new(*l, 0.0)).norm()).collect();
    let (values, vectors) = pairs.into_iter().unzip();
    Spectrum { values, vectors, residuals, method: EigenMethod::FullDiagonalization }
}

fn orthogonalize(v: &mut DVector<C64>, basis: &[DVector<C64>]) {
    // Two passes keep the loss of orthogonality at machine precision.
    for _ in 0..2 {
        for b in basis {
            let c = b.dotc(v);
            v.axpy(-c, b, C64::new(1.0, 0.0));
        }
    }
}

/// Lowest eigenpairs of a sparse Hermitian operator by deflated, restarted
/// Lanczos.
pub fn lanczos_lowest(op: &SparseHermitian, how_many: usize, cfg: &EigenConfig) -> Result<Spectrum> {
    let dim = op.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut values: Vec<f64> = Vec::new();
    let mut vectors: Vec<DVector<C64>> = Vec::new();
    let mut residuals = Vec::new();
    let real = op.is_real();
    while values.len() < how_many {
        let (l, v, r) = lowest_deflated(op, &vectors, cfg, &mut rng, real)?;
        values.push(l);
        vectors.push(v);
        residuals.push(r);
    }
    // Keep extending while the next eigenvalue is degenerate with the cut.
    while !values.is_empty() && values.len() < dim {
        let (l, v, r) = lowest_deflated(op, &vectors, cfg, &mut rng, real)?;
        let last = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if l - last > cfg.gap_tol {
            break;
        }
        values.push(l);
        vectors.push(v);
        residuals.push(r);
    }
    // Deflation can return pairs slightly out of order when eigenvalues are
    // nearly degenerate.
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    Ok(Spectrum {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: order.iter().map(|&i| vectors[i].clone()).collect(),
        residuals: order.iter().map(|&i| residuals[i]).collect(),
        method: EigenMethod::Lanczos,
    })
}

fn lowest_deflated(
    op: &SparseHermitian,
    locked: &[DVector<C64>],
    cfg: &EigenConfig,
    rng: &mut ChaCha8Rng,
    real: bool,
) -> Result<(f64, DVector<C64>, f64)> {
    let dim = op.dim;
    let mut start = random_vector(dim, real, rng);
    orthogonalize(&mut start, locked);
    let mut best = (f64::INFINITY, start.clone(), f64::INFINITY);
    let m_max = cfg.krylov_dim.min(dim - locked.len()).max(1);
    let shift = 2.0 * op.gershgorin_bound() + 1.0;
    for _ in 0..cfg.max_restarts {
        let n = start.norm();
        if n < 1e-300 {
            return Err(Error::NoConvergence(f64::NAN));
        }
        let mut basis: Vec<DVector<C64>> = vec![start.unscale(n)];
        let mut alphas = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        loop {
            let j = basis.len() - 1;
            let mut w = op.mul_vec(&basis[j]);
            // Locked vectors are shifted to the top of the spectrum so that
            // rounding cannot bring them back as spurious Ritz vectors.
            for l in locked {
                let c = l.dotc(&basis[j]) * C64::new(shift, 0.0);
                w.axpy(c, l, C64::new(1.0, 0.0));
            }
            let a = basis[j].dotc(&w).re;
            alphas.push(a);
            orthogonalize(&mut w, &basis);
            let b = w.norm();
            if basis.len() >= m_max || b < 1e-12 {
                break;
            }
            betas.push(b);
            basis.push(w.unscale(b));
        }
        let k = alphas.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alphas[i];
            if i + 1 < k {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let eig = t.symmetric_eigen();
        let (imin, _) = eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty tridiagonal");
        let y = eig.eigenvectors.column(imin);
        let mut x = DVector::<C64>::zeros(dim);
        for (i, bv) in basis.iter().enumerate() {
            x.axpy(C64::new(y[i], 0.0), bv, C64::new(1.0, 0.0));
        }
        orthogonalize(&mut x, locked);
        let x = x.normalize();
        let hx = op.mul_vec(&x);
        let lambda = x.dotc(&hx).re;
        let res = (&hx - &x * C64::new(lambda, 0.0)).norm();
        if res < best.2 {
            best = (lambda, x.clone(), res);
        }
        if res <= cfg.residual_tol {
            return Ok((lambda, x, res));
        }
        start = x;
    }
    Err(Error::NoConvergence(best.2))
}
