//! Kernels that apply a local operator to a vector or matrix over a register.

use nalgebra::{DMatrix, DVector};

use super::{RegisterShape, C64};
use crate::error::{Error, Result};

/// Full-register offsets of every basis state of the sub-register `sites`,
/// enumerated with the first listed site most significant.
pub fn site_offsets(shape: &RegisterShape, sites: &[usize]) -> Vec<usize> {
    let strides = shape.strides();
    let mut offsets = vec![0usize];
    for &s in sites {
        let d = shape.dim(s);
        let mut next = Vec::with_capacity(offsets.len() * d);
        for &o in &offsets {
            for l in 0..d {
                next.push(o + l * strides[s]);
            }
        }
        offsets = next;
    }
    offsets
}

/// Precomputed index bookkeeping for an operator on `support`.
#[derive(Clone, Debug)]
pub struct LocalIndexer {
    /// Offset added to a base index for each local basis index.
    pub offsets: Vec<usize>,
    /// Base indices, i.e. full indices whose support digits are all zero.
    pub bases: Vec<usize>,
}

impl LocalIndexer {
    pub fn new(shape: &RegisterShape, support: &[usize]) -> Result<Self> {
        shape.check_support(support)?;
        let offsets = site_offsets(shape, support);
        let rest: Vec<usize> = (0..shape.len()).filter(|s| !support.contains(s)).collect();
        let bases = site_offsets(shape, &rest);
        Ok(Self { offsets, bases })
    }

    pub fn local_dim(&self) -> usize {
        self.offsets.len()
    }
}

fn check_local_matrix(shape: &RegisterShape, support: &[usize], m: &DMatrix<C64>) -> Result<()> {
    let local: usize = support.iter().map(|&s| shape.dim(s)).product();
    if m.nrows() != local || m.ncols() != local {
        return Err(Error::ShapeMismatch(format!(
            "local matrix is {}x{} but support has dimension {local}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Returns `(M ⊗ I) v` with `M` acting on `support`.
pub fn apply_local(shape: &RegisterShape, support: &[usize], m: &DMatrix<C64>, v: &DVector<C64>) -> Result<DVector<C64>> {
    check_local_matrix(shape, support, m)?;
    if v.len() != shape.total_dim() {
        return Err(Error::ShapeMismatch(format!("vector of length {} on register of dimension {}", v.len(), shape.total_dim())));
    }
    let idx = LocalIndexer::new(shape, support)?;
    Ok(apply_with_indexer(&idx, m, v))
}

pub(crate) fn apply_with_indexer(idx: &LocalIndexer, m: &DMatrix<C64>, v: &DVector<C64>) -> DVector<C64> {
    let ld = idx.local_dim();
    let mut out = DVector::zeros(v.len());
    let mut buf = vec![C64::new(0.0, 0.0); ld];
    for &b in &idx.bases {
        for (l, x) in buf.iter_mut().enumerate() {
            *x = v[b + idx.offsets[l]];
        }
        for r in 0..ld {
            let mut acc = C64::new(0.0, 0.0);
            for (c, x) in buf.iter().enumerate() {
                acc += m[(r, c)] * x;
            }
            out[b + idx.offsets[r]] = acc;
        }
    }
    out
}

/// Returns `(M ⊗ I) ρ (M ⊗ I)†`.
pub fn conjugate_local(shape: &RegisterShape, support: &[usize], m: &DMatrix<C64>, rho: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    check_local_matrix(shape, support, m)?;
    let idx = LocalIndexer::new(shape, support)?;
    Ok(conjugate_with_indexer(&idx, m, rho))
}

pub(crate) fn conjugate_with_indexer(idx: &LocalIndexer, m: &DMatrix<C64>, rho: &DMatrix<C64>) -> DMatrix<C64> {
    let left = left_multiply(idx, m, rho);
    // (M X M†) = (M (M X)†)†
    left_multiply(idx, m, &left.adjoint()).adjoint()
}

fn left_multiply(idx: &LocalIndexer, m: &DMatrix<C64>, x: &DMatrix<C64>) -> DMatrix<C64> {
    let ld = idx.local_dim();
    let mut out = DMatrix::zeros(x.nrows(), x.ncols());
    let mut buf = vec![C64::new(0.0, 0.0); ld];
    for col in 0..x.ncols() {
        for &b in &idx.bases {
            for (l, v) in buf.iter_mut().enumerate() {
                *v = x[(b + idx.offsets[l], col)];
            }
            for r in 0..ld {
                let mut acc = C64::new(0.0, 0.0);
                for (c, v) in buf.iter().enumerate() {
                    acc += m[(r, c)] * v;
                }
                out[(b + idx.offsets[r], col)] = acc;
            }
        }
    }
    out
}

/// Embeds a local operator into the full register as a dense matrix.
pub fn embed_local(shape: &RegisterShape, support: &[usize], m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    check_local_matrix(shape, support, m)?;
    let idx = LocalIndexer::new(shape, support)?;
    let dim = shape.total_dim();
    let mut out = DMatrix::zeros(dim, dim);
    let ld = idx.local_dim();
    for &b in &idx.bases {
        for r in 0..ld {
            for c in 0..ld {
                let e = m[(r, c)];
                if e != C64::new(0.0, 0.0) {
                    out[(b + idx.offsets[r], b + idx.offsets[c])] = e;
                }
            }
        }
    }
    Ok(out)
}

/// Reorders the tensor factors of a local matrix: `perm[k]` is the position in
/// the old factor order of the new factor `k`.
pub fn permute_local(dims: &[usize], perm: &[usize], m: &DMatrix<C64>) -> DMatrix<C64> {
    let old = RegisterShape::new(dims.to_vec()).expect("valid dims");
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let new = RegisterShape::new(new_dims).expect("valid dims");
    let dim = old.total_dim();
    let map: Vec<usize> = (0..dim)
        .map(|i| {
            let nl = new.levels_of(i);
            let mut ol = vec![0; dims.len()];
            for (k, &p) in perm.iter().enumerate() {
                ol[p] = nl[k];
            }
            old.index_of(&ol)
        })
        .collect();
    DMatrix::from_fn(dim, dim, |r, c| m[(map[r], map[c])])
}

/// Kronecker product with `a` as the more significant factor.
pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut vals: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}

pub fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    (m - m.adjoint()).iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub fn unitary_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let prod = m.adjoint() * m;
    (prod - DMatrix::<C64>::identity(n, n)).iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    hermitian_eigenvalues(&gram).last().copied().unwrap_or(0.0).max(0.0).sqrt()
}
