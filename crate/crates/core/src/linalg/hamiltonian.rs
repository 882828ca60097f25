use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::ops::{self, LocalIndexer};
use super::state::{DensityOperator, StateVector};
use super::{RegisterShape, C64};
use crate::error::{Error, Result};
use crate::tolerances::EQ_TOL;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermTag {
    In,
    Out,
    Prop,
    Stab,
    Other,
}

impl TermTag {
    pub fn as_str(self) -> &'static str {
        match self {
            TermTag::In => "in",
            TermTag::Out => "out",
            TermTag::Prop => "prop",
            TermTag::Stab => "stab",
            TermTag::Other => "other",
        }
    }
}

/// Sparse square matrix on a local Hilbert space, entries sorted by
/// (row, column) without duplicates or explicit zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOp {
    pub dim: usize,
    pub entries: Vec<(usize, usize, C64)>,
}

impl LocalOp {
    pub fn from_entries(dim: usize, entries: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut map: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        for (r, c, v) in entries {
            *map.entry((r, c)).or_insert(C64::new(0.0, 0.0)) += v;
        }
        let entries = map.into_iter().filter(|(_, v)| v.norm() > 1e-15).map(|((r, c), v)| (r, c, v)).collect();
        Self { dim, entries }
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        let mut entries = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if v.norm() > 1e-15 {
                    entries.push((r, c, v));
                }
            }
        }
        Self { dim: m.nrows(), entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, entries: (0..dim).map(|i| (i, i, C64::new(1.0, 0.0))).collect() }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        Self::from_entries(self.dim, self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_entries(self.dim, self.entries.iter().map(|&(r, c, v)| (r, c, v * s)))
    }

    pub fn add(&self, other: &LocalOp) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_entries(self.dim, self.entries.iter().chain(&other.entries).copied())
    }

    /// Kronecker product with `self` as the more significant factor.
    pub fn kron(&self, other: &LocalOp) -> Self {
        let d = other.dim;
        let mut entries = Vec::with_capacity(self.entries.len() * other.entries.len());
        for &(r1, c1, v1) in &self.entries {
            for &(r2, c2, v2) in &other.entries {
                entries.push((r1 * d + r2, c1 * d + c2, v1 * v2));
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        Self { dim: self.dim * d, entries }
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let map: BTreeMap<(usize, usize), C64> = self.entries.iter().map(|&(r, c, v)| ((r, c), v)).collect();
        let zero = C64::new(0.0, 0.0);
        self.entries.iter().map(|&(r, c, v)| (v - map.get(&(c, r)).copied().unwrap_or(zero).conj()).norm()).fold(0.0, f64::max)
    }

    /// Exact spectral norm, diagonalizing each connected block of the
    /// sparsity pattern separately.
    pub fn spectral_norm(&self) -> f64 {
        let mut parent: Vec<usize> = (0..self.dim).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(r, c, _) in &self.entries {
            let (a, b) = (find(&mut parent, r), find(&mut parent, c));
            if a != b {
                parent[a] = b;
            }
        }
        let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(r, _, _) in &self.entries {
            let root = find(&mut parent, r);
            blocks.entry(root).or_default().push(r);
        }
        let mut norm = 0.0f64;
        for (_, mut members) in blocks {
            members.sort_unstable();
            members.dedup();
            let pos: BTreeMap<usize, usize> = members.iter().enumerate().map(|(i, &m)| (m, i)).collect();
            let n = members.len();
            let mut m = DMatrix::<C64>::zeros(n, n);
            for &(r, c, v) in &self.entries {
                if let (Some(&i), Some(&j)) = (pos.get(&r), pos.get(&c)) {
                    m[(i, j)] = v;
                }
            }
            norm = norm.max(ops::spectral_norm(&m));
        }
        norm
    }

    /// `out[offsets[r] + base] += M[r, c] v[offsets[c] + base]` over all bases.
    pub(crate) fn apply_indexed(&self, idx: &LocalIndexer, v: &DVector<C64>, out: &mut DVector<C64>) {
        for &b in &idx.bases {
            for &(r, c, x) in &self.entries {
                out[b + idx.offsets[r]] += x * v[b + idx.offsets[c]];
            }
        }
    }
}

/// One Hermitian term `M ⊗ I` with `M` acting on `support`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalTerm {
    pub support: Vec<usize>,
    pub op: LocalOp,
    pub tag: TermTag,
    /// Time step of a propagation term.
    pub step: Option<usize>,
    /// Set on terms built from a gate wider than two sites.
    pub wide: bool,
}

impl LocalTerm {
    pub fn new(support: Vec<usize>, matrix: DMatrix<C64>, tag: TermTag) -> Self {
        Self::from_op(support, LocalOp::from_dense(&matrix), tag)
    }

    pub fn from_op(support: Vec<usize>, op: LocalOp, tag: TermTag) -> Self {
        Self { support, op, tag, step: None, wide: false }
    }

    pub fn with_step(mut self, t: usize) -> Self {
        self.step = Some(t);
        self
    }

    pub fn locality(&self) -> usize {
        self.support.len()
    }

    pub fn matrix(&self) -> DMatrix<C64> {
        self.op.to_dense()
    }

    /// The same operator with its support listed in ascending order.
    pub fn sorted(&self, shape: &RegisterShape) -> LocalTerm {
        let mut perm: Vec<usize> = (0..self.support.len()).collect();
        perm.sort_by_key(|&k| self.support[k]);
        let dims: Vec<usize> = self.support.iter().map(|&s| shape.dim(s)).collect();
        LocalTerm {
            support: perm.iter().map(|&k| self.support[k]).collect(),
            op: permute_op(&dims, &perm, &self.op),
            ..self.clone()
        }
    }
}

/// Reorders tensor factors; `perm[k]` is the old position of new factor `k`.
pub fn permute_op(dims: &[usize], perm: &[usize], op: &LocalOp) -> LocalOp {
    let old = RegisterShape::new(dims.to_vec()).expect("valid dims");
    let new = RegisterShape::new(perm.iter().map(|&p| dims[p]).collect()).expect("valid dims");
    let to_new = |i: usize| {
        let ol = old.levels_of(i);
        let nl: Vec<usize> = perm.iter().map(|&p| ol[p]).collect();
        new.index_of(&nl)
    };
    LocalOp::from_entries(op.dim, op.entries.iter().map(|&(r, c, v)| (to_new(r), to_new(c), v)))
}

/// A Hamiltonian `Σ_i h_i` of local Hermitian terms of spectral norm at most 1.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianTermSum {
    pub shape: RegisterShape,
    pub terms: Vec<LocalTerm>,
}

impl HermitianTermSum {
    pub fn new(shape: RegisterShape) -> Self {
        Self { shape, terms: Vec::new() }
    }

    /// Validates and appends a term.
    pub fn push(&mut self, term: LocalTerm) -> Result<()> {
        self.shape.check_support(&term.support)?;
        let local: usize = term.support.iter().map(|&s| self.shape.dim(s)).product();
        if term.op.dim != local {
            return Err(Error::ShapeMismatch(format!(
                "term matrix of dimension {} on support of dimension {local}",
                term.op.dim
            )));
        }
        let dev = term.op.hermitian_deviation();
        if dev > EQ_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let norm = term.op.spectral_norm();
        if norm > 1.0 + EQ_TOL {
            return Err(Error::NormTooLarge(norm));
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn extend(&mut self, terms: impl IntoIterator<Item = LocalTerm>) -> Result<()> {
        for t in terms {
            self.push(t)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.shape.total_dim()
    }

    pub fn max_locality(&self) -> usize {
        self.terms.iter().map(LocalTerm::locality).max().unwrap_or(0)
    }

    /// Keeps only the terms whose tag passes `keep`.
    pub fn filtered(&self, keep: impl Fn(TermTag) -> bool) -> HermitianTermSum {
        HermitianTermSum { shape: self.shape.clone(), terms: self.terms.iter().filter(|t| keep(t.tag)).cloned().collect() }
    }

    pub fn count_by_tag(&self) -> BTreeMap<&'static str, usize> {
        let mut m = BTreeMap::new();
        for t in &self.terms {
            *m.entry(t.tag.as_str()).or_insert(0) += 1;
        }
        m
    }

    /// `H v` without materializing `H`.
    pub fn apply(&self, v: &DVector<C64>) -> Result<DVector<C64>> {
        if v.len() != self.dim() {
            return Err(Error::ShapeMismatch("vector does not match Hamiltonian register".into()));
        }
        let mut out = DVector::zeros(v.len());
        for t in &self.terms {
            let idx = LocalIndexer::new(&self.shape, &t.support)?;
            t.op.apply_indexed(&idx, v, &mut out);
        }
        Ok(out)
    }

    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        if state.shape != self.shape {
            return Err(Error::ShapeMismatch("state register differs from Hamiltonian register".into()));
        }
        let hv = self.apply(&state.amplitudes)?;
        Ok(real_part(state.amplitudes.dotc(&hv)))
    }

    pub fn expectation_density(&self, rho: &DensityOperator) -> Result<f64> {
        if rho.shape != self.shape {
            return Err(Error::ShapeMismatch("state register differs from Hamiltonian register".into()));
        }
        let mut acc = C64::new(0.0, 0.0);
        for t in &self.terms {
            let idx = LocalIndexer::new(&self.shape, &t.support)?;
            for &b in &idx.bases {
                for &(r, c, v) in &t.op.entries {
                    acc += v * rho.matrix[(b + idx.offsets[c], b + idx.offsets[r])];
                }
            }
        }
        Ok(real_part(acc))
    }

    pub fn to_dense(&self, cap: usize) -> Result<DMatrix<C64>> {
        let dim = self.shape.checked_total_dim().unwrap_or(usize::MAX);
        if dim > cap {
            return Err(Error::DimensionTooLarge { dim, cap });
        }
        let mut out = DMatrix::zeros(dim, dim);
        for t in &self.terms {
            let idx = LocalIndexer::new(&self.shape, &t.support)?;
            for &b in &idx.bases {
                for &(r, c, v) in &t.op.entries {
                    out[(b + idx.offsets[r], b + idx.offsets[c])] += v;
                }
            }
        }
        Ok(out)
    }

    pub fn to_sparse(&self, cap: usize) -> Result<SparseHermitian> {
        let dim = self.shape.checked_total_dim().unwrap_or(usize::MAX);
        if dim > cap {
            return Err(Error::DimensionTooLarge { dim, cap });
        }
        let mut rows: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); dim];
        for t in &self.terms {
            let idx = LocalIndexer::new(&self.shape, &t.support)?;
            for &b in &idx.bases {
                for &(r, c, v) in &t.op.entries {
                    *rows[b + idx.offsets[r]].entry(b + idx.offsets[c]).or_insert(C64::new(0.0, 0.0)) += v;
                }
            }
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                if v.norm() > 1e-15 {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(SparseHermitian { dim, row_ptr, cols, vals })
    }

    /// JSON term dump, one object per term.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.terms.iter().map(term_json).collect())
    }
}

fn real_part(z: C64) -> f64 {
    debug_assert!(z.im.abs() <= 1e-8 * (1.0 + z.re.abs()), "imaginary residue {}", z.im);
    z.re
}

#[derive(Serialize)]
struct TermDump<'a> {
    tag: &'a str,
    support: &'a [usize],
    matrix: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    step: Option<usize>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    wide: bool,
}

fn term_json(t: &LocalTerm) -> serde_json::Value {
    let dense = t.matrix();
    let n = dense.nrows();
    let mut matrix = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let z = dense[(r, c)];
            matrix.push([z.re, z.im]);
        }
    }
    serde_json::to_value(TermDump { tag: t.tag.as_str(), support: &t.support, matrix, step: t.step, wide: t.wide })
        .expect("term serializes")
}

/// Compressed sparse row Hermitian matrix.
#[derive(Clone, Debug)]
pub struct SparseHermitian {
    pub dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseHermitian {
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn mul_vec(&self, v: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::zeros(self.dim);
        for r in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * v[self.cols[k]];
            }
            out[r] = acc;
        }
        out
    }

    /// Upper bound on the spectral radius from row sums.
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.vals[self.row_ptr[r]..self.row_ptr[r + 1]].iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.vals.iter().all(|z| z.im.abs() < 1e-15)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k])] = self.vals[k];
            }
        }
        m
    }
}
