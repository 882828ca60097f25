use nalgebra::{DMatrix, DVector};

use super::ops::{self, LocalIndexer};
use super::{RegisterShape, C64};
use crate::error::{Error, Result};
use crate::tolerances::EQ_TOL;

/// Amplitudes over a register. Sub-normalized vectors are allowed;
/// [`StateVector::normalized`] is the checked constructor.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub shape: RegisterShape,
    pub amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(shape: RegisterShape, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != shape.total_dim() {
            return Err(Error::ShapeMismatch(format!("{} amplitudes for dimension {}", amplitudes.len(), shape.total_dim())));
        }
        Ok(Self { shape, amplitudes })
    }

    /// Like [`StateVector::new`] but rejects vectors that are not unit norm.
    pub fn normalized(shape: RegisterShape, amplitudes: DVector<C64>) -> Result<Self> {
        let s = Self::new(shape, amplitudes)?;
        let n = s.norm();
        if (n - 1.0).abs() > EQ_TOL {
            return Err(Error::InvalidParameter(format!("state has norm {n}")));
        }
        Ok(s)
    }

    pub fn basis(shape: RegisterShape, index: usize) -> Self {
        let mut amplitudes = DVector::zeros(shape.total_dim());
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { shape, amplitudes }
    }

    pub fn basis_levels(shape: RegisterShape, levels: &[usize]) -> Self {
        let idx = shape.index_of(levels);
        Self::basis(shape, idx)
    }

    pub fn zero(shape: RegisterShape) -> Self {
        Self::basis(shape, 0)
    }

    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { shape: RegisterShape::qubits(1), amplitudes: DVector::from_vec(vec![C64::new(h, 0.0), C64::new(h, 0.0)]) }
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn bell() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amplitudes = DVector::zeros(4);
        amplitudes[0] = C64::new(h, 0.0);
        amplitudes[3] = C64::new(h, 0.0);
        Self { shape: RegisterShape::qubits(2), amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        StateVector { shape: self.shape.concat(&other.shape), amplitudes: self.amplitudes.kronecker(&other.amplitudes) }
    }

    pub fn apply_local(&self, support: &[usize], m: &DMatrix<C64>) -> Result<StateVector> {
        Ok(StateVector { shape: self.shape.clone(), amplitudes: ops::apply_local(&self.shape, support, m, &self.amplitudes)? })
    }

    /// `⟨v|M|v⟩` for a local operator.
    pub fn local_expectation(&self, support: &[usize], m: &DMatrix<C64>) -> Result<C64> {
        let mv = ops::apply_local(&self.shape, support, m, &self.amplitudes)?;
        Ok(self.amplitudes.dotc(&mv))
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator { shape: self.shape.clone(), matrix: &self.amplitudes * self.amplitudes.adjoint() }
    }

    /// Reduced density matrix on the complement of `traced`, computed from the
    /// amplitude matrix without forming the full projector.
    pub fn reduced_density(&self, traced: &[usize]) -> Result<DensityOperator> {
        self.shape.check_support(traced)?;
        let kept: Vec<usize> = (0..self.shape.len()).filter(|s| !traced.contains(s)).collect();
        let (kept_idx, traced_idx) = split_indices(&self.shape, &kept, traced);
        let dk = kept_idx.len();
        let dt = traced_idx.len();
        let mut m = DMatrix::<C64>::zeros(dk, dt);
        for (a, &ka) in kept_idx.iter().enumerate() {
            for (b, &tb) in traced_idx.iter().enumerate() {
                m[(a, b)] = self.amplitudes[ka + tb];
            }
        }
        Ok(DensityOperator { shape: self.shape.select(&kept), matrix: &m * m.adjoint() })
    }
}

/// Offsets of the kept-site and traced-site sub-bases, so that every full index
/// is `kept[a] + traced[b]` for a unique pair.
pub(crate) fn split_indices(shape: &RegisterShape, kept: &[usize], traced: &[usize]) -> (Vec<usize>, Vec<usize>) {
    (ops::site_offsets(shape, kept), ops::site_offsets(shape, traced))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    pub shape: RegisterShape,
    pub matrix: DMatrix<C64>,
}

impl DensityOperator {
    pub fn new(shape: RegisterShape, matrix: DMatrix<C64>) -> Result<Self> {
        let d = shape.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::ShapeMismatch(format!("{}x{} matrix for dimension {d}", matrix.nrows(), matrix.ncols())));
        }
        Ok(Self { shape, matrix })
    }

    pub fn maximally_mixed(shape: RegisterShape) -> Self {
        let d = shape.total_dim();
        Self { shape, matrix: DMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0) }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator { shape: self.shape.concat(&other.shape), matrix: self.matrix.kronecker(&other.matrix) }
    }

    pub fn partial_trace(&self, traced: &[usize]) -> Result<DensityOperator> {
        partial_trace(self, traced)
    }

    pub fn conjugate_local(&self, support: &[usize], m: &DMatrix<C64>) -> Result<DensityOperator> {
        Ok(DensityOperator { shape: self.shape.clone(), matrix: ops::conjugate_local(&self.shape, support, m, &self.matrix)? })
    }

    /// `Tr(M ρ)` for a local operator.
    pub fn local_expectation(&self, support: &[usize], m: &DMatrix<C64>) -> Result<C64> {
        let idx = LocalIndexer::new(&self.shape, support)?;
        if m.nrows() != idx.local_dim() {
            return Err(Error::ShapeMismatch("local matrix does not match support".into()));
        }
        let ld = idx.local_dim();
        let mut acc = C64::new(0.0, 0.0);
        for &b in &idx.bases {
            for r in 0..ld {
                for c in 0..ld {
                    acc += m[(r, c)] * self.matrix[(b + idx.offsets[c], b + idx.offsets[r])];
                }
            }
        }
        Ok(acc)
    }

    pub fn hermiticity_error(&self) -> f64 {
        ops::hermitian_deviation(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        ops::hermitian_eigenvalues(&self.matrix).first().copied().unwrap_or(0.0)
    }

    /// `⟨v|ρ|v⟩`.
    pub fn fidelity_with_pure(&self, v: &StateVector) -> f64 {
        (v.amplitudes.adjoint() * &self.matrix * &v.amplitudes)[(0, 0)].re
    }
}

/// Kronecker combination of two values of the same kind.
pub trait TensorProduct: Sized {
    fn tensor_product(&self, other: &Self) -> Self;
}

impl TensorProduct for StateVector {
    fn tensor_product(&self, other: &Self) -> Self {
        self.tensor(other)
    }
}

impl TensorProduct for DensityOperator {
    fn tensor_product(&self, other: &Self) -> Self {
        self.tensor(other)
    }
}

pub fn tensor_product<T: TensorProduct>(a: &T, b: &T) -> T {
    a.tensor_product(b)
}

/// Traces out `traced`; the remaining sites keep their relative order.
pub fn partial_trace(rho: &DensityOperator, traced: &[usize]) -> Result<DensityOperator> {
    rho.shape.check_support(traced)?;
    let kept: Vec<usize> = (0..rho.shape.len()).filter(|s| !traced.contains(s)).collect();
    let (kept_idx, traced_idx) = split_indices(&rho.shape, &kept, traced);
    let dk = kept_idx.len();
    let mut out = DMatrix::<C64>::zeros(dk, dk);
    for &t in &traced_idx {
        for (a, &ka) in kept_idx.iter().enumerate() {
            for (b, &kb) in kept_idx.iter().enumerate() {
                out[(a, b)] += rho.matrix[(ka + t, kb + t)];
            }
        }
    }
    Ok(DensityOperator { shape: rho.shape.select(&kept), matrix: out })
}

/// Trace norm `‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.shape != sigma.shape {
        return Err(Error::ShapeMismatch("density operators on different registers".into()));
    }
    let diff = &rho.matrix - &sigma.matrix;
    let herm = (&diff + diff.adjoint()) * C64::new(0.5, 0.0);
    Ok(ops::hermitian_eigenvalues(&herm).iter().map(|l| l.abs()).sum())
}

/// A mixed state stored as unnormalized pure members, `ρ = Σ |v⟩⟨v|`.
/// Expectations of local operators never materialize the full density matrix.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub shape: RegisterShape,
    pub members: Vec<DVector<C64>>,
}

impl Ensemble {
    pub fn pure(state: &StateVector) -> Self {
        Self { shape: state.shape.clone(), members: vec![state.amplitudes.clone()] }
    }

    pub fn trace(&self) -> f64 {
        self.members.iter().map(|m| m.norm_squared()).sum()
    }

    pub fn local_expectation(&self, support: &[usize], m: &DMatrix<C64>) -> Result<C64> {
        let idx = LocalIndexer::new(&self.shape, support)?;
        if m.nrows() != idx.local_dim() {
            return Err(Error::ShapeMismatch("local matrix does not match support".into()));
        }
        Ok(self.members.iter().map(|v| v.dotc(&ops::apply_with_indexer(&idx, m, v))).sum())
    }

    pub fn reduced_density(&self, traced: &[usize]) -> Result<DensityOperator> {
        let mut acc: Option<DensityOperator> = None;
        for v in &self.members {
            let sv = StateVector { shape: self.shape.clone(), amplitudes: v.clone() };
            let r = sv.reduced_density(traced)?;
            acc = Some(match acc {
                None => r,
                Some(mut a) => {
                    a.matrix += r.matrix;
                    a
                }
            });
        }
        acc.ok_or_else(|| Error::InvalidParameter("empty ensemble".into()))
    }

    pub fn to_density(&self) -> Result<DensityOperator> {
        self.reduced_density(&[])
    }
}
