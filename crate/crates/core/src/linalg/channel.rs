use nalgebra::DMatrix;
use rand::Rng;

use super::ops::{self, LocalIndexer};
use super::random::{haar_unitary, random_channel};
use super::state::{DensityOperator, Ensemble};
use super::{RegisterShape, C64};
use crate::error::{Error, Result};
use crate::tolerances::EQ_TOL;

/// A channel given by Kraus operators acting on `support`.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    pub support: Vec<usize>,
    /// Local dimensions of the support sites, in support order.
    pub dims: Vec<usize>,
    pub kraus: Vec<DMatrix<C64>>,
    pub label: String,
}

impl KrausChannel {
    /// Checks completeness `Σ K†K = I`.
    pub fn new(support: Vec<usize>, dims: Vec<usize>, kraus: Vec<DMatrix<C64>>, label: impl Into<String>) -> Result<Self> {
        if support.len() != dims.len() {
            return Err(Error::ShapeMismatch("support and dims differ in length".into()));
        }
        let d: usize = dims.iter().product();
        let mut acc = DMatrix::<C64>::zeros(d, d);
        for k in &kraus {
            if k.nrows() != d || k.ncols() != d {
                return Err(Error::ShapeMismatch(format!("Kraus operator is {}x{}, expected {d}x{d}", k.nrows(), k.ncols())));
            }
            acc += k.adjoint() * k;
        }
        let dev = (acc - DMatrix::<C64>::identity(d, d)).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if dev > EQ_TOL {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(Self { support, dims, kraus, label: label.into() })
    }

    pub fn identity(support: Vec<usize>, dims: Vec<usize>) -> Self {
        let d = dims.iter().product();
        Self { support, dims, kraus: vec![DMatrix::identity(d, d)], label: "identity".into() }
    }

    /// Replaces the support with the maximally mixed state, via the
    /// `d²` Weyl operators on each site.
    pub fn maximally_mixed(support: Vec<usize>, dims: Vec<usize>) -> Self {
        let mut kraus = vec![DMatrix::<C64>::identity(1, 1)];
        for &d in &dims {
            let weyl = weyl_operators(d);
            let mut next = Vec::with_capacity(kraus.len() * weyl.len());
            for k in &kraus {
                for w in &weyl {
                    next.push(k.kronecker(&(w * C64::new(1.0 / d as f64, 0.0))));
                }
            }
            kraus = next;
        }
        Self { support, dims, kraus, label: "maximally_mixed".into() }
    }

    /// Complete dephasing in the computational basis of every support site.
    pub fn dephase(support: Vec<usize>, dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        let kraus = (0..d).map(|i| super::ket_bra(d, i, i)).collect();
        Self { support, dims, kraus, label: "dephase".into() }
    }

    pub fn random_unitary<R: Rng + ?Sized>(support: Vec<usize>, dims: Vec<usize>, rng: &mut R) -> Self {
        let d = dims.iter().product();
        Self { support, dims, kraus: vec![haar_unitary(d, rng)], label: "random_unitary".into() }
    }

    pub fn random<R: Rng + ?Sized>(support: Vec<usize>, dims: Vec<usize>, rank: usize, rng: &mut R) -> Self {
        let d = dims.iter().product();
        Self { support, dims, kraus: random_channel(d, rank, rng), label: format!("random_rank{rank}") }
    }

    fn check_shape(&self, shape: &RegisterShape) -> Result<()> {
        shape.check_support(&self.support)?;
        for (&s, &d) in self.support.iter().zip(&self.dims) {
            if shape.dim(s) != d {
                return Err(Error::ShapeMismatch(format!("site {s} has dimension {} not {d}", shape.dim(s))));
            }
        }
        Ok(())
    }

    pub fn apply_ensemble(&self, e: &Ensemble) -> Result<Ensemble> {
        self.check_shape(&e.shape)?;
        let idx = LocalIndexer::new(&e.shape, &self.support)?;
        let mut members = Vec::with_capacity(e.members.len() * self.kraus.len());
        for v in &e.members {
            for k in &self.kraus {
                let w = ops::apply_with_indexer(&idx, k, v);
                if w.norm_squared() > 1e-30 {
                    members.push(w);
                }
            }
        }
        Ok(Ensemble { shape: e.shape.clone(), members })
    }

    pub fn apply_density(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.check_shape(&rho.shape)?;
        let idx = LocalIndexer::new(&rho.shape, &self.support)?;
        let mut out = DMatrix::<C64>::zeros(rho.matrix.nrows(), rho.matrix.ncols());
        for k in &self.kraus {
            out += ops::conjugate_with_indexer(&idx, k, &rho.matrix);
        }
        Ok(DensityOperator { shape: rho.shape.clone(), matrix: out })
    }
}

/// The `d²` generalized Pauli operators `X^a Z^b`.
pub fn weyl_operators(d: usize) -> Vec<DMatrix<C64>> {
    let omega = |k: usize| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64);
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let mut m = DMatrix::<C64>::zeros(d, d);
            for j in 0..d {
                m[((j + a) % d, j)] = omega((b * j) % d);
            }
            out.push(m);
        }
    }
    out
}
