use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Local dimensions of an ordered list of sites. Site 0 is the most
/// significant digit of the basis index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegisterShape {
    dims: Vec<usize>,
}

impl RegisterShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Self { dims })
    }

    pub fn qubits(n: usize) -> Self {
        Self { dims: vec![2; n] }
    }

    pub fn uniform(n: usize, q: usize) -> Result<Self> {
        Self::new(vec![q; n])
    }

    pub fn empty() -> Self {
        Self { dims: Vec::new() }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dim(&self, site: usize) -> usize {
        self.dims[site]
    }

    /// Total Hilbert space dimension, or `None` on overflow.
    pub fn checked_total_dim(&self) -> Option<usize> {
        self.dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d))
    }

    pub fn total_dim(&self) -> usize {
        self.checked_total_dim().expect("register dimension overflows usize")
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }

    pub fn concat(&self, other: &RegisterShape) -> RegisterShape {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        RegisterShape { dims }
    }

    pub fn select(&self, sites: &[usize]) -> RegisterShape {
        RegisterShape { dims: sites.iter().map(|&s| self.dims[s]).collect() }
    }

    /// Checks that `support` lists distinct in-range sites.
    pub fn check_support(&self, support: &[usize]) -> Result<()> {
        for (i, &s) in support.iter().enumerate() {
            if s >= self.dims.len() {
                return Err(Error::SiteOutOfRange { site: s, len: self.dims.len() });
            }
            if support[..i].contains(&s) {
                return Err(Error::RepeatedSite(s));
            }
        }
        Ok(())
    }

    pub fn index_of(&self, levels: &[usize]) -> usize {
        levels.iter().zip(&self.dims).fold(0, |acc, (&l, &d)| acc * d + l)
    }

    pub fn levels_of(&self, mut index: usize) -> Vec<usize> {
        let mut levels = vec![0; self.dims.len()];
        for i in (0..self.dims.len()).rev() {
            levels[i] = index % self.dims[i];
            index /= self.dims[i];
        }
        levels
    }
}

/// A computational basis state stored by its levels, so that very large
/// registers such as long unary clocks can be compared without a dense vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub shape: RegisterShape,
    pub levels: Vec<usize>,
}

impl BasisState {
    pub fn new(shape: RegisterShape, levels: Vec<usize>) -> Result<Self> {
        if levels.len() != shape.len() {
            return Err(Error::ShapeMismatch(format!("{} levels for {} sites", levels.len(), shape.len())));
        }
        if let Some((i, _)) = levels.iter().enumerate().find(|(i, &l)| l >= shape.dim(*i)) {
            return Err(Error::InvalidParameter(format!("level out of range at site {i}")));
        }
        Ok(Self { shape, levels })
    }

    pub fn index(&self) -> usize {
        self.shape.index_of(&self.levels)
    }

    /// Levels written left to right, e.g. `00011`.
    pub fn label(&self) -> String {
        self.levels.iter().map(|l| std::char::from_digit(*l as u32, 36).unwrap_or('?')).collect()
    }

    pub fn to_vector(&self) -> Result<super::StateVector> {
        let dim = self.shape.checked_total_dim().unwrap_or(usize::MAX);
        let cap = crate::tolerances::dense_cap_from_env().max(1 << 20);
        if dim > cap {
            return Err(Error::DimensionTooLarge { dim, cap });
        }
        Ok(super::StateVector::basis(self.shape.clone(), self.index()))
    }
}
