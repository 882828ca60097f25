use nalgebra::DMatrix;

use super::gate::Gate;
use crate::error::{Error, Result};
use crate::linalg::{ops, RegisterShape, StateVector, C64};

/// Ordered gate list on a register whose first `witness_count` sites form the
/// witness and the rest start in `|0⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub shape: RegisterShape,
    pub gates: Vec<Gate>,
    pub witness_count: usize,
}

impl Circuit {
    pub fn new(shape: RegisterShape, witness_count: usize) -> Result<Self> {
        if witness_count > shape.len() {
            return Err(Error::InvalidParameter(format!("witness count {witness_count} exceeds {} sites", shape.len())));
        }
        Ok(Self { shape, gates: Vec::new(), witness_count })
    }

    pub fn with_gates(shape: RegisterShape, witness_count: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(shape, witness_count)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        self.shape.check_support(&gate.support)?;
        let d: usize = gate.support.iter().map(|&s| self.shape.dim(s)).product();
        if gate.unitary.nrows() != d {
            return Err(Error::ShapeMismatch(format!(
                "gate {} has a {}x{} matrix on sites of total dimension {d}",
                gate.label,
                gate.unitary.nrows(),
                gate.unitary.ncols()
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Number of gates `T`.
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn num_sites(&self) -> usize {
        self.shape.len()
    }

    pub fn has_wide_gates(&self) -> bool {
        self.gates.iter().any(Gate::is_wide)
    }

    pub fn witness_shape(&self) -> RegisterShape {
        self.shape.select(&(0..self.witness_count).collect::<Vec<_>>())
    }

    /// `|ξ⟩ ⊗ |0…0⟩` for a witness on the first `witness_count` sites.
    pub fn input_state(&self, witness: &StateVector) -> Result<StateVector> {
        if witness.shape != self.witness_shape() {
            return Err(Error::ShapeMismatch(format!(
                "witness register {:?} does not match {:?}",
                witness.shape.dims(),
                self.witness_shape().dims()
            )));
        }
        let anc = self.shape.select(&(self.witness_count..self.shape.len()).collect::<Vec<_>>());
        Ok(witness.tensor(&StateVector::zero(anc)))
    }

    /// Empty witness, for circuits whose whole input is fixed.
    pub fn no_witness() -> StateVector {
        StateVector { shape: RegisterShape::empty(), amplitudes: nalgebra::DVector::from_element(1, C64::new(1.0, 0.0)) }
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let mut s = state.clone();
        for g in &self.gates {
            s = s.apply_local(&g.support, &g.unitary)?;
        }
        Ok(s)
    }

    /// `ψ_0, …, ψ_T` with `ψ_t = C_t ψ_{t−1}`.
    pub fn snapshots(&self, input: &StateVector) -> Result<Vec<StateVector>> {
        let mut out = Vec::with_capacity(self.gates.len() + 1);
        out.push(input.clone());
        for g in &self.gates {
            let next = out.last().expect("nonempty").apply_local(&g.support, &g.unitary)?;
            out.push(next);
        }
        Ok(out)
    }

    /// Dense unitary of the whole circuit, product in gate order.
    pub fn unitary(&self, cap: usize) -> Result<DMatrix<C64>> {
        let dim = self.shape.total_dim();
        if dim > cap {
            return Err(Error::DimensionTooLarge { dim, cap });
        }
        let mut u = DMatrix::<C64>::identity(dim, dim);
        for g in &self.gates {
            u = ops::embed_local(&self.shape, &g.support, &g.unitary)? * u;
        }
        Ok(u)
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            shape: self.shape.clone(),
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
            witness_count: self.witness_count,
        }
    }

    /// This circuit followed by `other` on the same register.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        if other.shape != self.shape {
            return Err(Error::ShapeMismatch("circuits act on different registers".into()));
        }
        let mut c = self.clone();
        c.gates.extend(other.gates.iter().cloned());
        Ok(c)
    }
}

/// `H` on qubit 0 followed by the CNOT chain `i → i+1`, preparing
/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn cat_circuit(n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::InvalidParameter("cat circuit needs n ≥ 1".into()));
    }
    let mut gates = vec![Gate::h(0)];
    gates.extend((0..n - 1).map(|i| Gate::cnot(i, i + 1)));
    Circuit::with_gates(RegisterShape::qubits(n), 0, gates)
}
