use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{ops, pauli, real_matrix, C64};
use crate::tolerances::EQ_TOL;

/// A unitary on one or two sites. Wider gates are accepted but flagged.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub label: String,
    pub support: Vec<usize>,
    pub unitary: DMatrix<C64>,
}

impl Gate {
    pub fn new(label: impl Into<String>, support: Vec<usize>, unitary: DMatrix<C64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidParameter("gate with empty support".into()));
        }
        for (i, s) in support.iter().enumerate() {
            if support[..i].contains(s) {
                return Err(Error::RepeatedSite(*s));
            }
        }
        if unitary.nrows() != unitary.ncols() {
            return Err(Error::ShapeMismatch("gate matrix is not square".into()));
        }
        let dev = ops::unitary_deviation(&unitary);
        if dev > EQ_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { label: label.into(), support, unitary })
    }

    pub fn is_wide(&self) -> bool {
        self.support.len() > 2
    }

    pub fn arity(&self) -> usize {
        self.support.len()
    }

    pub fn adjoint(&self) -> Gate {
        Gate { label: format!("{}†", self.label), support: self.support.clone(), unitary: self.unitary.adjoint() }
    }

    /// Identity on a site of dimension `d`; the waiting steps of a circuit.
    pub fn identity(site: usize, d: usize) -> Gate {
        Gate { label: "I".into(), support: vec![site], unitary: DMatrix::identity(d, d) }
    }

    pub fn h(q: usize) -> Gate {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Gate { label: "H".into(), support: vec![q], unitary: real_matrix(2, &[s, s, s, -s]) }
    }

    pub fn x(q: usize) -> Gate {
        Gate { label: "X".into(), support: vec![q], unitary: pauli('X') }
    }

    pub fn y(q: usize) -> Gate {
        Gate { label: "Y".into(), support: vec![q], unitary: pauli('Y') }
    }

    pub fn z(q: usize) -> Gate {
        Gate { label: "Z".into(), support: vec![q], unitary: pauli('Z') }
    }

    pub fn s(q: usize) -> Gate {
        let mut m = DMatrix::<C64>::identity(2, 2);
        m[(1, 1)] = C64::new(0.0, 1.0);
        Gate { label: "S".into(), support: vec![q], unitary: m }
    }

    /// `exp(−iθY/2)`.
    pub fn ry(q: usize, theta: f64) -> Gate {
        let (s, c) = (theta / 2.0).sin_cos();
        Gate { label: format!("RY({theta})"), support: vec![q], unitary: real_matrix(2, &[c, -s, s, c]) }
    }

    pub fn cnot(control: usize, target: usize) -> Gate {
        Gate {
            label: "CNOT".into(),
            support: vec![control, target],
            unitary: real_matrix(4, &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.]),
        }
    }

    pub fn cz(a: usize, b: usize) -> Gate {
        Gate {
            label: "CZ".into(),
            support: vec![a, b],
            unitary: real_matrix(4, &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 1., 0., 0., 0., 0., -1.]),
        }
    }

    pub fn swap(a: usize, b: usize) -> Gate {
        Gate {
            label: "SWAP".into(),
            support: vec![a, b],
            unitary: real_matrix(4, &[1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 1.]),
        }
    }

    /// Built-in gate by name, as accepted in circuit files.
    pub fn named(name: &str, support: &[usize], dims: &[usize]) -> Result<Gate> {
        let need = |k: usize| -> Result<()> {
            if support.len() != k {
                return Err(Error::Parse(format!("gate {name} needs {k} sites, got {}", support.len())));
            }
            Ok(())
        };
        let qubits = |k: usize| -> Result<()> {
            need(k)?;
            if dims.iter().any(|&d| d != 2) {
                return Err(Error::Parse(format!("gate {name} acts on qubits only")));
            }
            Ok(())
        };
        let g = match name.to_ascii_uppercase().as_str() {
            "H" => {
                qubits(1)?;
                Gate::h(support[0])
            }
            "X" => {
                qubits(1)?;
                Gate::x(support[0])
            }
            "Y" => {
                qubits(1)?;
                Gate::y(support[0])
            }
            "Z" => {
                qubits(1)?;
                Gate::z(support[0])
            }
            "S" => {
                qubits(1)?;
                Gate::s(support[0])
            }
            "CNOT" | "CX" => {
                qubits(2)?;
                Gate::cnot(support[0], support[1])
            }
            "CZ" => {
                qubits(2)?;
                Gate::cz(support[0], support[1])
            }
            "SWAP" => {
                qubits(2)?;
                Gate::swap(support[0], support[1])
            }
            "I" | "ID" | "IDENTITY" => {
                let d: usize = dims.iter().product();
                Gate { label: "I".into(), support: support.to_vec(), unitary: DMatrix::identity(d, d) }
            }
            _ => return Err(Error::Parse(format!("unknown gate '{name}' without an explicit unitary"))),
        };
        Ok(g)
    }
}
